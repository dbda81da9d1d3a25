#pragma once

#include <stdexcept>
#include <string>

namespace geoflow {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidInput : public Error {
public:
    explicit InvalidInput(const std::string& what) : Error("invalid input: " + what) {}
};

/// The element lies on the lower-dimensional Bruhat cell P^- k0.
class BruhatSingular : public Error {
public:
    explicit BruhatSingular(const std::string& what) : Error("Bruhat singular: " + what) {}
};

class ReductionDiverged : public Error {
public:
    explicit ReductionDiverged(const std::string& what) : Error("reduction diverged: " + what) {}
};

class DerivativeVanishes : public Error {
public:
    explicit DerivativeVanishes(const std::string& what) : Error("derivative vanishes: " + what) {}
};

class SingularParameter : public Error {
public:
    explicit SingularParameter(const std::string& what) : Error("singular parameter: " + what) {}
};

} // namespace geoflow
