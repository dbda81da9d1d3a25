#pragma once

#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <vector>

namespace geoflow {

/// Real polynomial, coefficients in ascending order.
class Polynomial {
public:
    Polynomial() = default;
    Polynomial(std::initializer_list<double> c) : c_(c) { trim(); }
    explicit Polynomial(std::vector<double> c) : c_(std::move(c)) { trim(); }

    static Polynomial monomial(int degree, double coeff = 1.0) {
        std::vector<double> c(static_cast<std::size_t>(degree) + 1, 0.0);
        c.back() = coeff;
        return Polynomial(std::move(c));
    }

    /// Degree; the zero polynomial reports -1.
    int degree() const { return static_cast<int>(c_.size()) - 1; }
    const std::vector<double>& coefficients() const { return c_; }

    double operator()(double s) const {
        double acc = 0.0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * s + *it;
        return acc;
    }

    Polynomial derivative() const {
        if (c_.size() <= 1) return {};
        std::vector<double> d(c_.size() - 1);
        for (std::size_t k = 1; k < c_.size(); ++k) d[k - 1] = static_cast<double>(k) * c_[k];
        return Polynomial(std::move(d));
    }

    friend bool operator==(const Polynomial&, const Polynomial&) = default;

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0.0) c_.pop_back();
    }
    std::vector<double> c_;
};

} // namespace geoflow
