#pragma once

// Matrix models of PSL(2,R) (acting on H^2) and PSL(2,C) (acting on H^3),
// the subgroups A, N, N^-, M used by the experiments, the Bruhat split,
// boundary maps, frames on the unit tangent bundle and the hyperbolic metric.
//
// Two models of the homogeneous space appear in this library:
//
//   * the "flow model" G/Gamma with points g*Gamma, geodesic flow acting on
//     the left by a_t = diag(e^{t/2}, e^{-t/2}) and curves a_t u(phi(s)) g0;
//   * the "frame model" Gamma\G, where Gamma acts by Moebius transformations
//     on the left and the frame of h is (h.j, unit vector pointing to h.0).
//
// They are identified once, by the anti-automorphism
//
//     flip([[a, b], [c, d]]) = [[d, b], [c, a]]
//
// which fixes u(v), sends a_t to a_{-t} and maps Gamma to itself for both
// lattices in lattice.hpp. Under flip the flow-model geodesic flow becomes
// right multiplication by a_{-t}, and the Bruhat coordinate g12/g11 of g
// becomes the forward endpoint flip(g).0 of the frame.

#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <type_traits>

#include "geoflow/errors.hpp"

namespace geoflow {

using cplx = std::complex<double>;

template <class T>
struct is_complex : std::false_type {};
template <class T>
struct is_complex<std::complex<T>> : std::true_type {};
template <class T>
inline constexpr bool is_complex_v = is_complex<T>::value;

template <class Scalar>
concept GroupScalar = std::same_as<Scalar, double> || std::same_as<Scalar, cplx>;

namespace detail {

inline bool finite(double x) { return std::isfinite(x); }
inline bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

inline double abs2(double x) { return x * x; }
inline double abs2(cplx z) { return std::norm(z); }

} // namespace detail

/// Element of SL(2,R) or SL(2,C), read projectively (g and -g are the same point).
template <GroupScalar Scalar>
class Sl2 {
public:
    using scalar_type = Scalar;
    /// n of the hyperbolic space H^n the group acts on.
    static constexpr int space_dimension = is_complex_v<Scalar> ? 3 : 2;

    Sl2() : m_{Scalar(1), Scalar(0), Scalar(0), Scalar(1)} {}

    /// Entries in row-major order. The determinant must be 1 up to rounding;
    /// small drift is renormalized away.
    Sl2(Scalar a, Scalar b, Scalar c, Scalar d) : m_{a, b, c, d} {
        for (const auto& x : m_)
            if (!detail::finite(x)) throw InvalidInput("group element with non-finite entry");
        const Scalar det = a * d - b * c;
        if (std::abs(det - Scalar(1)) > 1e-6)
            throw InvalidInput("group element with determinant far from 1");
        renormalize();
    }

    const Scalar& operator()(int i, int j) const { return m_[2 * i + j]; }
    Scalar a() const { return m_[0]; }
    Scalar b() const { return m_[1]; }
    Scalar c() const { return m_[2]; }
    Scalar d() const { return m_[3]; }

    Scalar det() const { return m_[0] * m_[3] - m_[1] * m_[2]; }

    /// Frobenius norm.
    double norm() const {
        double s = 0;
        for (const auto& x : m_) s += detail::abs2(x);
        return std::sqrt(s);
    }

    Sl2 inverse() const { return raw(m_[3], -m_[1], -m_[2], m_[0]); }

    friend Sl2 operator*(const Sl2& x, const Sl2& y) {
        Sl2 r = raw(x.m_[0] * y.m_[0] + x.m_[1] * y.m_[2], x.m_[0] * y.m_[1] + x.m_[1] * y.m_[3],
                    x.m_[2] * y.m_[0] + x.m_[3] * y.m_[2], x.m_[2] * y.m_[1] + x.m_[3] * y.m_[3]);
        r.renormalize();
        return r;
    }

    /// Representative with the first nonzero entry positive (real model);
    /// the complex model is returned unchanged and compared up to sign.
    Sl2 canonical() const {
        if constexpr (is_complex_v<Scalar>) {
            return *this;
        } else {
            for (const auto& x : m_) {
                if (x != 0.0) return x > 0 ? *this : raw(-m_[0], -m_[1], -m_[2], -m_[3]);
            }
            return *this;
        }
    }

    /// Frobenius distance between the images in PSL(2).
    friend double projective_distance(const Sl2& x, const Sl2& y) {
        double plus = 0, minus = 0;
        for (int k = 0; k < 4; ++k) {
            minus += detail::abs2(x.m_[k] - y.m_[k]);
            plus += detail::abs2(x.m_[k] + y.m_[k]);
        }
        return std::sqrt(std::min(plus, minus));
    }

    /// Entrywise distance without identifying g and -g.
    friend double entry_distance(const Sl2& x, const Sl2& y) {
        double s = 0;
        for (int k = 0; k < 4; ++k) s += detail::abs2(x.m_[k] - y.m_[k]);
        return std::sqrt(s);
    }

private:
    static Sl2 raw(Scalar a, Scalar b, Scalar c, Scalar d) {
        Sl2 r;
        r.m_ = {a, b, c, d};
        return r;
    }

    void renormalize() {
        const Scalar det = this->det();
        if (std::abs(det - Scalar(1)) <= 1e-15) return;
        Scalar s;
        if constexpr (is_complex_v<Scalar>) {
            s = std::sqrt(det);
        } else {
            if (det <= 0) throw InvalidInput("group element with nonpositive determinant");
            s = std::sqrt(det);
        }
        for (auto& x : m_) x /= s;
    }

    std::array<Scalar, 4> m_;
};

using RealElement = Sl2<double>;
using ComplexElement = Sl2<cplx>;

// ---------------------------------------------------------------------------
// One-parameter subgroups

/// u(v): upper unipotent with off-diagonal entry v.
template <GroupScalar Scalar>
Sl2<Scalar> make_unipotent(Scalar v) {
    if (!detail::finite(v)) throw InvalidInput("unipotent parameter is not finite");
    return Sl2<Scalar>(Scalar(1), v, Scalar(0), Scalar(1));
}

/// u(v) for v in R^2, identified with C.
inline ComplexElement make_unipotent(const std::array<double, 2>& v) {
    return make_unipotent(cplx(v[0], v[1]));
}

template <GroupScalar Scalar>
Sl2<Scalar> make_lower_unipotent(Scalar v) {
    if (!detail::finite(v)) throw InvalidInput("unipotent parameter is not finite");
    return Sl2<Scalar>(Scalar(1), Scalar(0), v, Scalar(1));
}

/// a_t = diag(e^{t/2}, e^{-t/2}); a_t u(v) a_t^{-1} = u(e^t v).
template <GroupScalar Scalar = double>
Sl2<Scalar> make_flow(double t) {
    if (!std::isfinite(t)) throw InvalidInput("flow time is not finite");
    return Sl2<Scalar>(Scalar(std::exp(t / 2)), Scalar(0), Scalar(0), Scalar(std::exp(-t / 2)));
}

/// diag(c, 1/c); conjugation multiplies u(v) to u(c^2 v).
template <GroupScalar Scalar>
Sl2<Scalar> make_diagonal(Scalar c) {
    if (c == Scalar(0) || !detail::finite(c)) throw InvalidInput("diagonal entry must be finite and nonzero");
    return Sl2<Scalar>(c, Scalar(0), Scalar(0), Scalar(1) / c);
}

/// The anti-automorphism identifying the flow model with the frame model.
template <GroupScalar Scalar>
Sl2<Scalar> flip(const Sl2<Scalar>& g) {
    return Sl2<Scalar>(g.d(), g.b(), g.c(), g.a());
}

/// Embeds a real element into the complex model.
inline ComplexElement complexify(const RealElement& g) {
    return ComplexElement(g.a(), g.b(), g.c(), g.d());
}

// ---------------------------------------------------------------------------
// Bruhat split and boundary

template <GroupScalar Scalar>
struct BruhatParts {
    Sl2<Scalar> zeta; ///< lower triangular, in P^-
    Scalar v;         ///< N-coordinate
};

inline constexpr double kBruhatTolerance = 1e-10;

/// g = zeta * u(v) with zeta lower triangular; fails on the cell P^- k0.
template <GroupScalar Scalar>
BruhatParts<Scalar> bruhat_split(const Sl2<Scalar>& g) {
    if (std::abs(g.a()) <= kBruhatTolerance * g.norm())
        throw BruhatSingular("upper-left entry vanishes; element lies on P^- k0");
    const Scalar v = g.b() / g.a();
    return {Sl2<Scalar>(g.a(), Scalar(0), g.c(), Scalar(1) / g.a()), v};
}

/// Point of the ideal boundary R^{n-1} u {inf}, stored as a complex
/// coordinate (imaginary part zero for the boundary of H^2).
class BoundaryPoint {
public:
    static BoundaryPoint infinity() { return BoundaryPoint(); }

    explicit BoundaryPoint(cplx v) : value_(v) {
        if (!detail::finite(v)) throw InvalidInput("finite boundary coordinate expected");
    }
    explicit BoundaryPoint(double v) : BoundaryPoint(cplx(v, 0.0)) {}

    bool is_infinite() const { return !value_.has_value(); }
    cplx value() const {
        if (!value_) throw InvalidInput("boundary point at infinity has no finite coordinate");
        return *value_;
    }

    friend bool operator==(const BoundaryPoint&, const BoundaryPoint&) = default;

private:
    BoundaryPoint() = default;
    std::optional<cplx> value_;
};

/// Visual map p(g) in the flow model: the Bruhat coordinate, or infinity.
template <GroupScalar Scalar>
BoundaryPoint boundary_point(const Sl2<Scalar>& g) {
    if (std::abs(g.a()) <= kBruhatTolerance * g.norm()) return BoundaryPoint::infinity();
    return BoundaryPoint(cplx(g.b() / g.a()));
}

/// Inverse stereographic projection R^{N-1} u {inf} -> S^{N-1} subset R^N
/// with pole (0,...,0,1) as the image of infinity and 0 mapped to the antipode.
template <int N>
    requires(N == 2 || N == 3)
std::array<double, N> stereographic(const BoundaryPoint& p) {
    std::array<double, N> out{};
    if (p.is_infinite()) {
        out[N - 1] = 1.0;
        return out;
    }
    const cplx v = p.value();
    if constexpr (N == 2) {
        if (v.imag() != 0.0) throw InvalidInput("planar stereographic map needs a real coordinate");
    }
    const double r2 = std::norm(v);
    const double den = 1.0 + r2;
    out[0] = 2.0 * v.real() / den;
    if constexpr (N == 3) out[1] = 2.0 * v.imag() / den;
    out[N - 1] = (r2 - 1.0) / den;
    return out;
}

// ---------------------------------------------------------------------------
// Upper half-space geometry

/// Point of H^2 or H^3: horizontal coordinate z (real for H^2) and height.
struct UpperSpacePoint {
    cplx horizontal{0.0, 0.0};
    double height = 1.0;

    UpperSpacePoint() = default;
    UpperSpacePoint(cplx z, double h) : horizontal(z), height(h) {
        if (!(h > 0.0) || !std::isfinite(h) || !detail::finite(z))
            throw InvalidInput("upper half-space point needs finite coordinates and positive height");
    }
};

/// Unit tangent direction, Euclidean components (dx, dy, dh) in the
/// half-space chart; dy is zero for frames of H^2.
struct Direction {
    std::array<double, 3> v{0.0, 0.0, -1.0};

    /// Angle in [0, 2pi) of (dx, dh); meaningful for H^2 frames.
    double angle() const {
        double a = std::atan2(v[2], v[0]);
        if (a < 0) a += 2.0 * std::numbers::pi;
        if (a >= 2.0 * std::numbers::pi) a -= 2.0 * std::numbers::pi;
        return a;
    }

    static Direction from_angle(double theta) {
        return Direction{{std::cos(theta), 0.0, std::sin(theta)}};
    }
};

struct FrameCoordinate {
    UpperSpacePoint base;
    Direction direction;
};

/// cosh d = 1 + (|dz|^2 + dh^2) / (2 h_p h_q), evaluated in the asinh form.
inline double hyperbolic_distance(const UpperSpacePoint& p, const UpperSpacePoint& q) {
    const double chord2 = std::norm(p.horizontal - q.horizontal) + (p.height - q.height) * (p.height - q.height);
    return 2.0 * std::asinh(std::sqrt(chord2) / (2.0 * std::sqrt(p.height * q.height)));
}

/// Moebius action on H^3 (and on H^2 as the slice Im z = 0).
template <GroupScalar Scalar>
UpperSpacePoint act(const Sl2<Scalar>& g, const UpperSpacePoint& p) {
    const cplx a(g.a()), b(g.b()), c(g.c()), d(g.d());
    const cplx z = p.horizontal;
    const double r2 = p.height * p.height;
    const cplx cz_d = c * z + d;
    const double den = std::norm(cz_d) + std::norm(c) * r2;
    const cplx num = (a * z + b) * std::conj(cz_d) + a * std::conj(c) * r2;
    return UpperSpacePoint(num / den, p.height / den);
}

/// Moebius action on the boundary C u {inf}.
template <GroupScalar Scalar>
BoundaryPoint act(const Sl2<Scalar>& g, const BoundaryPoint& p) {
    const cplx a(g.a()), b(g.b()), c(g.c()), d(g.d());
    if (p.is_infinite()) {
        if (c == cplx(0.0)) return BoundaryPoint::infinity();
        return BoundaryPoint(a / c);
    }
    const cplx den = c * p.value() + d;
    if (den == cplx(0.0)) return BoundaryPoint::infinity();
    return BoundaryPoint((a * p.value() + b) / den);
}

/// Unit tangent at `base` of the geodesic running forward to `endpoint`.
inline Direction direction_toward(const UpperSpacePoint& base, const BoundaryPoint& endpoint) {
    if (endpoint.is_infinite()) return Direction{{0.0, 0.0, 1.0}};
    const cplx offset = endpoint.value() - base.horizontal;
    const double dist = std::abs(offset);
    if (dist == 0.0) return Direction{{0.0, 0.0, -1.0}};
    const double r = base.height;
    // Geodesic is a semicircle in the vertical plane through base and endpoint;
    // coordinates in that plane: s along offset, h vertical.
    const double center = (dist * dist - r * r) / (2.0 * dist);
    const double radius = (dist * dist + r * r) / (2.0 * dist);
    const cplx unit = offset / dist;
    const double ds = r / radius;
    const double dh = center / radius;
    return Direction{{ds * unit.real(), ds * unit.imag(), dh}};
}

/// Forward endpoint of the geodesic through `base` with tangent `dir`.
inline BoundaryPoint endpoint_of(const UpperSpacePoint& base, const Direction& dir) {
    const double horiz = std::hypot(dir.v[0], dir.v[1]);
    if (horiz == 0.0) {
        return dir.v[2] > 0 ? BoundaryPoint::infinity() : BoundaryPoint(base.horizontal);
    }
    const cplx unit(dir.v[0] / horiz, dir.v[1] / horiz);
    // From direction_toward: horiz = r/R, dh = c/R, dist = c + R.
    const double dist = base.height * (1.0 + dir.v[2]) / horiz;
    return BoundaryPoint(base.horizontal + dist * unit);
}

/// Frame of h in the frame model: base point h.j, pointing to h.0.
template <GroupScalar Scalar>
FrameCoordinate frame_coordinates(const Sl2<Scalar>& h) {
    const UpperSpacePoint base = act(h, UpperSpacePoint(cplx(0.0), 1.0));
    const BoundaryPoint end = act(h, BoundaryPoint(0.0));
    return {base, direction_toward(base, end)};
}

/// Pushes a frame forward by an isometry.
template <GroupScalar Scalar>
FrameCoordinate act(const Sl2<Scalar>& g, const FrameCoordinate& f) {
    const UpperSpacePoint base = act(g, f.base);
    return {base, direction_toward(base, act(g, endpoint_of(f.base, f.direction)))};
}

} // namespace geoflow
