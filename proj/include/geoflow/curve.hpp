#pragma once

// Analytic curves phi: [a,b] -> R^{n-1}, their geodesic-flow translates
// a_t u(phi(s)) x in the quotient, and the statistics computed on them.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "geoflow/errors.hpp"
#include "geoflow/group.hpp"
#include "geoflow/lattice.hpp"
#include "geoflow/observables.hpp"
#include "geoflow/parallel.hpp"
#include "geoflow/polynomial.hpp"

namespace geoflow {

/// Scalar of the group acting on H^{Dim+1}: real for curves in R, complex for curves in R^2.
template <std::size_t Dim>
using CurveScalar = std::conditional_t<Dim == 1, double, cplx>;

template <std::size_t Dim>
    requires(Dim == 1 || Dim == 2)
class AnalyticCurve {
public:
    using Point = std::array<double, Dim>;
    using Scalar = CurveScalar<Dim>;

    /// zeta(s) = diag(e^{p(s)}, e^{-p(s)}) u^-(q(s)), a curve in P^-.
    struct ZetaPart {
        Polynomial log_scale;
        std::array<Polynomial, Dim> lower;
    };

    AnalyticCurve(double a, double b, std::array<Polynomial, Dim> coords, std::string id = "curve",
                  bool allow_constant = false)
        : a_(a), b_(b), coords_(std::move(coords)), id_(std::move(id)) {
        if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw InvalidInput("curve interval needs a < b");
        for (std::size_t k = 0; k < Dim; ++k) deriv_[k] = coords_[k].derivative();
        if (!allow_constant && degree() < 1)
            throw InvalidInput("constant curve (pass allow_constant to flag it explicitly)");
    }

    double lower() const { return a_; }
    double upper() const { return b_; }
    double length() const { return b_ - a_; }
    const std::string& id() const { return id_; }
    const std::array<Polynomial, Dim>& coordinates() const { return coords_; }

    int degree() const {
        int d = 0;
        for (const auto& p : coords_) d = std::max(d, p.degree());
        return d;
    }
    bool is_constant() const { return degree() < 1; }

    AnalyticCurve& with_zeta(ZetaPart z) {
        zeta_ = std::move(z);
        return *this;
    }
    const std::optional<ZetaPart>& zeta_part() const { return zeta_; }

    Point operator()(double s) const { return eval(s); }

    Point eval(double s) const {
        check(s);
        Point p;
        for (std::size_t k = 0; k < Dim; ++k) p[k] = coords_[k](s);
        return p;
    }

    Point derivative(double s) const {
        check(s);
        Point p;
        for (std::size_t k = 0; k < Dim; ++k) p[k] = deriv_[k](s);
        return p;
    }

    /// zeta(s) in the curve's group model; identity when no zeta part is set.
    Sl2<Scalar> zeta(double s) const {
        if (!zeta_) return {};
        const double c = std::exp(zeta_->log_scale(s));
        Point q;
        for (std::size_t k = 0; k < Dim; ++k) q[k] = zeta_->lower[k](s);
        return make_diagonal(Scalar(c)) * make_lower_unipotent(to_scalar(q));
    }

    static Scalar to_scalar(const Point& p) {
        if constexpr (Dim == 1) return p[0];
        else return cplx(p[0], p[1]);
    }

private:
    void check(double s) const {
        if (!(s >= a_ && s <= b_)) throw InvalidInput("curve parameter outside [a,b]");
    }

    double a_, b_;
    std::array<Polynomial, Dim> coords_;
    std::array<Polynomial, Dim> deriv_;
    std::string id_;
    std::optional<ZetaPart> zeta_;
};

template <std::size_t Dim>
typename AnalyticCurve<Dim>::Point eval_curve(const AnalyticCurve<Dim>& c, double s) {
    return c.eval(s);
}

template <std::size_t Dim>
typename AnalyticCurve<Dim>::Point eval_derivative(const AnalyticCurve<Dim>& c, double s) {
    return c.derivative(s);
}

/// The fixed direction w0 of the unipotent subgroup W: 1 in R, (1,0) in R^2.
template <std::size_t Dim>
typename AnalyticCurve<Dim>::Point default_w0() {
    typename AnalyticCurve<Dim>::Point w{};
    w[0] = 1.0;
    return w;
}

inline constexpr double kDerivativeTolerance = 1e-12;

/// z in MA with z . phi'(s) = w0, acting by u(z.v) = z u(v) z^{-1}.
/// For curves in R the group M is trivial, so phi'(s) must have the sign of w0.
template <std::size_t Dim>
Sl2<CurveScalar<Dim>> normalizer_z(const AnalyticCurve<Dim>& c, double s,
                                   const typename AnalyticCurve<Dim>::Point& w0) {
    using Scalar = CurveScalar<Dim>;
    const Scalar d = AnalyticCurve<Dim>::to_scalar(c.derivative(s));
    const Scalar w = AnalyticCurve<Dim>::to_scalar(w0);
    if (std::abs(d) < kDerivativeTolerance) throw DerivativeVanishes("phi'(" + std::to_string(s) + ") = 0");
    if (w == Scalar(0)) throw InvalidInput("w0 must be nonzero");
    const Scalar ratio = w / d;
    if constexpr (Dim == 1) {
        if (ratio < 0) throw InvalidInput("phi' and w0 have opposite signs; M is trivial in PSL(2,R)");
        return make_diagonal(std::sqrt(ratio));
    } else {
        return make_diagonal(std::sqrt(ratio));
    }
}

enum class SamplingRule { Midpoint, Endpoints, Random };

inline const char* to_string(SamplingRule r) {
    switch (r) {
    case SamplingRule::Midpoint: return "midpoint";
    case SamplingRule::Endpoints: return "endpoints";
    case SamplingRule::Random: return "random";
    }
    return "?";
}

struct TranslateOptions {
    SamplingRule rule = SamplingRule::Midpoint;
    bool with_normalizer = false;
    Parallelism parallelism{};
};

/// Normalized measure on the translated curve: equal weights over the kept samples.
struct EmpiricalMeasure {
    LatticeTag lattice = LatticeTag::Modular;
    std::vector<QuotientPoint> samples;
    std::vector<double> weights;
    std::vector<double> parameters; ///< curve parameter s of each sample
    double flow_time = 0;
    std::string curve_id;
    ComplexElement base;
    SamplingRule rule = SamplingRule::Midpoint;
    double dropped_fraction = 0; ///< mass removed where phi' vanishes

    std::size_t size() const { return samples.size(); }
};

/// Sample parameters s_0..s_{count-1} in [a,b] under `rule`.
inline std::vector<double> sample_parameters(double a, double b, std::size_t count, SamplingRule rule,
                                             std::uint64_t seed, Parallelism par = {}) {
    std::vector<double> s(count);
    const double len = b - a;
    switch (rule) {
    case SamplingRule::Midpoint:
        for (std::size_t j = 0; j < count; ++j) s[j] = a + len * (static_cast<double>(j) + 0.5) / static_cast<double>(count);
        break;
    case SamplingRule::Endpoints:
        for (std::size_t j = 0; j < count; ++j)
            s[j] = count == 1 ? a : a + len * static_cast<double>(j) / static_cast<double>(count - 1);
        break;
    case SamplingRule::Random:
        for_each_block(count, par, [&](std::size_t block, std::size_t begin, std::size_t end) {
            auto rng = block_engine(seed, 0x5c, block);
            std::uniform_real_distribution<double> u(a, b);
            for (std::size_t j = begin; j < end; ++j) s[j] = u(rng);
        });
        break;
    }
    return s;
}

/// Flow-model element z(s) a_t zeta(s) u(phi(s)) base at one parameter.
template <std::size_t Dim>
Sl2<CurveScalar<Dim>> curve_element(const AnalyticCurve<Dim>& c, const Sl2<CurveScalar<Dim>>& base, double t,
                                    double s, bool with_normalizer) {
    using Scalar = CurveScalar<Dim>;
    Sl2<Scalar> g = make_flow<Scalar>(t) * c.zeta(s) * make_unipotent(AnalyticCurve<Dim>::to_scalar(c.eval(s))) * base;
    if (with_normalizer) g = normalizer_z(c, s, default_w0<Dim>()) * g;
    return g;
}

/// Frame-model quotient point of a flow-model element.
template <GroupScalar Scalar>
QuotientPoint project(LatticeTag lattice, const Sl2<Scalar>& g) {
    return reduce(lattice, frame_coordinates(flip(g)));
}

namespace detail {

inline ComplexElement as_complex(const RealElement& g) { return complexify(g); }
inline ComplexElement as_complex(const ComplexElement& g) { return g; }

template <std::size_t Dim>
void check_lattice(LatticeTag lattice) {
    if (Dim == 2 && lattice == LatticeTag::Modular)
        throw InvalidInput("curves in R^2 live in H^3; use the Picard lattice");
}

} // namespace detail

/// Samples of a_t u(phi(s)) base (optionally z(s)-normalized) reduced into the quotient.
/// `transform` is applied to the flow-model element before projection.
template <std::size_t Dim, class Transform>
EmpiricalMeasure translate_curve_with(const AnalyticCurve<Dim>& c, const Sl2<CurveScalar<Dim>>& base,
                                      LatticeTag lattice, double t, std::int64_t count, std::uint64_t seed,
                                      const TranslateOptions& opt, Transform&& transform) {
    using Scalar = CurveScalar<Dim>;
    if (count < 1) throw InvalidInput("translate_curve count must be at least 1");
    if (!std::isfinite(t)) throw InvalidInput("flow time is not finite");
    // Real curves may also be projected to the Picard quotient through PSL(2,R) < PSL(2,C).
    detail::check_lattice<Dim>(lattice);

    auto params = sample_parameters(c.lower(), c.upper(), static_cast<std::size_t>(count), opt.rule, seed,
                                    opt.parallelism);
    if (opt.with_normalizer) {
        std::erase_if(params, [&](double s) {
            return std::abs(AnalyticCurve<Dim>::to_scalar(c.derivative(s))) < kDerivativeTolerance;
        });
    }
    EmpiricalMeasure m;
    m.lattice = lattice;
    m.flow_time = t;
    m.curve_id = c.id();
    m.base = detail::as_complex(base);
    m.rule = opt.rule;
    m.dropped_fraction = 1.0 - static_cast<double>(params.size()) / static_cast<double>(count);
    if (params.empty()) throw DerivativeVanishes("phi' vanishes at every sample");
    m.samples.resize(params.size());
    for_each_block(params.size(), opt.parallelism, [&](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t j = begin; j < end; ++j) {
            Sl2<Scalar> g = transform(curve_element(c, base, t, params[j], opt.with_normalizer));
            if (lattice == LatticeTag::Picard) m.samples[j] = project(lattice, detail::as_complex(g));
            else m.samples[j] = project(lattice, g);
        }
    });
    m.weights.assign(params.size(), 1.0 / static_cast<double>(params.size()));
    m.parameters = std::move(params);
    return m;
}

template <std::size_t Dim>
EmpiricalMeasure translate_curve(const AnalyticCurve<Dim>& c, const Sl2<CurveScalar<Dim>>& base,
                                 LatticeTag lattice, double t, std::int64_t count, std::uint64_t seed,
                                 const TranslateOptions& opt = {}) {
    return translate_curve_with(c, base, lattice, t, count, seed, opt, [](const auto& g) { return g; });
}

// ---------------------------------------------------------------------------
// Statistics

struct ObservableComparison {
    std::string name;
    double empirical = 0;
    double reference = 0;
    double error_bar = 0; ///< combined standard error
    double deviation() const { return std::abs(empirical - reference); }
};

struct DiscrepancyReport {
    std::vector<ObservableComparison> per_observable;
    double max_defect = 0;
    double error_bar = 0; ///< largest combined standard error in the battery
};

namespace detail {

inline DiscrepancyReport compare(std::span<const QuotientPoint> pts, std::span<const double> w, double cusp_mass,
                                 LatticeTag lattice, const Battery& battery) {
    if (battery.empty()) throw InvalidInput("observable battery is empty");
    DiscrepancyReport r;
    for (const auto& f : battery) {
        if (!f.reference) throw InvalidInput("observable '" + f.name + "' has no reference value");
        const auto m = weighted_mean(f, pts, w, cusp_mass, lattice);
        ObservableComparison c{f.name, m.mean, f.reference->value,
                               std::hypot(m.error, f.reference->error)};
        r.max_defect = std::max(r.max_defect, c.deviation());
        r.error_bar = std::max(r.error_bar, c.error_bar);
        r.per_observable.push_back(std::move(c));
    }
    return r;
}

} // namespace detail

/// max over the battery of |empirical mean - reference|.
inline DiscrepancyReport discrepancy_report(const EmpiricalMeasure& m, const Battery& battery) {
    return detail::compare(m.samples, m.weights, 0.0, m.lattice, battery);
}

inline DiscrepancyReport discrepancy_report(const HaarSampleSet& h, const Battery& battery) {
    const std::vector<double> w(h.points.size(), h.weight());
    return detail::compare(h.points, w, h.tail_mass, h.lattice, battery);
}

inline double discrepancy(const EmpiricalMeasure& m, const Battery& battery) {
    return discrepancy_report(m, battery).max_defect;
}

/// Fraction of samples with height <= y_max (the weights are equal).
inline double nondivergence_fraction(const EmpiricalMeasure& m, double y_max) {
    if (m.samples.empty()) throw InvalidInput("empty measure");
    std::size_t below = 0;
    for (const auto& q : m.samples)
        if (q.height() <= y_max) ++below;
    return static_cast<double>(below) / static_cast<double>(m.samples.size());
}

inline double nondivergence_fraction(const HaarSampleSet& h, double y_max) {
    if (h.points.empty()) throw InvalidInput("empty sample");
    std::size_t below = 0;
    for (const auto& q : h.points)
        if (q.height() <= y_max) ++below;
    return h.weight() * static_cast<double>(below) + (y_max >= h.height_cap ? h.tail_mass : 0.0);
}

struct DefectReport {
    std::vector<ObservableComparison> per_observable; ///< empirical = shifted mean, reference = unshifted mean
    double defect = 0;
    double error_bar = 0; ///< standard error of the paired difference, max over battery
};

/// Sensitivity of the normalized measure lambda_t to left translation by u(t0 w0).
template <std::size_t Dim>
DefectReport w_invariance_defect(const AnalyticCurve<Dim>& c, const Sl2<CurveScalar<Dim>>& base, LatticeTag lattice,
                                 double t, double t0, const Battery& battery, std::int64_t count,
                                 std::uint64_t seed, TranslateOptions opt = {}) {
    using Scalar = CurveScalar<Dim>;
    if (battery.empty()) throw InvalidInput("observable battery is empty");
    opt.with_normalizer = true;
    auto w0 = default_w0<Dim>();
    for (auto& x : w0) x *= t0;
    const Sl2<Scalar> shift = make_unipotent(AnalyticCurve<Dim>::to_scalar(w0));
    const auto plain = translate_curve(c, base, lattice, t, count, seed, opt);
    const auto moved = translate_curve_with(c, base, lattice, t, count, seed, opt,
                                            [&](const Sl2<Scalar>& g) { return shift * g; });
    DefectReport r;
    const double n = static_cast<double>(plain.size());
    for (const auto& f : battery) {
        double a = 0, b = 0;
        std::vector<double> diff(plain.size());
        for (std::size_t i = 0; i < plain.size(); ++i) {
            const double fa = f(plain.samples[i]), fb = f(moved.samples[i]);
            a += fa;
            b += fb;
            diff[i] = fb - fa;
        }
        a /= n;
        b /= n;
        double var = 0;
        for (double d : diff) var += (d - (b - a)) * (d - (b - a));
        const double se = std::sqrt(var / n) / std::sqrt(n);
        ObservableComparison cmp{f.name, b, a, se};
        r.defect = std::max(r.defect, cmp.deviation());
        r.error_bar = std::max(r.error_bar, se);
        r.per_observable.push_back(std::move(cmp));
    }
    return r;
}

} // namespace geoflow
