#pragma once

// Empirical (C, alpha)-good estimates for families of polynomials:
//
//   |{t in J : |xi(t)| < r}| <= C (r / sup_J |xi|)^alpha |J|
//
// tested over all subintervals J = [i/k, j/k] of the base interval and a grid
// of thresholds r.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "geoflow/errors.hpp"
#include "geoflow/polynomial.hpp"
#include "geoflow/rep.hpp"

namespace geoflow {

struct GoodTest {
    double interval_lo = 0, interval_hi = 0;
    std::size_t function = 0;
    double r = 0;
    double sublevel_fraction = 0; ///< |{|xi| < r}| / |J|
    double relative_level = 0;    ///< r / sup_J |xi|
};

struct GoodFamilyReport {
    double fitted_C = 0;
    double fitted_alpha = 0;
    double C_cap = 0; ///< largest C accepted while fitting alpha
    double worst_lo = 0, worst_hi = 0;
    int degree = 0;
    std::vector<GoodTest> tests;
};

struct GoodFitOptions {
    double lo = 0.0, hi = 1.0;
    int cells = 2000;           ///< grid cells per subinterval
    double alpha_step = 1e-3;
    double alpha_max = 2.0;
    /// C accepted while fitting; nonpositive selects d (d+1)^{1/d} for the family degree d.
    double C_cap = 0.0;
};

/// Sublevel measure of {|xi| < r} on [a,b]: grid cells, with sign changes
/// located by bisection.
inline double sublevel_measure(const Polynomial& xi, double a, double b, double r, int cells) {
    auto below = [&](double t) { return std::abs(xi(t)) - r; };
    const double h = (b - a) / cells;
    double total = 0;
    double left = a, g_left = below(a);
    for (int i = 1; i <= cells; ++i) {
        const double right = i == cells ? b : a + h * i;
        const double g_right = below(right);
        if (g_left < 0 && g_right < 0) {
            total += right - left;
        } else if ((g_left < 0) != (g_right < 0)) {
            double lo = left, hi = right;
            const bool starts_inside = g_left < 0;
            for (int it = 0; it < 80 && hi - lo > 1e-15 * std::max(1.0, std::abs(lo)); ++it) {
                const double mid = 0.5 * (lo + hi);
                if ((below(mid) < 0) == starts_inside) lo = mid;
                else hi = mid;
            }
            const double cross = 0.5 * (lo + hi);
            total += starts_inside ? cross - left : right - cross;
        }
        left = right;
        g_left = g_right;
    }
    return total;
}

inline double sup_abs(const Polynomial& xi, double a, double b, int cells) {
    double s = 0;
    for (int i = 0; i <= cells; ++i) s = std::max(s, std::abs(xi(a + (b - a) * i / cells)));
    return s;
}

namespace detail {

inline std::vector<GoodTest> good_tests(const std::vector<Polynomial>& family, int subintervals,
                                        const std::vector<double>& r_grid, const GoodFitOptions& opt) {
    std::vector<GoodTest> tests;
    const double step = (opt.hi - opt.lo) / subintervals;
    for (int i = 0; i < subintervals; ++i) {
        for (int j = i + 1; j <= subintervals; ++j) {
            const double a = opt.lo + i * step, b = opt.lo + j * step;
            for (std::size_t f = 0; f < family.size(); ++f) {
                const double sup = sup_abs(family[f], a, b, opt.cells);
                if (sup == 0.0) continue;
                for (double r : r_grid) {
                    tests.push_back({a, b, f, r, sublevel_measure(family[f], a, b, r, opt.cells) / (b - a), r / sup});
                }
            }
        }
    }
    return tests;
}

/// Smallest C making every test pass at exponent alpha, and the test that sets it.
inline std::pair<double, std::size_t> required_C(const std::vector<GoodTest>& tests, double alpha) {
    double c = 0;
    std::size_t worst = 0;
    for (std::size_t i = 0; i < tests.size(); ++i) {
        if (tests[i].sublevel_fraction <= 0) continue;
        const double need = tests[i].sublevel_fraction / std::pow(tests[i].relative_level, alpha);
        if (need > c) {
            c = need;
            worst = i;
        }
    }
    return {c, worst};
}

} // namespace detail

/// Kleinbock-Margulis constant d (d+1)^{1/d} for polynomials of degree <= d.
inline double polynomial_good_constant(int d) { return d * std::pow(d + 1.0, 1.0 / d); }

/// Largest alpha (on a grid) for which the family is (C, alpha)-good with C <= C_cap
/// on every tested (J, r).
inline GoodFamilyReport good_function_fit(const std::vector<Polynomial>& family, int subintervals,
                                          const std::vector<double>& r_grid, GoodFitOptions opt = {}) {
    if (subintervals < 4) throw InvalidInput("good_function_fit needs at least 4 subintervals");
    if (r_grid.empty()) throw InvalidInput("empty r grid");
    for (double r : r_grid)
        if (!(r > 0)) throw InvalidInput("thresholds r must be positive");
    int degree = 0;
    for (const auto& p : family) degree = std::max(degree, p.degree());
    if (degree < 1) throw InvalidInput("family of constant functions is not (C,alpha)-good for any alpha");

    GoodFamilyReport rep;
    rep.degree = degree;
    rep.C_cap = opt.C_cap > 0 ? opt.C_cap : polynomial_good_constant(degree);
    rep.tests = detail::good_tests(family, subintervals, r_grid, opt);

    // Tests with r >= sup need at most C = 1 <= C_cap; the rest make required_C
    // nondecreasing in alpha, so the feasible alphas form an interval from 0.
    double lo = 0, hi = opt.alpha_max;
    if (detail::required_C(rep.tests, hi).first <= rep.C_cap) {
        lo = hi;
    } else {
        while (hi - lo > opt.alpha_step) {
            const double mid = 0.5 * (lo + hi);
            (detail::required_C(rep.tests, mid).first <= rep.C_cap ? lo : hi) = mid;
        }
    }
    // Report on the alpha_step grid; rounding down keeps the bound valid.
    lo = std::floor(lo / opt.alpha_step + 1e-9) * opt.alpha_step;
    rep.fitted_alpha = lo;
    const auto [c, worst] = detail::required_C(rep.tests, lo);
    rep.fitted_C = std::max(c, 1.0);
    if (!rep.tests.empty()) {
        rep.worst_lo = rep.tests[worst].interval_lo;
        rep.worst_hi = rep.tests[worst].interval_hi;
    }
    return rep;
}

/// Whether (C, alpha) satisfies the sublevel inequality on every test, with
/// relative slack `rel_tol` for the measurement.
inline bool satisfies_good_bound(const std::vector<GoodTest>& tests, double C, double alpha, double rel_tol = 1e-9) {
    for (const auto& t : tests)
        if (t.sublevel_fraction > C * std::pow(t.relative_level, alpha) * (1.0 + rel_tol)) return false;
    return true;
}

inline bool satisfies_good_bound(const std::vector<Polynomial>& family, int subintervals,
                                 const std::vector<double>& r_grid, double C, double alpha, GoodFitOptions opt = {}) {
    return satisfies_good_bound(detail::good_tests(family, subintervals, r_grid, opt), C, alpha);
}

/// Geometric grid of thresholds 10^lo_exp .. 10^hi_exp, `per_decade` points per decade.
inline std::vector<double> log_grid(double lo_exp, double hi_exp, int per_decade) {
    std::vector<double> g;
    const int n = static_cast<int>(std::lround((hi_exp - lo_exp) * per_decade));
    for (int i = 0; i <= n; ++i) g.push_back(std::pow(10.0, lo_exp + static_cast<double>(i) / per_decade));
    return g;
}

/// Nonzero matrix coefficients of exp(t e) on V_m as polynomials in t.
inline std::vector<Polynomial> unipotent_coordinate_family(int m) {
    if (m < 1) throw InvalidInput("irrep needs m >= 1");
    std::vector<Polynomial> fam;
    for (int k = 0; k <= m; ++k)
        for (int l = 0; l <= k; ++l)
            fam.push_back(Polynomial::monomial(k - l, static_cast<double>(binomial(k, l))));
    return fam;
}

} // namespace geoflow
