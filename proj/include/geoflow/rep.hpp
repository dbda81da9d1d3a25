#pragma once

// Finite-dimensional irreducible representations of SL(2,R) in the weight
// basis v_0..v_m (h v_k = (m-2k) v_k, e v_k = k v_{k-1}), the transfer block
// B(m,r) between V^{0-} and V^{+0}, the constant kappa and randomized checks of
//
//     max{ |v^+|, |(u v)^{+0}| } >= kappa |v|,
//     max{ |a v|, |a u v| }      >= kappa |v|     (alpha(a) > 1).
//
// Structural identities are exact (Boost.Multiprecision rationals); norms and
// singular values are computed in double precision.

#include <boost/multiprecision/cpp_int.hpp>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "geoflow/errors.hpp"
#include "geoflow/parallel.hpp"

namespace geoflow {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;

namespace detail {

inline BigInt parse_decimal_integer(std::string digits, const std::string& text) {
    bool negative = false;
    if (!digits.empty() && (digits[0] == '-' || digits[0] == '+')) {
        negative = digits[0] == '-';
        digits.erase(0, 1);
    }
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos)
        throw InvalidInput("not a rational number: '" + text + "'");
    // Boost reads a leading 0 as an octal prefix.
    digits.erase(0, std::min(digits.find_first_not_of('0'), digits.size() - 1));
    BigInt v(digits);
    return negative ? BigInt(-v) : v;
}

} // namespace detail

/// Parses "p/q", an integer, or a finite decimal such as "-0.25" exactly.
inline Rational parse_rational(const std::string& text) {
    const auto slash = text.find('/');
    if (slash != std::string::npos) {
        const BigInt num = detail::parse_decimal_integer(text.substr(0, slash), text);
        const BigInt den = detail::parse_decimal_integer(text.substr(slash + 1), text);
        if (den == 0) throw InvalidInput("zero denominator in '" + text + "'");
        return Rational(num, den);
    }
    const auto dot = text.find('.');
    if (dot == std::string::npos) return Rational(detail::parse_decimal_integer(text, text));
    const std::string frac = text.substr(dot + 1);
    std::string whole = text.substr(0, dot);
    if (whole.empty() || whole == "-" || whole == "+") whole += "0";
    if (frac.empty()) return Rational(detail::parse_decimal_integer(whole, text));
    BigInt den = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) den *= 10;
    const bool negative = whole[0] == '-';
    const BigInt mag = abs(detail::parse_decimal_integer(whole, text)) * den +
                       detail::parse_decimal_integer(frac, text);
    return Rational(negative ? BigInt(-mag) : mag, den);
}

inline std::string to_string(const Rational& q) {
    std::string s = boost::multiprecision::numerator(q).str();
    if (boost::multiprecision::denominator(q) != 1) s += "/" + boost::multiprecision::denominator(q).str();
    return s;
}

inline BigInt binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    BigInt r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline Rational rational_pow(const Rational& t, int e) {
    Rational r = 1;
    for (int i = 0; i < e; ++i) r *= t;
    return r;
}

/// Dense matrix over Q. Entry (i, j) is the v_i coordinate of the image of v_j.
class RationalMatrix {
public:
    RationalMatrix() = default;
    RationalMatrix(int rows, int cols) : rows_(rows), cols_(cols), a_(static_cast<std::size_t>(rows * cols)) {}

    static RationalMatrix identity(int n) {
        RationalMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1;
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }
    Rational& operator()(int i, int j) { return a_[static_cast<std::size_t>(i * cols_ + j)]; }
    const Rational& operator()(int i, int j) const { return a_[static_cast<std::size_t>(i * cols_ + j)]; }

    friend RationalMatrix operator*(const RationalMatrix& x, const RationalMatrix& y) {
        if (x.cols_ != y.rows_) throw InvalidInput("matrix shape mismatch");
        RationalMatrix r(x.rows_, y.cols_);
        for (int i = 0; i < x.rows_; ++i)
            for (int k = 0; k < x.cols_; ++k) {
                if (x(i, k) == 0) continue;
                for (int j = 0; j < y.cols_; ++j) r(i, j) += x(i, k) * y(k, j);
            }
        return r;
    }

    friend RationalMatrix operator-(const RationalMatrix& x, const RationalMatrix& y) {
        RationalMatrix r = x;
        for (std::size_t i = 0; i < r.a_.size(); ++i) r.a_[i] -= y.a_[i];
        return r;
    }

    friend bool operator==(const RationalMatrix&, const RationalMatrix&) = default;

    /// Gaussian elimination over Q.
    Rational determinant() const {
        if (rows_ != cols_) throw InvalidInput("determinant of a non-square matrix");
        RationalMatrix w = *this;
        Rational det = 1;
        for (int c = 0; c < cols_; ++c) {
            int pivot = c;
            while (pivot < rows_ && w(pivot, c) == 0) ++pivot;
            if (pivot == rows_) return 0;
            if (pivot != c) {
                for (int j = 0; j < cols_; ++j) std::swap(w(pivot, j), w(c, j));
                det = -det;
            }
            det *= w(c, c);
            for (int i = c + 1; i < rows_; ++i) {
                if (w(i, c) == 0) continue;
                const Rational f = w(i, c) / w(c, c);
                for (int j = c; j < cols_; ++j) w(i, j) -= f * w(c, j);
            }
        }
        return det;
    }

    Eigen::MatrixXd to_double() const {
        Eigen::MatrixXd m(rows_, cols_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j) m(i, j) = static_cast<double>((*this)(i, j));
        return m;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<Rational> a_;
};

/// Partition of {0..m} by the sign of the weight m - 2k.
struct WeightSplit {
    std::vector<int> plus_idx, zero_idx, minus_idx;
};

struct IrrepAction {
    int m = 1;
    int r = 1; ///< m = 2r - 1 or m = 2r
    RationalMatrix h, e;

    int dim() const { return m + 1; }

    WeightSplit split() const {
        WeightSplit w;
        for (int k = 0; k <= m; ++k) {
            const int weight = m - 2 * k;
            (weight > 0 ? w.plus_idx : weight == 0 ? w.zero_idx : w.minus_idx).push_back(k);
        }
        return w;
    }
};

inline int half_rank(int m) { return (m + 1) / 2; }

inline IrrepAction build_irrep(int m) {
    if (m < 1) throw InvalidInput("irrep needs m >= 1");
    IrrepAction rep;
    rep.m = m;
    rep.r = half_rank(m);
    rep.h = RationalMatrix(m + 1, m + 1);
    rep.e = RationalMatrix(m + 1, m + 1);
    for (int k = 0; k <= m; ++k) {
        rep.h(k, k) = m - 2 * k;
        if (k > 0) rep.e(k - 1, k) = k;
    }
    return rep;
}

/// exp(t e): u v_k = sum_{l<=k} binom(k,l) t^{k-l} v_l.
inline RationalMatrix unipotent_matrix(int m, const Rational& t) {
    if (m < 1) throw InvalidInput("irrep needs m >= 1");
    RationalMatrix u(m + 1, m + 1);
    for (int k = 0; k <= m; ++k)
        for (int l = 0; l <= k; ++l) u(l, k) = Rational(binomial(k, l)) * rational_pow(t, k - l);
    return u;
}

/// Matrix of q^{+0} o u : V^{0-} -> V^{+0} in the bases {v_r..v_m}, {v_0..v_{m-r}}.
inline RationalMatrix b_matrix(int m, const Rational& t) {
    if (m < 1) throw InvalidInput("irrep needs m >= 1");
    if (t == 0) throw SingularParameter("B(m,r) is singular at t = 0");
    const int r = half_rank(m);
    const int n = m - r + 1;
    RationalMatrix b(n, n);
    for (int l = 0; l < n; ++l)
        for (int k = r; k <= m; ++k) b(l, k - r) = Rational(binomial(k, l)) * rational_pow(t, k - l);
    return b;
}

/// t^{r(m-r+1)}
inline Rational b_determinant_closed_form(int m, const Rational& t) {
    const int r = half_rank(m);
    return rational_pow(t, r * (m - r + 1));
}

// ---------------------------------------------------------------------------
// Floating-point side

inline constexpr double kPowerIterationTolerance = 1e-12;

/// Largest singular value by power iteration on M^T M.
inline double operator_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    const Eigen::MatrixXd gram = m.transpose() * m;
    Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(gram.cols(), 1.0, 2.0);
    x.normalize();
    double lambda = 0.0;
    for (int it = 0; it < 100000; ++it) {
        Eigen::VectorXd y = gram * x;
        const double next = x.dot(y);
        const double ny = y.norm();
        if (ny == 0.0) return 0.0;
        x = y / ny;
        if (std::abs(next - lambda) <= kPowerIterationTolerance * std::abs(next)) {
            lambda = next;
            break;
        }
        lambda = next;
    }
    return std::sqrt(lambda);
}

inline Eigen::MatrixXd unipotent_matrix_double(int m, double t) {
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(m + 1, m + 1);
    for (int k = 0; k <= m; ++k)
        for (int l = 0; l <= k; ++l) u(l, k) = static_cast<double>(binomial(k, l)) * std::pow(t, k - l);
    return u;
}

struct KappaParts {
    double norm_a = 0;     ///< |A|, A = u restricted to V^+
    double norm_b_inv = 0; ///< |B^{-1}|
    double kappa = 0;
};

/// kappa = (1/3) min{1, |B^{-1}|^{-1} |A|^{-1}}.
inline KappaParts kappa_parts(int m, double t) {
    if (m < 1) throw InvalidInput("irrep needs m >= 1");
    if (t == 0.0 || !std::isfinite(t)) throw SingularParameter("kappa needs a finite t != 0");
    const int r = half_rank(m);
    const Eigen::MatrixXd u = unipotent_matrix_double(m, t);
    const Eigen::MatrixXd a = u.topLeftCorner(r, r);
    const Eigen::MatrixXd b = u.block(0, r, m - r + 1, m - r + 1);
    KappaParts k;
    k.norm_a = operator_norm(a);
    k.norm_b_inv = operator_norm(b.inverse());
    k.kappa = (1.0 / 3.0) * std::min(1.0, 1.0 / (k.norm_b_inv * k.norm_a));
    return k;
}

inline double kappa(int m, double t) { return kappa_parts(m, t).kappa; }

struct LemmaReport {
    int m = 0;
    double t = 0;
    std::int64_t trials = 0;
    std::int64_t violations = 0;
    double kappa = 0;
    double min_ratio = 0; ///< smallest observed max{...}/|v|
};

namespace detail {

inline Eigen::VectorXd random_unit(std::mt19937_64& rng, int n) {
    std::normal_distribution<double> g;
    Eigen::VectorXd v(n);
    do {
        for (int i = 0; i < n; ++i) v(i) = g(rng);
    } while (v.norm() < 1e-12);
    return v / v.norm();
}

/// |q(v)| over coordinates [lo, hi).
inline double block_norm(const Eigen::VectorXd& v, int lo, int hi) {
    return hi > lo ? v.segment(lo, hi - lo).norm() : 0.0;
}

/// Counts unit vectors whose ratio falls below `threshold`.
template <class Ratio>
std::int64_t count_failures(std::int64_t trials, std::uint64_t seed, std::uint64_t stream, int dim, double threshold,
                            double& min_ratio, Ratio&& ratio_of) {
    if (trials < 0) throw InvalidInput("trials must be nonnegative");
    const std::size_t n = static_cast<std::size_t>(trials);
    std::vector<std::int64_t> fails((n + kBlockSize - 1) / kBlockSize, 0);
    std::vector<double> mins(fails.size(), std::numeric_limits<double>::infinity());
    for_each_block(n, {}, [&](std::size_t block, std::size_t begin, std::size_t end) {
        auto rng = block_engine(seed, stream, block);
        for (std::size_t i = begin; i < end; ++i) {
            const double ratio = ratio_of(random_unit(rng, dim));
            mins[block] = std::min(mins[block], ratio);
            if (ratio < threshold) ++fails[block];
        }
    });
    std::int64_t total = 0;
    min_ratio = std::numeric_limits<double>::infinity();
    for (std::size_t b = 0; b < fails.size(); ++b) {
        total += fails[b];
        min_ratio = std::min(min_ratio, mins[b]);
    }
    return total;
}

} // namespace detail

/// Samples unit vectors of V_m and counts failures of max{|v^+|, |(uv)^{+0}|} >= kappa |v|.
inline LemmaReport verify_lemma_sl2(int m, double t, std::int64_t trials, std::uint64_t seed) {
    const double kap = kappa(m, t);
    const int r = half_rank(m);
    const int plus_end = (m + 1) / 2; // weights m - 2k > 0  <=>  k < m/2
    const Eigen::MatrixXd u = unipotent_matrix_double(m, t);
    LemmaReport rep{m, t, trials, 0, kap, 0};
    double min_ratio = 0;
    rep.violations = detail::count_failures(trials, seed, 0x1e33a, m + 1, kap, min_ratio, [&](const Eigen::VectorXd& v) {
        return std::max(detail::block_norm(v, 0, plus_end), detail::block_norm(u * v, 0, m - r + 1)) / v.norm();
    });
    rep.min_ratio = min_ratio;
    return rep;
}

/// The same inequality on a direct sum of irreps V_{m_1} + ... + V_{m_k}
/// with the smallest per-summand kappa.
inline LemmaReport verify_direct_sum(const std::vector<int>& ms, double t, std::int64_t trials, std::uint64_t seed) {
    if (ms.empty()) throw InvalidInput("direct sum needs at least one summand");
    double kap = 1.0;
    int dim = 0;
    for (int m : ms) {
        kap = std::min(kap, kappa(m, t));
        dim += m + 1;
    }
    LemmaReport rep{ms.front(), t, trials, 0, kap, 0};
    double min_ratio = 0;
    rep.violations = detail::count_failures(trials, seed, 0xd5u, dim, kap, min_ratio, [&](const Eigen::VectorXd& v) {
        double plus2 = 0, plus_zero2 = 0;
        int off = 0;
        for (int m : ms) {
            const int r = half_rank(m);
            const Eigen::VectorXd part = v.segment(off, m + 1);
            const Eigen::VectorXd moved = unipotent_matrix_double(m, t) * part;
            plus2 += std::pow(detail::block_norm(part, 0, (m + 1) / 2), 2);
            plus_zero2 += std::pow(detail::block_norm(moved, 0, m - r + 1), 2);
            off += m + 1;
        }
        return std::sqrt(std::max(plus2, plus_zero2)) / v.norm();
    });
    rep.min_ratio = min_ratio;
    return rep;
}

struct CorollaryReport {
    int m = 0;
    std::int64_t checks = 0;
    std::int64_t violations = 0;
    double min_kappa = 0;
};

/// max{|a v|, |a u v|} >= kappa(m,t) |v| with a acting as alpha^{m-2k} on v_k.
inline CorollaryReport verify_corollary(int m, const std::vector<double>& alphas, const std::vector<double>& ts,
                                        std::int64_t trials, std::uint64_t seed) {
    for (double a : alphas)
        if (!(a > 1.0)) throw InvalidInput("expanding element needs alpha > 1");
    CorollaryReport rep{m, 0, 0, 1.0};
    std::uint64_t stream = 0xc0;
    for (double alpha : alphas) {
        Eigen::VectorXd scale(m + 1);
        for (int k = 0; k <= m; ++k) scale(k) = std::pow(alpha, m - 2 * k);
        for (double t : ts) {
            const double kap = kappa(m, t);
            rep.min_kappa = std::min(rep.min_kappa, kap);
            const Eigen::MatrixXd u = unipotent_matrix_double(m, t);
            double min_ratio = 0;
            rep.violations += detail::count_failures(trials, seed, stream++, m + 1, kap, min_ratio, [&](const Eigen::VectorXd& v) {
                return std::max(scale.cwiseProduct(v).norm(), scale.cwiseProduct(u * v).norm()) / v.norm();
            });
            rep.checks += trials;
        }
    }
    return rep;
}

} // namespace geoflow
