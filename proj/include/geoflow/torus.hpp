#pragma once

// Dilated curves on the flat torus T^n = R^n / Z^n and their Fourier
// coefficients c_m(alpha) = int_0^1 exp(2 pi i m . alpha psi(s)) ds.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "geoflow/errors.hpp"
#include "geoflow/parallel.hpp"
#include "geoflow/polynomial.hpp"

namespace geoflow {

inline constexpr int kMaxTorusDimension = 4;

/// psi: [0,1] -> R^n. Circle curves are (cos 2 pi s, sin 2 pi s) in dimension 2.
class TorusCurve {
public:
    enum class Kind { Polynomial, Circle };

    static TorusCurve circle() {
        TorusCurve c;
        c.kind_ = Kind::Circle;
        c.dim_ = 2;
        return c;
    }

    static TorusCurve polynomial(std::vector<Polynomial> coords) {
        if (coords.empty() || coords.size() > static_cast<std::size_t>(kMaxTorusDimension))
            throw InvalidInput("torus dimension must be in 1..4");
        TorusCurve c;
        c.kind_ = Kind::Polynomial;
        c.dim_ = static_cast<int>(coords.size());
        c.coords_ = std::move(coords);
        return c;
    }

    Kind kind() const { return kind_; }
    int dimension() const { return dim_; }
    const std::vector<Polynomial>& coordinates() const { return coords_; }

    double coordinate(int i, double s) const {
        if (kind_ == Kind::Circle) {
            const double a = 2.0 * std::numbers::pi * s;
            return i == 0 ? std::cos(a) : std::sin(a);
        }
        return coords_[static_cast<std::size_t>(i)](s);
    }

private:
    Kind kind_ = Kind::Polynomial;
    int dim_ = 0;
    std::vector<Polynomial> coords_;
};

struct FourierIndex {
    std::vector<int> m;

    bool is_zero() const {
        return std::all_of(m.begin(), m.end(), [](int k) { return k == 0; });
    }
    int sup_norm() const {
        int s = 0;
        for (int k : m) s = std::max(s, std::abs(k));
        return s;
    }
};

/// All m with 0 < |m|_inf <= m_max in dimension n, lexicographic.
inline std::vector<FourierIndex> fourier_indices(int n, int m_max) {
    if (n < 1 || n > kMaxTorusDimension) throw InvalidInput("torus dimension must be in 1..4");
    if (m_max < 0) throw InvalidInput("m_max must be nonnegative");
    std::vector<FourierIndex> out;
    std::vector<int> cur(static_cast<std::size_t>(n), -m_max);
    for (;;) {
        FourierIndex f{cur};
        if (!f.is_zero()) out.push_back(f);
        int i = n - 1;
        while (i >= 0 && cur[static_cast<std::size_t>(i)] == m_max) cur[static_cast<std::size_t>(i--)] = -m_max;
        if (i < 0) break;
        ++cur[static_cast<std::size_t>(i)];
    }
    return out;
}

using TorusPoint = std::vector<double>;

inline double wrap_unit(double x) {
    double f = x - std::floor(x);
    return f >= 1.0 ? 0.0 : f;
}

/// Midpoint samples of alpha psi(s) mod 1.
inline std::vector<TorusPoint> torus_translate(const TorusCurve& c, double alpha, std::int64_t count) {
    if (!(alpha >= 0) || !std::isfinite(alpha)) throw InvalidInput("alpha must be finite and nonnegative");
    if (count < 1) throw InvalidInput("count must be at least 1");
    std::vector<TorusPoint> pts(static_cast<std::size_t>(count), TorusPoint(static_cast<std::size_t>(c.dimension())));
    for (std::int64_t j = 0; j < count; ++j) {
        const double s = (static_cast<double>(j) + 0.5) / static_cast<double>(count);
        for (int i = 0; i < c.dimension(); ++i)
            pts[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] = wrap_unit(alpha * c.coordinate(i, s));
    }
    return pts;
}

/// Mean of exp(2 pi i m.x) over the samples.
inline std::complex<double> fourier_coefficient(const std::vector<TorusPoint>& samples, const FourierIndex& m) {
    if (samples.empty()) throw InvalidInput("no samples");
    if (m.m.size() != samples.front().size()) throw InvalidInput("Fourier index dimension mismatch");
    if (m.is_zero()) return {1.0, 0.0};
    std::complex<double> acc{0.0, 0.0};
    for (const auto& x : samples) {
        double phase = 0;
        for (std::size_t i = 0; i < x.size(); ++i) phase += m.m[i] * x[i];
        // m.x is reduced mod 1 before scaling so the angle stays small.
        const double a = 2.0 * std::numbers::pi * wrap_unit(phase);
        acc += std::complex<double>(std::cos(a), std::sin(a));
    }
    return acc / static_cast<double>(samples.size());
}

/// Independent value of c_m(alpha): 20-point Gauss-Legendre on panels short
/// enough to hold about one oscillation each.
inline std::complex<double> fourier_coefficient_quadrature(const TorusCurve& c, double alpha, const FourierIndex& m) {
    if (m.m.size() != static_cast<std::size_t>(c.dimension())) throw InvalidInput("Fourier index dimension mismatch");
    // Bound on |d/ds (m . psi)| sampled on a fine grid.
    double slope = 0;
    constexpr int probes = 2048;
    for (int j = 0; j <= probes; ++j) {
        const double s0 = static_cast<double>(j) / probes, s1 = std::min(1.0, s0 + 1.0 / probes);
        double d = 0;
        for (int i = 0; i < c.dimension(); ++i)
            d += m.m[static_cast<std::size_t>(i)] * (c.coordinate(i, s1) - c.coordinate(i, s0));
        slope = std::max(slope, std::abs(d) * probes);
    }
    const int panels = 1 + static_cast<int>(std::ceil(2.0 * alpha * slope));
    auto phase = [&](double s) {
        double p = 0;
        for (int i = 0; i < c.dimension(); ++i) p += m.m[static_cast<std::size_t>(i)] * c.coordinate(i, s);
        return 2.0 * std::numbers::pi * alpha * p;
    };
    using boost::math::quadrature::gauss;
    double re = 0, im = 0;
    for (int k = 0; k < panels; ++k) {
        const double a = static_cast<double>(k) / panels, b = static_cast<double>(k + 1) / panels;
        re += gauss<double, 20>::integrate([&](double s) { return std::cos(phase(s)); }, a, b);
        im += gauss<double, 20>::integrate([&](double s) { return std::sin(phase(s)); }, a, b);
    }
    return {re, im};
}

/// Quadrature node count used by the sweep: the integrand oscillates with
/// frequency ~ alpha |m|, so resolution grows linearly.
inline std::int64_t sweep_count(double alpha, int m_max) {
    return std::max<std::int64_t>(10000, static_cast<std::int64_t>(std::ceil(100.0 * alpha * std::max(m_max, 1))));
}

struct SweepEntry {
    double alpha = 0;
    FourierIndex m;
    double abs_coeff = 0;
};

struct SweepRow {
    double alpha = 0;
    std::int64_t count = 0;
    double max_abs = 0;
    FourierIndex argmax;
};

struct SweepTable {
    int dimension = 0;
    int m_max = 0;
    std::vector<SweepRow> rows;
    std::vector<SweepEntry> entries;
};

inline SweepTable equidistribution_sweep(const TorusCurve& c, const std::vector<double>& alphas, int m_max,
                                         Parallelism par = {}) {
    if (m_max < 1) throw InvalidInput("m_max must be at least 1");
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (!(alphas[i] > alphas[i - 1])) throw InvalidInput("alphas must be strictly increasing");
    SweepTable table;
    table.dimension = c.dimension();
    table.m_max = m_max;
    const auto indices = fourier_indices(c.dimension(), m_max);
    for (double alpha : alphas) {
        const std::int64_t count = sweep_count(alpha, m_max);
        const auto pts = torus_translate(c, alpha, count);
        std::vector<double> mags(indices.size());
        for_each_index(indices.size(), par, [&](std::size_t k) { mags[k] = std::abs(fourier_coefficient(pts, indices[k])); });
        SweepRow row{alpha, count, 0.0, {}};
        for (std::size_t k = 0; k < indices.size(); ++k) {
            table.entries.push_back({alpha, indices[k], mags[k]});
            if (mags[k] > row.max_abs) {
                row.max_abs = mags[k];
                row.argmax = indices[k];
            }
        }
        table.rows.push_back(row);
    }
    return table;
}

} // namespace geoflow
