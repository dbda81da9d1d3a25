#pragma once

// Test functions on Gamma\T^1(H^n) used to compare empirical measures with
// the Haar reference. Every observable is bounded by 1 in absolute value.

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "geoflow/errors.hpp"
#include "geoflow/lattice.hpp"

namespace geoflow {

struct ReferenceValue {
    double value = 0;
    double error = 0; ///< one standard error
};

struct Observable {
    enum class Kind { HeightBump, BoxIndicator, SmoothBump };

    std::string name;
    Kind kind = Kind::HeightBump;

    // Bumps: cos^2 profile in log-height, supported on |log(h/center)| < log_width.
    double center_height = 1.0;
    double log_width = 0.3;

    // Boxes: half-open in Re z and height, closed in Im z.
    double x_lo = -std::numeric_limits<double>::infinity();
    double x_hi = std::numeric_limits<double>::infinity();
    double y_lo = -std::numeric_limits<double>::infinity();
    double y_hi = std::numeric_limits<double>::infinity();
    double h_lo = 0.0;
    double h_hi = std::numeric_limits<double>::infinity();

    // Smooth bumps are weighted by (1 + <direction, preferred>) / 2.
    std::array<double, 3> preferred{0.0, 0.0, 1.0};

    /// Lipschitz constant in (log-height, direction) for the smooth kinds.
    double lipschitz = 0.0;

    std::optional<ReferenceValue> reference;

    double operator()(const QuotientPoint& q) const {
        const auto& base = q.frame.base;
        switch (kind) {
        case Kind::HeightBump: return bump(base.height);
        case Kind::BoxIndicator: {
            const double x = base.horizontal.real(), y = base.horizontal.imag(), h = base.height;
            return (x >= x_lo && x < x_hi && y >= y_lo && y <= y_hi && h >= h_lo && h < h_hi) ? 1.0 : 0.0;
        }
        case Kind::SmoothBump: {
            const auto& d = q.frame.direction.v;
            const double align = d[0] * preferred[0] + d[1] * preferred[1] + d[2] * preferred[2];
            return bump(base.height) * 0.5 * (1.0 + align);
        }
        }
        return 0.0;
    }

    /// Limit of the cross-section average as height -> infinity.
    double cusp_limit(LatticeTag lattice) const {
        if (kind != Kind::BoxIndicator || std::isfinite(h_hi)) return 0.0;
        const double xl = std::max(x_lo, -0.5), xh = std::min(x_hi, 0.5);
        const double fx = std::max(0.0, xh - xl);
        if (lattice == LatticeTag::Modular) return (y_lo <= 0.0 && y_hi >= 0.0) ? fx : 0.0;
        const double yl = std::max(y_lo, 0.0), yh = std::min(y_hi, 0.5);
        return fx * std::max(0.0, yh - yl) / 0.5;
    }

    static Observable height_bump(std::string name, double center, double log_width) {
        Observable o;
        o.name = std::move(name);
        o.kind = Kind::HeightBump;
        o.center_height = center;
        o.log_width = log_width;
        o.lipschitz = std::numbers::pi / (2.0 * log_width);
        return o;
    }

    static Observable box(std::string name, double x_lo, double x_hi, double h_lo, double h_hi,
                          double y_lo = -std::numeric_limits<double>::infinity(),
                          double y_hi = std::numeric_limits<double>::infinity()) {
        Observable o;
        o.name = std::move(name);
        o.kind = Kind::BoxIndicator;
        o.x_lo = x_lo;
        o.x_hi = x_hi;
        o.h_lo = h_lo;
        o.h_hi = h_hi;
        o.y_lo = y_lo;
        o.y_hi = y_hi;
        return o;
    }

    static Observable constant_one(std::string name = "one") {
        return box(std::move(name), -std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity(), 0.0, std::numeric_limits<double>::infinity());
    }

    static Observable smooth_bump(std::string name, double center, double log_width,
                                  std::array<double, 3> preferred) {
        Observable o = height_bump(std::move(name), center, log_width);
        o.kind = Kind::SmoothBump;
        o.preferred = preferred;
        o.lipschitz = std::numbers::pi / (2.0 * log_width) + 0.5;
        return o;
    }

private:
    double bump(double h) const {
        const double u = std::log(h / center_height) / log_width;
        if (std::abs(u) >= 1.0) return 0.0;
        const double c = std::cos(0.5 * std::numbers::pi * u);
        return c * c;
    }
};

using Battery = std::vector<Observable>;

/// Ten observables: four height bumps, four boxes, two direction-weighted bumps.
inline Battery default_battery(LatticeTag lattice) {
    Battery b;
    b.push_back(Observable::height_bump("height_bump_1.2", 1.2, 0.3));
    b.push_back(Observable::height_bump("height_bump_1.7", 1.7, 0.3));
    b.push_back(Observable::height_bump("height_bump_2.5", 2.5, 0.3));
    b.push_back(Observable::height_bump("height_bump_4", 4.0, 0.3));
    if (lattice == LatticeTag::Modular) {
        b.push_back(Observable::box("box_left_low", -0.5, 0.0, 0.85, 1.3));
        b.push_back(Observable::box("box_right_low", 0.0, 0.5, 0.85, 1.3));
        b.push_back(Observable::box("box_center_mid", -0.25, 0.25, 1.3, 2.2));
        b.push_back(Observable::box("box_band_high", -0.5, 0.5, 2.2, 5.0));
        b.push_back(Observable::smooth_bump("dir_bump_right", 1.3, 0.5, {1.0, 0.0, 0.0}));
        b.push_back(Observable::smooth_bump("dir_bump_up", 1.3, 0.5, {0.0, 0.0, 1.0}));
    } else {
        b.push_back(Observable::box("box_left_low", -0.5, 0.0, 0.7, 1.2, 0.0, 0.25));
        b.push_back(Observable::box("box_right_low", 0.0, 0.5, 0.7, 1.2, 0.25, 0.5));
        b.push_back(Observable::box("box_center_mid", -0.25, 0.25, 1.2, 2.0));
        b.push_back(Observable::box("box_band_high", -0.5, 0.5, 2.0, 5.0));
        b.push_back(Observable::smooth_bump("dir_bump_x", 1.0, 0.5, {1.0, 0.0, 0.0}));
        b.push_back(Observable::smooth_bump("dir_bump_up", 1.0, 0.5, {0.0, 0.0, 1.0}));
    }
    return b;
}

/// Weighted mean and its standard error over points with optional extra
/// mass `cusp_mass` sitting above the sampled region.
struct WeightedMean {
    double mean = 0;
    double error = 0;
};

inline WeightedMean weighted_mean(const Observable& f, std::span<const QuotientPoint> pts,
                                  std::span<const double> weights, double cusp_mass, LatticeTag lattice) {
    double wsum = 0, acc = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        wsum += weights[i];
        acc += weights[i] * f(pts[i]);
    }
    const double mean = wsum > 0 ? acc / wsum : 0.0;
    double var = 0;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const double dev = f(pts[i]) - mean;
        var += weights[i] * weights[i] * dev * dev;
    }
    const double se = wsum > 0 ? std::sqrt(var) / wsum : 0.0;
    return {wsum * mean + cusp_mass * f.cusp_limit(lattice), wsum * se};
}

/// Fills every observable's reference value from a Haar sample.
inline void populate_references(Battery& battery, const HaarSampleSet& haar) {
    if (haar.points.empty()) throw InvalidInput("reference sample is empty");
    const std::vector<double> w(haar.points.size(), haar.weight());
    for (auto& f : battery) {
        const auto m = weighted_mean(f, haar.points, w, haar.tail_mass, haar.lattice);
        f.reference = ReferenceValue{m.mean, m.error};
    }
}

} // namespace geoflow
