#pragma once

// Curves whose visual image lies in a proper subsphere. The instance realized
// here is a real curve phi in the Picard quotient: its translates stay on the
// vertical plane over R, which descends to an immersed copy of the modular
// surface (folded by z -> -conj(z)), and they equidistribute there instead of
// in the ambient quotient.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "geoflow/curve.hpp"
#include "geoflow/errors.hpp"
#include "geoflow/group.hpp"
#include "geoflow/lattice.hpp"
#include "geoflow/observables.hpp"

namespace geoflow {

/// Best affine k-flat through a point cloud on S^{n-1}; its intersection with
/// the sphere is a (k-1)-subsphere.
struct SubsphereFit {
    int dimension = 0;   ///< max(k - 1, 0)
    int flat_dimension = 0;
    double residual = 0; ///< max distance of the points to the flat
    Eigen::VectorXd centroid;
    Eigen::MatrixXd basis;   ///< columns span the flat directions
    Eigen::MatrixXd normals; ///< columns span the orthogonal complement
    /// Centre of the fitted subsphere: foot of the origin on the flat.
    Eigen::VectorXd center() const {
        Eigen::VectorXd c = centroid;
        if (basis.cols() > 0) c -= basis * (basis.transpose() * centroid);
        return c;
    }
};

enum class SubmanifoldTag { RealPlaneInH3 };

inline SubsphereFit fit_min_subsphere(const std::vector<Eigen::VectorXd>& points, double tol) {
    if (points.size() < 2) throw InvalidInput("subsphere fit needs at least 2 points");
    if (!(tol >= 0)) throw InvalidInput("tolerance must be nonnegative");
    const Eigen::Index n = points.front().size();
    if (n < 2) throw InvalidInput("points must lie in R^n with n >= 2");
    for (const auto& p : points) {
        if (p.size() != n) throw InvalidInput("points have mixed dimensions");
        if (std::abs(p.norm() - 1.0) > 1e-9) throw InvalidInput("points must be unit vectors");
    }
    Eigen::VectorXd mean = Eigen::VectorXd::Zero(n);
    for (const auto& p : points) mean += p;
    mean /= static_cast<double>(points.size());
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(n, n);
    for (const auto& p : points) cov += (p - mean) * (p - mean).transpose();
    // Eigenvalues ascending; principal directions are the last columns.
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
    const Eigen::MatrixXd& vecs = eig.eigenvectors();

    SubsphereFit fit;
    fit.centroid = mean;
    for (Eigen::Index k = 0; k <= n; ++k) {
        const Eigen::MatrixXd normals = vecs.leftCols(n - k);
        double worst = 0;
        for (const auto& p : points) worst = std::max(worst, (normals.transpose() * (p - mean)).norm());
        if (worst <= tol || k == n) {
            fit.flat_dimension = static_cast<int>(k);
            fit.dimension = std::max(static_cast<int>(k) - 1, 0);
            fit.residual = worst;
            fit.basis = vecs.rightCols(k);
            fit.normals = normals;
            break;
        }
    }
    return fit;
}

/// Hyperbolic distance from a point of H^3 to the vertical plane over R.
inline double plane_distance_h3(const UpperSpacePoint& p) {
    return std::asinh(std::abs(p.horizontal.imag()) / p.height);
}

/// Reflection z -> -conj(z) on the modular surface; identifies the two halves
/// of the standard domain as the Picard quotient does on the real plane.
inline QuotientPoint fold_modular(QuotientPoint q) {
    const double x = q.frame.base.horizontal.real();
    if (x > 0) {
        q.frame.base.horizontal = cplx(-x, 0.0);
        q.frame.direction.v[0] = -q.frame.direction.v[0];
    }
    return q;
}

/// Picard quotient point on the real plane, read as a folded modular point.
inline QuotientPoint restrict_to_plane(const QuotientPoint& q) {
    QuotientPoint out;
    out.lattice = LatticeTag::Modular;
    out.frame.base = UpperSpacePoint(cplx(q.frame.base.horizontal.real(), 0.0), q.frame.base.height);
    const auto& d = q.frame.direction.v;
    const double n = std::hypot(d[0], d[2]);
    out.frame.direction = n > 0 ? Direction{{d[0] / n, 0.0, d[2] / n}} : q.frame.direction;
    out.word = q.word;
    return fold_modular(out);
}

/// Bounded plane-sensitive statistic min(1, d(p, plane)).
inline double plane_observable(const QuotientPoint& q) { return std::min(1.0, plane_distance_h3(q.frame.base)); }

struct DegenerateReferences {
    HaarSampleSet modular_folded; ///< modular Haar sample after fold_modular
    Battery modular_battery;      ///< default modular battery, references from the folded sample
    HaarSampleSet picard;
    double picard_plane_mean = 0;
    double picard_plane_error = 0;
};

inline DegenerateReferences make_degenerate_references(std::int64_t count, std::uint64_t seed,
                                                       Parallelism par = {}) {
    DegenerateReferences r;
    r.modular_folded = haar_sample(LatticeTag::Modular, count, seed, 1000.0, par);
    for (auto& q : r.modular_folded.points) q = fold_modular(q);
    r.modular_battery = default_battery(LatticeTag::Modular);
    populate_references(r.modular_battery, r.modular_folded);

    r.picard = haar_sample(LatticeTag::Picard, count, seed + 1, 100.0, par);
    // The tail above the cap sits at plane distance -> 0, so it adds nothing.
    const double w = r.picard.weight();
    double acc = 0;
    for (const auto& q : r.picard.points) acc += plane_observable(q);
    const double mean = acc / static_cast<double>(r.picard.points.size());
    double var = 0;
    for (const auto& q : r.picard.points) var += (plane_observable(q) - mean) * (plane_observable(q) - mean);
    r.picard_plane_mean = w * acc;
    r.picard_plane_error = (1.0 - r.picard.tail_mass) * std::sqrt(var) / static_cast<double>(r.picard.points.size());
    return r;
}

struct DegenerateReport {
    double flow_time = 0;
    std::int64_t count = 0;
    double max_plane_distance = 0;
    double max_imaginary_entry = 0; ///< largest |Im| among sample matrix entries before reduction
    DiscrepancyReport modular;
    double modular_discrepancy = 0;
    double experiment_plane_mean = 0;
    double experiment_plane_error = 0;
    double picard_plane_mean = 0;
    double picard_plane_error = 0;
    double picard_separation_sigma = 0;
};

/// Translates a real curve by the geodesic flow in the Picard quotient and
/// measures how it concentrates on the immersed modular surface.
inline DegenerateReport degenerate_experiment(const AnalyticCurve<1>& c, double t, std::int64_t count,
                                              std::uint64_t seed, const DegenerateReferences& refs,
                                              TranslateOptions opt = {}) {
    if (c.degree() < 1) throw InvalidInput("constant phi: the visual image is a single point");
    const RealElement base;
    const auto m = translate_curve(c, base, LatticeTag::Picard, t, count, seed, opt);

    DegenerateReport r;
    r.flow_time = t;
    r.count = static_cast<std::int64_t>(m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
        // Same element assembled in SL(2,C) arithmetic.
        const double s = m.parameters[i];
        ComplexElement g = make_flow<cplx>(t) * complexify(c.zeta(s)) * make_unipotent(cplx(c.eval(s)[0], 0.0));
        if (opt.with_normalizer) g = complexify(normalizer_z(c, s, default_w0<1>())) * g;
        for (const cplx& e : {g.a(), g.b(), g.c(), g.d()}) r.max_imaginary_entry = std::max(r.max_imaginary_entry, std::abs(e.imag()));
        r.max_plane_distance = std::max(r.max_plane_distance, plane_distance_h3(m.samples[i].frame.base));
    }

    EmpiricalMeasure planar = m;
    planar.lattice = LatticeTag::Modular;
    for (auto& q : planar.samples) q = restrict_to_plane(q);
    r.modular = discrepancy_report(planar, refs.modular_battery);
    r.modular_discrepancy = r.modular.max_defect;

    double acc = 0;
    for (std::size_t i = 0; i < m.size(); ++i) acc += m.weights[i] * plane_observable(m.samples[i]);
    double var = 0;
    for (std::size_t i = 0; i < m.size(); ++i) {
        const double dev = plane_observable(m.samples[i]) - acc;
        var += m.weights[i] * m.weights[i] * dev * dev;
    }
    r.experiment_plane_mean = acc;
    r.experiment_plane_error = std::sqrt(var);
    r.picard_plane_mean = refs.picard_plane_mean;
    r.picard_plane_error = refs.picard_plane_error;
    const double se = std::hypot(r.experiment_plane_error, r.picard_plane_error);
    r.picard_separation_sigma = se > 0 ? (r.picard_plane_mean - r.experiment_plane_mean) / se : 0.0;
    return r;
}

} // namespace geoflow
