#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geoflow/degenerate.hpp"
#include "geoflow/experiments.hpp"

using namespace geoflow;

namespace {

Eigen::VectorXd unit3(double x, double y, double z) {
    Eigen::VectorXd v(3);
    v << x, y, z;
    return v.normalized();
}

Eigen::MatrixXd random_rotation(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    Eigen::MatrixXd m(3, 3);
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = g(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return qr.householderQ();
}

std::vector<Eigen::VectorXd> tilted_circle(int n) {
    // Intersection of S^2 with the plane z = 0.4 + 0.3 x.
    std::vector<Eigen::VectorXd> pts;
    const Eigen::Vector3d normal = Eigen::Vector3d(-0.3, 0.0, 1.0).normalized();
    const double offset = 0.4 / Eigen::Vector3d(-0.3, 0.0, 1.0).norm();
    const Eigen::Vector3d center = offset * normal;
    const double radius = std::sqrt(1 - offset * offset);
    const Eigen::Vector3d e1 = Eigen::Vector3d(1.0, 0.0, 0.3).normalized();
    const Eigen::Vector3d e2 = normal.cross(e1);
    for (int k = 0; k < n; ++k) {
        const double a = 2 * std::numbers::pi * k / n;
        pts.push_back(center + radius * (std::cos(a) * e1 + std::sin(a) * e2));
    }
    return pts;
}

const DegenerateReferences& refs() {
    static const auto r = make_degenerate_references(200000, 7);
    return r;
}

} // namespace

TEST(Subsphere, EqualPointsGiveDimensionZero) {
    const std::vector<Eigen::VectorXd> pts(5, unit3(1, 2, 3));
    const auto fit = fit_min_subsphere(pts, 1e-8);
    EXPECT_EQ(fit.dimension, 0);
    EXPECT_LE(fit.residual, 1e-15);
}

TEST(Subsphere, CircleGivesDimensionOne) {
    const auto fit = fit_min_subsphere(tilted_circle(40), 1e-8);
    EXPECT_EQ(fit.dimension, 1);
    EXPECT_LE(fit.residual, 1e-9);
    // The fitted centre is the centre of the small circle.
    const Eigen::Vector3d n = Eigen::Vector3d(-0.3, 0.0, 1.0).normalized();
    EXPECT_NEAR((fit.center() - 0.4 / Eigen::Vector3d(-0.3, 0.0, 1.0).norm() * n).norm(), 0.0, 1e-9);
}

TEST(Subsphere, ParabolaImageIsFullSphere) {
    const auto pts = visual_image(CurveSpec{0.0, 1.0, {Polynomial{0.0, 1.0}, Polynomial{0.0, 0.0, 1.0}}, "parabola"});
    const auto fit = fit_min_subsphere(pts, 1e-4);
    EXPECT_EQ(fit.dimension, 2);
    // Best 1-flat leaves a residual bounded away from zero.
    const auto strict = fit_min_subsphere(pts, 0.0);
    EXPECT_EQ(strict.dimension, 2);
}

TEST(Subsphere, RealCurveImageIsCircle) {
    const auto pts = visual_image(CurveSpec{0.0, 1.0, {Polynomial{0.0, 1.0}}, "phi_s"});
    EXPECT_EQ(fit_min_subsphere(pts, 1e-8).dimension, 1);
}

TEST(Subsphere, RotationEquivariant) {
    std::mt19937_64 rng(13);
    const auto base_pts = tilted_circle(30);
    const auto base = fit_min_subsphere(base_pts, 1e-8);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd r = random_rotation(rng);
        std::vector<Eigen::VectorXd> moved;
        for (const auto& p : base_pts) moved.push_back(r * p);
        const auto fit = fit_min_subsphere(moved, 1e-8);
        EXPECT_EQ(fit.dimension, base.dimension);
        EXPECT_NEAR(fit.residual, base.residual, 1e-9);
    }
}

TEST(Subsphere, Validation) {
    EXPECT_THROW(fit_min_subsphere({unit3(1, 0, 0)}, 1e-8), InvalidInput);
    Eigen::VectorXd not_unit(3);
    not_unit << 1, 1, 0;
    EXPECT_THROW(fit_min_subsphere({unit3(1, 0, 0), not_unit}, 1e-8), InvalidInput);
}

TEST(PlaneDistance, Examples) {
    EXPECT_EQ(plane_distance_h3(UpperSpacePoint(cplx(0.4, 0.0), 2.0)), 0.0);
    EXPECT_NEAR(plane_distance_h3(UpperSpacePoint(cplx(0.0, 1.0), 1.0)), std::asinh(1.0), 1e-15);
    EXPECT_NEAR(std::asinh(1.0), 0.88137, 1e-5);
}

TEST(PlaneDistance, MatchesGeodesicDistanceToFoot) {
    // The nearest point of the plane lies on the circle |w - z|^2 + k^2 = y^2 + h^2 over Re z.
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> u(-2, 2);
    for (int i = 0; i < 100; ++i) {
        const UpperSpacePoint p(cplx(u(rng), u(rng)), std::exp(u(rng)));
        const double y = p.horizontal.imag();
        const UpperSpacePoint foot(cplx(p.horizontal.real(), 0.0), std::hypot(y, p.height));
        EXPECT_NEAR(plane_distance_h3(p), hyperbolic_distance(p, foot), 1e-10);
        EXPECT_GE(plane_distance_h3(p), 0.0);
    }
}

TEST(Fold, ModularReflection) {
    QuotientPoint q;
    q.frame.base = UpperSpacePoint(cplx(0.3, 0.0), 1.5);
    q.frame.direction = Direction{{0.6, 0.0, 0.8}};
    const auto f = fold_modular(q);
    EXPECT_EQ(f.frame.base.horizontal.real(), -0.3);
    EXPECT_EQ(f.frame.direction.v[0], -0.6);
    EXPECT_EQ(fold_modular(f).frame.base.horizontal.real(), -0.3);
}

TEST(Degenerate, RealCurveStaysOnPlane) {
    const AnalyticCurve<1> c(0.0, 1.0, {Polynomial{0.0, 1.0}});
    for (double t : {2.0, 6.0, 10.0}) {
        const auto r = degenerate_experiment(c, t, 20000, 1, refs());
        EXPECT_LE(r.max_plane_distance, 1e-6);
        EXPECT_LE(r.max_imaginary_entry, 1e-9);
    }
}

TEST(Degenerate, ModularLimitAndPicardSeparation) {
    const AnalyticCurve<1> c(0.0, 1.0, {Polynomial{0.0, 1.0}});
    const auto r = degenerate_experiment(c, 10.0, 100000, 1, refs());
    EXPECT_LT(r.modular_discrepancy, 0.05);
    EXPECT_GT(r.picard_separation_sigma, 5.0);
    EXPECT_NEAR(r.experiment_plane_mean, 0.0, 1e-6);
    EXPECT_GT(r.picard_plane_mean, 0.0);
}

TEST(Degenerate, ConstantCurveRejected) {
    const AnalyticCurve<1> c(0.0, 1.0, {Polynomial{0.5}}, "const", true);
    EXPECT_THROW(degenerate_experiment(c, 1.0, 100, 1, refs()), InvalidInput);
}
