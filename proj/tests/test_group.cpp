#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "geoflow/group.hpp"

using namespace geoflow;

namespace {

void expect_matrix(const RealElement& g, double a, double b, double c, double d, double tol = 1e-14) {
    EXPECT_NEAR(g.a(), a, tol);
    EXPECT_NEAR(g.b(), b, tol);
    EXPECT_NEAR(g.c(), c, tol);
    EXPECT_NEAR(g.d(), d, tol);
}

ComplexElement random_sl2c(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    for (;;) {
        const cplx a(g(rng), g(rng)), b(g(rng), g(rng)), c(g(rng), g(rng)), d(g(rng), g(rng));
        const cplx det = a * d - b * c;
        if (std::abs(det) < 1e-2) continue;
        const cplx k = std::sqrt(det);
        return ComplexElement(a / k, b / k, c / k, d / k);
    }
}

} // namespace

TEST(Unipotent, Examples) {
    expect_matrix(make_unipotent(0.0), 1, 0, 0, 1);
    expect_matrix(make_unipotent(2.0), 1, 2, 0, 1);
    const auto g = make_unipotent(std::array<double, 2>{1.0, 1.0});
    EXPECT_EQ(g.b(), cplx(1.0, 1.0));
    EXPECT_EQ(g.a(), cplx(1.0));
    EXPECT_EQ(g.c(), cplx(0.0));
}

TEST(Unipotent, RejectsNonFinite) {
    EXPECT_THROW(make_unipotent(std::nan("")), InvalidInput);
    EXPECT_THROW(make_unipotent(std::numeric_limits<double>::infinity()), InvalidInput);
}

TEST(Flow, ZeroIsIdentityAndConjugationScales) {
    expect_matrix(make_flow(0.0), 1, 0, 0, 1);
    const double t = 1.7, v = 0.3;
    const auto lhs = make_flow(t) * make_unipotent(v) * make_flow(-t);
    expect_matrix(lhs, 1, std::exp(t) * v, 0, 1, 1e-13);
    EXPECT_THROW(make_flow(std::nan("")), InvalidInput);
}

TEST(Sl2, RejectsBadDeterminant) {
    EXPECT_THROW(RealElement(1, 1, 1, 1), InvalidInput);
    EXPECT_THROW(RealElement(std::nan(""), 0, 0, 1), InvalidInput);
}

TEST(Sl2, InverseAndProjectiveDistance) {
    std::mt19937_64 rng(3);
    for (int i = 0; i < 100; ++i) {
        const auto g = random_sl2c(rng);
        EXPECT_LT(entry_distance(g * g.inverse(), ComplexElement()), 1e-10);
    }
    const RealElement g(2, 1, 1, 1), neg(-2, -1, -1, -1);
    EXPECT_EQ(projective_distance(g, neg), 0.0);
    EXPECT_GT(entry_distance(g, neg), 1.0);
    expect_matrix(neg.canonical(), 2, 1, 1, 1);
}

TEST(Bruhat, Examples) {
    const auto n = bruhat_split(RealElement(1, 2, 0, 1));
    expect_matrix(n.zeta, 1, 0, 0, 1);
    EXPECT_DOUBLE_EQ(n.v, 2.0);

    const auto p = bruhat_split(RealElement(2, 1, 1, 1));
    expect_matrix(p.zeta, 2, 0, 1, 0.5);
    EXPECT_DOUBLE_EQ(p.v, 0.5);
    // Matrix-multiply oracle.
    expect_matrix(p.zeta * make_unipotent(p.v), 2, 1, 1, 1);

    EXPECT_THROW(bruhat_split(RealElement(0, 1, -1, 0)), BruhatSingular);
}

TEST(Bruhat, RoundTripOnRandomElements) {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 2000; ++i) {
        const auto g = random_sl2c(rng);
        if (std::abs(g.a()) < 1e-3) continue;
        const auto parts = bruhat_split(g);
        EXPECT_EQ(parts.zeta.b(), cplx(0.0));
        EXPECT_LT(entry_distance(parts.zeta * make_unipotent(parts.v), g) / g.norm(), 1e-11);
    }
}

TEST(BoundaryPoint, Examples) {
    EXPECT_EQ(boundary_point(make_unipotent(0.7)).value(), cplx(0.7));
    EXPECT_EQ(boundary_point(RealElement()).value(), cplx(0.0));
    const RealElement zeta(2, 0, 1, 0.5);
    EXPECT_NEAR(boundary_point(zeta * make_unipotent(3.0)).value().real(), 3.0, 1e-14);
    EXPECT_TRUE(boundary_point(RealElement(0, 1, -1, 0)).is_infinite());
}

TEST(BoundaryPoint, LeftInvariantUnderLowerTriangular) {
    std::mt19937_64 rng(5);
    std::normal_distribution<double> g;
    for (int i = 0; i < 200; ++i) {
        const cplx v(g(rng), g(rng)), c(g(rng), g(rng)), q(g(rng), g(rng));
        const ComplexElement zeta = make_diagonal(c) * make_lower_unipotent(q);
        const auto p = boundary_point(zeta * make_unipotent(v));
        EXPECT_LT(std::abs(p.value() - v), 1e-9 * (1 + std::abs(v)));
    }
}

TEST(Stereographic, Examples) {
    const auto pole = stereographic<2>(BoundaryPoint::infinity());
    EXPECT_EQ(pole[0], 0.0);
    EXPECT_EQ(pole[1], 1.0);
    const auto south = stereographic<3>(BoundaryPoint(0.0));
    EXPECT_EQ(south[0], 0.0);
    EXPECT_EQ(south[1], 0.0);
    EXPECT_EQ(south[2], -1.0);
    const auto one = stereographic<2>(BoundaryPoint(1.0));
    EXPECT_NEAR(one[0], 1.0, 1e-15);
    EXPECT_NEAR(one[1], 0.0, 1e-15);
}

TEST(Stereographic, TracesUnitCircle) {
    for (int k = 1; k < 64; ++k) {
        const double theta = -std::numbers::pi + 2 * std::numbers::pi * k / 64.0;
        const auto p = stereographic<2>(BoundaryPoint(std::tan(theta / 2)));
        EXPECT_NEAR(std::hypot(p[0], p[1]), 1.0, 1e-14);
        // S(tan(theta/2)) = (sin theta, -cos theta).
        EXPECT_NEAR(p[0], std::sin(theta), 1e-12);
        EXPECT_NEAR(p[1], -std::cos(theta), 1e-12);
    }
    const auto q = stereographic<3>(BoundaryPoint(cplx(0.3, -2.0)));
    EXPECT_NEAR(std::sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2]), 1.0, 1e-14);
    EXPECT_THROW(stereographic<2>(BoundaryPoint(cplx(0.0, 1.0))), InvalidInput);
}

TEST(FrameCoordinates, Examples) {
    const auto id = frame_coordinates(RealElement());
    EXPECT_EQ(id.base.horizontal, cplx(0.0));
    EXPECT_DOUBLE_EQ(id.base.height, 1.0);
    EXPECT_DOUBLE_EQ(id.direction.v[2], -1.0);

    const double t = 1.3;
    const auto flowed = frame_coordinates(make_flow(t));
    EXPECT_NEAR(flowed.base.horizontal.real(), 0.0, 1e-15);
    EXPECT_NEAR(flowed.base.height, std::exp(t), 1e-13);

    const auto shifted = frame_coordinates(make_unipotent(3.0));
    EXPECT_NEAR(shifted.base.horizontal.real(), 3.0, 1e-15);
    EXPECT_NEAR(shifted.base.height, 1.0, 1e-15);
}

TEST(FrameCoordinates, Equivariant) {
    std::mt19937_64 rng(17);
    for (int i = 0; i < 200; ++i) {
        const auto g = random_sl2c(rng), h = random_sl2c(rng);
        const auto lhs = frame_coordinates(g * h);
        const auto rhs = act(g, frame_coordinates(h));
        const double scale = std::max(1.0, std::abs(lhs.base.horizontal) + lhs.base.height);
        EXPECT_LT(std::abs(lhs.base.horizontal - rhs.base.horizontal), 1e-8 * scale);
        EXPECT_LT(std::abs(lhs.base.height - rhs.base.height), 1e-8 * scale);
        for (int k = 0; k < 3; ++k) EXPECT_NEAR(lhs.direction.v[k], rhs.direction.v[k], 1e-6);
    }
}

TEST(Geodesics, EndpointRoundTrip) {
    std::mt19937_64 rng(23);
    std::normal_distribution<double> g;
    for (int i = 0; i < 500; ++i) {
        const UpperSpacePoint p(cplx(g(rng), g(rng)), std::exp(g(rng)));
        const BoundaryPoint e(cplx(g(rng), g(rng)));
        const auto d = direction_toward(p, e);
        EXPECT_NEAR(d.v[0] * d.v[0] + d.v[1] * d.v[1] + d.v[2] * d.v[2], 1.0, 1e-12);
        EXPECT_LT(std::abs(endpoint_of(p, d).value() - e.value()), 1e-8 * (1 + std::abs(e.value())));
    }
    EXPECT_TRUE(endpoint_of(UpperSpacePoint(), Direction{{0, 0, 1}}).is_infinite());
}

TEST(HyperbolicDistance, Examples) {
    const UpperSpacePoint i(cplx(0.0), 1.0);
    EXPECT_EQ(hyperbolic_distance(i, i), 0.0);
    EXPECT_NEAR(hyperbolic_distance(i, UpperSpacePoint(cplx(0.0), std::numbers::e)), 1.0, 1e-15);
    EXPECT_NEAR(hyperbolic_distance(i, UpperSpacePoint(cplx(1.0), 1.0)), std::acosh(1.5), 1e-15);
}

TEST(HyperbolicDistance, IsometryInvariant) {
    std::mt19937_64 rng(29);
    std::normal_distribution<double> g;
    for (int i = 0; i < 200; ++i) {
        const UpperSpacePoint p(cplx(g(rng), g(rng)), std::exp(g(rng))), q(cplx(g(rng), g(rng)), std::exp(g(rng)));
        const auto h = random_sl2c(rng);
        EXPECT_NEAR(hyperbolic_distance(act(h, p), act(h, q)), hyperbolic_distance(p, q), 1e-8);
    }
}

TEST(UpperSpacePoint, RejectsNonPositiveHeight) {
    EXPECT_THROW(UpperSpacePoint(cplx(0.0), 0.0), InvalidInput);
    EXPECT_THROW(UpperSpacePoint(cplx(0.0), -1.0), InvalidInput);
}

TEST(Flip, IsAnInvolutiveAntiAutomorphism) {
    std::mt19937_64 rng(31);
    for (int i = 0; i < 100; ++i) {
        const auto g = random_sl2c(rng), h = random_sl2c(rng);
        EXPECT_LT(entry_distance(flip(g * h), flip(h) * flip(g)), 1e-10 * g.norm() * h.norm());
        EXPECT_LT(entry_distance(flip(flip(g)), g), 1e-13);
    }
}
