#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "geoflow/torus.hpp"

using namespace geoflow;

namespace {

TorusCurve diagonal_line() { return TorusCurve::polynomial({Polynomial{0.0, 1.0}, Polynomial{0.0, 1.0}}); }

} // namespace

TEST(Torus, ZeroIndexIsOne) {
    const auto pts = torus_translate(TorusCurve::circle(), 3.7, 100);
    EXPECT_EQ(fourier_coefficient(pts, FourierIndex{{0, 0}}), std::complex<double>(1.0, 0.0));
}

TEST(Torus, AlphaZeroCollapsesToOrigin) {
    for (const auto& p : torus_translate(TorusCurve::circle(), 0.0, 50)) {
        EXPECT_EQ(p[0], 0.0);
        EXPECT_EQ(p[1], 0.0);
    }
}

TEST(Torus, CircleAtAlphaOne) {
    const auto pts = torus_translate(TorusCurve::circle(), 1.0, 4);
    ASSERT_EQ(pts.size(), 4u);
    for (int j = 0; j < 4; ++j) {
        const double a = 2 * std::numbers::pi * (j + 0.5) / 4;
        EXPECT_NEAR(pts[j][0], wrap_unit(std::cos(a)), 1e-15);
        EXPECT_NEAR(pts[j][1], wrap_unit(std::sin(a)), 1e-15);
        EXPECT_GE(pts[j][0], 0.0);
        EXPECT_LT(pts[j][0], 1.0);
    }
}

TEST(Torus, LineMatchesClosedForm) {
    // |int_0^1 exp(2 pi i alpha s) ds| = |sin(pi alpha) / (pi alpha)|.
    for (double alpha : {0.3, 1.5, 7.25, 40.5}) {
        const double exact = std::abs(std::sin(std::numbers::pi * alpha) / (std::numbers::pi * alpha));
        const auto c = fourier_coefficient(torus_translate(diagonal_line(), alpha, 10000), FourierIndex{{1, 0}});
        EXPECT_NEAR(std::abs(c), exact, 1e-6) << alpha;
        const auto q = fourier_coefficient_quadrature(diagonal_line(), alpha, FourierIndex{{1, 0}});
        EXPECT_NEAR(std::abs(q), exact, 1e-12) << alpha;
    }
}

TEST(Torus, CircleMatchesBessel) {
    // int_0^1 exp(2 pi i alpha |m| cos 2 pi s) ds = J0(2 pi alpha |m|) for m along an axis.
    for (double alpha : {1.0, 10.0, 33.3, 80.0}) {
        for (const FourierIndex& m : {FourierIndex{{1, 0}}, FourierIndex{{0, 2}}, FourierIndex{{-3, 0}}}) {
            const double exact = std::abs(std::cyl_bessel_j(0.0, 2 * std::numbers::pi * alpha * m.sup_norm()));
            const auto q = fourier_coefficient_quadrature(TorusCurve::circle(), alpha, m);
            EXPECT_NEAR(std::abs(q), exact, 1e-10);
            const auto pts = torus_translate(TorusCurve::circle(), alpha, sweep_count(alpha, 3));
            EXPECT_NEAR(std::abs(fourier_coefficient(pts, m)), exact, 1e-6);
        }
    }
}

TEST(Torus, GridDoublingIsStable) {
    const TorusCurve cubic = TorusCurve::polynomial({Polynomial{0.0, 1.0}, Polynomial{0.0, 0.0, 1.0}, Polynomial{0.0, 0.0, 0.0, 1.0}});
    for (double alpha : {5.0, 50.0, 100.0}) {
        const FourierIndex m{{1, -2, 1}};
        const auto n = sweep_count(alpha, 3);
        const double a = std::abs(fourier_coefficient(torus_translate(cubic, alpha, n), m));
        const double b = std::abs(fourier_coefficient(torus_translate(cubic, alpha, 2 * n), m));
        EXPECT_NEAR(a, b, 1e-6) << alpha;
    }
}

TEST(Torus, CoefficientModulusAtMostOne) {
    const auto pts = torus_translate(TorusCurve::circle(), 12.3, 1000);
    for (const auto& m : fourier_indices(2, 3)) EXPECT_LE(std::abs(fourier_coefficient(pts, m)), 1.0 + 1e-15);
    // Unit modulus when all samples coincide.
    std::vector<TorusPoint> same(7, TorusPoint{0.3, 0.8});
    EXPECT_NEAR(std::abs(fourier_coefficient(same, FourierIndex{{2, -1}})), 1.0, 1e-15);
}

TEST(Torus, HyperplaneWitness) {
    const TorusCurve flat = TorusCurve::polynomial({Polynomial{}, Polynomial{0.0, 1.0}});
    for (double alpha : {0.0, 10.0, 100.0, 1000.0}) {
        const auto c = fourier_coefficient(torus_translate(flat, alpha, 1000), FourierIndex{{1, 0}});
        EXPECT_NEAR(std::abs(c), 1.0, 1e-9);
    }
}

TEST(Torus, Indices) {
    EXPECT_EQ(fourier_indices(2, 3).size(), 48u);
    EXPECT_EQ(fourier_indices(1, 2).size(), 4u);
    for (const auto& m : fourier_indices(3, 1)) {
        EXPECT_FALSE(m.is_zero());
        EXPECT_EQ(m.sup_norm(), 1);
    }
    EXPECT_THROW(fourier_indices(5, 1), InvalidInput);
    EXPECT_THROW(fourier_coefficient({TorusPoint{0.0}}, FourierIndex{{1, 0}}), InvalidInput);
}

TEST(Sweep, AlphaZeroRowAndDecay) {
    const auto table = equidistribution_sweep(TorusCurve::circle(), {0, 10, 20, 40, 80}, 3);
    ASSERT_EQ(table.rows.size(), 5u);
    EXPECT_NEAR(table.rows[0].max_abs, 1.0, 1e-15);
    EXPECT_LT(table.rows[4].max_abs, 0.05);
    EXPECT_LT(table.rows[4].max_abs, table.rows[1].max_abs);
    EXPECT_EQ(table.entries.size(), 5u * 48u);
}

TEST(Sweep, ThreadIndependentAndValidated) {
    const auto a = equidistribution_sweep(TorusCurve::circle(), {5, 15}, 2, Parallelism{1});
    const auto b = equidistribution_sweep(TorusCurve::circle(), {5, 15}, 2, Parallelism{3});
    ASSERT_EQ(a.entries.size(), b.entries.size());
    for (std::size_t i = 0; i < a.entries.size(); ++i) EXPECT_EQ(a.entries[i].abs_coeff, b.entries[i].abs_coeff);
    EXPECT_THROW(equidistribution_sweep(TorusCurve::circle(), {10, 5}, 2), InvalidInput);
    EXPECT_THROW(equidistribution_sweep(TorusCurve::circle(), {10}, 0), InvalidInput);
}

TEST(TorusCurve, Validation) {
    EXPECT_THROW(TorusCurve::polynomial({}), InvalidInput);
    EXPECT_THROW(TorusCurve::polynomial(std::vector<Polynomial>(5, Polynomial{0.0, 1.0})), InvalidInput);
    EXPECT_THROW(torus_translate(TorusCurve::circle(), -1.0, 10), InvalidInput);
}
