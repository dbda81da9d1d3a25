#include <gtest/gtest.h>

#include <cmath>

#include "geoflow/good_functions.hpp"

using namespace geoflow;

namespace {

const std::vector<double>& grid() {
    static const auto g = log_grid(-6, 0, 4);
    return g;
}

} // namespace

TEST(Sublevel, LinearAndQuadratic) {
    const Polynomial t{0.0, 1.0}, t2{0.0, 0.0, 1.0};
    for (double r : {1e-4, 0.01, 0.3, 0.9}) {
        EXPECT_NEAR(sublevel_measure(t, 0, 1, r, 2000), r, 1e-12);
        EXPECT_NEAR(sublevel_measure(t2, 0, 1, r, 2000), std::sqrt(r), 1e-12);
    }
    EXPECT_NEAR(sublevel_measure(t, -1, 1, 0.25, 2000), 0.5, 1e-12);
    EXPECT_NEAR(sublevel_measure(t, 0, 1, 2.0, 2000), 1.0, 1e-15);
}

TEST(Sublevel, CubicWithInteriorRoot) {
    // |s^3 - 1/8| < r on [0,1]: s in (cbrt(1/8 - r), cbrt(1/8 + r)).
    const Polynomial p{-0.125, 0.0, 0.0, 1.0};
    const double r = 0.01;
    EXPECT_NEAR(sublevel_measure(p, 0, 1, r, 2000), std::cbrt(0.125 + r) - std::cbrt(0.125 - r), 1e-12);
}

TEST(GoodFit, LinearIsOneOneGood) {
    const auto rep = good_function_fit({Polynomial{0.0, 1.0}}, 8, grid());
    EXPECT_TRUE(satisfies_good_bound(rep.tests, 1.0, 1.0));
    EXPECT_GE(rep.fitted_alpha, 1.0);
    EXPECT_EQ(rep.degree, 1);
}

TEST(GoodFit, SquareIsOneHalfGood) {
    const auto rep = good_function_fit({Polynomial{0.0, 0.0, 1.0}}, 8, grid());
    EXPECT_TRUE(satisfies_good_bound(rep.tests, 1.0, 0.5));
    EXPECT_GE(rep.fitted_alpha, 0.5);
}

TEST(GoodFit, MonomialsMeetThreshold) {
    for (int d = 1; d <= 4; ++d) {
        const auto rep = good_function_fit({Polynomial::monomial(d)}, 8, grid());
        EXPECT_GE(rep.fitted_alpha, 0.9 / d) << d;
        EXPECT_LE(rep.fitted_C, rep.C_cap);
        EXPECT_TRUE(satisfies_good_bound(rep.tests, rep.fitted_C, rep.fitted_alpha)) << d;
        EXPECT_NEAR(rep.C_cap, polynomial_good_constant(d), 1e-15);
    }
}

TEST(GoodFit, FittedAlphaIsMaximalOnItsGrid) {
    GoodFitOptions opt;
    const auto rep = good_function_fit({Polynomial::monomial(3)}, 8, grid(), opt);
    EXPECT_FALSE(satisfies_good_bound(rep.tests, rep.C_cap, rep.fitted_alpha + 2 * opt.alpha_step));
}

TEST(GoodFit, AdjointFamily) {
    const auto fam = unipotent_coordinate_family(2);
    EXPECT_EQ(fam.size(), 6u);
    const auto rep = good_function_fit(fam, 8, grid());
    EXPECT_GE(rep.fitted_alpha, 0.45);
    EXPECT_TRUE(satisfies_good_bound(rep.tests, rep.fitted_C, rep.fitted_alpha));
}

TEST(GoodFit, Validation) {
    EXPECT_THROW(good_function_fit({Polynomial{3.0}, Polynomial{}}, 8, grid()), InvalidInput);
    EXPECT_THROW(good_function_fit({Polynomial{0.0, 1.0}}, 3, grid()), InvalidInput);
    EXPECT_THROW(good_function_fit({Polynomial{0.0, 1.0}}, 8, {}), InvalidInput);
    EXPECT_THROW(good_function_fit({Polynomial{0.0, 1.0}}, 8, {0.1, -1.0}), InvalidInput);
}

TEST(LogGrid, Endpoints) {
    const auto g = log_grid(-6, 0, 4);
    EXPECT_EQ(g.size(), 25u);
    EXPECT_NEAR(g.front(), 1e-6, 1e-20);
    EXPECT_DOUBLE_EQ(g.back(), 1.0);
}
