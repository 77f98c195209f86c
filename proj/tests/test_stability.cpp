#include <gtest/gtest.h>

#include "crvpinn/stability.hpp"

using namespace crvpinn;

TEST(InfSup, GoldenValuesAndKernel) {
    // golden second eigenvalues from the dense reference solve
    const std::pair<int, double> golden[] = {
        {4, 0.017665223838186243},
        {8, 0.016280580471902926},
        {12, 0.01606005415110277},
    };
    for (const auto& [n, lambda1] : golden) {
        const InfSupReport r = infsup_constant(n);
        EXPECT_EQ(r.n, n);
        EXPECT_EQ(r.dimension, 4 * n * (n + 1) + 2 * (n - 1) * (n - 1) + n * n - 1);
        EXPECT_NEAR(r.lambda1, lambda1, 1e-9 * lambda1);
        EXPECT_LE(r.lambda0, 1e-10);
        EXPECT_LE(r.lambda0, r.lambda1);
        EXPECT_DOUBLE_EQ(r.alpha, std::sqrt(r.lambda1));
        EXPECT_GE(r.alpha, 0.125);
        EXPECT_LE(r.kernel_pressure_deviation, 1e-8);
        EXPECT_LE(r.kernel_other_magnitude, 1e-8);
        EXPECT_LE(r.rayleigh_error, 1e-10);
        EXPECT_GE(r.r_min_eigenvalue, -1e-10);
    }
}

TEST(InfSup, RejectsLargeGrids) {
    EXPECT_THROW(infsup_constant(infsup_max_n + 1), std::invalid_argument);
    EXPECT_THROW(infsup_constant(1), std::invalid_argument);
}

TEST(Continuity, RatioBoundedByOne) {
    for (int n : {4, 8}) {
        const double r = continuity_ratio_max(n, 100, 7);
        EXPECT_LE(r, 1.0 + 1e-12);
        EXPECT_GT(r, 0.0);
    }
}
