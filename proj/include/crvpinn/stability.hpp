#pragma once

#include <cstdint>

#include "crvpinn/sparse.hpp"

namespace crvpinn {

/// Result of the discrete Stokes inf-sup computation R v = lambda G v.
struct InfSupReport {
    int n = 0;
    int dimension = 0;
    double lambda0 = 0.0;
    double lambda1 = 0.0;
    double alpha = 0.0;  // sqrt(lambda1)
    /// Kernel eigenvector: largest deviation of its pressure block from the
    /// block mean and largest entry of its stress/velocity blocks, both
    /// relative to the largest pressure entry.
    double kernel_pressure_deviation = 0.0;
    double kernel_other_magnitude = 0.0;
    /// |v1^T R v1 / v1^T G v1 - lambda1| / lambda1.
    double rayleigh_error = 0.0;
    /// Smallest eigenvalue of R itself (PSD check).
    double r_min_eigenvalue = 0.0;
};

inline constexpr int infsup_max_n = 16;

/// Dense generalized eigensolve on the extended Stokes spaces. N <= 16.
InfSupReport infsup_constant(int n);

/// Largest <Au, v>_h / (|u|_U |v|_V) over random pairs; should not exceed 1.
double continuity_ratio_max(int n, int trials, std::uint64_t seed);

}  // namespace crvpinn
