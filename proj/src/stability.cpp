#include "crvpinn/stability.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

#include "crvpinn/gram.hpp"

namespace crvpinn {

InfSupReport infsup_constant(int n) {
    if (n < 2 || n > infsup_max_n) {
        throw std::invalid_argument(
            fmt::format("inf-sup analysis needs 2 <= N <= {}, got {}", infsup_max_n, n));
    }
    const GridSpec spec(n);
    const StokesDofLayout layout(spec);
    const double w = test_weight(spec, Convention::weighted);

    const DenseMatrix b = stokes_operator_matrix(layout, Convention::weighted).to_dense();
    const DenseMatrix g = stokes_gram_matrix(layout, Convention::weighted).to_dense();
    // M = w I, so B M^{-1} B^T = B B^T / w
    DenseMatrix r = (b * b.transpose()) / w;
    r = 0.5 * (r + r.transpose()).eval();

    const GeneralizedEigen eig = generalized_eigen(r, g);
    if (eig.values.size() < 2) throw std::runtime_error("inf-sup: system too small");

    InfSupReport rep;
    rep.n = n;
    rep.dimension = static_cast<int>(r.rows());
    rep.lambda0 = eig.values[0];
    rep.lambda1 = eig.values[1];
    rep.alpha = std::sqrt(std::max(rep.lambda1, 0.0));

    const Vector v0 = eig.vectors.col(0);
    const int p0 = layout.offset(StokesDofLayout::p);
    const int np = layout.size(StokesDofLayout::p);
    const Vector pblock = v0.segment(p0, np);
    const double pscale = pblock.cwiseAbs().maxCoeff();
    rep.kernel_pressure_deviation = (pblock.array() - pblock.mean()).abs().maxCoeff() / pscale;
    rep.kernel_other_magnitude = v0.head(p0).cwiseAbs().maxCoeff() / pscale;

    const Vector v1 = eig.vectors.col(1);
    const double rq = v1.dot(r * v1) / v1.dot(g * v1);
    rep.rayleigh_error = std::abs(rq - rep.lambda1) / rep.lambda1;

    Eigen::SelfAdjointEigenSolver<DenseMatrix> rs(r, Eigen::EigenvaluesOnly);
    rep.r_min_eigenvalue = rs.eigenvalues()[0];
    return rep;
}

double continuity_ratio_max(int n, int trials, std::uint64_t seed) {
    const GridSpec spec(n);
    const StokesDofLayout layout(spec);
    const SparseMatrix b = stokes_operator_matrix(layout, Convention::weighted);
    const SparseMatrix g = stokes_gram_matrix(layout, Convention::weighted);
    const double w = test_weight(spec, Convention::weighted);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    double worst = 0.0;
    for (int t = 0; t < trials; ++t) {
        Vector u(layout.total()), v(layout.total());
        for (auto& x : u) x = dist(rng);
        for (auto& x : v) x = dist(rng);
        // odd trials use the maximizing trial function for v
        if (t % 2 == 1) u = b.eigen().transpose() * v;
        const double num = v.dot(b * u);
        const double den = std::sqrt(w * u.squaredNorm()) * std::sqrt(v.dot(g * v));
        worst = std::max(worst, num / den);
    }
    return worst;
}

}  // namespace crvpinn
