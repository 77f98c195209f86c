#include "crvpinn/robust_loss.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace crvpinn {

LossEvaluation robust_loss(const Vector& res, const GramMatrix& gram) {
    if (res.size() != gram.dimension()) {
        throw std::invalid_argument(fmt::format("residual has {} entries, Gram is {}x{}", res.size(),
                                                gram.dimension(), gram.dimension()));
    }
    LossEvaluation out;
    out.res = res;
    out.q = gram.factorization().solve(res);
    out.loss = res.dot(out.q);
    if (!std::isfinite(out.loss)) throw std::runtime_error("robust loss is not finite");
    if (out.loss < 0.0) {
        const double tol = 1e-12 * res.norm() * out.q.norm();
        if (out.loss < -tol) {
            throw std::runtime_error(
                fmt::format("robust loss {:.6g} is negative: Gram matrix is not SPD", out.loss));
        }
        out.loss = 0.0;
    }
    return out;
}

Vector loss_gradient_cotangent(const LossEvaluation& evaluation) { return 2.0 * evaluation.q; }

Vector residual_representative(const Vector& res, const GramMatrix& gram) {
    if (res.size() != gram.dimension()) {
        throw std::invalid_argument(fmt::format("residual has {} entries, Gram is {}x{}", res.size(),
                                                gram.dimension(), gram.dimension()));
    }
    return gram.factorization().solve(res);
}

GridFunction residual_representative(const Vector& res, const GramMatrix& gram, const DofSet& dofs) {
    return dofs.scatter(residual_representative(res, gram));
}

ErrorBounds error_bounds(double loss, double mu, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument(fmt::format("alpha must be positive, got {}", alpha));
    if (!(mu >= alpha)) {
        throw std::invalid_argument(fmt::format("need mu >= alpha, got mu={} alpha={}", mu, alpha));
    }
    const double s = std::sqrt(std::max(loss, 0.0));
    return {s / mu, s / alpha};
}

double pinn_loss(const Vector& res) {
    if (res.size() == 0) return 0.0;
    return res.squaredNorm() / static_cast<double>(res.size());
}

Vector pinn_loss_cotangent(const Vector& res) {
    if (res.size() == 0) return res;
    return (2.0 / static_cast<double>(res.size())) * res;
}

}  // namespace crvpinn
