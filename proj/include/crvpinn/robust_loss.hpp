#pragma once

#include <utility>
#include <vector>

#include "crvpinn/gram.hpp"
#include "crvpinn/grid.hpp"

namespace crvpinn {

struct LossEvaluation {
    double loss = 0.0;
    Vector q;    // G^{-1} res
    Vector res;
};

/// res^T G^{-1} res through the cached factorization of G. Small negative
/// values from round-off are clipped to 0; anything below
/// -1e-12 * |res| |q| means G is not SPD and raises std::runtime_error.
LossEvaluation robust_loss(const Vector& res, const GramMatrix& gram);

/// d loss / d res = 2 q.
Vector loss_gradient_cotangent(const LossEvaluation& evaluation);

/// r = G^{-1} res; its Gram norm equals sqrt(loss).
Vector residual_representative(const Vector& res, const GramMatrix& gram);
/// The representative scattered onto the grid (scalar problems).
GridFunction residual_representative(const Vector& res, const GramMatrix& gram, const DofSet& dofs);

struct ErrorBounds {
    double lower;
    double upper;
};

/// (sqrt(loss) / mu, sqrt(loss) / alpha).
ErrorBounds error_bounds(double loss, double mu, double alpha);

/// Mean of squared residual entries.
double pinn_loss(const Vector& res);
/// d pinn_loss / d res.
Vector pinn_loss_cotangent(const Vector& res);

}  // namespace crvpinn
