#include <gtest/gtest.h>

#include "crvpinn/gram.hpp"
#include "crvpinn/problems.hpp"
#include "crvpinn/robust_loss.hpp"
#include "oracles.hpp"

using namespace crvpinn;

TEST(RobustLoss, MatchesDenseInverseOracle) {
    const GridSpec g(8);
    const auto eps = GridFunction::sample(g, [](double, double y) { return vardiff_eps(y); });
    const StokesDofLayout layout(g);
    struct Case {
        GramMatrix gram;
        Eigen::MatrixXd dense;
    };
    const Case cases[] = {
        {gram_laplace(g), oracle::laplace_gram(g, false)},
        {gram_variable_diffusion(eps), oracle::diffusion_gram(g, eps, false)},
        {gram_stokes(layout), oracle::stokes_gram(g)},
    };
    for (const auto& c : cases) {
        for (std::uint64_t s = 0; s < 10; ++s) {
            const Vector res = oracle::random_vector(c.gram.dimension(), s);
            const double want = oracle::dense_loss(c.dense, res);
            EXPECT_NEAR(robust_loss(res, c.gram).loss, want, 1e-10 * want);
        }
    }
}

TEST(RobustLoss, RepresentativeNormAndZero) {
    const GramMatrix gram = gram_laplace(GridSpec(10));
    const Vector res = oracle::random_vector(gram.dimension(), 3);
    const auto ev = robust_loss(res, gram);
    const Vector r = residual_representative(res, gram);
    EXPECT_LT((gram.matrix() * r - res).norm(), 1e-10 * res.norm());
    EXPECT_NEAR(r.dot(gram.matrix() * r), ev.loss, 1e-10 * ev.loss);
    EXPECT_EQ(robust_loss(Vector::Zero(gram.dimension()), gram).loss, 0.0);
    EXPECT_THROW(robust_loss(Vector::Zero(3), gram), std::invalid_argument);
    const auto grid_r = residual_representative(res, gram, DofSet::interior(GridSpec(10)));
    EXPECT_TRUE(grid_r.vanishes_on_boundary());
}

TEST(RobustLoss, CotangentIsGradient) {
    const GramMatrix gram = gram_stokes(StokesDofLayout(GridSpec(3)));
    const Vector res = oracle::random_vector(gram.dimension(), 9);
    const Vector cot = loss_gradient_cotangent(robust_loss(res, gram));
    const Vector fd = oracle::fd_gradient([&](const Eigen::VectorXd& x) { return robust_loss(x, gram).loss; }, res, 1e-5);
    EXPECT_LT((cot - fd).norm(), 1e-6 * fd.norm());
}

TEST(ErrorBounds, ScaleSqrtLoss) {
    const auto b = error_bounds(16.0, 4.0, 0.5);
    EXPECT_DOUBLE_EQ(b.lower, 1.0);
    EXPECT_DOUBLE_EQ(b.upper, 8.0);
    EXPECT_THROW(error_bounds(1.0, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(error_bounds(1.0, 0.5, 1.0), std::invalid_argument);
}

TEST(PinnLoss, MeanSquareAndGradient) {
    Vector res(4);
    res << 1, -2, 3, 0;
    EXPECT_DOUBLE_EQ(pinn_loss(res), 14.0 / 4.0);
    const Vector fd = oracle::fd_gradient([](const Eigen::VectorXd& x) { return pinn_loss(x); }, res, 1e-6);
    EXPECT_LT((pinn_loss_cotangent(res) - fd).norm(), 1e-8);
}
