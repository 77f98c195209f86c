#include <gtest/gtest.h>

#include "crvpinn/gram.hpp"
#include "crvpinn/problems.hpp"
#include "oracles.hpp"

using namespace crvpinn;

namespace {

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST(LaplaceGram, MatchesBruteForceBothConventions) {
    for (int n : {3, 4, 8}) {
        const GridSpec g(n);
        EXPECT_LT(rel_diff(laplace_gram_matrix(g).to_dense(), oracle::laplace_gram(g, false)), 1e-14);
        EXPECT_LT(rel_diff(laplace_gram_matrix(g, Convention::weighted).to_dense(), oracle::laplace_gram(g, true)),
                  1e-14);
    }
}

TEST(LaplaceGram, FivePointPatternAtN4) {
    const auto g = laplace_gram_matrix(GridSpec(4));
    EXPECT_EQ(g.rows(), 9);
    EXPECT_EQ(g.nonzeros(), 33u);
    EXPECT_DOUBLE_EQ(g.coeff(0, 0), 64.0);
    EXPECT_DOUBLE_EQ(g.coeff(0, 1), -16.0);
    EXPECT_DOUBLE_EQ(g.coeff(0, 3), -16.0);
    EXPECT_EQ(g.coeff(0, 4), 0.0);
    EXPECT_EQ(g.max_asymmetry(), 0.0);
}

TEST(VariableDiffusionGram, MatchesBruteForce) {
    const GridSpec g(6);
    const auto eps = GridFunction::sample(g, [](double, double y) { return vardiff_eps(y); });
    EXPECT_LT(rel_diff(variable_diffusion_gram_matrix(eps).to_dense(), oracle::diffusion_gram(g, eps, false)),
              1e-14);
    const auto one = GridFunction::constant(g, 1.0);
    EXPECT_EQ((variable_diffusion_gram_matrix(one).to_dense() - laplace_gram_matrix(g).to_dense()).norm(), 0.0);
    EXPECT_THROW(variable_diffusion_gram_matrix(GridFunction::constant(g, 0.0)), std::invalid_argument);
}

TEST(BilinearForm, MassAndStiffnessBlocks) {
    const GridSpec g(5);
    const DofSet in = DofSet::interior(g), all = DofSet::all(g);
    const auto blocks = fundamental_blocks(in, in, all, Convention::weighted);
    const double h2 = g.h() * g.h();
    EXPECT_LT((blocks.M.to_dense() - h2 * Eigen::MatrixXd::Identity(16, 16)).norm(), 1e-15);
    EXPECT_LT(rel_diff(blocks.K_plus.to_dense(), oracle::laplace_gram(g, true)), 1e-14);
    EXPECT_LT(rel_diff(blocks.K_minus.to_dense(), oracle::laplace_gram(g, true)), 1e-14);
    EXPECT_LT(rel_diff((blocks.Kx_plus + blocks.Ky_plus).to_dense(), blocks.K_plus.to_dense()), 1e-14);
    // (dx f, dy g) is the transpose of (dy f, dx g)
    const auto s = bilinear_form(in, DiffOp::dy_forward, in, DiffOp::dx_forward, all, Convention::unweighted);
    EXPECT_LT((blocks.S_plus.to_dense() / h2 - s.to_dense().transpose()).norm(), 1e-9);
}

TEST(DifferenceOperator, AppliesStencilToDofs) {
    const GridSpec g(4);
    const DofSet in = DofSet::interior(g), all = DofSet::all(g);
    const auto d = difference_operator(in, DiffOp::dx_backward, all);
    const auto u = oracle::random_vector(9, 2);
    const Vector got = d * u;
    const Vector want = all.gather(dx_backward(in.scatter(u)));
    EXPECT_LT((got - want).norm(), 1e-12 * want.norm());
}

TEST(StokesLayout, SizesAndRoundTrip) {
    for (int n : {4, 8}) {
        const StokesDofLayout layout{GridSpec(n)};
        EXPECT_EQ(layout.size(StokesDofLayout::sigma11), n * (n + 1));
        EXPECT_EQ(layout.size(StokesDofLayout::sigma22), n * (n + 1));
        EXPECT_EQ(layout.size(StokesDofLayout::u1), (n - 1) * (n - 1));
        EXPECT_EQ(layout.size(StokesDofLayout::p), n * n - 1);
        EXPECT_FALSE(layout.dofs(StokesDofLayout::p).contains(n, n));
        EXPECT_EQ(layout.total(), 4 * n * (n + 1) + 2 * (n - 1) * (n - 1) + n * n - 1);
        const Vector c = oracle::random_vector(layout.total(), 5);
        EXPECT_EQ((layout.gather(layout.scatter(c)) - c).norm(), 0.0);
    }
}

TEST(StokesOperator, MatchesGridDifferences) {
    const GridSpec g(4);
    const StokesDofLayout layout(g);
    const Eigen::MatrixXd a = oracle::stokes_operator(g);
    EXPECT_LT(rel_diff(stokes_operator_matrix(layout).to_dense(), a), 1e-14);
    const double h2 = g.h() * g.h();
    EXPECT_LT(rel_diff(stokes_operator_matrix(layout, Convention::weighted).to_dense(), h2 * a), 1e-14);
}

TEST(StokesOperator, FullOperatorAgreesOnDofColumns) {
    const GridSpec g(5);
    const StokesDofLayout layout(g);
    const auto full = stokes_full_operator(layout);
    const auto square = stokes_operator_matrix(layout);
    const Vector c = oracle::random_vector(layout.total(), 11);
    const auto fields = layout.scatter(c);
    const auto sz = static_cast<Eigen::Index>(g.size());
    Vector stacked(7 * sz);
    for (int f = 0; f < 7; ++f) stacked.segment(f * sz, sz) = fields[static_cast<std::size_t>(f)].as_vector();
    EXPECT_LT(((full * stacked) - square * c).norm(), 1e-12 * (square * c).norm());
}

TEST(StokesGram, EqualsAdjointGraphNorm) {
    for (int n : {3, 4, 6}) {
        const GridSpec g(n);
        const StokesDofLayout layout(g);
        const auto gram = stokes_gram_matrix(layout);
        EXPECT_EQ(gram.max_asymmetry(), 0.0);
        EXPECT_LT(rel_diff(gram.to_dense(), oracle::stokes_gram(g)), 1e-13) << "N=" << n;
        const double h2 = g.h() * g.h();
        EXPECT_LT(rel_diff(stokes_gram_matrix(layout, Convention::weighted).to_dense(), h2 * oracle::stokes_gram(g)),
                  1e-13);
    }
}

TEST(StokesGram, KernelOfOperatorIsConstantPressure) {
    const GridSpec g(4);
    const Eigen::MatrixXd a = stokes_operator_matrix(StokesDofLayout(g)).to_dense();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    EXPECT_EQ(lu.dimensionOfKernel(), 1);
    const Eigen::VectorXd k = lu.kernel().col(0);
    const StokesDofLayout layout(g);
    const int po = layout.offset(StokesDofLayout::p);
    EXPECT_LT(k.head(po).norm(), 1e-12 * k.norm());
    const Eigen::VectorXd p = k.tail(layout.size(StokesDofLayout::p));
    EXPECT_LT((p.array() - p.mean()).matrix().norm(), 1e-12 * p.norm());
}

TEST(GramMatrix, FactorizesOnceOnConstruction) {
    const auto before = Factorization::call_count();
    const GramMatrix gm = gram_laplace(GridSpec(6));
    EXPECT_EQ(Factorization::call_count(), before + 1);
    EXPECT_EQ(gm.dimension(), 25);
    const GramMatrix copy = gm;
    EXPECT_EQ(Factorization::call_count(), before + 1);
    EXPECT_EQ(copy.factorization().dimension(), 25);
}
