#include <sstream>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "crvpinn/gram.hpp"
#include "crvpinn/sparse.hpp"
#include "oracles.hpp"

using namespace crvpinn;

TEST(SparseMatrix, AssembleSumsDuplicatesAndSortsColumns) {
    const std::vector<Triplet> t = {{0, 2, 1.0}, {0, 0, 2.0}, {0, 2, 3.0}, {1, 1, -1.0}};
    const auto a = SparseMatrix::assemble(2, 3, t);
    EXPECT_EQ(a.nonzeros(), 3u);
    EXPECT_EQ(a.coeff(0, 2), 4.0);
    EXPECT_EQ(a.coeff(1, 0), 0.0);
    const auto cols = a.column_indices();
    EXPECT_LT(cols[0], cols[1]);
    EXPECT_EQ(a.row_pointers().size(), 3u);
    EXPECT_THROW(SparseMatrix::assemble(2, 2, std::vector<Triplet>{{2, 0, 1.0}}), std::out_of_range);
}

TEST(SparseMatrix, ArithmeticMatchesDense) {
    const auto g = laplace_gram_matrix(GridSpec(5));
    const auto d = g.to_dense();
    const Vector x = oracle::random_vector(g.cols(), 1);
    EXPECT_LT(((g * x) - d * x).norm(), 1e-12 * (d * x).norm());
    EXPECT_LT(((g * g).to_dense() - d * d).norm(), 1e-9 * (d * d).norm());
    EXPECT_LT(((2.0 * g - g).to_dense() - d).norm(), 1e-12);
    EXPECT_EQ(g.max_asymmetry(), 0.0);
    EXPECT_LT((g.transpose().to_dense() - d.transpose()).norm(), 1e-15);
}

TEST(Factorization, SolvesSpdSystemsRepeatedly) {
    const auto g = laplace_gram_matrix(GridSpec(12));
    const auto before = Factorization::call_count();
    const auto f = Factorization::factorize(g);
    EXPECT_EQ(Factorization::call_count(), before + 1);
    EXPECT_GT(f.factor_nonzeros(), 0u);
    const Eigen::MatrixXd d = g.to_dense();
    for (std::uint64_t s = 0; s < 5; ++s) {
        const Vector b = oracle::random_vector(g.rows(), s);
        const Vector x = f.solve(b);
        EXPECT_LT((d * x - b).norm(), 1e-10 * b.norm());
    }
    EXPECT_EQ(Factorization::call_count(), before + 1);
}

TEST(Factorization, RejectsIndefiniteAndAsymmetric) {
    const std::vector<Triplet> ind = {{0, 0, 1.0}, {1, 1, -2.0}, {2, 2, 3.0}};
    try {
        Factorization::factorize(SparseMatrix::assemble(3, 3, ind));
        FAIL() << "expected FactorizationError";
    } catch (const FactorizationError& e) {
        EXPECT_EQ(e.pivot_row(), 1);
    }
    const std::vector<Triplet> asym = {{0, 0, 1.0}, {0, 1, 0.5}, {1, 1, 1.0}};
    EXPECT_THROW(Factorization::factorize(SparseMatrix::assemble(2, 2, asym)), FactorizationError);
}

TEST(GeneralizedEigen, MatchesDenseReference) {
    const int n = 6;
    Eigen::MatrixXd r = Eigen::MatrixXd::Random(n, n);
    r = r * r.transpose();
    Eigen::MatrixXd g = Eigen::MatrixXd::Random(n, n);
    g = g * g.transpose() + n * Eigen::MatrixXd::Identity(n, n);
    const auto ge = generalized_eigen(r, g);
    // reference: eigenvalues of L^{-1} R L^{-T} via a plain nonsymmetric solver on G^{-1} R
    Eigen::EigenSolver<Eigen::MatrixXd> es(g.inverse() * r);
    std::vector<double> ref;
    for (int k = 0; k < n; ++k) ref.push_back(es.eigenvalues()[k].real());
    std::sort(ref.begin(), ref.end());
    for (int k = 0; k < n; ++k) EXPECT_NEAR(ge.values[k], ref[static_cast<std::size_t>(k)], 1e-9);
    for (int k = 0; k < n; ++k) {
        const Vector v = ge.vectors.col(k);
        EXPECT_NEAR(v.dot(g * v), 1.0, 1e-10);
        EXPECT_LT((r * v - ge.values[k] * (g * v)).norm(), 1e-9);
    }
    const auto two = generalized_eig_smallest(r, g, 2);
    ASSERT_EQ(two.size(), 2u);
    EXPECT_EQ(two[0], ge.values[0]);
}

TEST(MatrixMarket, RoundTripAndHeader) {
    const auto g = laplace_gram_matrix(GridSpec(4));
    std::stringstream ss;
    write_matrix_market(ss, g);
    std::string first;
    std::getline(ss, first);
    EXPECT_EQ(first, "%%MatrixMarket matrix coordinate real general");
    ss.seekg(0);
    const auto back = read_matrix_market(ss);
    EXPECT_EQ(back.nonzeros(), g.nonzeros());
    EXPECT_EQ((back.to_dense() - g.to_dense()).norm(), 0.0);
}
