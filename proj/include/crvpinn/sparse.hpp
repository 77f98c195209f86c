#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "crvpinn/grid.hpp"

namespace crvpinn {

using DenseMatrix = Eigen::MatrixXd;

struct Triplet {
    int row;
    int col;
    double value;
};

/// Compressed sparse-row matrix. Column indices are sorted within each row
/// and every (row, col) pair appears at most once.
class SparseMatrix {
public:
    using Storage = Eigen::SparseMatrix<double, Eigen::RowMajor, int>;

    SparseMatrix() = default;
    SparseMatrix(int rows, int cols);
    explicit SparseMatrix(Storage storage);

    /// Builds a matrix from triplets; duplicates are summed, explicit zeros kept.
    static SparseMatrix assemble(int rows, int cols, std::span<const Triplet> triplets);
    static SparseMatrix identity(int n);

    int rows() const noexcept { return static_cast<int>(m_.rows()); }
    int cols() const noexcept { return static_cast<int>(m_.cols()); }
    std::size_t nonzeros() const noexcept { return static_cast<std::size_t>(m_.nonZeros()); }

    std::span<const int> row_pointers() const noexcept;
    std::span<const int> column_indices() const noexcept;
    std::span<const double> values() const noexcept;

    /// Stored value at (i, j), 0 when the entry is absent.
    double coeff(int i, int j) const;

    Vector operator*(const Vector& x) const;
    SparseMatrix transpose() const;
    DenseMatrix to_dense() const;
    /// max |A - A^T| over all entries; requires a square matrix.
    double max_asymmetry() const;

    const Storage& eigen() const noexcept { return m_; }

private:
    Storage m_;
};

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b);
SparseMatrix operator*(double s, const SparseMatrix& a);
SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b);

/// Raised when a symmetric factorization meets a non-positive pivot.
class FactorizationError : public std::runtime_error {
public:
    FactorizationError(const std::string& what, long pivot_row)
        : std::runtime_error(what), pivot_row_(pivot_row) {}
    /// Row of the original (unpermuted) matrix where the pivot failed, -1 if unknown.
    long pivot_row() const noexcept { return pivot_row_; }

private:
    long pivot_row_;
};

/// Sparse symmetric LDL^T factorization of an SPD matrix, reusable for any
/// number of solves. Copies share the same factor.
class Factorization {
public:
    static Factorization factorize(const SparseMatrix& a);

    int dimension() const noexcept { return n_; }
    Vector solve(const Vector& b) const;
    std::size_t factor_nonzeros() const noexcept;

    /// Number of factorize() calls since process start.
    static std::uint64_t call_count() noexcept;

private:
    struct Impl;
    explicit Factorization(std::shared_ptr<const Impl> impl, int n);

    std::shared_ptr<const Impl> impl_;
    int n_ = 0;
};

struct GeneralizedEigen {
    Vector values;        // ascending
    DenseMatrix vectors;  // columns normalized so v^T G v = 1
};

/// Solves R v = lambda G v for symmetric R and SPD G. Eigenvalues in
/// [-1e-10 * scale, 0) are clipped to 0.
GeneralizedEigen generalized_eigen(const DenseMatrix& r, const DenseMatrix& g);
std::vector<double> generalized_eig_smallest(const DenseMatrix& r, const DenseMatrix& g, int k);

/// Matrix Market coordinate/real/general, 1-based, 17 significant digits.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a);
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

}  // namespace crvpinn
