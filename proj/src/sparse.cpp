#include "crvpinn/sparse.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <fmt/format.h>

namespace crvpinn {

namespace {

std::atomic<std::uint64_t> g_factorizations{0};

void require_square(const SparseMatrix& a, const char* what) {
    if (a.rows() != a.cols()) {
        throw std::invalid_argument(fmt::format("{}: matrix is {}x{}, expected square", what,
                                                a.rows(), a.cols()));
    }
}

}  // namespace

SparseMatrix::SparseMatrix(int rows, int cols) : m_(rows, cols) {
    if (rows < 0 || cols < 0) throw std::invalid_argument("negative matrix dimension");
    m_.makeCompressed();
}

SparseMatrix::SparseMatrix(Storage storage) : m_(std::move(storage)) { m_.makeCompressed(); }

SparseMatrix SparseMatrix::assemble(int rows, int cols, std::span<const Triplet> triplets) {
    SparseMatrix out(rows, cols);
    std::vector<Eigen::Triplet<double, int>> list;
    list.reserve(triplets.size());
    for (const auto& t : triplets) {
        if (t.row < 0 || t.row >= rows || t.col < 0 || t.col >= cols) {
            throw std::out_of_range(fmt::format("triplet ({}, {}) outside a {}x{} matrix", t.row,
                                                t.col, rows, cols));
        }
        list.emplace_back(t.row, t.col, t.value);
    }
    out.m_.setFromTriplets(list.begin(), list.end());
    out.m_.makeCompressed();
    return out;
}

SparseMatrix SparseMatrix::identity(int n) {
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k) t.push_back({k, k, 1.0});
    return assemble(n, n, t);
}

std::span<const int> SparseMatrix::row_pointers() const noexcept {
    return {m_.outerIndexPtr(), static_cast<std::size_t>(m_.rows()) + 1};
}

std::span<const int> SparseMatrix::column_indices() const noexcept {
    return {m_.innerIndexPtr(), static_cast<std::size_t>(m_.nonZeros())};
}

std::span<const double> SparseMatrix::values() const noexcept {
    return {m_.valuePtr(), static_cast<std::size_t>(m_.nonZeros())};
}

double SparseMatrix::coeff(int i, int j) const {
    if (i < 0 || i >= rows() || j < 0 || j >= cols()) {
        throw std::out_of_range(fmt::format("entry ({}, {}) outside a {}x{} matrix", i, j, rows(),
                                            cols()));
    }
    return m_.coeff(i, j);
}

Vector SparseMatrix::operator*(const Vector& x) const {
    if (x.size() != cols()) {
        throw std::invalid_argument(
            fmt::format("matrix-vector product: {} columns vs vector of {}", cols(), x.size()));
    }
    return m_ * x;
}

SparseMatrix SparseMatrix::transpose() const { return SparseMatrix(Storage(m_.transpose())); }

DenseMatrix SparseMatrix::to_dense() const { return DenseMatrix(m_); }

double SparseMatrix::max_asymmetry() const {
    require_square(*this, "max_asymmetry");
    const Storage diff = m_ - Storage(m_.transpose());
    double worst = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k) {
        for (Storage::InnerIterator it(diff, k); it; ++it) worst = std::max(worst, std::abs(it.value()));
    }
    return worst;
}

SparseMatrix operator+(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) throw std::invalid_argument("sum: shape mismatch");
    return SparseMatrix(SparseMatrix::Storage(a.eigen() + b.eigen()));
}

SparseMatrix operator-(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("difference: shape mismatch");
    }
    return SparseMatrix(SparseMatrix::Storage(a.eigen() - b.eigen()));
}

SparseMatrix operator*(double s, const SparseMatrix& a) {
    return SparseMatrix(SparseMatrix::Storage(s * a.eigen()));
}

SparseMatrix operator*(const SparseMatrix& a, const SparseMatrix& b) {
    if (a.cols() != b.rows()) throw std::invalid_argument("product: inner dimension mismatch");
    return SparseMatrix(SparseMatrix::Storage(a.eigen() * b.eigen()));
}

struct Factorization::Impl {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>> ldlt;
};

Factorization::Factorization(std::shared_ptr<const Impl> impl, int n)
    : impl_(std::move(impl)), n_(n) {}

Factorization Factorization::factorize(const SparseMatrix& a) {
    require_square(a, "factorize");
    g_factorizations.fetch_add(1, std::memory_order_relaxed);
    if (a.max_asymmetry() != 0.0) {
        throw FactorizationError("factorize: matrix is not symmetric", -1);
    }
    auto impl = std::make_shared<Impl>();
    const Eigen::SparseMatrix<double> col_major(a.eigen());
    impl->ldlt.compute(col_major);
    const int n = a.rows();
    if (n > 0) {
        const Vector d = impl->ldlt.vectorD();
        const auto& pinv = impl->ldlt.permutationPinv();
        for (int k = 0; k < n; ++k) {
            if (!(d[k] > 0.0)) {
                const long row = pinv.indices()[k];
                throw FactorizationError(
                    fmt::format("factorize: non-positive pivot {:.6g} at row {}", d[k], row), row);
            }
        }
    }
    if (impl->ldlt.info() != Eigen::Success) {
        throw FactorizationError("factorize: numerical breakdown", -1);
    }
    return Factorization(std::move(impl), n);
}

Vector Factorization::solve(const Vector& b) const {
    if (!impl_) throw std::logic_error("solve on an empty factorization");
    if (b.size() != n_) {
        throw std::invalid_argument(
            fmt::format("solve: right-hand side has {} entries, factor is {}x{}", b.size(), n_, n_));
    }
    if (n_ == 0) return Vector(0);
    return impl_->ldlt.solve(b);
}

std::size_t Factorization::factor_nonzeros() const noexcept {
    return impl_ ? static_cast<std::size_t>(impl_->ldlt.matrixL().nestedExpression().nonZeros()) : 0;
}

std::uint64_t Factorization::call_count() noexcept {
    return g_factorizations.load(std::memory_order_relaxed);
}

GeneralizedEigen generalized_eigen(const DenseMatrix& r, const DenseMatrix& g) {
    if (r.rows() != r.cols() || g.rows() != g.cols() || r.rows() != g.rows()) {
        throw std::invalid_argument("generalized_eigen: R and G must be square of equal size");
    }
    Eigen::LLT<DenseMatrix> llt(g);
    if (llt.info() != Eigen::Success) {
        throw std::runtime_error("generalized_eigen: G is not symmetric positive definite");
    }
    const auto l = llt.matrixL();
    // C = L^{-1} R L^{-T}
    DenseMatrix c = l.solve(r);
    c = l.solve(DenseMatrix(c.transpose()));
    c = 0.5 * (c + c.transpose()).eval();
    Eigen::SelfAdjointEigenSolver<DenseMatrix> es(c);
    if (es.info() != Eigen::Success) throw std::runtime_error("generalized_eigen: eigensolve failed");

    GeneralizedEigen out;
    out.values = es.eigenvalues();
    const double scale = std::max(1.0, out.values.cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < out.values.size(); ++k) {
        if (out.values[k] < 0.0 && out.values[k] >= -1e-10 * scale) out.values[k] = 0.0;
    }
    out.vectors = llt.matrixU().solve(es.eigenvectors());
    return out;
}

std::vector<double> generalized_eig_smallest(const DenseMatrix& r, const DenseMatrix& g, int k) {
    if (k < 0 || k > r.rows()) throw std::invalid_argument("generalized_eig_smallest: bad k");
    const auto eig = generalized_eigen(r, g);
    return {eig.values.data(), eig.values.data() + k};
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.rows() << ' ' << a.cols() << ' ' << a.nonzeros() << '\n';
    const auto rp = a.row_pointers();
    const auto ci = a.column_indices();
    const auto v = a.values();
    for (int i = 0; i < a.rows(); ++i) {
        for (int k = rp[i]; k < rp[i + 1]; ++k) {
            out << fmt::format("{} {} {:.17g}\n", i + 1, ci[k] + 1, v[k]);
        }
    }
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& a) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_matrix_market(out, a);
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line.rfind("%%MatrixMarket", 0) != 0) {
        throw std::runtime_error("not a Matrix Market file");
    }
    std::istringstream banner(line);
    std::string tag, object, format, field, symmetry;
    banner >> tag >> object >> format >> field >> symmetry;
    if (object != "matrix" || format != "coordinate" || field != "real") {
        throw std::runtime_error("unsupported Matrix Market variant: " + line);
    }
    const bool symmetric = symmetry == "symmetric";
    if (!symmetric && symmetry != "general") {
        throw std::runtime_error("unsupported Matrix Market symmetry: " + symmetry);
    }
    while (std::getline(in, line) && (line.empty() || line[0] == '%')) {
    }
    std::istringstream header(line);
    long rows = 0, cols = 0, nnz = 0;
    if (!(header >> rows >> cols >> nnz)) throw std::runtime_error("bad Matrix Market size line");
    std::vector<Triplet> t;
    t.reserve(static_cast<std::size_t>(nnz));
    for (long k = 0; k < nnz; ++k) {
        long i = 0, j = 0;
        double v = 0.0;
        if (!(in >> i >> j >> v)) throw std::runtime_error("truncated Matrix Market data");
        t.push_back({static_cast<int>(i - 1), static_cast<int>(j - 1), v});
        if (symmetric && i != j) t.push_back({static_cast<int>(j - 1), static_cast<int>(i - 1), v});
    }
    return SparseMatrix::assemble(static_cast<int>(rows), static_cast<int>(cols), t);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    return read_matrix_market(in);
}

}  // namespace crvpinn
