#pragma once

#include <array>
#include <span>
#include <vector>

#include "crvpinn/grid.hpp"
#include "crvpinn/sparse.hpp"

namespace crvpinn {

/// Scaling of the discrete inner products.
///
/// `unweighted` uses plain sums over grid points, which is what the h^{-2}
/// Gram stencil {4, -1} and pointwise strong residuals correspond to.
/// `weighted` multiplies every sum by h^2. Loss and error differ between the
/// two by the same global factor h^2, so all robustness ratios agree.
enum class Convention { unweighted, weighted };

/// Per-point weight of the inner product: 1 or h^2.
double test_weight(const GridSpec& spec, Convention convention) noexcept;

enum class DiffOp { identity, dx_forward, dy_forward, dx_backward, dy_backward };

/// Matrix of `op` acting on the delta basis of `from`, sampled at the points
/// of `to`. Row k holds (op f)(to[k]) as a linear form in the DOFs of f.
/// Out-of-range stencil entries are zero.
SparseMatrix difference_operator(const DofSet& from, DiffOp op, const DofSet& to);

/// Entry (k, l) = w * sum_{p in domain} (test_op delta_k)(p) * (trial_op delta_l)(p),
/// with rows indexed by `test` and columns by `trial`.
SparseMatrix bilinear_form(const DofSet& trial, DiffOp trial_op, const DofSet& test, DiffOp test_op,
                           const DofSet& domain, Convention convention);

/// Matrices of the scalar bilinear forms used to build block Grams.
/// Rows follow the test set, columns the trial set.
struct FundamentalBlocks {
    SparseMatrix M;                  // (f, g)
    SparseMatrix K_plus, K_minus;    // (grad f, grad g)
    SparseMatrix Kx_plus, Kx_minus;  // (dx f, dx g)
    SparseMatrix Ky_plus, Ky_minus;  // (dy f, dy g)
    SparseMatrix S_plus, S_minus;    // (dx f, dy g)
    SparseMatrix Ax_plus, Ax_minus;  // (dx f, g)
    SparseMatrix Ay_plus, Ay_minus;  // (dy f, g)
};

FundamentalBlocks fundamental_blocks(const DofSet& trial, const DofSet& test, const DofSet& domain,
                                     Convention convention);

/// SPD Gram matrix over a DOF ordering together with its factorization.
/// Construction factorizes exactly once.
class GramMatrix {
public:
    GramMatrix(SparseMatrix matrix, Convention convention, GridSpec spec);

    const SparseMatrix& matrix() const noexcept { return matrix_; }
    const Factorization& factorization() const noexcept { return factorization_; }
    Convention convention() const noexcept { return convention_; }
    const GridSpec& spec() const noexcept { return spec_; }
    int dimension() const noexcept { return matrix_.rows(); }

private:
    SparseMatrix matrix_;
    Factorization factorization_;
    Convention convention_;
    GridSpec spec_;
};

/// Delta-basis Gram of (grad u, grad v) on the interior points.
SparseMatrix laplace_gram_matrix(const GridSpec& spec, Convention convention = Convention::unweighted);
GramMatrix gram_laplace(const GridSpec& spec, Convention convention = Convention::unweighted);

/// Gram of (eps grad_+ u, grad_+ v) on the interior points; eps sampled on the
/// full grid and strictly positive. eps == 1 reproduces gram_laplace.
SparseMatrix variable_diffusion_gram_matrix(const GridFunction& eps,
                                            Convention convention = Convention::unweighted);
GramMatrix gram_variable_diffusion(const GridFunction& eps,
                                   Convention convention = Convention::unweighted);

/// Degrees of freedom of the first-order Stokes system.
///
/// Field order is sigma11, sigma12, sigma21, sigma22, u1, u2, p. sigma_{a1}
/// vanishes on the left edge, sigma_{a2} on the bottom edge, u on the whole
/// boundary and p on the left and bottom edges plus the corner (1, 1).
class StokesDofLayout {
public:
    enum Field : int { sigma11 = 0, sigma12, sigma21, sigma22, u1, u2, p };
    static constexpr int field_count = 7;

    explicit StokesDofLayout(GridSpec spec, bool zero_mean_pressure = false);

    const GridSpec& spec() const noexcept { return spec_; }
    /// Pressures are reported modulo constants (mean over the p DOFs removed).
    bool zero_mean_pressure() const noexcept { return zero_mean_; }
    const DofSet& dofs(int field) const { return fields_.at(static_cast<std::size_t>(field)); }
    int offset(int field) const { return offsets_.at(static_cast<std::size_t>(field)); }
    int size(int field) const { return static_cast<int>(dofs(field).size()); }
    int total() const noexcept { return offsets_.back(); }

    /// Stacks field values on their DOFs in field order.
    Vector gather(std::span<const GridFunction> fields) const;
    std::vector<GridFunction> scatter(const Vector& coefficients) const;

private:
    GridSpec spec_;
    bool zero_mean_;
    std::vector<DofSet> fields_;
    std::array<int, field_count + 1> offsets_{};
};

/// Block Gram of the adjoint graph inner product on the test space.
SparseMatrix stokes_gram_matrix(const StokesDofLayout& layout,
                                Convention convention = Convention::unweighted);
GramMatrix gram_stokes(const StokesDofLayout& layout, Convention convention = Convention::unweighted);

/// First-order Stokes operator (sigma - grad_- u, -div_+ sigma + grad_+ p,
/// div_- u) tested with deltas on the layout. Columns are the layout DOFs.
SparseMatrix stokes_operator_matrix(const StokesDofLayout& layout,
                                    Convention convention = Convention::unweighted);

/// Same operator acting on seven full-grid fields stacked in field order,
/// column index = field * (N+1)^2 + grid index.
SparseMatrix stokes_full_operator(const StokesDofLayout& layout,
                                  Convention convention = Convention::unweighted);

/// Places `block` into a triplet list at the given offsets, scaled by `s`.
void append_block(std::vector<Triplet>& out, const SparseMatrix& block, int row_offset, int col_offset,
                  double s = 1.0);

}  // namespace crvpinn
