#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "crvpinn/gram.hpp"
#include "crvpinn/grid.hpp"
#include "crvpinn/mlp.hpp"
#include "crvpinn/sparse.hpp"

namespace crvpinn {

/// Names accepted by problem_spec(), in a fixed order.
std::span<const std::string_view> problem_names();

class UnknownProblem : public std::invalid_argument {
public:
    explicit UnknownProblem(std::string_view name);
};

struct RobustnessConstants {
    double mu;     // continuity
    double alpha;  // coercivity or inf-sup
};

struct ProblemSpec {
    std::string name;
    std::vector<std::string> field_names;
    /// Network outputs; differs from the field count for Stokes.
    int output_dim;
    std::vector<int> output_index;
    RobustnessConstants constants;
    double beta_x = 0.0;
    double beta_y = 0.0;
    /// Constant diffusion where applicable, 0 otherwise.
    double eps = 0.0;

    int field_count() const noexcept { return static_cast<int>(field_names.size()); }
    bool is_stokes() const noexcept { return name == "stokes"; }
};

ProblemSpec problem_spec(std::string_view name);
RobustnessConstants robustness_constants(std::string_view name);

/// Exact solution values in field order. For Stokes the order is
/// sigma11, sigma12, sigma21, sigma22, u1, u2, p with sigma = grad u.
std::vector<double> exact_solution(std::string_view name, double x1, double x2);
/// Right-hand side of the PDE as stated for each problem:
/// laplace-*: -Lap u = f; advection-diffusion: 0; poisson-vardiff:
/// div(eps grad u) = f; poisson-jump: Lap u = f; stokes: (f1, f2) with
/// -Lap u + grad p = f.
std::vector<double> forcing(std::string_view name, double x1, double x2);
/// Diffusion coefficient of poisson-vardiff, 2 (x2 + 1).
double vardiff_eps(double x2) noexcept;

enum class LiftKind { coons, edge_max };

/// A benchmark problem discretized on a grid: residual operator, right-hand
/// side, factorized Gram, boundary treatment and error norm.
///
/// The residual of grid fields u is RES(u) = L u - F, where L acts on the
/// stacked full-grid fields and F holds the forcing. Residuals and the Gram
/// share the convention, so RES^T G^{-1} RES is the robust loss.
class DiscreteProblem {
public:
    DiscreteProblem(std::string_view name, int n, Convention convention = Convention::unweighted,
                    LiftKind lift = LiftKind::coons);

    const ProblemSpec& spec() const noexcept { return spec_; }
    const GridSpec& grid() const noexcept { return grid_; }
    Convention convention() const noexcept { return convention_; }
    int field_count() const noexcept { return spec_.field_count(); }

    /// DOFs of each field; residual rows follow the same sets and order.
    const DofSet& dofs(int field) const { return dofs_.at(static_cast<std::size_t>(field)); }
    int offset(int field) const { return offsets_.at(static_cast<std::size_t>(field)); }
    int dof_count() const noexcept { return offsets_.back(); }

    /// Residual operator on the stacked full-grid fields.
    const SparseMatrix& full_operator() const noexcept { return full_operator_; }
    /// Residual operator restricted to the DOF columns (square).
    const SparseMatrix& dof_operator() const noexcept { return dof_operator_; }
    const Vector& rhs() const noexcept { return rhs_; }
    const GramMatrix& gram() const noexcept { return *gram_; }
    /// Trial-space norm matrix on the DOFs: sqrt(e^T E e) is the error norm.
    const SparseMatrix& error_matrix() const noexcept { return error_matrix_; }
    const BoundaryTreatment& treatment() const noexcept { return treatment_; }

    std::vector<GridFunction> exact_fields() const;
    std::vector<GridFunction> lift_fields() const;
    /// Fields of network outputs after the boundary treatment.
    std::vector<GridFunction> fields_from_outputs(const Outputs& raw) const;

    Vector gather(std::span<const GridFunction> fields) const;
    std::vector<GridFunction> scatter(const Vector& coefficients) const;
    Vector stack(std::span<const GridFunction> fields) const;
    std::vector<GridFunction> unstack(const Vector& stacked) const;

    /// Trial-norm distance between two field sets on the DOFs. For Stokes
    /// the mean of the pressure difference is removed first.
    double error_norm(std::span<const GridFunction> a, std::span<const GridFunction> b) const;

private:
    void check_fields(std::span<const GridFunction> fields) const;

    ProblemSpec spec_;
    GridSpec grid_;
    Convention convention_;
    std::vector<DofSet> dofs_;
    std::vector<int> offsets_;
    SparseMatrix full_operator_;
    SparseMatrix dof_operator_;
    Vector rhs_;
    std::shared_ptr<const GramMatrix> gram_;
    SparseMatrix error_matrix_;
    BoundaryTreatment treatment_;
};

/// Gram matrix the problem's loss uses, assembled without factorizing.
SparseMatrix problem_gram_matrix(std::string_view name, int n,
                                 Convention convention = Convention::unweighted);

/// RES(u) = L u - F over the problem's DOFs.
Vector assemble_residual(const DiscreteProblem& problem, std::span<const GridFunction> fields);

}  // namespace crvpinn
