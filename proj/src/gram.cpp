#include "crvpinn/gram.hpp"

#include <stdexcept>
#include <string>

#include <fmt/format.h>

namespace crvpinn {

double test_weight(const GridSpec& spec, Convention convention) noexcept {
    return convention == Convention::weighted ? spec.h() * spec.h() : 1.0;
}

namespace {

struct Stencil {
    int di0, dj0;  // first point offset
    int di1, dj1;  // second point offset
    double c0, c1;
    bool two_points;
};

// Stencil of op evaluated at (i, j); returns false when the entry is invalid.
bool stencil_at(DiffOp op, const GridSpec& spec, int i, int j, Stencil& s) {
    const double inv_h = 1.0 / spec.h();
    const int n = spec.n();
    switch (op) {
        case DiffOp::identity:
            s = {0, 0, 0, 0, 1.0, 0.0, false};
            return true;
        case DiffOp::dx_forward:
            s = {1, 0, 0, 0, inv_h, -inv_h, true};
            return i < n;
        case DiffOp::dy_forward:
            s = {0, 1, 0, 0, inv_h, -inv_h, true};
            return j < n;
        case DiffOp::dx_backward:
            s = {0, 0, -1, 0, inv_h, -inv_h, true};
            return i > 0;
        case DiffOp::dy_backward:
            s = {0, 0, 0, -1, inv_h, -inv_h, true};
            return j > 0;
    }
    return false;
}

void require_same_grid(const DofSet& a, const DofSet& b, const char* what) {
    if (!(a.spec() == b.spec())) throw std::invalid_argument(std::string(what) + ": grid mismatch");
}

SparseMatrix symmetrized(const SparseMatrix& a) {
    return 0.5 * (a + a.transpose());
}

}  // namespace

SparseMatrix difference_operator(const DofSet& from, DiffOp op, const DofSet& to) {
    require_same_grid(from, to, "difference_operator");
    const auto& spec = from.spec();
    std::vector<Triplet> t;
    t.reserve(2 * to.size());
    for (std::size_t k = 0; k < to.size(); ++k) {
        const auto [i, j] = to[k];
        Stencil s{};
        if (!stencil_at(op, spec, i, j, s)) continue;
        const long p0 = from.position(i + s.di0, j + s.dj0);
        if (p0 >= 0) t.push_back({static_cast<int>(k), static_cast<int>(p0), s.c0});
        if (s.two_points) {
            const long p1 = from.position(i + s.di1, j + s.dj1);
            if (p1 >= 0) t.push_back({static_cast<int>(k), static_cast<int>(p1), s.c1});
        }
    }
    return SparseMatrix::assemble(static_cast<int>(to.size()), static_cast<int>(from.size()), t);
}

SparseMatrix bilinear_form(const DofSet& trial, DiffOp trial_op, const DofSet& test, DiffOp test_op,
                           const DofSet& domain, Convention convention) {
    const SparseMatrix d_trial = difference_operator(trial, trial_op, domain);
    const SparseMatrix d_test = difference_operator(test, test_op, domain);
    return test_weight(domain.spec(), convention) * (d_test.transpose() * d_trial);
}

FundamentalBlocks fundamental_blocks(const DofSet& trial, const DofSet& test, const DofSet& domain,
                                     Convention convention) {
    auto form = [&](DiffOp f, DiffOp g) { return bilinear_form(trial, f, test, g, domain, convention); };
    FundamentalBlocks b;
    b.M = form(DiffOp::identity, DiffOp::identity);
    b.Kx_plus = form(DiffOp::dx_forward, DiffOp::dx_forward);
    b.Kx_minus = form(DiffOp::dx_backward, DiffOp::dx_backward);
    b.Ky_plus = form(DiffOp::dy_forward, DiffOp::dy_forward);
    b.Ky_minus = form(DiffOp::dy_backward, DiffOp::dy_backward);
    b.K_plus = b.Kx_plus + b.Ky_plus;
    b.K_minus = b.Kx_minus + b.Ky_minus;
    b.S_plus = form(DiffOp::dx_forward, DiffOp::dy_forward);
    b.S_minus = form(DiffOp::dx_backward, DiffOp::dy_backward);
    b.Ax_plus = form(DiffOp::dx_forward, DiffOp::identity);
    b.Ax_minus = form(DiffOp::dx_backward, DiffOp::identity);
    b.Ay_plus = form(DiffOp::dy_forward, DiffOp::identity);
    b.Ay_minus = form(DiffOp::dy_backward, DiffOp::identity);
    return b;
}

GramMatrix::GramMatrix(SparseMatrix matrix, Convention convention, GridSpec spec)
    : matrix_(std::move(matrix)),
      factorization_(Factorization::factorize(matrix_)),
      convention_(convention),
      spec_(spec) {}

SparseMatrix laplace_gram_matrix(const GridSpec& spec, Convention convention) {
    const DofSet interior = DofSet::interior(spec);
    const DofSet all = DofSet::all(spec);
    return fundamental_blocks(interior, interior, all, convention).K_plus;
}

GramMatrix gram_laplace(const GridSpec& spec, Convention convention) {
    return GramMatrix(laplace_gram_matrix(spec, convention), convention, spec);
}

SparseMatrix variable_diffusion_gram_matrix(const GridFunction& eps, Convention convention) {
    const auto& spec = eps.spec();
    const int n = spec.n();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            if (!(eps(i, j) > 0.0)) {
                throw std::invalid_argument(fmt::format(
                    "diffusion coefficient must be positive, got {} at ({}, {})", eps(i, j), i, j));
            }
        }
    }
    const DofSet interior = DofSet::interior(spec);
    const double s = test_weight(spec, convention) / (spec.h() * spec.h());
    std::vector<Triplet> t;
    t.reserve(5 * interior.size());
    for (std::size_t k = 0; k < interior.size(); ++k) {
        const auto [i, j] = interior[k];
        const int row = static_cast<int>(k);
        t.push_back({row, row, s * (2.0 * eps(i, j) + eps(i - 1, j) + eps(i, j - 1))});
        auto neighbour = [&](int a, int b, double e) {
            const long col = interior.position(a, b);
            if (col >= 0) t.push_back({row, static_cast<int>(col), -s * e});
        };
        neighbour(i - 1, j, eps(i - 1, j));
        neighbour(i + 1, j, eps(i, j));
        neighbour(i, j + 1, eps(i, j));
        neighbour(i, j - 1, eps(i, j - 1));
    }
    const int dim = static_cast<int>(interior.size());
    return SparseMatrix::assemble(dim, dim, t);
}

GramMatrix gram_variable_diffusion(const GridFunction& eps, Convention convention) {
    return GramMatrix(variable_diffusion_gram_matrix(eps, convention), convention, eps.spec());
}

StokesDofLayout::StokesDofLayout(GridSpec spec, bool zero_mean_pressure)
    : spec_(spec), zero_mean_(zero_mean_pressure) {
    const int n = spec.n();
    auto off_left = [](int i, int) { return i >= 1; };
    auto off_bottom = [](int, int j) { return j >= 1; };
    auto interior = [n](int i, int j) { return i >= 1 && j >= 1 && i <= n - 1 && j <= n - 1; };
    auto pressure = [n](int i, int j) { return i >= 1 && j >= 1 && !(i == n && j == n); };
    fields_.reserve(field_count);
    fields_.emplace_back(spec, off_left);    // sigma11
    fields_.emplace_back(spec, off_bottom);  // sigma12
    fields_.emplace_back(spec, off_left);    // sigma21
    fields_.emplace_back(spec, off_bottom);  // sigma22
    fields_.emplace_back(spec, interior);    // u1
    fields_.emplace_back(spec, interior);    // u2
    fields_.emplace_back(spec, pressure);    // p
    offsets_[0] = 0;
    for (int f = 0; f < field_count; ++f) {
        offsets_[f + 1] = offsets_[f] + static_cast<int>(fields_[f].size());
    }
}

Vector StokesDofLayout::gather(std::span<const GridFunction> fields) const {
    if (fields.size() != field_count) {
        throw std::invalid_argument(fmt::format("expected {} Stokes fields, got {}", field_count,
                                                fields.size()));
    }
    Vector out(total());
    for (int f = 0; f < field_count; ++f) out.segment(offset(f), size(f)) = dofs(f).gather(fields[f]);
    return out;
}

std::vector<GridFunction> StokesDofLayout::scatter(const Vector& coefficients) const {
    if (coefficients.size() != total()) {
        throw std::invalid_argument(fmt::format("expected {} Stokes coefficients, got {}", total(),
                                                coefficients.size()));
    }
    std::vector<GridFunction> out;
    out.reserve(field_count);
    for (int f = 0; f < field_count; ++f) {
        out.push_back(dofs(f).scatter(coefficients.segment(offset(f), size(f))));
    }
    return out;
}

void append_block(std::vector<Triplet>& out, const SparseMatrix& block, int row_offset, int col_offset,
                  double s) {
    const auto rp = block.row_pointers();
    const auto ci = block.column_indices();
    const auto v = block.values();
    for (int i = 0; i < block.rows(); ++i) {
        for (int k = rp[i]; k < rp[i + 1]; ++k) {
            out.push_back({row_offset + i, col_offset + ci[k], s * v[k]});
        }
    }
}

namespace {

using F = StokesDofLayout::Field;

DiffOp minus_op(int axis) { return axis == 0 ? DiffOp::dx_backward : DiffOp::dy_backward; }
DiffOp plus_op(int axis) { return axis == 0 ? DiffOp::dx_forward : DiffOp::dy_forward; }
int sigma_field(int a, int b) { return F::sigma11 + 2 * a + b; }
int velocity_field(int a) { return F::u1 + a; }

// One linear term "coefficient * op(field)" of a component of A or its adjoint.
struct Term {
    int field;
    DiffOp op;
    double coefficient;
};

// A component: a list of terms evaluated on a set of points.
struct Component {
    const DofSet* points;
    std::vector<Term> terms;
};

// Rows of A, one component per residual field, in field order.
std::vector<Component> operator_rows(const StokesDofLayout& layout) {
    std::vector<Component> rows;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const int s = sigma_field(a, b);
            rows.push_back({&layout.dofs(s),
                            {{s, DiffOp::identity, 1.0}, {velocity_field(a), minus_op(b), -1.0}}});
        }
    }
    for (int a = 0; a < 2; ++a) {
        rows.push_back({&layout.dofs(velocity_field(a)),
                        {{sigma_field(a, 0), DiffOp::dx_forward, -1.0},
                         {sigma_field(a, 1), DiffOp::dy_forward, -1.0},
                         {F::p, plus_op(a), 1.0}}});
    }
    rows.push_back({&layout.dofs(F::p),
                    {{F::u1, DiffOp::dx_backward, 1.0}, {F::u2, DiffOp::dy_backward, 1.0}}});
    return rows;
}

// Components of the adjoint applied to test functions, one per trial field:
// tau_ab + grad_{b-} v_a on the sigma_ab set, div_+ tau_a - grad_{a+} q on the
// interior, -div_- v on the pressure set.
std::vector<Component> adjoint_components(const StokesDofLayout& layout) {
    std::vector<Component> comps;
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const int s = sigma_field(a, b);
            comps.push_back({&layout.dofs(s),
                             {{s, DiffOp::identity, 1.0}, {velocity_field(a), minus_op(b), 1.0}}});
        }
    }
    for (int a = 0; a < 2; ++a) {
        comps.push_back({&layout.dofs(velocity_field(a)),
                         {{sigma_field(a, 0), DiffOp::dx_forward, 1.0},
                          {sigma_field(a, 1), DiffOp::dy_forward, 1.0},
                          {F::p, plus_op(a), -1.0}}});
    }
    comps.push_back({&layout.dofs(F::p),
                     {{F::u1, DiffOp::dx_backward, -1.0}, {F::u2, DiffOp::dy_backward, -1.0}}});
    return comps;
}

}  // namespace

SparseMatrix stokes_gram_matrix(const StokesDofLayout& layout, Convention convention) {
    std::vector<Triplet> t;
    for (const auto& comp : adjoint_components(layout)) {
        for (const auto& row_term : comp.terms) {
            for (const auto& col_term : comp.terms) {
                const SparseMatrix block =
                    bilinear_form(layout.dofs(col_term.field), col_term.op, layout.dofs(row_term.field),
                                  row_term.op, *comp.points, convention);
                append_block(t, block, layout.offset(row_term.field), layout.offset(col_term.field),
                             row_term.coefficient * col_term.coefficient);
            }
        }
    }
    const double w = test_weight(layout.spec(), convention);
    for (int k = 0; k < layout.total(); ++k) t.push_back({k, k, w});
    return symmetrized(SparseMatrix::assemble(layout.total(), layout.total(), t));
}

GramMatrix gram_stokes(const StokesDofLayout& layout, Convention convention) {
    return GramMatrix(stokes_gram_matrix(layout, convention), convention, layout.spec());
}

namespace {

SparseMatrix assemble_operator(const StokesDofLayout& layout, Convention convention, bool full_grid) {
    const GridSpec& spec = layout.spec();
    const DofSet all = DofSet::all(spec);
    const int full = static_cast<int>(spec.size());
    const double w = test_weight(spec, convention);
    std::vector<Triplet> t;
    int row_offset = 0;
    for (const auto& row : operator_rows(layout)) {
        for (const auto& term : row.terms) {
            const DofSet& from = full_grid ? all : layout.dofs(term.field);
            const int col_offset = full_grid ? term.field * full : layout.offset(term.field);
            append_block(t, difference_operator(from, term.op, *row.points), row_offset, col_offset,
                         w * term.coefficient);
        }
        row_offset += static_cast<int>(row.points->size());
    }
    const int cols = full_grid ? StokesDofLayout::field_count * full : layout.total();
    return SparseMatrix::assemble(layout.total(), cols, t);
}

}  // namespace

SparseMatrix stokes_operator_matrix(const StokesDofLayout& layout, Convention convention) {
    return assemble_operator(layout, convention, false);
}

SparseMatrix stokes_full_operator(const StokesDofLayout& layout, Convention convention) {
    return assemble_operator(layout, convention, true);
}

}  // namespace crvpinn
