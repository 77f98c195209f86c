#include "crvpinn/problems.hpp"

#include <array>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "crvpinn/jet.hpp"

namespace crvpinn {

namespace {

constexpr std::array<std::string_view, 6> kNames = {
    "laplace-sinsin", "laplace-expsin", "advection-diffusion", "poisson-vardiff", "poisson-jump", "stokes",
};

enum class Kind { sinsin, expsin, advection, vardiff, jump, stokes };

Kind kind_of(std::string_view name) {
    for (std::size_t k = 0; k < kNames.size(); ++k) {
        if (kNames[k] == name) return static_cast<Kind>(k);
    }
    throw UnknownProblem(name);
}

constexpr double pi = std::numbers::pi;
constexpr double ej_eps = 0.1;

double ej_r(int sign) {
    return (1.0 + sign * std::sqrt(1.0 + 4.0 * ej_eps * ej_eps * pi * pi)) / (2.0 * ej_eps);
}

template <class T>
T sinsin(const T& x, const T& y) {
    using std::sin;
    return sin(2.0 * pi * x) * sin(2.0 * pi * y);
}

template <class T>
T expsin(const T& x, const T& y) {
    using std::exp;
    using std::sin;
    return -(exp(pi * (x - 2.0 * y)) * sin(2.0 * pi * x) * sin(pi * y));
}

template <class T>
T eriksson_johnson(const T& x, const T& y) {
    using std::exp;
    using std::sin;
    const double r1 = ej_r(+1), r2 = ej_r(-1);
    return (exp(r1 * (x - 1.0)) - exp(r2 * (x - 1.0))) / (std::exp(-r1) - std::exp(-r2)) * sin(pi * y);
}

template <class T>
T vardiff_u(const T& x, const T& y) {
    using std::sin;
    return sin(2.0 * pi * x) * sin(pi * y);
}

template <class T>
T jump_u(const T& x, const T& y) {
    using std::sin;
    using std::tanh;
    return (0.45 * tanh(100.0 * (y - 0.5)) + 0.55) * sin(pi * x) * sin(pi * y);
}

template <class T>
T stokes_u1(const T& x, const T& y) {
    using std::exp;
    const T xm = x - 1.0;
    return 2.0 * exp(x) * xm * xm * x * x * (y * y - y) * (2.0 * y - 1.0);
}

template <class T>
T stokes_u2(const T& x, const T& y) {
    using std::exp;
    const T ym = y - 1.0;
    return -(exp(x) * (x - 1.0) * x * (x * (x + 3.0) - 2.0) * ym * ym * y * y);
}

template <class T>
T stokes_p(const T& x, const T& y) {
    using std::exp;
    const T s = y * y - y;
    const T x2 = x * x;
    const T poly = 456.0 + x2 * (228.0 - 5.0 * s) + 2.0 * x * (s - 228.0) + 2.0 * x2 * x * (s - 36.0) +
                   x2 * x2 * (s + 12.0);
    return -424.0 + 156.0 * std::numbers::e + s * (exp(x) * poly - 456.0);
}

// Dirichlet data of the Eriksson-Johnson problem, exact zeros off the inflow edge.
double ej_dirichlet(double x, double y) {
    if (y == 0.0 || y == 1.0 || x != 0.0) return 0.0;
    return std::sin(pi * y);
}

SparseMatrix scalar_operator(Kind kind, const GridSpec& spec, const DofSet& from, const DofSet& to,
                             double w) {
    const double h = spec.h();
    const double inv_h = 1.0 / h, inv_h2 = 1.0 / (h * h);
    std::vector<Triplet> t;
    t.reserve(5 * to.size());
    for (std::size_t k = 0; k < to.size(); ++k) {
        const auto [i, j] = to[k];
        const int row = static_cast<int>(k);
        auto put = [&](int a, int b, double v) {
            const long col = from.position(a, b);
            if (col >= 0) t.push_back({row, static_cast<int>(col), w * v});
        };
        switch (kind) {
            case Kind::advection: {
                // beta . grad_+ u - eps Lap_h u with beta = (1, 0)
                put(i, j, 4.0 * ej_eps * inv_h2 - inv_h);
                put(i + 1, j, -ej_eps * inv_h2 + inv_h);
                put(i - 1, j, -ej_eps * inv_h2);
                put(i, j + 1, -ej_eps * inv_h2);
                put(i, j - 1, -ej_eps * inv_h2);
                break;
            }
            case Kind::vardiff: {
                // -div_-(eps grad_+ u); eps depends on x2 only, so eps_{i-1,j} = eps_{i,j}
                const double e = vardiff_eps(spec.coord(j));
                const double e_down = vardiff_eps(spec.coord(j - 1));
                put(i, j, (3.0 * e + e_down) * inv_h2);
                put(i + 1, j, -e * inv_h2);
                put(i - 1, j, -e * inv_h2);
                put(i, j + 1, -e * inv_h2);
                put(i, j - 1, -e_down * inv_h2);
                break;
            }
            default: {
                put(i, j, 4.0 * inv_h2);
                put(i + 1, j, -inv_h2);
                put(i - 1, j, -inv_h2);
                put(i, j + 1, -inv_h2);
                put(i, j - 1, -inv_h2);
                break;
            }
        }
    }
    return SparseMatrix::assemble(static_cast<int>(to.size()), static_cast<int>(from.size()), t);
}

}  // namespace

std::span<const std::string_view> problem_names() { return kNames; }

UnknownProblem::UnknownProblem(std::string_view name)
    : std::invalid_argument(fmt::format("unknown problem '{}'; valid names: {}", name,
                                        fmt::join(kNames, ", "))) {}

double vardiff_eps(double x2) noexcept { return 2.0 * (x2 + 1.0); }

ProblemSpec problem_spec(std::string_view name) {
    const Kind kind = kind_of(name);
    ProblemSpec s;
    s.name = std::string(name);
    s.field_names = {"u"};
    s.output_dim = 1;
    s.output_index = {0};
    s.constants = {1.0, 1.0};
    switch (kind) {
        case Kind::advection:
            s.beta_x = 1.0;
            s.eps = ej_eps;
            s.constants = {ej_eps + 2.0 * 2.0, ej_eps};
            break;
        case Kind::stokes:
            s.field_names = {"sigma11", "sigma12", "sigma21", "sigma22", "u1", "u2", "p"};
            // network outputs are u1, u2, p, w1, w2, z1, z2
            s.output_dim = 7;
            s.output_index = {3, 4, 5, 6, 0, 1, 2};
            s.constants = {1.0, 1.0 / 8.0};
            s.eps = 1.0;
            break;
        case Kind::jump:
        case Kind::sinsin:
        case Kind::expsin:
            s.eps = 1.0;
            break;
        case Kind::vardiff:
            break;
    }
    return s;
}

RobustnessConstants robustness_constants(std::string_view name) { return problem_spec(name).constants; }

std::vector<double> exact_solution(std::string_view name, double x1, double x2) {
    switch (kind_of(name)) {
        case Kind::sinsin: return {sinsin(x1, x2)};
        case Kind::expsin: return {expsin(x1, x2)};
        case Kind::advection: return {eriksson_johnson(x1, x2)};
        case Kind::vardiff: return {vardiff_u(x1, x2)};
        case Kind::jump: return {jump_u(x1, x2)};
        case Kind::stokes: {
            const Jet2 x = Jet2::x(x1), y = Jet2::y(x2);
            const Jet2 u1 = stokes_u1(x, y), u2 = stokes_u2(x, y);
            return {u1.dx, u1.dy, u2.dx, u2.dy, u1.v, u2.v, stokes_p(x1, x2)};
        }
    }
    return {};
}

std::vector<double> forcing(std::string_view name, double x1, double x2) {
    const Jet2 x = Jet2::x(x1), y = Jet2::y(x2);
    switch (kind_of(name)) {
        case Kind::sinsin:
            return {8.0 * pi * pi * std::sin(2.0 * pi * x1) * std::sin(2.0 * pi * x2)};
        case Kind::expsin: {
            const double e = std::exp(pi * (x1 - 2.0 * x2));
            return {pi * pi * e * std::sin(pi * x2) *
                        (4.0 * std::cos(2.0 * pi * x1) - 3.0 * std::sin(2.0 * pi * x1)) -
                    pi * pi * e * std::sin(2.0 * pi * x1) *
                        (4.0 * std::cos(pi * x2) - 3.0 * std::sin(pi * x2))};
        }
        case Kind::advection: return {0.0};
        case Kind::vardiff: {
            // div(eps grad u) with eps = 2 (x2 + 1), eps' = 2
            const Jet2 u = vardiff_u(x, y);
            return {vardiff_eps(x2) * u.laplacian() + 2.0 * u.dy};
        }
        case Kind::jump: return {jump_u(x, y).laplacian()};
        case Kind::stokes: {
            const Jet2 u1 = stokes_u1(x, y), u2 = stokes_u2(x, y), p = stokes_p(x, y);
            return {-u1.laplacian() + p.dx, -u2.laplacian() + p.dy};
        }
    }
    return {};
}

DiscreteProblem::DiscreteProblem(std::string_view name, int n, Convention convention, LiftKind lift)
    : spec_(problem_spec(name)), grid_(n), convention_(convention) {
    const Kind kind = kind_of(name);
    const double w = test_weight(grid_, convention);
    const DofSet all = DofSet::all(grid_);

    if (kind == Kind::stokes) {
        const StokesDofLayout layout(grid_);
        for (int f = 0; f < StokesDofLayout::field_count; ++f) {
            dofs_.push_back(layout.dofs(f));
            offsets_.push_back(layout.offset(f));
        }
        offsets_.push_back(layout.total());
        full_operator_ = stokes_full_operator(layout, convention);
        dof_operator_ = stokes_operator_matrix(layout, convention);
        gram_ = std::make_shared<const GramMatrix>(gram_stokes(layout, convention));
        error_matrix_ = w * SparseMatrix::identity(layout.total());

        rhs_ = Vector::Zero(layout.total());
        for (int a = 0; a < 2; ++a) {
            const int f = StokesDofLayout::u1 + a;
            const DofSet& pts = layout.dofs(f);
            for (std::size_t k = 0; k < pts.size(); ++k) {
                const auto [i, j] = pts[k];
                rhs_[layout.offset(f) + static_cast<Eigen::Index>(k)] =
                    w * forcing(name, grid_.coord(i), grid_.coord(j))[static_cast<std::size_t>(a)];
            }
        }

        auto velocity_data = [this, name](int a) {
            return [name, a](double x, double y) {
                return exact_solution(name, x, y)[static_cast<std::size_t>(StokesDofLayout::u1 + a)];
            };
        };
        const GridFunction zero(grid_);
        const GridFunction one = GridFunction::constant(grid_, 1.0);
        const GridFunction cut_x = sample_cutoff(grid_, [](double x, double) { return x; });
        const GridFunction cut_y = sample_cutoff(grid_, [](double, double y) { return y; });
        const GridFunction bubble = bubble_cutoff(grid_);
        treatment_.fields = {{cut_x, zero}, {cut_y, zero}, {cut_x, zero}, {cut_y, zero}};
        for (int a = 0; a < 2; ++a) {
            treatment_.fields.push_back(
                {bubble, lift == LiftKind::coons ? coons_lift(grid_, velocity_data(a))
                                                 : edge_max_lift(grid_, velocity_data(a))});
        }
        treatment_.fields.push_back({one, zero});
        treatment_.output_index = spec_.output_index;
        return;
    }

    const DofSet interior = DofSet::interior(grid_);
    dofs_.push_back(interior);
    offsets_ = {0, static_cast<int>(interior.size())};
    full_operator_ = scalar_operator(kind, grid_, all, interior, w);
    dof_operator_ = scalar_operator(kind, grid_, interior, interior, w);

    if (kind == Kind::vardiff) {
        const GridFunction eps = GridFunction::sample(grid_, [](double, double y) { return vardiff_eps(y); });
        gram_ = std::make_shared<const GramMatrix>(gram_variable_diffusion(eps, convention));
    } else {
        gram_ = std::make_shared<const GramMatrix>(gram_laplace(grid_, convention));
    }
    error_matrix_ = gram_->matrix();

    rhs_ = Vector::Zero(static_cast<Eigen::Index>(interior.size()));
    for (std::size_t k = 0; k < interior.size(); ++k) {
        const auto [i, j] = interior[k];
        const double f = forcing(name, grid_.coord(i), grid_.coord(j))[0];
        // L u = F with L the positive operator
        const double sign = (kind == Kind::vardiff || kind == Kind::jump) ? -1.0 : 1.0;
        rhs_[static_cast<Eigen::Index>(k)] = w * sign * f;
    }

    GridFunction lift_field(grid_);
    if (kind == Kind::advection) {
        lift_field = lift == LiftKind::coons
                         ? coons_lift(grid_, ej_dirichlet)
                         : edge_max_lift(grid_, [](double x, double y) {
                               return x == 0.0 ? ej_dirichlet(x, y) : eriksson_johnson(x, y);
                           });
        // the extension above is exact only up to rounding; pin boundary data
        const int nn = grid_.n();
        for (int k = 0; k <= nn; ++k) {
            const double t = grid_.coord(k);
            lift_field(0, k) = ej_dirichlet(0.0, t);
            lift_field(nn, k) = 0.0;
            lift_field(k, 0) = 0.0;
            lift_field(k, nn) = 0.0;
        }
    }
    treatment_.fields = {{bubble_cutoff(grid_), lift_field}};
    treatment_.output_index = spec_.output_index;
}

void DiscreteProblem::check_fields(std::span<const GridFunction> fields) const {
    if (static_cast<int>(fields.size()) != field_count()) {
        throw std::invalid_argument(fmt::format("{} expects {} fields, got {}", spec_.name, field_count(),
                                                fields.size()));
    }
    for (const auto& f : fields) {
        if (!(f.spec() == grid_)) {
            throw std::invalid_argument(fmt::format("field lives on N={}, problem on N={}", f.spec().n(),
                                                    grid_.n()));
        }
    }
}

std::vector<GridFunction> DiscreteProblem::exact_fields() const {
    std::vector<GridFunction> out(static_cast<std::size_t>(field_count()), GridFunction(grid_));
    const int n = grid_.n();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const auto v = exact_solution(spec_.name, grid_.coord(i), grid_.coord(j));
            for (std::size_t f = 0; f < out.size(); ++f) out[f](i, j) = v[f];
        }
    }
    return out;
}

std::vector<GridFunction> DiscreteProblem::lift_fields() const {
    std::vector<GridFunction> out;
    for (const auto& t : treatment_.fields) out.push_back(t.lift);
    return out;
}

std::vector<GridFunction> DiscreteProblem::fields_from_outputs(const Outputs& raw) const {
    return apply_boundary(raw, treatment_);
}

Vector DiscreteProblem::gather(std::span<const GridFunction> fields) const {
    check_fields(fields);
    Vector out(dof_count());
    for (int f = 0; f < field_count(); ++f) {
        out.segment(offset(f), static_cast<Eigen::Index>(dofs(f).size())) =
            dofs(f).gather(fields[static_cast<std::size_t>(f)]);
    }
    return out;
}

std::vector<GridFunction> DiscreteProblem::scatter(const Vector& coefficients) const {
    if (coefficients.size() != dof_count()) {
        throw std::invalid_argument(fmt::format("expected {} coefficients, got {}", dof_count(),
                                                coefficients.size()));
    }
    std::vector<GridFunction> out;
    for (int f = 0; f < field_count(); ++f) {
        out.push_back(dofs(f).scatter(coefficients.segment(offset(f), static_cast<Eigen::Index>(dofs(f).size()))));
    }
    return out;
}

Vector DiscreteProblem::stack(std::span<const GridFunction> fields) const {
    check_fields(fields);
    const auto m = static_cast<Eigen::Index>(grid_.size());
    Vector out(m * field_count());
    for (int f = 0; f < field_count(); ++f) out.segment(f * m, m) = fields[static_cast<std::size_t>(f)].as_vector();
    return out;
}

std::vector<GridFunction> DiscreteProblem::unstack(const Vector& stacked) const {
    const auto m = static_cast<Eigen::Index>(grid_.size());
    if (stacked.size() != m * field_count()) throw std::invalid_argument("unstack: length mismatch");
    std::vector<GridFunction> out;
    for (int f = 0; f < field_count(); ++f) {
        const Vector seg = stacked.segment(f * m, m);
        out.emplace_back(grid_, std::vector<double>(seg.data(), seg.data() + m));
    }
    return out;
}

double DiscreteProblem::error_norm(std::span<const GridFunction> a, std::span<const GridFunction> b) const {
    Vector e = gather(a) - gather(b);
    if (spec_.is_stokes()) {
        const int p = StokesDofLayout::p;
        auto seg = e.segment(offset(p), static_cast<Eigen::Index>(dofs(p).size()));
        seg.array() -= seg.mean();
    }
    const double sq = e.dot(error_matrix_ * e);
    return std::sqrt(std::max(sq, 0.0));
}

SparseMatrix problem_gram_matrix(std::string_view name, int n, Convention convention) {
    const GridSpec spec(n);
    switch (kind_of(name)) {
        case Kind::stokes: return stokes_gram_matrix(StokesDofLayout(spec), convention);
        case Kind::vardiff:
            return variable_diffusion_gram_matrix(
                GridFunction::sample(spec, [](double, double y) { return vardiff_eps(y); }), convention);
        default: return laplace_gram_matrix(spec, convention);
    }
}

Vector assemble_residual(const DiscreteProblem& problem, std::span<const GridFunction> fields) {
    return problem.full_operator() * problem.stack(fields) - problem.rhs();
}

}  // namespace crvpinn
