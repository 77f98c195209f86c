#include "crvpinn/trainer.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "json.hpp"

namespace crvpinn {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

MlpConfig network_config(const DiscreteProblem& problem, int hidden_layers, int width, std::uint64_t seed) {
    MlpConfig c;
    c.input_dim = 2;
    c.output_dim = problem.spec().output_dim;
    c.hidden_layers = hidden_layers;
    c.width = width;
    c.seed = seed;
    return c;
}

Vector sparse_lu_solve(const SparseMatrix& a, const Vector& b) {
    Eigen::SparseMatrix<double> m(a.eigen());
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(m);
    if (lu.info() != Eigen::Success) throw std::runtime_error("direct solve: singular system");
    Vector x = lu.solve(b);
    if (lu.info() != Eigen::Success) throw std::runtime_error("direct solve: back substitution failed");
    return x;
}

}  // namespace

std::string_view to_string(LossKind kind) noexcept { return kind == LossKind::pinn ? "pinn" : "crvpinn"; }

LossKind parse_loss_kind(std::string_view text) {
    if (text == "crvpinn") return LossKind::crvpinn;
    if (text == "pinn") return LossKind::pinn;
    throw std::invalid_argument(fmt::format("unknown loss kind '{}'; expected crvpinn or pinn", text));
}

void TrainConfig::validate() const {
    problem_spec(problem);
    if (n < 2) throw std::invalid_argument(fmt::format("N must be at least 2, got {}", n));
    if (iterations < 1) throw std::invalid_argument(fmt::format("iterations must be >= 1, got {}", iterations));
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw std::invalid_argument(fmt::format("learning rate must be positive, got {}", learning_rate));
    }
    if (log_stride < 1) throw std::invalid_argument("log stride must be >= 1");
    MlpConfig c;
    c.hidden_layers = hidden_layers;
    c.width = width;
    c.validate();
}

AdamState::AdamState(Eigen::Index size) : m(Vector::Zero(size)), v(Vector::Zero(size)) {}

void adam_step(AdamState& state, Vector& params, const Vector& gradient, double lr) {
    if (params.size() != gradient.size() || params.size() != state.m.size()) {
        throw std::invalid_argument(fmt::format("adam_step: parameters {}, gradient {}, state {}",
                                                params.size(), gradient.size(), state.m.size()));
    }
    ++state.step;
    state.m = state.beta1 * state.m + (1.0 - state.beta1) * gradient;
    state.v = state.beta2 * state.v + (1.0 - state.beta2) * gradient.cwiseAbs2();
    const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.step));
    const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.step));
    params.array() -= lr * (state.m.array() / c1) / ((state.v.array() / c2).sqrt() + state.eps);
}

Objective::Objective(const DiscreteProblem& problem, LossKind kind)
    : problem_(problem), kind_(kind), points_(grid_points(problem.grid())) {}

Objective::Value Objective::evaluate(const MlpParams& params, bool with_gradient) const {
    ForwardCache cache;
    const Outputs raw = forward(params, points_, with_gradient ? &cache : nullptr);
    Value out;
    out.fields = problem_.fields_from_outputs(raw);
    const Vector res = assemble_residual(problem_, out.fields);

    Vector cot_res;
    if (kind_ == LossKind::crvpinn) {
        const LossEvaluation ev = robust_loss(res, problem_.gram());
        out.loss = ev.loss;
        if (with_gradient) cot_res = loss_gradient_cotangent(ev);
    } else {
        out.loss = pinn_loss(res);
        if (with_gradient) cot_res = pinn_loss_cotangent(res);
    }
    if (!with_gradient) return out;

    const Vector cot_full = problem_.full_operator().eigen().transpose() * cot_res;
    const auto cot_fields = problem_.unstack(cot_full);
    const Outputs cot_raw =
        boundary_cotangent(cot_fields, problem_.treatment(), params.config().output_dim);
    out.gradient = backward(params, cache, cot_raw);
    return out;
}

std::vector<GridFunction> direct_solve(const DiscreteProblem& problem) {
    const auto lift = problem.lift_fields();
    const Vector b = problem.rhs() - problem.full_operator() * problem.stack(lift);
    const SparseMatrix& a = problem.dof_operator();
    Vector x;
    if (!problem.spec().is_stokes()) {
        x = sparse_lu_solve(a, b);
    } else {
        // The extended operator has the constant pressures as kernel and the
        // constant continuity test function as left kernel: pin the first
        // pressure DOF and drop the first continuity row.
        const int p0 = problem.offset(StokesDofLayout::p);
        std::vector<Triplet> t;
        t.reserve(a.nonzeros() + 1);
        const auto rp = a.row_pointers();
        const auto ci = a.column_indices();
        const auto v = a.values();
        for (int i = 0; i < a.rows(); ++i) {
            if (i == p0) continue;
            for (int k = rp[i]; k < rp[i + 1]; ++k) {
                if (ci[k] != p0) t.push_back({i, ci[k], v[k]});
            }
        }
        t.push_back({p0, p0, 1.0});
        Vector rhs = b;
        rhs[p0] = 0.0;
        x = sparse_lu_solve(SparseMatrix::assemble(a.rows(), a.cols(), t), rhs);
        auto p = x.segment(p0, static_cast<Eigen::Index>(problem.dofs(StokesDofLayout::p).size()));
        p.array() -= p.mean();
    }
    const Vector r = a * x - b;
    const double scale = std::max(b.norm(), 1e-300);
    if (!(r.norm() <= 1e-8 * scale) && b.norm() > 0.0) {
        throw std::runtime_error(
            fmt::format("direct solve: relative residual {:.3g} too large", r.norm() / scale));
    }
    auto fields = problem.scatter(x);
    for (std::size_t f = 0; f < fields.size(); ++f) fields[f] += lift[f];
    return fields;
}

TrainResult train(const TrainConfig& config, const RecordCallback& on_record) {
    config.validate();
    const auto start = Clock::now();
    const DiscreteProblem problem(config.problem, config.n, config.convention, config.lift);
    const auto reference = direct_solve(problem);
    const auto exact = problem.exact_fields();
    const Objective objective(problem, config.loss);

    TrainResult result{{}, init_params(network_config(problem, config.hidden_layers, config.width, config.seed)),
                       {}, 0.0};
    result.setup_ms = ms_since(start);
    AdamState adam(result.params.size());
    const auto [mu, alpha] = problem.spec().constants;

    for (long it = 1; it <= config.iterations; ++it) {
        Objective::Value value;
        try {
            value = objective.evaluate(result.params);
        } catch (const std::runtime_error& e) {
            throw TrainingError(fmt::format("{} at iteration {}", e.what(), it), it);
        }
        if (!std::isfinite(value.loss) || !value.gradient.allFinite()) {
            throw TrainingError(fmt::format("non-finite loss at iteration {}", it), it);
        }
        const bool keep = it == 1 || it == config.iterations || it % config.log_stride == 0;
        TrainingRecord rec;
        if (keep) {
            rec.iteration = it;
            rec.loss = value.loss;
            rec.sqrt_loss = std::sqrt(value.loss);
            rec.err_discrete = problem.error_norm(value.fields, reference);
            rec.err_analytic = problem.error_norm(value.fields, exact);
            if (config.loss == LossKind::crvpinn) {
                const auto b = error_bounds(value.loss, mu, alpha);
                rec.lower_bound = b.lower;
                rec.upper_bound = b.upper;
            }
        }
        adam_step(adam, result.params.values(), value.gradient, config.learning_rate);
        if (keep) {
            rec.elapsed_ms = ms_since(start);
            result.records.push_back(rec);
            if (on_record) on_record(rec);
        }
        if (it == config.iterations) result.fields = std::move(value.fields);
    }
    return result;
}

std::string csv_header() {
    return "iter,loss,sqrt_loss,err_discrete,err_analytic,lower_bound,upper_bound,elapsed_ms";
}

std::string csv_row(const TrainingRecord& r) {
    auto opt = [](const std::optional<double>& v) { return v ? fmt::format("{:.17g}", *v) : std::string(); };
    return fmt::format("{},{:.17g},{:.17g},{:.17g},{:.17g},{},{},{:.17g}", r.iteration, r.loss, r.sqrt_loss,
                       r.err_discrete, r.err_analytic, opt(r.lower_bound), opt(r.upper_bound), r.elapsed_ms);
}

void write_records_csv(std::ostream& out, std::span<const TrainingRecord> records) {
    out << csv_header() << '\n';
    for (const auto& r : records) out << csv_row(r) << '\n';
}

void write_records_csv(const std::filesystem::path& path, std::span<const TrainingRecord> records) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    write_records_csv(out, records);
}

const char* library_version() noexcept { return CRVPINN_VERSION; }

std::string manifest_json(const TrainConfig& c) {
    nlohmann::json j = {
        {"schema_version", manifest_schema_version},
        {"library", "crvpinn"},
        {"library_version", library_version()},
        {"seed", c.seed},
        {"config",
         {
             {"problem", c.problem},
             {"n", c.n},
             {"hidden_layers", c.hidden_layers},
             {"width", c.width},
             {"learning_rate", c.learning_rate},
             {"iterations", c.iterations},
             {"seed", c.seed},
             {"loss", std::string(to_string(c.loss))},
             {"log_stride", c.log_stride},
             {"convention", c.convention == Convention::weighted ? "weighted" : "unweighted"},
             {"lift", c.lift == LiftKind::coons ? "coons" : "edge-max"},
             {"output_dir", c.output_dir.generic_string()},
         }},
        {"adam", {{"beta1", 0.9}, {"beta2", 0.999}, {"eps", 1e-8}}},
    };
    return j.dump(2);
}

void write_manifest(const std::filesystem::path& path, const TrainConfig& config) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << manifest_json(config) << '\n';
}

BenchResult bench(const std::string& problem_name, int n, long iterations, int hidden_layers, int width,
                  std::uint64_t seed) {
    if (iterations < 1) throw std::invalid_argument("bench needs at least one iteration");
    BenchResult result;
    const auto start = Clock::now();
    const DiscreteProblem problem(problem_name, n);
    result.setup_ms = ms_since(start);
    const MlpConfig net = network_config(problem, hidden_layers, width, seed);

    auto time_kind = [&](LossKind kind) {
        const Objective objective(problem, kind);
        MlpParams params = init_params(net);
        AdamState adam(params.size());
        const auto t0 = Clock::now();
        for (long it = 1; it <= iterations; ++it) {
            const auto value = objective.evaluate(params);
            if (!std::isfinite(value.loss)) {
                throw TrainingError(fmt::format("non-finite loss at iteration {}", it), it);
            }
            adam_step(adam, params.values(), value.gradient, 1e-3);
        }
        return ms_since(t0) / static_cast<double>(iterations);
    };
    result.pinn_ms = time_kind(LossKind::pinn);
    result.crvpinn_ms = time_kind(LossKind::crvpinn);
    return result;
}

}  // namespace crvpinn
