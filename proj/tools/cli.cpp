#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <json.hpp>

#include "crvpinn/lemmas.hpp"
#include "crvpinn/plot.hpp"
#include "crvpinn/problems.hpp"
#include "crvpinn/stability.hpp"
#include "crvpinn/trainer.hpp"

namespace crvpinn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kNumerical = 1;
constexpr int kUsage = 2;

/// Raised for flag values CLI11 accepts syntactically but the command rejects.
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

void require_problem(const std::string& name) {
    for (auto known : problem_names()) {
        if (known == name) return;
    }
    throw UnknownProblem(name);
}

Convention parse_convention(const std::string& s) {
    if (s == "unweighted") return Convention::unweighted;
    if (s == "weighted") return Convention::weighted;
    throw UsageError("--convention must be unweighted or weighted");
}

LiftKind parse_lift(const std::string& s) {
    if (s == "coons") return LiftKind::coons;
    if (s == "edge-max") return LiftKind::edge_max;
    throw UsageError("--lift must be coons or edge-max");
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << text;
}

void write_command_manifest(const fs::path& dir, const std::string& command, std::uint64_t seed,
                            json config) {
    fs::create_directories(dir);
    json j = {
        {"schema_version", manifest_schema_version},
        {"library", "crvpinn"},
        {"library_version", library_version()},
        {"command", command},
        {"seed", seed},
        {"config", std::move(config)},
    };
    write_text(dir / "manifest.json", j.dump(2) + "\n");
}

struct TrainFlags {
    TrainConfig config;
    std::string loss = "crvpinn";
    std::string convention = "unweighted";
    std::string lift = "coons";
    bool svg = false;
    bool quiet = false;
};

struct LemmaFlags {
    std::vector<int> ns = {4, 16, 64};
    int trials = 100;
    std::uint64_t seed = 0;
    bool inject_bug = false;
    std::string out_dir = "runs/lemmas";
};

struct InfSupFlags {
    std::vector<int> ns = {8, 12, 16};
    std::uint64_t seed = 0;
    std::string out_dir = "runs/infsup";
};

struct ExportFlags {
    std::string problem = "laplace-sinsin";
    int n = 32;
    std::string format = "mtx";
    std::string convention = "unweighted";
    std::uint64_t seed = 0;
    std::string out_dir = "runs/gram";
};

struct BenchFlags {
    std::string problem = "laplace-sinsin";
    int n = 100;
    long iterations = 200;
    int hidden_layers = 2;
    int width = 100;
    std::uint64_t seed = 0;
    std::string out_dir = "runs/bench";
};

int cmd_train(TrainFlags& f, std::ostream& out) {
    TrainConfig& c = f.config;
    require_problem(c.problem);
    c.loss = parse_loss_kind(f.loss);
    c.convention = parse_convention(f.convention);
    c.lift = parse_lift(f.lift);
    c.validate();

    fs::create_directories(c.output_dir);
    {
        json j = json::parse(manifest_json(c));
        j["command"] = "train";
        write_text(c.output_dir / "manifest.json", j.dump(2) + "\n");
    }

    const long stride = std::max(1L, c.iterations / 10);
    const TrainResult result = train(c, [&](const TrainingRecord& r) {
        if (f.quiet || (r.iteration != 1 && r.iteration % stride != 0 && r.iteration != c.iterations)) return;
        fmt::print(out, "iter {:>7}  sqrt_loss {:.6e}  err_discrete {:.6e}  err_analytic {:.6e}\n", r.iteration,
                   r.sqrt_loss, r.err_discrete, r.err_analytic);
    });

    write_records_csv(c.output_dir / "records.csv", result.records);
    save_checkpoint(c.output_dir / "checkpoint.bin", result.params, c.iterations);
    if (f.svg) {
        write_convergence_svg(c.output_dir / "convergence.svg", result.records,
                              fmt::format("{} N={} ({})", c.problem, c.n, to_string(c.loss)));
    }
    const TrainingRecord& last = result.records.back();
    fmt::print(out, "final: sqrt_loss {:.6e}  err_discrete {:.6e}  err_analytic {:.6e}\n", last.sqrt_loss,
               last.err_discrete, last.err_analytic);
    fmt::print(out, "wrote {}\n", c.output_dir.string());
    return kOk;
}

int cmd_lemmas(const LemmaFlags& f, std::ostream& out, std::ostream& err) {
    if (f.trials < 0) throw UsageError("--trials must be non-negative");
    for (int n : f.ns) {
        if (n < 2) throw UsageError("--n values must be at least 2");
    }
    write_command_manifest(f.out_dir, "lemmas", f.seed,
                           {{"n", f.ns}, {"trials", f.trials}, {"inject_bug", f.inject_bug}});
    if (f.trials == 0) fmt::print(err, "warning: --trials 0 checks nothing; passing vacuously\n");

    bool all = true;
    LemmaOptions options{f.trials, f.seed, f.inject_bug};
    for (int n : f.ns) {
        for (const auto& r : check_lemmas(n, options)) {
            if (r.passed) {
                fmt::print(out, "PASS {:<24} N={:<4} trials={} worst={:.3g}\n", r.name, r.n, r.trials, r.worst);
            } else {
                all = false;
                fmt::print(out, "FAIL {:<24} N={:<4} trials={} worst={:.3g} witness u_seed={} v_seed={}\n",
                           r.name, r.n, r.trials, r.worst, r.witness_seed, r.witness_seed + 1);
            }
        }
    }
    return all ? kOk : kNumerical;
}

int cmd_infsup(const InfSupFlags& f, std::ostream& out) {
    for (int n : f.ns) {
        if (n < 2 || n > infsup_max_n) {
            throw UsageError(fmt::format("--n values must lie in [2, {}]", infsup_max_n));
        }
    }
    write_command_manifest(f.out_dir, "infsup", f.seed, {{"n", f.ns}});
    std::string csv = "n,dimension,lambda0,lambda1,alpha,kernel_pressure_deviation\n";
    fmt::print(out, "{:>4} {:>6} {:>14} {:>14} {:>10}\n", "N", "dim", "lambda0", "lambda1", "alpha");
    for (int n : f.ns) {
        const InfSupReport r = infsup_constant(n);
        fmt::print(out, "{:>4} {:>6} {:>14.6e} {:>14.6e} {:>10.6f}\n", r.n, r.dimension, r.lambda0, r.lambda1,
                   r.alpha);
        csv += fmt::format("{},{},{:.17g},{:.17g},{:.17g},{:.17g}\n", r.n, r.dimension, r.lambda0, r.lambda1,
                           r.alpha, r.kernel_pressure_deviation);
    }
    write_text(fs::path(f.out_dir) / "infsup.csv", csv);
    return kOk;
}

int cmd_export_gram(const ExportFlags& f, std::ostream& out) {
    require_problem(f.problem);
    if (f.format != "mtx") throw UsageError("--format must be mtx");
    if (f.n < 2) throw UsageError("--n must be at least 2");
    const Convention conv = parse_convention(f.convention);
    write_command_manifest(f.out_dir, "export-gram", f.seed,
                           {{"problem", f.problem}, {"n", f.n}, {"format", f.format}, {"convention", f.convention}});
    const SparseMatrix g = problem_gram_matrix(f.problem, f.n, conv);
    const fs::path path = fs::path(f.out_dir) / fmt::format("gram_{}_n{}.mtx", f.problem, f.n);
    write_matrix_market(path, g);
    fmt::print(out, "{}x{} with {} nonzeros -> {}\n", g.rows(), g.cols(), g.nonzeros(), path.string());
    return kOk;
}

int cmd_bench(const BenchFlags& f, std::ostream& out) {
    require_problem(f.problem);
    if (f.n < 2 || f.iterations < 1 || f.hidden_layers < 1 || f.width < 1) {
        throw UsageError("bench needs n >= 2 and positive iterations, layers and width");
    }
    write_command_manifest(f.out_dir, "bench", f.seed,
                           {{"problem", f.problem},
                            {"n", f.n},
                            {"iterations", f.iterations},
                            {"hidden_layers", f.hidden_layers},
                            {"width", f.width}});
    const BenchResult r = bench(f.problem, f.n, f.iterations, f.hidden_layers, f.width, f.seed);
    fmt::print(out, "setup (assembly + factorization): {:.3f} ms\n", r.setup_ms);
    fmt::print(out, "pinn:    {:.3f} ms/iter\n", r.pinn_ms);
    fmt::print(out, "crvpinn: {:.3f} ms/iter\n", r.crvpinn_ms);
    fmt::print(out, "ratio crvpinn/pinn: {:.3f}\n", r.ratio());
    write_text(fs::path(f.out_dir) / "bench.csv",
               fmt::format("setup_ms,pinn_ms,crvpinn_ms,ratio\n{:.17g},{:.17g},{:.17g},{:.17g}\n", r.setup_ms,
                           r.pinn_ms, r.crvpinn_ms, r.ratio()));
    return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Collocation-based robust variational PINNs"};
    app.set_version_flag("--version", std::string(library_version()));
    app.require_subcommand(1);

    TrainFlags train_flags;
    auto* train_cmd = app.add_subcommand("train", "Train a network on a benchmark problem");
    {
        TrainConfig& c = train_flags.config;
        train_cmd->add_option("--problem", c.problem, "Problem name")->capture_default_str();
        train_cmd->add_option("--n", c.n, "Grid intervals per axis")->capture_default_str();
        train_cmd->add_option("--layers", c.hidden_layers, "Hidden layers")->capture_default_str();
        train_cmd->add_option("--width", c.width, "Hidden layer width")->capture_default_str();
        train_cmd->add_option("--lr", c.learning_rate, "Adam learning rate")->capture_default_str();
        train_cmd->add_option("--iters", c.iterations, "Iterations")->capture_default_str();
        train_cmd->add_option("--seed", c.seed, "Seed")->envname("CRVPINN_SEED")->capture_default_str();
        train_cmd->add_option("--loss", train_flags.loss, "crvpinn or pinn")->capture_default_str();
        train_cmd->add_option("--log-every", c.log_stride, "Record stride")->capture_default_str();
        train_cmd->add_option("--convention", train_flags.convention, "unweighted or weighted")
            ->capture_default_str();
        train_cmd->add_option("--lift", train_flags.lift, "coons or edge-max")->capture_default_str();
        train_cmd->add_option("--out", c.output_dir, "Output directory")->capture_default_str();
        train_cmd->add_flag("--svg", train_flags.svg, "Also write convergence.svg");
        train_cmd->add_flag("--quiet", train_flags.quiet, "Only print the final line");
    }

    LemmaFlags lemma_flags;
    auto* lemma_cmd = app.add_subcommand("lemmas", "Randomized checks of the discrete calculus identities");
    lemma_cmd->add_option("--n", lemma_flags.ns, "Grid sizes")->delimiter(',')->capture_default_str();
    lemma_cmd->add_option("--trials", lemma_flags.trials, "Random pairs per grid")->capture_default_str();
    lemma_cmd->add_option("--seed", lemma_flags.seed, "Seed")->envname("CRVPINN_SEED")->capture_default_str();
    lemma_cmd->add_option("--out", lemma_flags.out_dir, "Output directory")->capture_default_str();
    lemma_cmd->add_flag("--inject-bug", lemma_flags.inject_bug)->group("");

    InfSupFlags infsup_flags;
    auto* infsup_cmd = app.add_subcommand("infsup", "Discrete Stokes inf-sup constant");
    infsup_cmd->add_option("--n", infsup_flags.ns, "Grid sizes")->delimiter(',')->capture_default_str();
    infsup_cmd->add_option("--seed", infsup_flags.seed, "Seed")->envname("CRVPINN_SEED")->capture_default_str();
    infsup_cmd->add_option("--out", infsup_flags.out_dir, "Output directory")->capture_default_str();

    ExportFlags export_flags;
    auto* export_cmd = app.add_subcommand("export-gram", "Write a problem's Gram matrix");
    export_cmd->add_option("--problem", export_flags.problem, "Problem name")->capture_default_str();
    export_cmd->add_option("--n", export_flags.n, "Grid intervals per axis")->capture_default_str();
    export_cmd->add_option("--format", export_flags.format, "Output format")->capture_default_str();
    export_cmd->add_option("--convention", export_flags.convention, "unweighted or weighted")
        ->capture_default_str();
    export_cmd->add_option("--seed", export_flags.seed, "Seed")->envname("CRVPINN_SEED")->capture_default_str();
    export_cmd->add_option("--out", export_flags.out_dir, "Output directory")->capture_default_str();

    BenchFlags bench_flags;
    auto* bench_cmd = app.add_subcommand("bench", "Per-iteration cost of crvpinn vs pinn losses");
    bench_cmd->add_option("--problem", bench_flags.problem, "Problem name")->capture_default_str();
    bench_cmd->add_option("--n", bench_flags.n, "Grid intervals per axis")->capture_default_str();
    bench_cmd->add_option("--iters", bench_flags.iterations, "Timed iterations")->capture_default_str();
    bench_cmd->add_option("--layers", bench_flags.hidden_layers, "Hidden layers")->capture_default_str();
    bench_cmd->add_option("--width", bench_flags.width, "Hidden layer width")->capture_default_str();
    bench_cmd->add_option("--seed", bench_flags.seed, "Seed")->envname("CRVPINN_SEED")->capture_default_str();
    bench_cmd->add_option("--out", bench_flags.out_dir, "Output directory")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kUsage;
    }

    try {
        if (*train_cmd) return cmd_train(train_flags, out);
        if (*lemma_cmd) return cmd_lemmas(lemma_flags, out, err);
        if (*infsup_cmd) return cmd_infsup(infsup_flags, out);
        if (*export_cmd) return cmd_export_gram(export_flags, out);
        if (*bench_cmd) return cmd_bench(bench_flags, out);
    } catch (const UnknownProblem& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kUsage;
    } catch (const UsageError& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kUsage;
    } catch (const TrainingError& e) {
        fmt::print(err, "error at iteration {}: {}\n", e.iteration(), e.what());
        return kNumerical;
    } catch (const std::invalid_argument& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kUsage;
    } catch (const std::exception& e) {
        fmt::print(err, "error: {}\n", e.what());
        return kNumerical;
    }
    return kUsage;
}

int run(int argc, const char* const* argv) { return run(argc, argv, std::cout, std::cerr); }

}  // namespace crvpinn::cli
