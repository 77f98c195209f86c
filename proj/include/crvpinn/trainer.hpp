#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "crvpinn/mlp.hpp"
#include "crvpinn/problems.hpp"
#include "crvpinn/robust_loss.hpp"

namespace crvpinn {

enum class LossKind { crvpinn, pinn };

std::string_view to_string(LossKind kind) noexcept;
LossKind parse_loss_kind(std::string_view text);

struct TrainConfig {
    std::string problem = "laplace-sinsin";
    int n = 32;
    int hidden_layers = 2;
    int width = 50;
    double learning_rate = 1e-3;
    long iterations = 5000;
    std::uint64_t seed = 0;
    LossKind loss = LossKind::crvpinn;
    /// Record every `log_stride` iterations; the first and last are always kept.
    long log_stride = 1;
    Convention convention = Convention::unweighted;
    LiftKind lift = LiftKind::coons;
    std::filesystem::path output_dir = "runs";

    void validate() const;
};

struct AdamState {
    explicit AdamState(Eigen::Index size);

    Vector m;
    Vector v;
    long step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// One bias-corrected Adam update of `params` in place.
void adam_step(AdamState& state, Vector& params, const Vector& gradient, double lr);

struct TrainingRecord {
    long iteration = 0;  // 1-based; values are those before the update
    double loss = 0.0;
    double sqrt_loss = 0.0;
    double err_discrete = 0.0;
    double err_analytic = 0.0;
    std::optional<double> lower_bound;
    std::optional<double> upper_bound;
    double elapsed_ms = 0.0;
};

/// Loss and parameter gradient of a network on a discrete problem.
class Objective {
public:
    Objective(const DiscreteProblem& problem, LossKind kind);

    struct Value {
        double loss = 0.0;
        Vector gradient;  // empty unless requested
        std::vector<GridFunction> fields;
    };

    Value evaluate(const MlpParams& params, bool with_gradient = true) const;
    const DiscreteProblem& problem() const noexcept { return problem_; }

private:
    const DiscreteProblem& problem_;
    LossKind kind_;
    Points points_;
};

class TrainingError : public std::runtime_error {
public:
    TrainingError(const std::string& what, long iteration)
        : std::runtime_error(what), iteration_(iteration) {}
    long iteration() const noexcept { return iteration_; }

private:
    long iteration_;
};

struct TrainResult {
    std::vector<TrainingRecord> records;
    MlpParams params;
    std::vector<GridFunction> fields;
    double setup_ms = 0.0;
};

using RecordCallback = std::function<void(const TrainingRecord&)>;

/// Full-batch Adam training. The problem's Gram is factorized once, before
/// the first iteration.
TrainResult train(const TrainConfig& config, const RecordCallback& on_record = {});

/// Discrete solution u*_h of L u = F with the boundary data of the problem.
/// Stokes pressures are returned in the zero-mean gauge over the p DOFs.
std::vector<GridFunction> direct_solve(const DiscreteProblem& problem);

/// CSV with header iter,loss,sqrt_loss,err_discrete,err_analytic,lower_bound,upper_bound,elapsed_ms.
void write_records_csv(std::ostream& out, std::span<const TrainingRecord> records);
void write_records_csv(const std::filesystem::path& path, std::span<const TrainingRecord> records);
std::string csv_header();
std::string csv_row(const TrainingRecord& record);

/// Versioned JSON manifest describing a run.
std::string manifest_json(const TrainConfig& config);
void write_manifest(const std::filesystem::path& path, const TrainConfig& config);
inline constexpr int manifest_schema_version = 1;

struct BenchResult {
    double setup_ms = 0.0;
    double crvpinn_ms = 0.0;  // mean per iteration
    double pinn_ms = 0.0;
    double ratio() const noexcept { return pinn_ms > 0.0 ? crvpinn_ms / pinn_ms : 0.0; }
};

/// Times full training iterations for both loss kinds on the same problem.
BenchResult bench(const std::string& problem, int n, long iterations, int hidden_layers, int width,
                  std::uint64_t seed);

const char* library_version() noexcept;

}  // namespace crvpinn
