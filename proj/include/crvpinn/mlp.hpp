#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "crvpinn/grid.hpp"

namespace crvpinn {

/// Points as columns of a 2 x P matrix.
using Points = Eigen::Matrix2Xd;
/// Network outputs, one row per output and one column per point.
using Outputs = Eigen::MatrixXd;

struct MlpConfig {
    int input_dim = 2;
    int output_dim = 1;
    int hidden_layers = 2;
    int width = 50;
    std::uint64_t seed = 0;

    void validate() const;
    bool operator==(const MlpConfig&) const = default;
};

/// Trainable parameters stored as one flat vector. For every layer the
/// weight matrix (fan_out x fan_in, column-major) comes first, then the bias.
class MlpParams {
public:
    struct Layer {
        int fan_in;
        int fan_out;
        Eigen::Index weight_offset;
        Eigen::Index bias_offset;
    };

    explicit MlpParams(const MlpConfig& config);
    MlpParams(const MlpConfig& config, Vector values);

    const MlpConfig& config() const noexcept { return config_; }
    const std::vector<Layer>& layers() const noexcept { return layers_; }
    Eigen::Index size() const noexcept { return values_.size(); }

    Vector& values() noexcept { return values_; }
    const Vector& values() const noexcept { return values_; }

    Eigen::Map<const Eigen::MatrixXd> weight(std::size_t layer) const;
    Eigen::Map<Eigen::MatrixXd> weight(std::size_t layer);
    Eigen::Map<const Vector> bias(std::size_t layer) const;
    Eigen::Map<Vector> bias(std::size_t layer);

    /// sum over layers of (fan_in + 1) * fan_out.
    static Eigen::Index parameter_count(const MlpConfig& config);

private:
    MlpConfig config_;
    std::vector<Layer> layers_;
    Vector values_;
};

/// Glorot-uniform weights, zero biases; a pure function of the config seed.
MlpParams init_params(const MlpConfig& config);

/// Intermediate activations kept for the reverse pass.
struct ForwardCache {
    std::vector<Eigen::MatrixXd> activations;  // input, then each hidden layer
};

Outputs forward(const MlpParams& params, const Points& points, ForwardCache* cache = nullptr);

/// Gradient of sum(cotangent .* outputs) with respect to the flat parameters.
Vector backward(const MlpParams& params, const ForwardCache& cache, const Outputs& cotangent);
Vector backward(const MlpParams& params, const Points& points, const Outputs& cotangent);

/// Collocation points of a grid in grid-index order.
Points grid_points(const GridSpec& spec);

/// u = raw * cutoff + lift for one field.
struct FieldTreatment {
    GridFunction cutoff;
    GridFunction lift;
};

/// Maps network outputs to constrained grid fields. Field f is built from
/// network output `output_index[f]`.
struct BoundaryTreatment {
    std::vector<FieldTreatment> fields;
    std::vector<int> output_index;

    std::size_t field_count() const noexcept { return fields.size(); }
};

/// 16 x1 (1 - x1) x2 (1 - x2): zero on the boundary, 1 at the centre.
GridFunction bubble_cutoff(const GridSpec& spec);
GridFunction sample_cutoff(const GridSpec& spec, const std::function<double(double, double)>& f);

/// Transfinite (Coons) interpolation of boundary data g into the square.
GridFunction coons_lift(const GridSpec& spec, const std::function<double(double, double)>& g);
/// max(1 - x1, x1, 1 - x2, x2) * g, with g evaluated as a smooth extension.
GridFunction edge_max_lift(const GridSpec& spec, const std::function<double(double, double)>& g);

std::vector<GridFunction> apply_boundary(const Outputs& raw, const BoundaryTreatment& treatment);
std::vector<GridFunction> apply_boundary(std::span<const GridFunction> raw,
                                         const BoundaryTreatment& treatment);
/// Pulls a cotangent on the constrained fields back to the raw network outputs.
Outputs boundary_cotangent(std::span<const GridFunction> field_cotangent,
                           const BoundaryTreatment& treatment, int output_dim);

struct Checkpoint {
    MlpParams params;
    long iteration;
};

/// One JSON header line followed by the raw little-endian float64 parameters.
void save_checkpoint(const std::filesystem::path& path, const MlpParams& params, long iteration);
Checkpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace crvpinn
