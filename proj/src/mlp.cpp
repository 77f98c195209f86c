#include "crvpinn/mlp.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <random>
#include <stdexcept>
#include <string>

#include <fmt/format.h>

#include "json.hpp"

namespace crvpinn {

void MlpConfig::validate() const {
    if (input_dim < 1 || output_dim < 1) throw std::invalid_argument("network dimensions must be positive");
    if (hidden_layers < 1) {
        throw std::invalid_argument(fmt::format("need at least one hidden layer, got {}", hidden_layers));
    }
    if (width < 1) throw std::invalid_argument(fmt::format("layer width must be positive, got {}", width));
}

namespace {

std::vector<MlpParams::Layer> layout_layers(const MlpConfig& c) {
    c.validate();
    std::vector<MlpParams::Layer> layers;
    Eigen::Index offset = 0;
    int fan_in = c.input_dim;
    for (int l = 0; l <= c.hidden_layers; ++l) {
        const int fan_out = l == c.hidden_layers ? c.output_dim : c.width;
        const Eigen::Index w = offset;
        offset += static_cast<Eigen::Index>(fan_in) * fan_out;
        layers.push_back({fan_in, fan_out, w, offset});
        offset += fan_out;
        fan_in = fan_out;
    }
    return layers;
}

}  // namespace

Eigen::Index MlpParams::parameter_count(const MlpConfig& config) {
    const auto layers = layout_layers(config);
    return layers.back().bias_offset + layers.back().fan_out;
}

MlpParams::MlpParams(const MlpConfig& config)
    : config_(config), layers_(layout_layers(config)), values_(Vector::Zero(parameter_count(config))) {}

MlpParams::MlpParams(const MlpConfig& config, Vector values)
    : config_(config), layers_(layout_layers(config)), values_(std::move(values)) {
    if (values_.size() != parameter_count(config)) {
        throw std::invalid_argument(fmt::format("parameter vector has {} entries, network needs {}",
                                                values_.size(), parameter_count(config)));
    }
}

Eigen::Map<const Eigen::MatrixXd> MlpParams::weight(std::size_t layer) const {
    const auto& L = layers_.at(layer);
    return {values_.data() + L.weight_offset, L.fan_out, L.fan_in};
}

Eigen::Map<Eigen::MatrixXd> MlpParams::weight(std::size_t layer) {
    const auto& L = layers_.at(layer);
    return {values_.data() + L.weight_offset, L.fan_out, L.fan_in};
}

Eigen::Map<const Vector> MlpParams::bias(std::size_t layer) const {
    const auto& L = layers_.at(layer);
    return {values_.data() + L.bias_offset, L.fan_out};
}

Eigen::Map<Vector> MlpParams::bias(std::size_t layer) {
    const auto& L = layers_.at(layer);
    return {values_.data() + L.bias_offset, L.fan_out};
}

MlpParams init_params(const MlpConfig& config) {
    MlpParams params(config);
    std::mt19937_64 rng(config.seed);
    for (std::size_t l = 0; l < params.layers().size(); ++l) {
        const auto& L = params.layers()[l];
        const double bound = std::sqrt(6.0 / (L.fan_in + L.fan_out));
        std::uniform_real_distribution<double> dist(-bound, bound);
        auto w = params.weight(l);
        for (Eigen::Index c = 0; c < w.cols(); ++c) {
            for (Eigen::Index r = 0; r < w.rows(); ++r) w(r, c) = dist(rng);
        }
    }
    return params;
}

Outputs forward(const MlpParams& params, const Points& points, ForwardCache* cache) {
    const auto& layers = params.layers();
    if (points.rows() != params.config().input_dim) {
        throw std::invalid_argument("forward: point dimension does not match network input");
    }
    Eigen::MatrixXd a = points;
    if (cache) {
        cache->activations.clear();
        cache->activations.reserve(layers.size());
        cache->activations.push_back(a);
    }
    for (std::size_t l = 0; l + 1 < layers.size(); ++l) {
        Eigen::MatrixXd z = params.weight(l) * a;
        z.colwise() += params.bias(l);
        a = z.array().tanh().matrix();
        if (cache) cache->activations.push_back(a);
    }
    Outputs out = params.weight(layers.size() - 1) * a;
    out.colwise() += params.bias(layers.size() - 1);
    return out;
}

Vector backward(const MlpParams& params, const ForwardCache& cache, const Outputs& cotangent) {
    const auto& layers = params.layers();
    if (cache.activations.size() != layers.size()) {
        throw std::invalid_argument("backward: cache does not belong to this network");
    }
    const Eigen::Index n_points = cache.activations.front().cols();
    if (cotangent.rows() != params.config().output_dim || cotangent.cols() != n_points) {
        throw std::invalid_argument(fmt::format(
            "backward: cotangent is {}x{}, expected {}x{}", cotangent.rows(), cotangent.cols(),
            params.config().output_dim, n_points));
    }
    Vector grad = Vector::Zero(params.size());
    Eigen::MatrixXd delta = cotangent;
    for (std::size_t l = layers.size(); l-- > 0;) {
        const auto& L = layers[l];
        const Eigen::MatrixXd& input = cache.activations[l];
        Eigen::Map<Eigen::MatrixXd>(grad.data() + L.weight_offset, L.fan_out, L.fan_in).noalias() =
            delta * input.transpose();
        grad.segment(L.bias_offset, L.fan_out) = delta.rowwise().sum();
        if (l == 0) break;
        Eigen::MatrixXd upstream = params.weight(l).transpose() * delta;
        delta = (upstream.array() * (1.0 - input.array().square())).matrix();
    }
    return grad;
}

Vector backward(const MlpParams& params, const Points& points, const Outputs& cotangent) {
    ForwardCache cache;
    forward(params, points, &cache);
    return backward(params, cache, cotangent);
}

Points grid_points(const GridSpec& spec) {
    Points p(2, static_cast<Eigen::Index>(spec.size()));
    const int n = spec.n();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            const auto k = static_cast<Eigen::Index>(spec.index(i, j));
            p(0, k) = spec.coord(i);
            p(1, k) = spec.coord(j);
        }
    }
    return p;
}

GridFunction bubble_cutoff(const GridSpec& spec) {
    return sample_cutoff(spec, [](double x, double y) { return 16.0 * x * (1.0 - x) * y * (1.0 - y); });
}

GridFunction sample_cutoff(const GridSpec& spec, const std::function<double(double, double)>& f) {
    GridFunction c = GridFunction::sample(spec, f);
    const int n = spec.n();
    // exact zeros on the boundary regardless of rounding in f
    for (int k = 0; k <= n; ++k) {
        for (auto [i, j] : {std::pair{0, k}, std::pair{n, k}, std::pair{k, 0}, std::pair{k, n}}) {
            if (std::abs(c(i, j)) < 1e-15) c(i, j) = 0.0;
        }
    }
    return c;
}

GridFunction coons_lift(const GridSpec& spec, const std::function<double(double, double)>& g) {
    const double g00 = g(0, 0), g10 = g(1, 0), g01 = g(0, 1), g11 = g(1, 1);
    GridFunction lift = GridFunction::sample(spec, [&](double x, double y) {
        const double edges = (1 - x) * g(0, y) + x * g(1, y) + (1 - y) * g(x, 0) + y * g(x, 1);
        const double corners =
            (1 - x) * (1 - y) * g00 + x * (1 - y) * g10 + (1 - x) * y * g01 + x * y * g11;
        return edges - corners;
    });
    const int n = spec.n();
    // boundary values taken verbatim so the data is matched bit for bit
    for (int k = 0; k <= n; ++k) {
        const double t = spec.coord(k);
        lift(0, k) = g(0, t);
        lift(n, k) = g(1, t);
        lift(k, 0) = g(t, 0);
        lift(k, n) = g(t, 1);
    }
    return lift;
}

GridFunction edge_max_lift(const GridSpec& spec, const std::function<double(double, double)>& g) {
    return GridFunction::sample(spec, [&](double x, double y) {
        const double ramp = std::max({1.0 - x, x, 1.0 - y, y});
        return ramp * g(x, y);
    });
}

std::vector<GridFunction> apply_boundary(const Outputs& raw, const BoundaryTreatment& treatment) {
    std::vector<GridFunction> fields;
    fields.reserve(treatment.field_count());
    for (std::size_t f = 0; f < treatment.field_count(); ++f) {
        const auto& t = treatment.fields[f];
        const int o = treatment.output_index[f];
        if (o < 0 || o >= raw.rows() || raw.cols() != static_cast<Eigen::Index>(t.cutoff.size())) {
            throw std::invalid_argument("apply_boundary: network output does not match the treatment");
        }
        GridFunction u = t.lift;
        auto uv = u.values();
        auto cv = t.cutoff.values();
        for (std::size_t k = 0; k < uv.size(); ++k) {
            uv[k] += raw(o, static_cast<Eigen::Index>(k)) * cv[k];
        }
        fields.push_back(std::move(u));
    }
    return fields;
}

std::vector<GridFunction> apply_boundary(std::span<const GridFunction> raw,
                                         const BoundaryTreatment& treatment) {
    if (raw.size() != treatment.field_count()) {
        throw std::invalid_argument("apply_boundary: one raw grid function per field expected");
    }
    std::vector<GridFunction> fields;
    fields.reserve(raw.size());
    for (std::size_t f = 0; f < raw.size(); ++f) {
        fields.push_back(hadamard(raw[f], treatment.fields[f].cutoff) + treatment.fields[f].lift);
    }
    return fields;
}

Outputs boundary_cotangent(std::span<const GridFunction> field_cotangent,
                           const BoundaryTreatment& treatment, int output_dim) {
    if (field_cotangent.size() != treatment.field_count()) {
        throw std::invalid_argument("boundary_cotangent: one cotangent per field expected");
    }
    const auto points = static_cast<Eigen::Index>(treatment.fields.front().cutoff.size());
    Outputs out = Outputs::Zero(output_dim, points);
    for (std::size_t f = 0; f < field_cotangent.size(); ++f) {
        const int o = treatment.output_index[f];
        auto cv = treatment.fields[f].cutoff.values();
        auto gv = field_cotangent[f].values();
        for (Eigen::Index k = 0; k < points; ++k) {
            out(o, k) += gv[static_cast<std::size_t>(k)] * cv[static_cast<std::size_t>(k)];
        }
    }
    return out;
}

void save_checkpoint(const std::filesystem::path& path, const MlpParams& params, long iteration) {
    const auto& c = params.config();
    nlohmann::json header = {
        {"format", "crvpinn-checkpoint"},
        {"version", 1},
        {"input_dim", c.input_dim},
        {"output_dim", c.output_dim},
        {"hidden_layers", c.hidden_layers},
        {"width", c.width},
        {"seed", c.seed},
        {"iteration", iteration},
        {"num_params", params.size()},
    };
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << header.dump() << '\n';
    for (double v : params.values()) {
        const auto bits = std::bit_cast<std::uint64_t>(v);
        char bytes[8];
        for (int b = 0; b < 8; ++b) bytes[b] = static_cast<char>((bits >> (8 * b)) & 0xffu);
        out.write(bytes, 8);
    }
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    std::string line;
    std::getline(in, line);
    nlohmann::json header;
    try {
        header = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("bad checkpoint header in " + path.string() + ": " + e.what());
    }
    if (header.value("format", "") != "crvpinn-checkpoint") {
        throw std::runtime_error(path.string() + " is not a checkpoint");
    }
    MlpConfig c;
    c.input_dim = header.at("input_dim").get<int>();
    c.output_dim = header.at("output_dim").get<int>();
    c.hidden_layers = header.at("hidden_layers").get<int>();
    c.width = header.at("width").get<int>();
    c.seed = header.at("seed").get<std::uint64_t>();
    const auto count = header.at("num_params").get<Eigen::Index>();
    if (count != MlpParams::parameter_count(c)) {
        throw std::runtime_error("checkpoint parameter count does not match its architecture");
    }
    Vector values(count);
    for (Eigen::Index k = 0; k < count; ++k) {
        unsigned char bytes[8];
        if (!in.read(reinterpret_cast<char*>(bytes), 8)) {
            throw std::runtime_error("truncated checkpoint " + path.string());
        }
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
        values[k] = std::bit_cast<double>(bits);
    }
    return {MlpParams(c, std::move(values)), header.at("iteration").get<long>()};
}

}  // namespace crvpinn
