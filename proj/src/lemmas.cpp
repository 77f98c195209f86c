#include "crvpinn/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace crvpinn {

GridFunction random_interior_function(const GridSpec& spec, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    GridFunction u(spec);
    for (int i = 1; i < spec.n(); ++i) {
        for (int j = 1; j < spec.n(); ++j) u(i, j) = dist(rng);
    }
    return u;
}

namespace {

struct Tracker {
    LemmaResult result;

    void observe(double violation, std::uint64_t seed) {
        result.worst = std::max(result.worst, violation);
        if (violation > 1.0 && result.passed) {
            result.passed = false;
            result.witness_seed = seed;
        }
    }
};

}  // namespace

std::vector<LemmaResult> check_lemmas(int n, const LemmaOptions& options) {
    const GridSpec spec(n);
    const double h = spec.h();
    auto dxb = [&](const GridFunction& u) {
        return options.inject_bug ? -1.0 * dx_backward(u) : dx_backward(u);
    };

    Tracker ibp_x{{"integration-by-parts-x", n, options.trials}};
    Tracker ibp_y{{"integration-by-parts-y", n, options.trials}};
    Tracker product{{"product-rule", n, options.trials}};
    Tracker equiv{{"norm-equivalence", n, options.trials}};

    const double tol = 1e-12;
    const double c_low = h / (2.0 * std::numbers::sqrt2);
    for (int t = 0; t < options.trials; ++t) {
        const std::uint64_t su = options.seed + 2 * static_cast<std::uint64_t>(t);
        const GridFunction u = random_interior_function(spec, su);
        const GridFunction v = random_interior_function(spec, su + 1);

        {
            const GridFunction fu = dx_forward(u), bv = dxb(v);
            const double lhs = inner_h(fu, v) + inner_h(u, bv);
            const double scale = norm_h(fu) * norm_h(v) + norm_h(u) * norm_h(bv);
            ibp_x.observe(std::abs(lhs) / (tol * scale), su);
        }
        {
            const GridFunction fu = dy_forward(u), bv = dy_backward(v);
            const double lhs = inner_h(fu, v) + inner_h(u, bv);
            const double scale = norm_h(fu) * norm_h(v) + norm_h(u) * norm_h(bv);
            ibp_y.observe(std::abs(lhs) / (tol * scale), su);
        }
        {
            const GridFunction d_uv = dx_forward(hadamard(u, v));
            const GridFunction du = dx_forward(u), dv = dx_forward(v);
            double worst = 0.0;
            for (int i = 0; i < n; ++i) {
                for (int j = 0; j <= n; ++j) {
                    const double rhs = u(i + 1, j) * dv(i, j) + du(i, j) * v(i, j);
                    const double scale = std::abs(u(i + 1, j) * dv(i, j)) + std::abs(du(i, j) * v(i, j)) +
                                         std::abs(d_uv(i, j)) + 1.0 / h;
                    worst = std::max(worst, std::abs(d_uv(i, j) - rhs) / (tol * scale));
                }
            }
            product.observe(worst, su);
        }
        {
            const double l2 = norm_h(u), grad = norm_grad_h(u);
            // both ratios must be <= 1 (up to rounding)
            const double low = (c_low * grad - l2) / (1e-12 * grad) + 1.0;
            const double high = (l2 - 2.0 * grad) / (1e-12 * grad) + 1.0;
            equiv.observe(std::max({low, high, 0.0}), su);
        }
    }
    return {ibp_x.result, ibp_y.result, product.result, equiv.result};
}

}  // namespace crvpinn
