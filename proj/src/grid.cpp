#include "crvpinn/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace crvpinn {

GridSpec::GridSpec(int n) : n_(n), h_(0.0) {
    if (n < 2) {
        throw std::invalid_argument("grid needs at least 2 subdivisions, got " + std::to_string(n));
    }
    h_ = 1.0 / n;
}

GridFunction::GridFunction(GridSpec spec) : spec_(spec), values_(spec.size(), 0.0) {}

GridFunction::GridFunction(GridSpec spec, std::vector<double> values)
    : spec_(spec), values_(std::move(values)) {
    if (values_.size() != spec_.size()) {
        throw std::invalid_argument("grid function length " + std::to_string(values_.size()) +
                                    " does not match grid size " + std::to_string(spec_.size()));
    }
}

GridFunction GridFunction::constant(GridSpec spec, double value) {
    return GridFunction(spec, std::vector<double>(spec.size(), value));
}

GridFunction GridFunction::delta(GridSpec spec, int i, int j) {
    if (!spec.contains(i, j)) {
        throw std::out_of_range("delta index outside the grid");
    }
    GridFunction u(spec);
    u(i, j) = 1.0;
    return u;
}

GridFunction GridFunction::sample(GridSpec spec, const std::function<double(double, double)>& f) {
    GridFunction u(spec);
    const int n = spec.n();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            u(i, j) = f(spec.coord(i), spec.coord(j));
        }
    }
    return u;
}

bool GridFunction::vanishes_on_boundary() const noexcept {
    const int n = spec_.n();
    for (int k = 0; k <= n; ++k) {
        if ((*this)(0, k) != 0.0 || (*this)(n, k) != 0.0 || (*this)(k, 0) != 0.0 ||
            (*this)(k, n) != 0.0) {
            return false;
        }
    }
    return true;
}

double GridFunction::max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
}

namespace {

void require_same_grid(const GridFunction& a, const GridFunction& b) {
    if (!(a.spec() == b.spec())) {
        throw std::invalid_argument("grid functions live on different grids (n=" +
                                    std::to_string(a.spec().n()) + " vs n=" +
                                    std::to_string(b.spec().n()) + ")");
    }
}

void require_interior(const GridFunction& u, const char* what) {
    if (!u.vanishes_on_boundary()) {
        throw std::invalid_argument(std::string(what) + ": argument must vanish on the boundary");
    }
}

}  // namespace

GridFunction& GridFunction::operator+=(const GridFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
    return *this;
}

GridFunction& GridFunction::operator-=(const GridFunction& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
    return *this;
}

GridFunction& GridFunction::operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return *this;
}

GridFunction operator+(GridFunction a, const GridFunction& b) { return a += b; }
GridFunction operator-(GridFunction a, const GridFunction& b) { return a -= b; }
GridFunction operator*(double s, GridFunction a) { return a *= s; }

GridFunction hadamard(const GridFunction& a, const GridFunction& b) {
    require_same_grid(a, b);
    GridFunction out(a.spec());
    auto av = a.values();
    auto bv = b.values();
    auto ov = out.values();
    for (std::size_t k = 0; k < ov.size(); ++k) ov[k] = av[k] * bv[k];
    return out;
}

GridFunction dx_forward(const GridFunction& u) {
    const auto& spec = u.spec();
    const int n = spec.n();
    const double inv_h = 1.0 / spec.h();
    GridFunction out(spec);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= n; ++j) out(i, j) = (u(i + 1, j) - u(i, j)) * inv_h;
    }
    return out;
}

GridFunction dy_forward(const GridFunction& u) {
    const auto& spec = u.spec();
    const int n = spec.n();
    const double inv_h = 1.0 / spec.h();
    GridFunction out(spec);
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j < n; ++j) out(i, j) = (u(i, j + 1) - u(i, j)) * inv_h;
    }
    return out;
}

GridFunction dx_backward(const GridFunction& u) {
    const auto& spec = u.spec();
    const int n = spec.n();
    const double inv_h = 1.0 / spec.h();
    GridFunction out(spec);
    for (int i = 1; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) out(i, j) = (u(i, j) - u(i - 1, j)) * inv_h;
    }
    return out;
}

GridFunction dy_backward(const GridFunction& u) {
    const auto& spec = u.spec();
    const int n = spec.n();
    const double inv_h = 1.0 / spec.h();
    GridFunction out(spec);
    for (int i = 0; i <= n; ++i) {
        for (int j = 1; j <= n; ++j) out(i, j) = (u(i, j) - u(i, j - 1)) * inv_h;
    }
    return out;
}

Gradient grad_forward(const GridFunction& u) { return {dx_forward(u), dy_forward(u)}; }
Gradient grad_backward(const GridFunction& u) { return {dx_backward(u), dy_backward(u)}; }

double inner_h(const GridFunction& u, const GridFunction& v) {
    require_same_grid(u, v);
    auto uv = u.values();
    auto vv = v.values();
    double sum = 0.0;
    for (std::size_t k = 0; k < uv.size(); ++k) sum += uv[k] * vv[k];
    const double h = u.spec().h();
    return h * h * sum;
}

double norm_h(const GridFunction& u) { return std::sqrt(inner_h(u, u)); }

double inner_grad_h(const GridFunction& u, const GridFunction& v, Difference which) {
    require_same_grid(u, v);
    require_interior(u, "inner_grad_h");
    require_interior(v, "inner_grad_h");
    const Gradient gu = which == Difference::forward ? grad_forward(u) : grad_backward(u);
    const Gradient gv = which == Difference::forward ? grad_forward(v) : grad_backward(v);
    return inner_h(gu.x, gv.x) + inner_h(gu.y, gv.y);
}

double norm_grad_h(const GridFunction& u) { return std::sqrt(inner_grad_h(u, u)); }

GridFunction laplacian_h(const GridFunction& u) {
    const auto& spec = u.spec();
    const int n = spec.n();
    const double inv_h2 = 1.0 / (spec.h() * spec.h());
    GridFunction out(spec);
    for (int i = 1; i < n; ++i) {
        for (int j = 1; j < n; ++j) {
            out(i, j) = (u(i + 1, j) - 2.0 * u(i, j) + u(i - 1, j)) * inv_h2 +
                        (u(i, j + 1) - 2.0 * u(i, j) + u(i, j - 1)) * inv_h2;
        }
    }
    return out;
}

GridFunction translate_x(const GridFunction& u) {
    require_interior(u, "translate_x");
    const auto& spec = u.spec();
    const int n = spec.n();
    GridFunction out(spec);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j <= n; ++j) out(i, j) = u(i + 1, j);
    }
    return out;
}

DofSet::DofSet(GridSpec spec, const std::function<bool(int, int)>& include)
    : spec_(spec), lookup_(spec.size(), -1) {
    const int n = spec.n();
    for (int i = 0; i <= n; ++i) {
        for (int j = 0; j <= n; ++j) {
            if (include(i, j)) {
                lookup_[spec.index(i, j)] = static_cast<long>(points_.size());
                points_.emplace_back(i, j);
            }
        }
    }
}

DofSet DofSet::all(GridSpec spec) {
    return DofSet(spec, [](int, int) { return true; });
}

DofSet DofSet::interior(GridSpec spec) {
    return DofSet(spec, [spec](int i, int j) { return !spec.on_boundary(i, j); });
}

Vector DofSet::gather(const GridFunction& u) const {
    if (!(u.spec() == spec_)) throw std::invalid_argument("gather: grid mismatch");
    Vector out(static_cast<Eigen::Index>(points_.size()));
    for (std::size_t k = 0; k < points_.size(); ++k) {
        out[static_cast<Eigen::Index>(k)] = u(points_[k].first, points_[k].second);
    }
    return out;
}

GridFunction DofSet::scatter(const Vector& coefficients) const {
    if (static_cast<std::size_t>(coefficients.size()) != points_.size()) {
        throw std::invalid_argument("scatter: expected " + std::to_string(points_.size()) +
                                    " coefficients, got " + std::to_string(coefficients.size()));
    }
    GridFunction out(spec_);
    for (std::size_t k = 0; k < points_.size(); ++k) {
        out(points_[k].first, points_[k].second) = coefficients[static_cast<Eigen::Index>(k)];
    }
    return out;
}

}  // namespace crvpinn
