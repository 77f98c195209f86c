#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace crvpinn {

using Vector = Eigen::VectorXd;

/// Uniform collocation grid on the unit square, `n` subdivisions per axis.
///
/// Points are x_{i,j} = (i h, j h) for 0 <= i, j <= n. Every array in the
/// library that lives on the grid is stored row-major by (i, j): i is the
/// outer index (x1 direction), j the inner one (x2 direction).
class GridSpec {
public:
    explicit GridSpec(int n);

    int n() const noexcept { return n_; }
    double h() const noexcept { return h_; }
    int points_per_axis() const noexcept { return n_ + 1; }
    std::size_t size() const noexcept {
        return static_cast<std::size_t>(n_ + 1) * static_cast<std::size_t>(n_ + 1);
    }
    std::size_t index(int i, int j) const noexcept {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1) +
               static_cast<std::size_t>(j);
    }
    double coord(int i) const noexcept { return i * h_; }
    bool contains(int i, int j) const noexcept { return i >= 0 && j >= 0 && i <= n_ && j <= n_; }
    bool on_boundary(int i, int j) const noexcept { return i == 0 || j == 0 || i == n_ || j == n_; }

    bool operator==(const GridSpec& other) const noexcept { return n_ == other.n_; }

private:
    int n_;
    double h_;
};

/// Real values on every collocation point of a grid.
class GridFunction {
public:
    explicit GridFunction(GridSpec spec);
    GridFunction(GridSpec spec, std::vector<double> values);

    static GridFunction zeros(GridSpec spec) { return GridFunction(spec); }
    static GridFunction constant(GridSpec spec, double value);
    /// Kronecker delta at (i, j).
    static GridFunction delta(GridSpec spec, int i, int j);
    static GridFunction sample(GridSpec spec, const std::function<double(double, double)>& f);

    const GridSpec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return values_.size(); }

    double& operator()(int i, int j) noexcept { return values_[spec_.index(i, j)]; }
    double operator()(int i, int j) const noexcept { return values_[spec_.index(i, j)]; }

    std::span<double> values() noexcept { return values_; }
    std::span<const double> values() const noexcept { return values_; }
    Eigen::Map<const Vector> as_vector() const noexcept {
        return {values_.data(), static_cast<Eigen::Index>(values_.size())};
    }

    /// True when the function is a member of D_{0,h}: exactly zero on the boundary.
    bool vanishes_on_boundary() const noexcept;
    double max_abs() const noexcept;

    GridFunction& operator+=(const GridFunction& other);
    GridFunction& operator-=(const GridFunction& other);
    GridFunction& operator*=(double s) noexcept;

private:
    GridSpec spec_;
    std::vector<double> values_;
};

GridFunction operator+(GridFunction a, const GridFunction& b);
GridFunction operator-(GridFunction a, const GridFunction& b);
GridFunction operator*(double s, GridFunction a);
/// Pointwise product.
GridFunction hadamard(const GridFunction& a, const GridFunction& b);

/// Pair of directional differences. Entries outside the stencil's range
/// (i = n for x-forward, j = n for y-forward, i = 0 / j = 0 for the backward
/// variants) are invalid and stored as 0, so plain sums over the grid only
/// see valid entries.
struct Gradient {
    GridFunction x;
    GridFunction y;
};

enum class Difference { forward, backward };

GridFunction dx_forward(const GridFunction& u);
GridFunction dy_forward(const GridFunction& u);
GridFunction dx_backward(const GridFunction& u);
GridFunction dy_backward(const GridFunction& u);

Gradient grad_forward(const GridFunction& u);
Gradient grad_backward(const GridFunction& u);

/// (u, v)_h = h^2 sum_p u(p) v(p).
double inner_h(const GridFunction& u, const GridFunction& v);
double norm_h(const GridFunction& u);

/// (u, v)_{grad,h}; both arguments must vanish on the boundary, otherwise the
/// forward and backward forms disagree and std::invalid_argument is thrown.
double inner_grad_h(const GridFunction& u, const GridFunction& v,
                    Difference which = Difference::forward);
double norm_grad_h(const GridFunction& u);

/// 5-point Laplacian at interior points, 0 on the boundary.
GridFunction laplacian_h(const GridFunction& u);

/// (tau_x u)_{i,j} = u_{i+1,j}, 0 on the last column. Requires u in D_{0,h}.
GridFunction translate_x(const GridFunction& u);

/// Ordered set of grid indices acting as degrees of freedom.
///
/// Ordering is lexicographic (i outer, j inner) and fixed; every matrix and
/// residual built over a DofSet uses the same positions.
class DofSet {
public:
    DofSet(GridSpec spec, const std::function<bool(int, int)>& include);

    static DofSet all(GridSpec spec);
    static DofSet interior(GridSpec spec);

    const GridSpec& spec() const noexcept { return spec_; }
    std::size_t size() const noexcept { return points_.size(); }
    const std::pair<int, int>& operator[](std::size_t k) const noexcept { return points_[k]; }
    const std::vector<std::pair<int, int>>& points() const noexcept { return points_; }

    /// Position of (i, j) in the ordering, or -1 when it is not a DOF.
    long position(int i, int j) const noexcept {
        return spec_.contains(i, j) ? lookup_[spec_.index(i, j)] : -1;
    }
    bool contains(int i, int j) const noexcept { return position(i, j) >= 0; }

    Vector gather(const GridFunction& u) const;
    /// Values on the DOFs, zero elsewhere.
    GridFunction scatter(const Vector& coefficients) const;

    bool operator==(const DofSet& other) const noexcept { return points_ == other.points_; }

private:
    GridSpec spec_;
    std::vector<std::pair<int, int>> points_;
    std::vector<long> lookup_;
};

}  // namespace crvpinn
