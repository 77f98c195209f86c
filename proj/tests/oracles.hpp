#pragma once

// Independent reference computations for the test suites. Everything here is
// built from grid-level difference functions or dense linear algebra, never
// from the library's sparse assembly.

#include <cmath>
#include <functional>
#include <string>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "crvpinn/grid.hpp"
#include "crvpinn/problems.hpp"

namespace oracle {

using crvpinn::DofSet;
using crvpinn::GridFunction;
using crvpinn::GridSpec;
using Dense = Eigen::MatrixXd;

inline double weight(const GridSpec& spec, bool weighted) { return weighted ? spec.h() * spec.h() : 1.0; }

inline double grid_sum(const GridFunction& a, const GridFunction& b) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a.values()[k] * b.values()[k];
    return s;
}

/// G_kl = w sum_p eps(p) grad_+ delta_k . grad_+ delta_l over interior deltas.
inline Dense diffusion_gram(const GridSpec& spec, const GridFunction& eps, bool weighted) {
    const DofSet dofs = DofSet::interior(spec);
    const auto m = static_cast<Eigen::Index>(dofs.size());
    std::vector<crvpinn::Gradient> plain;
    for (const auto& [i, j] : dofs.points()) plain.push_back(crvpinn::grad_forward(GridFunction::delta(spec, i, j)));
    Dense g(m, m);
    for (Eigen::Index k = 0; k < m; ++k) {
        for (Eigen::Index l = 0; l < m; ++l) {
            const auto& a = plain[static_cast<std::size_t>(k)];
            const auto& b = plain[static_cast<std::size_t>(l)];
            g(k, l) = weight(spec, weighted) *
                      (grid_sum(crvpinn::hadamard(eps, a.x), b.x) + grid_sum(crvpinn::hadamard(eps, a.y), b.y));
        }
    }
    return g;
}

inline Dense laplace_gram(const GridSpec& spec, bool weighted) {
    return diffusion_gram(spec, GridFunction::constant(spec, 1.0), weighted);
}

/// DOF sets of the first-order Stokes layout, in field order.
inline std::vector<DofSet> stokes_dofs(const GridSpec& spec) {
    const int n = spec.n();
    auto sx = [](int i, int) { return i >= 1; };
    auto sy = [](int, int j) { return j >= 1; };
    auto in = [n](int i, int j) { return i >= 1 && j >= 1 && i < n && j < n; };
    auto pr = [n](int i, int j) { return i >= 1 && j >= 1 && !(i == n && j == n); };
    return {DofSet(spec, sx), DofSet(spec, sy), DofSet(spec, sx), DofSet(spec, sy),
            DofSet(spec, in), DofSet(spec, in), DofSet(spec, pr)};
}

/// Pointwise first-order Stokes operator built by applying grid differences
/// to delta trial functions. Rows: tau_ab on sigma_ab DOFs, v_a on u DOFs,
/// q on p DOFs; columns in the same layout.
inline Dense stokes_operator(const GridSpec& spec) {
    using namespace crvpinn;
    const auto sets = stokes_dofs(spec);
    std::vector<int> off{0};
    for (const auto& s : sets) off.push_back(off.back() + static_cast<int>(s.size()));
    const int total = off.back();
    Dense a = Dense::Zero(total, total);
    for (int f = 0; f < 7; ++f) {
        for (std::size_t k = 0; k < sets[f].size(); ++k) {
            std::vector<GridFunction> fld(7, GridFunction(spec));
            const auto [pi, pj] = sets[f][k];
            fld[f] = GridFunction::delta(spec, pi, pj);
            const auto& s11 = fld[0];
            const auto& s12 = fld[1];
            const auto& s21 = fld[2];
            const auto& s22 = fld[3];
            const auto& u1 = fld[4];
            const auto& u2 = fld[5];
            const auto& p = fld[6];
            const GridFunction rows[7] = {
                s11 - dx_backward(u1),
                s12 - dy_backward(u1),
                s21 - dx_backward(u2),
                s22 - dy_backward(u2),
                -1.0 * dx_forward(s11) - dy_forward(s12) + dx_forward(p),
                -1.0 * dx_forward(s21) - dy_forward(s22) + dy_forward(p),
                dx_backward(u1) + dy_backward(u2),
            };
            const int col = off[f] + static_cast<int>(k);
            for (int r = 0; r < 7; ++r) {
                for (std::size_t m = 0; m < sets[r].size(); ++m) {
                    const auto [i, j] = sets[r][m];
                    a(off[r] + static_cast<int>(m), col) = rows[r](i, j);
                }
            }
        }
    }
    return a;
}

/// Graph-norm Gram of the adjoint: A A^T + I (unweighted).
inline Dense stokes_gram(const GridSpec& spec) {
    const Dense a = stokes_operator(spec);
    return a * a.transpose() + Dense::Identity(a.rows(), a.cols());
}

/// res^T G^{-1} res with a dense full-pivot LU.
inline double dense_loss(const Dense& g, const Eigen::VectorXd& res) {
    return res.dot(g.fullPivLu().solve(res));
}

/// Eighth-order central second derivative along one axis.
inline double d2(const std::function<double(double, double)>& f, double x, double y, int axis, double h = 2e-3) {
    static constexpr double c[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};
    double s = c[0] * f(x, y);
    for (int k = 1; k <= 4; ++k) {
        const double dx = axis == 0 ? k * h : 0.0, dy = axis == 1 ? k * h : 0.0;
        s += c[k] * (f(x + dx, y + dy) + f(x - dx, y - dy));
    }
    return s / (h * h);
}

/// Eighth-order central first derivative along one axis.
inline double d1(const std::function<double(double, double)>& f, double x, double y, int axis, double h = 2e-3) {
    static constexpr double c[5] = {0.0, 4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
    double s = 0.0;
    for (int k = 1; k <= 4; ++k) {
        const double dx = axis == 0 ? k * h : 0.0, dy = axis == 1 ? k * h : 0.0;
        s += c[k] * (f(x + dx, y + dy) - f(x - dx, y - dy));
    }
    return s / h;
}

/// Central-difference gradient of a scalar function of a vector.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, Eigen::VectorXd x,
                                   double step) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double keep = x[k];
        x[k] = keep + step;
        const double fp = f(x);
        x[k] = keep - step;
        const double fm = f(x);
        x[k] = keep;
        g[k] = (fp - fm) / (2.0 * step);
    }
    return g;
}

inline Eigen::VectorXd random_vector(Eigen::Index n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> dist;
    Eigen::VectorXd v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

inline std::function<double(double, double)> component(const std::string& name, int f) {
    return [name, f](double x, double y) { return crvpinn::exact_solution(name, x, y)[static_cast<std::size_t>(f)]; };
}

/// Largest relative PDE defect of (exact, forcing) over random interior
/// points, derivatives by finite differences of the exact solution only.
inline double manufactured_defect(const std::string& name, int points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(0.02, 0.98);
    // the jump layer has width 1/100, so the difference step shrinks with it
    const double step = name == "poisson-jump" ? 2e-4 : 2e-3;
    const auto d1 = [step](const auto& f, double x, double y, int axis) { return oracle::d1(f, x, y, axis, step); };
    const auto d2 = [step](const auto& f, double x, double y, int axis) { return oracle::d2(f, x, y, axis, step); };
    double worst = 0.0;
    for (int k = 0; k < points; ++k) {
        const double x = d(rng), y = d(rng);
        const auto f = crvpinn::forcing(name, x, y);
        if (name == "stokes") {
            const auto p = component(name, 6);
            for (int a = 0; a < 2; ++a) {
                const auto u = component(name, 4 + a);
                const double lap = d2(u, x, y, 0) + d2(u, x, y, 1);
                const double gp = d1(p, x, y, a);
                const double scale = std::abs(lap) + std::abs(gp) + std::abs(f[static_cast<std::size_t>(a)]);
                worst = std::max(worst, std::abs(-lap + gp - f[static_cast<std::size_t>(a)]) / scale);
            }
            continue;
        }
        const auto u = component(name, 0);
        const double uxx = d2(u, x, y, 0), uyy = d2(u, x, y, 1);
        double lhs = 0.0, scale = 0.0;
        if (name == "laplace-sinsin" || name == "laplace-expsin") {
            lhs = -(uxx + uyy);
            scale = std::abs(uxx) + std::abs(uyy);
        } else if (name == "poisson-jump") {
            lhs = uxx + uyy;
            scale = std::abs(uxx) + std::abs(uyy);
        } else if (name == "poisson-vardiff") {
            const double e = crvpinn::vardiff_eps(y), uy = d1(u, x, y, 1);
            const double de = d1([](double, double t) { return crvpinn::vardiff_eps(t); }, x, y, 1);
            lhs = e * (uxx + uyy) + de * uy;
            scale = std::abs(e * uxx) + std::abs(e * uyy) + std::abs(de * uy);
        } else {
            const double ux = d1(u, x, y, 0);
            lhs = -0.1 * (uxx + uyy) + ux;
            scale = 0.1 * (std::abs(uxx) + std::abs(uyy)) + std::abs(ux);
        }
        worst = std::max(worst, std::abs(lhs - f[0]) / std::max(scale, 1e-300));
    }
    return worst;
}


/// Largest |div u| relative to |d1 u1| + |d2 u2| for the exact Stokes velocity.
inline double stokes_divergence_defect(int points, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(0.02, 0.98);
    const auto u1 = component("stokes", 4), u2 = component("stokes", 5);
    double worst = 0.0;
    for (int k = 0; k < points; ++k) {
        const double x = d(rng), y = d(rng);
        const double a = d1(u1, x, y, 0), b = d1(u2, x, y, 1);
        worst = std::max(worst, std::abs(a + b) / (std::abs(a) + std::abs(b) + 1e-300));
    }
    return worst;
}

/// L^{-1} B L^{-T} with K = L L^T.
inline Dense normalized_form(const Dense& b, const Dense& k) {
    const Dense l = Eigen::LLT<Dense>(k).matrixL();
    const auto tl = l.triangularView<Eigen::Lower>();
    return tl.solve(tl.solve(b.transpose()).transpose());
}

/// Smallest singular value of the normalized form: the inf-sup constant of
/// the bilinear form with matrix B in the norm with Gram K.
inline double discrete_infsup(const Dense& b, const Dense& k) {
    return Eigen::BDCSVD<Dense>(normalized_form(b, k)).singularValues().minCoeff();
}

/// Largest singular value of the normalized form: the continuity constant.
inline double discrete_continuity(const Dense& b, const Dense& k) {
    return Eigen::BDCSVD<Dense>(normalized_form(b, k)).singularValues().maxCoeff();
}

/// Smallest eigenvalue of the symmetric part of the normalized form.
inline double discrete_coercivity(const Dense& b, const Dense& k) {
    const Dense m = normalized_form(b, k);
    const Dense s = 0.5 * (m + m.transpose());
    return Eigen::SelfAdjointEigenSolver<Dense>(s).eigenvalues().minCoeff();
}

}  // namespace oracle
