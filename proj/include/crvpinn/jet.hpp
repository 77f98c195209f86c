#pragma once

#include <cmath>

namespace crvpinn {

/// Second-order forward-mode jet in two variables. Carries a value together
/// with its gradient and Hessian so that manufactured forcing terms can be
/// derived from exact solutions without transcribing formulas by hand.
struct Jet2 {
    double v = 0.0;
    double dx = 0.0, dy = 0.0;
    double dxx = 0.0, dxy = 0.0, dyy = 0.0;

    constexpr Jet2() = default;
    constexpr Jet2(double value) : v(value) {}  // NOLINT: implicit from constants
    constexpr Jet2(double value, double gx, double gy, double hxx, double hxy, double hyy)
        : v(value), dx(gx), dy(gy), dxx(hxx), dxy(hxy), dyy(hyy) {}

    static constexpr Jet2 x(double at) { return {at, 1.0, 0.0, 0.0, 0.0, 0.0}; }
    static constexpr Jet2 y(double at) { return {at, 0.0, 1.0, 0.0, 0.0, 0.0}; }

    double laplacian() const noexcept { return dxx + dyy; }
};

/// Chain rule for a scalar function with f(v), f'(v), f''(v).
inline Jet2 chain(const Jet2& a, double f, double f1, double f2) {
    return {f,
            f1 * a.dx,
            f1 * a.dy,
            f1 * a.dxx + f2 * a.dx * a.dx,
            f1 * a.dxy + f2 * a.dx * a.dy,
            f1 * a.dyy + f2 * a.dy * a.dy};
}

inline Jet2 operator+(const Jet2& a, const Jet2& b) {
    return {a.v + b.v, a.dx + b.dx, a.dy + b.dy, a.dxx + b.dxx, a.dxy + b.dxy, a.dyy + b.dyy};
}
inline Jet2 operator-(const Jet2& a, const Jet2& b) {
    return {a.v - b.v, a.dx - b.dx, a.dy - b.dy, a.dxx - b.dxx, a.dxy - b.dxy, a.dyy - b.dyy};
}
inline Jet2 operator-(const Jet2& a) { return {-a.v, -a.dx, -a.dy, -a.dxx, -a.dxy, -a.dyy}; }
inline Jet2 operator*(const Jet2& a, const Jet2& b) {
    return {a.v * b.v,
            a.dx * b.v + a.v * b.dx,
            a.dy * b.v + a.v * b.dy,
            a.dxx * b.v + 2.0 * a.dx * b.dx + a.v * b.dxx,
            a.dxy * b.v + a.dx * b.dy + a.dy * b.dx + a.v * b.dxy,
            a.dyy * b.v + 2.0 * a.dy * b.dy + a.v * b.dyy};
}
inline Jet2 operator/(const Jet2& a, const Jet2& b) {
    const double inv = 1.0 / b.v;
    return a * chain(b, inv, -inv * inv, 2.0 * inv * inv * inv);
}

inline Jet2 exp(const Jet2& a) {
    const double e = std::exp(a.v);
    return chain(a, e, e, e);
}
inline Jet2 sin(const Jet2& a) {
    const double s = std::sin(a.v);
    return chain(a, s, std::cos(a.v), -s);
}
inline Jet2 cos(const Jet2& a) {
    const double c = std::cos(a.v);
    return chain(a, c, -std::sin(a.v), -c);
}
inline Jet2 tanh(const Jet2& a) {
    const double t = std::tanh(a.v);
    const double d = 1.0 - t * t;
    return chain(a, t, d, -2.0 * t * d);
}

/// Plain-double and jet overloads share one spelling in templated formulas.
inline double value_of(double a) noexcept { return a; }
inline double value_of(const Jet2& a) noexcept { return a.v; }

}  // namespace crvpinn
