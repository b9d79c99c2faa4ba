#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "volterra/matrix.hpp"

namespace volterra {

// Shared numerical knobs.  fd_step_scale multiplies max(1, |x_i|) to give
// the central-difference step for component i; richardson toggles one
// level of extrapolation (4*D_{h/2} - D_h)/3; singular_threshold is the
// relative pivot cutoff passed to linear solves.
struct DiffConfig {
    double fd_step_scale = 6e-6;
    bool richardson = false;
    double singular_threshold = 1e-12;
};

namespace detail {

// The O(h^4) extrapolated stencil balances truncation against roundoff at
// a much larger step than the plain O(h^2) one (h ~ eps^{1/5} instead of
// eps^{1/3}); reusing the plain step would leave the combination
// roundoff-dominated and *less* accurate than a single central difference.
inline double base_step(const DiffConfig& cfg) {
    return cfg.richardson ? cfg.fd_step_scale * 40.0 : cfg.fd_step_scale;
}

} // namespace detail

namespace detail {

template <class F>
Matrix jacobian_single(F& f, const Vec& x, std::size_t out_dim, double step_scale) {
    Matrix j(out_dim, x.size());
    Vec xp = x, xm = x;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double h = step_scale * std::max(1.0, std::fabs(x[c]));
        xp[c] = x[c] + h;
        xm[c] = x[c] - h;
        const Vec fp = f(xp);
        const Vec fm = f(xm);
        xp[c] = x[c];
        xm[c] = x[c];
        for (std::size_t r = 0; r < out_dim; ++r)
            j(r, c) = (fp[r] - fm[r]) / (2.0 * h);
    }
    return j;
}

} // namespace detail

// Central-difference Jacobian of a vector field f : R^n -> R^m.
// Domain errors (EvaluationDomain etc.) raised by f at probe points
// propagate to the caller unchanged.
template <class F>
Matrix jacobian_fd(F&& f, const Vec& x, const DiffConfig& cfg = {}) {
    const Vec f0 = f(x);
    const double h0 = detail::base_step(cfg);
    Matrix d = detail::jacobian_single(f, x, f0.size(), h0);
    if (cfg.richardson) {
        Matrix dh = detail::jacobian_single(f, x, f0.size(), h0 / 2.0);
        d = (4.0 * dh - d) * (1.0 / 3.0);
    }
    return d;
}

// Gradient of a scalar function as a Vec.
template <class F>
Vec gradient_fd(F&& f, const Vec& x, const DiffConfig& cfg = {}) {
    auto wrap = [&](const Vec& y) { return Vec{f(y)}; };
    Matrix j = jacobian_fd(wrap, x, cfg);
    Vec g(x.size());
    for (std::size_t c = 0; c < x.size(); ++c) g[c] = j(0, c);
    return g;
}

namespace detail {

template <class F>
std::vector<Matrix> matrix_partials_single(F& f, const Vec& x,
                                           std::size_t rows, std::size_t cols,
                                           double step_scale) {
    std::vector<Matrix> parts(x.size(), Matrix(rows, cols));
    Vec xp = x, xm = x;
    for (std::size_t c = 0; c < x.size(); ++c) {
        const double h = step_scale * std::max(1.0, std::fabs(x[c]));
        xp[c] = x[c] + h;
        xm[c] = x[c] - h;
        const Matrix fp = f(xp);
        const Matrix fm = f(xm);
        xp[c] = x[c];
        xm[c] = x[c];
        parts[c] = (fp - fm) * (1.0 / (2.0 * h));
    }
    return parts;
}

} // namespace detail

// Per-coordinate partial derivatives of a matrix field J : R^n -> R^{rxs},
// returned as one matrix per coordinate: result[c](a,b) = d J(a,b) / d x_c.
template <class F>
std::vector<Matrix> matrix_partials_fd(F&& f, const Vec& x, const DiffConfig& cfg = {}) {
    const Matrix f0 = f(x);
    const double h0 = detail::base_step(cfg);
    auto d = detail::matrix_partials_single(f, x, f0.rows(), f0.cols(), h0);
    if (cfg.richardson) {
        auto dh = detail::matrix_partials_single(f, x, f0.rows(), f0.cols(), h0 / 2.0);
        for (std::size_t c = 0; c < d.size(); ++c)
            d[c] = (4.0 * dh[c] - d[c]) * (1.0 / 3.0);
    }
    return d;
}

} // namespace volterra
