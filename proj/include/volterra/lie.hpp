#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "volterra/diff.hpp"
#include "volterra/matrix.hpp"

namespace volterra {

// A vector field together with an optional analytic Jacobian.  When the
// jacobian slot is empty, callers fall back to central differences, so
// closed-form fields and recursion-generated ones share one interface.
struct VectorFieldSpec {
    std::size_t dim = 0;
    std::function<Vec(const Vec&)> eval;
    std::function<Matrix(const Vec&)> jacobian; // optional
    std::string label;
};

// Same idea for a bivector (antisymmetric matrix) field; partials[c] is
// the entrywise derivative with respect to coordinate c.
struct BivectorFieldSpec {
    std::size_t dim = 0;
    std::function<Matrix(const Vec&)> eval;
    std::function<std::vector<Matrix>(const Vec&)> partials; // optional
    std::string label;
};

inline Matrix field_jacobian(const VectorFieldSpec& f, const Vec& x,
                             const DiffConfig& cfg = {}) {
    if (f.jacobian) return f.jacobian(x);
    return jacobian_fd(f.eval, x, cfg);
}

inline std::vector<Matrix> bivector_partials(const BivectorFieldSpec& j, const Vec& x,
                                             const DiffConfig& cfg = {}) {
    if (j.partials) return j.partials(x);
    return matrix_partials_fd(j.eval, x, cfg);
}

// Commutator [X, Y] = (DY) X - (DX) Y.
inline Vec lie_bracket(const VectorFieldSpec& x_field, const VectorFieldSpec& y_field,
                       const Vec& x, const DiffConfig& cfg = {}) {
    const Matrix dy = field_jacobian(y_field, x, cfg);
    const Matrix dx = field_jacobian(x_field, x, cfg);
    return dy * x_field.eval(x) - dx * y_field.eval(x);
}

// (L_X J)^{ab} = sum_c [ X^c d_c J^{ab} - (d_c X^a) J^{cb} - (d_c X^b) J^{ac} ]
//             = sum_c X^c d_c J  -  (DX) J  -  J (DX)^T.
inline Matrix lie_derivative_bivector(const VectorFieldSpec& x_field,
                                      const BivectorFieldSpec& j_field, const Vec& x,
                                      const DiffConfig& cfg = {}) {
    const Vec xv = x_field.eval(x);
    const Matrix dx = field_jacobian(x_field, x, cfg);
    const std::vector<Matrix> dj = bivector_partials(j_field, x, cfg);
    Matrix r(j_field.dim, j_field.dim);
    for (std::size_t c = 0; c < xv.size(); ++c) r += xv[c] * dj[c];
    r -= dx * j_field.eval(x);
    r -= j_field.eval(x) * dx.transpose();
    return r;
}

// Largest component of the Jacobi cyclic sum
//   sum_l [ J^{al} d_l J^{bc} + J^{bl} d_l J^{ca} + J^{cl} d_l J^{ab} ]
// over all index triples a < b < c.
// Worst cyclic sum over index triples, scaled per triple by the absolute
// mass of its summands so the number measures genuine cancellation and the
// tolerance is meaningful for brackets of any magnitude.
inline double jacobi_residual(const BivectorFieldSpec& j_field, const Vec& x,
                              const DiffConfig& cfg = {}) {
    const Matrix j = j_field.eval(x);
    const std::vector<Matrix> dj = bivector_partials(j_field, x, cfg);
    const std::size_t n = j.rows();
    double worst = 0.0;
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = a + 1; b < n; ++b)
            for (std::size_t c = b + 1; c < n; ++c) {
                double s = 0.0, mass = 0.0;
                for (std::size_t l = 0; l < n; ++l) {
                    const double t1 = j(a, l) * dj[l](b, c);
                    const double t2 = j(b, l) * dj[l](c, a);
                    const double t3 = j(c, l) * dj[l](a, b);
                    s += t1 + t2 + t3;
                    mass += std::fabs(t1) + std::fabs(t2) + std::fabs(t3);
                }
                worst = std::max(worst, std::fabs(s) / std::max(1.0, mass));
            }
    return worst;
}

// Directional derivative X(f) of a scalar function along a field.
inline double lie_derivative_scalar(const VectorFieldSpec& x_field,
                                    const std::function<double(const Vec&)>& f,
                                    const Vec& x, const DiffConfig& cfg = {}) {
    return dot(gradient_fd(f, x, cfg), x_field.eval(x));
}

} // namespace volterra
