#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "volterra/diff.hpp"
#include "volterra/error.hpp"
#include "volterra/lattice.hpp"
#include "volterra/lie.hpp"
#include "volterra/matrix.hpp"
#include "volterra/realization.hpp"

namespace volterra {

// A . B^{-1} without forming the inverse: solve B^T Z = A^T, return Z^T.
inline Matrix divide_right(const Matrix& a, const Matrix& b,
                           double singular_threshold = 1e-12) {
    return solve_linear(b.transpose(), a.transpose(), singular_threshold).transpose();
}

// Recursion operators of the qp-side pencil: R = J_3 J_2^{-1} raises,
// N = J_2 J_3^{-1} lowers.  J_2 is canonical so J_2^{-1} = -J_2 exactly;
// J_3 is state dependent and its inversion can legitimately fail
// (SingularMatrix) on degenerate leaves.
inline Matrix recursion_r(const PhasePoint& x) {
    const Matrix j2 = tensor_j2(x.n());
    return tensor_j3(x) * (-1.0 * j2);
}

inline Matrix recursion_n(const PhasePoint& x, double singular_threshold = 1e-12) {
    const Matrix j3 = tensor_j3(x);
    try {
        return divide_right(tensor_j2(x.n()), j3, singular_threshold);
    } catch (const SingularMatrix&) {
        throw SingularMatrix("recursion_n: J_3 singular at this point, |det| = " +
                             std::to_string(std::fabs(determinant(j3))));
    }
}

// J_i for any integer i: closed forms at 2 and 3, R- or N-chains elsewhere.
// The chain has no reason to stay antisymmetric if the pencil is coded
// wrong, so the defect is asserted after the fact (never symmetrized away:
// that would mask bugs).
inline Matrix generate_tensor(int i, const PhasePoint& x,
                              const DiffConfig& cfg = {}) {
    Matrix j(2 * x.n(), 2 * x.n());
    if (i == 2) return tensor_j2(x.n());
    if (i == 3) return tensor_j3(x);
    if (i > 3) {
        const Matrix r = recursion_r(x);
        j = tensor_j3(x);
        for (int k = 3; k < i; ++k) j = r * j;
    } else {
        const Matrix nmat = recursion_n(x, cfg.singular_threshold);
        j = tensor_j2(x.n());
        for (int k = 2; k > i; --k) j = nmat * j;
    }
    const double defect = j.antisymmetry_defect();
    if (defect > 1e-10 * std::max(1.0, j.max_abs()))
        throw Error("generate_tensor: antisymmetry defect " + std::to_string(defect) +
                    " for J_" + std::to_string(i));
    return j;
}

// chi_i: chi_1 is closed, chi_{i+1} = R chi_i.
inline Vec generate_flow(int i, const PhasePoint& x,
                         const DiffConfig& cfg = {}) {
    (void)cfg;
    if (i < 1) throw Unsupported("generate_flow: index must be >= 1");
    Vec v = chi1(x);
    if (i == 1) return v;
    const Matrix r = recursion_r(x);
    for (int k = 1; k < i; ++k) v = r * v;
    return v;
}

// The master symmetry chain: X_0 and X_1 closed, X_{i+1} = R X_i above.
inline Vec generate_x(int i, const PhasePoint& x) {
    if (i == 0 || i == 1) return symmetry_x(i, x);
    if (i < 0) throw Unsupported("generate_x: index must be >= 0");
    Vec v = symmetry_x(1, x);
    const Matrix r = recursion_r(x);
    for (int k = 1; k < i; ++k) v = r * v;
    return v;
}

// h_i on the qp side.  For i <= 2 the closed forms; above that, half the
// pullback of the lattice invariant through the realization:
// h_i = (1/2) H_i(realize(.)).  The gradient is exact either way because
// grad H_i is analytic and the chain rule applies.
inline double generate_h(int i, const PhasePoint& x) {
    if (i <= 0) throw Unsupported("generate_h: index must be >= 1");
    if (i <= 2) return hamiltonian_h(x, static_cast<unsigned>(i));
    return 0.5 * invariant_h(realize(x), static_cast<unsigned>(i));
}

inline Vec generate_grad_h(int i, const PhasePoint& x) {
    if (i <= 0) throw Unsupported("generate_grad_h: index must be >= 1");
    if (i <= 2) return grad_hamiltonian_h(x, static_cast<unsigned>(i));
    const Vec gu = grad_invariant_h(realize(x), static_cast<unsigned>(i));
    return 0.5 * (d_realize(x).transpose() * gu);
}

// --- projection u = realize(q, p) ---------------------------------------------

// Push a qp-side tensor down to the lattice: Du J Du^T at the gauge-fixed
// preimage.  The result is gauge independent because every tensor in the
// family commutes with the common q-shift.
inline Matrix project_tensor(const std::function<Matrix(const PhasePoint&)>& j,
                             const UPoint& u, double q1_gauge = 0.0) {
    const PhasePoint x = preimage(u, q1_gauge);
    const Matrix d = d_realize(x);
    return d * j(x) * d.transpose();
}

inline Vec project_field(const std::function<Vec(const PhasePoint&)>& f,
                         const UPoint& u, double q1_gauge = 0.0) {
    const PhasePoint x = preimage(u, q1_gauge);
    return d_realize(x) * f(x);
}

// --- field-spec factories -------------------------------------------------------

// Wrappers binding the concrete objects above into the generic field
// interface used by the Lie-derivative machinery and the verification
// suite.  Analytic derivative slots are filled exactly where closed forms
// exist; everything generated by recursion differentiates numerically.

inline VectorFieldSpec volterra_field(std::size_t m) {
    return {m, [](const Vec& v) { return volterra_rhs(UPoint(v)); },
            [](const Vec& v) { return volterra_rhs_jacobian(UPoint(v)); },
            "volterra"};
}

inline VectorFieldSpec y_field(int k, std::size_t m) {
    return {m, [k](const Vec& v) { return master_symmetry_y(k, UPoint(v)); },
            [k](const Vec& v) { return master_symmetry_y_jacobian(k, UPoint(v)); },
            "Y" + std::to_string(k)};
}

inline BivectorFieldSpec pi_field(int k, std::size_t m) {
    BivectorFieldSpec s;
    s.dim = m;
    s.eval = [k](const Vec& v) { return bracket_pi(k, UPoint(v)); };
    if (k == 2 || k == 3)
        s.partials = [k](const Vec& v) { return bracket_pi_partials(k, UPoint(v)); };
    s.label = "pi" + std::to_string(k);
    return s;
}

// Hamiltonian vector field of H_i with respect to the quadratic bracket.
inline VectorFieldSpec volterra_hierarchy_field(unsigned i, std::size_t m) {
    return {m,
            [i](const Vec& v) {
                const UPoint u(v);
                return bracket_pi(2, u) * grad_invariant_h(u, i);
            },
            nullptr,
            "pi2*gradH" + std::to_string(i)};
}

inline BivectorFieldSpec j_field(int i, std::size_t n, const DiffConfig& cfg = {}) {
    BivectorFieldSpec s;
    s.dim = 2 * n;
    if (i == 2) {
        s.eval = [n](const Vec&) { return tensor_j2(n); };
        s.partials = [n](const Vec&) {
            return std::vector<Matrix>(2 * n, Matrix(2 * n, 2 * n));
        };
    } else if (i == 3) {
        s.eval = [](const Vec& v) { return tensor_j3(PhasePoint::from_flat(v)); };
        s.partials = [](const Vec& v) {
            return tensor_j3_partials(PhasePoint::from_flat(v));
        };
    } else {
        s.eval = [i, cfg](const Vec& v) {
            return generate_tensor(i, PhasePoint::from_flat(v), cfg);
        };
    }
    s.label = "J" + std::to_string(i);
    return s;
}

inline VectorFieldSpec x_field(int k, std::size_t n) {
    VectorFieldSpec s;
    s.dim = 2 * n;
    if (k == 0 || k == 1) {
        s.eval = [k](const Vec& v) { return symmetry_x(k, PhasePoint::from_flat(v)); };
        s.jacobian = [k](const Vec& v) {
            return symmetry_x_jacobian(k, PhasePoint::from_flat(v));
        };
    } else {
        s.eval = [k](const Vec& v) { return generate_x(k, PhasePoint::from_flat(v)); };
    }
    s.label = "X" + std::to_string(k);
    return s;
}

inline VectorFieldSpec chi_field(int i, std::size_t n, const DiffConfig& cfg = {}) {
    VectorFieldSpec s;
    s.dim = 2 * n;
    if (i == 1) {
        s.eval = [](const Vec& v) { return chi1(PhasePoint::from_flat(v)); };
        s.jacobian = [](const Vec& v) { return chi1_jacobian(PhasePoint::from_flat(v)); };
    } else {
        s.eval = [i, cfg](const Vec& v) {
            return generate_flow(i, PhasePoint::from_flat(v), cfg);
        };
    }
    s.label = "chi" + std::to_string(i);
    return s;
}

} // namespace volterra
