#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "volterra/error.hpp"
#include "volterra/matrix.hpp"

namespace volterra {

// State of the open-ended Volterra lattice
//
//   du_i/dt = u_i (u_{i+1} - u_{i-1}),   i = 1..m,
//
// with the convention u_0 = u_{m+1} = 0: any formula referring to an
// index outside 1..m simply drops that term.  at(i) implements exactly
// that convention, so formulas can be written in their interior form.
class UPoint {
public:
    explicit UPoint(Vec values) : u_(std::move(values)) {
        if (u_.size() < 2)
            throw DimensionError("UPoint: lattice needs at least 2 sites");
    }

    std::size_t m() const { return u_.size(); }

    // 1-based site access; zero outside 1..m.
    double at(long i) const {
        if (i < 1 || i > static_cast<long>(u_.size())) return 0.0;
        return u_[static_cast<std::size_t>(i - 1)];
    }

    const Vec& values() const { return u_; }

private:
    Vec u_;
};

inline Vec volterra_rhs(const UPoint& x) {
    const long m = static_cast<long>(x.m());
    Vec f(x.m());
    for (long i = 1; i <= m; ++i)
        f[i - 1] = x.at(i) * (x.at(i + 1) - x.at(i - 1));
    return f;
}

inline Matrix volterra_rhs_jacobian(const UPoint& x) {
    const long m = static_cast<long>(x.m());
    Matrix j(x.m(), x.m());
    for (long i = 1; i <= m; ++i) {
        j(i - 1, i - 1) = x.at(i + 1) - x.at(i - 1);
        if (i + 1 <= m) j(i - 1, i) = x.at(i);
        if (i - 1 >= 1) j(i - 1, i - 2) = -x.at(i);
    }
    return j;
}

// --- Lax representation -----------------------------------------------------

// L is the symmetric (m+1)x(m+1) Lax matrix: diagonal u_{j-1}+u_j, entries
// sqrt(u_j u_{j+1}) two off the diagonal.  B is the antisymmetric half of
// the pair, so that dL/dt = [B, L] along the flow.  L_poly carries
// u_j u_{j+1} above and 1 below instead of the square roots; it is
// conjugate to L on the positive orthant and polynomial everywhere, which
// is what the invariants are computed from.
struct LaxPair {
    Matrix L;
    Matrix B;
    Matrix L_poly;
};

inline Matrix lax_poly(const UPoint& x) {
    const long n = static_cast<long>(x.m()) + 1;
    Matrix lp(n, n);
    for (long j = 1; j <= n; ++j) {
        lp(j - 1, j - 1) = x.at(j - 1) + x.at(j);
        if (j + 2 <= n) {
            lp(j - 1, j + 1) = x.at(j) * x.at(j + 1);
            lp(j + 1, j - 1) = 1.0;
        }
    }
    return lp;
}

inline LaxPair lax_pair(const UPoint& x) {
    const long n = static_cast<long>(x.m()) + 1;
    LaxPair lx{Matrix(n, n), Matrix(n, n), lax_poly(x)};
    for (long j = 1; j <= n; ++j) {
        lx.L(j - 1, j - 1) = x.at(j - 1) + x.at(j);
        if (j + 2 <= n) {
            const double prod = x.at(j) * x.at(j + 1);
            if (prod < 0.0)
                throw NegativeProduct("lax_pair: u_" + std::to_string(j) + "*u_" +
                                      std::to_string(j + 1) +
                                      " < 0, symmetric form undefined");
            const double r = std::sqrt(prod);
            lx.L(j - 1, j + 1) = r;
            lx.L(j + 1, j - 1) = r;
            lx.B(j - 1, j + 1) = 0.5 * r;
            lx.B(j + 1, j - 1) = -0.5 * r;
        }
    }
    return lx;
}

// H_i = (1/i) tr L_poly^i.  H_1 = 2 sum u_i, H_2 = sum u_i^2 + 2 sum u_i u_{i+1}.
inline double invariant_h(const UPoint& x, unsigned i) {
    if (i == 0) throw Unsupported("invariant_h: index must be >= 1");
    return matrix_power(lax_poly(x), i).trace() / static_cast<double>(i);
}

// Analytic gradient of H_i.  With M = L_poly^{i-1}, contributions come from
// the two diagonal entries containing u_k and the two entries u_{k-1}u_k,
// u_k u_{k+1} in the upper band (tr(M dL) picks the transposed positions).
inline Vec grad_invariant_h(const UPoint& x, unsigned i) {
    if (i == 0) throw Unsupported("grad_invariant_h: index must be >= 1");
    const long m = static_cast<long>(x.m());
    const Matrix mat = matrix_power(lax_poly(x), i - 1);
    auto M = [&](long r, long c) { return mat(r - 1, c - 1); }; // 1-based
    Vec g(x.m());
    for (long k = 1; k <= m; ++k) {
        double v = M(k, k) + M(k + 1, k + 1);
        if (k + 2 <= m + 1) v += M(k + 2, k) * x.at(k + 1);
        if (k >= 2) v += M(k + 1, k - 1) * x.at(k - 1);
        g[k - 1] = v;
    }
    return g;
}

// --- master symmetries -------------------------------------------------------

// Y_0 is the scaling field u_i.  Y_1 has components
//   (i+1) u_i u_{i+1} + u_i^2 + (2-i) u_{i-1} u_i.
// Y_{-1} = (g_1,...,g_m) is rational, built by the two-step recursion
//   g_1 = 1,  g_{2i} = -(u_{2i}/u_{2i-1}) g_{2i-1},  g_{2i+1} = -g_{2i} + 1,
// and generates the lowest bracket: the Lie derivative of the quadratic
// tensor along Y_{-1} is bracket_pi(1).
inline Vec master_symmetry_y(int k, const UPoint& x) {
    const long m = static_cast<long>(x.m());
    Vec y(x.m());
    switch (k) {
    case 0:
        for (long i = 1; i <= m; ++i) y[i - 1] = x.at(i);
        return y;
    case 1:
        for (long i = 1; i <= m; ++i)
            y[i - 1] = (i + 1) * x.at(i) * x.at(i + 1) + x.at(i) * x.at(i) +
                       (2 - i) * x.at(i - 1) * x.at(i);
        return y;
    case -1: {
        double g = 1.0;
        y[0] = g;
        for (long j = 2; j <= m; ++j) {
            if (j % 2 == 0) {
                if (x.at(j - 1) == 0.0)
                    throw EvaluationDomain("master_symmetry_y: division by zero component u" +
                                           std::to_string(j - 1));
                g = -(x.at(j) / x.at(j - 1)) * g;
            } else {
                g = -g + 1.0;
            }
            y[j - 1] = g;
        }
        return y;
    }
    default:
        throw Unsupported("master_symmetry_y: k must be -1, 0 or 1");
    }
}

inline Matrix master_symmetry_y_jacobian(int k, const UPoint& x) {
    const long m = static_cast<long>(x.m());
    Matrix j(x.m(), x.m());
    switch (k) {
    case 0:
        return Matrix::identity(x.m());
    case 1:
        for (long i = 1; i <= m; ++i) {
            j(i - 1, i - 1) = (i + 1) * x.at(i + 1) + 2.0 * x.at(i) + (2 - i) * x.at(i - 1);
            if (i + 1 <= m) j(i - 1, i) = (i + 1) * x.at(i);
            if (i - 1 >= 1) j(i - 1, i - 2) = (2 - i) * x.at(i);
        }
        return j;
    case -1: {
        // Differentiate the recursion row by row.
        Vec g(x.m()), dg(x.m(), 0.0), dprev(x.m(), 0.0);
        g[0] = 1.0;
        for (long jj = 2; jj <= m; ++jj) {
            if (jj % 2 == 0) {
                const double d = x.at(jj - 1);
                if (d == 0.0)
                    throw EvaluationDomain("master_symmetry_y_jacobian: division by zero component u" +
                                           std::to_string(jj - 1));
                const double ratio = x.at(jj) / d;
                for (long c = 1; c <= m; ++c) {
                    double v = -ratio * dprev[c - 1];
                    if (c == jj) v += -g[jj - 2] / d;
                    if (c == jj - 1) v += ratio * g[jj - 2] / d;
                    dg[c - 1] = v;
                }
                g[jj - 1] = -ratio * g[jj - 2];
            } else {
                for (long c = 1; c <= m; ++c) dg[c - 1] = -dprev[c - 1];
                g[jj - 1] = -g[jj - 2] + 1.0;
            }
            for (long c = 1; c <= m; ++c) j(jj - 1, c - 1) = dg[c - 1];
            dprev = dg;
        }
        return j;
    }
    default:
        throw Unsupported("master_symmetry_y_jacobian: k must be -1, 0 or 1");
    }
}

// --- Poisson tensors ---------------------------------------------------------

namespace detail {

inline Matrix pi2_matrix(const UPoint& x) {
    const std::size_t m = x.m();
    return Matrix::antisymmetric_from_upper(m, [&](std::size_t i, std::size_t j) {
        // 0-based (i, j), semantic sites i+1 < j+1
        return (j == i + 1) ? x.at(static_cast<long>(i + 1)) * x.at(static_cast<long>(j + 1))
                            : 0.0;
    });
}

inline std::vector<Matrix> pi2_partials(const UPoint& x) {
    const std::size_t m = x.m();
    std::vector<Matrix> parts(m, Matrix(m, m));
    for (std::size_t i = 0; i + 1 < m; ++i) {
        // entry (i, i+1) = u_{i+1} u_{i+2} in site labels
        parts[i](i, i + 1) = x.at(static_cast<long>(i + 2));
        parts[i](i + 1, i) = -x.at(static_cast<long>(i + 2));
        parts[i + 1](i, i + 1) = x.at(static_cast<long>(i + 1));
        parts[i + 1](i + 1, i) = -x.at(static_cast<long>(i + 1));
    }
    return parts;
}

inline Matrix pi3_matrix(const UPoint& x) {
    const std::size_t m = x.m();
    return Matrix::antisymmetric_from_upper(m, [&](std::size_t i, std::size_t j) {
        const long a = static_cast<long>(i + 1), b = static_cast<long>(j + 1);
        if (j == i + 1) return x.at(a) * x.at(b) * (x.at(a) + x.at(b));
        if (j == i + 2) return x.at(a) * x.at(a + 1) * x.at(a + 2);
        return 0.0;
    });
}

inline std::vector<Matrix> pi3_partials(const UPoint& x) {
    const std::size_t m = x.m();
    std::vector<Matrix> parts(m, Matrix(m, m));
    auto add = [&](std::size_t c, std::size_t r0, std::size_t c0, double v) {
        parts[c](r0, c0) += v;
        parts[c](c0, r0) -= v;
    };
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double ui = x.at(static_cast<long>(i + 1));
        const double uj = x.at(static_cast<long>(i + 2));
        add(i, i, i + 1, uj * (2.0 * ui + uj));
        add(i + 1, i, i + 1, ui * (ui + 2.0 * uj));
    }
    for (std::size_t i = 0; i + 2 < m; ++i) {
        const double u1 = x.at(static_cast<long>(i + 1));
        const double u2 = x.at(static_cast<long>(i + 2));
        const double u3 = x.at(static_cast<long>(i + 3));
        add(i, i, i + 2, u2 * u3);
        add(i + 1, i, i + 2, u1 * u3);
        add(i + 2, i, i + 2, u1 * u2);
    }
    return parts;
}

// L_Y pi assembled from closed-form pieces:
//   (L_Y pi) = sum_c Y_c d_c(pi)  -  (DY) pi  -  pi (DY)^T.
inline Matrix lie_bivector_closed(const Vec& y, const Matrix& dy, const Matrix& pi,
                                  const std::vector<Matrix>& dpi) {
    Matrix r(pi.rows(), pi.cols());
    for (std::size_t c = 0; c < y.size(); ++c) r += y[c] * dpi[c];
    r -= dy * pi;
    r -= pi * dy.transpose();
    return r;
}

} // namespace detail

// The four Poisson structures, lowest first:
//   k = 2: quadratic bracket {u_i, u_{i+1}} = u_i u_{i+1}
//   k = 3: cubic bracket, adjacent u_i u_{i+1}(u_i + u_{i+1}),
//          next-to-adjacent u_i u_{i+1} u_{i+2}
//   k = 1: rational bracket, defined as the Lie derivative of the
//          quadratic one along Y_{-1} (assembled analytically)
//   k = 0: one rung further down; only the m = 3 closed form is provided.
inline Matrix bracket_pi(int k, const UPoint& x) {
    switch (k) {
    case 2:
        return detail::pi2_matrix(x);
    case 3:
        return detail::pi3_matrix(x);
    case 1:
        return detail::lie_bivector_closed(master_symmetry_y(-1, x),
                                           master_symmetry_y_jacobian(-1, x),
                                           detail::pi2_matrix(x), detail::pi2_partials(x));
    case 0: {
        if (x.m() != 3)
            throw Unsupported("bracket_pi: k = 0 is only available for m = 3");
        const double u1 = x.at(1), u2 = x.at(2), u3 = x.at(3);
        if (u1 == 0.0)
            throw EvaluationDomain("bracket_pi: division by zero component u1");
        if (u3 == 0.0)
            throw EvaluationDomain("bracket_pi: division by zero component u3");
        const double d = u1 * u3;
        return Matrix::antisymmetric_from_upper(3, [&](std::size_t i, std::size_t j) {
            if (i == 0 && j == 1) return u2 * (u2 + u3) / d;
            if (i == 1 && j == 2) return u2 * (u1 + u2) / d;
            return -u2 * (u1 + u2 + u3) / d; // (1,3) = -{u3,u1}
        });
    }
    default:
        throw Unsupported("bracket_pi: k must be in {0,1,2,3}");
    }
}

// Analytic coordinate partials, available for the polynomial brackets.
inline std::vector<Matrix> bracket_pi_partials(int k, const UPoint& x) {
    switch (k) {
    case 2:
        return detail::pi2_partials(x);
    case 3:
        return detail::pi3_partials(x);
    default:
        throw Unsupported("bracket_pi_partials: analytic partials only for k in {2,3}");
    }
}

// --- Toda correspondence -----------------------------------------------------

// Flattened Toda state (a_1..a_{n-1}, b_1..b_n).
struct TodaPoint {
    Vec a;
    Vec b;

    std::size_t n() const { return b.size(); }

    Vec flat() const {
        Vec v;
        v.reserve(a.size() + b.size());
        v.insert(v.end(), a.begin(), a.end());
        v.insert(v.end(), b.begin(), b.end());
        return v;
    }

    static TodaPoint from_flat(std::size_t n, const Vec& v) {
        if (v.size() != 2 * n - 1)
            throw DimensionError("TodaPoint: flat vector has wrong length");
        TodaPoint t;
        t.a.assign(v.begin(), v.begin() + static_cast<long>(n - 1));
        t.b.assign(v.begin() + static_cast<long>(n - 1), v.end());
        return t;
    }
};

/// The classical contraction of two Volterra sites into one Toda site:
//   a_i = -(1/2) sqrt(u_{2i} u_{2i-1}),  b_i = (1/2)(u_{2i-1} + u_{2i-2}).
// Needs odd m = 2n-1 and nonnegative pair products.
inline TodaPoint henon_map(const UPoint& x) {
    const long m = static_cast<long>(x.m());
    if (m % 2 == 0)
        throw Unsupported("henon_map: lattice size must be odd");
    const std::size_t n = static_cast<std::size_t>((m + 1) / 2);
    TodaPoint t;
    t.a.resize(n - 1);
    t.b.resize(n);
    for (std::size_t i = 1; i < n; ++i) {
        const double prod = x.at(2 * static_cast<long>(i)) * x.at(2 * static_cast<long>(i) - 1);
        if (prod < 0.0)
            throw NegativeProduct("henon_map: u_" + std::to_string(2 * i) + "*u_" +
                                  std::to_string(2 * i - 1) + " < 0");
        t.a[i - 1] = -0.5 * std::sqrt(prod);
    }
    for (std::size_t i = 1; i <= n; ++i)
        t.b[i - 1] = 0.5 * (x.at(2 * static_cast<long>(i) - 1) + x.at(2 * static_cast<long>(i) - 2));
    return t;
}

// Toda flow in Flaschka coordinates, open ends (a_0 = a_n = 0):
//   da_i/dt = a_i (b_{i+1} - b_i),  db_i/dt = 2 (a_i^2 - a_{i-1}^2).
inline TodaPoint toda_rhs(const TodaPoint& t) {
    const std::size_t n = t.n();
    TodaPoint d;
    d.a.resize(n - 1);
    d.b.resize(n);
    for (std::size_t i = 0; i + 1 < n; ++i)
        d.a[i] = t.a[i] * (t.b[i + 1] - t.b[i]);
    for (std::size_t i = 0; i < n; ++i) {
        const double right = (i < n - 1) ? t.a[i] * t.a[i] : 0.0;
        const double left = (i > 0) ? t.a[i - 1] * t.a[i - 1] : 0.0;
        d.b[i] = 2.0 * (right - left);
    }
    return d;
}

} // namespace volterra
