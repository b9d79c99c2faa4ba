#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "volterra/error.hpp"
#include "volterra/lattice.hpp"
#include "volterra/matrix.hpp"

namespace volterra {

// Canonical coordinates (q_1..q_n, p_1..p_n).  Flattened order is q block
// then p block throughout.
class PhasePoint {
public:
    PhasePoint(Vec q, Vec p) : q_(std::move(q)), p_(std::move(p)) {
        if (q_.size() != p_.size() || q_.empty())
            throw DimensionError("PhasePoint: q and p must have equal positive length");
    }

    std::size_t n() const { return q_.size(); }
    double q(std::size_t i) const { return q_[i - 1]; } // 1-based
    double p(std::size_t i) const { return p_[i - 1]; }

    Vec flat() const {
        Vec v = q_;
        v.insert(v.end(), p_.begin(), p_.end());
        return v;
    }

    static PhasePoint from_flat(const Vec& v) {
        if (v.size() < 2 || v.size() % 2 != 0)
            throw DimensionError("PhasePoint: flat vector must have even positive length");
        const std::size_t n = v.size() / 2;
        return PhasePoint(Vec(v.begin(), v.begin() + static_cast<long>(n)),
                          Vec(v.begin() + static_cast<long>(n), v.end()));
    }

private:
    Vec q_, p_;
};

namespace detail {

// The realization runs through the two exponential families
//   a_i = e^{p_i} (i = 1..n),  b_i = e^{q_{i+1}-q_i} (i = 1..n-1);
// nearly every formula on this side is a signed combination of them.
inline double aa(const PhasePoint& x, std::size_t i) { return std::exp(x.p(i)); }
inline double bb(const PhasePoint& x, std::size_t i) {
    return std::exp(x.q(i + 1) - x.q(i));
}

} // namespace detail

// u_{2i-1} = -e^{p_i}, u_{2i} = e^{q_{i+1}-q_i}: a 2n-dimensional canonical
// chart over the m = 2n-1 site lattice.  The image has alternating signs
// (odd sites negative, even positive); the map forgets the common shift
// of the q's, which is the gauge freedom of preimage().
inline UPoint realize(const PhasePoint& x) {
    const std::size_t n = x.n();
    Vec u(2 * n - 1);
    for (std::size_t i = 1; i <= n; ++i) u[2 * i - 2] = -detail::aa(x, i);
    for (std::size_t i = 1; i + 1 <= n; ++i) u[2 * i - 1] = detail::bb(x, i);
    return UPoint(u);
}

// Jacobian of realize, (2n-1) x (2n), columns ordered (q, p).
inline Matrix d_realize(const PhasePoint& x) {
    const std::size_t n = x.n();
    Matrix d(2 * n - 1, 2 * n);
    for (std::size_t i = 1; i <= n; ++i)
        d(2 * i - 2, n + i - 1) = -detail::aa(x, i);
    for (std::size_t i = 1; i + 1 <= n; ++i) {
        const double b = detail::bb(x, i);
        d(2 * i - 1, i - 1) = -b;
        d(2 * i - 1, i) = b;
    }
    return d;
}

// Inverse chart on the alternating-sign orthant, with the gauge fixed by
// q_1 = q1_gauge.  Throws DomainViolation off the orthant.
inline PhasePoint preimage(const UPoint& u, double q1_gauge = 0.0) {
    const std::size_t m = u.m();
    if (m % 2 == 0)
        throw DomainViolation("preimage: lattice size must be odd");
    const std::size_t n = (m + 1) / 2;
    Vec q(n), p(n);
    for (std::size_t i = 1; i <= n; ++i) {
        const double v = u.at(2 * static_cast<long>(i) - 1);
        if (!(v < 0.0))
            throw DomainViolation("preimage: u_" + std::to_string(2 * i - 1) +
                                  " must be negative");
        p[i - 1] = std::log(-v);
    }
    q[0] = q1_gauge;
    for (std::size_t i = 1; i + 1 <= n; ++i) {
        const double v = u.at(2 * static_cast<long>(i));
        if (!(v > 0.0))
            throw DomainViolation("preimage: u_" + std::to_string(2 * i) +
                                  " must be positive");
        q[i] = q[i - 1] + std::log(v);
    }
    return PhasePoint(q, p);
}

// --- Hamiltonians ------------------------------------------------------------

// h_1 and h_2 in closed form; higher ones come from the pullback in the
// hierarchy layer.
inline double hamiltonian_h(const PhasePoint& x, unsigned i) {
    const std::size_t n = x.n();
    switch (i) {
    case 1: {
        double s = 0.0;
        for (std::size_t j = 1; j <= n; ++j) s -= detail::aa(x, j);
        for (std::size_t j = 1; j + 1 <= n; ++j) s += detail::bb(x, j);
        return s;
    }
    case 2: {
        double s = 0.0;
        for (std::size_t j = 1; j <= n; ++j) {
            const double a = detail::aa(x, j);
            s += 0.5 * a * a;
        }
        for (std::size_t j = 1; j + 1 <= n; ++j) {
            const double b = detail::bb(x, j);
            s += 0.5 * b * b - (detail::aa(x, j) + detail::aa(x, j + 1)) * b;
        }
        return s;
    }
    default:
        throw Unsupported("hamiltonian_h: closed forms only for i in {1,2}");
    }
}

inline Vec grad_hamiltonian_h(const PhasePoint& x, unsigned i) {
    const std::size_t n = x.n();
    Vec g(2 * n, 0.0);
    auto gq = [&](std::size_t j) -> double& { return g[j - 1]; };
    auto gp = [&](std::size_t j) -> double& { return g[n + j - 1]; };
    switch (i) {
    case 1:
        for (std::size_t j = 1; j <= n; ++j) gp(j) = -detail::aa(x, j);
        for (std::size_t j = 1; j + 1 <= n; ++j) {
            const double b = detail::bb(x, j);
            gq(j) -= b;
            gq(j + 1) += b;
        }
        return g;
    case 2:
        for (std::size_t j = 1; j <= n; ++j) {
            const double a = detail::aa(x, j);
            gp(j) = a * a;
        }
        for (std::size_t j = 1; j + 1 <= n; ++j) {
            const double a0 = detail::aa(x, j), a1 = detail::aa(x, j + 1);
            const double b = detail::bb(x, j);
            gp(j) -= a0 * b;
            gp(j + 1) -= a1 * b;
            const double dq = b * b - (a0 + a1) * b; // d/d(q_{j+1}-q_j)
            gq(j) -= dq;
            gq(j + 1) += dq;
        }
        return g;
    default:
        throw Unsupported("grad_hamiltonian_h: closed forms only for i in {1,2}");
    }
}

// --- Poisson tensors on the qp side -------------------------------------------

// Canonical symplectic tensor in (q, p) block order.
inline Matrix tensor_j2(std::size_t n) {
    Matrix j(2 * n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        j(i, n + i) = 1.0;
        j(n + i, i) = -1.0;
    }
    return j;
}

namespace detail {

// Builds the cubic qp-side tensor together with its coordinate partials.
// Each entry is a signed sum of a_j's and b_j's, so value and partials are
// accumulated through the same two helpers.
struct J3Builder {
    const PhasePoint& x;
    std::size_t n;
    bool want_partials;
    Matrix j;
    std::vector<Matrix> parts;

    explicit J3Builder(const PhasePoint& xx, bool partials)
        : x(xx), n(xx.n()), want_partials(partials), j(2 * n, 2 * n) {
        if (want_partials) parts.assign(2 * n, Matrix(2 * n, 2 * n));
    }

    // antisymmetric write of one a_k term: s * e^{p_k} at (r, c)
    void add_a(std::size_t r, std::size_t c, double s, std::size_t k) {
        const double v = s * aa(x, k);
        j(r, c) += v;
        j(c, r) -= v;
        if (want_partials) {
            parts[n + k - 1](r, c) += v;
            parts[n + k - 1](c, r) -= v;
        }
    }

    // antisymmetric write of one b_k term: s * e^{q_{k+1}-q_k} at (r, c)
    void add_b(std::size_t r, std::size_t c, double s, std::size_t k) {
        const double v = s * bb(x, k);
        j(r, c) += v;
        j(c, r) -= v;
        if (want_partials) {
            parts[k - 1](r, c) -= v;
            parts[k - 1](c, r) += v;
            parts[k](r, c) += v;
            parts[k](c, r) -= v;
        }
    }

    std::size_t iq(std::size_t i) const { return i - 1; }
    std::size_t ip(std::size_t i) const { return n + i - 1; }

    void run() {
        for (std::size_t i = 1; i <= n; ++i) {
            // {q_i, q_j} = e^{p_j}, j < i
            for (std::size_t jj = 1; jj < i; ++jj) add_a(iq(i), iq(jj), 1.0, jj);
            // {q_i, p_i} = -e^{p_i} + e^{q_i - q_{i-1}}
            add_a(iq(i), ip(i), -1.0, i);
            if (i >= 2) add_b(iq(i), ip(i), 1.0, i - 1);
            // {q_i, p_j} = e^{q_j - q_{j-1}} - e^{q_{j+1} - q_j}, j < i
            for (std::size_t jj = 1; jj < i; ++jj) {
                if (jj >= 2) add_b(iq(i), ip(jj), 1.0, jj - 1);
                add_b(iq(i), ip(jj), -1.0, jj);
            }
            // {p_i, p_{i+1}} = e^{q_{i+1} - q_i}
            if (i + 1 <= n) add_b(ip(i), ip(i + 1), 1.0, i);
        }
    }
};

} // namespace detail

inline Matrix tensor_j3(const PhasePoint& x) {
    detail::J3Builder b(x, false);
    b.run();
    return std::move(b.j);
}

inline std::vector<Matrix> tensor_j3_partials(const PhasePoint& x) {
    detail::J3Builder b(x, true);
    b.run();
    return std::move(b.parts);
}

// --- master symmetries on the qp side ------------------------------------------

// X_0 = (1, 2, ..., n; 1, ..., 1).  X_1 in closed form:
//   A_i = -sum_{j<i} a_j + (1-2i) a_i + sum_{j<i} b_j          (q component)
//   B_i = 2i b_i - a_i + (3-2i) b_{i-1}                        (p component)
// with out-of-range b's dropped.
inline Vec symmetry_x(int k, const PhasePoint& x) {
    const std::size_t n = x.n();
    Vec v(2 * n, 0.0);
    switch (k) {
    case 0:
        for (std::size_t i = 1; i <= n; ++i) {
            v[i - 1] = static_cast<double>(i);
            v[n + i - 1] = 1.0;
        }
        return v;
    case 1:
        for (std::size_t i = 1; i <= n; ++i) {
            double A = (1.0 - 2.0 * i) * detail::aa(x, i);
            for (std::size_t jj = 1; jj < i; ++jj)
                A += -detail::aa(x, jj) + detail::bb(x, jj);
            double B = -detail::aa(x, i);
            if (i + 1 <= n) B += 2.0 * i * detail::bb(x, i);
            if (i >= 2) B += (3.0 - 2.0 * i) * detail::bb(x, i - 1);
            v[i - 1] = A;
            v[n + i - 1] = B;
        }
        return v;
    default:
        throw Unsupported("symmetry_x: closed forms only for k in {0,1}");
    }
}

inline Matrix symmetry_x_jacobian(int k, const PhasePoint& x) {
    const std::size_t n = x.n();
    Matrix d(2 * n, 2 * n);
    switch (k) {
    case 0:
        return d;
    case 1:
        for (std::size_t i = 1; i <= n; ++i) {
            const std::size_t rA = i - 1, rB = n + i - 1;
            d(rA, n + i - 1) += (1.0 - 2.0 * i) * detail::aa(x, i);
            for (std::size_t jj = 1; jj < i; ++jj) {
                d(rA, n + jj - 1) += -detail::aa(x, jj);
                const double b = detail::bb(x, jj);
                d(rA, jj - 1) -= b;
                d(rA, jj) += b;
            }
            d(rB, n + i - 1) += -detail::aa(x, i);
            if (i + 1 <= n) {
                const double b = detail::bb(x, i);
                d(rB, i - 1) -= 2.0 * i * b;
                d(rB, i) += 2.0 * i * b;
            }
            if (i >= 2) {
                const double b = detail::bb(x, i - 1);
                d(rB, i - 2) -= (3.0 - 2.0 * i) * b;
                d(rB, i - 1) += (3.0 - 2.0 * i) * b;
            }
        }
        return d;
    default:
        throw Unsupported("symmetry_x_jacobian: closed forms only for k in {0,1}");
    }
}

// First canonical flow chi_1 = J_2 grad h_1:
//   dq_i/dt = -e^{p_i},  dp_i/dt = e^{q_{i+1}-q_i} - e^{q_i-q_{i-1}}.
inline Vec chi1(const PhasePoint& x) {
    const std::size_t n = x.n();
    Vec v(2 * n, 0.0);
    for (std::size_t i = 1; i <= n; ++i) {
        v[i - 1] = -detail::aa(x, i);
        double dp = 0.0;
        if (i + 1 <= n) dp += detail::bb(x, i);
        if (i >= 2) dp -= detail::bb(x, i - 1);
        v[n + i - 1] = dp;
    }
    return v;
}

inline Matrix chi1_jacobian(const PhasePoint& x) {
    const std::size_t n = x.n();
    Matrix d(2 * n, 2 * n);
    for (std::size_t i = 1; i <= n; ++i) {
        d(i - 1, n + i - 1) = -detail::aa(x, i);
        if (i + 1 <= n) {
            const double b = detail::bb(x, i);
            d(n + i - 1, i - 1) -= b;
            d(n + i - 1, i) += b;
        }
        if (i >= 2) {
            const double b = detail::bb(x, i - 1);
            d(n + i - 1, i - 2) += b;
            d(n + i - 1, i - 1) -= b;
        }
    }
    return d;
}

} // namespace volterra
