#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "volterra/error.hpp"

namespace volterra {

using Vec = std::vector<double>;

// Dense row-major matrix.  Everything here is tiny (phase spaces of
// dimension <= ~20), so no blocking, no expression templates -- plain
// loops are both fast enough and easy to audit.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
        if (rows == 0 || cols == 0)
            throw DimensionError("Matrix: dimensions must be positive");
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Matrix& operator+=(const Matrix& o) {
        check_same_shape(o, "+=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += o.data_[i];
        return *this;
    }
    Matrix& operator-=(const Matrix& o) {
        check_same_shape(o, "-=");
        for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= o.data_[i];
        return *this;
    }
    Matrix& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    friend Matrix operator+(Matrix a, const Matrix& b) { return a += b; }
    friend Matrix operator-(Matrix a, const Matrix& b) { return a -= b; }
    friend Matrix operator*(Matrix a, double s) { return a *= s; }
    friend Matrix operator*(double s, Matrix a) { return a *= s; }

    friend Matrix operator*(const Matrix& a, const Matrix& b) {
        if (a.cols_ != b.rows_)
            throw DimensionError("Matrix: product shape mismatch");
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const double aik = a(i, k);
                if (aik == 0.0) continue;
                for (std::size_t j = 0; j < b.cols_; ++j)
                    c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend Vec operator*(const Matrix& a, const Vec& x) {
        if (a.cols_ != x.size())
            throw DimensionError("Matrix: matvec shape mismatch");
        Vec y(a.rows_, 0.0);
        for (std::size_t i = 0; i < a.rows_; ++i)
            for (std::size_t j = 0; j < a.cols_; ++j)
                y[i] += a(i, j) * x[j];
        return y;
    }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    double trace() const {
        double s = 0.0;
        for (std::size_t i = 0; i < std::min(rows_, cols_); ++i) s += (*this)(i, i);
        return s;
    }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::fabs(v));
        return m;
    }

    // Infinity norm: max absolute row sum.
    double norm_inf() const {
        double m = 0.0;
        for (std::size_t i = 0; i < rows_; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < cols_; ++j) s += std::fabs((*this)(i, j));
            m = std::max(m, s);
        }
        return m;
    }

    // Largest |A(i,j) + A(j,i)|; zero for an exactly antisymmetric matrix.
    double antisymmetry_defect() const {
        double d = 0.0;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i; j < cols_; ++j)
                d = std::max(d, std::fabs((*this)(i, j) + (*this)(j, i)));
        return d;
    }

    // Builds an antisymmetric matrix from its strict upper triangle so the
    // lower triangle is the exact negation, not a recomputation.
    template <class F> // F : (std::size_t i, std::size_t j) -> double, i < j
    static Matrix antisymmetric_from_upper(std::size_t n, F&& upper) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) {
                const double v = upper(i, j);
                m(i, j) = v;
                m(j, i) = -v;
            }
        return m;
    }

private:
    void check_same_shape(const Matrix& o, const char* op) const {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw DimensionError(std::string("Matrix: shape mismatch in ") + op);
    }

    std::size_t rows_ = 0, cols_ = 0;
    Vec data_;
};

inline Matrix matrix_power(const Matrix& a, unsigned k) {
    if (a.rows() != a.cols())
        throw DimensionError("matrix_power: square matrix required");
    Matrix r = Matrix::identity(a.rows());
    for (unsigned i = 0; i < k; ++i) r = r * a;
    return r;
}

// --- small vector helpers -------------------------------------------------

inline Vec operator+(Vec a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("Vec: size mismatch in +");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
    return a;
}

inline Vec operator-(Vec a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("Vec: size mismatch in -");
    for (std::size_t i = 0; i < a.size(); ++i) a[i] -= b[i];
    return a;
}

inline Vec operator*(double s, Vec a) {
    for (double& v : a) v *= s;
    return a;
}

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw DimensionError("Vec: size mismatch in dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm_inf(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

// --- linear solve ----------------------------------------------------------

// Solves A x = b by LU with partial pivoting.  The pivot threshold is
// relative to ||A||_inf so near-singularity is detected on the scale of
// the problem, not in absolute terms.
inline Vec solve_linear(const Matrix& a, const Vec& b,
                        double singular_threshold = 1e-12) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionError("solve_linear: square matrix required");
    if (b.size() != n) throw DimensionError("solve_linear: rhs size mismatch");

    const double scale = std::max(a.norm_inf(), 1e-300);
    Matrix lu = a;
    Vec x = b;
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(lu(i, k)) > std::fabs(lu(piv, k))) piv = i;
        if (std::fabs(lu(piv, k)) < singular_threshold * scale)
            throw SingularMatrix("solve_linear: pivot " + std::to_string(k) +
                                 " below threshold (matrix singular to working precision)");
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            std::swap(x[k], x[piv]);
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            lu(i, k) = f;
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
            x[i] -= f * x[k];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        for (std::size_t j = i + 1; j < n; ++j) x[i] -= lu(i, j) * x[j];
        x[i] /= lu(i, i);
    }
    return x;
}

// Column-by-column solve A X = B.
inline Matrix solve_linear(const Matrix& a, const Matrix& b,
                           double singular_threshold = 1e-12) {
    if (b.rows() != a.rows()) throw DimensionError("solve_linear: rhs rows mismatch");
    Matrix x(b.rows(), b.cols());
    Vec col(b.rows());
    for (std::size_t j = 0; j < b.cols(); ++j) {
        for (std::size_t i = 0; i < b.rows(); ++i) col[i] = b(i, j);
        Vec sol = solve_linear(a, col, singular_threshold);
        for (std::size_t i = 0; i < b.rows(); ++i) x(i, j) = sol[i];
    }
    return x;
}

// Determinant via LU with partial pivoting; returns 0 when elimination
// hits an exactly zero pivot.
inline double determinant(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionError("determinant: square matrix required");
    Matrix lu = a;
    double det = 1.0;
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t piv = k;
        for (std::size_t i = k + 1; i < n; ++i)
            if (std::fabs(lu(i, k)) > std::fabs(lu(piv, k))) piv = i;
        if (lu(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (std::size_t j = 0; j < n; ++j) std::swap(lu(k, j), lu(piv, j));
            det = -det;
        }
        det *= lu(k, k);
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = lu(i, k) / lu(k, k);
            for (std::size_t j = k + 1; j < n; ++j) lu(i, j) -= f * lu(k, j);
        }
    }
    return det;
}

// --- symmetric eigenvalues --------------------------------------------------

struct EigenResult {
    Vec values;      // ascending
    Matrix vectors;  // column k is the eigenvector for values[k]
};

// Cyclic Jacobi rotations.  Input must be symmetric to within
// 1e-12 relative to its largest entry; convergence is quadratic so a
// handful of sweeps suffices at these sizes.
inline EigenResult eigen_symmetric(const Matrix& a) {
    const std::size_t n = a.rows();
    if (a.cols() != n) throw DimensionError("eigen_symmetric: square matrix required");
    const double scale = std::max(a.max_abs(), 1e-300);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (std::fabs(a(i, j) - a(j, i)) > 1e-12 * scale)
                throw NotSymmetric("eigen_symmetric: matrix is not symmetric at (" +
                                   std::to_string(i) + "," + std::to_string(j) + ")");

    Matrix m = a;
    Matrix v = Matrix::identity(n);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                off = std::max(off, std::fabs(m(i, j)));
        if (off <= 1e-15 * scale) break;

        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::fabs(m(p, q)) <= 1e-18 * scale) continue;
                const double theta = (m(q, q) - m(p, p)) / (2.0 * m(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double mkp = m(k, p), mkq = m(k, q);
                    m(k, p) = c * mkp - s * mkq;
                    m(k, q) = s * mkp + c * mkq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double mpk = m(p, k), mqk = m(q, k);
                    m(p, k) = c * mpk - s * mqk;
                    m(q, k) = s * mpk + c * mqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }

    EigenResult r;
    r.values.resize(n);
    for (std::size_t i = 0; i < n; ++i) r.values[i] = m(i, i);
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](std::size_t x, std::size_t y) { return r.values[x] < r.values[y]; });
    Vec sorted(n);
    Matrix vs(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        sorted[k] = r.values[order[k]];
        for (std::size_t i = 0; i < n; ++i) vs(i, k) = v(i, order[k]);
    }
    r.values = std::move(sorted);
    r.vectors = std::move(vs);
    return r;
}

inline Vec eigenvalues_symmetric(const Matrix& a) {
    return eigen_symmetric(a).values;
}

} // namespace volterra
