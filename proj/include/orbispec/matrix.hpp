#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "orbispec/errors.hpp"
#include "orbispec/rational.hpp"

namespace orbispec {

// Small dense row-major matrix over an exact scalar type. Everything here is
// value-semantic and immutable from the caller's point of view; the sizes in
// this library are tiny (d <= 10), so no effort is spent on blocking.
template <class T>
class Mat {
public:
    Mat() : rows_(0), cols_(0) {}
    Mat(std::size_t rows, std::size_t cols, T fill = T(0))
        : rows_(rows), cols_(cols), a_(rows * cols, fill) {}

    static Mat identity(std::size_t n) {
        Mat m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

    bool operator==(const Mat& o) const {
        return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_;
    }

    Mat transpose() const {
        Mat t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    Mat operator*(const Mat& o) const {
        if (cols_ != o.rows_) throw InternalError("matrix product shape mismatch");
        Mat r(rows_, o.cols_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t k = 0; k < cols_; ++k) {
                const T& v = (*this)(i, k);
                if (v == 0) continue;
                for (std::size_t j = 0; j < o.cols_; ++j) r(i, j) += v * o(k, j);
            }
        return r;
    }

    std::vector<T> operator*(const std::vector<T>& x) const {
        if (cols_ != x.size()) throw InternalError("matrix-vector shape mismatch");
        std::vector<T> y(rows_, T(0));
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) y[i] += (*this)(i, j) * x[j];
        return y;
    }

    Mat operator+(const Mat& o) const {
        Mat r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] += o.a_[i];
        return r;
    }

    Mat operator-(const Mat& o) const {
        Mat r = *this;
        for (std::size_t i = 0; i < a_.size(); ++i) r.a_[i] -= o.a_[i];
        return r;
    }

private:
    std::size_t rows_, cols_;
    std::vector<T> a_;
};

using ZMat = Mat<Integer>;
using QMat = Mat<Rational>;

inline QMat z_to_q(const ZMat& m) {
    QMat q(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) q(i, j) = Rational(m(i, j));
    return q;
}

inline ZMat scaled_identity(std::size_t n, const Integer& c) {
    ZMat m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = c;
    return m;
}

// Gaussian elimination with exact arithmetic; returns (rank, det-of-square-part).
// det is only meaningful when the matrix is square.
inline std::pair<std::size_t, Rational> gauss(QMat m) {
    const std::size_t rows = m.rows(), cols = m.cols();
    Rational det = 1;
    std::size_t rank = 0;
    for (std::size_t col = 0; col < cols && rank < rows; ++col) {
        std::size_t piv = rank;
        while (piv < rows && m(piv, col) == 0) ++piv;
        if (piv == rows) continue;
        if (piv != rank) {
            for (std::size_t j = 0; j < cols; ++j) std::swap(m(piv, j), m(rank, j));
            det = -det;
        }
        det *= m(rank, col);
        for (std::size_t i = rank + 1; i < rows; ++i) {
            if (m(i, col) == 0) continue;
            Rational f = m(i, col) / m(rank, col);
            for (std::size_t j = col; j < cols; ++j) m(i, j) -= f * m(rank, j);
        }
        ++rank;
    }
    if (rank < std::min(rows, cols)) det = 0;
    return {rank, rank == rows && rows == cols ? det : Rational(0)};
}

inline std::size_t rank(const QMat& m) { return gauss(m).first; }
inline std::size_t rank(const ZMat& m) { return gauss(z_to_q(m)).first; }

inline Rational det(const QMat& m) {
    if (m.rows() != m.cols()) throw InternalError("det of non-square matrix");
    return gauss(m).second;
}

inline Integer det(const ZMat& m) {
    Rational d = det(z_to_q(m));
    if (!is_integer(d)) throw InternalError("integer determinant not integral");
    return numerator(d);
}

inline QMat inverse(const QMat& m) {
    if (m.rows() != m.cols()) throw SingularMatrixError("inverse of non-square matrix");
    const std::size_t n = m.rows();
    QMat a = m;
    QMat inv = QMat::identity(n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && a(piv, col) == 0) ++piv;
        if (piv == n) throw SingularMatrixError("matrix is singular");
        if (piv != col)
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(a(piv, j), a(col, j));
                std::swap(inv(piv, j), inv(col, j));
            }
        Rational p = a(col, col);
        for (std::size_t j = 0; j < n; ++j) {
            a(col, j) /= p;
            inv(col, j) /= p;
        }
        for (std::size_t i = 0; i < n; ++i) {
            if (i == col || a(i, col) == 0) continue;
            Rational f = a(i, col);
            for (std::size_t j = 0; j < n; ++j) {
                a(i, j) -= f * a(col, j);
                inv(i, j) -= f * inv(col, j);
            }
        }
    }
    return inv;
}

// Exact inverse of a unimodular integer matrix.
inline ZMat unimodular_inverse(const ZMat& m) {
    QMat inv = inverse(z_to_q(m));
    ZMat r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (!is_integer(inv(i, j)))
                throw InternalError("unimodular_inverse applied to non-unimodular matrix");
            r(i, j) = numerator(inv(i, j));
        }
    return r;
}

// ---------------------------------------------------------------------------
// Smith normal form
// ---------------------------------------------------------------------------

struct SNFDecomposition {
    ZMat U;    // rows x rows, unimodular
    ZMat V;    // cols x cols, unimodular
    ZMat Uinv; // exact inverse of U
    ZMat Vinv; // exact inverse of V
    std::vector<Integer> diag; // length min(rows, cols); d1 | d2 | ..., zeros last
};

namespace detail {

inline void snf_swap_rows(ZMat& d, ZMat& u, ZMat& uinv, std::size_t i, std::size_t j) {
    for (std::size_t c = 0; c < d.cols(); ++c) std::swap(d(i, c), d(j, c));
    for (std::size_t c = 0; c < uinv.cols(); ++c) std::swap(uinv(i, c), uinv(j, c));
    for (std::size_t r = 0; r < u.rows(); ++r) std::swap(u(r, i), u(r, j));
}

inline void snf_swap_cols(ZMat& d, ZMat& v, ZMat& vinv, std::size_t i, std::size_t j) {
    for (std::size_t r = 0; r < d.rows(); ++r) std::swap(d(r, i), d(r, j));
    for (std::size_t r = 0; r < vinv.rows(); ++r) std::swap(vinv(r, i), vinv(r, j));
    for (std::size_t c = 0; c < v.cols(); ++c) std::swap(v(i, c), v(j, c));
}

// row i += f * row j, keeping A = U * D * V intact.
inline void snf_add_row(ZMat& d, ZMat& u, ZMat& uinv, std::size_t i, std::size_t j,
                        const Integer& f) {
    for (std::size_t c = 0; c < d.cols(); ++c) d(i, c) += f * d(j, c);
    for (std::size_t c = 0; c < uinv.cols(); ++c) uinv(i, c) += f * uinv(j, c);
    for (std::size_t r = 0; r < u.rows(); ++r) u(r, j) -= f * u(r, i);
}

// col i += f * col j.
inline void snf_add_col(ZMat& d, ZMat& v, ZMat& vinv, std::size_t i, std::size_t j,
                        const Integer& f) {
    for (std::size_t r = 0; r < d.rows(); ++r) d(r, i) += f * d(r, j);
    for (std::size_t r = 0; r < vinv.rows(); ++r) vinv(r, i) += f * vinv(r, j);
    for (std::size_t c = 0; c < v.cols(); ++c) v(j, c) -= f * v(i, c);
}

inline void snf_negate_row(ZMat& d, ZMat& u, ZMat& uinv, std::size_t i) {
    for (std::size_t c = 0; c < d.cols(); ++c) d(i, c) = -d(i, c);
    for (std::size_t c = 0; c < uinv.cols(); ++c) uinv(i, c) = -uinv(i, c);
    for (std::size_t r = 0; r < u.rows(); ++r) u(r, i) = -u(r, i);
}

} // namespace detail

// Smith normal form with U * D * V == input. Pivot selection: smallest
// absolute nonzero value, scanning rows then columns, so the decomposition is
// reproducible for a given input.
inline SNFDecomposition snf(const ZMat& input) {
    using namespace detail;
    const std::size_t rows = input.rows(), cols = input.cols();
    ZMat d = input;
    ZMat u = ZMat::identity(rows), uinv = ZMat::identity(rows);
    ZMat v = ZMat::identity(cols), vinv = ZMat::identity(cols);

    const std::size_t n = std::min(rows, cols);
    for (std::size_t t = 0; t < n; ++t) {
        // Find the entry of smallest absolute value in the trailing block.
        std::size_t pi = t, pj = t;
        Integer best = 0;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j) {
                if (d(i, j) == 0) continue;
                Integer a = abs(d(i, j));
                if (best == 0 || a < best) {
                    best = a;
                    pi = i;
                    pj = j;
                }
            }
        if (best == 0) break; // trailing block is zero
        if (pi != t) snf_swap_rows(d, u, uinv, t, pi);
        if (pj != t) snf_swap_cols(d, v, vinv, t, pj);

        bool clean = false;
        while (!clean) {
            clean = true;
            for (std::size_t i = t + 1; i < rows; ++i) {
                if (d(i, t) == 0) continue;
                Integer q = d(i, t) / d(t, t);
                snf_add_row(d, u, uinv, i, t, -q);
                if (d(i, t) != 0) {
                    // remainder became the smaller pivot
                    snf_swap_rows(d, u, uinv, t, i);
                    clean = false;
                }
            }
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (d(t, j) == 0) continue;
                Integer q = d(t, j) / d(t, t);
                snf_add_col(d, v, vinv, j, t, -q);
                if (d(t, j) != 0) {
                    snf_swap_cols(d, v, vinv, t, j);
                    clean = false;
                }
            }
        }
        if (d(t, t) < 0) snf_negate_row(d, u, uinv, t);
    }

    // Enforce the divisibility chain d1 | d2 | ...
    for (std::size_t t = 0; t + 1 < n; ++t) {
        if (d(t, t) == 0) continue;
        for (std::size_t k = t + 1; k < n; ++k) {
            if (d(k, k) % d(t, t) == 0) continue;
            // fold d(k,k) into the pivot position and re-reduce
            snf_add_col(d, v, vinv, t, k, Integer(1));
            bool clean = false;
            while (!clean) {
                clean = true;
                if (d(k, t) != 0) {
                    Integer q = d(k, t) / d(t, t);
                    snf_add_row(d, u, uinv, k, t, -q);
                    if (d(k, t) != 0) {
                        snf_swap_rows(d, u, uinv, t, k);
                        clean = false;
                        continue;
                    }
                }
                if (d(t, k) != 0) {
                    Integer q = d(t, k) / d(t, t);
                    snf_add_col(d, v, vinv, k, t, -q);
                    if (d(t, k) != 0) {
                        snf_swap_cols(d, v, vinv, t, k);
                        clean = false;
                    }
                }
            }
            if (d(t, t) < 0) snf_negate_row(d, u, uinv, t);
        }
    }
    for (std::size_t t = 0; t < n; ++t)
        if (d(t, t) < 0) snf_negate_row(d, u, uinv, t);

    // Zero diagonal entries are already last: a zero pivot terminates the
    // reduction loop.
    SNFDecomposition out;
    out.U = std::move(u);
    out.V = std::move(v);
    out.Uinv = std::move(uinv);
    out.Vinv = std::move(vinv);
    out.diag.resize(n);
    for (std::size_t t = 0; t < n; ++t) out.diag[t] = d(t, t);
    return out;
}

// ---------------------------------------------------------------------------
// Integer polynomials (dense, descending powers, monic leading coefficient
// where stated). coeffs[0] is the leading coefficient.
// ---------------------------------------------------------------------------

using ZPoly = std::vector<Integer>;

inline Integer poly_eval(const ZPoly& p, const Integer& x) {
    Integer r = 0;
    for (const Integer& c : p) r = r * x + c;
    return r;
}

// Exact division of integer polynomials (throws if not divisible). Both monic
// or at least divisor with leading coefficient +-1.
inline ZPoly poly_div_exact(const ZPoly& numer, const ZPoly& denom) {
    if (denom.empty() || denom[0] == 0) throw InternalError("poly division by zero poly");
    if (numer.size() < denom.size()) throw InternalError("poly division degree mismatch");
    ZPoly rem = numer;
    ZPoly quot(numer.size() - denom.size() + 1, Integer(0));
    for (std::size_t i = 0; i + denom.size() <= rem.size(); ++i) {
        if (rem[i] % denom[0] != 0) throw InternalError("polynomial not exactly divisible");
        Integer f = rem[i] / denom[0];
        quot[i] = f;
        for (std::size_t j = 0; j < denom.size(); ++j) rem[i + j] -= f * denom[j];
    }
    for (std::size_t i = quot.size(); i < rem.size(); ++i)
        if (rem[i] != 0) throw InternalError("polynomial not exactly divisible (remainder)");
    return quot;
}

inline bool poly_divides(const ZPoly& denom, const ZPoly& numer) {
    if (numer.size() < denom.size()) return false;
    ZPoly rem = numer;
    for (std::size_t i = 0; i + denom.size() <= rem.size(); ++i) {
        if (rem[i] % denom[0] != 0) return false;
        Integer f = rem[i] / denom[0];
        for (std::size_t j = 0; j < denom.size(); ++j) rem[i + j] -= f * denom[j];
    }
    for (const Integer& c : rem)
        if (c != 0) return false;
    return true;
}

// Characteristic polynomial det(xI - g) via the Faddeev-LeVerrier recursion
// carried out over exact rationals; coefficients of an integer matrix are
// integers, which is asserted. Returned with descending powers, monic.
inline ZPoly char_poly(const ZMat& g) {
    if (g.rows() != g.cols()) throw InternalError("char_poly of non-square matrix");
    const std::size_t d = g.rows();
    QMat a = z_to_q(g);
    QMat m = QMat::identity(d);
    std::vector<Rational> c(d + 1);
    c[0] = 1;
    for (std::size_t k = 1; k <= d; ++k) {
        m = a * m;
        Rational tr = 0;
        for (std::size_t i = 0; i < d; ++i) tr += m(i, i);
        c[k] = -tr / Rational(Integer(k));
        for (std::size_t i = 0; i < d; ++i) m(i, i) += c[k];
    }
    ZPoly out(d + 1);
    for (std::size_t k = 0; k <= d; ++k) {
        if (!is_integer(c[k])) throw InternalError("char_poly produced non-integer coefficient");
        out[k] = numerator(c[k]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Rational LDL^T-style quadratic completion of an SPD matrix:
//   v^T A v = sum_i D[i] * (v_i + sum_{j>i} C(i,j) v_j)^2
// Exact over rationals; throws if A is not positive definite.
// ---------------------------------------------------------------------------

struct QuadraticCompletion {
    std::vector<Rational> D;
    QMat C; // strictly upper-triangular coefficients
};

inline QuadraticCompletion quadratic_completion(const QMat& a) {
    if (a.rows() != a.cols()) throw InternalError("quadratic_completion of non-square matrix");
    const std::size_t n = a.rows();
    QMat q = a;
    for (std::size_t i = 0; i < n; ++i) {
        if (q(i, i) <= 0) throw InternalError("matrix is not positive definite");
        for (std::size_t j = i + 1; j < n; ++j) {
            Rational qji = q(i, j);
            q(i, j) = q(i, j) / q(i, i);
            for (std::size_t k = i + 1; k <= j; ++k) q(k, j) -= qji * q(i, k);
        }
    }
    QuadraticCompletion out;
    out.D.resize(n);
    out.C = QMat(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        out.D[i] = q(i, i);
        for (std::size_t j = i + 1; j < n; ++j) out.C(i, j) = q(i, j);
    }
    return out;
}

} // namespace orbispec
