#pragma once

#include <algorithm>
#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "ltcm/errors.hpp"
#include "ltcm/poly.hpp"

namespace ltcm {

template <class T>
class Mat {
  public:
    Mat(size_t rows, size_t cols, const T& fill)
        : r_(rows), c_(cols), e_(rows * cols, fill) {}

    static Mat identity(size_t n, const T& model) {
        Mat m(n, n, FieldOps<T>::zero(model));
        for (size_t i = 0; i < n; ++i)
            m.at(i, i) = FieldOps<T>::one(model);
        return m;
    }
    static Mat zero(size_t rows, size_t cols, const T& model) {
        return Mat(rows, cols, FieldOps<T>::zero(model));
    }

    size_t rows() const { return r_; }
    size_t cols() const { return c_; }

    T& at(size_t i, size_t j) { return e_[i * c_ + j]; }
    const T& at(size_t i, size_t j) const { return e_[i * c_ + j]; }

    Mat block(size_t i0, size_t j0, size_t rows, size_t cols) const {
        Mat out(rows, cols, e_[0]);
        for (size_t i = 0; i < rows; ++i)
            for (size_t j = 0; j < cols; ++j)
                out.at(i, j) = at(i0 + i, j0 + j);
        return out;
    }
    void set_block(size_t i0, size_t j0, const Mat& b) {
        for (size_t i = 0; i < b.rows(); ++i)
            for (size_t j = 0; j < b.cols(); ++j)
                at(i0 + i, j0 + j) = b.at(i, j);
    }

    Mat transpose() const {
        Mat out(c_, r_, e_[0]);
        for (size_t i = 0; i < r_; ++i)
            for (size_t j = 0; j < c_; ++j)
                out.at(j, i) = at(i, j);
        return out;
    }

    friend Mat operator+(const Mat& x, const Mat& y) {
        Mat out = x;
        for (size_t k = 0; k < out.e_.size(); ++k)
            out.e_[k] = out.e_[k] + y.e_[k];
        return out;
    }
    friend Mat operator-(const Mat& x, const Mat& y) {
        Mat out = x;
        for (size_t k = 0; k < out.e_.size(); ++k)
            out.e_[k] = out.e_[k] - y.e_[k];
        return out;
    }
    Mat operator-() const {
        Mat out = *this;
        for (auto& v : out.e_)
            v = -v;
        return out;
    }
    friend Mat operator*(const Mat& x, const Mat& y) {
        Mat out = Mat::zero(x.r_, y.c_, x.e_[0]);
        for (size_t i = 0; i < x.r_; ++i)
            for (size_t k = 0; k < x.c_; ++k)
                for (size_t j = 0; j < y.c_; ++j)
                    out.at(i, j) = out.at(i, j) + x.at(i, k) * y.at(k, j);
        return out;
    }
    friend Mat operator*(const T& s, const Mat& y) {
        Mat out = y;
        for (auto& v : out.e_)
            v = s * v;
        return out;
    }

    friend bool agree(const Mat& x, const Mat& y) {
        if (x.r_ != y.r_ || x.c_ != y.c_)
            return false;
        for (size_t k = 0; k < x.e_.size(); ++k)
            if (!FieldOps<T>::zeroish(x.e_[k] - y.e_[k]))
                return false;
        return true;
    }

  private:
    size_t r_, c_;
    std::vector<T> e_;
};

using MatF = Mat<Scalar>;
using MatK = Mat<ExtScalar>;

namespace detail {

// Pivot with the smallest certified valuation in column j, rows [k, n).
// Zero-to-precision entries are skipped; returns nullopt if none qualify.
template <class T>
std::optional<size_t> min_val_pivot(const Mat<T>& m, size_t k, size_t j) {
    std::optional<size_t> best;
    long best_v = 0;
    for (size_t i = k; i < m.rows(); ++i) {
        const T& x = m.at(i, j);
        if (FieldOps<T>::zeroish(x))
            continue;
        long v = FieldOps<T>::pivot_val(x);
        if (!best || v < best_v) {
            best = i;
            best_v = v;
        }
    }
    return best;
}

// Sound valuation lower bound for the determinant of the trailing block
// rows/cols [k, n): one factor per row, so sum the per-row minima.
template <class T>
std::optional<long> tail_det_bound(const Mat<T>& m, size_t k) {
    long total = 0;
    for (size_t i = k; i < m.rows(); ++i) {
        std::optional<long> row_min;
        for (size_t j = k; j < m.cols(); ++j) {
            auto lb = FieldOps<T>::lower_bound(m.at(i, j));
            if (!lb)
                continue; // exact zero never contributes
            if (!row_min || *lb < *row_min)
                row_min = lb;
        }
        if (!row_min)
            return std::nullopt; // a fully exact-zero row: det is exactly zero
        total += *row_min;
    }
    return total;
}

} // namespace detail

// Determinant by elimination with minimum-valuation pivoting. A column with
// no certified-nonzero pivot yields a zero-to-precision result (never a
// throw): the bound accumulates the pivots found so far plus a sound bound
// on the unresolved block.
template <class T>
T mat_det(const Mat<T>& m) {
    if (m.rows() != m.cols())
        throw DomainError("mat_det: matrix must be square");
    size_t n = m.rows();
    if (n == 0)
        throw DomainError("mat_det: empty matrix");
    Mat<T> w = m;
    T acc = FieldOps<T>::one(m.at(0, 0));
    bool neg = false;
    for (size_t k = 0; k < n; ++k) {
        auto piv = detail::min_val_pivot(w, k, k);
        if (!piv) {
            auto bound = detail::tail_det_bound(w, k);
            if (!bound)
                return FieldOps<T>::zero(m.at(0, 0));
            T tail = FieldOps<T>::approx_with_bound(m.at(0, 0), *bound);
            T out = acc * tail;
            return neg ? -out : out;
        }
        if (*piv != k) {
            for (size_t j = 0; j < n; ++j)
                std::swap(w.at(k, j), w.at(*piv, j));
            neg = !neg;
        }
        const T p = w.at(k, k);
        acc = acc * p;
        for (size_t i = k + 1; i < n; ++i) {
            if (FieldOps<T>::zeroish(w.at(i, k)))
                continue;
            T f = w.at(i, k) / p;
            for (size_t j = k; j < n; ++j)
                w.at(i, j) = w.at(i, j) - f * w.at(k, j);
        }
    }
    return neg ? -acc : acc;
}

// Inverse by Gauss-Jordan with minimum-valuation pivoting.
template <class T>
Mat<T> mat_inverse(const Mat<T>& m) {
    if (m.rows() != m.cols())
        throw DomainError("mat_inverse: matrix must be square");
    size_t n = m.rows();
    Mat<T> w = m;
    Mat<T> inv = Mat<T>::identity(n, m.at(0, 0));
    for (size_t k = 0; k < n; ++k) {
        auto piv = detail::min_val_pivot(w, k, k);
        if (!piv)
            throw SingularMatrix("mat_inverse: no certified pivot in column " +
                                 std::to_string(k));
        if (*piv != k)
            for (size_t j = 0; j < n; ++j) {
                std::swap(w.at(k, j), w.at(*piv, j));
                std::swap(inv.at(k, j), inv.at(*piv, j));
            }
        T p = w.at(k, k);
        for (size_t j = 0; j < n; ++j) {
            w.at(k, j) = w.at(k, j) / p;
            inv.at(k, j) = inv.at(k, j) / p;
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == k || FieldOps<T>::zeroish(w.at(i, k)))
                continue;
            T f = w.at(i, k);
            for (size_t j = 0; j < n; ++j) {
                w.at(i, j) = w.at(i, j) - f * w.at(k, j);
                inv.at(i, j) = inv.at(i, j) - f * inv.at(k, j);
            }
        }
    }
    return inv;
}

// Characteristic polynomial, division-free (Berkowitz). Monic, ascending
// coefficients, certified against det via eval-at-0 in tests.
template <class T>
Poly<T> mat_charpoly(const Mat<T>& m) {
    if (m.rows() != m.cols())
        throw DomainError("mat_charpoly: matrix must be square");
    size_t n = m.rows();
    if (n == 0)
        throw DomainError("mat_charpoly: empty matrix");
    const T one = FieldOps<T>::one(m.at(0, 0));
    const T zero = FieldOps<T>::zero(m.at(0, 0));
    // descending coefficients of charpoly of leading r x r submatrix
    std::vector<T> cur = {one, -m.at(0, 0)};
    for (size_t r = 1; r < n; ++r) {
        // column generator t = [1, -d, -q_0, ..., -q_{r-1}],
        // q_k = R A^k C over the leading r x r block A
        std::vector<T> t;
        t.push_back(one);
        t.push_back(-m.at(r, r));
        std::vector<T> v(r); // A^k C, starts at C
        for (size_t i = 0; i < r; ++i)
            v[i] = m.at(i, r);
        for (size_t k = 0; k < r; ++k) {
            T q = zero;
            for (size_t i = 0; i < r; ++i)
                q = q + m.at(r, i) * v[i];
            t.push_back(-q);
            if (k + 1 < r) {
                std::vector<T> nv(r, zero);
                for (size_t i = 0; i < r; ++i)
                    for (size_t j = 0; j < r; ++j)
                        nv[i] = nv[i] + m.at(i, j) * v[j];
                v = std::move(nv);
            }
        }
        // Toeplitz multiply: new[i] = sum_j t[i-j] * cur[j]
        std::vector<T> next(r + 2, zero);
        for (size_t i = 0; i < r + 2; ++i)
            for (size_t j = 0; j < cur.size(); ++j)
                if (i >= j && i - j < t.size())
                    next[i] = next[i] + t[i - j] * cur[j];
        cur = std::move(next);
    }
    std::reverse(cur.begin(), cur.end());
    return Poly<T>(std::move(cur));
}

// Resultant of monic polynomials via the Sylvester determinant.
// res(X - a, X - b) = a - b, and res(P, Q) = prod of root differences.
template <class T>
T resultant(const Poly<T>& P, const Poly<T>& Q) {
    if (!P.monic() || !Q.monic())
        throw DomainError("resultant: both polynomials must be monic");
    long dm = P.degree(), dn = Q.degree();
    const T one = FieldOps<T>::one(P.coeff(P.degree()));
    if (dm == 0 || dn == 0)
        return one;
    size_t m = static_cast<size_t>(dm), n = static_cast<size_t>(dn);
    Mat<T> s = Mat<T>::zero(m + n, m + n, one);
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k <= m; ++k)
            s.at(i, i + k) = P.coeff(m - k);
    for (size_t i = 0; i < m; ++i)
        for (size_t k = 0; k <= n; ++k)
            s.at(n + i, i + k) = Q.coeff(n - k);
    return mat_det(s);
}

// Solve A c = b for a full-column-rank A (rows >= cols). Returns nullopt when
// the system is inconsistent (b outside the column span). A rank-deficient A
// cannot be told apart from precision loss, so it raises PrecisionExhausted.
template <class T>
std::optional<std::vector<T>> linear_solve(const Mat<T>& A, const std::vector<T>& b) {
    size_t rows = A.rows(), cols = A.cols();
    if (b.size() != rows || cols > rows)
        throw DomainError("linear_solve: shape mismatch");
    Mat<T> w(rows, cols + 1, FieldOps<T>::zero(b[0]));
    for (size_t i = 0; i < rows; ++i) {
        for (size_t j = 0; j < cols; ++j)
            w.at(i, j) = A.at(i, j);
        w.at(i, cols) = b[i];
    }
    std::vector<size_t> pivot_row(cols);
    std::vector<bool> used(rows, false);
    for (size_t j = 0; j < cols; ++j) {
        std::optional<size_t> piv;
        long best_v = 0;
        for (size_t i = 0; i < rows; ++i) {
            if (used[i] || FieldOps<T>::zeroish(w.at(i, j)))
                continue;
            long v = FieldOps<T>::pivot_val(w.at(i, j));
            if (!piv || v < best_v) {
                piv = i;
                best_v = v;
            }
        }
        if (!piv)
            throw PrecisionExhausted("linear_solve: no certified pivot (rank-deficient input)");
        used[*piv] = true;
        pivot_row[j] = *piv;
        T p = w.at(*piv, j);
        for (size_t jj = j; jj <= cols; ++jj)
            w.at(*piv, jj) = w.at(*piv, jj) / p;
        for (size_t i = 0; i < rows; ++i) {
            if (i == *piv || FieldOps<T>::zeroish(w.at(i, j)))
                continue;
            T f = w.at(i, j);
            for (size_t jj = j; jj <= cols; ++jj)
                w.at(i, jj) = w.at(i, jj) - f * w.at(*piv, jj);
        }
    }
    for (size_t i = 0; i < rows; ++i)
        if (!used[i] && !FieldOps<T>::zeroish(w.at(i, cols)))
            return std::nullopt; // inconsistent
    std::vector<T> c;
    c.reserve(cols);
    for (size_t j = 0; j < cols; ++j)
        c.push_back(w.at(pivot_row[j], cols));
    return c;
}

struct SNFResult {
    MatF U;
    MatF V;
    std::vector<long> exponents; // nondecreasing
};

// Smith normal form over the valuation ring: m = U * diag(pi^a_k) * V with
// U, V of unit determinant. Requires certified-nonsingular input.
inline SNFResult snf(const MatF& m) {
    if (m.rows() != m.cols())
        throw DomainError("snf: matrix must be square");
    size_t n = m.rows();
    const Scalar one = FieldOps<Scalar>::one(m.at(0, 0));
    MatF w = m;
    MatF U = MatF::identity(n, one);
    MatF V = MatF::identity(n, one);
    // invariant: m = U * w * V throughout
    std::vector<long> a;
    for (size_t k = 0; k < n; ++k) {
        std::optional<std::pair<size_t, size_t>> best;
        long best_v = 0;
        for (size_t i = k; i < n; ++i)
            for (size_t j = k; j < n; ++j) {
                const Scalar& x = w.at(i, j);
                if (x.is_zero_to_precision())
                    continue;
                long v = x.val();
                if (!best || v < best_v) {
                    best = {i, j};
                    best_v = v;
                }
            }
        if (!best)
            throw SingularMatrix("snf: no certified pivot in trailing block");
        auto [pi_, pj_] = *best;
        if (pi_ != k)
            for (size_t j = 0; j < n; ++j) {
                std::swap(w.at(k, j), w.at(pi_, j));
                std::swap(U.at(j, k), U.at(j, pi_)); // U <- U * swap
            }
        if (pj_ != k)
            for (size_t i = 0; i < n; ++i) {
                std::swap(w.at(i, k), w.at(i, pj_));
                std::swap(V.at(k, i), V.at(pj_, i)); // V <- swap * V
            }
        const Scalar p = w.at(k, k);
        for (size_t i = k + 1; i < n; ++i) {
            if (w.at(i, k).is_zero_to_precision())
                continue;
            Scalar f = w.at(i, k) / p; // integral: p has minimal valuation
            for (size_t j = k; j < n; ++j)
                w.at(i, j) = w.at(i, j) - f * w.at(k, j);
            for (size_t j = 0; j < n; ++j)
                U.at(j, k) = U.at(j, k) + f * U.at(j, i); // inverse transvection
        }
        for (size_t j = k + 1; j < n; ++j) {
            if (w.at(k, j).is_zero_to_precision())
                continue;
            Scalar f = w.at(k, j) / p;
            for (size_t i = k; i < n; ++i)
                w.at(i, j) = w.at(i, j) - f * w.at(i, k);
            for (size_t i = 0; i < n; ++i)
                V.at(k, i) = V.at(k, i) + f * V.at(j, i);
        }
        long vk = p.val();
        a.push_back(vk);
        // absorb the unit into row k of V so the diagonal is an exact pi power
        Scalar u = p / Scalar::pi(p.ctx(), vk);
        for (size_t i = 0; i < n; ++i)
            V.at(k, i) = u * V.at(k, i);
        w.at(k, k) = Scalar::pi(p.ctx(), vk);
    }
    return SNFResult{U, V, a};
}

} // namespace ltcm
