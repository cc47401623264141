#pragma once

#include <utility>

#include "ltcm/irreducible.hpp"
#include "ltcm/quadext.hpp"
#include "ltcm/tower.hpp"

namespace ltcm {

// Element of the cyclic division algebra D = (F_n / F, sigma, pi) of degree
// n = 2h: x = sum_i coeffs[i] * Pi^i with coefficients on the LEFT, subject to
// Pi * a = sigma(a) * Pi and Pi^n = pi.
class CDAElement {
  public:
    CDAElement() : T_(nullptr) {}
    CDAElement(const Tower& T, std::vector<FnElem> coeffs) : T_(&T), c_(std::move(coeffs)) {
        if (c_.size() != T.deg())
            throw DomainError("coefficient count does not match algebra degree");
    }

    static CDAElement zero(const Tower& T) {
        return CDAElement(T, std::vector<FnElem>(T.deg(), FnElem::zero(T)));
    }
    static CDAElement one(const Tower& T) { return from_fn(T, FnElem::one(T)); }
    static CDAElement from_fn(const Tower& T, const FnElem& a) {
        CDAElement x = zero(T);
        x.c_[0] = a;
        return x;
    }
    static CDAElement from_scalar(const Tower& T, const Scalar& a) {
        return from_fn(T, FnElem::from_base(T, a));
    }
    // Pi^k for any integer k (negative powers through the central pi)
    static CDAElement pi_power(const Tower& T, long k) {
        long n = static_cast<long>(T.deg());
        long r = k % n;
        long q = k / n;
        if (r < 0) {
            r += n;
            q -= 1;
        }
        CDAElement x = zero(T);
        x.c_[static_cast<size_t>(r)] =
            FnElem::from_base(T, Scalar::pi(T.ctx(), q));
        return x;
    }

    const Tower& tower() const {
        if (!T_)
            throw DomainError("element has no algebra");
        return *T_;
    }
    const std::vector<FnElem>& coeffs() const { return c_; }

    bool is_zero_to_precision() const {
        for (const FnElem& a : c_)
            if (!a.is_zero_to_precision())
                return false;
        return true;
    }
    bool is_exact_zero() const {
        for (const FnElem& a : c_)
            if (!a.is_exact_zero())
                return false;
        return true;
    }

    // v_D(sum a_i Pi^i) = min_i (i + n * v(a_i)), certified against
    // approximate zeros exactly as the coordinate valuations are
    long val() const {
        long n = static_cast<long>(tower().deg());
        long cand = LONG_MAX;
        bool all_exact = true;
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_exact_zero())
                continue;
            all_exact = false;
            if (c_[i].is_zero_to_precision())
                continue;
            try {
                cand = std::min(cand, static_cast<long>(i) + n * c_[i].val());
            } catch (const PrecisionExhausted&) {
                // handled by the lower-bound pass below
            }
        }
        if (all_exact)
            throw DomainError("valuation of zero");
        if (cand == LONG_MAX)
            throw PrecisionExhausted("valuation of an approximate zero");
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_exact_zero())
                continue;
            bool uncertain = c_[i].is_zero_to_precision();
            if (!uncertain) {
                try {
                    c_[i].val();
                    continue;
                } catch (const PrecisionExhausted&) {
                    uncertain = true;
                }
            }
            if (uncertain) {
                auto lb = c_[i].val_lower_bound();
                if (lb && static_cast<long>(i) + n * *lb <= cand)
                    throw PrecisionExhausted("valuation hidden below an approximate zero");
            }
        }
        return cand;
    }

    std::optional<long> val_lower_bound() const {
        long n = static_cast<long>(tower().deg());
        std::optional<long> out;
        for (size_t i = 0; i < c_.size(); ++i) {
            if (c_[i].is_exact_zero())
                continue;
            auto lb = c_[i].val_lower_bound();
            if (!lb)
                continue;
            long b = static_cast<long>(i) + n * *lb;
            if (!out || b < *out)
                out = b;
        }
        return out;
    }

    CDAElement operator-() const {
        auto out = c_;
        for (FnElem& a : out)
            a = -a;
        return CDAElement(*T_, std::move(out));
    }

    friend CDAElement operator+(const CDAElement& x, const CDAElement& y) {
        x.check_pair(y);
        auto out = x.c_;
        for (size_t i = 0; i < out.size(); ++i)
            out[i] = out[i] + y.c_[i];
        return CDAElement(*x.T_, std::move(out));
    }
    friend CDAElement operator-(const CDAElement& x, const CDAElement& y) { return x + (-y); }

    // (a Pi^i)(b Pi^j) = a sigma^i(b) Pi^{i+j}, with Pi^n folded to pi
    friend CDAElement operator*(const CDAElement& x, const CDAElement& y) {
        x.check_pair(y);
        const Tower& T = *x.T_;
        size_t n = T.deg();
        Scalar pi1 = Scalar::pi(T.ctx());
        CDAElement out = zero(T);
        for (size_t i = 0; i < n; ++i) {
            if (x.c_[i].is_exact_zero())
                continue;
            for (size_t j = 0; j < n; ++j) {
                if (y.c_[j].is_exact_zero())
                    continue;
                FnElem term = x.c_[i] * y.c_[j].frobenius(static_cast<long>(i));
                size_t k = i + j;
                if (k >= n) {
                    term = pi1 * term;
                    k -= n;
                }
                out.c_[k] = out.c_[k] + term;
            }
        }
        return out;
    }
    friend CDAElement operator*(const Scalar& s, const CDAElement& y) {
        auto out = y.c_;
        for (FnElem& a : out)
            a = s * a;
        return CDAElement(*y.T_, std::move(out));
    }

    friend bool agree(const CDAElement& x, const CDAElement& y) {
        return (x - y).is_zero_to_precision();
    }

    std::string str() const {
        std::string s;
        for (size_t i = 0; i < c_.size(); ++i)
            s += (i ? " + " : "") + c_[i].str() + "*Pi^" + std::to_string(i);
        return s;
    }

  private:
    void check_pair(const CDAElement& o) const {
        if (!T_ || !o.T_ || !T_->same(*o.T_))
            throw DomainError("mixed algebra elements");
    }
    const Tower* T_;
    std::vector<FnElem> c_;
};

// Left multiplication by x on D as a right F_n-module with basis {Pi^j}:
// column j of the matrix holds x * Pi^j in that basis.
inline MatFn cda_rep(const CDAElement& x) {
    const Tower& T = x.tower();
    size_t n = T.deg();
    MatFn m = MatFn::zero(n, n, FnElem::zero(T));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j) {
            size_t r = (i + j) % n;
            FnElem e = x.coeffs()[i].frobenius(-static_cast<long>(r));
            if (i + j >= n)
                e = Scalar::pi(T.ctx()) * e;
            m.at(r, j) = m.at(r, j) + e;
        }
    return m;
}

// Reduced norm: determinant of the splitting representation, certified to lie
// in F.
inline Scalar cda_nrd(const CDAElement& x) {
    const Tower& T = x.tower();
    FnElem d = mat_det(cda_rep(x));
    for (size_t i = 1; i < T.deg(); ++i)
        if (!d.coords()[i].is_zero_to_precision())
            throw NotRational("reduced norm has a nonzero generator component");
    return d.coords()[0];
}

// v_F(Nrd x), computed from the coefficient valuations
inline long cda_val(const CDAElement& x) {
    return x.val();
}

inline CDAElement cda_mul(const CDAElement& x, const CDAElement& y) {
    return x * y;
}

inline CDAElement cda_inv(const CDAElement& x) {
    const Tower& T = x.tower();
    if (x.is_exact_zero())
        throw DomainError("inverse of zero");
    if (x.is_zero_to_precision())
        throw PrecisionExhausted("inverse of an approximate zero");
    size_t n = T.deg();
    // solve R(x) w = e_0 over F_n, then convert right coordinates w_j to
    // left coefficients sigma^j(w_j)
    MatFn R = cda_rep(x);
    MatFn Ri = mat_inverse(R);
    std::vector<FnElem> c;
    c.reserve(n);
    for (size_t j = 0; j < n; ++j)
        c.push_back(Ri.at(j, 0).frobenius(static_cast<long>(j)));
    CDAElement out(T, std::move(c));
    if (!agree(x * out, CDAElement::one(T)))
        throw PrecisionExhausted("inverse failed its round-trip check");
    return out;
}

inline CDAElement operator/(const CDAElement& x, const CDAElement& y) {
    return x * cda_inv(y);
}

template <>
struct FieldOps<CDAElement> {
    static bool zeroish(const CDAElement& x) { return x.is_zero_to_precision(); }
    static bool exact_zero(const CDAElement& x) { return x.is_exact_zero(); }
    static long pivot_val(const CDAElement& x) { return x.val(); }
    static std::optional<long> lower_bound(const CDAElement& x) { return x.val_lower_bound(); }
    static CDAElement zero(const CDAElement& model) { return CDAElement::zero(model.tower()); }
    static CDAElement one(const CDAElement& model) { return CDAElement::one(model.tower()); }
    static CDAElement approx_with_bound(const CDAElement& model, long b) {
        const Tower& T = model.tower();
        long n = static_cast<long>(T.deg());
        long bf = (b >= 0) ? (b + n - 1) / n : b / n;
        std::vector<FnElem> c(T.deg(), FieldOps<FnElem>::approx_with_bound(FnElem::zero(T), bf));
        return CDAElement(T, std::move(c));
    }
};

// Matrices over D. Only the container operations of Mat apply; determinants
// and characteristic polynomials assume commutativity and must not be used
// here. The sanctioned scalar invariant is nrd_block.
using CDAMat = Mat<CDAElement>;

// NRD of a matrix over D: expand every entry to its n x n splitting block and
// take the determinant over F_n; certified to lie in F.
inline Scalar nrd_block(const CDAMat& M) {
    if (M.rows() != M.cols() || M.rows() == 0)
        throw DomainError("nrd_block: matrix must be square and nonempty");
    const Tower& T = M.at(0, 0).tower();
    size_t n = T.deg(), m = M.rows();
    MatFn big = MatFn::zero(m * n, m * n, FnElem::zero(T));
    for (size_t r = 0; r < m; ++r)
        for (size_t c = 0; c < m; ++c)
            big.set_block(r * n, c * n, cda_rep(M.at(r, c)));
    FnElem d = mat_det(big);
    for (size_t i = 1; i < n; ++i)
        if (!d.coords()[i].is_zero_to_precision())
            throw NotRational("matrix reduced norm has a nonzero generator component");
    return d.coords()[0];
}

// Gauss-Jordan with row operations applied on the left (order matters over D).
inline CDAMat cda_mat_inverse(const CDAMat& M) {
    if (M.rows() != M.cols())
        throw DomainError("cda_mat_inverse: matrix must be square");
    size_t n = M.rows();
    CDAMat w = M;
    CDAMat inv = CDAMat::identity(n, CDAElement::one(M.at(0, 0).tower()));
    for (size_t k = 0; k < n; ++k) {
        auto piv = detail::min_val_pivot(w, k, k);
        if (!piv)
            throw SingularMatrix("cda_mat_inverse: no certified pivot in column " +
                                 std::to_string(k));
        if (*piv != k)
            for (size_t j = 0; j < n; ++j) {
                std::swap(w.at(k, j), w.at(*piv, j));
                std::swap(inv.at(k, j), inv.at(*piv, j));
            }
        CDAElement pinv = cda_inv(w.at(k, k));
        for (size_t j = 0; j < n; ++j) {
            w.at(k, j) = pinv * w.at(k, j);
            inv.at(k, j) = pinv * inv.at(k, j);
        }
        for (size_t i = 0; i < n; ++i) {
            if (i == k || w.at(i, k).is_zero_to_precision())
                continue;
            CDAElement f = w.at(i, k);
            for (size_t j = 0; j < n; ++j) {
                w.at(i, j) = w.at(i, j) - f * w.at(k, j);
                inv.at(i, j) = inv.at(i, j) - f * inv.at(k, j);
            }
        }
    }
    return inv;
}

struct CartanResult {
    CDAMat U;
    CDAMat diag; // diag(Pi^{a_i})
    std::vector<long> exponents; // nondecreasing Pi-adic exponents
    CDAMat V;
};

// Cartan decomposition M = U * diag(Pi^{a_i}) * V over the maximal order:
// U, V integral with integral inverses. Row operations act on the left,
// column operations on the right.
inline CartanResult cartan_snf_OD(const CDAMat& M) {
    if (M.rows() != M.cols() || M.rows() == 0)
        throw DomainError("cartan_snf_OD: matrix must be square and nonempty");
    const Tower& T = M.at(0, 0).tower();
    size_t n = M.rows();
    CDAMat w = M;
    CDAMat U = CDAMat::identity(n, CDAElement::one(T));
    CDAMat V = CDAMat::identity(n, CDAElement::one(T));
    // invariant: M = U * w * V throughout
    std::vector<long> a;
    for (size_t k = 0; k < n; ++k) {
        std::optional<std::pair<size_t, size_t>> best;
        long best_v = 0;
        for (size_t i = k; i < n; ++i)
            for (size_t j = k; j < n; ++j) {
                if (w.at(i, j).is_zero_to_precision())
                    continue;
                long v = w.at(i, j).val();
                if (!best || v < best_v) {
                    best = {i, j};
                    best_v = v;
                }
            }
        if (!best)
            throw SingularMatrix("cartan_snf_OD: no certified pivot in trailing block");
        auto [pi_, pj_] = *best;
        if (pi_ != k)
            for (size_t j = 0; j < n; ++j) {
                std::swap(w.at(k, j), w.at(pi_, j));
                std::swap(U.at(j, k), U.at(j, pi_));
            }
        if (pj_ != k)
            for (size_t i = 0; i < n; ++i) {
                std::swap(w.at(i, k), w.at(i, pj_));
                std::swap(V.at(k, i), V.at(pj_, i));
            }
        const CDAElement p = w.at(k, k);
        CDAElement pinv = cda_inv(p);
        for (size_t i = k + 1; i < n; ++i) {
            if (w.at(i, k).is_zero_to_precision())
                continue;
            CDAElement f = w.at(i, k) * pinv; // right-divide: integral by pivot minimality
            for (size_t j = k; j < n; ++j)
                w.at(i, j) = w.at(i, j) - f * w.at(k, j);
            for (size_t j = 0; j < n; ++j)
                U.at(j, k) = U.at(j, k) + U.at(j, i) * f;
        }
        for (size_t j = k + 1; j < n; ++j) {
            if (w.at(k, j).is_zero_to_precision())
                continue;
            CDAElement g = pinv * w.at(k, j); // left-divide
            for (size_t i = k; i < n; ++i)
                w.at(i, j) = w.at(i, j) - w.at(i, k) * g;
            for (size_t i = 0; i < n; ++i)
                V.at(k, i) = V.at(k, i) + g * V.at(j, i);
        }
        long vk = p.val();
        a.push_back(vk);
        // absorb the unit u = p * Pi^{-vk} into column k of U
        CDAElement u = p * CDAElement::pi_power(T, -vk);
        for (size_t i = 0; i < n; ++i)
            U.at(i, k) = U.at(i, k) * u;
        w.at(k, k) = CDAElement::pi_power(T, vk);
    }
    CDAMat d = CDAMat::zero(n, n, CDAElement::zero(T));
    for (size_t k = 0; k < n; ++k)
        d.at(k, k) = CDAElement::pi_power(T, a[k]);
    return CartanResult{U, d, a, V};
}

// Embedding of the quadratic extension K into D, carried by the image of the
// trace-zero generator.
struct KEmbedding {
    const Tower* T;
    QuadExt K;
    CDAElement gen_img; // embeds K.gen; gen_img^2 = K.gen_sq() central
    CDAElement gen_inv;

    CDAElement embed(const ExtScalar& x) const {
        const Tower& tw = *T;
        return CDAElement::from_scalar(tw, x.a()) + x.b() * gen_img;
    }
    // conjugation on the embedded K is inner by gen_img
    CDAElement conj_inner(const CDAElement& x) const { return gen_img * x * gen_inv; }
};

namespace detail {

// lexicographically first residue-field solution of z^2 = eps over
// F_p[y]/(fbar); existence: eps lies in F_p and the field contains F_{p^2}
inline std::vector<long> residue_sqrt_nonresidue(const Tower& T) {
    long p = static_cast<long>(T.ctx().p());
    long eps = static_cast<long>(smallest_nonresidue(T.ctx().p()));
    fppoly::P f = T.def_poly();
    size_t n = T.deg();
    std::vector<long> digits(n, 0);
    for (;;) {
        fppoly::P z(digits.begin(), digits.end());
        fppoly::strip(z);
        fppoly::P z2 = fppoly::rem(fppoly::mul(z, z, p), f, p);
        if (fppoly::deg(z2) == 0 && !z2.empty() && z2[0] == eps)
            return digits;
        size_t k = 0;
        while (k < n && ++digits[k] == p) {
            digits[k] = 0;
            ++k;
        }
        if (k == n)
            throw DomainError("no residue square root of the nonresidue exists");
    }
}

// lexicographically first residue solution of c * c^{p^h} = eps (the norm to
// the index-2 subfield)
inline std::vector<long> residue_norm_root(const Tower& T, long h) {
    long p = static_cast<long>(T.ctx().p());
    long eps = static_cast<long>(smallest_nonresidue(T.ctx().p()));
    fppoly::P f = T.def_poly();
    size_t n = T.deg();
    std::vector<long> digits(n, 0);
    for (;;) {
        fppoly::P c(digits.begin(), digits.end());
        fppoly::strip(c);
        if (!c.empty()) {
            // c^{p^h} via h-fold Frobenius
            fppoly::P cq = c;
            for (long step = 0; step < h; ++step) {
                fppoly::P acc = {1};
                fppoly::P base = cq;
                long e = p;
                while (e) {
                    if (e & 1)
                        acc = fppoly::rem(fppoly::mul(acc, base, p), f, p);
                    base = fppoly::rem(fppoly::mul(base, base, p), f, p);
                    e >>= 1;
                }
                cq = acc;
            }
            fppoly::P nm = fppoly::rem(fppoly::mul(c, cq, p), f, p);
            if (fppoly::deg(nm) == 0 && !nm.empty() && nm[0] == eps)
                return digits;
        }
        size_t k = 0;
        while (k < n && ++digits[k] == p) {
            digits[k] = 0;
            ++k;
        }
        if (k == n)
            throw DomainError("no residue norm root exists");
    }
}

} // namespace detail

// The canonical embedding K -> D. Unramified K lands in the subfield F_2 of
// F_n through a square root of the nonresidue; ramified K goes to Pi^h * c
// with the unit c correcting (Pi^h c)^2 = pi * u.
inline KEmbedding embed_quadratic(const Tower& T, const QuadExt& K) {
    if (!K.ctx().same(T.ctx()))
        throw DomainError("embedding requires matching base field parameters");
    size_t n = T.deg();
    if (n % 2 != 0 || n == 0)
        throw DomainError("algebra degree must be even to embed a quadratic extension");
    long h = static_cast<long>(n / 2);
    const PadicContext& C = T.ctx();

    CDAElement img = CDAElement::zero(T);
    if (!K.ramified()) {
        // Newton-refine the residue square root of eps
        FnElem z = FnElem::from_int_coords(T, detail::residue_sqrt_nonresidue(T));
        FnElem eps = FnElem::from_base(T, K.gen_sq());
        Scalar two = Scalar::from_int(C, 2);
        for (int it = 0; it < 128; ++it) {
            FnElem err = z * z - eps;
            if (err.is_zero_to_precision())
                break;
            z = z - err / (two * z);
        }
        if (!(z * z - eps).is_zero_to_precision())
            throw PrecisionExhausted("square root refinement did not converge");
        img = CDAElement::from_fn(T, z);
    } else {
        // target (Pi^h c)^2 = pi * u, i.e. c * sigma^h(c) = u
        Scalar u = K.gen_sq() / Scalar::pi(C);
        FnElem target = FnElem::from_base(T, u);
        FnElem c = FnElem::one(T);
        if (K.ram_unit_is_nonresidue()) {
            c = FnElem::from_int_coords(T, detail::residue_norm_root(T, h));
            Scalar half = Scalar::from_int(C, 2).inv();
            for (int it = 0; it < 128; ++it) {
                FnElem nm = c * c.frobenius(h);
                FnElem err = target / nm - FnElem::one(T);
                if (err.is_zero_to_precision())
                    break;
                c = c * (FnElem::one(T) + half * err);
            }
            if (!(c * c.frobenius(h) - target).is_zero_to_precision())
                throw PrecisionExhausted("norm equation refinement did not converge");
        }
        std::vector<FnElem> coeffs(n, FnElem::zero(T));
        coeffs[static_cast<size_t>(h)] = c.frobenius(h); // Pi^h * c in left form
        img = CDAElement(T, std::move(coeffs));
    }

    // the defining relation of the embedding
    CDAElement sq = img * img;
    if (!agree(sq, CDAElement::from_scalar(T, K.gen_sq())))
        throw DomainError("no matching embedding at current parameters");
    return KEmbedding{&T, K, img, cda_inv(img)};
}

// j = j_plus + j_minus with j_plus commuting and j_minus skew-commuting with
// the embedded K; realized by the inner involution of the trace-zero
// generator (its square is central, so the conjugation is involutive).
inline std::pair<CDAElement, CDAElement> pm_decompose(const CDAElement& j, const KEmbedding& emb) {
    const Tower& T = j.tower();
    Scalar half = Scalar::from_int(T.ctx(), 2).inv();
    CDAElement conj = emb.conj_inner(j);
    return {half * (j + conj), half * (j - conj)};
}

// Minimal polynomial of x over F by linear-dependency search on its powers in
// the coefficient coordinates (dimension n^2 over F).
inline PolyF cda_min_poly(const CDAElement& x) {
    const Tower& T = x.tower();
    size_t n = T.deg();
    size_t dim = n * n;
    auto vectorize = [&](const CDAElement& e) {
        std::vector<Scalar> v;
        v.reserve(dim);
        for (const FnElem& a : e.coeffs())
            for (const Scalar& s : a.coords())
                v.push_back(s);
        return v;
    };
    std::vector<std::vector<Scalar>> pows;
    pows.push_back(vectorize(CDAElement::one(T)));
    CDAElement acc = CDAElement::one(T);
    for (size_t k = 1; k <= n; ++k) {
        acc = acc * x;
        std::vector<Scalar> vk = vectorize(acc);
        MatF A = MatF::zero(dim, k, Scalar::exact_zero(T.ctx()));
        for (size_t j = 0; j < k; ++j)
            for (size_t i = 0; i < dim; ++i)
                A.at(i, j) = pows[j][i];
        auto sol = linear_solve(A, vk);
        if (sol) {
            std::vector<Scalar> coeffs;
            for (size_t j = 0; j < k; ++j)
                coeffs.push_back(-(*sol)[j]);
            coeffs.push_back(Scalar::one(T.ctx()));
            return PolyF(std::move(coeffs));
        }
        pows.push_back(std::move(vk));
    }
    // a field element of D always satisfies a polynomial of degree dividing n
    throw NotRational("no linear dependence among powers up to the algebra degree");
}

// Invariant polynomial of j relative to the embedded K: the minimal
// polynomial over F of j' = j+ (j+ - j-)^{-1} j+ (j+ + j-)^{-1}. Strict mode
// enforces the hypotheses of the closed intersection formula: degree exactly
// h and irreducible.
inline PolyF invariant_poly_D(const CDAElement& j, const KEmbedding& emb, long h,
                              bool strict = false) {
    if (2 * h != static_cast<long>(j.tower().deg()))
        throw DomainError("h does not match the algebra degree");
    if (j.is_zero_to_precision())
        throw DegenerateElement("invariant polynomial of zero");
    auto [jp, jm] = pm_decompose(j, emb);
    CDAElement d = jp - jm;
    if (d.is_zero_to_precision())
        throw DegenerateElement("j_plus - j_minus is not invertible");
    CDAElement jprime = jp * cda_inv(d) * jp * cda_inv(j);
    PolyF P = cda_min_poly(jprime);
    if (P.degree() > h)
        throw NotRational("invariant polynomial degree exceeds h");
    if (strict) {
        if (P.degree() != h)
            throw NotIrreducible("invariant polynomial degree below h in strict mode");
        if (!is_irreducible(P))
            throw NotIrreducible("invariant polynomial is reducible");
    }
    return P;
}

} // namespace ltcm
