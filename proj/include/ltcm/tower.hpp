#pragma once

#include <climits>
#include <vector>

#include "ltcm/fppoly.hpp"
#include "ltcm/matrix.hpp"

namespace ltcm {

class FnElem;

// Unramified degree-n extension F_n = F[y]/(f), f the first monic lift (in
// odometer order on the digit vector, least significant first) of an
// irreducible residue polynomial. Carries the Hensel-lifted Frobenius sigma
// with sigma(y) = the root of f congruent to y^p, of exact order n.
// All tables are immutable after construction and safe to share.
class Tower {
  public:
    Tower(const PadicContext& C, size_t n) : C_(&C), n_(n) {
        if (n < 1)
            throw DomainError("tower degree must be positive");
        pick_def_poly();
        build_reduction();
        build_frobenius();
    }

    const PadicContext& ctx() const { return *C_; }
    size_t deg() const { return n_; }
    // ascending digits of f, monic, entries in [0, p)
    const std::vector<long>& def_poly() const { return f_; }
    bool same(const Tower& o) const { return C_->same(*o.C_) && n_ == o.n_; }

    // matrix of sigma^k on the coordinate column vectors
    const MatF& frob(long k) const {
        long r = k % static_cast<long>(n_);
        if (r < 0)
            r += static_cast<long>(n_);
        return frob_[static_cast<size_t>(r)];
    }

    // coordinates of y^(n+k), 0 <= k < n-1
    const std::vector<Scalar>& red_row(size_t k) const { return red_[k]; }

    std::vector<Scalar> zero_coords() const {
        return std::vector<Scalar>(n_, Scalar::exact_zero(*C_));
    }

  private:
    void pick_def_poly() {
        long p = static_cast<long>(C_->p());
        if (n_ == 1) {
            f_ = {0, 1}; // y, so F_1 = F with y = 0
            return;
        }
        std::vector<long> digits(n_, 0);
        for (;;) {
            fppoly::P f = digits;
            f.push_back(1);
            if (fppoly::irreducible(f, p)) {
                f_ = f;
                return;
            }
            size_t k = 0;
            while (k < n_ && ++digits[k] == p) {
                digits[k] = 0;
                ++k;
            }
            if (k == n_)
                throw DomainError("no irreducible polynomial found"); // unreachable
        }
    }

    void build_reduction() {
        // y^n = -(f_0 + f_1 y + ... + f_{n-1} y^{n-1}), then multiply by y
        const PadicContext& C = *C_;
        std::vector<Scalar> cur(n_, Scalar::exact_zero(C));
        for (size_t i = 0; i < n_; ++i)
            cur[i] = Scalar::from_int(C, -f_[i]);
        red_.push_back(cur);
        for (size_t k = 1; k + 1 < n_; ++k) {
            std::vector<Scalar> nxt(n_, Scalar::exact_zero(C));
            for (size_t i = 0; i + 1 < n_; ++i)
                nxt[i + 1] = cur[i];
            Scalar top = cur[n_ - 1];
            for (size_t i = 0; i < n_; ++i)
                nxt[i] = nxt[i] + top * red_[0][i];
            red_.push_back(nxt);
            cur = nxt;
        }
    }

    std::vector<Scalar> raw_mul(const std::vector<Scalar>& a, const std::vector<Scalar>& b) const {
        const PadicContext& C = *C_;
        std::vector<Scalar> conv(2 * n_ - 1, Scalar::exact_zero(C));
        for (size_t i = 0; i < n_; ++i)
            for (size_t j = 0; j < n_; ++j)
                conv[i + j] = conv[i + j] + a[i] * b[j];
        std::vector<Scalar> out(conv.begin(), conv.begin() + static_cast<long>(n_));
        for (size_t k = n_; k < conv.size(); ++k)
            for (size_t i = 0; i < n_; ++i)
                out[i] = out[i] + conv[k] * red_[k - n_][i];
        return out;
    }

    std::vector<Scalar> eval_int_poly(const std::vector<long>& poly,
                                      const std::vector<Scalar>& at) const {
        const PadicContext& C = *C_;
        std::vector<Scalar> acc(n_, Scalar::exact_zero(C));
        for (size_t k = poly.size(); k-- > 0;) {
            acc = raw_mul(acc, at);
            acc[0] = acc[0] + Scalar::from_int(C, poly[k]);
        }
        return acc;
    }

    // multiplication-by-x matrix over F
    MatF mult_matrix(const std::vector<Scalar>& x) const {
        MatF m = MatF::zero(n_, n_, Scalar::exact_zero(*C_));
        std::vector<Scalar> col = x;
        std::vector<Scalar> y(n_, Scalar::exact_zero(*C_));
        if (n_ > 1)
            y[1] = Scalar::one(*C_);
        for (size_t j = 0;; ++j) {
            for (size_t i = 0; i < n_; ++i)
                m.at(i, j) = col[i];
            if (j + 1 == n_)
                break;
            col = raw_mul(col, y);
        }
        return m;
    }

    void build_frobenius() {
        const PadicContext& C = *C_;
        frob_.reserve(n_);
        frob_.push_back(MatF::identity(n_, Scalar::one(C)));
        if (n_ == 1)
            return;
        // start from y^p and Newton-refine against f; f'(r) is a unit because
        // the residue polynomial is separable
        std::vector<Scalar> y(n_, Scalar::exact_zero(C));
        y[1] = Scalar::one(C);
        std::vector<Scalar> r(n_, Scalar::exact_zero(C));
        r[0] = Scalar::one(C);
        for (unsigned long e = 0; e < C.p(); ++e)
            r = raw_mul(r, y);
        const std::vector<long>& fp = f_; // degree n, leading entry included
        std::vector<long> fprime(n_);
        for (size_t k = 1; k <= n_; ++k)
            fprime[k - 1] = static_cast<long>(k) * fp[k];
        bool converged = false;
        for (long it = 0; it < 128 && !converged; ++it) {
            std::vector<Scalar> val = eval_int_poly(fp, r);
            converged = true;
            for (const Scalar& c : val)
                if (!c.is_zero_to_precision())
                    converged = false;
            if (converged)
                break;
            std::vector<Scalar> dval = eval_int_poly(fprime, r);
            MatF dm = mult_matrix(dval);
            MatF dinv = mat_inverse(dm);
            std::vector<Scalar> corr(n_, Scalar::exact_zero(C));
            for (size_t i = 0; i < n_; ++i)
                for (size_t j = 0; j < n_; ++j)
                    corr[i] = corr[i] + dinv.at(i, j) * val[j];
            for (size_t i = 0; i < n_; ++i)
                r[i] = r[i] - corr[i];
        }
        if (!converged)
            throw PrecisionExhausted("frobenius root refinement did not converge");
        // matrix of sigma: columns are coordinates of r^i
        MatF S = MatF::zero(n_, n_, Scalar::exact_zero(C));
        std::vector<Scalar> pw(n_, Scalar::exact_zero(C));
        pw[0] = Scalar::one(C);
        for (size_t i = 0;; ++i) {
            for (size_t k = 0; k < n_; ++k)
                S.at(k, i) = pw[k];
            if (i + 1 == n_)
                break;
            pw = raw_mul(pw, r);
        }
        for (size_t k = 1; k < n_; ++k)
            frob_.push_back(frob_.back() * S);
        frob_[0] = MatF::identity(n_, Scalar::one(C)); // keep exact identity at k=0
    }

    friend class FnElem;
    friend FnElem operator*(const FnElem& a, const FnElem& b);

    const PadicContext* C_;
    size_t n_;
    std::vector<long> f_;
    std::vector<std::vector<Scalar>> red_;
    std::vector<MatF> frob_;
};

// Element of F_n with coordinates in the power basis {1, y, ..., y^{n-1}},
// which is an integral basis (the extension is unramified), so the valuation
// is the certified minimum of the coordinate valuations.
class FnElem {
  public:
    FnElem() : T_(nullptr) {}
    FnElem(const Tower& T, std::vector<Scalar> coords) : T_(&T), c_(std::move(coords)) {
        if (c_.size() != T.deg())
            throw DomainError("coordinate count does not match tower degree");
    }

    static FnElem zero(const Tower& T) { return FnElem(T, T.zero_coords()); }
    static FnElem one(const Tower& T) { return from_base(T, Scalar::one(T.ctx())); }
    static FnElem from_base(const Tower& T, const Scalar& a) {
        auto c = T.zero_coords();
        c[0] = a;
        return FnElem(T, std::move(c));
    }
    static FnElem gen(const Tower& T) {
        auto c = T.zero_coords();
        if (T.deg() == 1)
            throw DomainError("degree-1 tower has no generator");
        c[1] = Scalar::one(T.ctx());
        return FnElem(T, std::move(c));
    }
    static FnElem from_int_coords(const Tower& T, const std::vector<long>& v) {
        auto c = T.zero_coords();
        for (size_t i = 0; i < v.size() && i < c.size(); ++i)
            c[i] = Scalar::from_int(T.ctx(), v[i]);
        return FnElem(T, std::move(c));
    }

    const Tower& tower() const {
        if (!T_)
            throw DomainError("element has no tower");
        return *T_;
    }
    const std::vector<Scalar>& coords() const { return c_; }

    bool is_zero_to_precision() const {
        for (const Scalar& x : c_)
            if (!x.is_zero_to_precision())
                return false;
        return true;
    }
    bool is_exact_zero() const {
        for (const Scalar& x : c_)
            if (!x.is_exact_zero())
                return false;
        return true;
    }

    // v_{F_n}, certified: every zero-to-precision coordinate must have its
    // lower bound strictly above the candidate minimum
    long val() const {
        long cand = LONG_MAX;
        bool all_exact = true;
        for (const Scalar& x : c_) {
            if (x.is_exact_zero())
                continue;
            all_exact = false;
            if (x.state() == Scalar::St::Reg)
                cand = std::min(cand, x.val());
        }
        if (all_exact)
            throw DomainError("valuation of zero");
        if (cand == LONG_MAX)
            throw PrecisionExhausted("valuation of an approximate zero");
        for (const Scalar& x : c_)
            if (x.state() == Scalar::St::ApproxZero && x.val_lower_bound() <= cand)
                throw PrecisionExhausted("valuation hidden below an approximate zero");
        return cand;
    }

    std::optional<long> val_lower_bound() const {
        std::optional<long> out;
        for (const Scalar& x : c_) {
            if (x.is_exact_zero())
                continue;
            long b = (x.state() == Scalar::St::Reg) ? x.val() : x.val_lower_bound();
            if (!out || b < *out)
                out = b;
        }
        return out;
    }

    FnElem frobenius(long k) const {
        const MatF& S = tower().frob(k);
        auto out = T_->zero_coords();
        for (size_t i = 0; i < c_.size(); ++i)
            for (size_t j = 0; j < c_.size(); ++j)
                out[i] = out[i] + S.at(i, j) * c_[j];
        return FnElem(*T_, std::move(out));
    }

    FnElem operator-() const {
        auto out = c_;
        for (Scalar& x : out)
            x = -x;
        return FnElem(*T_, std::move(out));
    }

    friend FnElem operator+(const FnElem& a, const FnElem& b) {
        a.check_pair(b);
        auto out = a.c_;
        for (size_t i = 0; i < out.size(); ++i)
            out[i] = out[i] + b.c_[i];
        return FnElem(*a.T_, std::move(out));
    }
    friend FnElem operator-(const FnElem& a, const FnElem& b) { return a + (-b); }
    friend FnElem operator*(const FnElem& a, const FnElem& b) {
        a.check_pair(b);
        return FnElem(*a.T_, a.T_->raw_mul(a.c_, b.c_));
    }
    friend FnElem operator*(const Scalar& s, const FnElem& b) {
        auto out = b.c_;
        for (Scalar& x : out)
            x = s * x;
        return FnElem(*b.T_, std::move(out));
    }

    FnElem inv() const {
        const Tower& T = tower();
        if (is_exact_zero())
            throw DomainError("inverse of zero");
        if (is_zero_to_precision())
            throw PrecisionExhausted("inverse of an approximate zero");
        MatF m = T.mult_matrix(c_);
        MatF mi = mat_inverse(m);
        auto out = T.zero_coords();
        for (size_t i = 0; i < c_.size(); ++i)
            out[i] = mi.at(i, 0);
        return FnElem(T, std::move(out));
    }
    friend FnElem operator/(const FnElem& a, const FnElem& b) { return a * b.inv(); }

    friend bool agree(const FnElem& a, const FnElem& b) {
        return (a - b).is_zero_to_precision();
    }

    std::string str() const {
        std::string s = "[";
        for (size_t i = 0; i < c_.size(); ++i)
            s += (i ? ", " : "") + c_[i].str();
        return s + "]";
    }

  private:
    void check_pair(const FnElem& o) const {
        if (!T_ || !o.T_ || !T_->same(*o.T_))
            throw DomainError("mixed tower elements");
    }
    const Tower* T_;
    std::vector<Scalar> c_;
};

// Galois norm down to F; certifies the result has no generator component.
inline Scalar fn_norm(const FnElem& x) {
    const Tower& T = x.tower();
    FnElem acc = x;
    for (size_t k = 1; k < T.deg(); ++k)
        acc = acc * x.frobenius(static_cast<long>(k));
    for (size_t i = 1; i < T.deg(); ++i)
        if (!acc.coords()[i].is_zero_to_precision())
            throw NotRational("Galois norm has a nonzero generator component");
    return acc.coords()[0];
}

template <>
struct FieldOps<FnElem> {
    static bool zeroish(const FnElem& x) { return x.is_zero_to_precision(); }
    static bool exact_zero(const FnElem& x) { return x.is_exact_zero(); }
    static long pivot_val(const FnElem& x) { return x.val(); }
    static std::optional<long> lower_bound(const FnElem& x) { return x.val_lower_bound(); }
    static FnElem zero(const FnElem& model) { return FnElem::zero(model.tower()); }
    static FnElem one(const FnElem& model) { return FnElem::one(model.tower()); }
    static FnElem approx_with_bound(const FnElem& model, long b) {
        const Tower& T = model.tower();
        std::vector<Scalar> c(T.deg(), Scalar::approx_zero(T.ctx(), b));
        return FnElem(T, std::move(c));
    }
};

using MatFn = Mat<FnElem>;

} // namespace ltcm
