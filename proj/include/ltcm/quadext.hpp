#pragma once

#include <string>

#include "ltcm/errors.hpp"
#include "ltcm/scalar.hpp"

namespace ltcm {

enum class ExtKind { Unramified, Ramified };

// Quadratic extension K = F(gen).
// Unramified: gen = mu, mu^2 = eps, the Teichmueller lift of the smallest
// positive non-residue. Ramified: gen = w (a uniformizer), w^2 = pi*u with
// u in {1, eps}. disc_val d = 0 / 1.
class QuadExt {
  public:
    static QuadExt unramified(const PadicContext& C) {
        QuadExt K;
        K.C_ = &C;
        K.kind_ = ExtKind::Unramified;
        K.disc_val_ = 0;
        K.ram_unit_is_nonresidue_ = false;
        K.gen_sq_ = teichmuller(C, smallest_nonresidue(C.p()));
        return K;
    }

    // u_nonresidue selects w^2 = pi*eps instead of pi
    static QuadExt ramified(const PadicContext& C, bool u_nonresidue = false) {
        QuadExt K;
        K.C_ = &C;
        K.kind_ = ExtKind::Ramified;
        K.disc_val_ = 1;
        K.ram_unit_is_nonresidue_ = u_nonresidue;
        Scalar u = u_nonresidue ? teichmuller(C, smallest_nonresidue(C.p()))
                                : Scalar::one(C);
        K.gen_sq_ = Scalar::pi(C) * u;
        return K;
    }

    const PadicContext& ctx() const { return *C_; }
    ExtKind kind() const { return kind_; }
    bool ramified() const { return kind_ == ExtKind::Ramified; }
    int disc_val() const { return disc_val_; }
    bool ram_unit_is_nonresidue() const { return ram_unit_is_nonresidue_; }
    // gen^2 as an element of F
    const Scalar& gen_sq() const { return gen_sq_; }

    bool same(const QuadExt& o) const {
        return C_->same(*o.C_) && kind_ == o.kind_ &&
               ram_unit_is_nonresidue_ == o.ram_unit_is_nonresidue_;
    }

    std::string str() const {
        if (kind_ == ExtKind::Unramified)
            return "unramified";
        return ram_unit_is_nonresidue_ ? "ramified(eps)" : "ramified(1)";
    }

  private:
    QuadExt() = default;
    const PadicContext* C_ = nullptr;
    ExtKind kind_ = ExtKind::Unramified;
    int disc_val_ = 0;
    bool ram_unit_is_nonresidue_ = false;
    Scalar gen_sq_;
};

// a + b*gen with two F-coordinates
class ExtScalar {
  public:
    ExtScalar() = default;
    ExtScalar(const QuadExt& K, Scalar a, Scalar b) : K_(&K), a_(std::move(a)), b_(std::move(b)) {}

    static ExtScalar from_base(const QuadExt& K, Scalar a) {
        return ExtScalar(K, std::move(a), Scalar::exact_zero(K.ctx()));
    }

    static ExtScalar zero(const QuadExt& K) {
        return ExtScalar(K, Scalar::exact_zero(K.ctx()), Scalar::exact_zero(K.ctx()));
    }

    static ExtScalar one(const QuadExt& K) {
        return ExtScalar(K, Scalar::one(K.ctx()), Scalar::exact_zero(K.ctx()));
    }

    static ExtScalar gen(const QuadExt& K) {
        return ExtScalar(K, Scalar::exact_zero(K.ctx()), Scalar::one(K.ctx()));
    }

    const QuadExt& ext() const {
        if (!K_)
            throw DomainError("ext scalar has no extension");
        return *K_;
    }
    const Scalar& a() const { return a_; }
    const Scalar& b() const { return b_; }

    bool is_zero_to_precision() const {
        return a_.is_zero_to_precision() && b_.is_zero_to_precision();
    }

    ExtScalar operator-() const { return ExtScalar(*K_, -a_, -b_); }

    friend ExtScalar operator+(const ExtScalar& x, const ExtScalar& y) {
        x.check_pair(y);
        return ExtScalar(*x.K_, x.a_ + y.a_, x.b_ + y.b_);
    }
    friend ExtScalar operator-(const ExtScalar& x, const ExtScalar& y) {
        x.check_pair(y);
        return ExtScalar(*x.K_, x.a_ - y.a_, x.b_ - y.b_);
    }
    friend ExtScalar operator*(const ExtScalar& x, const ExtScalar& y) {
        x.check_pair(y);
        const Scalar& e = x.K_->gen_sq();
        return ExtScalar(*x.K_, x.a_ * y.a_ + e * (x.b_ * y.b_), x.a_ * y.b_ + x.b_ * y.a_);
    }

    ExtScalar inv() const {
        Scalar n = a_ * a_ - K_->gen_sq() * (b_ * b_);
        if (n.is_exact_zero())
            throw DomainError("inverse of zero");
        // approximate-zero norm surfaces as PrecisionExhausted inside Scalar::inv
        Scalar ninv = n.inv();
        return ExtScalar(*K_, a_ * ninv, -(b_ * ninv));
    }

    friend ExtScalar operator/(const ExtScalar& x, const ExtScalar& y) { return x * y.inv(); }

    // 2*v_K as an integer for both ramification types; the coordinates form an
    // integral basis, so no cross-coordinate cancellation can occur
    long val2() const {
        long ve = K_->ramified() ? 1 : 0;
        bool ea = a_.is_exact_zero(), eb = b_.is_exact_zero();
        if (ea && eb)
            throw DomainError("valuation of zero");
        if (ea) {
            if (b_.is_zero_to_precision())
                throw PrecisionExhausted("valuation of an approximate zero");
            return 2 * b_.val() + ve;
        }
        if (eb) {
            if (a_.is_zero_to_precision())
                throw PrecisionExhausted("valuation of an approximate zero");
            return 2 * a_.val();
        }
        bool za = a_.is_zero_to_precision(), zb = b_.is_zero_to_precision();
        if (za && zb)
            throw PrecisionExhausted("valuation of an approximate zero");
        if (za) {
            long cand = 2 * b_.val() + ve;
            if (2 * a_.val_lower_bound() > cand)
                return cand;
            throw PrecisionExhausted("valuation hidden below an approximate zero");
        }
        if (zb) {
            long cand = 2 * a_.val();
            if (2 * b_.val_lower_bound() + ve > cand)
                return cand;
            throw PrecisionExhausted("valuation hidden below an approximate zero");
        }
        return std::min(2 * a_.val(), 2 * b_.val() + ve);
    }

    std::string str() const { return "(" + a_.str() + ") + (" + b_.str() + ")*g"; }

  private:
    void check_pair(const ExtScalar& o) const {
        if (!K_ || !o.K_ || !K_->same(*o.K_))
            throw DomainError("mixed extension scalars");
    }
    const QuadExt* K_ = nullptr;
    Scalar a_, b_;
};

inline bool agree(const ExtScalar& x, const ExtScalar& y) {
    return (x - y).is_zero_to_precision();
}

inline ExtScalar ext_conj(const ExtScalar& x) {
    return ExtScalar(x.ext(), x.a(), -x.b());
}

// Nm_{K/F}(a + b*gen) = a^2 - gen^2 * b^2
inline Scalar ext_norm(const ExtScalar& x) {
    return x.a() * x.a() - x.ext().gen_sq() * (x.b() * x.b());
}

inline Scalar ext_trace(const ExtScalar& x) {
    return x.a() + x.a();
}

// quadratic character of F^x attached to unramified K: (-1)^{v(x)}
inline int eta_unramified(const QuadExt& K, const Scalar& x) {
    if (K.ramified())
        throw DomainError("eta is only defined here for the unramified extension");
    if (x.is_exact_zero())
        throw DomainError("eta of zero");
    return (x.val() % 2 == 0) ? 1 : -1;
}

// |Disc_{K/F}|^{-h^2} = q^{d*h^2}
inline Rat disc_norm(const QuadExt& K, long h) {
    return qpow(K.ctx().p(), K.disc_val() * h * h);
}

} // namespace ltcm
