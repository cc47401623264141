#pragma once

#include <gmpxx.h>

#include <string>
#include <utility>
#include <vector>

#include "ltcm/errors.hpp"
#include "ltcm/rational.hpp"

namespace ltcm {

// Base field is Q_p, p an odd prime, so q = p throughout.
struct FieldDesc {
    unsigned long p;
    long N; // working precision, digits of the unit part
};

class PadicContext {
  public:
    PadicContext(unsigned long p, long N, long guard = 8) : p_(p), N_(N), guard_(guard) {
        if (p < 3 || (p % 2) == 0)
            throw DomainError("residue characteristic must be an odd prime");
        Int pz(static_cast<unsigned long>(p));
        if (mpz_probab_prime_p(pz.get_mpz_t(), 30) == 0)
            throw DomainError("residue characteristic must be an odd prime");
        if (N < 8)
            throw DomainError("working precision must be at least 8");
        pow_.reserve(static_cast<size_t>(N) + 2);
        Int v = 1;
        for (long k = 0; k <= N + 1; ++k) {
            pow_.push_back(v);
            v *= static_cast<unsigned long>(p);
        }
    }
    explicit PadicContext(const FieldDesc& fd) : PadicContext(fd.p, fd.N) {}

    unsigned long p() const { return p_; }
    long N() const { return N_; }
    long guard() const { return guard_; }

    // p^k, 0 <= k <= N+1; table is immutable after construction (thread-safe)
    const Int& pow(long k) const {
        if (k < 0 || k > N_ + 1)
            throw DomainError("power table out of range");
        return pow_[static_cast<size_t>(k)];
    }

    bool same(const PadicContext& o) const { return p_ == o.p_ && N_ == o.N_; }

  private:
    unsigned long p_;
    long N_;
    long guard_;
    std::vector<Int> pow_;
};

// x = pi^v * u + O(pi^{v+prec}), u a unit known mod p^prec, 0 < u < p^prec.
// Exact zeros and approximate zeros (all digits cancelled, only a lower
// valuation bound survives) are distinct states: a mathematically zero result
// of exact mod-p^k arithmetic always lands in a zero state, never in Reg.
class Scalar {
  public:
    enum class St { ExactZero, ApproxZero, Reg };

    Scalar() : C_(nullptr), st_(St::ExactZero), v_(0), prec_(0) {}

    static Scalar exact_zero(const PadicContext& C) {
        Scalar s;
        s.C_ = &C;
        return s;
    }

    // value O(pi^bound), nothing else known
    static Scalar approx_zero(const PadicContext& C, long bound) {
        Scalar s;
        s.C_ = &C;
        s.st_ = St::ApproxZero;
        s.v_ = bound;
        return s;
    }

    static Scalar from_int(const PadicContext& C, long n) { return from_mpz(C, Int(n)); }

    static Scalar from_mpz(const PadicContext& C, Int n) {
        if (n == 0)
            return exact_zero(C);
        long v = 0;
        while (mpz_divisible_ui_p(n.get_mpz_t(), C.p())) {
            n /= static_cast<unsigned long>(C.p());
            ++v;
        }
        Scalar s;
        s.C_ = &C;
        s.st_ = St::Reg;
        s.v_ = v;
        s.prec_ = C.N();
        s.u_ = mod(n, C.pow(C.N()));
        return s;
    }

    static Scalar from_rat(const PadicContext& C, const Rat& r) {
        if (r == 0)
            return exact_zero(C);
        Scalar num = from_mpz(C, r.get_num());
        Scalar den = from_mpz(C, r.get_den());
        return num / den;
    }

    static Scalar pi(const PadicContext& C, long k = 1) {
        Scalar s;
        s.C_ = &C;
        s.st_ = St::Reg;
        s.v_ = k;
        s.prec_ = C.N();
        s.u_ = 1;
        return s;
    }

    // pi^v * (u mod p^prec); u must be prime to p
    static Scalar from_unit(const PadicContext& C, long v, const Int& u, long prec) {
        if (prec < 1)
            return approx_zero(C, v);
        Scalar s;
        s.C_ = &C;
        s.st_ = St::Reg;
        s.v_ = v;
        s.prec_ = prec;
        s.u_ = mod(u, C.pow(prec));
        if (s.u_ == 0 || mpz_divisible_ui_p(s.u_.get_mpz_t(), C.p()))
            throw DomainError("from_unit: unit part divisible by p");
        return s;
    }

    static Scalar one(const PadicContext& C) { return from_int(C, 1); }

    const PadicContext& ctx() const {
        if (!C_)
            throw DomainError("scalar has no context");
        return *C_;
    }

    St state() const { return st_; }
    bool is_exact_zero() const { return st_ == St::ExactZero; }
    bool is_zero_to_precision() const { return st_ != St::Reg; }

    // exact valuation; zeros have none
    long val() const {
        if (st_ == St::Reg)
            return v_;
        if (st_ == St::ApproxZero)
            throw PrecisionExhausted("valuation request on an approximate zero");
        throw DomainError("valuation of exact zero");
    }

    // lower bound on the valuation, defined for every nonexact state
    long val_lower_bound() const {
        if (st_ == St::ExactZero)
            throw DomainError("valuation of exact zero");
        return v_;
    }

    long prec() const { return prec_; }
    const Int& unit() const {
        if (st_ != St::Reg)
            throw PrecisionExhausted("unit of a zero value");
        return u_;
    }

    // ||x|| = q^{-v(x)}, ||0|| = 0
    Rat norm_abs() const {
        if (st_ == St::ExactZero)
            return Rat(0);
        if (st_ == St::ApproxZero)
            throw PrecisionExhausted("norm of an approximate zero");
        return qpow(C_->p(), -v_);
    }

    // decision points demand at least the guard band of certified digits
    void require_certified() const {
        if (st_ == St::ApproxZero)
            throw PrecisionExhausted("approximate zero at a decision point");
        if (st_ == St::Reg && prec_ < C_->guard())
            throw PrecisionExhausted("fewer certified digits than the guard band");
    }

    Scalar operator-() const {
        Scalar r = *this;
        if (r.st_ == St::Reg)
            r.u_ = mod(-r.u_, C_->pow(r.prec_));
        return r;
    }

    friend Scalar operator+(const Scalar& a, const Scalar& b) {
        a.check_pair(b);
        if (a.st_ == St::ExactZero)
            return b;
        if (b.st_ == St::ExactZero)
            return a;
        const PadicContext& C = *a.C_;
        if (a.st_ == St::ApproxZero && b.st_ == St::ApproxZero)
            return approx_zero(C, std::min(a.v_, b.v_));
        if (a.st_ == St::ApproxZero)
            return add_reg_az(b, a.v_);
        if (b.st_ == St::ApproxZero)
            return add_reg_az(a, b.v_);
        const Scalar& x = (a.v_ <= b.v_) ? a : b;
        const Scalar& y = (a.v_ <= b.v_) ? b : a;
        long shift = y.v_ - x.v_;
        if (shift >= x.prec_)
            return x;
        long n = std::min(x.prec_, y.prec_ + shift);
        Int w = mod(x.u_ + y.u_ * C.pow(shift), C.pow(n));
        if (w == 0)
            return approx_zero(C, x.v_ + n);
        long s = 0;
        while (mpz_divisible_ui_p(w.get_mpz_t(), C.p())) {
            w /= static_cast<unsigned long>(C.p());
            ++s;
        }
        Scalar r;
        r.C_ = &C;
        r.st_ = St::Reg;
        r.v_ = x.v_ + s;
        r.prec_ = n - s;
        r.u_ = w;
        return r;
    }

    friend Scalar operator-(const Scalar& a, const Scalar& b) { return a + (-b); }

    friend Scalar operator*(const Scalar& a, const Scalar& b) {
        a.check_pair(b);
        const PadicContext& C = *a.C_;
        if (a.st_ == St::ExactZero || b.st_ == St::ExactZero)
            return exact_zero(C);
        if (a.st_ == St::ApproxZero || b.st_ == St::ApproxZero)
            return approx_zero(C, a.v_ + b.v_);
        Scalar r;
        r.C_ = &C;
        r.st_ = St::Reg;
        r.v_ = a.v_ + b.v_;
        r.prec_ = std::min(a.prec_, b.prec_);
        r.u_ = mod(a.u_ * b.u_, C.pow(r.prec_));
        return r;
    }

    Scalar inv() const {
        const PadicContext& C = ctx();
        if (st_ == St::ExactZero)
            throw DomainError("inverse of exact zero");
        if (st_ == St::ApproxZero)
            throw PrecisionExhausted("inverse of an approximate zero");
        Scalar r;
        r.C_ = &C;
        r.st_ = St::Reg;
        r.v_ = -v_;
        r.prec_ = prec_;
        r.u_ = invmod(u_, C.pow(prec_));
        return r;
    }

    friend Scalar operator/(const Scalar& a, const Scalar& b) { return a * b.inv(); }

    Scalar pow_int(long k) const {
        const PadicContext& C = ctx();
        if (k == 0)
            return one(C);
        Scalar base = (k > 0) ? *this : inv();
        unsigned long e = static_cast<unsigned long>(k > 0 ? k : -k);
        Scalar acc = one(C);
        while (e) {
            if (e & 1)
                acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    // a == b to the shared precision
    friend bool agree(const Scalar& a, const Scalar& b) {
        return (a - b).is_zero_to_precision();
    }

    std::string str() const {
        if (st_ == St::ExactZero)
            return "0";
        if (st_ == St::ApproxZero)
            return "O(pi^" + std::to_string(v_) + ")";
        return "pi^" + std::to_string(v_) + "*" + u_.get_str() + " (mod pi^" +
               std::to_string(v_ + prec_) + ")";
    }

    static Int mod(const Int& a, const Int& m) {
        Int r;
        mpz_mod(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
        return r;
    }

    static Int invmod(const Int& a, const Int& m) {
        Int r;
        if (mpz_invert(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t()) == 0)
            throw DomainError("not invertible modulo p^k");
        return r;
    }

  private:
    static Scalar add_reg_az(const Scalar& x, long bound) {
        const PadicContext& C = *x.C_;
        if (bound <= x.v_)
            return approx_zero(C, std::min(bound, x.v_));
        long n = std::min(x.prec_, bound - x.v_);
        Scalar r;
        r.C_ = &C;
        r.st_ = St::Reg;
        r.v_ = x.v_;
        r.prec_ = n;
        r.u_ = mod(x.u_, C.pow(n));
        return r;
    }

    void check_pair(const Scalar& o) const {
        if (!C_ || !o.C_ || !C_->same(*o.C_))
            throw DomainError("mixed scalar contexts");
    }

    const PadicContext* C_;
    St st_;
    long v_;
    long prec_ = 0;
    Int u_;
};

// ||x|| = q^{-v(x)}; 0 for exact zero; approximate zeros cannot be certified
inline Rat sc_norm_abs(const Scalar& x) {
    return x.norm_abs();
}

// Teichmueller lift of a mod p: the (p-1)-th root of unity with that residue
inline Scalar teichmuller(const PadicContext& C, unsigned long a) {
    Int x(static_cast<unsigned long>(a % C.p()));
    if (x == 0)
        throw DomainError("teichmuller of zero residue");
    // x <- x^p stabilizes one digit per step
    for (long k = 1; k <= C.N(); ++k) {
        Int m = C.pow(std::min(C.N(), k + 1));
        mpz_powm_ui(x.get_mpz_t(), x.get_mpz_t(), C.p(), m.get_mpz_t());
    }
    return Scalar::from_mpz(C, x);
}

inline unsigned long smallest_nonresidue(unsigned long p) {
    Int pz(p);
    for (unsigned long a = 2; a < p; ++a) {
        Int az(a);
        if (mpz_legendre(az.get_mpz_t(), pz.get_mpz_t()) == -1)
            return a;
    }
    throw DomainError("no quadratic non-residue found");
}

// square root of a unit scalar if it exists (p odd: Hensel from the residue root)
inline std::optional<Scalar> hensel_sqrt(const Scalar& x) {
    const PadicContext& C = x.ctx();
    if (x.is_zero_to_precision())
        return std::nullopt;
    if (x.val() % 2 != 0)
        return std::nullopt;
    Int u = x.unit();
    Int pz(C.p());
    Int r0 = Scalar::mod(u, pz);
    if (mpz_legendre(r0.get_mpz_t(), pz.get_mpz_t()) != 1)
        return std::nullopt;
    // residue root by Tonelli-Shanks is overkill at these sizes; scan
    Int r;
    for (unsigned long c = 1; c < C.p(); ++c) {
        if (Scalar::mod(Int(c) * Int(c) - r0, pz) == 0) {
            r = c;
            break;
        }
    }
    long n = x.prec();
    // Newton: r <- (r + u/r)/2, doubles correct digits
    long have = 1;
    Int inv2 = Scalar::invmod(Int(2), C.pow(n));
    while (have < n) {
        have = std::min(n, 2 * have);
        Int m = C.pow(have);
        Int rinv = Scalar::invmod(r, m);
        r = Scalar::mod((r + Scalar::mod(u * rinv, m)) * inv2, m);
    }
    return Scalar::from_unit(C, x.val() / 2, r, n);
}

// retry fn at doubled working precision on PrecisionExhausted; fn must return
// context-free values (exact rationals, integers, strings)
template <class F>
auto with_precision_escalation(unsigned long p, long N, F&& fn) {
    constexpr long kCap = 4096;
    for (long n = N;; n *= 2) {
        PadicContext ctx(p, n);
        try {
            return fn(ctx);
        } catch (const PrecisionExhausted&) {
            if (2 * n > kCap)
                throw;
        }
    }
}

} // namespace ltcm
