#pragma once

#include <climits>
#include <cstdlib>
#include <numeric>

#include "ltcm/fppoly.hpp"
#include "ltcm/poly.hpp"

namespace ltcm {

namespace detail {

// residue digit of an integral scalar; zeroish entries need a certified bound
// of at least 1 to pin the digit at 0
inline long residue_digit(const Scalar& x) {
    if (x.is_exact_zero())
        return 0;
    long p = static_cast<long>(x.ctx().p());
    if (x.is_zero_to_precision()) {
        if (x.val_lower_bound() >= 1)
            return 0;
        throw PrecisionExhausted("residue digit of an approximate zero");
    }
    if (x.val() < 0)
        throw DomainError("residue digit of a non-integral value");
    if (x.val() > 0)
        return 0;
    return static_cast<long>(mpz_fdiv_ui(x.unit().get_mpz_t(), static_cast<unsigned long>(p)));
}

inline fppoly::P residue_poly(const PolyF& P) {
    fppoly::P out;
    for (long k = 0; k <= P.degree(); ++k)
        out.push_back(residue_digit(P.coeff(static_cast<size_t>(k))));
    fppoly::strip(out);
    return out;
}

// divide out pi^m, m the smallest certified coefficient valuation
inline PolyF normalize_content(const PolyF& P, const PadicContext& C) {
    long m = LONG_MAX;
    for (long k = 0; k <= P.degree(); ++k) {
        const Scalar& c = P.coeff(static_cast<size_t>(k));
        if (!c.is_zero_to_precision())
            m = std::min(m, c.val());
    }
    if (m == LONG_MAX)
        throw PrecisionExhausted("polynomial vanished to working precision");
    std::vector<Scalar> out;
    Scalar f = Scalar::pi(C, -m);
    for (long k = 0; k <= P.degree(); ++k)
        out.push_back(f * P.coeff(static_cast<size_t>(k)));
    return PolyF(std::move(out));
}

// P(a + pi*Z)
inline PolyF shift_scale(const PolyF& P, const PadicContext& C, long a) {
    PolyF L(std::vector<Scalar>{Scalar::from_int(C, a), Scalar::pi(C)});
    PolyF acc = PolyF::zero_like(Scalar::exact_zero(C));
    for (long k = P.degree(); k >= 0; --k) {
        acc = acc * L;
        acc = acc + PolyF(std::vector<Scalar>{P.coeff(static_cast<size_t>(k))});
    }
    return acc;
}

// Does S have a root z with v(z) >= 0? S keeps a regular leading coefficient
// throughout the recursion, so its degree never collapses silently. Each
// level consumes one digit of the prospective root; depth caps the descent.
inline bool has_integral_root(const PolyF& S, const PadicContext& C, long depth) {
    if (depth <= 0)
        throw PrecisionExhausted("root search descended past the working precision");
    PolyF T = normalize_content(S, C);
    if (T.degree() < 1)
        return false; // unit constant after normalization
    if (T.coeff(0).is_exact_zero())
        return true;
    long p = static_cast<long>(C.p());
    fppoly::P tbar = residue_poly(T);
    fppoly::P tbar_d = fppoly::derivative(tbar, p);
    for (long r = 0; r < p; ++r) {
        if (fppoly::eval(tbar, r, p) != 0)
            continue;
        if (fppoly::eval(tbar_d, r, p) != 0)
            return true; // simple residue root lifts
        if (has_integral_root(shift_scale(T, C, r), C, depth - 1))
            return true;
    }
    return false;
}

// Does P have a root of valuation exactly s?
inline bool has_root_of_val(const PolyF& P, const PadicContext& C, long s) {
    std::vector<Scalar> q;
    for (long k = 0; k <= P.degree(); ++k)
        q.push_back(Scalar::pi(C, k * s) * P.coeff(static_cast<size_t>(k)));
    PolyF Q = normalize_content(PolyF(std::move(q)), C);
    long p = static_cast<long>(C.p());
    fppoly::P qbar = residue_poly(Q);
    fppoly::P qbar_d = fppoly::derivative(qbar, p);
    for (long r = 1; r < p; ++r) { // unit roots only; other valuations have their own slope
        if (fppoly::eval(qbar, r, p) != 0)
            continue;
        if (fppoly::eval(qbar_d, r, p) != 0)
            return true;
        if (has_integral_root(shift_scale(Q, C, r), C, C.N()))
            return true;
    }
    return false;
}

} // namespace detail

// Does the monic P have a root in F? Exact: candidate valuations are the
// integer slopes of the coefficient polygon, each checked by residue-root
// enumeration with Hensel certification and digit-by-digit descent on
// multiple roots.
inline bool has_root_in_F(const PolyF& P) {
    if (P.degree() < 1)
        throw DomainError("root search needs positive degree");
    if (!P.monic())
        throw DomainError("root search expects a monic polynomial");
    const Scalar& c0 = P.coeff(0);
    if (c0.is_exact_zero())
        return true;
    if (c0.is_zero_to_precision())
        throw PrecisionExhausted("constant coefficient is an approximate zero");
    const PadicContext& C = c0.ctx();
    long d = P.degree();
    std::vector<std::optional<long>> v(static_cast<size_t>(d) + 1);
    for (long k = 0; k <= d; ++k) {
        const Scalar& c = P.coeff(static_cast<size_t>(k));
        if (!c.is_zero_to_precision())
            v[static_cast<size_t>(k)] = c.val();
    }
    // uncertain interior points must sit on or above some certified chord
    // across them, which keeps them off the lower hull
    for (long k = 1; k < d; ++k) {
        const Scalar& c = P.coeff(static_cast<size_t>(k));
        if (!c.is_zero_to_precision())
            continue;
        long lb = c.is_exact_zero() ? LONG_MAX : c.val_lower_bound();
        bool dominated = false;
        for (long i = 0; i < k && !dominated; ++i)
            for (long j = k + 1; j <= d && !dominated; ++j) {
                if (!v[static_cast<size_t>(i)] || !v[static_cast<size_t>(j)])
                    continue;
                // chord height at k, compared without division
                long lhs = lb == LONG_MAX ? LONG_MAX
                                          : lb * (j - i);
                long rhs = *v[static_cast<size_t>(i)] * (j - k) + *v[static_cast<size_t>(j)] * (k - i);
                if (lhs >= rhs)
                    dominated = true;
            }
        if (!dominated)
            throw PrecisionExhausted("approximate-zero coefficient too close to the polygon");
    }
    std::vector<long> tried;
    for (long i = 0; i < d; ++i)
        for (long j = i + 1; j <= d; ++j) {
            if (!v[static_cast<size_t>(i)] || !v[static_cast<size_t>(j)])
                continue;
            long num = *v[static_cast<size_t>(i)] - *v[static_cast<size_t>(j)];
            if (num % (j - i) != 0)
                continue;
            long s = num / (j - i);
            // the pair must realize the minimum of v_k + k*s over the
            // certified points; uncertain points were handled above
            long line = *v[static_cast<size_t>(i)] + i * s;
            bool on_hull = true;
            for (long k = 0; k <= d && on_hull; ++k)
                if (v[static_cast<size_t>(k)] && *v[static_cast<size_t>(k)] + k * s < line)
                    on_hull = false;
            if (!on_hull)
                continue;
            bool seen = false;
            for (long t : tried)
                if (t == s)
                    seen = true;
            if (seen)
                continue;
            tried.push_back(s);
            if (detail::has_root_of_val(P, C, s))
                return true;
        }
    return false;
}

// Certified irreducibility over F for monic P. Degrees 2 and 3 are decided
// exactly (reducible iff a root exists). From degree 4 on, only the two cheap
// certificates are attempted: irreducible residue reduction, and a one-edge
// coefficient polygon of slope coprime to the degree. Returns false when no
// certificate applies, so callers reject rather than accept unverified input.
inline bool is_irreducible(const PolyF& P) {
    long d = P.degree();
    if (d < 1)
        throw DomainError("irreducibility needs positive degree");
    if (!P.monic())
        throw DomainError("irreducibility test expects a monic polynomial");
    if (d == 1)
        return true;
    if (d <= 3)
        return !has_root_in_F(P);
    const PadicContext& C = P.coeff(static_cast<size_t>(d)).ctx();
    bool integral = true;
    for (long k = 0; k < d && integral; ++k) {
        const Scalar& c = P.coeff(static_cast<size_t>(k));
        if (c.is_exact_zero())
            continue;
        if (c.is_zero_to_precision())
            integral = c.val_lower_bound() >= 1;
        else
            integral = c.val() >= 0;
    }
    if (integral) {
        fppoly::P rbar = detail::residue_poly(P);
        if (fppoly::deg(rbar) == d && fppoly::irreducible(rbar, static_cast<long>(C.p())))
            return true;
    }
    // one-edge polygon from (0, v0) to (d, 0) with gcd(|v0|, d) = 1: any
    // factor of degree k would need k*v0/d an integer
    const Scalar& c0 = P.coeff(0);
    if (!c0.is_zero_to_precision()) {
        long v0 = c0.val();
        if (v0 != 0 && std::gcd(std::abs(v0), d) == 1) {
            bool above = true;
            for (long k = 1; k < d && above; ++k) {
                const Scalar& c = P.coeff(static_cast<size_t>(k));
                // point (k, v_k) on or above the segment: v_k * d >= v0 * (d - k)
                long lb;
                if (c.is_exact_zero())
                    continue;
                if (c.is_zero_to_precision())
                    lb = c.val_lower_bound();
                else
                    lb = c.val();
                above = lb * d >= v0 * (d - k);
            }
            if (above)
                return true;
        }
    }
    return false;
}

} // namespace ltcm
