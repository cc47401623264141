#pragma once

#include <vector>

#include "ltcm/errors.hpp"

namespace ltcm {

// Polynomial arithmetic over the residue field F_p, coefficients ascending,
// entries reduced to [0, p). Only used for small degrees.
namespace fppoly {

using P = std::vector<long>;

inline void strip(P& a) {
    while (!a.empty() && a.back() == 0)
        a.pop_back();
}

inline long deg(const P& a) {
    return static_cast<long>(a.size()) - 1;
}

inline P mul(const P& a, const P& b, long p) {
    if (a.empty() || b.empty())
        return {};
    P c(a.size() + b.size() - 1, 0);
    for (size_t i = 0; i < a.size(); ++i)
        for (size_t j = 0; j < b.size(); ++j)
            c[i + j] = (c[i + j] + a[i] * b[j]) % p;
    strip(c);
    return c;
}

inline long inv_mod(long a, long p) {
    long r = 1, base = ((a % p) + p) % p, e = p - 2;
    while (e) {
        if (e & 1)
            r = r * base % p;
        base = base * base % p;
        e >>= 1;
    }
    return r;
}

// a mod m, m nonzero
inline P rem(P a, const P& m, long p) {
    strip(a);
    long dm = deg(m);
    long lead_inv = inv_mod(m.back(), p);
    while (deg(a) >= dm) {
        long f = a.back() * lead_inv % p;
        size_t shift = a.size() - m.size();
        for (size_t i = 0; i < m.size(); ++i)
            a[shift + i] = ((a[shift + i] - f * m[i]) % p + p) % p;
        strip(a);
    }
    return a;
}

inline P gcd(P a, P b, long p) {
    strip(a);
    strip(b);
    while (!b.empty()) {
        P r = rem(a, b, p);
        a = std::move(b);
        b = std::move(r);
    }
    return a;
}

// x^(p^k) mod f
inline P pow_frobenius(const P& f, long p, long k) {
    P x = {0, 1};
    for (long step = 0; step < k; ++step) {
        // raise to the p-th power by square and multiply
        P acc = {1};
        P base = x;
        long e = p;
        while (e) {
            if (e & 1)
                acc = rem(mul(acc, base, p), f, p);
            base = rem(mul(base, base, p), f, p);
            e >>= 1;
        }
        x = acc;
    }
    return x;
}

// monic f irreducible over F_p: x^(p^n) = x and gcd(x^(p^(n/l)) - x, f) = 1
inline bool irreducible(const P& f, long p) {
    long n = deg(f);
    if (n < 1)
        return false;
    if (n == 1)
        return true;
    P xq = pow_frobenius(f, p, n);
    if (xq.size() < 2)
        xq.resize(2, 0);
    xq[1] = ((xq[1] - 1) % p + p) % p;
    strip(xq);
    if (!xq.empty())
        return false;
    for (long l = 2; l <= n; ++l) {
        if (l * (n / l) != n)
            continue;
        bool lprime = true;
        for (long t = 2; t * t <= l; ++t)
            if (l % t == 0)
                lprime = false;
        if (!lprime)
            continue;
        P xql = pow_frobenius(f, p, n / l);
        if (xql.size() < 2)
            xql.resize(2, 0);
        xql[1] = ((xql[1] - 1) % p + p) % p;
        strip(xql);
        if (deg(gcd(xql, f, p)) != 0)
            return false;
    }
    return true;
}

inline long eval(const P& a, long x, long p) {
    long acc = 0;
    for (size_t k = a.size(); k-- > 0;)
        acc = (acc * x + a[k]) % p;
    return ((acc % p) + p) % p;
}

inline P derivative(const P& a, long p) {
    P d;
    for (size_t k = 1; k < a.size(); ++k)
        d.push_back(static_cast<long>(k) % p * a[k] % p);
    strip(d);
    return d;
}

} // namespace fppoly

} // namespace ltcm
