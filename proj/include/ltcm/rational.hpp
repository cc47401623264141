#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>

#include "ltcm/errors.hpp"

namespace ltcm {

using Int = mpz_class;
using Rat = mpq_class;

// q^e as an exact rational, e of either sign.
inline Rat qpow(unsigned long q, long e) {
    Int num = 1;
    mpz_ui_pow_ui(num.get_mpz_t(), q, static_cast<unsigned long>(e < 0 ? -e : e));
    Rat r;
    if (e >= 0)
        r = Rat(num);
    else
        r = Rat(1, num);
    r.canonicalize();
    return r;
}

// If r = +/- q^e returns e (sign ignored must be positive; negative r -> nullopt).
inline std::optional<long> q_power_exponent(const Rat& r, unsigned long q) {
    if (sgn(r) <= 0)
        return std::nullopt;
    Int num = r.get_num(), den = r.get_den();
    long e = 0;
    Int qz(static_cast<unsigned long>(q));
    while (num > 1) {
        if (!mpz_divisible_p(num.get_mpz_t(), qz.get_mpz_t()))
            return std::nullopt;
        num /= qz;
        ++e;
    }
    while (den > 1) {
        if (!mpz_divisible_p(den.get_mpz_t(), qz.get_mpz_t()))
            return std::nullopt;
        den /= qz;
        --e;
    }
    return e;
}

inline std::string rat_string(const Rat& r) {
    return r.get_str();
}

// Exact fixed-point decimal expansion, digits places, round toward zero.
// Used for convenience columns; never a double.
inline std::string rat_decimal(const Rat& r, int digits = 12) {
    Int num = r.get_num(), den = r.get_den();
    bool neg = num < 0;
    if (neg)
        num = -num;
    Int ip = num / den, rem = num % den;
    std::string out = (neg ? "-" : "") + ip.get_str();
    if (digits > 0) {
        out += ".";
        for (int i = 0; i < digits; ++i) {
            rem *= 10;
            Int d = rem / den;
            rem = rem % den;
            out += d.get_str();
        }
    }
    return out;
}

inline Rat rat_from_string(const std::string& s) {
    Rat r;
    if (r.set_str(s, 10) != 0)
        throw ConfigError("not a rational: '" + s + "'");
    r.canonicalize();
    return r;
}

} // namespace ltcm
