#pragma once

#include <optional>
#include <vector>

#include "ltcm/quadext.hpp"
#include "ltcm/scalar.hpp"

namespace ltcm {

// Uniform element access for the two field types.
template <class T>
struct FieldOps;

template <>
struct FieldOps<Scalar> {
    static bool zeroish(const Scalar& x) { return x.is_zero_to_precision(); }
    static bool exact_zero(const Scalar& x) { return x.is_exact_zero(); }
    // integer valuation used for pivot choice
    static long pivot_val(const Scalar& x) { return x.val(); }
    static std::optional<long> lower_bound(const Scalar& x) {
        if (x.is_exact_zero())
            return std::nullopt;
        return x.val_lower_bound();
    }
    static Scalar zero(const Scalar& model) { return Scalar::exact_zero(model.ctx()); }
    static Scalar one(const Scalar& model) { return Scalar::one(model.ctx()); }
    static Scalar approx_with_bound(const Scalar& model, long b) {
        return Scalar::approx_zero(model.ctx(), b);
    }
};

template <>
struct FieldOps<ExtScalar> {
    static bool zeroish(const ExtScalar& x) { return x.is_zero_to_precision(); }
    static bool exact_zero(const ExtScalar& x) {
        return x.a().is_exact_zero() && x.b().is_exact_zero();
    }
    // 2*v_K so that both ramification types stay integral
    static long pivot_val(const ExtScalar& x) { return x.val2(); }
    static std::optional<long> lower_bound(const ExtScalar& x) {
        long ve = x.ext().ramified() ? 1 : 0;
        auto la = FieldOps<Scalar>::lower_bound(x.a());
        auto lb = FieldOps<Scalar>::lower_bound(x.b());
        std::optional<long> out;
        if (la)
            out = 2 * *la;
        if (lb) {
            long cand = 2 * *lb + ve;
            if (!out || cand < *out)
                out = cand;
        }
        return out;
    }
    static ExtScalar zero(const ExtScalar& model) { return ExtScalar::zero(model.ext()); }
    static ExtScalar one(const ExtScalar& model) { return ExtScalar::one(model.ext()); }
    static ExtScalar approx_with_bound(const ExtScalar& model, long b2) {
        const QuadExt& K = model.ext();
        long bf = (b2 >= 0) ? (b2 + 1) / 2 : b2 / 2;
        return ExtScalar(K, Scalar::approx_zero(K.ctx(), bf), Scalar::approx_zero(K.ctx(), bf));
    }
};

// Dense polynomial, coefficients ascending. Only trailing exact zeros are
// trimmed at construction; an approximate-zero leading coefficient stays put
// so precision loss remains visible to callers that inspect the degree.
template <class T>
class Poly {
  public:
    Poly() = default;
    explicit Poly(std::vector<T> coeffs) : c_(std::move(coeffs)) { trim(); }

    static Poly zero_like(const T& model) {
        Poly p;
        p.c_.push_back(FieldOps<T>::zero(model));
        p.trim();
        return p;
    }

    // X - r
    static Poly x_minus(const T& r) {
        return Poly(std::vector<T>{-r, FieldOps<T>::one(r)});
    }

    long degree() const { return static_cast<long>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }

    const T& coeff(size_t k) const { return c_.at(k); }
    const std::vector<T>& coeffs() const { return c_; }

    bool monic() const {
        if (c_.empty())
            return false;
        T d = c_.back() - FieldOps<T>::one(c_.back());
        return FieldOps<T>::zeroish(d);
    }

    T eval(const T& x) const {
        if (c_.empty())
            return FieldOps<T>::zero(x);
        T acc = c_.back();
        for (size_t k = c_.size() - 1; k-- > 0;)
            acc = acc * x + c_[k];
        return acc;
    }

    friend Poly operator+(const Poly& p, const Poly& q) {
        std::vector<T> c;
        size_t n = std::max(p.c_.size(), q.c_.size());
        for (size_t k = 0; k < n; ++k) {
            if (k < p.c_.size() && k < q.c_.size())
                c.push_back(p.c_[k] + q.c_[k]);
            else if (k < p.c_.size())
                c.push_back(p.c_[k]);
            else
                c.push_back(q.c_[k]);
        }
        return Poly(std::move(c));
    }

    friend Poly operator*(const Poly& p, const Poly& q) {
        if (p.c_.empty() || q.c_.empty())
            return Poly();
        std::vector<T> c(p.c_.size() + q.c_.size() - 1, FieldOps<T>::zero(p.c_[0]));
        for (size_t i = 0; i < p.c_.size(); ++i)
            for (size_t j = 0; j < q.c_.size(); ++j)
                c[i + j] = c[i + j] + p.c_[i] * q.c_[j];
        return Poly(std::move(c));
    }

    // coefficients agree to the shared precision and degrees match
    friend bool agree(const Poly& p, const Poly& q) {
        if (p.degree() != q.degree())
            return false;
        for (size_t k = 0; k < p.c_.size(); ++k)
            if (!FieldOps<T>::zeroish(p.c_[k] - q.c_[k]))
                return false;
        return true;
    }

  private:
    void trim() {
        while (!c_.empty() && FieldOps<T>::exact_zero(c_.back()))
            c_.pop_back();
    }
    std::vector<T> c_;
};

using PolyF = Poly<Scalar>;
using PolyK = Poly<ExtScalar>;

} // namespace ltcm
