#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ltcm/cda.hpp"
#include "ltcm/irreducible.hpp"
#include "ltcm/linalg.hpp"
#include "ltcm/quadext.hpp"
#include "ltcm/rational.hpp"

namespace ltcm {

// A framing of the quadratic extension K inside F^{2h} is stored as a
// 2h x h matrix tau over K; as an F-linear map it sends x to
// tau*x + conj(tau)*conj(x), so its matrix in power-basis coordinates on
// both sides splits entrywise as tau = a + gen*b into the 2h x 2h block
// [a | b]. The standard framing [I; gen*I] has coordinate matrix I, which
// pins the normalization: heights and conductors read off this matrix
// directly for either ramification type of K.

inline MatF tau_coord_matrix(const MatK& tau) {
    size_t h = tau.cols();
    if (h == 0 || tau.rows() != 2 * h)
        throw DomainError("framing must be a 2h x h matrix");
    MatF m = MatF::zero(2 * h, 2 * h, tau.at(0, 0).a());
    for (size_t i = 0; i < 2 * h; ++i)
        for (size_t j = 0; j < h; ++j) {
            m.at(i, j) = tau.at(i, j).a();
            m.at(i, j + h) = tau.at(i, j).b();
        }
    return m;
}

inline long height_tau(const MatK& tau) {
    Scalar d = mat_det(tau_coord_matrix(tau));
    if (d.is_exact_zero())
        throw SingularMatrix("framing is not an isomorphism");
    return d.val();
}

// Largest elementary divisor exponent of the coordinate matrix, clamped at
// zero: the framing already covers the standard lattice when all exponents
// are nonpositive.
inline long cond_tau(const MatK& tau) {
    SNFResult s = snf(tau_coord_matrix(tau));
    long top = s.exponents.back();
    return top > 0 ? top : 0;
}

// The standard framing [I; gen*I].
inline MatK standard_tau(const QuadExt& K, size_t h) {
    MatK t = MatK::zero(2 * h, h, ExtScalar::zero(K));
    for (size_t j = 0; j < h; ++j) {
        t.at(j, j) = ExtScalar::one(K);
        t.at(j + h, j) = ExtScalar::gen(K);
    }
    return t;
}

// Left translate of a framing by an F-matrix.
inline MatK apply_translate(const MatF& g, const MatK& tau) {
    size_t n = tau.rows(), h = tau.cols();
    if (g.rows() != n || g.cols() != n)
        throw DomainError("translate size does not match the framing");
    const QuadExt& K = tau.at(0, 0).ext();
    MatK out = MatK::zero(n, h, ExtScalar::zero(K));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < h; ++j) {
            ExtScalar acc = ExtScalar::zero(K);
            for (size_t k = 0; k < n; ++k)
                acc = acc + ExtScalar(K, g.at(i, k) * tau.at(k, j).a(), g.at(i, k) * tau.at(k, j).b());
            out.at(i, j) = acc;
        }
    return out;
}

struct EquiPair {
    KEmbedding emb;
    MatK tau;
    CDAElement phi;
    CDAMat delta;     // phi * (tau | conj tau), cached with its inverse
    CDAMat delta_inv; // because every operation below conjugates by it
    long h = 0;
    long height = 0;
    long cond = 0;

    const QuadExt& K() const { return emb.K; }
    const Tower& tower() const { return *emb.T; }
};

namespace detail {

inline CDAMat embed_matF(const Tower& T, const MatF& g) {
    CDAMat m = CDAMat::zero(g.rows(), g.cols(), CDAElement::zero(T));
    for (size_t i = 0; i < g.rows(); ++i)
        for (size_t j = 0; j < g.cols(); ++j)
            m.at(i, j) = CDAElement::from_scalar(T, g.at(i, j));
    return m;
}

inline CDAMat scalar_mat(const Tower& T, const CDAElement& x, size_t n) {
    CDAMat m = CDAMat::zero(n, n, CDAElement::zero(T));
    for (size_t i = 0; i < n; ++i)
        m.at(i, i) = x;
    return m;
}

inline std::vector<Scalar> cda_flat(const CDAElement& x) {
    size_t n = x.tower().deg();
    std::vector<Scalar> v;
    v.reserve(n * n);
    for (size_t i = 0; i < n; ++i)
        for (size_t k = 0; k < n; ++k)
            v.push_back(x.coeffs()[i].coords()[k]);
    return v;
}

inline MatK conj_entries(const MatK& m) {
    MatK out = m;
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j)
            out.at(i, j) = ext_conj(m.at(i, j));
    return out;
}

inline long ceil_div(long a, long b) {
    long q = a / b, r = a % b;
    return q + ((r != 0 && (a > 0) == (b > 0)) ? 1 : 0);
}

} // namespace detail

inline EquiPair make_equi_pair(const KEmbedding& emb, const MatK& tau, const CDAElement& phi) {
    size_t h = tau.cols();
    const Tower& T = *emb.T;
    if (h == 0 || tau.rows() != 2 * h)
        throw DomainError("framing must be a 2h x h matrix");
    if (T.deg() != 2 * h)
        throw DomainError("framing size does not match the algebra degree");
    if (!tau.at(0, 0).ext().same(emb.K))
        throw DomainError("framing entries and embedding disagree on K");
    long mt = height_tau(tau);
    long mp = cda_val(phi);
    if (mt != mp)
        throw HeightMismatch("framing height " + std::to_string(mt) +
                             " does not match element height " + std::to_string(mp));
    long cond = cond_tau(tau);

    CDAMat delta = CDAMat::zero(2 * h, 2 * h, CDAElement::zero(T));
    for (size_t i = 0; i < 2 * h; ++i)
        for (size_t j = 0; j < h; ++j) {
            delta.at(i, j) = phi * emb.embed(tau.at(i, j));
            delta.at(i, j + h) = phi * emb.embed(ext_conj(tau.at(i, j)));
        }
    Scalar nrd = nrd_block(delta);
    if (nrd.is_exact_zero())
        throw DeltaNormMismatch("pair matrix is singular");
    long hl = static_cast<long>(h);
    long want = 4 * hl * mt + emb.K.disc_val() * hl * hl;
    if (nrd.val() != want)
        throw DeltaNormMismatch("pair matrix norm valuation " + std::to_string(nrd.val()) +
                                ", expected " + std::to_string(want));
    CDAMat dinv = cda_mat_inverse(delta);
    return EquiPair{emb, tau, phi, std::move(delta), std::move(dinv), hl, mt, cond};
}

// Pull an algebra element back through the K-embedding. The coordinate
// system is the n^2 structure coefficients, solved against the images of 1
// and gen; failure to land in the plane they span is reported as a
// precision problem because the callers below only feed in elements that
// are provably in the embedded field.
inline ExtScalar unembed(const CDAElement& x, const KEmbedding& emb) {
    const Tower& T = *emb.T;
    size_t n = T.deg();
    std::vector<Scalar> v1 = detail::cda_flat(CDAElement::one(T));
    std::vector<Scalar> vg = detail::cda_flat(emb.gen_img);
    MatF a = MatF::zero(n * n, 2, v1[0]);
    for (size_t r = 0; r < n * n; ++r) {
        a.at(r, 0) = v1[r];
        a.at(r, 1) = vg[r];
    }
    auto sol = linear_solve(a, detail::cda_flat(x));
    if (!sol)
        throw PrecisionExhausted("element does not lie in the embedded quadratic field");
    return ExtScalar(emb.K, (*sol)[0], (*sol)[1]);
}

// Conjugating an F-matrix by the pair matrix lands in GL_{2h}(K) with
// paired blocks [[x+, x-], [conj x-, conj x+]]; returns (x+, x-).
inline std::pair<MatK, MatK> xpm_decompose(const MatF& g, const EquiPair& pair) {
    size_t h = static_cast<size_t>(pair.h);
    if (g.rows() != 2 * h || g.cols() != 2 * h)
        throw DomainError("matrix size does not match the pair");
    CDAMat x = pair.delta_inv * detail::embed_matF(pair.tower(), g) * pair.delta;
    MatK e = MatK::zero(2 * h, 2 * h, ExtScalar::zero(pair.K()));
    for (size_t i = 0; i < 2 * h; ++i)
        for (size_t j = 0; j < 2 * h; ++j)
            e.at(i, j) = unembed(x.at(i, j), pair.emb);
    for (size_t i = 0; i < h; ++i)
        for (size_t j = 0; j < h; ++j) {
            if (!agree(e.at(h + i, h + j), ext_conj(e.at(i, j))) ||
                !agree(e.at(h + i, j), ext_conj(e.at(i, j + h))))
                throw PrecisionExhausted("conjugated matrix lost its paired block form");
        }
    return {e.block(0, 0, h, h), e.block(0, h, h, h)};
}

// Invariant polynomial of g relative to the pair: conjugate into the paired
// block form over K, run the split block reduction there, and certify that
// the coefficients are rational.
inline PolyF invariant_poly_tau(const MatF& g, const EquiPair& pair) {
    auto [xp, xm] = xpm_decompose(g, pair);
    size_t h = static_cast<size_t>(pair.h);
    MatK x = MatK::zero(2 * h, 2 * h, ExtScalar::zero(pair.K()));
    x.set_block(0, 0, xp);
    x.set_block(0, h, xm);
    x.set_block(h, 0, detail::conj_entries(xm));
    x.set_block(h, h, detail::conj_entries(xp));
    PolyK pk = [&] {
        try {
            return invariant_poly_split(x);
        } catch (const DegenerateElement&) {
            throw;
        } catch (const SingularMatrix&) {
            throw;
        } catch (const PrecisionExhausted&) {
            throw;
        } catch (const LtcmError&) {
            throw CoefficientNotRational("block reduction left the embedded field");
        }
    }();
    std::vector<Scalar> c;
    c.reserve(static_cast<size_t>(pk.degree()) + 1);
    for (long k = 0; k <= pk.degree(); ++k) {
        const ExtScalar& z = pk.coeff(k);
        if (!z.b().is_zero_to_precision())
            throw CoefficientNotRational("invariant polynomial coefficient has a generator part");
        c.push_back(z.a());
    }
    return PolyF(std::move(c));
}

inline Scalar res_rel(const PolyF& pj, const MatF& g, const EquiPair& pair, bool strict = false) {
    if (pj.degree() != pair.h || !pj.monic())
        throw DomainError("left polynomial must be monic of degree h");
    if (strict && !is_irreducible(pj))
        throw NotIrreducible("left polynomial is not irreducible");
    PolyF pg = invariant_poly_tau(g, pair);
    Scalar r = resultant(pj, pg);
    if (strict && r.is_zero_to_precision())
        throw DegenerateElement("resultant vanishes under the strict hypotheses");
    return r;
}

inline Scalar res_rel(const CDAElement& j, const MatF& g, const EquiPair& pair, bool strict = false) {
    PolyF pj = invariant_poly_D(j, pair.emb, pair.h, strict);
    if (pj.degree() != pair.h)
        throw DegenerateElement("invariant polynomial degree is below h");
    return res_rel(pj, g, pair, strict);
}

// Independent check on |res_rel|: the norm of the lower-left block of
// delta^{-1} j g delta. Agrees with q^{v(res_rel)} up to the correction
// ||nrd(j) det(g)||^h, which is trivial on unit samples.
inline Rat res_rel_norm_oracle(const CDAElement& j, const MatF& g, const EquiPair& pair) {
    if (pair.h > 2)
        throw DomainError("norm form only supported for h <= 2");
    size_t h = static_cast<size_t>(pair.h);
    const Tower& T = pair.tower();
    CDAMat m = pair.delta_inv * detail::scalar_mat(T, j, 2 * h) *
               detail::embed_matF(T, g) * pair.delta;
    Scalar s = nrd_block(m.block(h, 0, h, h));
    // a certified zero block means the cycles coincide up to the embedded
    // group; moderate nonzero norms always keep a regular valuation
    if (s.is_zero_to_precision())
        throw InfiniteIntersection("norm form vanishes identically");
    return qpow(T.ctx().p(), s.val());
}

namespace detail {

inline Rat intersection_from_block(const EquiPair& p1, const CDAMat& a) {
    size_t h = static_cast<size_t>(p1.h);
    Scalar s = nrd_block(a.block(h, 0, h, h));
    if (s.is_zero_to_precision())
        throw InfiniteIntersection("cycles meet in every level");
    return disc_norm(p1.K(), p1.h) * qpow(p1.tower().ctx().p(), s.val());
}

inline void check_compatible(const EquiPair& p1, const EquiPair& p2) {
    if (!p1.tower().same(p2.tower()) || p1.h != p2.h)
        throw DomainError("pairs live on different algebras");
}

} // namespace detail

// Total intersection multiplicity over all levels. The two pairs may frame
// different quadratic extensions of the same base.
inline Rat infinite_level_intersection(const EquiPair& p1, const EquiPair& p2) {
    detail::check_compatible(p1, p2);
    return detail::intersection_from_block(p1, p1.delta_inv * p2.delta);
}

inline Rat infinite_level_intersection(const EquiPair& p1, const EquiPair& p2, const MatF& g) {
    detail::check_compatible(p1, p2);
    size_t n = 2 * static_cast<size_t>(p1.h);
    if (g.rows() != n || g.cols() != n)
        throw DomainError("translate size does not match the pairs");
    return detail::intersection_from_block(
        p1, p1.delta_inv * detail::embed_matF(p1.tower(), g) * p2.delta);
}

namespace detail {

inline long stable_level_from_length(const Rat& len, const EquiPair& p1, const EquiPair& p2) {
    auto e = q_power_exponent(len, p1.tower().ctx().p());
    if (!e)
        throw DomainError("intersection length is not a prime power");
    return ceil_div(*e, 2 * p1.h) + 2 * std::max(p1.cond, p2.cond) + 1;
}

} // namespace detail

// Smallest level at which the finite-level intersection count has already
// reached its limit value.
inline long stable_level(const EquiPair& p1, const EquiPair& p2) {
    return detail::stable_level_from_length(infinite_level_intersection(p1, p2), p1, p2);
}

inline long stable_level(const EquiPair& p1, const EquiPair& p2, const MatF& g) {
    return detail::stable_level_from_length(infinite_level_intersection(p1, p2, g), p1, p2);
}

// F-matrix of the K-linear map k acting through the framing: the matrix of
// k in power-basis coordinates is [[s, e t], [t, s]] blockwise for
// k = s + gen t, conjugated by the framing's coordinate change.
inline MatF embed_gl(const MatK& k, const MatK& tau) {
    size_t h = tau.cols();
    if (k.rows() != h || k.cols() != h)
        throw DomainError("matrix size does not match the framing");
    const QuadExt& K = tau.at(0, 0).ext();
    Scalar e = K.gen_sq();
    MatF bm = MatF::zero(2 * h, 2 * h, e);
    for (size_t i = 0; i < h; ++i)
        for (size_t j = 0; j < h; ++j) {
            bm.at(i, j) = k.at(i, j).a();
            bm.at(i, j + h) = e * k.at(i, j).b();
            bm.at(i + h, j) = k.at(i, j).b();
            bm.at(i + h, j + h) = k.at(i, j).a();
        }
    // F-matrix of the framing itself: columns scale to (2a | 2e b)
    MatF c = tau_coord_matrix(tau);
    Scalar two = Scalar::from_int(e.ctx(), 2);
    MatF mt = MatF::zero(2 * h, 2 * h, e);
    for (size_t i = 0; i < 2 * h; ++i)
        for (size_t j = 0; j < h; ++j) {
            mt.at(i, j) = two * c.at(i, j);
            mt.at(i, j + h) = two * e * c.at(i, j + h);
        }
    return mt * bm * mat_inverse(mt);
}

} // namespace ltcm
