#pragma once

#include "ltcm/integrate.hpp"

namespace ltcm {

// Assembled result of one intersection computation. The factorization is
// part of the contract: value = constant_C * disc_factor * integral always
// holds exactly, so downstream consumers can audit each piece.
struct IntersectionReport {
    Rat value;
    Rat constant_C;
    Rat disc_factor;
    Rat integral;
    long cells_used = 0;
    long n = 0;
};

namespace detail {

inline IntersectionReport assemble_report(const Rat& c, const Rat& disc, const Rat& integral,
                                          long cells, long n) {
    IntersectionReport r;
    r.constant_C = c;
    r.disc_factor = disc;
    r.integral = integral;
    r.cells_used = cells;
    r.n = n;
    r.value = c * disc * integral;
    return r;
}

} // namespace detail

// Closed intersection number of the cycle attached to j against the level
// structure described by f. The closure constant enters only at full level.
inline IntersectionReport intersection_number(const CDAElement& j, const EquiPair& pair,
                                              const TestFunction& f,
                                              const IntegrateOptions& opt = {}) {
    invariant_poly_D(j, pair.emb, pair.h, true);

    Rat c = f.n == 0 ? c_closed(pair.K(), pair.h) : Rat(1);
    CycleIntegrand G = CycleIntegrand::res_norm(j, pair);
    IntegrateStats st;
    Rat integral = adaptive_integrate(G, f, opt, &st);
    return detail::assemble_report(c, disc_norm(pair.K(), pair.h), integral, st.cells, f.n);
}

// Intersection of two cycles with (possibly) different multiplication
// fields at level n. The norm form must stay away from zero on the whole
// level subgroup; a vanishing cell means the orbit is singular.
inline IntersectionReport intersection_two_fields(const EquiPair& p1, const EquiPair& p2,
                                                  long n, const IntegrateOptions& opt = {}) {
    if (n < 0)
        throw DomainError("level must be nonnegative");
    CycleIntegrand F = CycleIntegrand::pair_norm(p1, p2);
    const Tower& T = p1.tower();
    const PadicContext& C = T.ctx();
    MatF id = MatF::identity(T.deg(), Scalar::one(C));

    Rat avg;
    IntegrateStats st;
    try {
        avg = adaptive_integrate(F, single_coset(n, id), opt, &st);
    } catch (const NormVanishes& e) {
        throw SingularOrbit(e.what());
    }

    Rat c = c_pair(p1.K(), p2.K(), p1.h) *
            Rat(deg_level_K(p1.K(), p1.h, n) * deg_level_K(p2.K(), p2.h, n));
    Rat integral = avg * vol_level(C, p1.h, n);
    return detail::assemble_report(c, disc_norm(p1.K(), p1.h), integral, st.cells, n);
}

// Intersection against the Hecke translate carried by the double coset of
// g0 at level n. Same closure constant convention as intersection_number.
inline IntersectionReport hecke_intersection(const CDAElement& j, const EquiPair& pair, long n,
                                             const MatF& g0, const IntegrateOptions& opt = {}) {
    if (n < 0)
        throw DomainError("level must be nonnegative");
    invariant_poly_D(j, pair.emb, pair.h, true);

    Rat c = n == 0 ? c_closed(pair.K(), pair.h) : Rat(1);
    CycleIntegrand G = CycleIntegrand::res_norm(j, pair);
    IntegrateStats st;
    Rat integral;
    try {
        integral = adaptive_integrate(G, double_coset(n, g0), opt, &st);
    } catch (const NormVanishes& e) {
        throw SingularOrbit(e.what());
    }
    return detail::assemble_report(c, disc_norm(pair.K(), pair.h), integral, st.cells, n);
}

} // namespace ltcm
