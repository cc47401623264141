#include <catch2/catch_amalgamated.hpp>

#include "ltcm/formula.hpp"
#include "ltcm/rng.hpp"

using namespace ltcm;

namespace {

MatF rand_gl(const PadicContext& C, Rng& rng, size_t n) {
    for (;;) {
        MatF m = MatF::zero(n, n, Scalar::exact_zero(C));
        for (size_t i = 0; i < n; ++i)
            for (size_t j = 0; j < n; ++j)
                m.at(i, j) = Scalar::from_int(C, rng.range(-9, 9));
        Scalar d = mat_det(m);
        if (!d.is_zero_to_precision() && d.val() == 0)
            return m;
    }
}

ExtScalar rand_unit_ext(const QuadExt& K, Rng& rng) {
    const PadicContext& C = K.ctx();
    for (;;) {
        ExtScalar x(K, Scalar::from_int(C, rng.range(-9, 9)),
                    Scalar::from_int(C, rng.range(-9, 9)));
        if (!x.is_zero_to_precision() && x.val2() == 0)
            return x;
    }
}

// unit-norm strict element: both components are units, so the invariant
// stays integral while its distance to the commutative locus is exactly one
CDAElement strict_unit_j(const KEmbedding& emb, Rng& rng) {
    return emb.embed(rand_unit_ext(emb.K, rng)) +
           emb.embed(rand_unit_ext(emb.K, rng)) * CDAElement::pi_power(*emb.T, 1);
}

// odd-valuation strict element, the generic hypothesis of the closed formula
CDAElement strict_j(const KEmbedding& emb, Rng& rng) {
    const PadicContext& C = emb.T->ctx();
    ExtScalar pi_k(emb.K, Scalar::pi(C), Scalar::exact_zero(C));
    return emb.embed(pi_k * rand_unit_ext(emb.K, rng)) +
           emb.embed(rand_unit_ext(emb.K, rng)) * CDAElement::pi_power(*emb.T, 1);
}

EquiPair pair0(const KEmbedding& emb) {
    size_t h = emb.T->deg() / 2;
    return make_equi_pair(emb, standard_tau(emb.K, h), CDAElement::one(*emb.T));
}

MatF diag_pi(const PadicContext& C, long a, long b) {
    MatF m = MatF::identity(2, Scalar::one(C));
    m.at(0, 0) = Scalar::pi(C, a);
    m.at(1, 1) = Scalar::pi(C, b);
    return m;
}

void check_identity(const IntersectionReport& r) {
    REQUIRE(r.value == r.constant_C * r.disc_factor * r.integral);
}

} // namespace

TEST_CASE("report identity and closure constant placement") {
    PadicContext C3(3, 64);
    Rng rng(5150);
    Tower T(C3, 2);
    QuadExt Ku = QuadExt::unramified(C3);
    KEmbedding emb = embed_quadratic(T, Ku);
    EquiPair pu = pair0(emb);
    CDAElement j = strict_j(emb, rng);
    MatF I2 = MatF::identity(2, Scalar::one(C3));

    IntersectionReport r1 = intersection_number(j, pu, single_coset(1, I2));
    check_identity(r1);
    REQUIRE(r1.constant_C == Rat(1));
    REQUIRE(r1.disc_factor == Rat(1));
    REQUIRE(r1.n == 1);
    REQUIRE(r1.cells_used > 0);

    IntersectionReport r0 = intersection_number(j, pu, single_coset(0, I2));
    check_identity(r0);
    REQUIRE(r0.constant_C == c_closed(Ku, 1));
    REQUIRE(r0.n == 0);
}

TEST_CASE("hecke translate levels differ by the closure constant") {
    PadicContext C3(3, 64);
    Rng rng(8086);
    Tower T(C3, 2);
    QuadExt Ku = QuadExt::unramified(C3);
    KEmbedding emb = embed_quadratic(T, Ku);
    EquiPair pu = pair0(emb);
    CDAElement j = strict_j(emb, rng);
    MatF g0 = diag_pi(C3, 1, 0);

    // against this translate the norm difference is identically 1/q, so
    // both levels share the same integral part
    IntersectionReport r0 = hecke_intersection(j, pu, 0, g0);
    IntersectionReport r1 = hecke_intersection(j, pu, 1, g0);
    check_identity(r0);
    check_identity(r1);
    REQUIRE(r0.integral == Rat(1, 3));
    REQUIRE(r1.integral == Rat(1, 3));
    REQUIRE(r0.constant_C == Rat(3, 4));
    REQUIRE(r1.constant_C == Rat(1));
    REQUIRE(r0.value == Rat(1, 4));
    REQUIRE(r1.value == Rat(1, 3));
    REQUIRE(r0.value / r1.value == c_closed(Ku, 1));
}

TEST_CASE("hecke at a level element reduces to the plain intersection") {
    PadicContext C3(3, 64);
    Rng rng(1234);
    Tower T(C3, 2);
    QuadExt Ku = QuadExt::unramified(C3);
    KEmbedding emb = embed_quadratic(T, Ku);
    EquiPair pu = pair0(emb);
    CDAElement j = strict_j(emb, rng);

    MatF k0 = rand_gl(C3, rng, 2);
    IntersectionReport h0 = hecke_intersection(j, pu, 0, k0);
    IntersectionReport s0 = intersection_number(j, pu, single_coset(0, k0));
    REQUIRE(h0.value == s0.value);
    REQUIRE(h0.constant_C == s0.constant_C);
    REQUIRE(h0.integral == s0.integral);

    // a level one element: identity plus pi times an integral matrix
    MatF k1 = MatF::identity(2, Scalar::one(C3));
    for (size_t i = 0; i < 2; ++i)
        for (size_t jj = 0; jj < 2; ++jj)
            k1.at(i, jj) = k1.at(i, jj) + Scalar::from_int(C3, 3 * rng.range(-2, 2));
    IntersectionReport h1 = hecke_intersection(j, pu, 1, k1);
    IntersectionReport s1 = intersection_number(j, pu, single_coset(1, k1));
    REQUIRE(h1.value == s1.value);
}

TEST_CASE("pipeline matches the exhaustive oracle end to end") {
    PadicContext C3(3, 64);
    Rng rng(4242);
    Tower T(C3, 2);
    QuadExt Ku = QuadExt::unramified(C3);
    KEmbedding emb = embed_quadratic(T, Ku);
    EquiPair pu = pair0(emb);
    CDAElement j = strict_j(emb, rng);
    MatF I2 = MatF::identity(2, Scalar::one(C3));

    IntersectionReport r = intersection_number(j, pu, single_coset(0, I2));
    CycleIntegrand G = CycleIntegrand::res_norm(j, pu);
    auto Gv = [&](const MatF& x) { return G.value(x); };
    Rat oracle = exhaustive_integrate(Gv, single_coset(0, I2), 2);
    REQUIRE(r.integral == oracle);
    REQUIRE(r.value == c_closed(Ku, 1) * disc_norm(Ku, 1) * oracle);
}

TEST_CASE("strictness gate and singular orbits") {
    PadicContext C3(3, 64);
    Rng rng(99);
    Tower T2(C3, 2);
    QuadExt Ku = QuadExt::unramified(C3);
    KEmbedding emb = embed_quadratic(T2, Ku);
    EquiPair pu = pair0(emb);
    MatF I2 = MatF::identity(2, Scalar::one(C3));

    // at h = 2 an embedded field element has invariant degree 1 < h
    Tower T4(C3, 4);
    KEmbedding emb4 = embed_quadratic(T4, QuadExt::unramified(C3));
    EquiPair p4 = pair0(emb4);
    MatF I4 = MatF::identity(4, Scalar::one(C3));
    CDAElement low = CDAElement::from_scalar(T4, Scalar::from_int(C3, 2));
    REQUIRE_THROWS_AS(intersection_number(low, p4, single_coset(0, I4)), NotIrreducible);
    REQUIRE_THROWS_AS(hecke_intersection(low, p4, 0, I4), NotIrreducible);

    // an element of the framing field passes the degree gate at h = 1 but
    // meets the commutative locus, which surfaces as a singular orbit for
    // the translate form and as a precision error for the plain one
    CDAElement flat = emb.embed(rand_unit_ext(Ku, rng));
    REQUIRE_THROWS_AS(hecke_intersection(flat, pu, 0, I2), SingularOrbit);
    REQUIRE_THROWS_AS(intersection_number(flat, pu, single_coset(0, I2)), PrecisionExhausted);

    // identical pairs give an exactly vanishing norm form
    REQUIRE_THROWS_AS(intersection_two_fields(pu, pu, 1), SingularOrbit);

    // budget exhaustion propagates untouched
    CDAElement j = strict_j(emb, rng);
    IntegrateOptions tiny;
    tiny.cell_budget = 5;
    REQUIRE_THROWS_AS(intersection_number(j, pu, single_coset(0, I2), tiny), BudgetExceeded);

    REQUIRE_THROWS_AS(hecke_intersection(j, pu, -1, I2), DomainError);
    REQUIRE_THROWS_AS(intersection_two_fields(pu, pair0(embed_quadratic(
                          T2, QuadExt::ramified(C3, false))), -1), DomainError);
}

TEST_CASE("two fields stabilize to the infinite level pairing") {
    PadicContext C3(3, 64);
    Tower T(C3, 2);
    QuadExt Ku = QuadExt::unramified(C3);
    QuadExt Kr = QuadExt::ramified(C3, false);
    EquiPair p1 = pair0(embed_quadratic(T, Ku));
    EquiPair p2 = pair0(embed_quadratic(T, Kr));

    Rat inf = infinite_level_intersection(p1, p2);
    IntersectionReport r1 = intersection_two_fields(p1, p2, 1);
    IntersectionReport r2 = intersection_two_fields(p1, p2, 2);
    check_identity(r1);
    check_identity(r2);
    REQUIRE(r1.value == inf);
    REQUIRE(r2.value == inf);
    REQUIRE(r1.value == Rat(1));

    // full level folds the level degrees away entirely
    IntersectionReport r0 = intersection_two_fields(p1, p2, 0);
    check_identity(r0);
    REQUIRE(r0.constant_C == c_pair(Ku, Kr, 1));
    REQUIRE(r0.integral == r0.value / (r0.constant_C * r0.disc_factor));

    // recomputation at doubled precision is bit-identical
    PadicContext C3w(3, 128);
    Tower Tw(C3w, 2);
    EquiPair q1 = pair0(embed_quadratic(Tw, QuadExt::unramified(C3w)));
    EquiPair q2 = pair0(embed_quadratic(Tw, QuadExt::ramified(C3w, false)));
    IntersectionReport rw = intersection_two_fields(q1, q2, 1);
    REQUIRE(rw.value == r1.value);
    REQUIRE(rw.integral == r1.integral);
}

TEST_CASE("same field specialization agrees with the plain intersection") {
    PadicContext C3(3, 64);
    Rng rng(606);
    Tower T(C3, 2);
    QuadExt Ku = QuadExt::unramified(C3);
    KEmbedding emb = embed_quadratic(T, Ku);
    EquiPair p1 = pair0(emb);
    MatF I2 = MatF::identity(2, Scalar::one(C3));

    CDAElement j = strict_unit_j(emb, rng);
    EquiPair p2 = make_equi_pair(emb, standard_tau(Ku, 1), j);

    for (long n : {0L, 1L}) {
        IntersectionReport lhs = intersection_two_fields(p1, p2, n);
        IntersectionReport rhs = intersection_number(j, p1, single_coset(n, I2));
        REQUIRE(lhs.value == rhs.value);
    }
}

TEST_CASE("central scaling with a compensating translate") {
    PadicContext C3(3, 64);
    Rng rng(7070);
    Tower T(C3, 2);
    QuadExt Ku = QuadExt::unramified(C3);
    KEmbedding emb = embed_quadratic(T, Ku);
    EquiPair pu = pair0(emb);
    CDAElement j = strict_j(emb, rng);
    MatF I2 = MatF::identity(2, Scalar::one(C3));

    IntersectionReport base = intersection_number(j, pu, single_coset(0, I2));

    // scale by the uniformizer and pull the support back by its inverse
    CDAElement zj = CDAElement::from_scalar(T, Scalar::pi(C3)) * j;
    MatF zinv = MatF::zero(2, 2, Scalar::exact_zero(C3));
    for (size_t i = 0; i < 2; ++i)
        zinv.at(i, i) = Scalar::pi(C3, -1);
    IntersectionReport moved = intersection_number(zj, pu, single_coset(0, zinv));
    REQUIRE(moved.value == base.value);
    REQUIRE(moved.integral == base.integral);

    // a central unit needs no compensation at all
    CDAElement uj = CDAElement::from_scalar(T, Scalar::from_int(C3, 2)) * j;
    IntersectionReport scaled = intersection_number(uj, pu, single_coset(0, I2));
    REQUIRE(scaled.value == base.value);
}
