#include <catch2/catch_amalgamated.hpp>

#include "ltcm/integrate.hpp"
#include "ltcm/rng.hpp"

using namespace ltcm;

namespace {

MatF matF_of(const PadicContext& C, std::vector<std::vector<long>> rows) {
    MatF m = MatF::zero(rows.size(), rows[0].size(), Scalar::exact_zero(C));
    for (size_t i = 0; i < rows.size(); ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            m.at(i, j) = Scalar::from_int(C, rows[i][j]);
    return m;
}

MatF diag_pi(const PadicContext& C, long a, long b) {
    MatF m = MatF::identity(2, Scalar::one(C));
    m.at(0, 0) = Scalar::pi(C, a);
    m.at(1, 1) = Scalar::pi(C, b);
    return m;
}

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

// element with reduced norm of odd valuation; its difference against the
// commutative locus then has valuation 0 or 1 almost everywhere, which keeps
// every subdivision shallow
CDAElement strict_j(const KEmbedding& emb, Rng& rng) {
    const Tower& T = *emb.T;
    const PadicContext& C = T.ctx();
    ExtScalar pi_k(emb.K, Scalar::pi(C), Scalar::exact_zero(C));
    return emb.embed(pi_k * rand_unit_ext(emb.K, rng)) +
           emb.embed(rand_unit_ext(emb.K, rng)) * CDAElement::pi_power(T, 1);
}

EquiPair pair0(const KEmbedding& emb) {
    size_t h = emb.T->deg() / 2;
    return make_equi_pair(emb, standard_tau(emb.K, h), CDAElement::one(*emb.T));
}

// unit multiple of the residually unramified generator; it conjugates any
// ramified quadratic subfield, so adding it to an element of one produces
// norm classes on both sides that never meet
CDAElement unram_dir(const Tower& T, Rng& rng) {
    long p = static_cast<long>(T.ctx().p());
    std::vector<long> d(T.deg(), 0);
    d[1] = 1 + rng.range(0, p - 2);
    std::vector<FnElem> c;
    c.push_back(FnElem::from_int_coords(T, d));
    for (size_t i = 1; i < T.deg(); ++i)
        c.push_back(FnElem::zero(T));
    return CDAElement(T, std::move(c));
}

long residue_mod_p(const PadicContext& C, const Scalar& s) {
    long p = static_cast<long>(C.p());
    for (long r = 0; r < p; ++r) {
        Scalar d = s - Scalar::from_int(C, r);
        if (d.is_zero_to_precision() || d.val() >= 1)
            return r;
    }
    throw std::logic_error("residue_mod_p: no residue matched");
}

} // namespace

TEST_CASE("level subgroup orders match direct counts") {
    PadicContext C3(3, 64), C5(5, 64);

    // 2x2 matrices over Z/3 and Z/9 with unit determinant, counted directly
    long n1 = 0;
    for (long a = 0; a < 3; ++a)
        for (long b = 0; b < 3; ++b)
            for (long c = 0; c < 3; ++c)
                for (long d = 0; d < 3; ++d)
                    if (((a * d - b * c) % 3 + 3) % 3 != 0)
                        ++n1;
    REQUIRE(deg_level_F(C3, 1, 1) == n1);
    REQUIRE(n1 == 48);

    long n2 = 0;
    for (long a = 0; a < 9; ++a)
        for (long b = 0; b < 9; ++b)
            for (long c = 0; c < 9; ++c)
                for (long d = 0; d < 9; ++d)
                    if (((a * d - b * c) % 3 + 3) % 3 != 0)
                        ++n2;
    REQUIRE(deg_level_F(C3, 1, 2) == n2);
    REQUIRE(n2 == 3888);

    REQUIRE(deg_level_F(C3, 1, 0) == 1);
    REQUIRE(deg_level_F(C3, 1, 3) == 314928);
    REQUIRE(deg_level_F(C3, 2, 1) == 24261120);

    long n5 = 0;
    for (long a = 0; a < 5; ++a)
        for (long b = 0; b < 5; ++b)
            for (long c = 0; c < 5; ++c)
                for (long d = 0; d < 5; ++d)
                    if (((a * d - b * c) % 5 + 5) % 5 != 0)
                        ++n5;
    REQUIRE(deg_level_F(C5, 1, 1) == n5);
    REQUIRE(n5 == 480);

    // unramified side: units counted through the anisotropic norm form
    QuadExt Ku = QuadExt::unramified(C3);
    long e = residue_mod_p(C3, Ku.gen_sq());
    long u1 = 0, u2 = 0;
    for (long a = 0; a < 3; ++a)
        for (long b = 0; b < 3; ++b)
            if (((a * a - e * b * b) % 3 + 3) % 3 != 0)
                ++u1;
    for (long a = 0; a < 9; ++a)
        for (long b = 0; b < 9; ++b)
            if (((a * a - e * b * b) % 3 + 3) % 3 != 0)
                ++u2;
    REQUIRE(deg_level_K(Ku, 1, 1) == u1);
    REQUIRE(u1 == 8);
    REQUIRE(deg_level_K(Ku, 1, 2) == u2);
    REQUIRE(u2 == 72);

    // ramified side: a + b*gen is a unit exactly when a is
    QuadExt Kr = QuadExt::ramified(C3, false);
    long r1 = 0, r2 = 0;
    for (long a = 0; a < 3; ++a)
        for (long b = 0; b < 3; ++b)
            if (a % 3 != 0)
                ++r1;
    for (long a = 0; a < 9; ++a)
        for (long b = 0; b < 9; ++b)
            if (a % 3 != 0)
                ++r2;
    REQUIRE(deg_level_K(Kr, 1, 1) == r1);
    REQUIRE(r1 == 6);
    REQUIRE(deg_level_K(Kr, 1, 2) == r2);
    REQUIRE(r2 == 54);

    REQUIRE(deg_level_K(Ku, 1, 0) == 1);
    REQUIRE(deg_level_K(Kr, 1, 0) == 1);
}

TEST_CASE("volumes and closure constants") {
    PadicContext C3(3, 64);
    REQUIRE(vol_level(C3, 1, 0) == Rat(1));
    REQUIRE(vol_level(C3, 1, 1) == Rat(1, 48));
    REQUIRE(vol_level(C3, 1, 2) == Rat(1) / Rat(deg_level_F(C3, 1, 2)));

    QuadExt Ku = QuadExt::unramified(C3);
    QuadExt Kr = QuadExt::ramified(C3, false);
    QuadExt Kt = QuadExt::ramified(C3, true);
    REQUIRE(c_closed(Ku, 1) == Rat(3, 4));
    REQUIRE(c_closed(Kr, 1) == Rat(4, 3));
    REQUIRE(c_closed(Kt, 1) == Rat(4, 3));
    REQUIRE(c_pair(Ku, Kr, 1) == Rat(1));

    // the pairing constant closes up when both fields coincide
    for (unsigned long q : {3ul, 5ul, 7ul}) {
        PadicContext C(q, 64);
        for (const QuadExt& K :
             {QuadExt::unramified(C), QuadExt::ramified(C, false), QuadExt::ramified(C, true)}) {
            for (long h : {1L, 2L, 3L})
                REQUIRE(c_pair(K, K, h) == c_closed(K, h));
        }
    }

    // the defining ratio of subgroup orders does not depend on the level
    for (unsigned long q : {3ul, 5ul}) {
        PadicContext C(q, 64);
        std::vector<QuadExt> ks = {QuadExt::unramified(C), QuadExt::ramified(C, false)};
        for (const QuadExt& K1 : ks)
            for (const QuadExt& K2 : ks)
                for (long m = 1; m <= 3; ++m) {
                    Rat lhs = Rat(deg_level_F(C, 1, m)) /
                              Rat(deg_level_K(K1, 1, m) * deg_level_K(K2, 1, m));
                    REQUIRE(lhs == c_pair(K1, K2, 1));
                }
    }
}

TEST_CASE("exhaustive averages and evaluation counts") {
    PadicContext C3(3, 64);
    MatF I2 = MatF::identity(2, Scalar::one(C3));

    TestFunction f0 = single_coset(0, I2);
    long cnt = 0;
    auto ones = [&](const MatF&) {
        ++cnt;
        return Rat(7, 5);
    };
    REQUIRE(exhaustive_integrate(ones, f0, 0) == Rat(7, 5));
    REQUIRE(cnt == 1);

    cnt = 0;
    REQUIRE(exhaustive_integrate(ones, f0, 1) == Rat(7, 5));
    REQUIRE(cnt == 48);

    cnt = 0;
    REQUIRE(exhaustive_integrate(ones, f0, 2) == Rat(7, 5));
    REQUIRE(cnt == 3888);

    TestFunction f1 = single_coset(1, I2);
    cnt = 0;
    REQUIRE(exhaustive_integrate(ones, f1, 1) == Rat(7, 5));
    REQUIRE(cnt == 1);
    cnt = 0;
    REQUIRE(exhaustive_integrate(ones, f1, 2) == Rat(7, 5));
    REQUIRE(cnt == 81);

    TestFunction d0 = double_coset(0, diag_pi(C3, 1, 0));
    cnt = 0;
    REQUIRE(exhaustive_integrate(ones, d0, 1) == Rat(7, 5));
    REQUIRE(cnt == 4 * 48);

    // indicator of the depth-one subgroup picks out exactly its volume
    auto indicator = [&](const MatF& x) {
        for (size_t i = 0; i < 2; ++i)
            for (size_t j = 0; j < 2; ++j) {
                Scalar d = x.at(i, j);
                if (i == j)
                    d = d - Scalar::one(C3);
                if (!d.is_zero_to_precision() && d.val() < 1)
                    return Rat(0);
            }
        return Rat(1);
    };
    REQUIRE(exhaustive_integrate(indicator, f0, 1) == Rat(1, 48));

    REQUIRE_THROWS_AS(exhaustive_integrate(ones, f1, 0), DomainError);
}

TEST_CASE("double coset decomposition") {
    PadicContext C3(3, 64), C5(5, 64);
    Rng rng(4412);
    MatF I2 = MatF::identity(2, Scalar::one(C3));

    REQUIRE(decompose_double_coset(0, I2).size() == 1);
    REQUIRE(decompose_double_coset(1, I2).size() == 1);
    REQUIRE(decompose_double_coset(0, rand_gl(C3, rng, 2)).size() == 1);

    // one level of the standard diagonal representative
    std::vector<MatF> reps = decompose_double_coset(0, diag_pi(C3, 1, 0));
    REQUIRE(reps.size() == 4);
    for (const MatF& r : reps) {
        SNFResult s = snf(r);
        REQUIRE(s.exponents == std::vector<long>{0, 1});
    }
    REQUIRE(decompose_double_coset(0, diag_pi(C5, 1, 0)).size() == 6);
    REQUIRE(decompose_double_coset(1, diag_pi(C3, 1, 0)).size() == 3);

    // two levels give q^2 + q cosets; a central representative gives one
    REQUIRE(decompose_double_coset(0, diag_pi(C3, 2, 0)).size() == 12);
    REQUIRE(decompose_double_coset(0, diag_pi(C3, 1, 1)).size() == 1);

    IntegrateOptions tiny;
    tiny.cell_budget = 10;
    REQUIRE_THROWS_AS(decompose_double_coset(0, diag_pi(C3, 1, 0), tiny), EnumerationTooLarge);
}

TEST_CASE("adaptive matches exhaustive on strict elements") {
    PadicContext C3(3, 64);
    Rng rng(90210);
    Tower T(C3, 2);
    MatF I2 = MatF::identity(2, Scalar::one(C3));
    TestFunction f0 = single_coset(0, I2);
    TestFunction f1 = single_coset(1, I2);

    QuadExt Ku = QuadExt::unramified(C3);
    KEmbedding emb_u = embed_quadratic(T, Ku);
    EquiPair pu = pair0(emb_u);

    for (int trial = 0; trial < 2; ++trial) {
        CDAElement j = strict_j(emb_u, rng);
        REQUIRE(cda_val(j) == 1);
        CycleIntegrand G = CycleIntegrand::res_norm(j, pu);
        auto Gv = [&](const MatF& x) { return G.value(x); };

        IntegrateStats st;
        Rat a = adaptive_integrate(G, f0, {}, &st);
        REQUIRE(st.volume == Rat(1));
        REQUIRE(st.max_depth <= 2);
        REQUIRE(exhaustive_integrate(Gv, f0, 1) == a);
        REQUIRE(exhaustive_integrate(Gv, f0, 2) == a);

        // the value is an average of nonnegative q powers over the depth
        // two representatives, so that count clears the denominator
        Rat scaled = a * Rat(3888);
        REQUIRE(scaled.get_den() == 1);
    }

    // support shifted one level down
    {
        CDAElement j = strict_j(emb_u, rng);
        CycleIntegrand G = CycleIntegrand::res_norm(j, pu);
        auto Gv = [&](const MatF& x) { return G.value(x); };
        IntegrateStats st;
        Rat a = adaptive_integrate(G, f1, {}, &st);
        REQUIRE(st.max_depth <= 3);
        REQUIRE(exhaustive_integrate(Gv, f1, st.max_depth) == a);
    }

    // ramified framing field: the transverse direction is the residually
    // unramified generator rather than the division algebra uniformizer
    QuadExt Kr = QuadExt::ramified(C3, false);
    KEmbedding emb_r = embed_quadratic(T, Kr);
    EquiPair pr = pair0(emb_r);
    {
        ExtScalar pi_r(Kr, Scalar::pi(C3), Scalar::exact_zero(C3));
        CDAElement j = emb_r.embed(pi_r * rand_unit_ext(Kr, rng)) + unram_dir(T, rng);
        REQUIRE(cda_val(j) == 0);
        CycleIntegrand G = CycleIntegrand::res_norm(j, pr);
        auto Gv = [&](const MatF& x) { return G.value(x); };
        IntegrateStats st;
        Rat a = adaptive_integrate(G, f1, {}, &st);
        REQUIRE(st.max_depth <= 4);
        REQUIRE(exhaustive_integrate(Gv, f1, st.max_depth) == a);
    }

    // double cosets, both through the decomposition and folded adaptively
    {
        CDAElement j = strict_j(emb_u, rng);
        CycleIntegrand G = CycleIntegrand::res_norm(j, pu);
        auto Gv = [&](const MatF& x) { return G.value(x); };

        TestFunction fd1 = double_coset(1, diag_pi(C3, 1, 0));
        IntegrateStats st;
        Rat a = adaptive_integrate(G, fd1, {}, &st);
        REQUIRE(st.max_depth <= 3);
        REQUIRE(exhaustive_integrate(Gv, fd1, st.max_depth) == a);

        TestFunction fd0 = double_coset(0, diag_pi(C3, 1, 0));
        IntegrateStats st0;
        Rat a0 = adaptive_integrate(G, fd0, {}, &st0);
        REQUIRE(st0.max_depth <= 2);
        REQUIRE(exhaustive_integrate(Gv, fd0, st0.max_depth) == a0);

        // the norm difference against this diagonal support is the constant
        // 1/q: the translate has determinant valuation one while the strict
        // element stays integral, so the two sides never meet
        REQUIRE(a0 == Rat(1, 3));
        Rat a1 = adaptive_integrate(G, double_coset(1, diag_pi(C3, 1, 0)), {});
        REQUIRE(a1 == Rat(1, 3));
    }

    // right translation by a unimodular element leaves the average alone
    {
        CDAElement j = strict_j(emb_u, rng);
        CycleIntegrand G = CycleIntegrand::res_norm(j, pu);
        Rat base = adaptive_integrate(G, f0, {});
        MatF k = rand_gl(C3, rng, 2);
        REQUIRE(adaptive_integrate(G, single_coset(0, k), {}) == base);

        MatF g0 = diag_pi(C3, 1, 0);
        MatF moved = rand_gl(C3, rng, 2) * g0 * rand_gl(C3, rng, 2);
        Rat d_base = adaptive_integrate(G, double_coset(0, g0), {});
        REQUIRE(adaptive_integrate(G, double_coset(0, moved), {}) == d_base);
    }
}

TEST_CASE("adaptive certificates are sound") {
    PadicContext C3(3, 64);
    Rng rng(777);
    Tower T(C3, 2);
    QuadExt Ku = QuadExt::unramified(C3);
    KEmbedding emb = embed_quadratic(T, Ku);
    EquiPair pu = pair0(emb);
    CDAElement j = strict_j(emb, rng);
    CycleIntegrand G = CycleIntegrand::res_norm(j, pu);

    MatF I2 = MatF::identity(2, Scalar::one(C3));
    std::vector<CosetCell> cells;
    IntegrateStats st;
    adaptive_integrate(G, single_coset(0, I2), {}, &st, &cells);
    REQUIRE(static_cast<long>(cells.size()) == st.cells);
    REQUIRE(st.cells >= 48);

    // every certified cell must have constant valuation across its fibre
    size_t step = std::max<size_t>(1, cells.size() / 24);
    for (size_t ci = 0; ci < cells.size(); ci += step) {
        const CosetCell& cell = cells[ci];
        REQUIRE(cell.certified);
        long v0 = G.val(cell.rep);
        long pm = 1;
        for (long i = 0; i < cell.depth; ++i)
            pm *= 3;
        for (int t = 0; t < 6; ++t) {
            MatF e = MatF::identity(2, Scalar::one(C3));
            for (size_t r = 0; r < 2; ++r)
                for (size_t c = 0; c < 2; ++c) {
                    long bump = pm * rng.range(-4, 4);
                    e.at(r, c) = e.at(r, c) + Scalar::from_int(C3, bump);
                }
            Scalar de = mat_det(e);
            if (de.is_zero_to_precision() || de.val() != 0)
                continue;
            REQUIRE(G.val(cell.rep * e) == v0);
        }
    }
}

TEST_CASE("degenerate integrands and budgets are rejected") {
    PadicContext C3(3, 64);
    Rng rng(31337);
    Tower T(C3, 2);
    QuadExt Ku = QuadExt::unramified(C3);
    KEmbedding emb = embed_quadratic(T, Ku);
    EquiPair pu = pair0(emb);
    MatF I2 = MatF::identity(2, Scalar::one(C3));

    // an element of the framing field itself meets the commutative locus
    CDAElement j_flat = emb.embed(rand_unit_ext(Ku, rng));
    CycleIntegrand flat = CycleIntegrand::res_norm(j_flat, pu);
    REQUIRE_THROWS_AS(adaptive_integrate(flat, single_coset(0, I2), {}), NormVanishes);

    CDAElement j = strict_j(emb, rng);
    CycleIntegrand G = CycleIntegrand::res_norm(j, pu);
    IntegrateOptions tiny;
    tiny.cell_budget = 10;
    REQUIRE_THROWS_AS(adaptive_integrate(G, single_coset(0, I2), tiny), BudgetExceeded);

    // singular translate has no unimodular factorization to fold away
    MatF sing = matF_of(C3, {{1, 1}, {1, 1}});
    REQUIRE_THROWS_AS(adaptive_integrate(G, single_coset(0, sing), {}), DomainError);
}

TEST_CASE("block norms against a second field at infinite level") {
    PadicContext C3(3, 64);
    Tower T(C3, 2);
    QuadExt Ku = QuadExt::unramified(C3);
    QuadExt Kr = QuadExt::ramified(C3, false);
    EquiPair p1 = pair0(embed_quadratic(T, Ku));
    EquiPair p2 = pair0(embed_quadratic(T, Kr));

    CycleIntegrand F = CycleIntegrand::pair_norm(p1, p2);
    MatF I2 = MatF::identity(2, Scalar::one(C3));
    REQUIRE(disc_norm(p1.K(), 1) * F.value(I2) == infinite_level_intersection(p1, p2));

    MatF g = matF_of(C3, {{2, 1}, {3, 2}});
    REQUIRE(disc_norm(p1.K(), 1) * F.value(g) == infinite_level_intersection(p1, p2, g));

    // distinct invariant loci never meet, so the average over the whole
    // unimodular group exists and every subdivision terminates
    IntegrateStats st;
    Rat a = adaptive_integrate(F, single_coset(0, I2), {}, &st);
    REQUIRE(a > Rat(0));
    REQUIRE(st.volume == Rat(1));
}
