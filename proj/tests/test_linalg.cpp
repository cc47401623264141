#include <catch2/catch_amalgamated.hpp>

#include "ltcm/linalg.hpp"
#include "ltcm/rng.hpp"

using namespace ltcm;

namespace {

Scalar rand_scalar(const PadicContext& C, Rng& rng, long vmin = 0, long vmax = 2) {
    long u = rng.range(1, 500);
    while (u % static_cast<long>(C.p()) == 0)
        u = rng.range(1, 500);
    return Scalar::pi(C, rng.range(vmin, vmax)) * Scalar::from_int(C, u);
}

MatF rand_mat(const PadicContext& C, Rng& rng, size_t n, long vmin = 0, long vmax = 2) {
    MatF m = MatF::zero(n, n, Scalar::exact_zero(C));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < n; ++j)
            m.at(i, j) = rand_scalar(C, rng, vmin, vmax);
    return m;
}

MatF int_mat(const PadicContext& C, std::vector<std::vector<long>> rows) {
    size_t n = rows.size();
    MatF m = MatF::zero(n, rows[0].size(), Scalar::exact_zero(C));
    for (size_t i = 0; i < n; ++i)
        for (size_t j = 0; j < rows[i].size(); ++j)
            m.at(i, j) = Scalar::from_int(C, rows[i][j]);
    return m;
}

PolyF rand_monic(const PadicContext& C, Rng& rng, size_t deg) {
    std::vector<Scalar> c;
    for (size_t k = 0; k < deg; ++k)
        c.push_back(rand_scalar(C, rng, 0, 2));
    c.push_back(Scalar::one(C));
    return PolyF(std::move(c));
}

MatF companion(const PolyF& P) {
    size_t n = static_cast<size_t>(P.degree());
    const PadicContext& C = P.coeff(0).ctx();
    MatF m = MatF::zero(n, n, Scalar::exact_zero(C));
    for (size_t i = 1; i < n; ++i)
        m.at(i, i - 1) = Scalar::one(C);
    for (size_t i = 0; i < n; ++i)
        m.at(i, n - 1) = -P.coeff(i);
    return m;
}

// evaluate Q at a square matrix (Horner)
MatF poly_at_mat(const PolyF& Q, const MatF& m) {
    size_t n = m.rows();
    const PadicContext& C = m.at(0, 0).ctx();
    MatF acc = MatF::zero(n, n, Scalar::exact_zero(C));
    for (long k = Q.degree(); k >= 0; --k) {
        acc = acc * m;
        for (size_t i = 0; i < n; ++i)
            acc.at(i, i) = acc.at(i, i) + Q.coeff(static_cast<size_t>(k));
    }
    return acc;
}

MatF unimodular(const PadicContext& C, Rng& rng, size_t n) {
    MatF m = MatF::identity(n, Scalar::one(C));
    for (int t = 0; t < 8; ++t) {
        size_t i = rng.below(n), j = rng.below(n);
        if (i == j)
            continue;
        Scalar f = Scalar::from_int(C, rng.range(-6, 6));
        for (size_t k = 0; k < n; ++k)
            m.at(j, k) = m.at(j, k) + f * m.at(i, k);
    }
    return m;
}

} // namespace

TEST_CASE("determinant basics and multiplicativity") {
    PadicContext C(3, 64);
    REQUIRE(agree(mat_det(int_mat(C, {{1, 2}, {3, 4}})), Scalar::from_int(C, -2)));
    REQUIRE(agree(mat_det(int_mat(C, {{2, 0, 1}, {1, 1, 0}, {0, 5, 7}})),
                  Scalar::from_int(C, 2 * 7 - 0 + 5)));
    REQUIRE(mat_det(int_mat(C, {{1, 2}, {2, 4}})).is_zero_to_precision());

    Rng rng(42);
    for (int t = 0; t < 40; ++t) {
        MatF a = rand_mat(C, rng, 3);
        MatF b = rand_mat(C, rng, 3);
        REQUIRE(agree(mat_det(a * b), mat_det(a) * mat_det(b)));
    }
}

TEST_CASE("inverse round trip and singular rejection") {
    PadicContext C(5, 64);
    Rng rng(7);
    for (int t = 0; t < 30; ++t) {
        MatF a = rand_mat(C, rng, 3, -1, 2);
        if (mat_det(a).is_zero_to_precision())
            continue;
        MatF inv = mat_inverse(a);
        REQUIRE(agree(a * inv, MatF::identity(3, Scalar::one(C))));
        REQUIRE(agree(inv * a, MatF::identity(3, Scalar::one(C))));
    }
    REQUIRE_THROWS_AS(mat_inverse(int_mat(C, {{1, 2}, {2, 4}})), SingularMatrix);
}

TEST_CASE("characteristic polynomial: companion matrices recover their polynomial") {
    PadicContext C(3, 64);
    Rng rng(11);
    for (size_t deg = 1; deg <= 4; ++deg) {
        for (int t = 0; t < 10; ++t) {
            PolyF P = rand_monic(C, rng, deg);
            REQUIRE(agree(mat_charpoly(companion(P)), P));
        }
    }
}

TEST_CASE("characteristic polynomial agrees with determinant evaluations") {
    PadicContext C(3, 64);
    Rng rng(13);
    for (int t = 0; t < 20; ++t) {
        MatF m = rand_mat(C, rng, 3);
        PolyF P = mat_charpoly(m);
        REQUIRE(P.monic());
        REQUIRE(P.degree() == 3);
        for (long x0 : {0L, 1L, -2L, 7L}) {
            Scalar x = Scalar::from_int(C, x0);
            MatF xim = MatF::identity(3, Scalar::one(C));
            for (size_t i = 0; i < 3; ++i)
                for (size_t j = 0; j < 3; ++j)
                    xim.at(i, j) = (i == j ? x : Scalar::exact_zero(C)) - m.at(i, j);
            REQUIRE(agree(P.eval(x), mat_det(xim)));
        }
    }
}

TEST_CASE("resultant conventions and multiplicativity") {
    PadicContext C(3, 64);
    Scalar al = Scalar::from_int(C, 5), be = Scalar::from_int(C, 2);
    PolyF A = PolyF::x_minus(al), B = PolyF::x_minus(be);
    REQUIRE(agree(resultant(A, B), al - be));
    REQUIRE(agree(resultant(B, A), be - al));

    Rng rng(17);
    for (int t = 0; t < 20; ++t) {
        PolyF P = rand_monic(C, rng, 2);
        PolyF Q = rand_monic(C, rng, 2);
        PolyF R = rand_monic(C, rng, 1);
        REQUIRE(agree(resultant(P, Q * R), resultant(P, Q) * resultant(P, R)));
        // swap symmetry: deg P * deg Q even here
        REQUIRE(agree(resultant(P, Q), resultant(Q, P)));
        REQUIRE(resultant(P, P).is_zero_to_precision());
    }
}

TEST_CASE("resultant against the multiplication-map oracle") {
    PadicContext C(5, 64);
    Rng rng(19);
    for (int t = 0; t < 25; ++t) {
        size_t dp = 1 + rng.below(3), dq = 1 + rng.below(3);
        PolyF P = rand_monic(C, rng, dp);
        PolyF Q = rand_monic(C, rng, dq);
        // res(P,Q) = det of multiplication by Q on F[X]/P
        Scalar oracle = mat_det(poly_at_mat(Q, companion(P)));
        REQUIRE(agree(resultant(P, Q), oracle));
    }
}

TEST_CASE("smith normal form: frozen example") {
    PadicContext C(3, 64);
    MatF m = MatF::zero(2, 2, Scalar::exact_zero(C));
    m.at(0, 0) = Scalar::pi(C);
    m.at(0, 1) = Scalar::one(C);
    m.at(1, 1) = Scalar::pi(C, 2);
    SNFResult r = snf(m);
    REQUIRE(r.exponents == std::vector<long>{0, 3});
    REQUIRE(mat_det(r.U).val() == 0);
    REQUIRE(mat_det(r.V).val() == 0);
    MatF d = MatF::zero(2, 2, Scalar::exact_zero(C));
    d.at(0, 0) = Scalar::pi(C, 0);
    d.at(1, 1) = Scalar::pi(C, 3);
    REQUIRE(agree(r.U * d * r.V, m));
}

TEST_CASE("smith normal form on scrambled diagonals") {
    PadicContext C(3, 64);
    Rng rng(23);
    for (int t = 0; t < 20; ++t) {
        std::vector<long> a = {rng.range(0, 2), rng.range(0, 2), rng.range(0, 2)};
        std::sort(a.begin(), a.end());
        MatF d = MatF::zero(3, 3, Scalar::exact_zero(C));
        for (size_t i = 0; i < 3; ++i)
            d.at(i, i) = Scalar::pi(C, a[i]);
        MatF m = unimodular(C, rng, 3) * d * unimodular(C, rng, 3);
        SNFResult r = snf(m);
        REQUIRE(r.exponents == a);
        MatF dd = MatF::zero(3, 3, Scalar::exact_zero(C));
        for (size_t i = 0; i < 3; ++i)
            dd.at(i, i) = Scalar::pi(C, r.exponents[i]);
        REQUIRE(agree(r.U * dd * r.V, m));
        long vdet = mat_det(m).val();
        REQUIRE(vdet == a[0] + a[1] + a[2]);
    }
    REQUIRE_THROWS_AS(snf(int_mat(C, {{1, 2}, {2, 4}})), SingularMatrix);
}

TEST_CASE("invariant polynomial: closed form in the 2x2 case") {
    PadicContext C(3, 64);
    // g = [[1,1],[pi,1]]: invariant X - 1/(1-pi)
    MatF g = int_mat(C, {{1, 1}, {0, 1}});
    g.at(1, 0) = Scalar::pi(C);
    PolyF P = invariant_poly_split(g);
    REQUIRE(P.degree() == 1);
    REQUIRE(P.monic());
    Scalar lam = (Scalar::one(C) - Scalar::pi(C)).inv();
    REQUIRE(agree(P.coeff(0), -lam));

    Rng rng(29);
    for (int t = 0; t < 40; ++t) {
        MatF h = rand_mat(C, rng, 2, 0, 2);
        Scalar det = mat_det(h);
        Scalar ad = h.at(0, 0) * h.at(1, 1);
        if (det.is_zero_to_precision() || ad.is_zero_to_precision() ||
            (ad - h.at(0, 1) * h.at(1, 0)).is_zero_to_precision())
            continue;
        PolyF Q = invariant_poly_split(h);
        REQUIRE(agree(Q.coeff(0), -(ad / det)));
    }
}

TEST_CASE("invariant polynomial is invariant under block-diagonal translation") {
    PadicContext C(3, 64);
    Rng rng(31);
    for (size_t h : {1u, 2u}) {
        for (int t = 0; t < 15; ++t) {
            MatF g = rand_mat(C, rng, 2 * h, 0, 1);
            MatF L = MatF::zero(2 * h, 2 * h, Scalar::exact_zero(C));
            MatF R = MatF::zero(2 * h, 2 * h, Scalar::exact_zero(C));
            L.set_block(0, 0, rand_mat(C, rng, h, 0, 1));
            L.set_block(h, h, rand_mat(C, rng, h, 0, 1));
            R.set_block(0, 0, rand_mat(C, rng, h, 0, 1));
            R.set_block(h, h, rand_mat(C, rng, h, 0, 1));
            try {
                PolyF P = invariant_poly_split(g);
                PolyF Q = invariant_poly_split(L * g * R);
                REQUIRE(P.degree() == static_cast<long>(h));
                REQUIRE(agree(P, Q));
            } catch (const DegenerateElement&) {
                continue; // a degenerate draw, not a failure
            } catch (const SingularMatrix&) {
                continue; // L or R drawn singular
            }
        }
    }
}

TEST_CASE("invariant polynomial rejects degenerate elements") {
    PadicContext C(3, 64);
    REQUIRE_THROWS_AS(invariant_poly_split(int_mat(C, {{1, 1}, {1, 1}})), DegenerateElement);
    REQUIRE_THROWS_AS(invariant_poly_split(int_mat(C, {{1, 2, 3}, {4, 5, 6}, {7, 8, 9}})),
                      DomainError); // odd size
}
