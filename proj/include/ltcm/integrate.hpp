#pragma once

#include <algorithm>
#include <deque>
#include <functional>
#include <utility>
#include <vector>

#include "ltcm/cycles.hpp"

namespace ltcm {

// The norm form vanished to working precision at an evaluation point.
// A PrecisionExhausted refinement: under the strict hypothesis a true zero
// is impossible, so callers aware of the geometry may translate this into
// a singularity report instead of a retry.
struct NormVanishes : PrecisionExhausted {
    using PrecisionExhausted::PrecisionExhausted;
};

// ---- level-degree combinatorics ----

inline Int count_gl_residue(unsigned long q, long m) {
    // #GL_m over the field with q elements
    Int qm = 1;
    for (long i = 0; i < m; ++i)
        qm *= static_cast<long>(q);
    Int out = 1, qi = 1;
    for (long i = 0; i < m; ++i) {
        out *= (qm - qi);
        qi *= static_cast<long>(q);
    }
    return out;
}

inline Int int_pow(unsigned long q, long e) {
    Int out = 1;
    for (long i = 0; i < e; ++i)
        out *= static_cast<long>(q);
    return out;
}

inline Int deg_level_F(const PadicContext& C, long h, long n) {
    if (n <= 0)
        return 1;
    return count_gl_residue(C.p(), 2 * h) * int_pow(C.p(), 4 * h * h * (n - 1));
}

inline Int deg_level_K(const QuadExt& K, long h, long n) {
    if (n <= 0)
        return 1;
    unsigned long q = K.ctx().p();
    if (!K.ramified())
        return count_gl_residue(q * q, h) * int_pow(q, 2 * h * h * (n - 1));
    // the level-n residue ring is a chain ring of length 2n over the
    // residue field, so only the field-size factor changes
    return count_gl_residue(q, h) * int_pow(q, h * h * (2 * n - 1));
}

inline Rat vol_level(const PadicContext& C, long h, long n) {
    Rat v(1);
    v /= Rat(deg_level_F(C, h, n));
    return v;
}

inline Rat c_pair(const QuadExt& K1, const QuadExt& K2, long h) {
    Rat v(deg_level_F(K1.ctx(), h, 1));
    v /= Rat(deg_level_K(K1, h, 1) * deg_level_K(K2, h, 1));
    return v;
}

inline Rat c_closed(const QuadExt& K, long h) {
    unsigned long q = K.ctx().p();
    Rat out(1);
    for (long n = 1; n <= h; ++n) {
        if (!K.ramified()) {
            // (1 - q^{1-2n}) / (1 - q^{-2n})
            Rat num = Rat(int_pow(q, 2 * n - 1) - 1) * Rat(static_cast<long>(q));
            out *= num / Rat(int_pow(q, 2 * n) - 1);
        } else {
            // (1 - q^{-n-h}) / (1 - q^{-n})
            Rat num(int_pow(q, n + h) - 1);
            out *= num / (Rat(int_pow(q, n) - 1) * Rat(int_pow(q, h)));
        }
    }
    return out;
}

// ---- test functions ----

struct TestFunction {
    enum class Kind { single_coset, double_coset };
    Kind kind;
    long n = 0;
    MatF g0;
};

inline TestFunction single_coset(long n, MatF g0) {
    if (n < 0)
        throw DomainError("level must be nonnegative");
    return TestFunction{TestFunction::Kind::single_coset, n, std::move(g0)};
}

inline TestFunction double_coset(long n, MatF g0) {
    if (n < 0)
        throw DomainError("level must be nonnegative");
    return TestFunction{TestFunction::Kind::double_coset, n, std::move(g0)};
}

struct IntegrateOptions {
    long cell_budget = 10000000;
};

struct IntegrateStats {
    long cells = 0;     // certified cells accumulated
    long max_depth = 0; // deepest certified cell
    Rat volume;         // certified volume, normalized to the support
};

struct CosetCell {
    MatF rep;
    long depth = 0;
    bool certified = false;
};

// ---- enumeration over residue rings ----

namespace detail {

// integer matrices kept row-major, entries reduced mod q^level
using LongMat = std::vector<long>;

inline long det_unit_mod_q(const LongMat& m, size_t dim, long q) {
    std::vector<long> a(m.size());
    for (size_t i = 0; i < m.size(); ++i)
        a[i] = ((m[i] % q) + q) % q;
    long det = 1;
    for (size_t c = 0; c < dim; ++c) {
        size_t piv = dim;
        for (size_t r = c; r < dim; ++r)
            if (a[r * dim + c] != 0) {
                piv = r;
                break;
            }
        if (piv == dim)
            return 0;
        if (piv != c) {
            for (size_t k = 0; k < dim; ++k)
                std::swap(a[piv * dim + k], a[c * dim + k]);
            det = (q - det) % q;
        }
        long p = a[c * dim + c];
        det = (det * p) % q;
        long pinv = 1, base = p % q, e = q - 2;
        while (e > 0) {
            if (e & 1)
                pinv = (pinv * base) % q;
            base = (base * base) % q;
            e >>= 1;
        }
        for (size_t r = c + 1; r < dim; ++r) {
            long f = (a[r * dim + c] * pinv) % q;
            if (f == 0)
                continue;
            for (size_t k = c; k < dim; ++k)
                a[r * dim + k] = ((a[r * dim + k] - f * a[c * dim + k]) % q + q) % q;
        }
    }
    return det;
}

inline MatF long_to_matF(const PadicContext& C, const LongMat& m, size_t dim) {
    MatF out = MatF::zero(dim, dim, Scalar::exact_zero(C));
    for (size_t i = 0; i < dim; ++i)
        for (size_t j = 0; j < dim; ++j)
            out.at(i, j) = Scalar::from_int(C, m[i * dim + j]);
    return out;
}

// one integer representative per class of the level-n congruence subgroup
// modulo the level-m one; n = 0 walks the whole unit group mod q^m
template <typename Fn>
inline void for_each_level_rep(const PadicContext& C, size_t dim, long n, long m, Fn&& visit) {
    long q = static_cast<long>(C.p());
    if (m < n)
        throw DomainError("enumeration depth is above the base level");
    if (m == n) {
        LongMat id(dim * dim, 0);
        for (size_t i = 0; i < dim; ++i)
            id[i * dim + i] = 1;
        visit(id);
        return;
    }
    if (n == 0) {
        long qm = 1;
        for (long i = 0; i < m; ++i)
            qm *= q;
        LongMat x(dim * dim, 0);
        for (;;) {
            if (det_unit_mod_q(x, dim, q) != 0)
                visit(x);
            size_t k = 0;
            while (k < x.size()) {
                if (++x[k] < qm)
                    break;
                x[k] = 0;
                ++k;
            }
            if (k == x.size())
                return;
        }
    } else {
        long qd = 1;
        for (long i = 0; i < m - n; ++i)
            qd *= q;
        long qn = 1;
        for (long i = 0; i < n; ++i)
            qn *= q;
        LongMat a(dim * dim, 0);
        for (;;) {
            LongMat x(dim * dim, 0);
            for (size_t i = 0; i < dim; ++i)
                for (size_t j = 0; j < dim; ++j)
                    x[i * dim + j] = (i == j ? 1 : 0) + qn * a[i * dim + j];
            visit(x);
            size_t k = 0;
            while (k < a.size()) {
                if (++a[k] < qd)
                    break;
                a[k] = 0;
                ++k;
            }
            if (k == a.size())
                return;
        }
    }
}

inline Int level_rep_count(const PadicContext& C, long h, long n, long m) {
    if (n == 0)
        return deg_level_F(C, h, m);
    return int_pow(C.p(), 4 * h * h * (m - n));
}

inline Int level_candidate_count(const PadicContext& C, long h, long n, long m) {
    // enumeration cost including rejected non-unit candidates
    if (n == 0)
        return int_pow(C.p(), 4 * h * h * m);
    return int_pow(C.p(), 4 * h * h * (m - n));
}

} // namespace detail

// ---- the norm-form integrand ----

// x -> || Nrd( [0 I] . left . x . right . [I; 0] ) ||^{-1}, the shape every
// intersection-number integrand takes. Keeping the constant factors explicit
// is what makes cells certifiable: the norm argument is F-linear in the
// entries of x.
struct CycleIntegrand {
    CDAMat left;
    CDAMat right;
    long h = 0;
    // the block norm of the resultant integrand overshoots |Res|^{-1} by
    // q^{h(v(Nrd j) + v(det x))}; voffset carries the point-independent part
    // and det_normalized subtracts the determinant part at evaluation time
    long voffset = 0;
    bool det_normalized = false;

    static CycleIntegrand res_norm(const CDAElement& j, const EquiPair& pair) {
        size_t n = 2 * static_cast<size_t>(pair.h);
        return CycleIntegrand{pair.delta_inv * detail::scalar_mat(pair.tower(), j, n),
                              pair.delta, pair.h, pair.h * cda_val(j), true};
    }

    static CycleIntegrand pair_norm(const EquiPair& p1, const EquiPair& p2) {
        detail::check_compatible(p1, p2);
        return CycleIntegrand{p1.delta_inv, p2.delta, p1.h, 0, false};
    }

    const Tower& tower() const { return left.at(0, 0).tower(); }

    CDAMat norm_argument(const MatF& x) const {
        size_t hs = static_cast<size_t>(h);
        CDAMat m = left * detail::embed_matF(tower(), x) * right;
        return m.block(hs, 0, hs, hs);
    }

    // valuation of the norm form; a value indistinguishable from zero is a
    // violation of the strict hypothesis, not a computable data point
    long val(const MatF& x) const {
        Scalar s = nrd_block(norm_argument(x));
        if (s.is_zero_to_precision())
            throw NormVanishes("norm form vanishes to working precision on the support");
        return s.val();
    }

    Rat value(const MatF& x) const {
        long e = val(x) - voffset;
        if (det_normalized) {
            Scalar d = mat_det(x);
            if (d.is_zero_to_precision())
                throw NormVanishes("degenerate point on the support");
            e -= h * d.val();
        }
        return qpow(tower().ctx().p(), e);
    }
};

namespace detail {

// multiplication-by-z matrix over the splitting field's power basis
inline MatF fn_mult_matrix(const FnElem& z) {
    const Tower& T = z.tower();
    size_t n = T.deg();
    MatF out = MatF::zero(n, n, Scalar::exact_zero(T.ctx()));
    for (size_t j = 0; j < n; ++j) {
        std::vector<long> e(n, 0);
        e[j] = 1;
        FnElem w = z * FnElem::from_int_coords(T, e);
        for (size_t i = 0; i < n; ++i)
            out.at(i, j) = w.coords()[i];
    }
    return out;
}

// full F-linear realization of an h x h block over the algebra; its
// determinant valuation is a fixed multiple of the norm valuation, which
// is all the stability certificate needs
inline MatF realize_block(const CDAMat& a) {
    size_t h = a.rows();
    const Tower& T = a.at(0, 0).tower();
    size_t n = T.deg();
    MatF out = MatF::zero(h * n * n, h * n * n, Scalar::exact_zero(T.ctx()));
    for (size_t i = 0; i < h; ++i)
        for (size_t j = 0; j < h; ++j) {
            MatFn r = cda_rep(a.at(i, j));
            for (size_t bi = 0; bi < n; ++bi)
                for (size_t bj = 0; bj < n; ++bj)
                    out.set_block((i * n + bi) * n, (j * n + bj) * n,
                                  fn_mult_matrix(r.at(bi, bj)));
        }
    return out;
}

inline long min_certified_val(const CDAMat& m) {
    bool seen = false;
    long mv = 0;
    for (size_t i = 0; i < m.rows(); ++i)
        for (size_t j = 0; j < m.cols(); ++j)
            for (const FnElem& c : m.at(i, j).coeffs())
                for (const Scalar& s : c.coords()) {
                    if (s.is_zero_to_precision())
                        continue;
                    long v = s.val();
                    mv = seen ? std::min(mv, v) : v;
                    seen = true;
                }
    return seen ? mv : 0;
}

} // namespace detail

// ---- double coset decomposition ----

inline std::vector<MatF> decompose_double_coset(long n, const MatF& g0,
                                                const IntegrateOptions& opt = {}) {
    const PadicContext& C = g0.at(0, 0).ctx();
    size_t dim = g0.rows();
    if (dim != g0.cols() || dim == 0 || dim % 2 != 0)
        throw DomainError("double coset representative must be square of even size");
    if (n < 0)
        throw DomainError("level must be nonnegative");
    long h = static_cast<long>(dim / 2);

    SNFResult s = snf(g0); // rejects degenerate representatives
    long spread = s.exponents.back() - s.exponents.front();
    // conjugation by g0 moves entry valuations by at most the elementary
    // divisor spread, so level n + spread already lies in the stabilizer
    long m = n + spread;

    if (detail::level_candidate_count(C, h, n, m) > Int(opt.cell_budget))
        throw EnumerationTooLarge("double coset transversal exceeds the cell budget");

    // x and y generate the same left coset iff x^{-1} y is integral and
    // congruent to the identity at level n
    auto same_coset = [&](const MatF& x, const MatF& y) {
        MatF d = mat_inverse(x) * y;
        for (size_t i = 0; i < dim; ++i)
            for (size_t j = 0; j < dim; ++j) {
                Scalar e = d.at(i, j);
                if (i == j)
                    e = e - Scalar::one(C);
                if (e.is_zero_to_precision())
                    continue;
                if (e.val() < n)
                    return false;
            }
        return true;
    };

    std::vector<MatF> reps;
    detail::for_each_level_rep(C, dim, n, m, [&](const detail::LongMat& k) {
        MatF x = detail::long_to_matF(C, k, dim) * g0;
        for (const MatF& r : reps)
            if (same_coset(r, x))
                return;
        reps.push_back(std::move(x));
    });
    return reps;
}

// ---- exhaustive oracle ----

inline Rat exhaustive_integrate(const std::function<Rat(const MatF&)>& G, const TestFunction& f,
                                long m, const IntegrateOptions& opt = {}) {
    if (m < f.n)
        throw DomainError("enumeration depth is above the test function level");
    const PadicContext& C = f.g0.at(0, 0).ctx();
    size_t dim = f.g0.rows();
    long h = static_cast<long>(dim / 2);

    std::vector<MatF> lefts;
    if (f.kind == TestFunction::Kind::double_coset)
        lefts = decompose_double_coset(f.n, f.g0, opt);

    Int cand = detail::level_candidate_count(C, h, f.n, m);
    if (!lefts.empty())
        cand *= static_cast<long>(lefts.size());
    if (cand > Int(opt.cell_budget))
        throw EnumerationTooLarge("representative enumeration exceeds the cell budget");

    Rat total(0);
    long count = 0;
    if (f.kind == TestFunction::Kind::single_coset) {
        detail::for_each_level_rep(C, dim, f.n, m, [&](const detail::LongMat& k) {
            total += G(detail::long_to_matF(C, k, dim) * f.g0);
            ++count;
        });
    } else {
        for (const MatF& x : lefts)
            detail::for_each_level_rep(C, dim, f.n, m, [&](const detail::LongMat& k) {
                total += G(x * detail::long_to_matF(C, k, dim));
                ++count;
            });
    }
    return total / Rat(count);
}

// ---- adaptive integration ----

namespace detail {

struct WorkCell {
    LongMat rep;
    long depth;
};

// average of the norm form over the level-n subgroup, subdividing until the
// certificate proves the valuation constant on each cell
inline Rat integrate_over_level(const CycleIntegrand& G, long n, const IntegrateOptions& opt,
                                IntegrateStats* stats, std::vector<CosetCell>* cells_out) {
    const Tower& T = G.tower();
    const PadicContext& C = T.ctx();
    size_t dim = T.deg();
    long h = G.h;
    long q = static_cast<long>(C.p());

    long slack = std::max(0L, -(min_certified_val(G.left) + min_certified_val(G.right)));

    LongMat id(dim * dim, 0);
    for (size_t i = 0; i < dim; ++i)
        id[i * dim + i] = 1;

    std::deque<WorkCell> queue;
    queue.push_back(WorkCell{id, n});

    Rat total(0);
    Rat covered(0);
    Rat vol_base = vol_level(C, h, n);
    long cells = 0;
    long max_depth = n;

    while (!queue.empty()) {
        WorkCell cell = std::move(queue.front());
        queue.pop_front();
        long m = cell.depth;
        MatF rep = long_to_matF(C, cell.rep, dim);

        CDAMat arg = G.norm_argument(rep);
        Scalar nv = nrd_block(arg);
        if (nv.is_zero_to_precision())
            throw NormVanishes("norm form vanishes to working precision on the support");

        // the cell is stable when every elementary divisor of the norm
        // argument sits strictly below the perturbation scale; an integral
        // argument with unit norm forces every exponent to zero
        bool ok = false;
        if (nv.val() == 0 && slack == 0) {
            ok = m >= 1;
        } else {
            try {
                SNFResult s = snf(realize_block(arg));
                ok = s.exponents.back() + slack < m;
            } catch (const SingularMatrix&) {
                ok = false;
            }
        }

        if (ok) {
            Rat w = vol_level(C, h, m) / vol_base;
            total += w * qpow(C.p(), nv.val() - G.voffset);
            covered += w;
            ++cells;
            max_depth = std::max(max_depth, m);
            if (cells_out)
                cells_out->push_back(CosetCell{rep, m, true});
            if (cells > opt.cell_budget)
                throw BudgetExceeded("certified cell count exceeds the budget");
            continue;
        }

        long qm1 = 1;
        for (long i = 0; i <= m; ++i) {
            qm1 *= q;
            if (qm1 > (1L << 30))
                throw BudgetExceeded("cell depth exceeds the representable range");
        }

        // split one level down; children in enumeration order keeps the
        // whole computation deterministic
        if (m == 0) {
            for_each_level_rep(C, dim, 0, 1, [&](const LongMat& u) {
                LongMat child(dim * dim, 0);
                for (size_t i = 0; i < dim; ++i)
                    for (size_t j = 0; j < dim; ++j) {
                        long acc = 0;
                        for (size_t k = 0; k < dim; ++k)
                            acc = (acc + cell.rep[i * dim + k] * u[k * dim + j]) % qm1;
                        child[i * dim + j] = acc;
                    }
                queue.push_back(WorkCell{std::move(child), 1});
            });
        } else {
            long qm = qm1 / q;
            LongMat a(dim * dim, 0);
            for (;;) {
                LongMat child(dim * dim, 0);
                for (size_t i = 0; i < dim; ++i)
                    for (size_t j = 0; j < dim; ++j) {
                        long acc = 0;
                        for (size_t k = 0; k < dim; ++k) {
                            long t = (k == j ? 1 : 0) + qm * a[k * dim + j];
                            acc = (acc + cell.rep[i * dim + k] * t) % qm1;
                        }
                        child[i * dim + j] = acc;
                    }
                queue.push_back(WorkCell{std::move(child), m + 1});
                size_t t = 0;
                while (t < a.size()) {
                    if (++a[t] < q)
                        break;
                    a[t] = 0;
                    ++t;
                }
                if (t == a.size())
                    break;
            }
        }
        if (static_cast<long>(queue.size()) > opt.cell_budget)
            throw BudgetExceeded("subdivision frontier exceeds the budget");
    }

    if (!(covered == Rat(1)))
        throw DomainError("cell volumes failed to add up to the support");
    if (stats) {
        stats->cells = cells;
        stats->max_depth = max_depth;
        stats->volume = covered;
    }
    return total;
}

} // namespace detail

inline Rat adaptive_integrate(const CycleIntegrand& G, const TestFunction& f,
                              const IntegrateOptions& opt = {}, IntegrateStats* stats = nullptr,
                              std::vector<CosetCell>* cells_out = nullptr) {
    const Tower& T = G.tower();
    if (f.g0.rows() != T.deg() || f.g0.cols() != T.deg())
        throw DomainError("test function size does not match the integrand");

    // folding a translate into the integrand moves its determinant valuation
    // out of reach of the evaluation points, so it goes into the offset
    auto fold_offset = [&](const MatF& g) -> long {
        if (!G.det_normalized)
            return G.voffset;
        Scalar d = mat_det(g);
        if (d.is_zero_to_precision())
            throw DomainError("test function translate is singular");
        return G.voffset + G.h * d.val();
    };

    if (f.kind == TestFunction::Kind::single_coset) {
        // support is the level subgroup right-translated by g0: fold g0
        // into the right factor and average over the subgroup itself
        CycleIntegrand shifted{G.left, detail::embed_matF(T, f.g0) * G.right, G.h,
                               fold_offset(f.g0), G.det_normalized};
        return detail::integrate_over_level(shifted, f.n, opt, stats, cells_out);
    }

    // double coset: average of the per-coset averages
    std::vector<MatF> reps = decompose_double_coset(f.n, f.g0, opt);
    Rat total(0);
    IntegrateStats acc;
    for (const MatF& x : reps) {
        CycleIntegrand shifted{G.left * detail::embed_matF(T, x), G.right, G.h,
                               fold_offset(x), G.det_normalized};
        IntegrateStats one;
        total += detail::integrate_over_level(shifted, f.n, opt, stats ? &one : nullptr,
                                              cells_out);
        if (stats) {
            acc.cells += one.cells;
            acc.max_depth = std::max(acc.max_depth, one.max_depth);
            acc.volume += one.volume;
        }
    }
    if (stats) {
        acc.volume /= Rat(static_cast<long>(reps.size()));
        *stats = acc;
    }
    return total / Rat(static_cast<long>(reps.size()));
}

} // namespace ltcm
