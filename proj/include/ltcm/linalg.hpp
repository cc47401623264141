#pragma once

#include "ltcm/errors.hpp"
#include "ltcm/matrix.hpp"
#include "ltcm/poly.hpp"

namespace ltcm {

// Split an even-size matrix into its four corner blocks.
template <class T>
struct CornerBlocks {
    Mat<T> a, b, c, d;
};

template <class T>
CornerBlocks<T> corner_blocks(const Mat<T>& g) {
    if (g.rows() != g.cols() || g.rows() % 2 != 0 || g.rows() == 0)
        throw DomainError("corner_blocks: matrix must be square of even size");
    size_t h = g.rows() / 2;
    return CornerBlocks<T>{g.block(0, 0, h, h), g.block(0, h, h, h),
                           g.block(h, 0, h, h), g.block(h, h, h, h)};
}

// Invariant polynomial of g in GL_{2h} relative to the pair of transverse
// "diagonal" subgroups cut out by the corner blocks. With A the block
// diagonal part and B the block antidiagonal part, the product
// A (A-B)^{-1} A (A+B)^{-1} is block diagonal (the mixed terms cancel
// because A (A-B)^{-1} B = B (A-B)^{-1} A), and the invariant is the
// characteristic polynomial of its upper block. Degree h, monic.
template <class T>
Poly<T> invariant_poly_split(const Mat<T>& g) {
    auto [a, b, c, d] = corner_blocks(g);
    size_t h = a.rows();
    const T zero = FieldOps<T>::zero(g.at(0, 0));
    Mat<T> A = Mat<T>::zero(2 * h, 2 * h, zero);
    A.set_block(0, 0, a);
    A.set_block(h, h, d);
    Mat<T> B = Mat<T>::zero(2 * h, 2 * h, zero);
    B.set_block(0, h, b);
    B.set_block(h, 0, c);
    Mat<T> AmB = A - B;
    Mat<T> inv_m(1, 1, zero), inv_p(1, 1, zero);
    try {
        inv_m = mat_inverse(AmB);
    } catch (const SingularMatrix&) {
        throw DegenerateElement("invariant_poly_split: a - b / -c d block matrix not invertible");
    }
    try {
        inv_p = mat_inverse(g);
    } catch (const SingularMatrix&) {
        throw DegenerateElement("invariant_poly_split: g not invertible");
    }
    Mat<T> gp = A * inv_m * A * inv_p;
    // mixed terms cancel identically, so these blocks must be zero to precision
    Mat<T> off1 = gp.block(0, h, h, h);
    Mat<T> off2 = gp.block(h, 0, h, h);
    for (size_t i = 0; i < h; ++i)
        for (size_t j = 0; j < h; ++j)
            if (!FieldOps<T>::zeroish(off1.at(i, j)) || !FieldOps<T>::zeroish(off2.at(i, j)))
                throw DomainError("invariant_poly_split: reduction failed to block-diagonalize");
    return mat_charpoly(gp.block(0, 0, h, h));
}

} // namespace ltcm
