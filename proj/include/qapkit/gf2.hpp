// Small dense GF(2) linear algebra on packed 64-bit row vectors.
#pragma once

#include <cstdint>
#include <vector>

namespace qapkit::gf2 {

inline int pivot_of(uint64_t row) { return 63 - __builtin_clzll(row); }

/// Reduced row echelon form: rows ordered by descending pivot (highest set
/// bit), each pivot bit cleared from every other row. Zero rows dropped.
std::vector<uint64_t> rref(std::vector<uint64_t> rows);

/// Rank of a row set.
inline int rank(const std::vector<uint64_t> &rows) { return int(rref(rows).size()); }

/// Clear the pivot bits of `x` against an RREF basis; the result is the
/// minimum-integer representative of the coset x + span(basis).
uint64_t reduce(uint64_t x, const std::vector<uint64_t> &basis);

inline bool in_span(uint64_t x, const std::vector<uint64_t> &basis) { return reduce(x, basis) == 0; }

/// Coordinates of x in an RREF basis (row 0 -> most significant bit).
/// Precondition: x in span(basis).
uint64_t coords(uint64_t x, const std::vector<uint64_t> &basis);

/// Combination sum_j c_j row_j with c given MSB-first as in coords().
uint64_t combine(uint64_t c, const std::vector<uint64_t> &basis);

/// All 2^d elements of span(basis), in order of the coordinate integer.
std::vector<uint64_t> span_elements(const std::vector<uint64_t> &basis);

/// RREF basis of {y in Z_2^width : parity(y & row) = 0 for every row}.
std::vector<uint64_t> annihilator(const std::vector<uint64_t> &rows, int width);

/// Intersection of two subspaces given by bases, as an RREF basis.
std::vector<uint64_t> intersect(const std::vector<uint64_t> &a, const std::vector<uint64_t> &b, int width);

/// Mask of the pivot columns of an RREF basis.
uint64_t pivot_mask(const std::vector<uint64_t> &basis);

/// Gather the bits of x at positions NOT in `pivots` (below `width`),
/// packed MSB-first; a canonical linear index of the coset x + span.
uint64_t nonpivot_bits(uint64_t x, uint64_t pivots, int width);

/// Forms g_k with parity(g_k & v_j) = delta_jk for a basis v of Z_2^width
/// (v.size() == width). Throws if v is not a basis.
std::vector<uint64_t> dual_basis(const std::vector<uint64_t> &v, int width);

/// Solve parity(rows[k] & x) = rhs[k] for all k (width <= 62). Returns false
/// when inconsistent; free variables are set to zero.
bool solve(const std::vector<uint64_t> &rows, const std::vector<int> &rhs, uint64_t &x);

}  // namespace qapkit::gf2
