// Bi-subalgebras: GF(2) subspaces of generator labels, their maximal
// subalgebra groups, commutants and cosets.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qapkit/spinor.hpp"

namespace qapkit {

class PreconditionError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class BiSubalgebra {
   public:
    BiSubalgebra() = default;
    /// Span of the given packed labels; the basis is canonicalized to RREF.
    BiSubalgebra(int p, const std::vector<uint64_t> &labels);

    static BiSubalgebra identity(int p) { return BiSubalgebra(p, {}); }
    static BiSubalgebra full(int p);
    /// All diagonal generators S^nu_0.
    static BiSubalgebra intrinsic_cartan(int p);

    int p() const { return p_; }
    const std::vector<uint64_t> &basis() const { return basis_; }
    int dim() const { return int(basis_.size()); }
    /// Maximality order r = 2p - rank.
    int order() const { return 2 * p_ - dim(); }
    uint64_t size() const { return uint64_t(1) << dim(); }

    bool contains(uint64_t label) const;
    bool contains(const Spinor &s) const { return contains(s.label()); }
    bool contains(const BiSubalgebra &other) const;
    /// Members as packed labels in ascending order.
    std::vector<uint64_t> elements() const;
    std::vector<Spinor> spinors() const;

    bool operator==(const BiSubalgebra &o) const { return p_ == o.p_ && basis_ == o.basis_; }
    bool operator<(const BiSubalgebra &o) const;

    std::string str() const;

   private:
    int p_ = 1;
    std::vector<uint64_t> basis_;
};

BiSubalgebra span_of(int p, const std::vector<Spinor> &generators);

/// Members of G(parent): the parent (index 0) and all proper maximal
/// bi-subalgebras, labelled by characters on the parent's RREF basis.
class MaximalBiSubalgebraGroup {
   public:
    explicit MaximalBiSubalgebraGroup(BiSubalgebra parent);

    const BiSubalgebra &parent() const { return parent_; }
    /// Index width 2p - r (= dim of parent).
    int width() const { return parent_.dim(); }
    uint64_t count() const { return uint64_t(1) << width(); }
    /// Member with character index i: {x in parent : parity(i & coords(x)) = 0}.
    BiSubalgebra member(uint64_t index) const;
    /// Character index of a member; throws if B is not maximal in parent.
    uint64_t index_of(const BiSubalgebra &B) const;
    /// Index of the stabilizer of a label: i_k = omega(a, basis_k).
    uint64_t stabilizer_index(uint64_t label) const;
    /// Character value of x in parent for member index i.
    int character(uint64_t index, uint64_t x) const;

   private:
    BiSubalgebra parent_;
};

MaximalBiSubalgebraGroup enumerate_maximal(const BiSubalgebra &parent);

/// The third member B1 ⊓ B2 of G(parent).
BiSubalgebra sqcap(const BiSubalgebra &B1, const BiSubalgebra &B2, const BiSubalgebra &parent);

/// All generators commuting with every member of B.
BiSubalgebra commutant(const BiSubalgebra &B);

/// The unique maximal member of G(parent) commuting with a (parent itself
/// when a commutes with all of parent).
BiSubalgebra stabilizer_of(const Spinor &a, const BiSubalgebra &parent);

bool is_abelian(const BiSubalgebra &B);
/// Abelian, p-dimensional and hence self-commutant.
bool is_cartan(const BiSubalgebra &B);

BiSubalgebra intersect(const BiSubalgebra &a, const BiSubalgebra &b);
BiSubalgebra join(const BiSubalgebra &a, const BiSubalgebra &b);

/// Additive coset index of x modulo B (r bits, the non-pivot bits of x).
uint64_t coset_index(uint64_t x, const BiSubalgebra &B);
/// The 2^r cosets of B, indexed by coset_index; each sorted ascending.
std::vector<std::vector<uint64_t>> cosets_of(const BiSubalgebra &B);

/// Every bi-subalgebra of su(2^p) of the given order, canonical order.
std::vector<BiSubalgebra> enumerate_all(int p, int order);

/// Smallest Cartan subalgebra containing an abelian B (greedy extension by
/// ascending labels).
BiSubalgebra extend_to_cartan(const BiSubalgebra &B);

}  // namespace qapkit
