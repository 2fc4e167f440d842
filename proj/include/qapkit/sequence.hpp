// Recursive t-p decomposition sequences over a QAP: level extension, the
// constructive length-bounded builder, covering first-level decompositions,
// same-type chains and lifting to partitions of higher rank.
#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qapkit/cartan.hpp"

namespace qapkit {

class BoundViolationError : public std::out_of_range {
   public:
    using std::out_of_range::out_of_range;
};

/// Raised by extend() when t is abelian: the sequence ends here.
class SequenceTerminal : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

/// Nested chain t_[0] = whole algebra ⊃ t_[1] ⊃ ... ⊃ t_[M]; level l is
/// defined by forms[0..l-1] (see Decomposition).
struct DecompositionSequence {
    QAPPtr partition;
    std::vector<uint64_t> forms;
    std::vector<TypeDecision> types;  // one per level, filled by annotate()

    int length() const { return int(forms.size()); }
    Decomposition level(int l) const;  // 1-based
    /// Fill `types` with decide_type for every level.
    void annotate();
};

/// Abelian test on a key set by the null-target rule: every pair of
/// non-null keys tri-adds to a null key.
bool keys_abelian(const QAPartition &P, const std::vector<Key> &keys);
/// Abelian test on raw generators.
bool generators_abelian(int p, const std::vector<uint64_t> &labels);

/// Next-level decompositions of D (one per maximal subgroup of t whose
/// complement holds generators). Throws SequenceTerminal when t is abelian.
std::vector<Decomposition> extend(const Decomposition &D);

/// Validity report for a (complete) sequence: nesting, non-empty p at every
/// level, nonabelian t before the last level and abelian t at the end.
ValidationReport validate_sequence(const DecompositionSequence &S, bool require_complete = true);

/// Smallest and largest admissible lengths p and p + r.
inline int min_sequence_length(const QAPartition &P) { return P.p(); }
inline int max_sequence_length(const QAPartition &P) { return P.p() + P.rank(); }

/// Builds a sequence of exactly the target length: an abelian seed subgroup
/// of order 2^{p+r+1-M} holding a generator, one key that breaks
/// commutativity, then growth by non-null keys in ascending key order.
/// Throws BoundViolationError outside [p, p + r].
DecompositionSequence build_sequence(QAPPtr P, int target_length);

struct CoveringResult {
    Decomposition first;          // level-1 decomposition covering D
    std::vector<Key> independent; // keys completing t_[l] to t_[1]
};
CoveringResult covering_first_level(const Decomposition &D);

/// Chain of decompositions of levels 1..l, each admitting the given type,
/// ending at D's own t_[l] inside D's t_[l-1]. Throws PreconditionError when
/// D itself does not admit the type or no chain exists.
DecompositionSequence same_type_chain(const Decomposition &D, CartanType type);

/// Map from keys of a finer partition (same Cartan, smaller center) to the
/// keys of the coarser one.
std::function<Key(Key)> key_projection(const QAPartition &fine, const QAPartition &coarse);

Decomposition lift_rank(const Decomposition &D, const BiSubalgebra &target_center);
DecompositionSequence lift_rank(const DecompositionSequence &S, const BiSubalgebra &target_center);

/// Exhaustive enumeration of complete sequences by repeated extension
/// (stops after `limit` sequences when limit > 0).
std::vector<DecompositionSequence> enumerate_sequences(QAPPtr P, size_t limit = 0);

}  // namespace qapkit
