// Commutator partitions, coset partitions and their duality.
#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "qapkit/bisubalgebra.hpp"

namespace qapkit {

/// Blocks W(B_i): generators whose stabilizer in the generator B is B_i.
struct CommutatorPartition {
    BiSubalgebra generator;
    /// blocks[i] = members (ascending labels) of W(B_i), i a G(generator) index.
    std::vector<std::vector<uint64_t>> blocks;
};

/// Blocks B^[r,i]: the cosets of the generator.
struct CosetPartition {
    BiSubalgebra generator;
    std::vector<std::vector<uint64_t>> blocks;
};

/// Two-index refinement W(B_i; s) of a commutator partition by an abelian
/// generator of order r >= p.
struct RefinedPartition {
    BiSubalgebra generator;
    int s_width = 0;
    /// blocks[(i << s_width) | s].
    std::vector<std::vector<uint64_t>> blocks;
    uint64_t block_index(uint64_t label) const;
    // Linear functionals on labels producing (i, s).
    std::vector<uint64_t> i_forms;
    std::vector<uint64_t> s_forms;
};

CommutatorPartition commutator_partition(const BiSubalgebra &B);
CosetPartition coset_partition(const BiSubalgebra &B);

/// Canonical set partition (blocks sorted, empty blocks dropped).
std::vector<std::vector<uint64_t>> canonical_blocks(std::vector<std::vector<uint64_t>> blocks);

/// 1 iff commutator_partition(B) and coset_partition(commutant(B)) coincide.
int check_duality(const BiSubalgebra &B);

/// Refine by the coset rule. For a nonabelian generator (r < p) the
/// partition is returned unrefined (s_width = 0).
RefinedPartition refine_by_coset_rule(const CommutatorPartition &P);

/// Verifies the block composition law of a commutator partition: every
/// product of members of W(B_i) and W(B_j) lies in W(B_{i xor j}).
bool check_commutator_closure(const CommutatorPartition &P);

}  // namespace qapkit
