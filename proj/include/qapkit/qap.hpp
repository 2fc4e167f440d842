// Quotient-algebra partitions of rank r: conditioned subspaces keyed by
// (f, i, eps), the tri-addition group, co-quotient arrangements and the
// merge/detach procedures.
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "qapkit/bisubalgebra.hpp"

namespace qapkit {

class NotCartanError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class ContainmentError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class KeyError : public std::out_of_range {
   public:
    using std::out_of_range::out_of_range;
};

class InternalConsistencyError : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

/// Packed key of a conditioned subspace W^eps(B_f, B^[r]; i):
/// bits = f (p bits) | i (r bits) | eps (1 bit). Tri-addition is XOR.
using Key = uint32_t;

struct ValidationReport {
    bool ok = true;
    std::vector<std::string> failures;
    void fail(std::string msg) {
        ok = false;
        if (failures.size() < 64) failures.push_back(std::move(msg));
    }
};

class QAPartition {
   public:
    /// Builds the partition; throws NotCartanError / ContainmentError.
    QAPartition(BiSubalgebra C, BiSubalgebra center);

    int p() const { return p_; }
    int rank() const { return r_; }
    const BiSubalgebra &cartan() const { return C_; }
    const BiSubalgebra &center() const { return center_; }
    const MaximalBiSubalgebraGroup &cartan_group() const { return gC_; }

    int key_bits() const { return p_ + r_ + 1; }
    uint32_t key_count() const { return uint32_t(1) << key_bits(); }

    Key make_key(uint64_t f, uint64_t i, int eps) const {
        return Key((f << (r_ + 1)) | (i << 1) | uint64_t(eps & 1));
    }
    uint64_t key_f(Key k) const { return k >> (r_ + 1); }
    uint64_t key_i(Key k) const { return (k >> 1) & ((uint64_t(1) << r_) - 1); }
    int key_eps(Key k) const { return int(k & 1); }

    /// Key of the cell containing a generator label.
    Key key_of(uint64_t label) const { return key_of_[label]; }
    const std::vector<uint64_t> &members(Key k) const;
    bool is_null(Key k) const { return members(k).empty(); }
    /// Number of generators in the cell, not counting the identity S^0_0.
    size_t generator_count(Key k) const;

    static constexpr Key identity_key() { return 0; }
    /// Key of the cell holding B^[r] (it contains S^0_0).
    Key center_key() const { return key_of_[0]; }

    Key tri_add(Key x, Key y) const;

    /// B_f, the maximal bi-subalgebra of C the cell commutes with.
    BiSubalgebra cell_algebra(Key k) const { return gC_.member(key_f(k)); }
    /// B_f contains B^[r].
    bool is_degrade(Key k) const;

    /// Component functions of the key map (exposed for tests and oracles).
    uint64_t nu_of(uint64_t label) const;
    uint64_t c_vector() const { return c_; }
    const std::vector<uint64_t> &index_forms() const { return index_rows_; }

    std::string key_name(Key k) const;
    std::string key_bits_str(Key k) const;

    /// Full invariant sweep: partition, group order, tri-addition closure over all
    /// key pairs, member commutation with B_f, bisection consistency.
    ValidationReport validate() const;

   private:
    int p_;
    int r_;
    BiSubalgebra C_;
    BiSubalgebra center_;
    MaximalBiSubalgebraGroup gC_;
    std::vector<uint64_t> nu_forms_;    // p forms giving C-coordinates along the complement
    std::vector<uint64_t> index_rows_;  // r rows in C-coordinates (annihilator of B^[r])
    uint64_t c_ = 0;                    // quadratic refinement shift
    std::vector<Key> key_of_;
    std::vector<std::vector<uint64_t>> cells_;
};

using QAPPtr = std::shared_ptr<const QAPartition>;

QAPPtr build_qap(const BiSubalgebra &C, const BiSubalgebra &B_r);

/// Tri-addition with foreign-key checks.
Key tri_add(Key x, Key y, const QAPartition &P);

struct CoQuotientAlgebra {
    QAPPtr P;
    Key center = 0;
    bool degrade = false;
    /// rows[0] = (center, identity); remaining rows are conjugate pairs
    /// (k, k ⊛ center).
    std::vector<std::pair<Key, Key>> rows;
};

CoQuotientAlgebra build_coquotient(QAPPtr P, Key center_key);

enum class MergeMode { Parallel, Crossing };

struct MergeResult {
    QAPPtr qap;                         // rank r-1
    Key center = 0;                     // the merged image of the old center
    std::optional<CoQuotientAlgebra> coquotient;
    std::vector<uint64_t> y_cell;       // the auxiliary subspace used
    /// sources[new key] = old keys (of the input partition) whose union it is.
    std::vector<std::vector<Key>> sources;
};

/// Number of valid auxiliary choices for a merge.
size_t merge_choice_count(const CoQuotientAlgebra &Q, MergeMode mode);
MergeResult merge_coquotient(const CoQuotientAlgebra &Q, MergeMode mode, size_t choice = 0);

struct DetachResult {
    QAPPtr qap;       // rank r+1
    Key center = 0;   // non-null half of the old center
    std::optional<CoQuotientAlgebra> coquotient;
    /// split[old key] = (0∘i half, 1∘i half) as new keys.
    std::vector<std::pair<Key, Key>> split;
    /// Position of the new index bit in the new i string.
    int new_bit = 0;
};

DetachResult detach_coquotient(const CoQuotientAlgebra &Q, MergeMode mode);

/// Text rendering of a quotient algebra (center block then pairs) and of a
/// co-quotient algebra, in the appendix table layout.
std::string render_quotient(const QAPartition &P);
std::string render_coquotient(const CoQuotientAlgebra &Q);
std::string render_members(const QAPartition &P, Key k);

}  // namespace qapkit
