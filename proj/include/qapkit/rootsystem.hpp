// Root systems of the classical types A/B/C/D and of G2, their arrangement
// into conjugate pairs labelled by elements of Z_2^k, and verification of the
// two root criteria (negation placement, additive closure) on such a layout.
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "qapkit/qap.hpp"

namespace qapkit {

class RankError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class UnsupportedSystemError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

enum class RootKind { A, B, C, D, G2 };

/// Parses "A", "B", "C", "D", "G2"; F4 / E6 / E7 / E8 and anything else
/// raise UnsupportedSystemError.
RootKind parse_root_kind(const std::string &s);
std::string root_kind_name(RootKind k);

/// Integer coefficients over the orthonormal basis e_1 .. e_dim.
using Root = std::vector<int>;

struct RootSystem {
    RootKind kind = RootKind::A;
    int rank = 0;  // Lie rank: A_rank, B_rank, ...
    int dim = 0;   // ambient coordinates (rank + 1 for A, 3 for G2)
    std::vector<Root> roots;

    std::string name() const;  // e.g. "A3", "G2"
    bool contains(const Root &r) const;
    int index_of(const Root &r) const;  // -1 when absent
    /// addable[i][j] = roots[i] + roots[j] is a root.
    std::vector<std::vector<char>> addition_table() const;
};

/// Closed-form root lists. Rank constraints: A rank >= 1, B rank > 2,
/// C rank > 1, D rank > 3, G2 rank 2. Violations raise RankError.
RootSystem generate_roots(RootKind kind, int rank);

/// Expected cardinality: A_{l-1}: l(l-1); B_l, C_l: 2l^2; D_l: 2l(l-1); G2: 12.
size_t expected_root_count(RootKind kind, int rank);

struct RootPair {
    uint32_t label = 0;         // nonzero element of Z_2^k
    std::vector<int> W, W_hat;  // root indices; W_hat[j] = -W[j]
};

struct RootPartition {
    std::vector<RootPair> pairs;  // ascending label
    std::vector<uint32_t> label_of;  // per root
    std::vector<char> hatted;        // per root: in W_hat
    int label_bits = 0;              // k with every label < 2^k
};

/// Conjugate-pair layout: with coordinates indexed from 0, e_i - e_j and
/// +-(e_i + e_j) for D carry label i xor j; B treats +-e_i as +-(e_i - e_l);
/// C gives e_i + e_j label K xor i xor j and +-2e_i label K, K the smallest
/// power of two >= rank; G2 long roots share the label of the orthogonal short
/// root. Each pair splits into W (first nonzero coordinate positive) and W_hat.
RootPartition qap_partition_of(const RootSystem &rs);

struct RootReport {
    bool criterion1 = true;  // -r is a root, in the same pair, other half
    bool criterion2 = true;  // r1 + r2 a root => label(r1 + r2) = label(r1) ^ label(r2)
    bool embedding = true;   // labels land on distinct conjugate pairs of su(2^k)
    size_t negation_checks = 0;
    size_t triple_checks = 0;
    std::vector<std::string> failures;
    bool ok() const { return criterion1 && criterion2 && embedding; }
};

RootReport verify_criteria(const RootSystem &rs, const RootPartition &part);

/// Exchanges two roots between (or within) pairs; the negative control for
/// verify_criteria. Labels and halves follow the new positions.
RootPartition swap_roots(const RootPartition &part, int root_a, int root_b);

/// Text such as "e1-e2", "-e1-e2+2e3", "2e4".
std::string format_root(const Root &r);
/// Layout: Cartan header line, then one row per pair
/// "W_q  E[..] E[..]  |  E[..] E[..]  W^_q".
std::string render_partition(const RootSystem &rs, const RootPartition &part);

}  // namespace qapkit
