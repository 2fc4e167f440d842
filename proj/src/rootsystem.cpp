#include "qapkit/rootsystem.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace qapkit {

namespace {

Root unit(int dim, int i, int c = 1) {
    Root r(size_t(dim), 0);
    r[size_t(i)] = c;
    return r;
}

Root add(const Root &a, const Root &b) {
    Root r(a.size());
    for (size_t k = 0; k < a.size(); ++k) r[k] = a[k] + b[k];
    return r;
}

Root neg(const Root &a) {
    Root r(a.size());
    for (size_t k = 0; k < a.size(); ++k) r[k] = -a[k];
    return r;
}

bool positive(const Root &r) {
    for (int x : r) {
        if (x != 0) return x > 0;
    }
    return false;
}

uint32_t next_pow2(int n) {
    uint32_t k = 1;
    while (int(k) < n) k <<= 1;
    return k;
}

int bit_length(uint32_t x) {
    int b = 0;
    while (x) {
        ++b;
        x >>= 1;
    }
    return b;
}

// Conjugate-pair label of one root.
uint32_t label_of_root(const RootSystem &rs, const Root &r) {
    std::vector<int> idx;
    for (int k = 0; k < rs.dim; ++k) {
        if (r[size_t(k)] != 0) idx.push_back(k);
    }
    switch (rs.kind) {
        case RootKind::A:
        case RootKind::D:
            return uint32_t(idx[0] ^ idx[1]);
        case RootKind::B:
            if (idx.size() == 1) return uint32_t(idx[0] ^ rs.rank);
            return uint32_t(idx[0] ^ idx[1]);
        case RootKind::C: {
            uint32_t K = next_pow2(rs.rank);
            if (idx.size() == 1) return K;
            bool same_sign = (r[size_t(idx[0])] > 0) == (r[size_t(idx[1])] > 0);
            return uint32_t(idx[0] ^ idx[1]) ^ (same_sign ? K : 0u);
        }
        case RootKind::G2: {
            if (idx.size() == 2) return uint32_t(idx[0] ^ idx[1]);
            // Long root +-(e_i + e_j - 2 e_k): orthogonal to the short root e_i - e_j.
            int k = 0;
            for (int c = 0; c < 3; ++c) {
                if (std::abs(r[size_t(c)]) == 2) k = c;
            }
            int i = (k + 1) % 3, j = (k + 2) % 3;
            return uint32_t(i ^ j);
        }
    }
    return 0;
}

}  // namespace

RootKind parse_root_kind(const std::string &s) {
    if (s == "A") return RootKind::A;
    if (s == "B") return RootKind::B;
    if (s == "C") return RootKind::C;
    if (s == "D") return RootKind::D;
    if (s == "G2" || s == "G") return RootKind::G2;
    if (s == "F4" || s == "E6" || s == "E7" || s == "E8" || s == "F" || s == "E") {
        throw UnsupportedSystemError("root system " + s + " is not supported (only A, B, C, D and G2)");
    }
    throw UnsupportedSystemError("unknown root system kind '" + s + "'");
}

std::string root_kind_name(RootKind k) {
    switch (k) {
        case RootKind::A: return "A";
        case RootKind::B: return "B";
        case RootKind::C: return "C";
        case RootKind::D: return "D";
        case RootKind::G2: return "G2";
    }
    return "?";
}

std::string RootSystem::name() const {
    return kind == RootKind::G2 ? "G2" : root_kind_name(kind) + std::to_string(rank);
}

int RootSystem::index_of(const Root &r) const {
    auto it = std::find(roots.begin(), roots.end(), r);
    return it == roots.end() ? -1 : int(it - roots.begin());
}

bool RootSystem::contains(const Root &r) const { return index_of(r) >= 0; }

std::vector<std::vector<char>> RootSystem::addition_table() const {
    std::map<Root, int> where;
    for (size_t i = 0; i < roots.size(); ++i) where[roots[i]] = int(i);
    std::vector<std::vector<char>> t(roots.size(), std::vector<char>(roots.size(), 0));
    for (size_t i = 0; i < roots.size(); ++i) {
        for (size_t j = 0; j < roots.size(); ++j) t[i][j] = where.count(add(roots[i], roots[j])) ? 1 : 0;
    }
    return t;
}

size_t expected_root_count(RootKind kind, int rank) {
    const size_t l = size_t(rank);
    switch (kind) {
        case RootKind::A: return (l + 1) * l;
        case RootKind::B:
        case RootKind::C: return 2 * l * l;
        case RootKind::D: return 2 * l * (l - 1);
        case RootKind::G2: return 12;
    }
    return 0;
}

RootSystem generate_roots(RootKind kind, int rank) {
    RootSystem rs;
    rs.kind = kind;
    rs.rank = rank;
    auto need = [&](bool ok, const char *rule) {
        if (!ok) {
            throw RankError("rank " + std::to_string(rank) + " invalid for " + root_kind_name(kind) + ": " + rule);
        }
    };
    switch (kind) {
        case RootKind::A:
            need(rank >= 1, "needs rank >= 1");
            rs.dim = rank + 1;
            break;
        case RootKind::B:
            need(rank > 2, "needs rank > 2");
            rs.dim = rank;
            break;
        case RootKind::C:
            need(rank > 1, "needs rank > 1");
            rs.dim = rank;
            break;
        case RootKind::D:
            need(rank > 3, "needs rank > 3");
            rs.dim = rank;
            break;
        case RootKind::G2:
            need(rank == 2, "G2 has rank 2");
            rs.dim = 3;
            break;
    }
    const int n = rs.dim;
    auto push = [&](const Root &r) { rs.roots.push_back(r); };
    if (kind == RootKind::A) {
        for (int i = 0; i < n; ++i) {
            for (int j = 0; j < n; ++j) {
                if (i != j) push(add(unit(n, i), unit(n, j, -1)));
            }
        }
    } else if (kind == RootKind::G2) {
        for (int i = 0; i < 3; ++i) {
            for (int j = 0; j < 3; ++j) {
                if (i != j) push(add(unit(3, i), unit(3, j, -1)));
            }
        }
        for (int k = 0; k < 3; ++k) {
            Root r(3, 1);
            r[size_t(k)] = -2;
            push(r);
            push(neg(r));
        }
    } else {
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                for (int si : {1, -1}) {
                    for (int sj : {1, -1}) push(add(unit(n, i, si), unit(n, j, sj)));
                }
            }
        }
        if (kind == RootKind::B || kind == RootKind::C) {
            const int c = kind == RootKind::B ? 1 : 2;
            for (int i = 0; i < n; ++i) {
                push(unit(n, i, c));
                push(unit(n, i, -c));
            }
        }
    }
    return rs;
}

RootPartition qap_partition_of(const RootSystem &rs) {
    RootPartition part;
    const size_t n = rs.roots.size();
    part.label_of.assign(n, 0);
    part.hatted.assign(n, 0);
    std::map<uint32_t, std::vector<int>> positives;
    uint32_t max_label = 0;
    for (size_t i = 0; i < n; ++i) {
        const Root &r = rs.roots[i];
        uint32_t lab = label_of_root(rs, r);
        part.label_of[i] = lab;
        part.hatted[i] = positive(r) ? 0 : 1;
        max_label = std::max(max_label, lab);
        if (positive(r)) positives[lab].push_back(int(i));
    }
    part.label_bits = bit_length(max_label);
    for (auto &[lab, idx] : positives) {
        std::sort(idx.begin(), idx.end(), [&](int a, int b) {
            return std::lexicographical_compare(rs.roots[size_t(b)].begin(), rs.roots[size_t(b)].end(),
                                                rs.roots[size_t(a)].begin(), rs.roots[size_t(a)].end());
        });
        RootPair pr;
        pr.label = lab;
        pr.W = idx;
        for (int i : idx) pr.W_hat.push_back(rs.index_of(neg(rs.roots[size_t(i)])));
        part.pairs.push_back(std::move(pr));
    }
    return part;
}

RootPartition swap_roots(const RootPartition &part, int a, int b) {
    RootPartition out = part;
    for (auto &pr : out.pairs) {
        for (auto *v : {&pr.W, &pr.W_hat}) {
            for (int &x : *v) {
                if (x == a) {
                    x = b;
                } else if (x == b) {
                    x = a;
                }
            }
        }
    }
    for (const auto &pr : out.pairs) {
        for (int x : pr.W) {
            out.label_of[size_t(x)] = pr.label;
            out.hatted[size_t(x)] = 0;
        }
        for (int x : pr.W_hat) {
            out.label_of[size_t(x)] = pr.label;
            out.hatted[size_t(x)] = 1;
        }
    }
    return out;
}

RootReport verify_criteria(const RootSystem &rs, const RootPartition &part) {
    RootReport rep;
    const size_t n = rs.roots.size();
    auto fail = [&](bool &flag, const std::string &msg) {
        flag = false;
        if (rep.failures.size() < 64) rep.failures.push_back(msg);
    };
    // Every root placed exactly once, with a nonzero label.
    std::vector<int> seen(n, 0);
    for (const auto &pr : part.pairs) {
        if (pr.label == 0) fail(rep.criterion1, "pair with zero label");
        for (const auto *v : {&pr.W, &pr.W_hat}) {
            for (int x : *v) {
                if (x < 0 || size_t(x) >= n) {
                    fail(rep.criterion1, "pair references a missing root");
                    continue;
                }
                ++seen[size_t(x)];
            }
        }
    }
    for (size_t i = 0; i < n; ++i) {
        if (seen[i] != 1) {
            fail(rep.criterion1, format_root(rs.roots[i]) + " placed " + std::to_string(seen[i]) + " times");
        }
    }
    // Criterion 1: -r is a root sitting in the same pair, opposite half.
    for (size_t i = 0; i < n; ++i) {
        ++rep.negation_checks;
        int j = rs.index_of(neg(rs.roots[i]));
        if (j < 0) {
            fail(rep.criterion1, "-(" + format_root(rs.roots[i]) + ") is not a root");
            continue;
        }
        if (part.label_of[i] != part.label_of[size_t(j)] || part.hatted[i] == part.hatted[size_t(j)]) {
            fail(rep.criterion1, format_root(rs.roots[i]) + " and its negative are not conjugate partners");
        }
    }
    // Criterion 2: additive closure follows the label group law.
    auto table = rs.addition_table();
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (!table[i][j]) continue;
            ++rep.triple_checks;
            if (table[i][j] != table[j][i]) fail(rep.criterion2, "addition table not symmetric");
            int k = rs.index_of(add(rs.roots[i], rs.roots[j]));
            if ((part.label_of[i] ^ part.label_of[j]) != part.label_of[size_t(k)]) {
                fail(rep.criterion2, format_root(rs.roots[i]) + " + " + format_root(rs.roots[j]) + " = " +
                                         format_root(rs.roots[size_t(k)]) + " breaks the pair law");
            }
        }
    }
    // Embedding: labels are conjugate pairs of the intrinsic rank-0 QAP of
    // su(2^k); the pair of S^0_label must be distinct per label and the
    // tri-addition of pairs must mirror the label law on every addable triple.
    const int p = std::max(1, part.label_bits);
    if (p > 8) {
        fail(rep.embedding, "labels exceed the supported embedding size");
        return rep;
    }
    auto P = build_qap(BiSubalgebra::intrinsic_cartan(p), BiSubalgebra::intrinsic_cartan(p));
    auto pair_of = [&](uint32_t lab) { return P->key_f(P->key_of(lab)); };
    std::map<uint64_t, uint32_t> owner;
    for (const auto &pr : part.pairs) {
        if (pr.label >= (1u << p)) {
            fail(rep.embedding, "label out of range");
            continue;
        }
        uint64_t f = pair_of(pr.label);
        if (owner.count(f) && owner[f] != pr.label) fail(rep.embedding, "two labels share one su pair");
        owner[f] = pr.label;
    }
    for (size_t i = 0; i < n && rep.embedding; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (!table[i][j]) continue;
            int k = rs.index_of(add(rs.roots[i], rs.roots[j]));
            uint32_t a = part.label_of[i], b = part.label_of[j], c = part.label_of[size_t(k)];
            if (a == 0 || b == 0 || c == 0 || a >= (1u << p) || b >= (1u << p) || c >= (1u << p)) continue;
            Key ka = P->make_key(pair_of(a), 0, 0), kb = P->make_key(pair_of(b), 0, 0);
            if (P->key_f(P->tri_add(ka, kb)) != pair_of(c)) {
                fail(rep.embedding, "pair law does not survive the su embedding");
                break;
            }
        }
    }
    return rep;
}

std::string format_root(const Root &r) {
    std::ostringstream os;
    bool first = true;
    for (size_t k = 0; k < r.size(); ++k) {
        int c = r[k];
        if (c == 0) continue;
        if (c < 0) {
            os << '-';
        } else if (!first) {
            os << '+';
        }
        if (std::abs(c) != 1) os << std::abs(c);
        os << 'e' << (k + 1);
        first = false;
    }
    return first ? "0" : os.str();
}

std::string render_partition(const RootSystem &rs, const RootPartition &part) {
    std::ostringstream os;
    os << "C_" << rs.name() << "  (" << rs.roots.size() << " roots, " << part.pairs.size() << " conjugate pairs)\n";
    for (const auto &pr : part.pairs) {
        std::ostringstream left, right;
        for (int x : pr.W) left << " E[" << format_root(rs.roots[size_t(x)]) << "]";
        for (int x : pr.W_hat) right << " E[" << format_root(rs.roots[size_t(x)]) << "]";
        os << "W_" << pr.label << " " << left.str() << "  |" << right.str() << "  W^_" << pr.label << "\n";
    }
    return os.str();
}

}  // namespace qapkit
