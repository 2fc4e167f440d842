// qapkit: command-line front end for the quotient-algebra toolkit.
//
// Subcommands: enumerate | qap | decompose | sequence | kak | roots | verify.
// Exit codes: 0 all checks pass, 1 verification failure, 2 usage error.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "qapkit/bisubalgebra.hpp"
#include "qapkit/cartan.hpp"
#include "qapkit/json_io.hpp"
#include "qapkit/numeric_kak.hpp"
#include "qapkit/partition.hpp"
#include "qapkit/qap.hpp"
#include "qapkit/rootsystem.hpp"
#include "qapkit/sequence.hpp"

using namespace qapkit;

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

class UsageError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

struct RunConfig {
    int p = 3;
    uint64_t seed = 1;
    double tol = 1e-9;
    std::string format = "text";
    bool json() const { return format == "json"; }
};

std::string sci(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3e", x);
    return buf;
}

/// Worker cap: QAPKIT_THREADS when set (>= 1), else the hardware count.
unsigned thread_cap() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char *env = std::getenv("QAPKIT_THREADS")) {
        char *end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || v < 1) throw UsageError("QAPKIT_THREADS must be a positive integer");
        return unsigned(std::min<long>(v, 256));
    }
    return hw;
}

/// Runs fn(0..n-1) on up to thread_cap() workers; fn writes only to its own slot.
void parallel_for(size_t n, const std::function<void(size_t)> &fn) {
    const unsigned workers = unsigned(std::min<size_t>(thread_cap(), std::max<size_t>(n, 1)));
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (size_t i = next++; i < n; i = next++) fn(i);
        });
    }
    for (auto &t : pool) t.join();
}

void require_p(const RunConfig &cfg, bool matrix_backed) {
    if (cfg.p < 1 || cfg.p > 5) throw UsageError("--p must lie in [1, 5]");
    if (matrix_backed && cfg.p > 3) throw UsageError("matrix-backed commands need --p <= 3");
    if (!(cfg.tol > 0)) throw UsageError("--tol must be positive");
}

std::vector<uint64_t> parse_labels(const std::vector<std::string> &items, int p) {
    std::vector<uint64_t> out;
    for (const auto &s : items) out.push_back(parse_label(s, p));
    return out;
}

/// Default center of rank r: the span of the Cartan basis without its first r rows.
BiSubalgebra default_center(const BiSubalgebra &C, int r) {
    if (r < 0 || r > C.p()) throw UsageError("--rank must lie in [0, p]");
    std::vector<uint64_t> rows(C.basis().begin() + r, C.basis().end());
    return BiSubalgebra(C.p(), rows);
}

struct PartitionOptions {
    int rank = 0;
    bool intrinsic = false;
    std::vector<std::string> cartan;
    std::vector<std::string> center;
};

void add_partition_options(CLI::App *cmd, PartitionOptions &o) {
    cmd->add_option("--rank", o.rank, "rank r of the partition (co-order of the center in C)");
    cmd->add_flag("--intrinsic", o.intrinsic, "use the intrinsic (diagonal) Cartan subalgebra (default)");
    cmd->add_option("--cartan", o.cartan, "Cartan basis labels, e.g. S[001|000],S[100|100]")->delimiter(',');
    cmd->add_option("--center", o.center, "basis labels of the center B^[r] (overrides --rank)")->delimiter(',');
}

QAPPtr partition_from(const RunConfig &cfg, const PartitionOptions &o) {
    if (o.intrinsic && !o.cartan.empty()) throw UsageError("--intrinsic and --cartan are exclusive");
    BiSubalgebra C = o.cartan.empty() ? BiSubalgebra::intrinsic_cartan(cfg.p)
                                      : BiSubalgebra(cfg.p, parse_labels(o.cartan, cfg.p));
    BiSubalgebra Z = o.center.empty() ? default_center(C, o.rank) : BiSubalgebra(cfg.p, parse_labels(o.center, cfg.p));
    return build_qap(C, Z);
}

void emit(const RunConfig &cfg, const std::string &text, const Json &j) {
    if (cfg.json()) {
        std::cout << j.dump(1) << "\n";
    } else {
        std::cout << text;
    }
}

MergeMode parse_mode(const std::string &s) {
    if (s == "parallel") return MergeMode::Parallel;
    if (s == "crossing") return MergeMode::Crossing;
    throw UsageError("mode must be parallel or crossing: " + s);
}

// ------------------------------------------------------------ subcommands

struct EnumerateOptions {
    int order = -1;
    bool abelian_only = false, cartan_only = false;
    uint64_t cap = 100000;
};

/// Gaussian binomial (n choose k)_2.
double gaussian_binomial(int n, int k) {
    double v = 1;
    for (int j = 0; j < k; ++j) v *= double((uint64_t(1) << (n - j)) - 1) / double((uint64_t(1) << (j + 1)) - 1);
    return v;
}

int cmd_enumerate(const RunConfig &cfg, const EnumerateOptions &o) {
    require_p(cfg, false);
    if (o.order < 0 || o.order > 2 * cfg.p) throw UsageError("--order must lie in [0, 2p]");
    const double count = gaussian_binomial(2 * cfg.p, 2 * cfg.p - o.order);
    if (count > double(o.cap)) {
        throw CapacityError("enumeration of " + std::to_string(uint64_t(count)) + " bi-subalgebras exceeds --cap " +
                            std::to_string(o.cap));
    }
    ListingFilter f{o.abelian_only || o.cartan_only, o.cartan_only};
    std::vector<BiSubalgebra> items;
    for (auto &B : enumerate_all(cfg.p, o.order)) {
        if (f.cartan_only && !is_cartan(B)) continue;
        if (f.abelian_only && !is_abelian(B)) continue;
        items.push_back(std::move(B));
    }
    emit(cfg, render_listing(cfg.p, o.order, f, items), listing_json(cfg.p, o.order, f, items));
    return kExitPass;
}

struct QapOptions {
    PartitionOptions part;
    std::string coquotient;  // label of a generator in the co-quotient center
    std::string merge, detach;
    size_t choice = 0;
    bool lambda = false;
};

int cmd_qap(const RunConfig &cfg, const QapOptions &o) {
    require_p(cfg, false);
    QAPPtr P = partition_from(cfg, o.part);
    if (!o.merge.empty() && !o.detach.empty()) throw UsageError("--merge and --detach are exclusive");
    if ((!o.merge.empty() || !o.detach.empty()) && o.coquotient.empty()) {
        throw UsageError("--merge / --detach need --coquotient");
    }
    if (o.lambda && (P->p() > 3)) throw UsageError("--lambda needs p <= 3");
    if (o.coquotient.empty()) {
        emit(cfg, render_quotient_table(*P, o.lambda), to_json(*P, o.lambda));
        return kExitPass;
    }
    Key ck = P->key_of(parse_label(o.coquotient, cfg.p));
    CoQuotientAlgebra Q = build_coquotient(P, ck);
    if (o.merge.empty() && o.detach.empty()) {
        emit(cfg, render_coquotient_table(Q, o.lambda), to_json(Q, o.lambda));
        return kExitPass;
    }
    QAPPtr result;
    std::optional<CoQuotientAlgebra> rq;
    if (!o.merge.empty()) {
        MergeMode mode = parse_mode(o.merge);
        size_t n = merge_choice_count(Q, mode);
        if (o.choice >= n) {
            throw UsageError("--choice " + std::to_string(o.choice) + " out of range (" + std::to_string(n) +
                             " choices)");
        }
        MergeResult m = merge_coquotient(Q, mode, o.choice);
        result = m.qap;
        rq = m.coquotient;
    } else {
        DetachResult d = detach_coquotient(Q, parse_mode(o.detach));
        result = d.qap;
        rq = d.coquotient;
    }
    ValidationReport rep = result->validate();
    if (rq) {
        emit(cfg, render_coquotient_table(*rq, o.lambda), to_json(*rq, o.lambda));
    } else {
        emit(cfg, render_quotient_table(*result, o.lambda), to_json(*result, o.lambda));
    }
    if (!rep.ok) {
        for (const auto &f : rep.failures) std::cerr << "validation failure: " << f << "\n";
        return kExitFail;
    }
    return kExitPass;
}

struct DecomposeOptions {
    PartitionOptions part;
    std::string type = "all";
    std::vector<int> mn;
    bool lambda = false;
};

int cmd_decompose(const RunConfig &cfg, const DecomposeOptions &o) {
    require_p(cfg, false);
    QAPPtr P = partition_from(cfg, o.part);
    if (o.type != "all") parse_type(o.type);
    if (!o.mn.empty()) {
        if (o.mn.size() != 2) throw UsageError("--mn expects m,n");
        if (o.type != "AIII" && o.type != "all") throw UsageError("--mn applies to type AIII");
        if (o.mn[0] + o.mn[1] != (1 << cfg.p) || o.mn[1] < 1 || o.mn[0] < o.mn[1]) {
            throw UsageError("--mn needs m >= n >= 1 with m + n = 2^p");
        }
        DividedQAP div = divide_intrinsic(*P, o.mn[0], o.mn[1]);
        DividedDecomposition D = intrinsic_aiii_t(div);
        emit(cfg, render_divided(D, o.lambda), divided_json(D, o.lambda));
        return kExitPass;
    }
    std::vector<DecompositionRow> rows;
    for (auto &D : enumerate_decompositions(P)) {
        TypeDecision td = decide_type(D);
        if (o.type != "all" && type_name(td.chosen) != o.type) continue;
        rows.push_back({D, td});
    }
    emit(cfg, render_decompositions(*P, o.type, rows, o.lambda), decompositions_json(*P, o.type, rows, o.lambda));
    return kExitPass;
}

struct SequenceOptions {
    PartitionOptions part;
    int length = -1;
    std::string type;
    size_t cap = 200000;
};

bool all_levels_admit(const DecompositionSequence &S, CartanType t) {
    for (const auto &td : S.types) {
        if (!td.admissible.count(t)) return false;
    }
    return true;
}

int cmd_sequence(const RunConfig &cfg, const SequenceOptions &o) {
    require_p(cfg, false);
    QAPPtr P = partition_from(cfg, o.part);
    const int M = o.length < 0 ? P->p() : o.length;
    DecompositionSequence S = build_sequence(P, M);  // BoundViolationError outside [p, p + r]
    S.annotate();
    if (!o.type.empty()) {
        CartanType t = parse_type(o.type);
        if (!all_levels_admit(S, t)) {
            bool found = false;
            for (auto &cand : enumerate_sequences(P, o.cap)) {
                if (cand.length() != M) continue;
                cand.annotate();
                if (all_levels_admit(cand, t)) {
                    S = std::move(cand);
                    found = true;
                    break;
                }
            }
            if (!found) {
                if (cfg.json()) {
                    std::cout << Json{{"kind", "sequence"}, {"found", false}, {"type", o.type}, {"length", M}}.dump(1)
                              << "\n";
                } else {
                    std::cout << "no sequence of length " << M << " with every level of type " << o.type << "\n";
                }
                return kExitFail;
            }
        }
    }
    emit(cfg, render_sequence(S), to_json(S));
    return kExitPass;
}

struct KakOptions {
    std::string type = "AIII";
    std::vector<int> mn;
    std::string in, sequence;
    bool matrices = false;
};

int cmd_kak(const RunConfig &cfg, const KakOptions &o) {
    require_p(cfg, true);
    KAKOptions ko;
    ko.seed = cfg.seed;
    ko.tol = cfg.tol;
    std::mt19937_64 rng(cfg.seed);
    CMat U;
    if (!o.in.empty()) {
        U = read_matrix_file(o.in);
    } else {
        U = haar_special_unitary(1 << cfg.p, rng);
    }
    const int N = int(U.rows());
    if (!o.sequence.empty()) {
        std::ifstream f(o.sequence);
        if (!f) throw UsageError("cannot open " + o.sequence);
        Json j;
        try {
            f >> j;
        } catch (const Json::exception &e) {
            throw FormatError(std::string("sequence file: ") + e.what());
        }
        DecompositionSequence S = sequence_from_json(j);
        if ((1 << S.partition->p()) != N) throw DimensionError("matrix size does not match the sequence");
        FactorTree t = factorize_sequence(U, S, ko);
        const bool pass = t.ok && t.recomposition_residual() < 1e-7 && t.max_constraint_residual() < cfg.tol;
        Json jt = to_json(t, o.matrices);
        jt["pass"] = pass;
        std::ostringstream os;
        os << "factor-tree p=" << t.p << " depth=" << t.depth << " leaves=" << t.leaf_count()
           << " a_factors=" << t.a_factor_count();
        if (t.ok) {
            os << " recomposition=" << sci(t.recomposition_residual())
               << " max_constraint=" << sci(t.max_constraint_residual());
        } else {
            os << " failed_level=" << t.failed_level;
        }
        os << " result=" << (pass ? "pass" : "FAIL") << "\n";
        for (size_t l = 0; l < t.level_types.size(); ++l) os << "  level " << l + 1 << ": " << t.level_types[l] << "\n";
        if (!t.ok) os << "  failure: " << t.failure << "\n";
        if (o.matrices && t.ok) {
            for (size_t l = 0; l < t.A.size(); ++l) {
                for (size_t s = 0; s < t.A[l].size(); ++s) {
                    os << "A[" << l << "]" << FactorTree::index_string(int(l), s) << " =\n";
                    write_matrix(os, t.A[l][s]);
                }
            }
            for (size_t s = 0; s < t.K.back().size(); ++s) {
                os << "K[" << t.K.size() - 1 << "]" << FactorTree::index_string(int(t.K.size() - 1), s) << " =\n";
                write_matrix(os, t.K.back()[s]);
            }
        }
        emit(cfg, os.str(), jt);
        return pass ? kExitPass : kExitFail;
    }
    CartanType type = parse_type(o.type);
    int m = -1, n = -1;
    if (!o.mn.empty()) {
        if (type != CartanType::AIII) throw UsageError("--mn applies to type AIII");
        if (o.mn.size() != 2 || o.mn[0] + o.mn[1] != N || o.mn[0] < 1 || o.mn[1] < 1) {
            throw UsageError("--mn needs m,n >= 1 with m + n = N");
        }
        m = o.mn[0];
        n = o.mn[1];
    }
    KAKResult r = kak(U, type, m, n, ko);
    const bool pass = r.recomposition < 1e-8 && r.metric_k0 < cfg.tol && r.metric_k1 < cfg.tol;
    Json jr = to_json(r, o.matrices);
    jr["pass"] = pass;
    std::ostringstream os;
    os << "kak type=" << type_name(r.type) << " N=" << N;
    if (r.type == CartanType::AIII) os << " m=" << r.m << " n=" << r.n;
    os << " recomposition=" << sci(r.recomposition) << " metric_k0=" << sci(r.metric_k0)
       << " metric_k1=" << sci(r.metric_k1) << " attempts=" << r.attempts << " result=" << (pass ? "pass" : "FAIL")
       << "\n";
    if (o.matrices) {
        os << "phase = " << format_complex(r.phase) << "\nK0 =\n";
        write_matrix(os, r.K0);
        os << "A =\n";
        write_matrix(os, r.A);
        os << "K1 =\n";
        write_matrix(os, r.K1);
    }
    emit(cfg, os.str(), jr);
    return pass ? kExitPass : kExitFail;
}

struct RootsOptions {
    std::string kind = "A";
    int rank = 3;
    bool verify = false;
    std::vector<int> corrupt;
};

int cmd_roots(const RunConfig &cfg, const RootsOptions &o) {
    RootSystem rs = generate_roots(parse_root_kind(o.kind), o.rank);
    RootPartition part = qap_partition_of(rs);
    if (!o.corrupt.empty()) {
        if (o.corrupt.size() != 2) throw UsageError("--corrupt expects two root indices a,b");
        for (int x : o.corrupt) {
            if (x < 0 || size_t(x) >= rs.roots.size()) throw UsageError("--corrupt index out of range");
        }
        part = swap_roots(part, o.corrupt[0], o.corrupt[1]);
    }
    if (!o.verify) {
        emit(cfg, render_roots(rs, part), to_json(rs, part));
        return kExitPass;
    }
    RootReport rep = verify_criteria(rs, part);
    emit(cfg, render_roots(rs, part, &rep), to_json(rs, part, &rep));
    return rep.ok() ? kExitPass : kExitFail;
}

// ------------------------------------------------------------------ verify

struct Check {
    explicit Check(std::string n) : name(std::move(n)) {}
    std::string name;
    size_t cases = 0;
    std::vector<std::string> failures;
    bool pass() const { return failures.empty(); }
    void fail(const std::string &m) {
        if (failures.size() < 32) failures.push_back(m);
    }
};

/// Collects per-index failure lists in index order.
void merge_failures(Check &c, const std::vector<std::vector<std::string>> &per) {
    for (const auto &v : per) {
        for (const auto &m : v) c.fail(m);
    }
}

std::vector<BiSubalgebra> all_bisubalgebras(int p) {
    std::vector<BiSubalgebra> out;
    for (int r = 0; r <= 2 * p; ++r) {
        for (auto &B : enumerate_all(p, r)) out.push_back(std::move(B));
    }
    return out;
}

std::vector<BiSubalgebra> random_bisubalgebras(int p, size_t count, std::mt19937_64 &rng) {
    std::vector<BiSubalgebra> out;
    const uint64_t mask = (uint64_t(1) << (2 * p)) - 1;
    for (size_t s = 0; s < count; ++s) {
        int d = int(rng() % uint64_t(2 * p + 1));
        std::vector<uint64_t> labels;
        for (int k = 0; k < d; ++k) labels.push_back(rng() & mask);
        out.emplace_back(p, labels);
    }
    return out;
}

Check check_counting(const std::vector<BiSubalgebra> &family) {
    Check c{"counting"};
    std::vector<std::vector<std::string>> per(family.size());
    parallel_for(family.size(), [&](size_t idx) {
        const BiSubalgebra &B = family[idx];
        const int p = B.p(), r = B.order();
        const uint64_t expect = uint64_t(1) << (2 * p - r);
        if (B.elements().size() != expect) per[idx].push_back("|B| != 2^(2p-r) for " + B.str());
        MaximalBiSubalgebraGroup G(B);
        if (G.count() != expect) per[idx].push_back("|G(B)| != 2^(2p-r) for " + B.str());
        // Group table: member(i) ⊓ member(j) = member(i xor j), each proper
        // member maximal, all members distinct.
        std::vector<BiSubalgebra> mem(G.count());
        for (uint64_t i = 0; i < G.count(); ++i) {
            mem[i] = G.member(i);
            if (i && mem[i].dim() != B.dim() - 1) per[idx].push_back("member not maximal in " + B.str());
            if (G.index_of(mem[i]) != i && i) per[idx].push_back("index_of inconsistent in " + B.str());
        }
        for (uint64_t i = 1; i < G.count(); ++i) {
            for (uint64_t j = i + 1; j < G.count(); ++j) {
                if (!(sqcap(mem[i], mem[j], B) == mem[i ^ j])) {
                    per[idx].push_back("group table fails in " + B.str());
                    return;
                }
            }
        }
    });
    c.cases = family.size();
    merge_failures(c, per);
    return c;
}

Check check_duality_sweep(const std::vector<BiSubalgebra> &family) {
    Check c{"duality"};
    std::vector<std::vector<std::string>> per(family.size());
    parallel_for(family.size(), [&](size_t idx) {
        if (check_duality(family[idx]) != 1) per[idx].push_back("duality fails for " + family[idx].str());
    });
    c.cases = family.size();
    merge_failures(c, per);
    return c;
}

/// Cartan subalgebras exercised by the QAP and decomposition checks.
std::vector<BiSubalgebra> test_cartans(int p, size_t extra, std::mt19937_64 &rng) {
    std::vector<BiSubalgebra> out{BiSubalgebra::intrinsic_cartan(p)};
    const uint64_t mask = (uint64_t(1) << (2 * p)) - 1;
    while (out.size() < 1 + extra) {
        // Random abelian seed then greedy completion.
        std::vector<uint64_t> seed;
        for (int k = 0; k < p; ++k) {
            uint64_t x = rng() & mask;
            bool ok = x != 0;
            for (uint64_t y : seed) ok = ok && !omega(x, y, p);
            if (ok) seed.push_back(x);
        }
        BiSubalgebra C = extend_to_cartan(BiSubalgebra(p, seed));
        if (std::find(out.begin(), out.end(), C) == out.end()) out.push_back(C);
    }
    return out;
}

Check check_qap_groups(int p, const std::vector<BiSubalgebra> &cartans) {
    Check c{"qap-group"};
    struct Job {
        BiSubalgebra C;
        int r;
    };
    std::vector<Job> jobs;
    for (const auto &C : cartans) {
        for (int r = 0; r <= p; ++r) jobs.push_back({C, r});
    }
    std::vector<std::vector<std::string>> per(jobs.size());
    parallel_for(jobs.size(), [&](size_t idx) {
        const auto &[C, r] = jobs[idx];
        QAPPtr P = build_qap(C, default_center(C, r));
        std::string tag = "C=" + C.str() + " r=" + std::to_string(r);
        if (P->key_count() != (uint32_t(1) << (p + r + 1))) per[idx].push_back("key group order wrong, " + tag);
        auto rep = P->validate();
        for (const auto &f : rep.failures) per[idx].push_back(f + ", " + tag);
        // Closure oracle: anticommuting members of cells x, y multiply into x ⊛ y.
        for (uint64_t a = 1; a < (uint64_t(1) << (2 * p)); ++a) {
            for (uint64_t b = a + 1; b < (uint64_t(1) << (2 * p)); ++b) {
                if (!omega(a, b, p)) continue;
                Key want = P->tri_add(P->key_of(a), P->key_of(b));
                if (P->key_of(a ^ b) != want) {
                    per[idx].push_back("closure fails for " + Spinor::from_label(p, a).str() + ", " +
                                       Spinor::from_label(p, b).str() + ", " + tag);
                    return;
                }
            }
        }
    });
    c.cases = jobs.size();
    merge_failures(c, per);
    return c;
}

Check check_decompositions(int p, const std::vector<BiSubalgebra> &cartans, bool matrices, double tol) {
    Check c{"decomposition"};
    std::vector<Decomposition> all;
    for (const auto &C : cartans) {
        for (int r = 0; r <= std::min(1, p); ++r) {
            for (auto &D : enumerate_decompositions(build_qap(C, default_center(C, r)))) all.push_back(std::move(D));
        }
    }
    std::vector<std::vector<std::string>> per(all.size());
    parallel_for(all.size(), [&](size_t idx) {
        const Decomposition &D = all[idx];
        auto s = check_decomposition(D);
        std::string tag = "form " + bits_to_string(D.forms.front(), D.source->key_bits()) + " on C=" +
                          D.source->cartan().str() + " r=" + std::to_string(D.source->rank());
        if (!s.ok()) per[idx].push_back("symbolic " + s.str() + ", " + tag);
        if (matrices) {
            auto m = check_decomposition_matrix(D, std::max(tol, 1e-12));
            if (!m.ok()) per[idx].push_back("matrix " + m.str() + ", " + tag);
        }
    });
    c.cases = all.size();
    merge_failures(c, per);
    return c;
}

Check check_fixture(const std::string &path) {
    Check c{"fixture " + path};
    std::ifstream f(path);
    if (!f) throw UsageError("cannot open fixture " + path);
    Json j;
    try {
        f >> j;
    } catch (const Json::exception &e) {
        throw FormatError(std::string("fixture: ") + e.what());
    }
    FixtureReport rep = compare_fixture(j);
    c.cases = rep.rows_checked;
    for (const auto &m : rep.failures) c.fail(m);
    return c;
}

struct VerifyOptions {
    size_t samples = 1000;
    size_t cartans = 2;
    std::vector<std::string> fixtures;
    bool fixtures_only = false;
};

int cmd_verify(const RunConfig &cfg, const VerifyOptions &o) {
    require_p(cfg, false);
    std::mt19937_64 rng(cfg.seed);
    std::vector<Check> checks;
    if (!o.fixtures_only) {
        const int p = cfg.p;
        // Exhaustive families where they are small, seeded samples otherwise.
        std::vector<BiSubalgebra> family = p <= 3 ? all_bisubalgebras(p) : random_bisubalgebras(p, o.samples, rng);
        checks.push_back(check_counting(family));
        std::vector<BiSubalgebra> dual = p <= 2 ? family : random_bisubalgebras(p, o.samples, rng);
        checks.push_back(check_duality_sweep(dual));
        if (p <= 4) {
            auto cartans = test_cartans(p, o.cartans, rng);
            checks.push_back(check_qap_groups(p, cartans));
            checks.push_back(check_decompositions(p, cartans, p <= 3, cfg.tol));
        }
    }
    for (const auto &fx : o.fixtures) checks.push_back(check_fixture(fx));
    bool all = true;
    Json arr = Json::array();
    std::ostringstream os;
    os << "verify p=" << cfg.p << " seed=" << cfg.seed << "\n";
    for (const auto &c : checks) {
        all = all && c.pass();
        arr.push_back(Json{{"name", c.name}, {"cases", c.cases}, {"pass", c.pass()}, {"failures", c.failures}});
        os << "check " << c.name << ": " << (c.pass() ? "pass" : "FAIL") << " (" << c.cases << " cases)\n";
        for (const auto &f : c.failures) os << "  failure: " << f << "\n";
    }
    os << "result: " << (all ? "pass" : "FAIL") << "\n";
    emit(cfg, os.str(), Json{{"kind", "verify"}, {"p", cfg.p}, {"seed", cfg.seed}, {"checks", arr}, {"pass", all}});
    return all ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{"qapkit: quotient-algebra partitions, Cartan decompositions and KAK factorizations"};
    app.require_subcommand(1);
    app.fallthrough();
    RunConfig cfg;
    app.add_option("--p", cfg.p, "number of qubits (su(2^p))");
    app.add_option("--seed", cfg.seed, "seed for every random choice");
    app.add_option("--tol", cfg.tol, "numerical tolerance");
    app.add_option("--format", cfg.format, "output format")->check(CLI::IsMember({"text", "json"}));

    EnumerateOptions eo;
    auto *en = app.add_subcommand("enumerate", "list the bi-subalgebras of a given order");
    en->add_option("--order", eo.order, "maximality order r (index 2^r)")->required();
    en->add_flag("--abelian-only", eo.abelian_only, "keep abelian bi-subalgebras");
    en->add_flag("--cartan-only", eo.cartan_only, "keep Cartan subalgebras");
    en->add_option("--cap", eo.cap, "refuse enumerations larger than this");

    QapOptions qo;
    auto *qa = app.add_subcommand("qap", "quotient and co-quotient algebra tables, merges and detachments");
    add_partition_options(qa, qo.part);
    qa->add_option("--coquotient", qo.coquotient, "generator label in the co-quotient center cell");
    qa->add_option("--merge", qo.merge, "merge the co-quotient: parallel | crossing");
    qa->add_option("--detach", qo.detach, "detach the co-quotient: parallel | crossing");
    qa->add_option("--choice", qo.choice, "auxiliary-subspace choice for merges");
    qa->add_flag("--lambda", qo.lambda, "render cells in lambda form");

    DecomposeOptions dopt;
    auto *de = app.add_subcommand("decompose", "Cartan decompositions generated by a partition");
    add_partition_options(de, dopt.part);
    de->add_option("--type", dopt.type, "AI | AII | AIII | all");
    de->add_option("--mn", dopt.mn, "block sizes m,n of a type-AIII split")->delimiter(',');
    de->add_flag("--lambda", dopt.lambda, "add lambda renderings of t and p");

    SequenceOptions so;
    auto *se = app.add_subcommand("sequence", "t-p decomposition sequences");
    add_partition_options(se, so.part);
    se->add_option("--length", so.length, "target length M in [p, p + r] (default p)");
    se->add_option("--type", so.type, "require every level to admit this type");
    se->add_option("--cap", so.cap, "search limit for typed sequences");

    KakOptions ko;
    auto *ka = app.add_subcommand("kak", "numeric KAK factorization of a unitary");
    ka->add_option("--type", ko.type, "AI | AII | AIII");
    ka->add_option("--mn", ko.mn, "block sizes m,n for AIII")->delimiter(',');
    ka->add_option("--in", ko.in, "matrix file (default: Haar-random from --seed)");
    ka->add_option("--sequence", ko.sequence, "sequence JSON (from `sequence --format json`)");
    ka->add_flag("--matrices", ko.matrices, "print the factors");

    RootsOptions ro;
    auto *rt = app.add_subcommand("roots", "root systems arranged in conjugate pairs");
    rt->add_option("--kind", ro.kind, "A | B | C | D | G2")->required();
    rt->add_option("--rank", ro.rank, "Lie rank")->required();
    rt->add_flag("--verify", ro.verify, "check the root criteria");
    rt->add_option("--corrupt", ro.corrupt, "swap two roots (indices a,b) before verifying")->delimiter(',');

    VerifyOptions vo;
    auto *ve = app.add_subcommand("verify", "invariant sweep and golden-table comparison");
    ve->add_option("--samples", vo.samples, "random bi-subalgebras where exhaustive is too large");
    ve->add_option("--cartans", vo.cartans, "random Cartan subalgebras besides the intrinsic one");
    ve->add_option("--fixture", vo.fixtures, "golden table JSON file(s) to compare");
    ve->add_flag("--fixtures-only", vo.fixtures_only, "skip the sweeps");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    auto report_error = [&](const std::string &kind, const std::string &msg, int code) {
        if (cfg.json()) {
            std::cout << Json{{"error", kind}, {"message", msg}, {"exit", code}}.dump(1) << "\n";
        }
        std::cerr << "qapkit: " << kind << ": " << msg << "\n";
        return code;
    };
    try {
        thread_cap();  // validates QAPKIT_THREADS up front
        if (en->parsed()) return cmd_enumerate(cfg, eo);
        if (qa->parsed()) return cmd_qap(cfg, qo);
        if (de->parsed()) return cmd_decompose(cfg, dopt);
        if (se->parsed()) return cmd_sequence(cfg, so);
        if (ka->parsed()) return cmd_kak(cfg, ko);
        if (rt->parsed()) return cmd_roots(cfg, ro);
        if (ve->parsed()) return cmd_verify(cfg, vo);
    } catch (const NumericFailure &e) {
        return report_error("numeric failure", e.what(), kExitFail);
    } catch (const std::invalid_argument &e) {
        return report_error("usage", e.what(), kExitUsage);
    } catch (const std::out_of_range &e) {
        return report_error("usage", e.what(), kExitUsage);
    } catch (const std::length_error &e) {
        return report_error("usage", e.what(), kExitUsage);
    } catch (const std::runtime_error &e) {
        return report_error("usage", e.what(), kExitUsage);
    } catch (const std::logic_error &e) {
        return report_error("internal", e.what(), kExitFail);
    }
    return kExitUsage;
}
