#include "qapkit/sequence.hpp"

#include <algorithm>

#include "qapkit/gf2.hpp"

namespace qapkit {

Decomposition DecompositionSequence::level(int l) const {
    if (l < 1 || l > length()) throw std::out_of_range("sequence level out of range");
    return Decomposition{partition, std::vector<uint64_t>(forms.begin(), forms.begin() + l), CartanType::Untyped};
}

void DecompositionSequence::annotate() {
    types.clear();
    for (int l = 1; l <= length(); ++l) types.push_back(decide_type(level(l)));
}

bool keys_abelian(const QAPartition &P, const std::vector<Key> &keys) {
    std::vector<Key> nn;
    for (Key k : keys) {
        if (!P.is_null(k)) nn.push_back(k);
    }
    for (size_t a = 0; a < nn.size(); ++a) {
        for (size_t b = a + 1; b < nn.size(); ++b) {
            if (!P.is_null(nn[a] ^ nn[b])) return false;
        }
    }
    return true;
}

bool generators_abelian(int p, const std::vector<uint64_t> &labels) {
    for (size_t a = 0; a < labels.size(); ++a) {
        for (size_t b = a + 1; b < labels.size(); ++b) {
            if (omega(labels[a], labels[b], p)) return false;
        }
    }
    return true;
}

static bool holds_generators(const QAPartition &P, const std::vector<Key> &keys) {
    return std::any_of(keys.begin(), keys.end(), [&](Key k) { return P.generator_count(k) > 0; });
}

std::vector<Decomposition> extend(const Decomposition &D) {
    const QAPartition &P = *D.source;
    if (keys_abelian(P, D.t_keys())) throw SequenceTerminal("extend: t is abelian");
    auto F = gf2::rref(D.forms);
    std::vector<Decomposition> out;
    for (uint64_t psi = 1; psi < P.key_count(); ++psi) {
        if (gf2::reduce(psi, F) != psi) continue;  // one representative per coset
        std::vector<uint64_t> forms = D.forms;
        forms.push_back(psi);
        Decomposition next{D.source, forms, CartanType::Untyped};
        if (!holds_generators(P, next.p_keys()) || !holds_generators(P, next.t_keys())) continue;
        out.push_back(std::move(next));
    }
    return out;
}

ValidationReport validate_sequence(const DecompositionSequence &S, bool require_complete) {
    ValidationReport rep;
    const QAPartition &P = *S.partition;
    if (gf2::rank(S.forms) != S.length()) rep.fail("forms are dependent: chain is not strictly nested");
    for (int l = 1; l <= S.length(); ++l) {
        Decomposition D = S.level(l);
        if (!holds_generators(P, D.p_keys())) rep.fail("level " + std::to_string(l) + ": p holds no generator");
        if (!check_decomposition(D).ok()) rep.fail("level " + std::to_string(l) + ": decomposition condition fails");
        bool ab = keys_abelian(P, D.t_keys());
        if (l < S.length() && ab) rep.fail("level " + std::to_string(l) + ": t is abelian before the last level");
        if (l == S.length() && require_complete && !ab) rep.fail("last level: t is not abelian");
    }
    return rep;
}

// -------------------------------------------------------------- builder

namespace {

std::vector<Key> span_keys(const std::vector<uint64_t> &basis) {
    auto e = gf2::span_elements(gf2::rref(basis));
    std::vector<Key> out(e.begin(), e.end());
    std::sort(out.begin(), out.end());
    return out;
}

// Forms whose common kernel is span(basis) inside Z_2^n.
std::vector<uint64_t> annihilating_forms(const std::vector<uint64_t> &basis, int n) {
    return gf2::annihilator(basis, n);
}

struct SeedSearch {
    const QAPartition &P;
    int n;
    int want_dim;
    std::vector<Key> nonnull;
    std::vector<uint64_t> best_seed;
    Key breaker = 0;

    // Smallest non-null key outside span(seed) whose addition breaks
    // commutativity; 0 when none exists.
    Key find_breaker(const std::vector<uint64_t> &seed) const {
        auto R = gf2::rref(seed);
        for (Key k : nonnull) {
            if (gf2::in_span(k, R)) continue;
            std::vector<uint64_t> b = seed;
            b.push_back(k);
            if (!keys_abelian(P, span_keys(b))) return k;
        }
        return 0;
    }

    bool dfs(std::vector<uint64_t> &seed, size_t start) {
        if (int(seed.size()) == want_dim) {
            Key k = find_breaker(seed);
            if (!k) return false;
            best_seed = seed;
            breaker = k;
            return true;
        }
        auto R = gf2::rref(seed);
        for (size_t j = start; j < nonnull.size(); ++j) {
            Key k = nonnull[j];
            if (gf2::in_span(k, R)) continue;
            seed.push_back(k);
            if (keys_abelian(P, span_keys(seed)) && dfs(seed, j + 1)) return true;
            seed.pop_back();
        }
        return false;
    }
};

}  // namespace

DecompositionSequence build_sequence(QAPPtr P, int target_length) {
    const int lo = min_sequence_length(*P), hi = max_sequence_length(*P);
    if (target_length < lo || target_length > hi) {
        throw BoundViolationError("build_sequence: length " + std::to_string(target_length) + " outside [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    const int n = P->key_bits();
    SeedSearch ss{*P, n, n - target_length, {}, {}, 0};
    for (Key k = 1; k < P->key_count(); ++k) {
        if (P->generator_count(k) > 0) ss.nonnull.push_back(k);
    }
    std::vector<uint64_t> seed;
    if (!ss.dfs(seed, 0)) {
        throw InternalConsistencyError("build_sequence: no abelian seed of the required order");
    }
    // Grow from the seed: chain[j] is a basis of t_[M-j].
    std::vector<std::vector<uint64_t>> chain;
    std::vector<uint64_t> cur = ss.best_seed;
    chain.push_back(cur);
    cur.push_back(ss.breaker);
    chain.push_back(cur);
    while (int(cur.size()) < n) {
        auto R = gf2::rref(cur);
        Key add = 0;
        for (Key k : ss.nonnull) {
            if (!gf2::in_span(k, R)) {
                add = k;
                break;
            }
        }
        if (!add) throw InternalConsistencyError("build_sequence: non-null keys do not span the key group");
        cur.push_back(add);
        chain.push_back(cur);
    }
    // Convert the subgroup chain into forms: the level-l form cuts t_[l]
    // out of t_[l-1].
    DecompositionSequence S;
    S.partition = P;
    std::vector<uint64_t> acc;
    for (int l = 1; l <= target_length; ++l) {
        const auto &sub = chain[size_t(target_length - l)];
        auto ann = annihilating_forms(sub, n);
        auto R = gf2::rref(acc);
        for (uint64_t f : ann) {
            if (!gf2::in_span(f, R)) {
                acc.push_back(f);
                break;
            }
        }
    }
    S.forms = acc;
    if (S.length() != target_length) throw InternalConsistencyError("build_sequence: chain conversion failed");
    S.annotate();
    return S;
}

// ------------------------------------------------------------- covering

CoveringResult covering_first_level(const Decomposition &D) {
    if (D.level() == 1) return {D, {}};
    auto forms = covering_forms(D);
    if (forms.empty()) throw InternalConsistencyError("covering_first_level: no covering form");
    Decomposition first{D.source, {forms.front()}, CartanType::Untyped};
    first.type = classify_level1(first);
    // Complete a basis of t_[l] to one of t_[1] with keys of t_[1].
    const int n = D.source->key_bits();
    auto tl = gf2::annihilator(D.forms, n);
    std::vector<Key> M;
    std::vector<uint64_t> basis = tl;
    for (Key k : first.t_keys()) {
        if (int(basis.size()) == n - 1) break;
        if (gf2::in_span(k, gf2::rref(basis))) continue;
        basis.push_back(k);
        M.push_back(k);
    }
    return {first, M};
}

// ------------------------------------------------------- same-type chain

namespace {

bool admits(const Decomposition &D, CartanType type) {
    try {
        return decide_type(D).admissible.count(type) > 0;
    } catch (const MalformedDecompositionError &) {
        return false;
    }
}

bool chain_dfs(const QAPartition &P, const std::vector<uint64_t> &pool, std::vector<uint64_t> &forms, size_t need,
               CartanType type, const QAPPtr &src, uint64_t last) {
    if (forms.size() == need) {
        std::vector<uint64_t> f = forms;
        f.push_back(last);
        Decomposition D{src, f, CartanType::Untyped};
        return admits(D, type);
    }
    auto R = gf2::rref(forms);
    for (uint64_t psi : pool) {
        if (gf2::reduce(psi, R) != psi || psi == 0) continue;
        forms.push_back(psi);
        Decomposition D{src, forms, CartanType::Untyped};
        bool ok = holds_generators(P, D.p_keys()) && admits(D, type);
        if (ok && chain_dfs(P, pool, forms, need, type, src, last)) return true;
        forms.pop_back();
    }
    return false;
}

}  // namespace

DecompositionSequence same_type_chain(const Decomposition &D, CartanType type) {
    if (!admits(D, type)) throw PreconditionError("same_type_chain: decomposition does not admit " + type_name(type));
    DecompositionSequence S;
    S.partition = D.source;
    if (D.level() == 1) {
        S.forms = D.forms;
        S.annotate();
        return S;
    }
    // Forms available for the upper levels: the span of D's upper forms, so
    // that the chain reaches exactly D's t_[l-1].
    std::vector<uint64_t> upper(D.forms.begin(), D.forms.end() - 1);
    auto pool_all = gf2::span_elements(gf2::rref(upper));
    std::vector<uint64_t> pool;
    for (uint64_t f : pool_all) {
        if (f) pool.push_back(f);
    }
    std::sort(pool.begin(), pool.end());
    std::vector<uint64_t> forms;
    if (!chain_dfs(*D.source, pool, forms, upper.size(), type, D.source, D.forms.back())) {
        throw PreconditionError("same_type_chain: no chain of type " + type_name(type));
    }
    forms.push_back(D.forms.back());
    S.forms = forms;
    S.annotate();
    return S;
}

// ------------------------------------------------------------- lifting

std::function<Key(Key)> key_projection(const QAPartition &fine, const QAPartition &coarse) {
    if (!(fine.cartan() == coarse.cartan())) throw ContainmentError("key_projection: different Cartan subalgebras");
    if (!coarse.center().contains(fine.center())) throw ContainmentError("key_projection: centers are not nested");
    const auto &old_rows = coarse.index_forms();
    const auto &new_rows = fine.index_forms();
    std::vector<uint64_t> T;
    for (uint64_t row : old_rows) T.push_back(gf2::coords(row, new_rows));
    const QAPartition *C = &coarse, *F = &fine;
    return [T, C, F](Key k) {
        uint64_t inew = F->key_i(k), iold = 0;
        for (uint64_t t : T) iold = (iold << 1) | uint64_t(__builtin_parityll(t & inew));
        return C->make_key(F->key_f(k), iold, F->key_eps(k));
    };
}

static uint64_t pull_back_form(uint64_t form, const QAPartition &fine, const std::function<Key(Key)> &proj) {
    uint64_t out = 0;
    for (int j = 0; j < fine.key_bits(); ++j) {
        if (__builtin_parityll(form & proj(Key(1) << j))) out |= uint64_t(1) << j;
    }
    return out;
}

Decomposition lift_rank(const Decomposition &D, const BiSubalgebra &target_center) {
    const QAPartition &P = *D.source;
    if (!P.center().contains(target_center)) throw ContainmentError("lift_rank: target center is not inside B^[r]");
    if (target_center == P.center()) return D;
    QAPPtr fine = build_qap(P.cartan(), target_center);
    auto proj = key_projection(*fine, P);
    Decomposition out{fine, {}, D.type};
    for (uint64_t f : D.forms) out.forms.push_back(pull_back_form(f, *fine, proj));
    if (out.t_generators() != D.t_generators() || out.p_generators() != D.p_generators()) {
        throw InternalConsistencyError("lift_rank: generator membership changed");
    }
    return out;
}

DecompositionSequence lift_rank(const DecompositionSequence &S, const BiSubalgebra &target_center) {
    DecompositionSequence out;
    Decomposition D = lift_rank(S.level(S.length()), target_center);
    out.partition = D.source;
    out.forms = D.forms;
    if (!S.types.empty()) out.annotate();
    return out;
}

// ------------------------------------------------------------ enumeration

static void enum_dfs(const Decomposition &D, std::vector<DecompositionSequence> &out, size_t limit) {
    if (limit && out.size() >= limit) return;
    const QAPartition &P = *D.source;
    if (keys_abelian(P, D.t_keys())) {
        out.push_back(DecompositionSequence{D.source, D.forms, {}});
        return;
    }
    for (const Decomposition &next : extend(D)) {
        // Canonical ordering of forms: each added form is the smallest
        // representative of its coset, so distinct chains appear once.
        enum_dfs(next, out, limit);
        if (limit && out.size() >= limit) return;
    }
}

std::vector<DecompositionSequence> enumerate_sequences(QAPPtr P, size_t limit) {
    std::vector<DecompositionSequence> out;
    for (const Decomposition &D : enumerate_decompositions(P)) {
        enum_dfs(D, out, limit);
        if (limit && out.size() >= limit) break;
    }
    return out;
}

}  // namespace qapkit
