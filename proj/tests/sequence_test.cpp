#include <gtest/gtest.h>

#include "oracles.hpp"
#include "qapkit/json_io.hpp"
#include "qapkit/sequence.hpp"

using namespace qapkit;

namespace {
BiSubalgebra center_of_rank(const BiSubalgebra &C, int r) {
    std::vector<uint64_t> rows(C.basis().begin() + r, C.basis().end());
    return BiSubalgebra(C.p(), rows);
}

bool abelian_oracle(int p, const std::vector<uint64_t> &gens) {
    for (uint64_t x : gens)
        for (uint64_t y : gens)
            if (!oracle::commute_bit(p, x, y)) return false;
    return true;
}

bool subset(const std::vector<uint64_t> &a, const std::vector<uint64_t> &b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

/// Structural check of a complete sequence straight from generator sets.
void expect_valid_chain(const DecompositionSequence &S) {
    const int p = S.partition->p();
    std::vector<uint64_t> prev;
    for (uint64_t x = 1; x < (uint64_t(1) << (2 * p)); ++x) prev.push_back(x);
    for (int l = 1; l <= S.length(); ++l) {
        auto D = S.level(l);
        auto t = D.t_generators(), pg = D.p_generators();
        EXPECT_FALSE(pg.empty()) << "level " << l;
        EXPECT_TRUE(subset(t, prev));
        EXPECT_TRUE(subset(pg, prev));
        EXPECT_EQ(t.size() + pg.size(), prev.size());
        if (l < S.length()) EXPECT_FALSE(abelian_oracle(p, t)) << "level " << l;
        prev = t;
    }
    EXPECT_TRUE(abelian_oracle(p, prev));
}
}  // namespace

TEST(Sequence, LengthBoundsAtP3) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(3);
    for (int r = 0; r <= 3; ++r) {
        auto P = build_qap(C, center_of_rank(C, r));
        EXPECT_EQ(min_sequence_length(*P), 3);
        EXPECT_EQ(max_sequence_length(*P), 3 + r);
        for (int M = 3; M <= 3 + r; ++M) {
            auto S = build_sequence(P, M);
            EXPECT_EQ(S.length(), M);
            auto rep = validate_sequence(S);
            EXPECT_TRUE(rep.ok) << (rep.failures.empty() ? "" : rep.failures[0]);
            expect_valid_chain(S);
        }
        EXPECT_THROW(build_sequence(P, 2), BoundViolationError);
        EXPECT_THROW(build_sequence(P, 4 + r), BoundViolationError);
    }
}

TEST(Sequence, NoAbelianFirstLevelAtP2) {
    // Every Cartan subalgebra and every rank: no level-1 t is abelian.
    size_t checked = 0;
    for (const auto &C : enumerate_all(2, 2)) {
        if (!is_cartan(C)) continue;
        for (int r = 0; r <= 2; ++r) {
            auto P = build_qap(C, center_of_rank(C, r));
            for (const auto &D : enumerate_decompositions(P)) {
                EXPECT_FALSE(abelian_oracle(2, D.t_generators()));
                EXPECT_FALSE(keys_abelian(*P, D.t_keys()));
                ++checked;
            }
        }
    }
    EXPECT_GT(checked, 0u);
}

TEST(Sequence, ExhaustiveLengthsStayWithinBoundsP2) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(2);
    for (int r = 0; r <= 2; ++r) {
        auto P = build_qap(C, center_of_rank(C, r));
        auto all = enumerate_sequences(P);
        ASSERT_FALSE(all.empty());
        std::set<int> lengths;
        for (auto &S : all) {
            lengths.insert(S.length());
            EXPECT_GE(S.length(), 2);
            EXPECT_LE(S.length(), 2 + r);
            EXPECT_TRUE(validate_sequence(S).ok);
        }
        EXPECT_EQ(*lengths.rbegin(), 2 + r);
        EXPECT_EQ(*lengths.begin(), 2);
    }
}

TEST(Sequence, KeysAbelianMatchesGenerators) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(3);
    auto P = build_qap(C, center_of_rank(C, 1));
    std::vector<Key> ckeys;
    for (Key k = 0; k < P->key_count(); ++k)
        if (!P->is_null(k) && P->cell_algebra(k) == C) ckeys.push_back(k);
    EXPECT_TRUE(keys_abelian(*P, ckeys));
    EXPECT_TRUE(generators_abelian(3, C.elements()));
    EXPECT_FALSE(generators_abelian(3, {oracle::label("000|001"), oracle::label("001|000")}));
}

TEST(Sequence, ExtendStopsAtAbelian) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(3);
    auto P = build_qap(C, C);
    auto S = build_sequence(P, 3);
    EXPECT_THROW(extend(S.level(3)), SequenceTerminal);
    for (const auto &E : extend(S.level(1))) {
        EXPECT_EQ(E.level(), 2);
        EXPECT_TRUE(subset(E.t_generators(), S.level(1).t_generators()));
    }
}

TEST(Sequence, CoveringAndSameTypeChains) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(3);
    auto P = build_qap(C, C);
    auto S = build_sequence(P, 3);
    S.annotate();
    ASSERT_EQ(S.types.size(), 3u);
    for (int l = 1; l <= 3; ++l) {
        auto D = S.level(l);
        auto cov = covering_first_level(D);
        EXPECT_EQ(cov.first.level(), 1);
        EXPECT_TRUE(subset(D.t_generators(), cov.first.t_generators()));
        EXPECT_TRUE(subset(D.p_generators(), cov.first.p_generators()));
        const auto &td = S.types[l - 1];
        EXPECT_TRUE(td.admissible.count(td.chosen));
        ASSERT_TRUE(td.witness.has_value());
        EXPECT_EQ(classify_level1(*td.witness), td.chosen);
        for (CartanType type : td.admissible) {
            auto chain = same_type_chain(D, type);
            EXPECT_EQ(chain.length(), l);
            EXPECT_TRUE(validate_sequence(chain, false).ok);
            EXPECT_EQ(chain.level(l).t_generators(), D.t_generators());
            chain.annotate();
            for (const auto &t : chain.types) EXPECT_TRUE(t.admissible.count(type));
        }
        for (CartanType type : {CartanType::AI, CartanType::AII, CartanType::AIII})
            if (!td.admissible.count(type)) EXPECT_THROW(same_type_chain(D, type), PreconditionError);
    }
}

TEST(Sequence, LiftRankKeepsGenerators) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(3);
    auto P = build_qap(C, C);
    auto S = build_sequence(P, 3);
    for (int r = 1; r <= 3; ++r) {
        auto L = lift_rank(S, center_of_rank(C, r));
        EXPECT_EQ(L.partition->rank(), r);
        ASSERT_EQ(L.length(), S.length());
        for (int l = 1; l <= S.length(); ++l) {
            EXPECT_EQ(L.level(l).t_generators(), S.level(l).t_generators());
            EXPECT_EQ(L.level(l).p_generators(), S.level(l).p_generators());
        }
        auto proj = key_projection(*L.partition, *P);
        for (uint64_t x = 1; x < 64; ++x) EXPECT_EQ(proj(L.partition->key_of(x)), P->key_of(x));
    }
    EXPECT_THROW(lift_rank(S.level(1), BiSubalgebra(3, {oracle::label("000|001")})), ContainmentError);
}

TEST(Sequence, JsonRoundTrip) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(3);
    auto S = build_sequence(build_qap(C, center_of_rank(C, 1)), 4);
    S.annotate();
    Json j = to_json(S);
    auto T = sequence_from_json(j);
    EXPECT_EQ(T.forms, S.forms);
    EXPECT_EQ(to_json(T), j);
    EXPECT_EQ(parse_table_text(render_sequence(S)), j);
}
