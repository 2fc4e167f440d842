#include <gtest/gtest.h>

#include <map>
#include <random>

#include "oracles.hpp"
#include "qapkit/bisubalgebra.hpp"

using namespace qapkit;

namespace {
uint64_t L(const char *s) { return Spinor::parse(s).label(); }

std::set<uint64_t> as_set(const BiSubalgebra &B) {
    auto e = B.elements();
    return {e.begin(), e.end()};
}

BiSubalgebra random_bisubalgebra(int p, std::mt19937_64 &rng) {
    const uint64_t mask = (uint64_t(1) << (2 * p)) - 1;
    int d = int(rng() % uint64_t(2 * p + 1));
    std::vector<uint64_t> g;
    for (int k = 0; k < d; ++k) g.push_back(rng() & mask);
    return BiSubalgebra(p, g);
}
}  // namespace

TEST(BiSubalgebra, SpanExamples) {
    BiSubalgebra C = span_of(3, {Spinor::parse("S[100|000]"), Spinor::parse("S[010|000]"), Spinor::parse("S[001|000]")});
    EXPECT_EQ(C, BiSubalgebra::intrinsic_cartan(3));
    EXPECT_EQ(C.size(), 8u);
    EXPECT_EQ(C.order(), 3);
    BiSubalgebra I = span_of(3, {});
    EXPECT_EQ(I.elements(), std::vector<uint64_t>{0});
    EXPECT_EQ(I.order(), 6);
    BiSubalgebra one = span_of(3, {Spinor::parse("S[000|001]")});
    EXPECT_EQ(one.elements(), (std::vector<uint64_t>{0, L("S[000|001]")}));
    EXPECT_EQ(one.order(), 5);
}

TEST(BiSubalgebra, SpanMatchesClosureOracleAndCountLaw) {
    std::mt19937_64 rng(21);
    for (int t = 0; t < 300; ++t) {
        int p = 2 + int(rng() % 2);
        const uint64_t mask = (uint64_t(1) << (2 * p)) - 1;
        std::vector<uint64_t> g;
        for (int k = int(rng() % 6); k > 0; --k) g.push_back(rng() & mask);
        BiSubalgebra B(p, g);
        EXPECT_EQ(as_set(B), oracle::closure(g));
        EXPECT_EQ(B.elements().size(), uint64_t(1) << (2 * p - B.order()));
    }
}

TEST(BiSubalgebra, EnumerationCountsAreGaussianBinomialsAndBruteForce) {
    // p = 2: brute force over all subsets of Z_2^4.
    auto brute = oracle::all_subspaces_bruteforce(4);
    EXPECT_EQ(brute.size(), 67u);
    std::map<size_t, size_t> by_size;
    for (const auto &s : brute) ++by_size[s.size()];
    size_t total = 0;
    for (int order = 0; order <= 4; ++order) {
        auto all = enumerate_all(2, order);
        EXPECT_EQ(all.size(), oracle::gaussian_binomial(4, 4 - order));
        EXPECT_EQ(all.size(), by_size[size_t(1) << (4 - order)]);
        std::set<std::set<uint64_t>> ours;
        for (const auto &B : all) ours.insert(as_set(B));
        EXPECT_EQ(ours.size(), all.size());  // no duplicates
        for (const auto &s : ours) EXPECT_NE(std::find(brute.begin(), brute.end(), s), brute.end());
        total += all.size();
    }
    EXPECT_EQ(total, 67u);
    EXPECT_EQ(enumerate_all(2, 2).size(), 35u);
    EXPECT_EQ(enumerate_all(2, 4).size(), 1u);
    for (int order = 0; order <= 6; ++order) {
        EXPECT_EQ(enumerate_all(3, order).size(), oracle::gaussian_binomial(6, 6 - order));
    }
}

TEST(BiSubalgebra, EnumerationIsCanonicallyOrdered) {
    auto a = enumerate_all(3, 3), b = enumerate_all(3, 3);
    ASSERT_EQ(a, b);
    for (size_t k = 1; k < a.size(); ++k) EXPECT_TRUE(a[k - 1] < a[k]);
}

TEST(BiSubalgebra, SqcapExamplesAndGroupTable) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(3);
    BiSubalgebra B001(3, {L("S[010|000]"), L("S[100|000]")});
    BiSubalgebra B010(3, {L("S[001|000]"), L("S[100|000]")});
    BiSubalgebra B011(3, {L("S[011|000]"), L("S[100|000]")});
    EXPECT_EQ(sqcap(B001, B010, C), B011);
    EXPECT_EQ(sqcap(B001, B001, C), C);
    EXPECT_THROW(sqcap(BiSubalgebra(3, {L("S[100|000]")}), B001, C), PreconditionError);

    // Exhaustive p = 2: the ⊓ table on G(C_[0]) is the table of Z_2^2, by
    // direct set construction (B1 ∩ B2) ∪ (B1^c ∩ B2^c).
    BiSubalgebra C2 = BiSubalgebra::intrinsic_cartan(2);
    MaximalBiSubalgebraGroup G(C2);
    ASSERT_EQ(G.count(), 4u);
    auto pc = as_set(C2);
    for (uint64_t i = 0; i < 4; ++i) {
        for (uint64_t j = 0; j < 4; ++j) {
            if (i == 0 || j == 0) continue;
            auto s1 = as_set(G.member(i)), s2 = as_set(G.member(j));
            std::set<uint64_t> third;
            for (uint64_t x : pc) {
                bool in1 = s1.count(x), in2 = s2.count(x);
                if (in1 == in2) third.insert(x);
            }
            EXPECT_EQ(as_set(G.member(i ^ j)), third);
            EXPECT_EQ(sqcap(G.member(i), G.member(j), C2), G.member(i ^ j));
        }
    }
}

TEST(BiSubalgebra, EnumerateMaximalExamples) {
    MaximalBiSubalgebraGroup G(BiSubalgebra::full(2));
    EXPECT_EQ(G.count() - 1, 15u);
    std::set<std::set<uint64_t>> seen;
    for (uint64_t i = 1; i < G.count(); ++i) {
        EXPECT_EQ(G.member(i).size(), 8u);
        seen.insert(as_set(G.member(i)));
    }
    EXPECT_EQ(seen.size(), 15u);

    MaximalBiSubalgebraGroup GC(BiSubalgebra::intrinsic_cartan(3));
    EXPECT_EQ(GC.count(), 8u);
    for (uint64_t i = 1; i < 8; ++i) {
        // B_gamma: diagonal generators S^nu_0 with nu . gamma = 0.
        std::set<uint64_t> expect;
        for (uint64_t nu = 0; nu < 8; ++nu)
            if (!oracle::bit_parity(nu & i)) expect.insert(nu << 3);
        EXPECT_EQ(as_set(GC.member(i)), expect) << i;
        EXPECT_EQ(GC.index_of(GC.member(i)), i);
    }

    MaximalBiSubalgebraGroup G1(BiSubalgebra(3, {L("S[000|001]")}));
    EXPECT_EQ(G1.count(), 2u);
    EXPECT_EQ(G1.member(1).elements(), std::vector<uint64_t>{0});
    EXPECT_THROW(enumerate_maximal(BiSubalgebra::identity(3)), PreconditionError);
}

TEST(BiSubalgebra, CommutantExamplesAndOrderDuality) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(3);
    EXPECT_EQ(commutant(C), C);
    EXPECT_EQ(commutant(BiSubalgebra::full(3)), BiSubalgebra::identity(3));
    EXPECT_EQ(commutant(BiSubalgebra(3, {L("S[100|000]")})).size(), 32u);
    // Brute-force commutant and order duality over every bi-subalgebra of su(4).
    for (int order = 0; order <= 4; ++order) {
        for (const auto &B : enumerate_all(2, order)) {
            std::set<uint64_t> brute;
            for (uint64_t x = 0; x < 16; ++x) {
                bool all = true;
                for (uint64_t b : B.elements()) all = all && oracle::commute_bit(2, x, b);
                if (all) brute.insert(x);
            }
            BiSubalgebra K = commutant(B);
            EXPECT_EQ(as_set(K), brute);
            EXPECT_EQ(K.order(), 4 - B.order());
            EXPECT_TRUE(commutant(K).contains(B));
        }
    }
    std::mt19937_64 rng(22);
    for (int t = 0; t < 200; ++t) {
        BiSubalgebra B = random_bisubalgebra(3, rng);
        EXPECT_EQ(commutant(B).order(), 6 - B.order());
        EXPECT_EQ(commutant(commutant(B)), B);
    }
}

TEST(BiSubalgebra, StabilizerExamples) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(3);
    BiSubalgebra B001(3, {L("S[010|000]"), L("S[100|000]")});
    EXPECT_EQ(stabilizer_of(Spinor::parse("S[000|001]"), C), B001);
    EXPECT_EQ(stabilizer_of(Spinor(3, 0, 0), C), C);
    // Exhaustive p=2: for non-central a, exactly half of C_[0] commutes with a,
    // and everything outside the stabilizer anticommutes.
    BiSubalgebra C2 = BiSubalgebra::intrinsic_cartan(2);
    for (uint64_t a = 0; a < 16; ++a) {
        BiSubalgebra S = stabilizer_of(Spinor::from_label(2, a), C2);
        size_t commuting = 0;
        for (uint64_t c : C2.elements()) {
            bool com = oracle::commute_bit(2, a, c);
            commuting += com;
            EXPECT_EQ(S.contains(c), com);
        }
        if ((a & 3) == 0) {
            EXPECT_EQ(commuting, 4u);  // diagonal a commutes with all of C_[0]
        } else {
            EXPECT_EQ(commuting, 2u);
        }
    }
}

TEST(BiSubalgebra, AbelianExamples) {
    EXPECT_TRUE(is_abelian(BiSubalgebra::intrinsic_cartan(3)));
    EXPECT_TRUE(is_cartan(BiSubalgebra::intrinsic_cartan(3)));
    EXPECT_FALSE(is_abelian(BiSubalgebra::full(3)));
    EXPECT_FALSE(is_abelian(BiSubalgebra(3, {L("S[100|000]"), L("S[000|100]")})));
    // Every bi-subalgebra of order < p is nonabelian (exhaustive p = 2, 3).
    for (int p = 2; p <= 3; ++p)
        for (int r = 0; r < p; ++r)
            for (const auto &B : enumerate_all(p, r)) EXPECT_FALSE(is_abelian(B));
}

TEST(BiSubalgebra, CosetsExamples) {
    BiSubalgebra C = BiSubalgebra::intrinsic_cartan(3);
    auto cos = cosets_of(C);
    ASSERT_EQ(cos.size(), 8u);
    std::set<uint64_t> cover;
    for (const auto &c : cos) {
        EXPECT_EQ(c.size(), 8u);
        cover.insert(c.begin(), c.end());
    }
    EXPECT_EQ(cover.size(), 64u);
    EXPECT_EQ(cosets_of(BiSubalgebra::full(3)).size(), 1u);
    BiSubalgebra B100(3, {L("S[010|000]"), L("S[001|000]")});
    auto c2 = cosets_of(B100);
    std::vector<uint64_t> want = {L("S[100|000]"), L("S[101|000]"), L("S[110|000]"), L("S[111|000]")};
    EXPECT_NE(std::find(c2.begin(), c2.end(), want), c2.end());
    // Index additivity: B^[r,i] ⋄ B^[r,j] ⊆ B^[r,i+j].
    for (size_t i = 0; i < c2.size(); ++i)
        for (size_t j = 0; j < c2.size(); ++j)
            for (uint64_t x : c2[i])
                for (uint64_t y : c2[j]) EXPECT_EQ(coset_index(x ^ y, B100), i ^ j);
}

TEST(BiSubalgebra, AbelianExtendsToCartan) {
    for (int r = 2; r <= 4; ++r) {
        for (const auto &B : enumerate_all(2, r)) {
            if (!is_abelian(B)) continue;
            BiSubalgebra C = extend_to_cartan(B);
            EXPECT_TRUE(is_cartan(C));
            EXPECT_TRUE(C.contains(B));
        }
    }
    EXPECT_THROW(extend_to_cartan(BiSubalgebra::full(2)), PreconditionError);
}
