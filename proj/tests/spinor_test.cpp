#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "qapkit/spinor.hpp"

using namespace qapkit;

TEST(Spinor, ParseAndPrintRoundTrip) {
    Spinor s = Spinor::parse("S[101|110]");
    EXPECT_EQ(s.p, 3);
    EXPECT_EQ(s.zeta, 0b101u);
    EXPECT_EQ(s.alpha, 0b110u);
    EXPECT_EQ(s.str(), "S[101|110]");
    EXPECT_EQ(Spinor::from_label(3, s.label()), s);
}

TEST(Spinor, ParserRejectsMalformedText) {
    EXPECT_THROW(Spinor::parse("101|110"), std::invalid_argument);
    EXPECT_THROW(Spinor::parse("S[101|11]"), DimensionError);
    EXPECT_THROW(Spinor::parse("S[|]"), std::invalid_argument);
}

TEST(Spinor, BiAdditionExamples) {
    EXPECT_EQ(bi_add(Spinor::parse("S[011|010]"), Spinor::parse("S[110|100]")), Spinor::parse("S[101|110]"));
    EXPECT_EQ(bi_add(Spinor::parse("S[101|110]"), Spinor::parse("S[101|110]")), Spinor::parse("S[000|000]"));
    EXPECT_EQ(bi_add(Spinor::parse("S[000|000]"), Spinor::parse("S[111|001]")), Spinor::parse("S[111|001]"));
    EXPECT_THROW(bi_add(Spinor::parse("S[1|0]"), Spinor::parse("S[10|00]")), DimensionError);
}

TEST(Spinor, BiAdditionGroupAxiomsExhaustiveP2) {
    const int p = 2;
    for (uint64_t a = 0; a < 16; ++a) {
        Spinor A = Spinor::from_label(p, a);
        EXPECT_EQ(bi_add(A, A).label(), 0u);
        EXPECT_EQ(bi_add(A, Spinor(p, 0, 0)), A);
        for (uint64_t b = 0; b < 16; ++b) {
            Spinor B = Spinor::from_label(p, b);
            EXPECT_EQ(bi_add(A, B), bi_add(B, A));
            EXPECT_EQ(bi_add(A, B).label(), a ^ b);  // isomorphism onto Z_2^{2p}
            for (uint64_t c = 0; c < 16; ++c) {
                Spinor Cc = Spinor::from_label(p, c);
                EXPECT_EQ(bi_add(bi_add(A, B), Cc), bi_add(A, bi_add(B, Cc)));
            }
        }
    }
}

TEST(Spinor, CommutesExamples) {
    EXPECT_EQ(commutes(Spinor::parse("S[1|0]"), Spinor::parse("S[0|1]")), 0);
    std::vector<std::string> W = {"S[000|001]", "S[010|001]", "S[100|001]", "S[110|001]"};
    std::vector<std::string> B = {"S[000|000]", "S[010|000]", "S[100|000]", "S[110|000]"};
    for (const auto &w : W)
        for (const auto &b : B) EXPECT_EQ(commutes(Spinor::parse(w), Spinor::parse(b)), 1) << w << " " << b;
    for (uint64_t b = 0; b < 64; ++b) EXPECT_EQ(commutes(Spinor(3, 0, 0), Spinor::from_label(3, b)), 1);
}

TEST(Spinor, CommutesMatchesMatrixOracleAllPairsP3) {
    const int p = 3;
    std::vector<oracle::Mat> mats;
    for (uint64_t a = 0; a < 64; ++a) mats.push_back(oracle::pauli(p, a));
    for (uint64_t a = 0; a < 64; ++a) {
        for (uint64_t b = 0; b < 64; ++b) {
            int c = commutes(Spinor::from_label(p, a), Spinor::from_label(p, b));
            ASSERT_EQ(c, oracle::matrices_commute(mats[a], mats[b]) ? 1 : 0) << a << " " << b;
            ASSERT_EQ(c, oracle::commute_bit(p, a, b));
            ASSERT_EQ(omega(a, b, p), 1 - c);
        }
    }
}

TEST(Spinor, EpsilonParityExamplesAndAdditivity) {
    EXPECT_EQ(epsilon_parity(Spinor::parse("S[000|001]")), 1);
    EXPECT_EQ(epsilon_parity(Spinor::parse("S[001|001]")), 0);
    EXPECT_EQ(epsilon_parity(Spinor::parse("S[000|000]")), 1);
    const int p = 3;
    for (uint64_t a = 0; a < 64; ++a) {
        for (uint64_t b = 0; b < 64; ++b) {
            Spinor A = Spinor::from_label(p, a), B = Spinor::from_label(p, b);
            if (commutes(A, B)) continue;
            EXPECT_EQ(epsilon_parity(bi_add(A, B)), epsilon_parity(A) ^ epsilon_parity(B));
        }
    }
}

TEST(Spinor, EpsilonMatchesSymmetryOfMatrix) {
    // eps = 1 exactly for real symmetric Pauli strings (even number of Y factors).
    const int p = 3;
    for (uint64_t a = 0; a < 64; ++a) {
        oracle::Mat M = oracle::pauli(p, a);
        bool symmetric = (M - M.transpose()).norm() < 1e-12;
        EXPECT_EQ(epsilon_parity(Spinor::from_label(p, a)), symmetric ? 1 : 0);
    }
}

TEST(Spinor, MatrixRealization) {
    EXPECT_TRUE(matrix_of(Spinor(3, 0, 0)).isApprox(CMat::Identity(8, 8)));
    CMat Z1 = matrix_of(Spinor::parse("S[100|000]"));
    Eigen::VectorXcd d(8);
    d << 1, 1, 1, 1, -1, -1, -1, -1;
    EXPECT_TRUE(Z1.isApprox(CMat(d.asDiagonal())));
    std::mt19937_64 rng(5);
    for (int t = 0; t < 200; ++t) {
        uint64_t a = rng() & 63, b = rng() & 63;
        CMat A = matrix_of(Spinor::from_label(3, a)), B = matrix_of(Spinor::from_label(3, b));
        EXPECT_TRUE(A.isApprox(oracle::pauli(3, a)));
        // Product is a phase times the bi-added generator.
        CMat AB = A * B, S = matrix_of(Spinor::from_label(3, a ^ b));
        cplx ph = (S.adjoint() * AB).trace() / 8.0;
        EXPECT_NEAR(std::abs(ph), 1.0, 1e-12);
        EXPECT_TRUE(AB.isApprox(ph * S));
        // Monomial: one nonzero per row, entries in {±1, ±i}.
        for (int r = 0; r < 8; ++r) {
            int nz = 0;
            for (int c = 0; c < 8; ++c) {
                if (std::abs(A(r, c)) > 0.5) {
                    ++nz;
                    EXPECT_NEAR(std::abs(A(r, c)), 1.0, 1e-15);
                }
            }
            EXPECT_EQ(nz, 1);
        }
    }
}

TEST(Spinor, MatrixCapacity) {
    EXPECT_THROW(matrix_of(Spinor(kMaxMatrixQubits + 1, 0, 0)), CapacityError);
}
