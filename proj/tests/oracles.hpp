// Test-side oracles: slow, direct re-implementations of the facts the library
// computes by linear algebra. They share no code with the library beyond the
// label packing convention.
#pragma once

#include <algorithm>
#include <complex>
#include <cstdint>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "json.hpp"

namespace oracle {

using cplx = std::complex<double>;
using Mat = Eigen::MatrixXcd;

/// Single-qubit factor for (z, a): I, Z, X, and the remaining Pauli.
inline Mat factor(int z, int a) {
    Mat m(2, 2);
    const cplx i(0, 1);
    if (!z && !a) m << 1, 0, 0, 1;
    if (z && !a) m << 1, 0, 0, -1;
    if (!z && a) m << 0, 1, 1, 0;
    if (z && a) m << 0, -i, i, 0;
    return m;
}

/// Kronecker product written out by index arithmetic.
inline Mat kron(const Mat &A, const Mat &B) {
    Mat K(A.rows() * B.rows(), A.cols() * B.cols());
    for (int r = 0; r < A.rows(); ++r)
        for (int c = 0; c < A.cols(); ++c)
            for (int u = 0; u < B.rows(); ++u)
                for (int v = 0; v < B.cols(); ++v) K(r * B.rows() + u, c * B.cols() + v) = A(r, c) * B(u, v);
    return K;
}

/// Pauli string of a packed label (zeta high bits, alpha low bits; qubit 0 = MSB).
inline Mat pauli(int p, uint64_t label) {
    Mat M = Mat::Identity(1, 1);
    for (int q = 0; q < p; ++q) {
        int bit = p - 1 - q;
        int z = int((label >> (p + bit)) & 1), a = int((label >> bit) & 1);
        M = kron(M, factor(z, a));
    }
    return M;
}

inline bool matrices_commute(const Mat &A, const Mat &B) { return (A * B - B * A).norm() < 1e-12; }

/// Span by repeated XOR closure (no echelon forms).
inline std::set<uint64_t> closure(const std::vector<uint64_t> &gens) {
    std::set<uint64_t> s{0};
    for (uint64_t g : gens) {
        std::set<uint64_t> add;
        for (uint64_t x : s) add.insert(x ^ g);
        s.insert(add.begin(), add.end());
    }
    return s;
}

inline int bit_parity(uint64_t x) {
    int c = 0;
    while (x) {
        c ^= int(x & 1);
        x >>= 1;
    }
    return c;
}

/// 1 iff the two labels commute, evaluated qubit by qubit.
inline int commute_bit(int p, uint64_t a, uint64_t b) {
    int s = 0;
    for (int q = 0; q < p; ++q) {
        int za = int((a >> (p + q)) & 1), aa = int((a >> q) & 1);
        int zb = int((b >> (p + q)) & 1), ab = int((b >> q) & 1);
        s ^= (za & ab) ^ (aa & zb);
    }
    return 1 - s;
}

/// All subsets of Z_2^width (width <= 4) closed under XOR, by brute force over
/// subsets. Returns them as sorted member sets.
inline std::vector<std::set<uint64_t>> all_subspaces_bruteforce(int width) {
    const uint64_t n = uint64_t(1) << width;
    std::vector<std::set<uint64_t>> out;
    for (uint64_t mask = 0; mask < (uint64_t(1) << n); ++mask) {
        if (!(mask & 1)) continue;  // must contain 0
        bool closed = true;
        for (uint64_t x = 0; x < n && closed; ++x) {
            if (!((mask >> x) & 1)) continue;
            for (uint64_t y = x + 1; y < n; ++y) {
                if (((mask >> y) & 1) && !((mask >> (x ^ y)) & 1)) {
                    closed = false;
                    break;
                }
            }
        }
        if (!closed) continue;
        std::set<uint64_t> s;
        for (uint64_t x = 0; x < n; ++x)
            if ((mask >> x) & 1) s.insert(x);
        out.push_back(s);
    }
    return out;
}

/// Number of k-dimensional subspaces of GF(2)^n, from the product formula.
inline uint64_t gaussian_binomial(int n, int k) {
    uint64_t num = 1, den = 1;
    for (int j = 0; j < k; ++j) {
        num *= (uint64_t(1) << (n - j)) - 1;
        den *= (uint64_t(1) << (j + 1)) - 1;
    }
    return num / den;
}

/// Parse "zzz|aaa" or "S[zzz|aaa]".
inline uint64_t label(const std::string &s0) {
    std::string s = s0;
    if (s.rfind("S[", 0) == 0) s = s.substr(2, s.size() - 3);
    auto bar = s.find('|');
    std::string z = s.substr(0, bar), a = s.substr(bar + 1);
    uint64_t v = 0;
    for (char c : z + a) v = (v << 1) | uint64_t(c == '1');
    return v;
}

inline nlohmann::json load_json(const std::string &path) {
    std::ifstream in(path);
    nlohmann::json j;
    in >> j;
    return j;
}

/// Real span dimension of a set of anti-Hermitian-type matrices (as real vectors).
inline int real_rank(const std::vector<Mat> &mats) {
    if (mats.empty()) return 0;
    const int n = int(mats[0].size());
    Eigen::MatrixXd A(2 * n, int(mats.size()));
    for (size_t c = 0; c < mats.size(); ++c) {
        for (int k = 0; k < n; ++k) {
            A(k, int(c)) = mats[c](k).real();
            A(n + k, int(c)) = mats[c](k).imag();
        }
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    lu.setThreshold(1e-9);
    return int(lu.rank());
}

}  // namespace oracle

#ifndef QAPKIT_DATA_DIR
#define QAPKIT_DATA_DIR "tests/data"
#endif
