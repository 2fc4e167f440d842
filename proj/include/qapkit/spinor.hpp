// Spinor generators S^zeta_alpha of su(2^p) as packed 2p-bit labels.
#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace qapkit {

/// Largest number of qubits supported by the symbolic layer.
inline constexpr int kMaxQubits = 16;
/// Largest number of qubits for which dense matrices are realized.
inline constexpr int kMaxMatrixQubits = 5;

using CMat = Eigen::MatrixXcd;
using cplx = std::complex<double>;

class DimensionError : public std::invalid_argument {
   public:
    using std::invalid_argument::invalid_argument;
};

class CapacityError : public std::length_error {
   public:
    using std::length_error::length_error;
};

/// A generator S^zeta_alpha. Bit strings are most-significant-first: qubit 0
/// (the leftmost digit) lives in bit p-1 of `zeta` / `alpha`.
struct Spinor {
    int p = 1;
    uint32_t zeta = 0;
    uint32_t alpha = 0;

    Spinor() = default;
    Spinor(int p_, uint32_t zeta_, uint32_t alpha_);

    /// Packed 2p-bit label: zeta in the high p bits, alpha in the low p bits.
    uint64_t label() const { return (uint64_t(zeta) << p) | alpha; }
    static Spinor from_label(int p, uint64_t label);

    bool is_identity() const { return zeta == 0 && alpha == 0; }
    bool operator==(const Spinor &o) const = default;
    auto operator<=>(const Spinor &o) const = default;

    /// Text form `S[zeta|alpha]`.
    std::string str() const;
    static Spinor parse(const std::string &text);
};

/// Bi-addition: componentwise XOR.
Spinor bi_add(const Spinor &a, const Spinor &b);

/// 1 iff the two generators commute (zeta.beta + eta.alpha = 0 mod 2).
int commutes(const Spinor &a, const Spinor &b);

/// Parity tag eps = 1 xor (zeta.alpha mod 2).
int epsilon_parity(const Spinor &a);

/// Dense matrix realization (tensor product of I, Z, X, [[0,-i],[i,0]]).
CMat matrix_of(const Spinor &a);

// ---- label-level helpers shared by the symbolic modules ----

inline int parity64(uint64_t x) { return __builtin_parityll(x); }

/// Swap the zeta and alpha halves of a packed label.
inline uint64_t swap_halves(uint64_t x, int p) {
    uint64_t lo = (uint64_t(1) << p) - 1;
    return ((x & lo) << p) | (x >> p);
}

/// Symplectic form on packed labels; 1 means anticommuting.
inline int omega(uint64_t a, uint64_t b, int p) { return parity64(a & swap_halves(b, p)); }

/// zeta.alpha mod 2 of a packed label.
inline int zeta_dot_alpha(uint64_t x, int p) {
    uint64_t lo = (uint64_t(1) << p) - 1;
    return parity64((x >> p) & x & lo);
}

/// Bit string of `width` bits, most-significant-first.
std::string bits_to_string(uint64_t v, int width);
uint64_t string_to_bits(const std::string &s);

}  // namespace qapkit
