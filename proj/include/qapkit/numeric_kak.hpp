// Numeric KAK factorizations: the three intrinsic types (spectral / symplectic
// / cosine-sine), metric residuals, Clifford conjugators to the diagonal frame,
// a type-agnostic solver for nested fixed-point subgroups, recursive
// factorization down a decomposition sequence, and the unitarity-trick check.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "qapkit/sequence.hpp"

namespace qapkit {

class NumericFailure : public std::runtime_error {
   public:
    NumericFailure(const std::string &what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
    double residual() const { return residual_; }

   private:
    double residual_;
};

struct KAKOptions {
    uint64_t seed = 0x5eed;
    double tol = 1e-9;     // metric-constraint tolerance
    int max_attempts = 8;  // reseeded retries for degenerate spectra
};

struct KAKResult {
    CartanType type = CartanType::Untyped;
    int m = 0, n = 0;  // block sizes (AIII)
    CMat K0, A, K1;
    /// Scalar split off before factoring (U / phase has unit determinant). A
    /// carries it back, so U = K0 A K1 holds directly.
    cplx phase{1.0, 0.0};
    double recomposition = 0;  // ||U - K0 A K1||_F
    double metric_k0 = 0, metric_k1 = 0;
    int attempts = 1;
};

/// Metric matrices: MI = I, MII = [[0, I], [-I, 0]], MIII = diag(+1 x m, -1 x n).
CMat metric_matrix(CartanType type, int N, int m = -1);
/// ||K K^T - I||, ||K J K^T J^T - I|| or ||K I_mn K^dagger I_mn - I|| (Frobenius).
double metric_residual(const CMat &K, CartanType type, int m = -1);

KAKResult kak_ai(const CMat &U, const KAKOptions &opt = {});
KAKResult kak_aii(const CMat &U, const KAKOptions &opt = {});
KAKResult kak_aiii(const CMat &U, int m, int n, const KAKOptions &opt = {});
KAKResult kak(const CMat &U, CartanType type, int m = -1, int n = -1, const KAKOptions &opt = {});

/// Haar-random unitary (QR of a complex Gaussian with phase fix); the
/// special variant is rescaled to unit determinant.
CMat haar_unitary(int N, std::mt19937_64 &rng);
CMat haar_special_unitary(int N, std::mt19937_64 &rng);

/// Matrix of a Pauli label (cached per p).
const CMat &pauli_matrix(int p, uint64_t label);
/// Real coefficients y_g of an anti-Hermitian X = sum_g i y_g P_g (identity
/// included at index 0).
std::vector<double> pauli_coefficients(const CMat &X, int p);
/// exp of an anti-Hermitian matrix via the Hermitian eigensolver.
CMat expm_skew(const CMat &X);

/// Clifford unitary built from symplectic transvections x -> x + omega(x,g) g,
/// each realized as (I + i P_g) / sqrt(2).
struct CliffordConjugator {
    int p = 0;
    std::vector<uint64_t> transvections;  // applied first to last
    CMat Q;
    /// The GF(2) image of a label under the map.
    uint64_t apply(uint64_t label) const;
};

/// Q with Q c Q^dagger diagonal for every c in the Cartan subalgebra C.
CliffordConjugator synthesize_conjugator(const BiSubalgebra &C);
/// Clifford map sending one label to another (both non-identity).
CliffordConjugator clifford_mapping(int p, uint64_t from, uint64_t to);

/// Apply a Pauli involution to a group element.
CMat apply_involution(const PauliInvolution &inv, const CMat &U, int p);

/// Frame change for a level-1 involution: Q U Q^dagger turns the involution
/// into the intrinsic one of the returned type (AIII with m = n = N/2 for
/// inner involutions, AI / AII for conjugation involutions).
struct IntrinsicFrame {
    CartanType type = CartanType::Untyped;
    CMat Q;
};
IntrinsicFrame intrinsic_frame(const PauliInvolution &inv, int p, const KAKOptions &opt = {});

/// Factorization K = K0 A K1 of an element of the common fixed group of
/// involutions[0..l-2] with respect to involutions[l-1]: K0 in exp(t),
/// A in exp(a), K1 fixed by every involution.
struct SubgroupKAK {
    CMat K0, A, K1;
    double recomposition = 0;
    double constraint = 0;  // max over involutions of ||theta(K1) - K1||, same for K0
    double component_defect = 0;  // distance of log K1 from t (0: identity component)
    int iterations = 0;
    int attempts = 0;
};
SubgroupKAK kak_in_subgroup(const CMat &K, int p, const std::vector<PauliInvolution> &involutions,
                            const std::vector<uint64_t> &t_labels, const std::vector<uint64_t> &a_labels,
                            const KAKOptions &opt = {});

/// Norm of the Pauli coefficients of the principal logarithm of K outside
/// t (identity excluded): zero certifies K in exp(t) up to a scalar.
double identity_component_defect(const CMat &K, int p, const std::vector<uint64_t> &t_labels);

/// K_[l],s nodes (s a bit string of length l) and A_[l],s factors
/// (s of length l, level l < depth), with K_[l-1],s = K_[l],s0 A_[l-1],s K_[l],s1.
struct FactorTree {
    int p = 0;
    int depth = 0;
    CMat root;
    std::vector<std::vector<CMat>> K;  // K[l][index of s], l = 0..depth
    std::vector<std::vector<CMat>> A;  // A[l][index of s], l = 0..depth-1
    std::vector<std::vector<double>> node_constraint;  // per K node
    std::vector<std::string> level_types;              // admissible-type summary per level
    bool ok = true;
    std::string failure;
    int failed_level = 0;

    /// Bit-string label s of node index j at level l (MSB = first split).
    static std::string index_string(int l, size_t j);
    CMat recompose() const;
    double recomposition_residual() const;
    double max_constraint_residual() const;
    size_t leaf_count() const { return K.empty() ? 0 : K.back().size(); }
    size_t a_factor_count() const;
};

FactorTree factorize_sequence(const CMat &U, const DecompositionSequence &seq, const KAKOptions &opt = {});

/// Bracket table of t + i p on matrices: [t,t] in t, [t, ip] in ip,
/// [ip, ip] in t (real spans).
struct WeylCheck {
    bool tt = true, tp = true, pp = true;
    double max_violation = 0;
    bool ok() const { return tt && tp && pp; }
};
WeylCheck weyl_trick(const Decomposition &D);
WeylCheck weyl_trick(const DividedDecomposition &D);
WeylCheck weyl_trick_matrices(const std::vector<CMat> &t_basis, const std::vector<CMat> &p_basis);

/// Matrix text format: line 1 `N`, then N rows of N literals `a+bi`.
CMat read_matrix(std::istream &in);
CMat read_matrix_file(const std::string &path);
void write_matrix(std::ostream &out, const CMat &M);
std::string format_complex(cplx z);
cplx parse_complex(const std::string &s);

}  // namespace qapkit
