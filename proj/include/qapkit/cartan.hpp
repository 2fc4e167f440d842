// Cartan decompositions generated from quotient-algebra partitions: maximal
// subgroups of the tri-addition group, the type-decision law, the divided
// partition of the rank-zero intrinsic QAP for su(m+n), and lambda rendering.
#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "qapkit/qap.hpp"

namespace qapkit {

enum class CartanType { AI, AII, AIII, Untyped };

std::string type_name(CartanType t);
CartanType parse_type(const std::string &s);

class MalformedDecompositionError : public std::logic_error {
   public:
    using std::logic_error::logic_error;
};

/// A decomposition of level l over a spinor QAP. The key subgroup t_[k] is
/// the common kernel of forms[0..k-1] (linear forms on packed keys); t_[l]
/// is the kernel of all forms and p_[l] = t_[l-1] - t_[l].
struct Decomposition {
    QAPPtr source;
    std::vector<uint64_t> forms;
    CartanType type = CartanType::Untyped;

    int level() const { return int(forms.size()); }
    bool in_t(Key k) const;           // k in t_[l]
    bool in_parent(Key k) const;      // k in t_[l-1] (everything at level 1)
    bool in_p(Key k) const { return in_parent(k) && !in_t(k); }
    std::vector<Key> t_keys() const;
    std::vector<Key> p_keys() const;
    /// Generator labels (identity excluded).
    std::vector<uint64_t> t_generators() const;
    std::vector<uint64_t> p_generators() const;
    /// The decomposition one level up (forms dropped by one); level >= 2.
    Decomposition parent() const;
};

/// An involutive automorphism realizing a level-1 split by a Pauli string:
/// inner: X -> P_h X P_h;  conj: U -> P_h conj(U) P_h^dagger.
struct PauliInvolution {
    bool conj = false;
    uint64_t h = 0;
};

/// Result of the four-clause decomposition check.
struct DecompositionCheck {
    bool tt = true, tp = true, pp = true, orth = true;
    bool ok() const { return tt && tp && pp && orth; }
    std::string str() const;
};

/// Level-1 decompositions: one per hyperplane of the key group whose t and p
/// both hold generators, ordered by the defining form.
std::vector<Decomposition> enumerate_decompositions(QAPPtr P);
/// Number of hyperplanes of the key group, 2^{p+r+1} - 1.
uint64_t hyperplane_count(const QAPartition &P);
Decomposition make_decomposition(QAPPtr P, std::vector<uint64_t> forms);

/// Generator-level check of [t,t]⊆t, [t,p]⊆p, [p,p]⊆t and Tr(t p) = 0.
DecompositionCheck check_decomposition(const Decomposition &D);
/// The same clauses evaluated on Pauli matrices (p <= 3 by default).
DecompositionCheck check_decomposition_matrix(const Decomposition &D, double tol = 1e-12);

enum class AbelianKind { Cartan, BiSubalgebra, Coset, Other };

struct AbelianSubalgebra {
    std::vector<uint64_t> generators;  // identity excluded, sorted
    AbelianKind kind = AbelianKind::Other;
    /// log2 of |A ∪ {0}| for subspaces, log2 |A| for cosets.
    int dim = 0;
    /// The bi-subalgebra spanned by A.
    BiSubalgebra span;
    std::string describe() const;
};

/// A maximum commuting set of generators of p_[l]; ties are broken toward
/// the largest overlap with the partition's Cartan subalgebra and then the
/// lexicographically smallest label list.
AbelianSubalgebra maximal_abelian_in_p(const Decomposition &D);
/// Maximum commuting subset of a generator set (exposed for tests).
std::vector<uint64_t> max_commuting_set(int p, const std::vector<uint64_t> &gens, const BiSubalgebra *prefer = nullptr);

/// Level-1 type law; throws MalformedDecompositionError when the abelian
/// subalgebra of p fits none of the three shapes.
CartanType classify_level1(const Decomposition &D);

struct TypeDecision {
    CartanType chosen = CartanType::Untyped;
    std::set<CartanType> admissible;
    /// For level 1 this is the decomposition itself; for higher levels the
    /// first covering level-1 decomposition with the chosen type.
    std::optional<Decomposition> witness;
};
TypeDecision decide_type(const Decomposition &D);

/// Level-1 forms phi whose split covers t_[l] and p_[l]: phi vanishes on
/// every non-null key of t_[l] and is 1 on every non-null key of p_[l].
std::vector<uint64_t> covering_forms(const Decomposition &D);

/// The Pauli involution realizing a level-1 form.
PauliInvolution involution_of(const QAPartition &P, uint64_t form);
/// True when the generator with this label is fixed by the involution
/// (that is, lies in t).
bool fixed_by(const PauliInvolution &inv, uint64_t label, int p);

// ----------------------------------------------------------- lambda generators

struct LambdaGen {
    enum Kind { Lambda, LambdaHat, Diag };
    Kind kind = Lambda;
    int k = 1, l = 2;  // 1-based, k < l
    bool operator==(const LambdaGen &) const = default;
    auto operator<=>(const LambdaGen &) const = default;
    std::string str(int N) const;
};

CMat matrix_of(const LambdaGen &g, int N);

/// Divided partition of the rank-zero intrinsic QAP for su(m+n), m+n = 2^p.
/// Keys pack (gamma, kappa, eps) as (gamma << 2) | (kappa << 1) | eps.
class DividedQAP {
   public:
    DividedQAP(int p, int m, int n);
    int p() const { return p_; }
    int m() const { return m_; }
    int n() const { return n_; }
    int N() const { return m_ + n_; }
    uint32_t key_count() const { return uint32_t(1) << (p_ + 2); }
    static uint32_t make_key(uint64_t gamma, int kappa, int eps) {
        return uint32_t((gamma << 2) | (uint64_t(kappa & 1) << 1) | uint64_t(eps & 1));
    }
    static uint64_t key_gamma(uint32_t k) { return k >> 2; }
    static int key_kappa(uint32_t k) { return int((k >> 1) & 1); }
    static int key_eps(uint32_t k) { return int(k & 1); }
    const std::vector<LambdaGen> &members(uint32_t k) const { return cells_.at(k); }
    bool is_null(uint32_t k) const { return members(k).empty(); }
    std::string key_name(uint32_t k) const;
    /// Tri-addition closure on matrices: the commutator of any two cell
    /// generators lies in the span of the tri-added cell.
    ValidationReport validate(double tol = 1e-10) const;

   private:
    int p_, m_, n_;
    std::vector<std::vector<LambdaGen>> cells_;
};

DividedQAP divide_intrinsic(const QAPartition &P, int m, int n);

struct DividedDecomposition {
    const DividedQAP *div = nullptr;
    uint32_t form = 0;  // t = kernel of the form on divided keys
    int m_prime = 0, n_prime = 0;
    CartanType type = CartanType::AIII;
    std::vector<uint32_t> t_keys() const;
    std::vector<uint32_t> p_keys() const;
    std::vector<LambdaGen> t_generators() const;
    std::vector<LambdaGen> p_generators() const;
    /// Block membership s(k) in {0,1} of basis state k (1-based).
    int block_of(int k) const;
    /// Matrix-level four-clause check.
    DecompositionCheck check(double tol = 1e-10) const;
};

DividedDecomposition intrinsic_aiii_t(const DividedQAP &div);
DividedDecomposition nonintrinsic_aiii(const DividedQAP &div, int l);

/// Lambda rendering of a set of spinor generators: returns the matching
/// lambda list when the span coincides with one (diagonal part rendered as
/// "C_[0]" when the whole diagonal is present), otherwise std::nullopt.
std::optional<std::vector<std::string>> lambda_render_labels(int p, const std::vector<uint64_t> &labels);
/// Text rendering with spinor fallback.
std::string lambda_render(int p, const std::vector<uint64_t> &labels);
std::string lambda_render(const std::vector<LambdaGen> &gens, int N);
/// Components: the lambda generators whose span equals the cell of a rank-0
/// intrinsic QAP with the given key data.
std::vector<LambdaGen> lambda_cell(int p, uint64_t gamma, int eps);

}  // namespace qapkit
