#include "qapkit/cartan.hpp"

#include <algorithm>
#include <bitset>
#include <map>
#include <sstream>

#include "qapkit/gf2.hpp"

namespace qapkit {

std::string type_name(CartanType t) {
    switch (t) {
        case CartanType::AI:
            return "AI";
        case CartanType::AII:
            return "AII";
        case CartanType::AIII:
            return "AIII";
        default:
            return "untyped";
    }
}

CartanType parse_type(const std::string &s) {
    if (s == "AI") return CartanType::AI;
    if (s == "AII") return CartanType::AII;
    if (s == "AIII") return CartanType::AIII;
    throw std::invalid_argument("unknown Cartan type: " + s);
}

// -------------------------------------------------------------- Decomposition

bool Decomposition::in_t(Key k) const {
    for (uint64_t f : forms) {
        if (__builtin_parityll(f & k)) return false;
    }
    return true;
}

bool Decomposition::in_parent(Key k) const {
    for (size_t j = 0; j + 1 < forms.size(); ++j) {
        if (__builtin_parityll(forms[j] & k)) return false;
    }
    return true;
}

std::vector<Key> Decomposition::t_keys() const {
    std::vector<Key> out;
    for (Key k = 0; k < source->key_count(); ++k) {
        if (in_t(k)) out.push_back(k);
    }
    return out;
}

std::vector<Key> Decomposition::p_keys() const {
    std::vector<Key> out;
    for (Key k = 0; k < source->key_count(); ++k) {
        if (in_p(k)) out.push_back(k);
    }
    return out;
}

static std::vector<uint64_t> generators_of(const QAPartition &P, const std::vector<Key> &keys) {
    std::vector<uint64_t> out;
    for (Key k : keys) {
        for (uint64_t a : P.members(k)) {
            if (a) out.push_back(a);
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<uint64_t> Decomposition::t_generators() const { return generators_of(*source, t_keys()); }
std::vector<uint64_t> Decomposition::p_generators() const { return generators_of(*source, p_keys()); }

Decomposition Decomposition::parent() const {
    if (level() < 2) throw PreconditionError("parent: level-1 decomposition has no parent");
    Decomposition d{source, std::vector<uint64_t>(forms.begin(), forms.end() - 1), CartanType::Untyped};
    return d;
}

std::string DecompositionCheck::str() const {
    std::string s;
    s += std::string("[t,t]⊆t:") + (tt ? "ok" : "FAIL");
    s += std::string(" [t,p]⊆p:") + (tp ? "ok" : "FAIL");
    s += std::string(" [p,p]⊆t:") + (pp ? "ok" : "FAIL");
    s += std::string(" Tr(tp)=0:") + (orth ? "ok" : "FAIL");
    return s;
}

uint64_t hyperplane_count(const QAPartition &P) { return uint64_t(P.key_count()) - 1; }

Decomposition make_decomposition(QAPPtr P, std::vector<uint64_t> forms) {
    const uint64_t mask = P->key_count() - 1;
    for (uint64_t f : forms) {
        if (f == 0 || (f & ~mask)) throw KeyError("make_decomposition: form outside the key group");
    }
    if (gf2::rank(forms) != int(forms.size())) throw PreconditionError("make_decomposition: dependent forms");
    Decomposition d{std::move(P), std::move(forms), CartanType::Untyped};
    return d;
}

static bool has_generators(const QAPartition &P, const std::vector<Key> &keys) {
    return std::any_of(keys.begin(), keys.end(), [&](Key k) { return P.generator_count(k) > 0; });
}

std::vector<Decomposition> enumerate_decompositions(QAPPtr P) {
    std::vector<Decomposition> out;
    for (uint64_t phi = 1; phi < P->key_count(); ++phi) {
        Decomposition d{P, {phi}, CartanType::Untyped};
        if (!has_generators(*P, d.t_keys()) || !has_generators(*P, d.p_keys())) continue;
        d.type = classify_level1(d);
        out.push_back(std::move(d));
    }
    return out;
}

DecompositionCheck check_decomposition(const Decomposition &D) {
    const QAPartition &P = *D.source;
    const int p = P.p();
    std::vector<uint8_t> side(size_t(1) << (2 * p), 0);  // 1 = t, 2 = p
    auto T = D.t_generators();
    auto Pp = D.p_generators();
    for (uint64_t a : T) side[a] |= 1;
    for (uint64_t a : Pp) side[a] |= 2;
    DecompositionCheck c;
    for (uint64_t a : T) {
        if (side[a] != 1) c.orth = false;
    }
    std::vector<uint64_t> all = T;
    all.insert(all.end(), Pp.begin(), Pp.end());
    for (size_t x = 0; x < all.size(); ++x) {
        for (size_t y = x + 1; y < all.size(); ++y) {
            uint64_t a = all[x], b = all[y];
            if (!omega(a, b, p)) continue;
            int sa = side[a], sb = side[b], sc = side[a ^ b];
            if (sa == 1 && sb == 1 && sc != 1) c.tt = false;
            if (sa == 2 && sb == 2 && sc != 1) c.pp = false;
            if (sa != sb && sc != 2) c.tp = false;
        }
    }
    return c;
}

DecompositionCheck check_decomposition_matrix(const Decomposition &D, double tol) {
    const QAPartition &P = *D.source;
    const int p = P.p();
    if (p > kMaxMatrixQubits) throw CapacityError("check_decomposition_matrix: p too large");
    const int N = 1 << p;
    std::map<uint64_t, CMat> mats;
    auto mat = [&](uint64_t a) -> const CMat & {
        auto it = mats.find(a);
        if (it == mats.end()) it = mats.emplace(a, matrix_of(Spinor::from_label(p, a))).first;
        return it->second;
    };
    std::vector<uint8_t> side(size_t(1) << (2 * p), 0);
    auto T = D.t_generators();
    auto Pp = D.p_generators();
    for (uint64_t a : T) side[a] = 1;
    for (uint64_t a : Pp) side[a] = 2;
    DecompositionCheck c;
    std::vector<uint64_t> all = T;
    all.insert(all.end(), Pp.begin(), Pp.end());
    // The commutator of two Pauli strings is a multiple of one Pauli string;
    // the matrix computation determines which one without using omega.
    for (size_t x = 0; x < all.size(); ++x) {
        for (size_t y = x + 1; y < all.size(); ++y) {
            uint64_t a = all[x], b = all[y];
            CMat M = mat(a) * mat(b) - mat(b) * mat(a);
            double norm = M.norm();
            if (norm < tol) continue;
            // The support of M fixes the X-part; only the Z-part is searched.
            Eigen::Index r0 = 0, c0 = 0;
            M.cwiseAbs().maxCoeff(&r0, &c0);
            const uint64_t alpha = uint64_t(r0 ^ c0);
            int target = -1;
            for (uint64_t zeta = 0; zeta < uint64_t(N); ++zeta) {
                const uint64_t z = (zeta << p) | alpha;
                if (!z) continue;
                const CMat &S = mat(z);
                cplx coef = (S.adjoint() * M).trace() / double(N);
                if (std::abs(coef) > tol && (M - coef * S).norm() < tol * N) {
                    target = side[z];
                    break;
                }
            }
            int sa = side[a], sb = side[b];
            if (sa == 1 && sb == 1 && target != 1) c.tt = false;
            if (sa == 2 && sb == 2 && target != 1) c.pp = false;
            if (sa != sb && target != 2) c.tp = false;
        }
    }
    for (uint64_t a : T) {
        for (uint64_t b : Pp) {
            if (std::abs((mat(a) * mat(b)).trace()) > tol) c.orth = false;
        }
    }
    return c;
}

// ------------------------------------------------------ maximal abelian in p

namespace {

constexpr size_t kCliqueBits = 256;
using Bits = std::bitset<kCliqueBits>;

struct CliqueSearch {
    const std::vector<Bits> &adj;
    const std::vector<int> &score;  // per-vertex preference weight
    std::vector<int> best;
    int best_score = -1;
    std::vector<int> cur;
    int cur_score = 0;

    bool better(const std::vector<int> &c, int sc) const {
        if (c.size() != best.size()) return c.size() > best.size();
        if (sc != best_score) return sc > best_score;
        return c < best;  // vertices are ordered by label
    }

    void run(Bits P, Bits X) {
        if (P.none()) {
            if (X.none()) {
                std::vector<int> c = cur;
                std::sort(c.begin(), c.end());
                if (better(c, cur_score)) {
                    best = c;
                    best_score = cur_score;
                }
            }
            return;
        }
        if (cur.size() + P.count() < best.size()) return;
        // Pivot: vertex of P|X with most neighbours in P.
        size_t pivot = 0, pc = 0;
        Bits PX = P | X;
        for (size_t u = PX._Find_first(); u < kCliqueBits; u = PX._Find_next(u)) {
            size_t cnt = (P & adj[u]).count();
            if (cnt >= pc) {
                pc = cnt;
                pivot = u;
            }
        }
        Bits cand = P & ~adj[pivot];
        for (size_t v = cand._Find_first(); v < kCliqueBits; v = cand._Find_next(v)) {
            cur.push_back(int(v));
            cur_score += score[v];
            run(P & adj[v], X & adj[v]);
            cur.pop_back();
            cur_score -= score[v];
            P.reset(v);
            X.set(v);
        }
    }
};

}  // namespace

std::vector<uint64_t> max_commuting_set(int p, const std::vector<uint64_t> &gens_in, const BiSubalgebra *prefer) {
    std::vector<uint64_t> gens = gens_in;
    std::sort(gens.begin(), gens.end());
    gens.erase(std::unique(gens.begin(), gens.end()), gens.end());
    gens.erase(std::remove(gens.begin(), gens.end(), 0), gens.end());
    if (gens.size() > kCliqueBits) throw CapacityError("max_commuting_set: too many generators");
    const size_t n = gens.size();
    std::vector<Bits> adj(n);
    std::vector<int> score(n, 0);
    for (size_t i = 0; i < n; ++i) {
        for (size_t j = 0; j < n; ++j) {
            if (i != j && !omega(gens[i], gens[j], p)) adj[i].set(j);
        }
        if (prefer && prefer->contains(gens[i])) score[i] = 1;
    }
    CliqueSearch cs{adj, score, {}, -1, {}, 0};
    Bits P;
    for (size_t i = 0; i < n; ++i) P.set(i);
    cs.run(P, Bits());
    std::vector<uint64_t> out;
    for (int v : cs.best) out.push_back(gens[v]);
    std::sort(out.begin(), out.end());
    return out;
}

static bool is_power_of_two(uint64_t x) { return x && !(x & (x - 1)); }

std::string AbelianSubalgebra::describe() const {
    std::ostringstream os;
    switch (kind) {
        case AbelianKind::Cartan:
            os << "Cartan subalgebra";
            break;
        case AbelianKind::BiSubalgebra:
            os << "bi-subalgebra of dimension " << dim;
            break;
        case AbelianKind::Coset:
            os << "coset of a bi-subalgebra, size 2^" << dim;
            break;
        default:
            os << "irregular commuting set";
    }
    os << " with " << generators.size() << " generators";
    return os.str();
}

AbelianSubalgebra maximal_abelian_in_p(const Decomposition &D) {
    const QAPartition &P = *D.source;
    const int p = P.p();
    AbelianSubalgebra A;
    A.generators = max_commuting_set(p, D.p_generators(), &P.cartan());
    std::vector<uint64_t> with_id = A.generators;
    with_id.push_back(0);
    A.span = BiSubalgebra(p, A.generators);
    const uint64_t n = A.generators.size();
    if (A.span.size() == n + 1) {
        A.dim = A.span.dim();
        A.kind = A.dim == p ? AbelianKind::Cartan : AbelianKind::BiSubalgebra;
    } else if (is_power_of_two(n) && A.span.size() == 2 * n) {
        // A = a + B for a bi-subalgebra B of size n: every pairwise sum lies
        // in B and B avoids A.
        std::vector<uint64_t> diffs;
        for (uint64_t a : A.generators) diffs.push_back(a ^ A.generators.front());
        BiSubalgebra B(p, diffs);
        bool coset = B.size() == n && !B.contains(A.generators.front());
        A.kind = coset ? AbelianKind::Coset : AbelianKind::Other;
        A.dim = B.dim();
    } else {
        A.kind = AbelianKind::Other;
    }
    return A;
}

CartanType classify_level1(const Decomposition &D) {
    const int p = D.source->p();
    AbelianSubalgebra A = maximal_abelian_in_p(D);
    if (A.kind == AbelianKind::Cartan) return CartanType::AI;
    if (A.kind == AbelianKind::BiSubalgebra && A.dim == p - 1) return CartanType::AII;
    if (A.kind == AbelianKind::Coset && A.dim == p - 1) return CartanType::AIII;
    throw MalformedDecompositionError("classify: abelian subalgebra of p is a " + A.describe());
}

std::vector<uint64_t> covering_forms(const Decomposition &D) {
    const QAPartition &P = *D.source;
    if (D.level() == 1) return {D.forms.front()};
    std::vector<Key> tn, pn;
    for (Key k = 0; k < P.key_count(); ++k) {
        if (P.is_null(k)) continue;
        if (D.in_t(k)) tn.push_back(k);
        else if (D.in_p(k)) pn.push_back(k);
    }
    std::vector<uint64_t> out;
    for (uint64_t phi = 1; phi < P.key_count(); ++phi) {
        bool ok = true;
        for (Key k : tn) {
            if (__builtin_parityll(phi & k)) {
                ok = false;
                break;
            }
        }
        for (Key k : pn) {
            if (!ok) break;
            if (!__builtin_parityll(phi & k)) ok = false;
        }
        if (ok) out.push_back(phi);
    }
    return out;
}

TypeDecision decide_type(const Decomposition &D) {
    TypeDecision td;
    if (D.level() == 1) {
        td.chosen = classify_level1(D);
        td.admissible.insert(td.chosen);
        Decomposition w = D;
        w.type = td.chosen;
        td.witness = w;
        return td;
    }
    for (uint64_t phi : covering_forms(D)) {
        Decomposition cover{D.source, {phi}, CartanType::Untyped};
        if (!has_generators(*D.source, cover.t_keys()) || !has_generators(*D.source, cover.p_keys())) continue;
        cover.type = classify_level1(cover);
        td.admissible.insert(cover.type);
        if (!td.witness) {
            td.witness = cover;
            td.chosen = cover.type;
        }
    }
    if (!td.witness) throw MalformedDecompositionError("decide_type: no covering first-level decomposition");
    return td;
}

// ------------------------------------------------------------ involutions

bool fixed_by(const PauliInvolution &inv, uint64_t label, int p) {
    if (!inv.conj) return omega(inv.h, label, p) == 0;
    return (zeta_dot_alpha(label, p) ^ omega(inv.h, label, p)) == 1;
}

PauliInvolution involution_of(const QAPartition &P, uint64_t form) {
    const int p = P.p();
    PauliInvolution inv;
    inv.conj = form & 1;
    auto L = [&](uint64_t x) {
        int v = __builtin_parityll(form & P.key_of(x));
        if (inv.conj) v ^= 1 ^ zeta_dot_alpha(x, p);
        return v;
    };
    uint64_t ell = 0;
    for (int j = 0; j < 2 * p; ++j) {
        if (L(uint64_t(1) << j)) ell |= uint64_t(1) << j;
    }
    inv.h = swap_halves(ell, p);
    for (uint64_t x = 1; x < (uint64_t(1) << (2 * p)); ++x) {
        bool in_t = !__builtin_parityll(form & P.key_of(x));
        if (fixed_by(inv, x, p) != in_t) throw InternalConsistencyError("involution_of: form is not a Pauli involution");
    }
    return inv;
}

// ------------------------------------------------------ lambda generators

std::string LambdaGen::str(int N) const {
    std::string head = kind == Lambda ? "λ" : kind == LambdaHat ? "λ̂" : "d";
    if (N <= 9) return head + "_" + std::to_string(k) + std::to_string(l);
    return head + "_{" + std::to_string(k) + "," + std::to_string(l) + "}";
}

CMat matrix_of(const LambdaGen &g, int N) {
    CMat M = CMat::Zero(N, N);
    const int a = g.k - 1, b = g.l - 1;
    if (a < 0 || b >= N || a >= b) throw DimensionError("lambda generator out of range");
    switch (g.kind) {
        case LambdaGen::Lambda:
            M(a, b) = 1;
            M(b, a) = 1;
            break;
        case LambdaGen::LambdaHat:
            M(a, b) = cplx(0, -1);
            M(b, a) = cplx(0, 1);
            break;
        case LambdaGen::Diag:
            M(a, a) = 1;
            M(b, b) = -1;
            break;
    }
    return M;
}

std::vector<LambdaGen> lambda_cell(int p, uint64_t gamma, int eps) {
    const int N = 1 << p;
    std::vector<LambdaGen> out;
    if (gamma == 0) {
        if (eps) {
            for (int k = 1; k < N; ++k) out.push_back({LambdaGen::Diag, k, k + 1});
        }
        return out;
    }
    for (int k = 1; k <= N; ++k) {
        int l = int(uint64_t(k - 1) ^ gamma) + 1;
        if (l > k) out.push_back({eps ? LambdaGen::Lambda : LambdaGen::LambdaHat, k, l});
    }
    return out;
}

DividedQAP::DividedQAP(int p, int m, int n) : p_(p), m_(m), n_(n) {
    if (p < 1 || p > kMaxMatrixQubits) throw DimensionError("divide: p out of range");
    if (m + n != (1 << p)) throw DimensionError("divide: m + n must equal 2^p");
    if (n < 1 || m < n) throw PreconditionError("divide: need m >= n >= 1");
    cells_.assign(key_count(), {});
    for (uint64_t gamma = 0; gamma < (uint64_t(1) << p); ++gamma) {
        for (int eps = 0; eps < 2; ++eps) {
            for (const LambdaGen &g : lambda_cell(p, gamma, eps)) {
                int kappa = g.kind == LambdaGen::Diag ? 0 : int(g.k <= m && g.l > m);
                cells_[make_key(gamma, kappa, eps)].push_back(g);
            }
        }
    }
}

std::string DividedQAP::key_name(uint32_t k) const {
    return std::string(key_eps(k) ? "W(B_" : "Ŵ(B_") + bits_to_string(key_gamma(k), p_) + ";" +
           std::to_string(key_kappa(k)) + ")";
}

namespace {

// Residual of X after projection onto the span of a lambda cell.
double cell_residual(const CMat &X, const std::vector<LambdaGen> &cell, int N) {
    if (cell.empty()) return X.norm();
    if (cell.front().kind == LambdaGen::Diag) {
        CMat R = X;
        cplx tr = X.trace() / double(N);
        for (int k = 0; k < N; ++k) R(k, k) = tr;
        return R.norm();
    }
    CMat R = X;
    for (const LambdaGen &g : cell) {
        CMat G = matrix_of(g, N);
        cplx coef = (G.adjoint() * X).trace() / 2.0;
        R -= coef * G;
    }
    return R.norm();
}

}  // namespace

ValidationReport DividedQAP::validate(double tol) const {
    ValidationReport rep;
    const int N = this->N();
    std::vector<std::vector<CMat>> mats(key_count());
    for (uint32_t k = 0; k < key_count(); ++k) {
        for (const auto &g : cells_[k]) mats[k].push_back(matrix_of(g, N));
    }
    size_t total = 0;
    for (const auto &c : cells_) total += c.size();
    if (total != size_t(N) * N - 1) rep.fail("divided cells do not span su(N)");
    if (!is_null(make_key(0, 0, 0)) || !is_null(make_key(0, 1, 0)) || !is_null(make_key(0, 1, 1))) {
        rep.fail("null cells of the diagonal block are not null");
    }
    for (uint32_t a = 0; a < key_count(); ++a) {
        for (uint32_t b = a; b < key_count(); ++b) {
            const auto &target = cells_[a ^ b];
            for (const CMat &A : mats[a]) {
                for (const CMat &B : mats[b]) {
                    CMat X = A * B - B * A;
                    if (cell_residual(X, target, N) > tol) {
                        rep.fail("closure fails for " + key_name(a) + " and " + key_name(b));
                        goto next_pair;
                    }
                }
            }
        next_pair:;
        }
    }
    return rep;
}

DividedQAP divide_intrinsic(const QAPartition &P, int m, int n) {
    if (P.rank() != 0 || !(P.cartan() == BiSubalgebra::intrinsic_cartan(P.p()))) {
        throw PreconditionError("divide: needs the rank-zero intrinsic partition");
    }
    return DividedQAP(P.p(), m, n);
}

std::vector<uint32_t> DividedDecomposition::t_keys() const {
    std::vector<uint32_t> out;
    for (uint32_t k = 0; k < div->key_count(); ++k) {
        if (!__builtin_parity(form & k)) out.push_back(k);
    }
    return out;
}

std::vector<uint32_t> DividedDecomposition::p_keys() const {
    std::vector<uint32_t> out;
    for (uint32_t k = 0; k < div->key_count(); ++k) {
        if (__builtin_parity(form & k)) out.push_back(k);
    }
    return out;
}

static std::vector<LambdaGen> gens_of(const DividedQAP &d, const std::vector<uint32_t> &keys) {
    std::vector<LambdaGen> out;
    for (uint32_t k : keys) {
        const auto &m = d.members(k);
        out.insert(out.end(), m.begin(), m.end());
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<LambdaGen> DividedDecomposition::t_generators() const { return gens_of(*div, t_keys()); }
std::vector<LambdaGen> DividedDecomposition::p_generators() const { return gens_of(*div, p_keys()); }

int DividedDecomposition::block_of(int k) const {
    uint64_t a = form >> 2;
    return int(k > div->m()) ^ __builtin_parityll(a & uint64_t(k - 1));
}

DecompositionCheck DividedDecomposition::check(double tol) const {
    const int N = div->N();
    DecompositionCheck c;
    auto T = t_generators(), Pp = p_generators();
    std::vector<CMat> tm, pm;
    for (const auto &g : T) tm.push_back(matrix_of(g, N));
    for (const auto &g : Pp) pm.push_back(matrix_of(g, N));
    // Split a matrix into its block-diagonal (t-like) and off-block (p-like) parts.
    auto parts = [&](const CMat &X, double &in_blocks, double &across) {
        in_blocks = across = 0;
        for (int a = 0; a < N; ++a) {
            for (int b = 0; b < N; ++b) {
                double v = std::norm(X(a, b));
                if (block_of(a + 1) == block_of(b + 1)) in_blocks += v;
                else across += v;
            }
        }
        in_blocks = std::sqrt(in_blocks);
        across = std::sqrt(across);
    };
    double ib, ac;
    for (size_t i = 0; i < tm.size(); ++i) {
        for (size_t j = i + 1; j < tm.size(); ++j) {
            parts(tm[i] * tm[j] - tm[j] * tm[i], ib, ac);
            if (ac > tol) c.tt = false;
        }
        for (const CMat &B : pm) {
            parts(tm[i] * B - B * tm[i], ib, ac);
            if (ib > tol) c.tp = false;
            if (std::abs((tm[i] * B).trace()) > tol) c.orth = false;
        }
    }
    for (size_t i = 0; i < pm.size(); ++i) {
        for (size_t j = i + 1; j < pm.size(); ++j) {
            parts(pm[i] * pm[j] - pm[j] * pm[i], ib, ac);
            if (ac > tol) c.pp = false;
        }
    }
    return c;
}

DividedDecomposition intrinsic_aiii_t(const DividedQAP &div) {
    DividedDecomposition d;
    d.div = &div;
    d.form = DividedQAP::make_key(0, 1, 0);
    d.m_prime = div.m();
    d.n_prime = div.n();
    return d;
}

DividedDecomposition nonintrinsic_aiii(const DividedQAP &div, int l) {
    const int half = 1 << (div.p() - 1);
    if (l < 0 || l > div.m() - half) throw PreconditionError("nonintrinsic_aiii: l out of range");
    if (l == 0) return intrinsic_aiii_t(div);
    const int want_a = div.m() - 2 * l, want_b = div.n() + 2 * l;
    // Alternative subgroups (a != 0) first; the signature (m-2l, n+2l) can
    // coincide with the intrinsic one as an unordered pair, then a = 0 fits.
    for (uint64_t a_raw = 1; a_raw <= (uint64_t(1) << div.p()); ++a_raw) {
        const uint64_t a = a_raw & ((uint64_t(1) << div.p()) - 1);
        DividedDecomposition d;
        d.div = &div;
        d.form = uint32_t((a << 2) | 2);
        int zeros = 0;
        for (int k = 1; k <= div.N(); ++k) zeros += d.block_of(k) == 0;
        int ones = div.N() - zeros;
        if ((zeros == want_a && ones == want_b) || (zeros == want_b && ones == want_a)) {
            d.m_prime = want_a;
            d.n_prime = want_b;
            return d;
        }
    }
    throw PreconditionError("nonintrinsic_aiii: no alternative maximal subgroup realizes (" + std::to_string(want_a) +
                            "," + std::to_string(want_b) + ")");
}

// ----------------------------------------------------------- rendering

std::optional<std::vector<std::string>> lambda_render_labels(int p, const std::vector<uint64_t> &labels) {
    const int N = 1 << p;
    const uint64_t lo = (uint64_t(1) << p) - 1;
    std::map<uint64_t, std::vector<uint64_t>> by_alpha;
    for (uint64_t x : labels) {
        if (x) by_alpha[x & lo].push_back(x >> p);
    }
    std::vector<std::string> out;
    std::vector<LambdaGen> gens;
    for (auto &[gamma, zetas] : by_alpha) {
        std::sort(zetas.begin(), zetas.end());
        zetas.erase(std::unique(zetas.begin(), zetas.end()), zetas.end());
        if (gamma == 0) {
            if (zetas.size() != size_t(N - 1)) return std::nullopt;
            out.push_back("C_[0]");
            continue;
        }
        std::vector<uint64_t> even, odd;
        for (uint64_t z = 0; z < uint64_t(N); ++z) {
            (__builtin_parityll(z & gamma) ? odd : even).push_back(z);
        }
        std::vector<uint64_t> both = even;
        both.insert(both.end(), odd.begin(), odd.end());
        std::sort(both.begin(), both.end());
        if (zetas == even) {
            auto c = lambda_cell(p, gamma, 1);
            gens.insert(gens.end(), c.begin(), c.end());
        } else if (zetas == odd) {
            auto c = lambda_cell(p, gamma, 0);
            gens.insert(gens.end(), c.begin(), c.end());
        } else if (zetas == both) {
            auto c = lambda_cell(p, gamma, 1);
            gens.insert(gens.end(), c.begin(), c.end());
            c = lambda_cell(p, gamma, 0);
            gens.insert(gens.end(), c.begin(), c.end());
        } else {
            return std::nullopt;
        }
    }
    std::sort(gens.begin(), gens.end(), [](const LambdaGen &a, const LambdaGen &b) {
        return std::tie(a.k, a.l, a.kind) < std::tie(b.k, b.l, b.kind);
    });
    for (const auto &g : gens) out.push_back(g.str(N));
    return out;
}

static std::string braces(const std::vector<std::string> &items) {
    if (items.empty()) return "{0}";
    std::string s = "{";
    for (size_t k = 0; k < items.size(); ++k) {
        if (k) s += ", ";
        s += items[k];
    }
    return s + "}";
}

std::string lambda_render(int p, const std::vector<uint64_t> &labels) {
    if (auto r = lambda_render_labels(p, labels)) return braces(*r);
    std::vector<std::string> items;
    for (uint64_t x : labels) {
        if (x) items.push_back(Spinor::from_label(p, x).str());
    }
    return braces(items);
}

std::string lambda_render(const std::vector<LambdaGen> &gens, int N) {
    std::vector<std::string> items;
    for (const auto &g : gens) items.push_back(g.str(N));
    return braces(items);
}

}  // namespace qapkit
