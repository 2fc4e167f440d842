#include "qapkit/qap.hpp"

#include <algorithm>
#include <map>
#include <sstream>

#include "qapkit/gf2.hpp"

namespace qapkit {

namespace {

constexpr int kMaxQapQubits = 8;

// Greedy complement of C by unit vectors: alpha bits first (qubit order),
// then zeta bits. For C_[0] this is the X-type Lagrangian.
std::vector<uint64_t> unit_complement(const BiSubalgebra &C) {
    const int p = C.p();
    std::vector<uint64_t> span = C.basis();
    std::vector<uint64_t> out;
    std::vector<uint64_t> order;
    for (int j = 0; j < p; ++j) order.push_back(uint64_t(1) << (p - 1 - j));
    for (int j = 0; j < p; ++j) order.push_back(uint64_t(1) << (2 * p - 1 - j));
    for (uint64_t e : order) {
        if (gf2::in_span(e, span)) continue;
        out.push_back(e);
        span.push_back(e);
        span = gf2::rref(span);
    }
    return out;
}

}  // namespace

QAPartition::QAPartition(BiSubalgebra C, BiSubalgebra center)
    : p_(C.p()), r_(0), C_(std::move(C)), center_(std::move(center)), gC_(C_) {
    if (p_ > kMaxQapQubits) throw CapacityError("build_qap: p exceeds cap of " + std::to_string(kMaxQapQubits));
    if (!is_cartan(C_)) throw NotCartanError("build_qap: C is not a Cartan subalgebra " + C_.str());
    if (center_.p() != p_ || !C_.contains(center_)) throw ContainmentError("build_qap: B^[r] is not contained in C");
    r_ = C_.dim() - center_.dim();

    const auto &cb = C_.basis();
    // Coordinates along the complement: dual forms of [C basis | complement].
    std::vector<uint64_t> full = cb;
    auto comp = unit_complement(C_);
    full.insert(full.end(), comp.begin(), comp.end());
    auto dual = gf2::dual_basis(full, 2 * p_);
    nu_forms_.assign(dual.begin(), dual.begin() + p_);

    // Index rows: annihilator (in C-coordinates) of B^[r].
    std::vector<uint64_t> bcoords;
    for (uint64_t b : center_.basis()) bcoords.push_back(gf2::coords(b, cb));
    index_rows_ = gf2::annihilator(bcoords, p_);

    // Quadratic refinement shift: omega(c, b_k) = zeta.alpha(b_k), minimal.
    std::vector<uint64_t> rows;
    std::vector<int> rhs;
    for (uint64_t b : cb) {
        rows.push_back(swap_halves(b, p_));
        rhs.push_back(zeta_dot_alpha(b, p_));
    }
    uint64_t c0 = 0;
    if (!gf2::solve(rows, rhs, c0)) throw InternalConsistencyError("build_qap: no quadratic refinement");
    c_ = gf2::reduce(c0, cb);

    const uint64_t n = uint64_t(1) << (2 * p_);
    key_of_.resize(n);
    cells_.assign(key_count(), {});
    for (uint64_t x = 0; x < n; ++x) {
        uint64_t f = gC_.stabilizer_index(x);
        uint64_t nu = nu_of(x);
        uint64_t i = 0;
        for (uint64_t a : index_rows_) i = (i << 1) | uint64_t(__builtin_parityll(a & nu));
        int eps = 1 ^ zeta_dot_alpha(x, p_) ^ omega(c_, x, p_);
        Key k = make_key(f, i, eps);
        key_of_[x] = k;
        cells_[k].push_back(x);
    }
}

uint64_t QAPartition::nu_of(uint64_t label) const {
    uint64_t nu = 0;
    for (uint64_t g : nu_forms_) nu = (nu << 1) | uint64_t(__builtin_parityll(g & label));
    return nu;
}

const std::vector<uint64_t> &QAPartition::members(Key k) const {
    if (k >= key_count()) throw KeyError("key outside the partition: " + std::to_string(k));
    return cells_[k];
}

size_t QAPartition::generator_count(Key k) const {
    const auto &m = members(k);
    return m.size() - (k == center_key() ? 1 : 0);
}

Key QAPartition::tri_add(Key x, Key y) const {
    if (x >= key_count() || y >= key_count()) throw KeyError("tri_add: foreign key");
    return x ^ y;
}

Key tri_add(Key x, Key y, const QAPartition &P) { return P.tri_add(x, y); }

bool QAPartition::is_degrade(Key k) const {
    uint64_t f = key_f(k);
    for (uint64_t b : center_.basis()) {
        if (__builtin_parityll(gf2::coords(b, C_.basis()) & f)) return false;
    }
    return true;
}

std::string QAPartition::key_bits_str(Key k) const {
    std::string s = bits_to_string(key_f(k), p_);
    if (r_ > 0) s += ";" + bits_to_string(key_i(k), r_);
    return s;
}

std::string QAPartition::key_name(Key k) const {
    std::string s = key_eps(k) ? "W(B_" : "Ŵ(B_";
    s += bits_to_string(key_f(k), p_);
    if (r_ > 0) s += ";" + bits_to_string(key_i(k), r_);
    return s + ")";
}

ValidationReport QAPartition::validate() const {
    ValidationReport rep;
    const uint64_t n = uint64_t(1) << (2 * p_);
    // Partition coverage and group order.
    uint64_t total = 0;
    for (const auto &c : cells_) total += c.size();
    if (total != n) rep.fail("cells do not cover the generator set");
    if (key_count() != (uint32_t(1) << (p_ + r_ + 1))) rep.fail("key group order mismatch");
    if (!is_null(identity_key())) rep.fail("identity key is not the null subspace");
    if (center_key() != make_key(0, 0, 1)) rep.fail("B^[r] is not keyed (0,0,1)");
    if (members(center_key()).size() != center_.size()) rep.fail("B^[r] cell differs from B^[r]");
    for (Key k = 0; k < key_count(); ++k) {
        const auto &m = members(k);
        BiSubalgebra B = cell_algebra(k);
        BiSubalgebra BB = intersect(B, center_);
        for (uint64_t a : m) {
            for (uint64_t b : B.basis()) {
                if (omega(a, b, p_)) {
                    rep.fail("member " + Spinor::from_label(p_, a).str() + " does not commute with B of " + key_name(k));
                    break;
                }
            }
            if (!BB.contains(a ^ m.front())) rep.fail("bisection consistency fails in " + key_name(k));
        }
    }
    // Closure: anticommuting pairs land in the tri-added cell.
    for (uint64_t a = 0; a < n; ++a) {
        for (uint64_t b = a + 1; b < n; ++b) {
            if (omega(a, b, p_) && key_of_[a ^ b] != (key_of_[a] ^ key_of_[b])) {
                rep.fail("closure fails for " + Spinor::from_label(p_, a).str() + ", " + Spinor::from_label(p_, b).str());
            }
        }
    }
    return rep;
}

QAPPtr build_qap(const BiSubalgebra &C, const BiSubalgebra &B_r) { return std::make_shared<QAPartition>(C, B_r); }

// ---------------------------------------------------------------- co-quotient

CoQuotientAlgebra build_coquotient(QAPPtr P, Key center_key) {
    if (center_key >= P->key_count()) throw KeyError("build_coquotient: foreign key");
    if (P->is_null(center_key)) throw PreconditionError("build_coquotient: null center");
    if (center_key == P->center_key()) throw PreconditionError("build_coquotient: center equals B^[r]");
    CoQuotientAlgebra Q;
    Q.P = P;
    Q.center = center_key;
    Q.degrade = P->is_degrade(center_key);
    Q.rows.emplace_back(center_key, QAPartition::identity_key());
    std::vector<std::pair<Key, Key>> pairs;
    for (Key k = 0; k < P->key_count(); ++k) {
        Key m = k ^ center_key;
        if (k == 0 || k == center_key || m < k) continue;
        Key left = k, right = m;
        if (P->key_eps(k) != P->key_eps(m)) {
            if (P->key_eps(k) == 0) std::swap(left, right);
        }
        pairs.emplace_back(left, right);
    }
    // B^[r] row first, then by left key.
    std::sort(pairs.begin(), pairs.end(), [&](auto a, auto b) {
        bool ca = a.first == P->center_key() || a.second == P->center_key();
        bool cb = b.first == P->center_key() || b.second == P->center_key();
        if (ca != cb) return ca;
        return std::min(a.first, a.second) < std::min(b.first, b.second);
    });
    Q.rows.insert(Q.rows.end(), pairs.begin(), pairs.end());
    return Q;
}

// ---------------------------------------------------------------------- merge

namespace {

struct MergeCandidate {
    BiSubalgebra Cstar;
    QAPPtr Pstar;
    std::vector<Key> y_keys;  // candidate Y cells in Pstar
};

MergeCandidate merge_candidates(const CoQuotientAlgebra &Q, MergeMode mode) {
    const QAPartition &P = *Q.P;
    if (!Q.degrade) throw PreconditionError("merge: center is not a degrade subspace");
    if (P.rank() < 1) throw PreconditionError("merge: rank must be at least 1");
    const int p = P.p();
    uint64_t x = P.members(Q.center).front();
    MergeCandidate mc;
    if (P.cartan().contains(x)) {
        mc.Cstar = P.cartan();
        mc.Pstar = Q.P;
    } else {
        std::vector<uint64_t> rows;
        for (uint64_t c : P.cartan().elements()) {
            if (!omega(c, x, p)) rows.push_back(c);
        }
        rows.push_back(x);
        mc.Cstar = BiSubalgebra(p, rows);
        mc.Pstar = build_qap(mc.Cstar, P.center());
    }
    const QAPartition &Ps = *mc.Pstar;
    const int want_eps = mode == MergeMode::Parallel ? 1 : 0;
    for (uint64_t f = 1; f < Ps.cartan_group().count(); ++f) {
        Key probe = Ps.make_key(f, 0, 0);
        if (!Ps.is_degrade(probe)) continue;           // B_1 must contain B^[r]
        if (Ps.cartan_group().character(f, x) == 0) continue;  // B_1 must not contain X
        for (uint64_t s = 0; s < (uint64_t(1) << Ps.rank()); ++s) {
            Key k = Ps.make_key(f, s, want_eps);
            if (!Ps.is_null(k)) mc.y_keys.push_back(k);
        }
    }
    return mc;
}

}  // namespace

size_t merge_choice_count(const CoQuotientAlgebra &Q, MergeMode mode) {
    return merge_candidates(Q, mode).y_keys.size();
}

MergeResult merge_coquotient(const CoQuotientAlgebra &Q, MergeMode mode, size_t choice) {
    const QAPartition &P = *Q.P;
    const int p = P.p();
    MergeCandidate mc = merge_candidates(Q, mode);
    if (choice >= mc.y_keys.size()) throw PreconditionError("merge: no valid auxiliary subspace for this choice");
    Key yk = mc.y_keys[choice];
    const auto &ycell = mc.Pstar->members(yk);
    uint64_t y = ycell.front();

    std::vector<uint64_t> brows = P.center().basis();
    brows.push_back(y);
    BiSubalgebra Bnew(p, brows);
    std::vector<uint64_t> crows;
    for (uint64_t c : mc.Cstar.elements()) {
        if (!omega(c, y, p)) crows.push_back(c);
    }
    crows.push_back(y);
    BiSubalgebra Cmerg(p, crows);

    MergeResult out;
    out.qap = build_qap(Cmerg, Bnew);
    out.y_cell = ycell;
    out.center = out.qap->key_of(P.members(Q.center).front());
    out.sources.assign(out.qap->key_count(), {});
    for (Key k = 0; k < out.qap->key_count(); ++k) {
        auto &src = out.sources[k];
        for (uint64_t a : out.qap->members(k)) {
            Key old = P.key_of(a);
            if (std::find(src.begin(), src.end(), old) == src.end()) src.push_back(old);
        }
        std::sort(src.begin(), src.end());
        if (src.size() > 2) throw InternalConsistencyError("merge: a new cell spans more than two old cells");
        size_t total = 0;
        for (Key o : src) total += P.members(o).size();
        if (total != out.qap->members(k).size()) {
            throw InternalConsistencyError("merge: new cell is not a union of old cells");
        }
    }
    if (!out.qap->is_null(out.center) && out.center != out.qap->center_key()) {
        out.coquotient = build_coquotient(out.qap, out.center);
    }
    return out;
}

// --------------------------------------------------------------------- detach

DetachResult detach_coquotient(const CoQuotientAlgebra &Q, MergeMode mode) {
    const QAPartition &P = *Q.P;
    if (Q.degrade) throw PreconditionError("detach: center is not a regular subspace");
    if (P.rank() >= P.p()) throw PreconditionError("detach: rank must be below p");
    BiSubalgebra B1 = P.cell_algebra(Q.center);
    BiSubalgebra Bnext = intersect(B1, P.center());

    DetachResult out;
    out.qap = build_qap(P.cartan(), Bnext);
    const QAPartition &N = *out.qap;

    // Projection of new index strings onto old ones: old rows = T * new rows.
    const auto &old_rows = P.index_forms();
    const auto &new_rows = N.index_forms();
    const int rn = N.rank();
    std::vector<uint64_t> T(old_rows.size(), 0);
    for (size_t a = 0; a < old_rows.size(); ++a) {
        // Express old_rows[a] in the RREF basis new_rows.
        T[a] = gf2::coords(old_rows[a], new_rows);
    }
    // The kernel of the projection is one-dimensional; the half label is the
    // first index bit on which its generator is set.
    auto ker = gf2::annihilator(T, rn);
    if (ker.size() != 1) throw InternalConsistencyError("detach: projection kernel is not one-dimensional");
    out.new_bit = rn - 1 - gf2::pivot_of(ker.front());

    auto project = [&](uint64_t inew) {
        uint64_t iold = 0;
        for (uint64_t t : T) iold = (iold << 1) | uint64_t(__builtin_parityll(t & inew));
        return iold;
    };
    out.split.assign(P.key_count(), {0, 0});
    std::vector<int> filled(P.key_count(), 0);
    for (Key k = 0; k < N.key_count(); ++k) {
        Key old = P.make_key(N.key_f(k), project(N.key_i(k)), N.key_eps(k));
        int half = int((N.key_i(k) >> (rn - 1 - out.new_bit)) & 1);
        (half ? out.split[old].second : out.split[old].first) = k;
        filled[old]++;
    }
    for (Key k = 0; k < P.key_count(); ++k) {
        if (filled[k] != 2) throw InternalConsistencyError("detach: split map is not two-to-one");
        std::vector<uint64_t> u = N.members(out.split[k].first);
        const auto &v = N.members(out.split[k].second);
        u.insert(u.end(), v.begin(), v.end());
        std::sort(u.begin(), u.end());
        if (u != P.members(k)) throw InternalConsistencyError("detach: halves do not reunite to the old cell");
    }
    auto [h0, h1] = out.split[Q.center];
    out.center = N.is_null(h0) ? h1 : h0;
    if (!N.is_null(out.center) && out.center != N.center_key()) {
        CoQuotientAlgebra cq = build_coquotient(out.qap, out.center);
        if (mode == MergeMode::Crossing) {
            for (size_t r = 1; r < cq.rows.size(); ++r) {
                auto &[l, rr] = cq.rows[r];
                int half = int((N.key_i(l) >> (rn - 1 - out.new_bit)) & 1);
                // W on the left for 0∘ rows, Ŵ on the left for 1∘ rows.
                if ((N.key_eps(l) ^ half) != 1 && (N.key_eps(rr) ^ half) == 1) std::swap(l, rr);
            }
        }
        out.coquotient = std::move(cq);
    }
    return out;
}

// ------------------------------------------------------------------ rendering

std::string render_members(const QAPartition &P, Key k) {
    const auto &m = P.members(k);
    if (m.empty()) return "{0}";
    std::string s = "{";
    for (size_t j = 0; j < m.size(); ++j) {
        if (j) s += ", ";
        s += Spinor::from_label(P.p(), m[j]).str();
    }
    return s + "}";
}

std::string render_quotient(const QAPartition &P) {
    std::ostringstream os;
    os << "quotient algebra p=" << P.p() << " rank=" << P.rank() << "\n";
    os << "C = " << P.cartan().str() << "\n";
    os << "B^[r] = " << P.center().str() << "\n";
    for (Key k = 1; k < P.key_count(); k += 2) {
        Key w = k, h = k ^ 1;
        os << P.key_name(w) << " = " << render_members(P, w) << " | " << P.key_name(h) << " = "
           << render_members(P, h) << "\n";
    }
    return os.str();
}

std::string render_coquotient(const CoQuotientAlgebra &Q) {
    const QAPartition &P = *Q.P;
    std::ostringstream os;
    os << "co-quotient algebra p=" << P.p() << " rank=" << P.rank() << " center=" << P.key_name(Q.center)
       << (Q.degrade ? " (degrade)" : " (regular)") << "\n";
    os << "C = " << P.cartan().str() << "\n";
    os << "B^[r] = " << P.center().str() << "\n";
    for (const auto &[l, r] : Q.rows) {
        os << P.key_name(l) << " = " << render_members(P, l) << " | " << (r == 0 ? std::string("0") : P.key_name(r))
           << " = " << render_members(P, r) << "\n";
    }
    return os.str();
}

}  // namespace qapkit
