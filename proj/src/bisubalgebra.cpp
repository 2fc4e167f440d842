#include "qapkit/bisubalgebra.hpp"

#include <algorithm>

#include "qapkit/gf2.hpp"
#include "qapkit/simd.hpp"

namespace qapkit {

BiSubalgebra::BiSubalgebra(int p, const std::vector<uint64_t> &labels) : p_(p) {
    if (p < 1 || p > kMaxQubits) throw DimensionError("bi-subalgebra: p out of range");
    uint64_t mask = (uint64_t(1) << (2 * p)) - 1;
    for (uint64_t l : labels) {
        if (l & ~mask) throw DimensionError("bi-subalgebra: label wider than 2p bits");
    }
    basis_ = gf2::rref(labels);
}

BiSubalgebra BiSubalgebra::full(int p) {
    std::vector<uint64_t> rows;
    for (int k = 0; k < 2 * p; ++k) rows.push_back(uint64_t(1) << k);
    return BiSubalgebra(p, rows);
}

BiSubalgebra BiSubalgebra::intrinsic_cartan(int p) {
    std::vector<uint64_t> rows;
    for (int k = 0; k < p; ++k) rows.push_back(uint64_t(1) << (p + k));
    return BiSubalgebra(p, rows);
}

bool BiSubalgebra::contains(uint64_t label) const { return gf2::in_span(label, basis_); }

bool BiSubalgebra::contains(const BiSubalgebra &other) const {
    if (other.p_ != p_) return false;
    return std::all_of(other.basis_.begin(), other.basis_.end(), [&](uint64_t b) { return contains(b); });
}

std::vector<uint64_t> BiSubalgebra::elements() const {
    auto e = gf2::span_elements(basis_);
    std::sort(e.begin(), e.end());
    return e;
}

std::vector<Spinor> BiSubalgebra::spinors() const {
    std::vector<Spinor> out;
    for (uint64_t l : elements()) out.push_back(Spinor::from_label(p_, l));
    return out;
}

bool BiSubalgebra::operator<(const BiSubalgebra &o) const {
    if (p_ != o.p_) return p_ < o.p_;
    if (basis_.size() != o.basis_.size()) return basis_.size() > o.basis_.size();
    return basis_ < o.basis_;
}

std::string BiSubalgebra::str() const {
    std::string s = "{";
    for (size_t k = 0; k < basis_.size(); ++k) {
        if (k) s += ", ";
        s += Spinor::from_label(p_, basis_[k]).str();
    }
    return s + "}";
}

BiSubalgebra span_of(int p, const std::vector<Spinor> &generators) {
    std::vector<uint64_t> labels;
    for (const auto &g : generators) {
        if (g.p != p) throw DimensionError("span_of: generator with mismatched p");
        labels.push_back(g.label());
    }
    return BiSubalgebra(p, labels);
}

MaximalBiSubalgebraGroup::MaximalBiSubalgebraGroup(BiSubalgebra parent) : parent_(std::move(parent)) {}

int MaximalBiSubalgebraGroup::character(uint64_t index, uint64_t x) const {
    return __builtin_parityll(index & gf2::coords(x, parent_.basis()));
}

BiSubalgebra MaximalBiSubalgebraGroup::member(uint64_t index) const {
    if (index >= count()) throw std::out_of_range("member index out of range");
    // Kernel of the character in coordinates, mapped back to labels.
    std::vector<uint64_t> ker = gf2::annihilator(index ? std::vector<uint64_t>{index} : std::vector<uint64_t>{},
                                                 width());
    std::vector<uint64_t> labels;
    for (uint64_t c : ker) labels.push_back(gf2::combine(c, parent_.basis()));
    return BiSubalgebra(parent_.p(), labels);
}

uint64_t MaximalBiSubalgebraGroup::index_of(const BiSubalgebra &B) const {
    if (!parent_.contains(B)) throw PreconditionError("index_of: not a subalgebra of the parent");
    if (B.dim() == parent_.dim()) return 0;
    if (B.dim() != parent_.dim() - 1) throw PreconditionError("index_of: not a maximal bi-subalgebra of the parent");
    std::vector<uint64_t> cs;
    for (uint64_t b : B.basis()) cs.push_back(gf2::coords(b, parent_.basis()));
    auto ann = gf2::annihilator(cs, width());
    return ann.front();
}

uint64_t MaximalBiSubalgebraGroup::stabilizer_index(uint64_t label) const {
    const auto &b = parent_.basis();
    const int p = parent_.p();
    uint64_t idx = 0;
    for (size_t k = 0; k < b.size(); ++k) idx = (idx << 1) | uint64_t(omega(label, b[k], p));
    return idx;
}

MaximalBiSubalgebraGroup enumerate_maximal(const BiSubalgebra &parent) {
    if (parent.dim() == 0) throw PreconditionError("enumerate_maximal: parent is the identity algebra");
    return MaximalBiSubalgebraGroup(parent);
}

BiSubalgebra sqcap(const BiSubalgebra &B1, const BiSubalgebra &B2, const BiSubalgebra &parent) {
    MaximalBiSubalgebraGroup g(parent);
    uint64_t i = g.index_of(B1);
    uint64_t j = g.index_of(B2);
    return g.member(i ^ j);
}

BiSubalgebra commutant(const BiSubalgebra &B) {
    const int p = B.p();
    std::vector<uint64_t> rows;
    for (uint64_t b : B.basis()) rows.push_back(swap_halves(b, p));
    return BiSubalgebra(p, gf2::annihilator(rows, 2 * p));
}

BiSubalgebra stabilizer_of(const Spinor &a, const BiSubalgebra &parent) {
    if (a.p != parent.p()) throw DimensionError("stabilizer_of: mismatched p");
    if (parent.dim() == 0) return parent;
    MaximalBiSubalgebraGroup g(parent);
    return g.member(g.stabilizer_index(a.label()));
}

bool is_abelian(const BiSubalgebra &B) {
    const auto &b = B.basis();
    const int p = B.p();
    for (size_t i = 0; i < b.size(); ++i) {
        uint64_t m = swap_halves(b[i], p);
        if (simd::parity_dot_count(b.data() + i + 1, b.size() - i - 1, m) != 0) return false;
    }
    return true;
}

bool is_cartan(const BiSubalgebra &B) { return B.dim() == B.p() && is_abelian(B); }

BiSubalgebra intersect(const BiSubalgebra &a, const BiSubalgebra &b) {
    if (a.p() != b.p()) throw DimensionError("intersect: mismatched p");
    return BiSubalgebra(a.p(), gf2::intersect(a.basis(), b.basis(), 2 * a.p()));
}

BiSubalgebra join(const BiSubalgebra &a, const BiSubalgebra &b) {
    if (a.p() != b.p()) throw DimensionError("join: mismatched p");
    std::vector<uint64_t> rows = a.basis();
    rows.insert(rows.end(), b.basis().begin(), b.basis().end());
    return BiSubalgebra(a.p(), rows);
}

uint64_t coset_index(uint64_t x, const BiSubalgebra &B) {
    return gf2::nonpivot_bits(gf2::reduce(x, B.basis()), gf2::pivot_mask(B.basis()), 2 * B.p());
}

std::vector<std::vector<uint64_t>> cosets_of(const BiSubalgebra &B) {
    const int p = B.p();
    std::vector<std::vector<uint64_t>> out(size_t(1) << B.order());
    for (uint64_t x = 0; x < (uint64_t(1) << (2 * p)); ++x) out[coset_index(x, B)].push_back(x);
    return out;
}

namespace {

// Enumerate RREF bases of dimension d in Z_2^w with descending pivots.
void enumerate_rref(int w, int d, int next_col, std::vector<int> &pivots, std::vector<std::vector<uint64_t>> &out) {
    if (int(pivots.size()) == d) {
        // Free positions for row k: non-pivot columns below its pivot.
        std::vector<std::vector<int>> free(d);
        uint64_t pmask = 0;
        for (int pv : pivots) pmask |= uint64_t(1) << pv;
        size_t total_free = 0;
        for (int k = 0; k < d; ++k) {
            for (int c = pivots[k] - 1; c >= 0; --c) {
                if (!(pmask & (uint64_t(1) << c))) free[k].push_back(c);
            }
            total_free += free[k].size();
        }
        for (uint64_t assign = 0; assign < (uint64_t(1) << total_free); ++assign) {
            std::vector<uint64_t> rows(d);
            size_t bit = total_free;
            for (int k = 0; k < d; ++k) {
                rows[k] = uint64_t(1) << pivots[k];
                for (int c : free[k]) {
                    --bit;
                    if ((assign >> bit) & 1) rows[k] |= uint64_t(1) << c;
                }
            }
            out.push_back(std::move(rows));
        }
        return;
    }
    for (int c = next_col; c >= d - int(pivots.size()) - 1; --c) {
        pivots.push_back(c);
        enumerate_rref(w, d, c - 1, pivots, out);
        pivots.pop_back();
    }
}

}  // namespace

std::vector<BiSubalgebra> enumerate_all(int p, int order) {
    if (p < 1 || p > 4) throw CapacityError("enumerate_all: p must be in 1..4");
    if (order < 0 || order > 2 * p) throw PreconditionError("enumerate_all: order must be in 0..2p");
    const int d = 2 * p - order;
    std::vector<std::vector<uint64_t>> bases;
    std::vector<int> pivots;
    enumerate_rref(2 * p, d, 2 * p - 1, pivots, bases);
    std::vector<BiSubalgebra> out;
    out.reserve(bases.size());
    for (auto &b : bases) out.emplace_back(p, b);
    std::sort(out.begin(), out.end());
    return out;
}

BiSubalgebra extend_to_cartan(const BiSubalgebra &B) {
    if (!is_abelian(B)) throw PreconditionError("extend_to_cartan: not abelian");
    const int p = B.p();
    BiSubalgebra cur = B;
    for (uint64_t x = 1; x < (uint64_t(1) << (2 * p)) && cur.dim() < p; ++x) {
        if (cur.contains(x)) continue;
        bool ok = std::all_of(cur.basis().begin(), cur.basis().end(), [&](uint64_t b) { return !omega(x, b, p); });
        if (ok) cur = join(cur, BiSubalgebra(p, {x}));
    }
    return cur;
}

}  // namespace qapkit
