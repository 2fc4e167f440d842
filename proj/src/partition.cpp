#include "qapkit/partition.hpp"

#include <algorithm>

#include "qapkit/gf2.hpp"

namespace qapkit {

CommutatorPartition commutator_partition(const BiSubalgebra &B) {
    CommutatorPartition out{B, {}};
    const int p = B.p();
    MaximalBiSubalgebraGroup g(B);
    out.blocks.resize(g.count());
    for (uint64_t x = 0; x < (uint64_t(1) << (2 * p)); ++x) out.blocks[g.stabilizer_index(x)].push_back(x);
    return out;
}

CosetPartition coset_partition(const BiSubalgebra &B) { return CosetPartition{B, cosets_of(B)}; }

std::vector<std::vector<uint64_t>> canonical_blocks(std::vector<std::vector<uint64_t>> blocks) {
    std::vector<std::vector<uint64_t>> out;
    for (auto &b : blocks) {
        if (b.empty()) continue;
        std::sort(b.begin(), b.end());
        out.push_back(std::move(b));
    }
    std::sort(out.begin(), out.end());
    return out;
}

int check_duality(const BiSubalgebra &B) {
    auto c = commutator_partition(B);
    auto k = coset_partition(commutant(B));
    return canonical_blocks(c.blocks) == canonical_blocks(k.blocks) ? 1 : 0;
}

uint64_t RefinedPartition::block_index(uint64_t label) const {
    uint64_t idx = 0;
    for (uint64_t f : i_forms) idx = (idx << 1) | uint64_t(__builtin_parityll(f & label));
    for (uint64_t f : s_forms) idx = (idx << 1) | uint64_t(__builtin_parityll(f & label));
    return idx;
}

RefinedPartition refine_by_coset_rule(const CommutatorPartition &P) {
    const BiSubalgebra &B = P.generator;
    const int p = B.p();
    RefinedPartition out;
    out.generator = B;
    // The commutator index as linear forms: i_k(x) = omega(x, b_k).
    for (uint64_t b : B.basis()) out.i_forms.push_back(swap_halves(b, p));
    if (B.order() >= p && is_abelian(B)) {
        // Complete the i-forms to a basis of the annihilator of B using the
        // coordinate forms of the coset index (non-pivot unit vectors).
        std::vector<uint64_t> span = gf2::rref(out.i_forms);
        uint64_t pivots = gf2::pivot_mask(B.basis());
        for (int col = 2 * p - 1; col >= 0; --col) {
            if (pivots & (uint64_t(1) << col)) continue;
            // Coordinate form of the coset index for this column, taken on
            // the reduced representative: x -> bit col of reduce(x, B).
            uint64_t form = uint64_t(1) << col;
            for (uint64_t b : B.basis()) {
                if (b & (uint64_t(1) << col)) form |= uint64_t(1) << gf2::pivot_of(b);
            }
            if (gf2::in_span(form, span)) continue;
            out.s_forms.push_back(form);
            span = gf2::rref([&] {
                auto v = span;
                v.push_back(form);
                return v;
            }());
        }
    }
    out.s_width = int(out.s_forms.size());
    out.blocks.resize(size_t(1) << (out.i_forms.size() + out.s_forms.size()));
    for (uint64_t x = 0; x < (uint64_t(1) << (2 * p)); ++x) out.blocks[out.block_index(x)].push_back(x);
    return out;
}

bool check_commutator_closure(const CommutatorPartition &P) {
    MaximalBiSubalgebraGroup g(P.generator);
    for (size_t i = 0; i < P.blocks.size(); ++i) {
        for (size_t j = 0; j < P.blocks.size(); ++j) {
            for (uint64_t a : P.blocks[i]) {
                for (uint64_t b : P.blocks[j]) {
                    if (g.stabilizer_index(a ^ b) != (i ^ j)) return false;
                }
            }
        }
    }
    return true;
}

}  // namespace qapkit
