#include "qapkit/gf2.hpp"

#include <algorithm>
#include <stdexcept>

namespace qapkit::gf2 {

std::vector<uint64_t> rref(std::vector<uint64_t> rows) {
    std::vector<uint64_t> out;
    for (uint64_t r : rows) {
        for (uint64_t b : out) {
            if (r & (uint64_t(1) << pivot_of(b))) r ^= b;
        }
        if (!r) continue;
        int pv = pivot_of(r);
        for (uint64_t &b : out) {
            if (b & (uint64_t(1) << pv)) b ^= r;
        }
        out.push_back(r);
    }
    std::sort(out.begin(), out.end(), [](uint64_t a, uint64_t b) { return pivot_of(a) > pivot_of(b); });
    return out;
}

uint64_t reduce(uint64_t x, const std::vector<uint64_t> &basis) {
    for (uint64_t b : basis) {
        if (x & (uint64_t(1) << pivot_of(b))) x ^= b;
    }
    return x;
}

uint64_t coords(uint64_t x, const std::vector<uint64_t> &basis) {
    uint64_t c = 0;
    const size_t d = basis.size();
    for (size_t j = 0; j < d; ++j) {
        if (x & (uint64_t(1) << pivot_of(basis[j]))) {
            x ^= basis[j];
            c |= uint64_t(1) << (d - 1 - j);
        }
    }
    return c;
}

uint64_t combine(uint64_t c, const std::vector<uint64_t> &basis) {
    uint64_t x = 0;
    const size_t d = basis.size();
    for (size_t j = 0; j < d; ++j) {
        if ((c >> (d - 1 - j)) & 1) x ^= basis[j];
    }
    return x;
}

std::vector<uint64_t> span_elements(const std::vector<uint64_t> &basis) {
    std::vector<uint64_t> out(size_t(1) << basis.size());
    for (uint64_t c = 0; c < out.size(); ++c) out[c] = combine(c, basis);
    return out;
}

std::vector<uint64_t> annihilator(const std::vector<uint64_t> &rows, int width) {
    // Solve M y = 0 via the RREF of M: free columns parametrize the kernel.
    std::vector<uint64_t> m = rref(rows);
    uint64_t pivots = pivot_mask(m);
    std::vector<uint64_t> out;
    for (int col = width - 1; col >= 0; --col) {
        if (pivots & (uint64_t(1) << col)) continue;
        uint64_t y = uint64_t(1) << col;
        for (uint64_t r : m) {
            if (r & (uint64_t(1) << col)) y |= uint64_t(1) << pivot_of(r);
        }
        out.push_back(y);
    }
    return rref(out);
}

std::vector<uint64_t> intersect(const std::vector<uint64_t> &a, const std::vector<uint64_t> &b, int width) {
    // A ∩ B = (A^0 + B^0)^0 under the dot-product pairing.
    std::vector<uint64_t> dual = annihilator(a, width);
    std::vector<uint64_t> db = annihilator(b, width);
    dual.insert(dual.end(), db.begin(), db.end());
    return annihilator(dual, width);
}

uint64_t pivot_mask(const std::vector<uint64_t> &basis) {
    uint64_t m = 0;
    for (uint64_t b : basis) m |= uint64_t(1) << pivot_of(b);
    return m;
}

uint64_t nonpivot_bits(uint64_t x, uint64_t pivots, int width) {
    uint64_t out = 0;
    for (int col = width - 1; col >= 0; --col) {
        if (pivots & (uint64_t(1) << col)) continue;
        out = (out << 1) | ((x >> col) & 1);
    }
    return out;
}

std::vector<uint64_t> dual_basis(const std::vector<uint64_t> &v, int width) {
    if (int(v.size()) != width) throw std::invalid_argument("dual_basis: need a full basis");
    // Gauss-Jordan on [V | I]; the row with pivot column c carries row c of V^{-1}.
    struct Row {
        uint64_t lhs, rhs;
    };
    std::vector<Row> rows;
    for (int j = 0; j < width; ++j) rows.push_back({v[j], uint64_t(1) << j});
    std::vector<uint64_t> inv_row(width, 0);
    std::vector<bool> used(width, false);
    for (int c = 0; c < width; ++c) {
        int sel = -1;
        for (int j = 0; j < width; ++j) {
            if (!used[j] && ((rows[j].lhs >> c) & 1)) {
                sel = j;
                break;
            }
        }
        if (sel < 0) throw std::invalid_argument("dual_basis: vectors are dependent");
        used[sel] = true;
        for (int j = 0; j < width; ++j) {
            if (j != sel && ((rows[j].lhs >> c) & 1)) {
                rows[j].lhs ^= rows[sel].lhs;
                rows[j].rhs ^= rows[sel].rhs;
            }
        }
    }
    for (int j = 0; j < width; ++j) inv_row[__builtin_ctzll(rows[j].lhs)] = rows[j].rhs;
    // g_k bit c = Vinv[c][k].
    std::vector<uint64_t> g(width, 0);
    for (int c = 0; c < width; ++c) {
        for (int k = 0; k < width; ++k) {
            if ((inv_row[c] >> k) & 1) g[k] |= uint64_t(1) << c;
        }
    }
    return g;
}

bool solve(const std::vector<uint64_t> &rows, const std::vector<int> &rhs, uint64_t &x) {
    std::vector<uint64_t> aug;
    for (size_t k = 0; k < rows.size(); ++k) aug.push_back((rows[k] << 1) | uint64_t(rhs[k] & 1));
    auto r = rref(aug);
    x = 0;
    for (uint64_t row : r) {
        int pv = pivot_of(row);
        if (pv == 0) return false;
        if (row & 1) x |= uint64_t(1) << (pv - 1);
    }
    return true;
}

}  // namespace qapkit::gf2
