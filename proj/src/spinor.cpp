#include "qapkit/spinor.hpp"

#include <unsupported/Eigen/KroneckerProduct>

namespace qapkit {

Spinor::Spinor(int p_, uint32_t zeta_, uint32_t alpha_) : p(p_), zeta(zeta_), alpha(alpha_) {
    if (p < 1 || p > kMaxQubits) {
        throw DimensionError("spinor: p out of range: " + std::to_string(p));
    }
    uint32_t mask = (uint32_t(1) << p) - 1;
    if ((zeta & ~mask) || (alpha & ~mask)) {
        throw DimensionError("spinor: bit string wider than p");
    }
}

Spinor Spinor::from_label(int p, uint64_t label) {
    uint64_t lo = (uint64_t(1) << p) - 1;
    return Spinor(p, uint32_t(label >> p), uint32_t(label & lo));
}

std::string bits_to_string(uint64_t v, int width) {
    std::string s(width, '0');
    for (int k = 0; k < width; ++k) {
        if ((v >> (width - 1 - k)) & 1) s[k] = '1';
    }
    return s;
}

uint64_t string_to_bits(const std::string &s) {
    uint64_t v = 0;
    for (char c : s) {
        if (c != '0' && c != '1') throw std::invalid_argument("bad bit string: " + s);
        v = (v << 1) | uint64_t(c == '1');
    }
    return v;
}

std::string Spinor::str() const { return "S[" + bits_to_string(zeta, p) + "|" + bits_to_string(alpha, p) + "]"; }

Spinor Spinor::parse(const std::string &text) {
    if (text.size() < 5 || text.rfind("S[", 0) != 0 || text.back() != ']') {
        throw std::invalid_argument("bad spinor literal: " + text);
    }
    auto bar = text.find('|');
    if (bar == std::string::npos) throw std::invalid_argument("bad spinor literal: " + text);
    std::string z = text.substr(2, bar - 2);
    std::string a = text.substr(bar + 1, text.size() - bar - 2);
    if (z.size() != a.size() || z.empty()) {
        throw DimensionError("spinor literal halves differ in length: " + text);
    }
    return Spinor(int(z.size()), uint32_t(string_to_bits(z)), uint32_t(string_to_bits(a)));
}

static void check_same_p(const Spinor &a, const Spinor &b) {
    if (a.p != b.p) throw DimensionError("mismatched p: " + std::to_string(a.p) + " vs " + std::to_string(b.p));
}

Spinor bi_add(const Spinor &a, const Spinor &b) {
    check_same_p(a, b);
    return Spinor(a.p, a.zeta ^ b.zeta, a.alpha ^ b.alpha);
}

int commutes(const Spinor &a, const Spinor &b) {
    check_same_p(a, b);
    return 1 - (parity64(a.zeta & b.alpha) ^ parity64(b.zeta & a.alpha));
}

int epsilon_parity(const Spinor &a) { return 1 ^ parity64(a.zeta & a.alpha); }

CMat matrix_of(const Spinor &a) {
    if (a.p > kMaxMatrixQubits) {
        throw CapacityError("matrix_of: p=" + std::to_string(a.p) + " exceeds cap " + std::to_string(kMaxMatrixQubits));
    }
    const cplx I(0, 1);
    CMat out = CMat::Identity(1, 1);
    for (int j = 0; j < a.p; ++j) {
        int z = (a.zeta >> (a.p - 1 - j)) & 1;
        int x = (a.alpha >> (a.p - 1 - j)) & 1;
        Eigen::Matrix2cd f;
        if (!z && !x) {
            f << 1, 0, 0, 1;
        } else if (z && !x) {
            f << 1, 0, 0, -1;
        } else if (!z && x) {
            f << 0, 1, 1, 0;
        } else {
            f << 0, -I, I, 0;
        }
        CMat next = Eigen::kroneckerProduct(out, f).eval();
        out = std::move(next);
    }
    return out;
}

}  // namespace qapkit
