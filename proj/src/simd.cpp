#include "qapkit/simd.hpp"

#include <cstdlib>
#include <cstring>

#if defined(__x86_64__) || defined(_M_X64)
#include <immintrin.h>
#define QAPKIT_X86 1
#endif

namespace qapkit::simd {

void parity_dot_batch_scalar(const uint64_t *rows, size_t n, uint64_t mask, uint8_t *out) {
    for (size_t k = 0; k < n; ++k) out[k] = uint8_t(__builtin_parityll(rows[k] & mask));
}

size_t parity_dot_count_scalar(const uint64_t *rows, size_t n, uint64_t mask) {
    size_t c = 0;
    for (size_t k = 0; k < n; ++k) c += size_t(__builtin_parityll(rows[k] & mask));
    return c;
}

#ifdef QAPKIT_X86

bool avx2_available() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2");
}

// Fold each 64-bit lane down to its parity bit (bit 0 of the lane).
__attribute__((target("avx2"))) static inline __m256i lane_parity(__m256i v) {
    v = _mm256_xor_si256(v, _mm256_srli_epi64(v, 32));
    v = _mm256_xor_si256(v, _mm256_srli_epi64(v, 16));
    v = _mm256_xor_si256(v, _mm256_srli_epi64(v, 8));
    v = _mm256_xor_si256(v, _mm256_srli_epi64(v, 4));
    v = _mm256_xor_si256(v, _mm256_srli_epi64(v, 2));
    v = _mm256_xor_si256(v, _mm256_srli_epi64(v, 1));
    return _mm256_and_si256(v, _mm256_set1_epi64x(1));
}

__attribute__((target("avx2"))) void parity_dot_batch_avx2(const uint64_t *rows, size_t n, uint64_t mask,
                                                           uint8_t *out) {
    const __m256i m = _mm256_set1_epi64x(int64_t(mask));
    size_t k = 0;
    alignas(32) uint64_t lanes[4];
    for (; k + 4 <= n; k += 4) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(rows + k));
        __m256i par = lane_parity(_mm256_and_si256(v, m));
        _mm256_store_si256(reinterpret_cast<__m256i *>(lanes), par);
        out[k] = uint8_t(lanes[0]);
        out[k + 1] = uint8_t(lanes[1]);
        out[k + 2] = uint8_t(lanes[2]);
        out[k + 3] = uint8_t(lanes[3]);
    }
    parity_dot_batch_scalar(rows + k, n - k, mask, out + k);
}

__attribute__((target("avx2"))) size_t parity_dot_count_avx2(const uint64_t *rows, size_t n, uint64_t mask) {
    const __m256i m = _mm256_set1_epi64x(int64_t(mask));
    __m256i acc = _mm256_setzero_si256();
    size_t k = 0;
    for (; k + 4 <= n; k += 4) {
        __m256i v = _mm256_loadu_si256(reinterpret_cast<const __m256i *>(rows + k));
        acc = _mm256_add_epi64(acc, lane_parity(_mm256_and_si256(v, m)));
    }
    alignas(32) uint64_t lanes[4];
    _mm256_store_si256(reinterpret_cast<__m256i *>(lanes), acc);
    return size_t(lanes[0] + lanes[1] + lanes[2] + lanes[3]) + parity_dot_count_scalar(rows + k, n - k, mask);
}

#else

bool avx2_available() { return false; }
void parity_dot_batch_avx2(const uint64_t *rows, size_t n, uint64_t mask, uint8_t *out) {
    parity_dot_batch_scalar(rows, n, mask, out);
}
size_t parity_dot_count_avx2(const uint64_t *rows, size_t n, uint64_t mask) {
    return parity_dot_count_scalar(rows, n, mask);
}

#endif

namespace {

struct Dispatch {
    Backend backend = Backend::Scalar;
    void (*batch)(const uint64_t *, size_t, uint64_t, uint8_t *) = parity_dot_batch_scalar;
    size_t (*count)(const uint64_t *, size_t, uint64_t) = parity_dot_count_scalar;

    Dispatch() {
        const char *forced = std::getenv("QAPKIT_SIMD");
        bool want_scalar = forced != nullptr && std::strcmp(forced, "scalar") == 0;
        if (!want_scalar && avx2_available()) {
            backend = Backend::Avx2;
            batch = parity_dot_batch_avx2;
            count = parity_dot_count_avx2;
        }
    }
};

const Dispatch &dispatch() {
    static const Dispatch d;
    return d;
}

}  // namespace

void parity_dot_batch(const uint64_t *rows, size_t n, uint64_t mask, uint8_t *out) {
    dispatch().batch(rows, n, mask, out);
}

size_t parity_dot_count(const uint64_t *rows, size_t n, uint64_t mask) { return dispatch().count(rows, n, mask); }

Backend active_backend() { return dispatch().backend; }

std::string backend_name(Backend b) { return b == Backend::Avx2 ? "avx2" : "scalar"; }

}  // namespace qapkit::simd
