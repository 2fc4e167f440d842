// Batch GF(2) kernels with a scalar reference and an AVX2 variant selected at
// runtime. All variants must produce identical outputs.
#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace qapkit::simd {

enum class Backend { Scalar, Avx2 };

/// out[k] = parity(rows[k] & mask), for k < n.
void parity_dot_batch(const uint64_t *rows, size_t n, uint64_t mask, uint8_t *out);

/// Number of k < n with parity(rows[k] & mask) == 1.
size_t parity_dot_count(const uint64_t *rows, size_t n, uint64_t mask);

/// Explicit variants (for equivalence tests and benchmarking).
void parity_dot_batch_scalar(const uint64_t *rows, size_t n, uint64_t mask, uint8_t *out);
size_t parity_dot_count_scalar(const uint64_t *rows, size_t n, uint64_t mask);
bool avx2_available();
void parity_dot_batch_avx2(const uint64_t *rows, size_t n, uint64_t mask, uint8_t *out);
size_t parity_dot_count_avx2(const uint64_t *rows, size_t n, uint64_t mask);

/// Backend chosen by the dispatcher. Setting QAPKIT_SIMD=scalar in the
/// environment forces the reference path.
Backend active_backend();
std::string backend_name(Backend b);

}  // namespace qapkit::simd
