#include <immintrin.h>

#include "variants.hpp"

namespace docmine::detail {
namespace {

inline __m256d widen(const float* p) { return _mm256_cvtps_pd(_mm_loadu_ps(p)); }

// Fixed lane order: (l0 + l1) + (l2 + l3). Every entry point reduces this
// way so a dot product has one value regardless of which path produced it.
inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

inline double tail(const float* a, const float* b, std::size_t from, std::size_t n,
                   double sum) {
  for (std::size_t i = from; i < n; ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

double dot(const float* a, const float* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_fmadd_pd(widen(a + i), widen(b + i), acc);
  return tail(a, b, i, n, hsum(acc));
}

double squared_norm(const float* a, std::size_t n) { return dot(a, a, n); }

void accumulate_scaled(double* acc, const float* x, double weight, std::size_t n) {
  const __m256d w = _mm256_set1_pd(weight);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    _mm256_storeu_pd(acc + i, _mm256_fmadd_pd(w, widen(x + i), _mm256_loadu_pd(acc + i)));
  }
  for (; i < n; ++i) acc[i] += weight * static_cast<double>(x[i]);
}

// One query against four rows at a time; each row keeps its own
// accumulator so results match dot() bit for bit.
void dot_tile(const float* queries, std::size_t n_queries, const float* rows,
              std::size_t n_rows, std::size_t dim, double* out) {
  const std::size_t body = dim & ~std::size_t{3};
  for (std::size_t q = 0; q < n_queries; ++q) {
    const float* qv = queries + q * dim;
    double* dst = out + q * n_rows;
    std::size_t r = 0;
    for (; r + 4 <= n_rows; r += 4) {
      const float* r0 = rows + r * dim;
      const float* r1 = r0 + dim;
      const float* r2 = r1 + dim;
      const float* r3 = r2 + dim;
      __m256d a0 = _mm256_setzero_pd(), a1 = _mm256_setzero_pd();
      __m256d a2 = _mm256_setzero_pd(), a3 = _mm256_setzero_pd();
      for (std::size_t i = 0; i < body; i += 4) {
        const __m256d x = widen(qv + i);
        a0 = _mm256_fmadd_pd(x, widen(r0 + i), a0);
        a1 = _mm256_fmadd_pd(x, widen(r1 + i), a1);
        a2 = _mm256_fmadd_pd(x, widen(r2 + i), a2);
        a3 = _mm256_fmadd_pd(x, widen(r3 + i), a3);
      }
      dst[r] = tail(qv, r0, body, dim, hsum(a0));
      dst[r + 1] = tail(qv, r1, body, dim, hsum(a1));
      dst[r + 2] = tail(qv, r2, body, dim, hsum(a2));
      dst[r + 3] = tail(qv, r3, body, dim, hsum(a3));
    }
    for (; r < n_rows; ++r) dst[r] = dot(qv, rows + r * dim, dim);
  }
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::avx2, dot, squared_norm, accumulate_scaled, dot_tile};
  return table;
}

}  // namespace docmine::detail
