#include <arm_neon.h>

#include "variants.hpp"

namespace docmine::detail {
namespace {

inline double tail(const float* a, const float* b, std::size_t from, std::size_t n,
                   double sum) {
  for (std::size_t i = from; i < n; ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

// Two float64x2 accumulators over 4-float steps; reduced as
// (lo0 + hi0) + (lo1 + hi1) everywhere.
inline double reduce(float64x2_t lo, float64x2_t hi) {
  return (vgetq_lane_f64(lo, 0) + vgetq_lane_f64(lo, 1)) +
         (vgetq_lane_f64(hi, 0) + vgetq_lane_f64(hi, 1));
}

double dot(const float* a, const float* b, std::size_t n) {
  float64x2_t lo = vdupq_n_f64(0.0), hi = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const float32x4_t x = vld1q_f32(a + i);
    const float32x4_t y = vld1q_f32(b + i);
    lo = vfmaq_f64(lo, vcvt_f64_f32(vget_low_f32(x)), vcvt_f64_f32(vget_low_f32(y)));
    hi = vfmaq_f64(hi, vcvt_high_f64_f32(x), vcvt_high_f64_f32(y));
  }
  return tail(a, b, i, n, reduce(lo, hi));
}

double squared_norm(const float* a, std::size_t n) { return dot(a, a, n); }

void accumulate_scaled(double* acc, const float* x, double weight, std::size_t n) {
  const float64x2_t w = vdupq_n_f64(weight);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    const float64x2_t v = vcvt_f64_f32(vld1_f32(x + i));
    vst1q_f64(acc + i, vfmaq_f64(vld1q_f64(acc + i), w, v));
  }
  for (; i < n; ++i) acc[i] += weight * static_cast<double>(x[i]);
}

void dot_tile(const float* queries, std::size_t n_queries, const float* rows,
              std::size_t n_rows, std::size_t dim, double* out) {
  for (std::size_t q = 0; q < n_queries; ++q) {
    for (std::size_t r = 0; r < n_rows; ++r) {
      out[q * n_rows + r] = dot(queries + q * dim, rows + r * dim, dim);
    }
  }
}

}  // namespace

const KernelTable& neon_kernels() {
  static const KernelTable table{Isa::neon, dot, squared_norm, accumulate_scaled, dot_tile};
  return table;
}

}  // namespace docmine::detail
