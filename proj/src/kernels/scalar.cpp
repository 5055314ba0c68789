#include "variants.hpp"

namespace docmine::detail {
namespace {

double dot(const float* a, const float* b, std::size_t n) {
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  }
  return sum;
}

double squared_norm(const float* a, std::size_t n) { return dot(a, a, n); }

void accumulate_scaled(double* acc, const float* x, double weight, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) acc[i] += weight * static_cast<double>(x[i]);
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

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::scalar, dot, squared_norm, accumulate_scaled, dot_tile};
  return table;
}

}  // namespace docmine::detail
