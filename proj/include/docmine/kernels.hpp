#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace docmine {

enum class Isa { scalar, avx2, neon };

std::string_view to_string(Isa isa) noexcept;
Isa parse_isa(std::string_view name);

/// Inner loops used by the index, normalization and pooling.
///
/// All variants take float32 inputs and accumulate in float64. The products
/// of two floats are exact in double, so variants differ only in summation
/// order (relative error ~1e-15), which keeps top-k rankings stable across
/// ISAs except for near-exact ties. Within one variant, dot(a, b) is
/// bit-identical however a row is reached (single call or a tile), which is
/// what makes search results independent of block size and worker count.
struct KernelTable {
  Isa isa;
  double (*dot)(const float* a, const float* b, std::size_t n);
  double (*squared_norm)(const float* a, std::size_t n);
  /// acc[i] += weight * x[i]
  void (*accumulate_scaled)(double* acc, const float* x, double weight, std::size_t n);
  /// out[q * n_rows + r] = dot(queries + q * dim, rows + r * dim)
  void (*dot_tile)(const float* queries, std::size_t n_queries, const float* rows,
                   std::size_t n_rows, std::size_t dim, double* out);
};

/// Variant in use. Chosen once from DOCMINE_ISA (if set) or CPU detection.
const KernelTable& kernels();

/// Throws Error(invalid_argument) if `isa` was not compiled in or the CPU
/// lacks it.
const KernelTable& kernel_table(Isa isa);

bool isa_supported(Isa isa) noexcept;
std::vector<Isa> supported_isas();
Isa detect_isa() noexcept;

/// Overrides the active variant process-wide (CLI flag, tests).
void set_active_isa(Isa isa);

}  // namespace docmine
