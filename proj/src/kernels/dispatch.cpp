#include <atomic>
#include <cstdlib>
#include <string>

#include "docmine/error.hpp"
#include "variants.hpp"

namespace docmine {
namespace {

const KernelTable* initial_table() {
  if (const char* forced = std::getenv("DOCMINE_ISA"); forced && *forced) {
    return &kernel_table(parse_isa(forced));
  }
  return &kernel_table(detect_isa());
}

std::atomic<const KernelTable*>& active() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "scalar";
}

Isa parse_isa(std::string_view name) {
  if (name == "scalar") return Isa::scalar;
  if (name == "avx2") return Isa::avx2;
  if (name == "neon") return Isa::neon;
  throw Error(Errc::invalid_argument, "kernels", "unknown ISA '" + std::string(name) + "'",
              ErrorKind::validation);
}

bool isa_supported(Isa isa) noexcept {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(DOCMINE_HAVE_AVX2)
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
    case Isa::neon:
#if defined(DOCMINE_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

std::vector<Isa> supported_isas() {
  std::vector<Isa> out;
  for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon}) {
    if (isa_supported(isa)) out.push_back(isa);
  }
  return out;
}

Isa detect_isa() noexcept {
  if (isa_supported(Isa::avx2)) return Isa::avx2;
  if (isa_supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

const KernelTable& kernel_table(Isa isa) {
  if (!isa_supported(isa)) {
    throw Error(Errc::invalid_argument, "kernels",
                "ISA '" + std::string(to_string(isa)) + "' is not available on this host",
                ErrorKind::validation);
  }
  switch (isa) {
#if defined(DOCMINE_HAVE_AVX2)
    case Isa::avx2: return detail::avx2_kernels();
#endif
#if defined(DOCMINE_HAVE_NEON)
    case Isa::neon: return detail::neon_kernels();
#endif
    default: return detail::scalar_kernels();
  }
}

const KernelTable& kernels() { return *active().load(std::memory_order_acquire); }

void set_active_isa(Isa isa) { active().store(&kernel_table(isa), std::memory_order_release); }

}  // namespace docmine
