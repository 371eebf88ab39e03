#include "graphon/simd/kernels.hpp"
#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

#if defined(__x86_64__) || defined(_M_X64)
#include <cpuid.h>
#endif

namespace graphon::simd {
namespace {

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
  unsigned eax = 0, ebx = 0, ecx = 0, edx = 0;
  if (!__get_cpuid(1, &eax, &ebx, &ecx, &edx)) return false;
  const bool osxsave = (ecx & (1u << 27)) != 0;
  const bool avx = (ecx & (1u << 28)) != 0;
  if (!osxsave || !avx) return false;
  // The OS must save the YMM state.
  unsigned xcr0_lo = 0, xcr0_hi = 0;
  __asm__("xgetbv" : "=a"(xcr0_lo), "=d"(xcr0_hi) : "c"(0));
  if ((xcr0_lo & 0x6u) != 0x6u) return false;
  if (!__get_cpuid_count(7, 0, &eax, &ebx, &ecx, &edx)) return false;
  return (ebx & (1u << 5)) != 0;
#else
  return false;
#endif
}

const KernelTable* best_table() {
#if defined(GRAPHON_HAVE_AVX2_TU)
  if (cpu_has_avx2()) return &detail::avx2_table();
#endif
#if defined(GRAPHON_HAVE_NEON_TU)
  return &detail::neon_table();
#endif
  return &scalar_table();
}

const KernelTable* initial_table() {
  const char* env = std::getenv("GRAPHON_SIMD");
  if (env == nullptr) return best_table();
  const std::string choice(env);
  if (choice == "scalar") return &scalar_table();
  if (choice == "avx2" && supported(Isa::avx2)) return table_for(Isa::avx2);
  if (choice == "neon" && supported(Isa::neon)) return table_for(Isa::neon);
  return best_table();
}

std::atomic<const KernelTable*>& current() {
  static std::atomic<const KernelTable*> table{initial_table()};
  return table;
}

}  // namespace

const KernelTable* table_for(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return &scalar_table();
    case Isa::avx2:
#if defined(GRAPHON_HAVE_AVX2_TU)
      if (cpu_has_avx2()) return &detail::avx2_table();
#endif
      return nullptr;
    case Isa::neon:
#if defined(GRAPHON_HAVE_NEON_TU)
      return &detail::neon_table();
#else
      return nullptr;
#endif
  }
  return nullptr;
}

bool supported(Isa isa) { return table_for(isa) != nullptr; }

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

void select(Isa isa) {
  const KernelTable* table = table_for(isa);
  if (table == nullptr) {
    throw std::invalid_argument("SIMD variant not available: " + std::string(name(isa)));
  }
  current().store(table, std::memory_order_release);
}

std::string_view name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
    case Isa::neon:
      return "neon";
  }
  return "unknown";
}

}  // namespace graphon::simd
