#pragma once

// Data-parallel inner loops used by the spectral and dynamics modules.
//
// Every kernel has a scalar reference implementation; vectorized variants
// (AVX2 on x86-64, NEON on aarch64) are compiled in separate translation units
// and selected once at runtime. Reductions in the vectorized variants use a
// different summation order than the reference, so callers that need
// bit-for-bit reproducibility across machines should pin the ISA with
// GRAPHON_SIMD=scalar.

#include <cstddef>
#include <string_view>

namespace graphon::simd {

enum class Isa { scalar, avx2, neon };

struct KernelTable {
  Isa isa;

  /// sum_k min(a[k], b[k])
  double (*min_sum)(const double* a, const double* b, std::size_t n);

  /// sum_j w[j] * (x[j] - xi)
  double (*pull_linear)(const double* w, const double* x, double xi,
                        std::size_t n);

  /// sum_j w[j] * (x[j] - xi) / (1 + |x[j] - xi|)^2
  double (*pull_cucker_smale)(const double* w, const double* x, double xi,
                              std::size_t n);

  /// In-place plane rotation: p <- c p - s q, q <- s p + c q.
  void (*rotate)(double* p, double* q, double c, double s, std::size_t n);

  double (*sum)(const double* a, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);

  /// y <- y + alpha x
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
};

const KernelTable& scalar_table();

/// Table for `isa`, or nullptr if that variant was not compiled in or the
/// running CPU lacks the instructions.
const KernelTable* table_for(Isa isa);

bool supported(Isa isa);

/// Kernel table in use. Chosen on first call: the GRAPHON_SIMD environment
/// variable (scalar | avx2 | neon | auto) wins, otherwise the widest
/// supported ISA.
const KernelTable& active();

/// Overrides the runtime choice. Throws std::invalid_argument when `isa` is
/// not supported on this machine.
void select(Isa isa);

std::string_view name(Isa isa);

}  // namespace graphon::simd
