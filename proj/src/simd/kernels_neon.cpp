// aarch64 variant. NEON is mandatory on aarch64, so no runtime probe is
// needed beyond the compile-time architecture check.

#include "kernels_impl.hpp"

#include <arm_neon.h>

#include <algorithm>
#include <cmath>

namespace graphon::simd::detail {
namespace {

double min_sum(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) acc = vaddq_f64(acc, vminq_f64(vld1q_f64(a + k), vld1q_f64(b + k)));
  double total = vaddvq_f64(acc);
  for (; k < n; ++k) total += std::min(a[k], b[k]);
  return total;
}

double pull_linear(const double* w, const double* x, double xi, std::size_t n) {
  const float64x2_t vxi = vdupq_n_f64(xi);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(w + j), vsubq_f64(vld1q_f64(x + j), vxi)));
  }
  double total = vaddvq_f64(acc);
  for (; j < n; ++j) total += w[j] * (x[j] - xi);
  return total;
}

double pull_cucker_smale(const double* w, const double* x, double xi,
                         std::size_t n) {
  const float64x2_t vxi = vdupq_n_f64(xi);
  const float64x2_t one = vdupq_n_f64(1.0);
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t j = 0;
  for (; j + 2 <= n; j += 2) {
    const float64x2_t diff = vsubq_f64(vld1q_f64(x + j), vxi);
    const float64x2_t denom = vaddq_f64(one, vabsq_f64(diff));
    const float64x2_t num = vmulq_f64(vld1q_f64(w + j), diff);
    acc = vaddq_f64(acc, vdivq_f64(num, vmulq_f64(denom, denom)));
  }
  double total = vaddvq_f64(acc);
  for (; j < n; ++j) {
    const double diff = x[j] - xi;
    const double denom = 1.0 + std::abs(diff);
    total += w[j] * diff / (denom * denom);
  }
  return total;
}

void rotate(double* p, double* q, double c, double s, std::size_t n) {
  const float64x2_t vc = vdupq_n_f64(c);
  const float64x2_t vs = vdupq_n_f64(s);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    const float64x2_t pk = vld1q_f64(p + k);
    const float64x2_t qk = vld1q_f64(q + k);
    vst1q_f64(p + k, vsubq_f64(vmulq_f64(vc, pk), vmulq_f64(vs, qk)));
    vst1q_f64(q + k, vaddq_f64(vmulq_f64(vs, pk), vmulq_f64(vc, qk)));
  }
  for (; k < n; ++k) {
    const double pk = p[k];
    const double qk = q[k];
    p[k] = c * pk - s * qk;
    q[k] = s * pk + c * qk;
  }
}

double sum(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) acc = vaddq_f64(acc, vld1q_f64(a + k));
  double total = vaddvq_f64(acc);
  for (; k < n; ++k) total += a[k];
  return total;
}

double dot(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) acc = vaddq_f64(acc, vmulq_f64(vld1q_f64(a + k), vld1q_f64(b + k)));
  double total = vaddvq_f64(acc);
  for (; k < n; ++k) total += a[k] * b[k];
  return total;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t k = 0;
  for (; k + 2 <= n; k += 2) {
    vst1q_f64(y + k, vaddq_f64(vld1q_f64(y + k), vmulq_f64(va, vld1q_f64(x + k))));
  }
  for (; k < n; ++k) y[k] += alpha * x[k];
}

constexpr KernelTable kTable{Isa::neon, min_sum, pull_linear,
                             pull_cucker_smale, rotate, sum, dot, axpy};

}  // namespace

const KernelTable& neon_table() { return kTable; }

}  // namespace graphon::simd::detail
