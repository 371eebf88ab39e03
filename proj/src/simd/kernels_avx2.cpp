// Compiled with -mavx2. Only reached after dispatch has confirmed the CPU
// supports AVX2.

#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>
#include <cmath>

namespace graphon::simd::detail {
namespace {

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  const __m128d sh = _mm_unpackhi_pd(s, s);
  return _mm_cvtsd_f64(_mm_add_sd(s, sh));
}

double min_sum(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_min_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
    acc1 = _mm256_add_pd(acc1, _mm256_min_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4)));
  }
  for (; k + 4 <= n; k += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_min_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += std::min(a[k], b[k]);
  return acc;
}

double pull_linear(const double* w, const double* x, double xi, std::size_t n) {
  const __m256d vxi = _mm256_set1_pd(xi);
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 8 <= n; j += 8) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + j), vxi);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + j + 4), vxi);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(w + j), d0));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(w + j + 4), d1));
  }
  for (; j + 4 <= n; j += 4) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + j), vxi);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(w + j), d0));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; j < n; ++j) acc += w[j] * (x[j] - xi);
  return acc;
}

double pull_cucker_smale(const double* w, const double* x, double xi,
                         std::size_t n) {
  const __m256d vxi = _mm256_set1_pd(xi);
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d acc = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + 4 <= n; j += 4) {
    const __m256d diff = _mm256_sub_pd(_mm256_loadu_pd(x + j), vxi);
    const __m256d denom = _mm256_add_pd(one, _mm256_and_pd(diff, abs_mask));
    const __m256d num = _mm256_mul_pd(_mm256_loadu_pd(w + j), diff);
    acc = _mm256_add_pd(acc, _mm256_div_pd(num, _mm256_mul_pd(denom, denom)));
  }
  double total = hsum(acc);
  for (; j < n; ++j) {
    const double diff = x[j] - xi;
    const double denom = 1.0 + std::abs(diff);
    total += w[j] * diff / (denom * denom);
  }
  return total;
}

void rotate(double* p, double* q, double c, double s, std::size_t n) {
  const __m256d vc = _mm256_set1_pd(c);
  const __m256d vs = _mm256_set1_pd(s);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d pk = _mm256_loadu_pd(p + k);
    const __m256d qk = _mm256_loadu_pd(q + k);
    _mm256_storeu_pd(p + k, _mm256_sub_pd(_mm256_mul_pd(vc, pk), _mm256_mul_pd(vs, qk)));
    _mm256_storeu_pd(q + k, _mm256_add_pd(_mm256_mul_pd(vs, pk), _mm256_mul_pd(vc, qk)));
  }
  for (; k < n; ++k) {
    const double pk = p[k];
    const double qk = q[k];
    p[k] = c * pk - s * qk;
    q[k] = s * pk + c * qk;
  }
}

double sum(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + k));
  double total = hsum(acc);
  for (; k < n; ++k) total += a[k];
  return total;
}

double dot(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(a + k + 4), _mm256_loadu_pd(b + k + 4)));
  }
  for (; k + 4 <= n; k += 4) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k)));
  }
  double total = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) total += a[k] * b[k];
  return total;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_loadu_pd(y + k),
                                          _mm256_mul_pd(va, _mm256_loadu_pd(x + k))));
  }
  for (; k < n; ++k) y[k] += alpha * x[k];
}

constexpr KernelTable kTable{Isa::avx2, min_sum, pull_linear,
                             pull_cucker_smale, rotate, sum, dot, axpy};

}  // namespace

const KernelTable& avx2_table() { return kTable; }

}  // namespace graphon::simd::detail
