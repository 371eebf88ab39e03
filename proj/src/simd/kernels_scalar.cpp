#include "graphon/simd/kernels.hpp"
#include "kernels_impl.hpp"

#include <algorithm>
#include <cmath>

namespace graphon::simd {
namespace {

double min_sum(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += std::min(a[k], b[k]);
  return acc;
}

double pull_linear(const double* w, const double* x, double xi, std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) acc += w[j] * (x[j] - xi);
  return acc;
}

double pull_cucker_smale(const double* w, const double* x, double xi,
                         std::size_t n) {
  double acc = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double diff = x[j] - xi;
    const double denom = 1.0 + std::abs(diff);
    acc += w[j] * diff / (denom * denom);
  }
  return acc;
}

void rotate(double* p, double* q, double c, double s, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    const double pk = p[k];
    const double qk = q[k];
    p[k] = c * pk - s * qk;
    q[k] = s * pk + c * qk;
  }
}

double sum(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k];
  return acc;
}

double dot(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

void axpy(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) y[k] += alpha * x[k];
}

constexpr KernelTable kTable{Isa::scalar, min_sum, pull_linear,
                             pull_cucker_smale, rotate, sum, dot, axpy};

}  // namespace

const KernelTable& scalar_table() { return kTable; }

}  // namespace graphon::simd
