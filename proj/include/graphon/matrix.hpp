#pragma once

#include <cstddef>
#include <vector>

namespace graphon {

/// Dense row-major square matrix.
class Matrix {
 public:
  Matrix() = default;
  explicit Matrix(std::size_t n, double fill = 0.0) : n_(n), data_(n * n, fill) {}

  std::size_t size() const { return n_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * n_ + j]; }

  double* row(std::size_t i) { return data_.data() + i * n_; }
  const double* row(std::size_t i) const { return data_.data() + i * n_; }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }

  Matrix transposed() const;

  /// (1 - zeta) * a + zeta * b
  static Matrix blend(const Matrix& a, const Matrix& b, double zeta);

  bool operator==(const Matrix& other) const = default;

 private:
  std::size_t n_ = 0;
  std::vector<double> data_;
};

}  // namespace graphon
