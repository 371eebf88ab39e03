#include "graphon/matrix.hpp"

#include <stdexcept>

namespace graphon {

Matrix Matrix::transposed() const {
  Matrix t(n_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

Matrix Matrix::blend(const Matrix& a, const Matrix& b, double zeta) {
  if (a.size() != b.size()) throw std::invalid_argument("Matrix::blend: size mismatch");
  Matrix out(a.size());
  for (std::size_t k = 0; k < a.data_.size(); ++k) {
    out.data_[k] = (1.0 - zeta) * a.data_[k] + zeta * b.data_[k];
  }
  return out;
}

}  // namespace graphon
