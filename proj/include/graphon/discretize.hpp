#pragma once

// Semi-discretization of graphon models on N uniform label cells, and the
// piecewise-constant lift back to kernels.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <vector>

#include "graphon/kernel.hpp"
#include "graphon/matrix.hpp"

namespace graphon {

struct AdjacencyMatrix {
  Matrix weights;
  double sample_time = 0.0;
  /// Set when the diagonal was forced to 1 after sampling.
  bool unit_diagonal = false;

  AdjacencyMatrix() = default;
  explicit AdjacencyMatrix(Matrix w, double t = 0.0) : weights(std::move(w)), sample_time(t) {}

  std::size_t n() const { return weights.size(); }
  double operator()(std::size_t i, std::size_t j) const { return weights(i, j); }
  double& operator()(std::size_t i, std::size_t j) { return weights(i, j); }
};

/// N agents in R^d, stored coordinate-major so each coordinate is contiguous.
class State {
 public:
  State() = default;
  State(std::size_t n, std::size_t dim, double fill = 0.0)
      : n_(n), dim_(dim), values_(n * dim, fill) {}

  std::size_t n() const { return n_; }
  std::size_t dim() const { return dim_; }

  double& operator()(std::size_t agent, std::size_t coord) { return values_[coord * n_ + agent]; }
  double operator()(std::size_t agent, std::size_t coord) const {
    return values_[coord * n_ + agent];
  }

  double* coord(std::size_t c) { return values_.data() + c * n_; }
  const double* coord(std::size_t c) const { return values_.data() + c * n_; }

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const State& other) const = default;

 private:
  std::size_t n_ = 0;
  std::size_t dim_ = 0;
  std::vector<double> values_;
};

/// Index of the half-open cell [(k-1)/n, k/n) containing `label`; the last
/// cell is closed.
std::size_t cell_index(double label, std::size_t n);

/// Cell averages of kernel(t, ., .) by an m x m midpoint rule per cell.
AdjacencyMatrix sample_adjacency(const TimeKernel& kernel, double t, std::size_t n,
                                 int quadrature_order = 4, bool force_unit_diagonal = false);

using Profile = std::function<std::vector<double>(double label)>;

/// Cell averages of the profile by a midpoint rule with `quadrature_order`
/// points per cell. The dimension is taken from the profile output.
State sample_state(const Profile& profile, std::size_t n, int quadrature_order = 16);

/// Stationary kernel that is constant on each cell pair.
TimeKernel lift_piecewise(const AdjacencyMatrix& a);

/// n rows of n comma-separated values.
void write_matrix_csv(std::ostream& out, const Matrix& m);
Matrix read_matrix_csv(std::istream& in);

/// n rows of d comma-separated values.
void write_state_csv(std::ostream& out, const State& x);
State read_state_csv(std::istream& in);

}  // namespace graphon
