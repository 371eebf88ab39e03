#include "graphon/discretize.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>

#include "graphon/csv.hpp"

namespace graphon {

std::size_t cell_index(double label, std::size_t n) {
  const double c = std::floor(label * static_cast<double>(n));
  if (!(c > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(c), n - 1);
}

namespace {

// Midpoint of sub-interval q of cell k, with m sub-intervals per cell.
double sub_point(std::size_t k, int q, int m, std::size_t n) {
  return (static_cast<double>(k) * m + q + 0.5) / (static_cast<double>(n) * m);
}

// Mean of samples; returns the common value exactly when all samples agree.
class Averager {
 public:
  void add(double v) {
    if (count_ == 0) {
      lo_ = hi_ = v;
    } else {
      lo_ = std::min(lo_, v);
      hi_ = std::max(hi_, v);
    }
    sum_ += v;
    ++count_;
  }
  double mean() const { return lo_ == hi_ ? lo_ : sum_ / count_; }

 private:
  double sum_ = 0.0;
  double lo_ = 0.0, hi_ = 0.0;
  int count_ = 0;
};

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

AdjacencyMatrix sample_adjacency(const TimeKernel& kernel, double t, std::size_t n,
                                 int quadrature_order, bool force_unit_diagonal) {
  if (n == 0) throw std::invalid_argument("sample_adjacency: n must be positive");
  if (quadrature_order <= 0) throw std::invalid_argument("sample_adjacency: bad quadrature order");
  const int m = quadrature_order;
  Matrix w(n);

  if (kernel.row_profile()) {
    const auto& profile = kernel.row_profile();
    std::vector<double> row(n);
    for (std::size_t j = 0; j < n; ++j) {
      Averager avg;
      for (int q = 0; q < m; ++q) avg.add(profile(t, sub_point(j, q, m, n)));
      row[j] = clamp01(avg.mean());
    }
    for (std::size_t i = 0; i < n; ++i) std::copy(row.begin(), row.end(), w.row(i));
  } else if (kernel.factor()) {
    const auto& factor = kernel.factor();
    std::vector<double> f(n);
    for (std::size_t i = 0; i < n; ++i) {
      Averager avg;
      for (int q = 0; q < m; ++q) avg.add(factor(t, sub_point(i, q, m, n)));
      f[i] = avg.mean();
    }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) w(i, j) = clamp01(f[i] * f[j]);
  } else {
    std::vector<double> pts(n * m);
    for (std::size_t k = 0; k < n; ++k)
      for (int q = 0; q < m; ++q) pts[k * m + q] = sub_point(k, q, m, n);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        Averager avg;
        for (int p = 0; p < m; ++p)
          for (int q = 0; q < m; ++q) avg.add(kernel(t, pts[i * m + p], pts[j * m + q]));
        w(i, j) = clamp01(avg.mean());
      }
    }
  }

  AdjacencyMatrix a(std::move(w), t);
  if (force_unit_diagonal) {
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    a.unit_diagonal = true;
  }
  return a;
}

State sample_state(const Profile& profile, std::size_t n, int quadrature_order) {
  if (n == 0) throw std::invalid_argument("sample_state: n must be positive");
  if (quadrature_order <= 0) throw std::invalid_argument("sample_state: bad quadrature order");
  const int m = quadrature_order;
  const std::size_t dim = profile(0.5).size();
  if (dim == 0) throw std::invalid_argument("sample_state: profile has dimension 0");
  State x(n, dim);
  std::vector<Averager> avg(dim);
  for (std::size_t i = 0; i < n; ++i) {
    std::fill(avg.begin(), avg.end(), Averager());
    for (int q = 0; q < m; ++q) {
      const std::vector<double> v = profile(sub_point(i, q, m, n));
      if (v.size() != dim) throw std::invalid_argument("sample_state: inconsistent dimension");
      for (std::size_t c = 0; c < dim; ++c) avg[c].add(v[c]);
    }
    for (std::size_t c = 0; c < dim; ++c) x(i, c) = avg[c].mean();
  }
  return x;
}

TimeKernel lift_piecewise(const AdjacencyMatrix& a) {
  const std::size_t n = a.n();
  if (n == 0) throw std::invalid_argument("lift_piecewise: empty matrix");
  auto w = std::make_shared<Matrix>(a.weights);
  KernelMetadata meta;
  meta.is_stationary = true;
  meta.is_symmetric = true;
  meta.is_balanced = true;
  for (std::size_t i = 0; i < n; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if ((*w)(i, j) != (*w)(j, i)) meta.is_symmetric = false;
      row += (*w)(i, j);
      col += (*w)(j, i);
    }
    if (std::abs(row - col) > 1e-12 * static_cast<double>(n)) meta.is_balanced = false;
  }
  return TimeKernel(
      "piecewise",
      [w, n](double, double i, double j) { return (*w)(cell_index(i, n), cell_index(j, n)); },
      meta);
}

void write_matrix_csv(std::ostream& out, const Matrix& m) {
  for (std::size_t i = 0; i < m.size(); ++i) {
    out << join_csv(std::vector<double>(m.row(i), m.row(i) + m.size())) << '\n';
  }
}

Matrix read_matrix_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_csv_row(line));
  }
  Matrix m(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.size()) throw std::invalid_argument("matrix CSV is not square");
    std::copy(rows[i].begin(), rows[i].end(), m.row(i));
  }
  return m;
}

void write_state_csv(std::ostream& out, const State& x) {
  std::vector<double> row(x.dim());
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t c = 0; c < x.dim(); ++c) row[c] = x(i, c);
    out << join_csv(row) << '\n';
  }
}

State read_state_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    rows.push_back(parse_csv_row(line));
  }
  if (rows.empty()) throw std::invalid_argument("state CSV is empty");
  State x(rows.size(), rows.front().size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != x.dim()) throw std::invalid_argument("state CSV rows differ in width");
    for (std::size_t c = 0; c < x.dim(); ++c) x(i, c) = rows[i][c];
  }
  return x;
}

}  // namespace graphon
