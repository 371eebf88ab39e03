#include "graphon/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include "graphon/errors.hpp"
#include "graphon/simd/kernels.hpp"

namespace graphon {

namespace {

bool row_less(const double* a, const double* b, std::size_t n) {
  return std::lexicographical_compare(a, a + n, b, b + n);
}

bool row_equal(const double* a, const double* b, std::size_t n) {
  return std::equal(a, a + n, b);
}

}  // namespace

double scrambling(const AdjacencyMatrix& a) {
  const std::size_t n = a.n();
  if (n == 0) throw std::invalid_argument("scrambling: empty matrix");
  const auto& k = simd::active();
  if (n == 1) return k.min_sum(a.weights.row(0), a.weights.row(0), 1);

  // Identical rows give identical pair values, so pairs are evaluated once
  // per distinct row pair.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return row_less(a.weights.row(x), a.weights.row(y), n);
  });
  std::vector<const double*> distinct;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t s = 0; s < n;) {
    std::size_t e = s + 1;
    while (e < n && row_equal(a.weights.row(order[s]), a.weights.row(order[e]), n)) ++e;
    const double* r = a.weights.row(order[s]);
    if (e - s >= 2) best = std::min(best, k.min_sum(r, r, n));
    distinct.push_back(r);
    s = e;
  }
  for (std::size_t p = 0; p < distinct.size(); ++p)
    for (std::size_t q = p + 1; q < distinct.size(); ++q)
      best = std::min(best, k.min_sum(distinct[p], distinct[q], n));
  return best / static_cast<double>(n);
}

double scrambling_offdiag(const AdjacencyMatrix& a) {
  const std::size_t n = a.n();
  if (n < 2) return scrambling(a);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      double s = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        if (k != i && k != j) s += std::min(a(i, k), a(j, k));
      }
      best = std::min(best, s + a(i, j) + a(j, i));
    }
  }
  return best / static_cast<double>(n);
}

AdjacencyMatrix stochastic_reparam(const AdjacencyMatrix& a) {
  AdjacencyMatrix out = a;
  const std::size_t n = a.n();
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      if (k != i) s += a(i, k);
    out(i, i) = static_cast<double>(n) - s;
  }
  out.unit_diagonal = false;
  return out;
}

LaplacianMatrix graph_laplacian(const Matrix& w) {
  const std::size_t n = w.size();
  if (n == 0) throw std::invalid_argument("graph_laplacian: empty matrix");
  const double inv_n = 1.0 / static_cast<double>(n);
  LaplacianMatrix L{Matrix(n)};
  for (std::size_t i = 0; i < n; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double v = -w(i, j) * inv_n;
      L.entries(i, j) = v;
      diag -= v;
    }
    L.entries(i, i) = diag;
  }
  return L;
}

LaplacianMatrix graph_laplacian(const AdjacencyMatrix& a) { return graph_laplacian(a.weights); }

LaplacianMatrix nonlinear_laplacian(const AdjacencyMatrix& a, const NonlinKernel& phi,
                                    const State& x) {
  const std::size_t n = a.n();
  if (x.n() != n) throw std::invalid_argument("nonlinear_laplacian: size mismatch");
  Matrix w(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < x.dim(); ++c) {
        const double d = x(i, c) - x(j, c);
        r2 += d * d;
      }
      w(i, j) = a(i, j) * phi(std::sqrt(r2));
    }
  }
  return graph_laplacian(w);
}

namespace {

constexpr std::size_t kMaxJacobiSize = 2048;
constexpr int kMaxSweeps = 100;
constexpr double kOffDiagTol = 1e-12;

// Eigenvalues of a symmetric matrix by cyclic Jacobi.
std::vector<double> jacobi_eigenvalues(Matrix b) {
  const std::size_t m = b.size();
  const auto& k = simd::active();
  auto max_off = [&]() {
    double v = 0.0;
    for (std::size_t p = 0; p < m; ++p)
      for (std::size_t q = p + 1; q < m; ++q) v = std::max(v, std::abs(b(p, q)));
    return v;
  };
  int sweeps = 0;
  while (max_off() >= kOffDiagTol) {
    if (++sweeps > kMaxSweeps) {
      throw NumericalError("Jacobi eigenvalue iteration did not converge in 100 sweeps");
    }
    for (std::size_t p = 0; p < m; ++p) {
      for (std::size_t q = p + 1; q < m; ++q) {
        const double apq = b(p, q);
        if (std::abs(apq) < 1e-300) continue;
        const double app = b(p, p);
        const double aqq = b(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        k.rotate(b.row(p), b.row(q), c, s, m);
        b(p, p) = app - t * apq;
        b(q, q) = aqq + t * apq;
        b(p, q) = 0.0;
        b(q, p) = 0.0;
        for (std::size_t r = 0; r < m; ++r) {
          if (r == p || r == q) continue;
          b(r, p) = b(p, r);
          b(r, q) = b(q, r);
        }
      }
    }
  }
  std::vector<double> eig(m);
  for (std::size_t p = 0; p < m; ++p) eig[p] = b(p, p);
  return eig;
}

// Compression of a symmetric matrix to the complement of the constant
// vector: H S H with H the Householder reflection mapping 1 to a multiple of
// e_1, first row and column dropped.
Matrix deflate_constant(const Matrix& s) {
  const std::size_t n = s.size();
  const auto& k = simd::active();
  std::vector<double> u(n, 1.0);
  u[0] += std::sqrt(static_cast<double>(n));
  const double beta = 2.0 / k.dot(u.data(), u.data(), n);
  std::vector<double> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = k.dot(s.row(i), u.data(), n);
  const double usu = k.dot(u.data(), p.data(), n);
  const double g = beta * beta * usu;
  Matrix out(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    for (std::size_t j = 1; j < n; ++j) {
      out(i - 1, j - 1) =
          s(i, j) - beta * u[i] * p[j] - beta * p[i] * u[j] + g * u[i] * u[j];
    }
  }
  // Exact symmetry for the Jacobi row/column bookkeeping.
  for (std::size_t i = 0; i + 1 < n; ++i)
    for (std::size_t j = i + 1; j + 1 < n; ++j) {
      const double v = 0.5 * (out(i, j) + out(j, i));
      out(i, j) = v;
      out(j, i) = v;
    }
  return out;
}

double lambda2_of_matrix(const Matrix& l) {
  const std::size_t n = l.size();
  if (n < 2) throw std::invalid_argument("lambda2: need N >= 2");
  if (n > kMaxJacobiSize) throw std::invalid_argument("lambda2: N exceeds 2048");
  Matrix sym(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) sym(i, j) = 0.5 * (l(i, j) + l(j, i));
  const std::vector<double> eig = jacobi_eigenvalues(deflate_constant(sym));
  return *std::min_element(eig.begin(), eig.end());
}

}  // namespace

double lambda2(const LaplacianMatrix& L) { return lambda2_of_matrix(L.entries); }

double lambda2_weighted(const LaplacianMatrix& L, const PerronVector& v) {
  const std::size_t n = L.n();
  if (v.values.size() != n) throw std::invalid_argument("lambda2_weighted: size mismatch");
  Matrix lv(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(v.values[i] > 0.0)) throw std::invalid_argument("lambda2_weighted: v must be positive");
    for (std::size_t j = 0; j < n; ++j) lv(i, j) = v.values[i] * L(i, j);
  }
  return lambda2_of_matrix(lv);
}

SccDecomposition scc_decompose(const AdjacencyMatrix& a, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("scc_decompose: negative threshold");
  const int n = static_cast<int>(a.n());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::vector<int>> found;
  int counter = 0;

  struct Frame {
    int v;
    int next;
  };
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    std::vector<Frame> call{{root, 0}};
    index[root] = low[root] = counter++;
    stack.push_back(root);
    on_stack[root] = 1;
    while (!call.empty()) {
      Frame& f = call.back();
      const int v = f.v;
      bool descended = false;
      while (f.next < n) {
        const int w = f.next++;
        if (!(a(v, w) > threshold)) continue;
        if (index[w] < 0) {
          index[w] = low[w] = counter++;
          stack.push_back(w);
          on_stack[w] = 1;
          call.push_back({w, 0});
          descended = true;
          break;
        }
        if (on_stack[w]) low[v] = std::min(low[v], index[w]);
      }
      if (descended) continue;
      if (low[v] == index[v]) {
        std::vector<int> members;
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          members.push_back(w);
        } while (w != v);
        std::sort(members.begin(), members.end());
        found.push_back(std::move(members));
      }
      call.pop_back();
      if (!call.empty()) {
        const int parent = call.back().v;
        low[parent] = std::min(low[parent], low[v]);
      }
    }
  }

  std::sort(found.begin(), found.end(),
            [](const auto& x, const auto& y) { return x.front() < y.front(); });
  SccDecomposition dec;
  dec.components = std::move(found);
  dec.component_of.assign(n, -1);
  for (std::size_t c = 0; c < dec.components.size(); ++c)
    for (int v : dec.components[c]) dec.component_of[v] = static_cast<int>(c);

  for (int i = 0; i < n && dec.is_disjoint_union; ++i)
    for (int j = 0; j < n; ++j)
      if (a(i, j) > threshold && dec.component_of[i] != dec.component_of[j]) {
        dec.is_disjoint_union = false;
        break;
      }

  double delta = std::numeric_limits<double>::infinity();
  for (const auto& members : dec.components) {
    for (int i : members) {
      double s = 0.0;
      for (int j : members) s += a(i, j);
      delta = std::min(delta, s / static_cast<double>(members.size()));
    }
  }
  dec.delta = n == 0 ? 0.0 : delta;
  return dec;
}

namespace {

constexpr long kMaxFixedPointIterations = 100000;
constexpr double kFixedPointTol = 1e-12;

// Solves L_C^T v = 0 with sum(v) = |C| by Gaussian elimination with partial
// pivoting; the last equation is replaced by the normalization since the
// rows of L_C^T sum to zero.
std::vector<double> dense_null_vector(const AdjacencyMatrix& a, const std::vector<int>& members) {
  const std::size_t m = members.size();
  std::vector<double> M(m * m, 0.0), rhs(m, 0.0);
  for (std::size_t r = 0; r < m; ++r) {
    // Row r of L^T restricted to C: (L^T)_{r c} = L_{c r}.
    const int i = members[r];
    double out_deg = 0.0;
    for (int j : members)
      if (j != i) out_deg += a(i, j);
    for (std::size_t c = 0; c < m; ++c) {
      const int j = members[c];
      M[r * m + c] = j == i ? out_deg : -a(j, i);
    }
  }
  for (std::size_t c = 0; c < m; ++c) M[(m - 1) * m + c] = 1.0;
  rhs[m - 1] = static_cast<double>(m);

  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r)
      if (std::abs(M[r * m + col]) > std::abs(M[piv * m + col])) piv = r;
    if (M[piv * m + col] == 0.0) throw NumericalError("Perron fallback: singular system");
    if (piv != col) {
      for (std::size_t c = 0; c < m; ++c) std::swap(M[piv * m + c], M[col * m + c]);
      std::swap(rhs[piv], rhs[col]);
    }
    for (std::size_t r = col + 1; r < m; ++r) {
      const double f = M[r * m + col] / M[col * m + col];
      if (f == 0.0) continue;
      for (std::size_t c = col; c < m; ++c) M[r * m + c] -= f * M[col * m + c];
      rhs[r] -= f * rhs[col];
    }
  }
  std::vector<double> v(m);
  for (std::size_t r = m; r-- > 0;) {
    double s = rhs[r];
    for (std::size_t c = r + 1; c < m; ++c) s -= M[r * m + c] * v[c];
    v[r] = s / M[r * m + r];
  }
  return v;
}

}  // namespace

PerronVector perron_vector(const AdjacencyMatrix& a, const SccDecomposition& dec) {
  if (!dec.is_disjoint_union) {
    throw std::invalid_argument("perron_vector: topology is not a disjoint union of components");
  }
  const std::size_t n = a.n();
  if (dec.component_of.size() != n) throw std::invalid_argument("perron_vector: size mismatch");
  PerronVector out;
  out.values.assign(n, 1.0);

  for (const auto& members : dec.components) {
    const std::size_t m = members.size();
    if (m == 1) continue;
    std::vector<double> row_sum(m, 0.0);
    for (std::size_t r = 0; r < m; ++r) {
      for (int j : members) row_sum[r] += a(members[r], j);
      if (!(row_sum[r] > 0.0)) throw NumericalError("perron_vector: zero in-degree row");
    }
    std::vector<double> v(m, 1.0), next(m);
    bool converged = false;
    for (long it = 0; it < kMaxFixedPointIterations; ++it) {
      double diff = 0.0;
      for (std::size_t r = 0; r < m; ++r) {
        double s = 0.0;
        for (std::size_t c = 0; c < m; ++c) s += a(members[c], members[r]) * v[c];
        next[r] = s / row_sum[r];
        diff = std::max(diff, std::abs(next[r] - v[r]));
      }
      if (diff < kFixedPointTol) {
        converged = true;
        break;
      }
      double total = 0.0;
      for (double x : next) total += x;
      const double scale = static_cast<double>(m) / total;
      for (std::size_t r = 0; r < m; ++r) v[r] = next[r] * scale;
    }
    if (!converged) {
      v = dense_null_vector(a, members);
      out.used_fallback = true;
    }
    for (std::size_t r = 0; r < m; ++r) {
      if (!(v[r] > 0.0)) throw NumericalError("perron_vector: non-positive solution");
      out.values[members[r]] = v[r];
    }
  }

  const LaplacianMatrix L = graph_laplacian(a);
  double residual = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) s += L(j, i) * out.values[j];
    residual = std::max(residual, std::abs(s));
  }
  out.residual = residual;
  return out;
}

std::vector<double> in_degree(const AdjacencyMatrix& a) {
  const std::size_t n = a.n();
  const auto& k = simd::active();
  std::vector<double> d(n);
  for (std::size_t i = 0; i < n; ++i) d[i] = k.sum(a.weights.row(i), n) / static_cast<double>(n);
  return d;
}

namespace {

// Quadrature nodes and weights for (1/tau) int_t^{t+tau} f(s) ds.
struct Node {
  double time;
  double weight;
};

std::vector<Node> window_nodes(const TimeKernel& kernel, double t, double tau,
                               int time_quadrature) {
  if (!(tau > 0.0)) throw std::invalid_argument("window: tau must be positive");
  if (time_quadrature <= 0) throw std::invalid_argument("window: bad time quadrature");
  const auto& meta = kernel.metadata();
  if (meta.is_stationary) return {{t, 1.0}};
  std::vector<double> cuts{t};
  for (double b : kernel.breakpoints(t, t + tau)) cuts.push_back(b);
  cuts.push_back(t + tau);
  std::vector<Node> nodes;
  for (std::size_t p = 0; p + 1 < cuts.size(); ++p) {
    const double a = cuts[p], b = cuts[p + 1];
    const int q = meta.piecewise_constant ? 1 : time_quadrature;
    const double h = (b - a) / q;
    for (int k = 0; k < q; ++k) nodes.push_back({a + (k + 0.5) * h, h / tau});
  }
  return nodes;
}

}  // namespace

AdjacencyMatrix window_average_adjacency(const TimeKernel& kernel, double t, double tau,
                                         std::size_t n, int time_quadrature,
                                         int quadrature_order) {
  const std::vector<Node> nodes = window_nodes(kernel, t, tau, time_quadrature);
  if (nodes.size() == 1) {
    AdjacencyMatrix a = sample_adjacency(kernel, nodes[0].time, n, quadrature_order);
    a.sample_time = t;
    return a;
  }
  Matrix avg(n, 0.0);
  for (const Node& node : nodes) {
    const AdjacencyMatrix a = sample_adjacency(kernel, node.time, n, quadrature_order);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) avg(i, j) += node.weight * a(i, j);
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) avg(i, j) = std::clamp(avg(i, j), 0.0, 1.0);
  return AdjacencyMatrix(std::move(avg), t);
}

LaplacianMatrix window_average_laplacian(const TimeKernel& kernel, double t, double tau,
                                         std::size_t n, int time_quadrature,
                                         int quadrature_order) {
  return graph_laplacian(
      window_average_adjacency(kernel, t, tau, n, time_quadrature, quadrature_order));
}

std::string to_string(PersistenceMode mode) {
  switch (mode) {
    case PersistenceMode::scrambling:
      return "scrambling";
    case PersistenceMode::lambda2_of_average:
      return "lambda2_of_average";
    case PersistenceMode::average_of_lambda2:
      return "average_of_lambda2";
    case PersistenceMode::in_degree:
      return "in_degree";
    case PersistenceMode::weighted_lambda2:
      return "weighted_lambda2";
  }
  return "unknown";
}

PersistenceMode parse_persistence_mode(const std::string& name) {
  for (auto m : {PersistenceMode::scrambling, PersistenceMode::lambda2_of_average,
                 PersistenceMode::average_of_lambda2, PersistenceMode::in_degree,
                 PersistenceMode::weighted_lambda2}) {
    if (to_string(m) == name) return m;
  }
  throw std::invalid_argument("unknown persistence mode: " + name);
}

PersistenceResult persistence_check(const TimeKernel& kernel, std::size_t n, double tau,
                                    PersistenceMode mode, double horizon,
                                    const PersistenceOptions& options) {
  if (!(tau > 0.0)) throw std::invalid_argument("persistence_check: tau must be positive");
  if (tau > horizon) throw std::invalid_argument("persistence_check: tau exceeds horizon");
  const auto& meta = kernel.metadata();
  const double step = options.grid_step > 0.0 ? options.grid_step : tau / 20.0;

  std::vector<double> starts;
  if (meta.is_stationary) {
    starts.push_back(0.0);
  } else {
    double limit = horizon - tau;
    for (long k = 0;; ++k) {
      const double s = static_cast<double>(k) * step;
      if (s > limit * (1.0 + 1e-12)) break;
      if (meta.period && s >= *meta.period) break;
      starts.push_back(s);
    }
  }

  auto sample = [&](double s) { return sample_adjacency(kernel, s, n, options.quadrature_order); };
  auto scalar_at = [&](double s) -> double {
    const AdjacencyMatrix a = sample(s);
    switch (mode) {
      case PersistenceMode::scrambling:
        return scrambling(a);
      case PersistenceMode::average_of_lambda2:
        return lambda2(graph_laplacian(a));
      case PersistenceMode::weighted_lambda2: {
        const SccDecomposition dec = scc_decompose(a, options.scc_threshold);
        if (!dec.is_disjoint_union) {
          throw std::invalid_argument(
              "persistence_check: weighted mode needs a disjoint union of components");
        }
        const PerronVector v = perron_vector(a, dec);
        return lambda2_weighted(graph_laplacian(a), v);
      }
      default:
        return 0.0;
    }
  };

  PersistenceResult result;
  result.mode = mode;
  result.tau = tau;
  result.windows = starts.size();
  double best = std::numeric_limits<double>::infinity();
  for (double t : starts) {
    double value = 0.0;
    if (mode == PersistenceMode::lambda2_of_average) {
      value = lambda2(window_average_laplacian(kernel, t, tau, n, options.time_quadrature,
                                               options.quadrature_order));
    } else if (mode == PersistenceMode::in_degree) {
      const AdjacencyMatrix avg = window_average_adjacency(
          kernel, t, tau, n, options.time_quadrature, options.quadrature_order);
      const std::vector<double> d = in_degree(avg);
      value = *std::min_element(d.begin(), d.end());
    } else {
      for (const Node& node : window_nodes(kernel, t, tau, options.time_quadrature)) {
        value += node.weight * scalar_at(node.time);
      }
    }
    best = std::min(best, value);
  }
  result.mu_estimate = best;
  return result;
}

bool dwell_check(double mu, double nu, double tau_d) {
  return (2.0 / (mu * nu * nu)) * std::log(1.0 / nu) < tau_d;
}

PsiCheckResult psi_tau_bounds_check(const TimeKernel& kernel, const NonlinKernel& phi,
                                    const Trajectory& traj, double t, double tau, int samples,
                                    std::uint64_t seed, int quadrature_order) {
  if (!kernel.metadata().is_symmetric) {
    throw std::invalid_argument("psi_tau_bounds_check: kernel must be symmetric");
  }
  if (!(tau > 0.0) || samples <= 0) throw std::invalid_argument("psi_tau_bounds_check: bad input");
  const double eps = 1e-9 * std::max(1.0, tau);
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    if (traj.times[k] >= t - eps && traj.times[k] <= t + tau + eps) idx.push_back(k);
  }
  if (idx.size() < 3 || std::abs(traj.times[idx.front()] - t) > eps ||
      std::abs(traj.times[idx.back()] - (t + tau)) > eps) {
    throw std::invalid_argument("psi_tau_bounds_check: trajectory does not cover [t, t + tau]");
  }
  const std::size_t n = traj.states.front().n();

  std::vector<LaplacianMatrix> laps;
  for (std::size_t k : idx) {
    const AdjacencyMatrix a = sample_adjacency(kernel, traj.times[k], n, quadrature_order);
    laps.push_back(nonlinear_laplacian(a, phi, traj.states[k]));
  }
  auto assemble = [&](const std::vector<std::size_t>& use) {
    Matrix K(n, 0.0);
    for (std::size_t p = 0; p < use.size(); ++p) {
      const double s = traj.times[idx[use[p]]];
      double w = 0.0;
      if (p > 0) w += 0.5 * (s - traj.times[idx[use[p - 1]]]);
      if (p + 1 < use.size()) w += 0.5 * (traj.times[idx[use[p + 1]]] - s);
      const double f = w * (t + tau - s) / tau;
      const Matrix& L = laps[use[p]].entries;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) K(i, j) += f * L(i, j);
    }
    return K;
  };
  std::vector<std::size_t> full(idx.size()), half;
  for (std::size_t p = 0; p < idx.size(); ++p) full[p] = p;
  for (std::size_t p = 0; p < idx.size(); p += 2) half.push_back(p);
  if (half.back() != idx.size() - 1) half.push_back(idx.size() - 1);
  const Matrix K = assemble(full);
  const Matrix K_half = assemble(half);
  double err2 = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) err2 += std::pow(K(i, j) - K_half(i, j), 2);

  PsiCheckResult result;
  result.tolerance = 1e-6 + std::sqrt(err2);
  const double top = (1.0 + phi.c_phi()) * tau;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  result.min_ratio = std::numeric_limits<double>::infinity();
  result.max_ratio = -std::numeric_limits<double>::infinity();
  std::vector<double> y(n);
  for (int s = 0; s < samples; ++s) {
    double mean = 0.0;
    for (double& v : y) {
      v = gauss(rng);
      mean += v;
    }
    mean /= static_cast<double>(n);
    for (double& v : y) v -= mean;
    double yy = 0.0, yky = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      yy += y[i] * y[i];
      double ky = 0.0;
      for (std::size_t j = 0; j < n; ++j) ky += K(i, j) * y[j];
      yky += y[i] * ky;
    }
    const double ratio = (top * yy - yky) / yy;
    result.min_ratio = std::min(result.min_ratio, ratio);
    result.max_ratio = std::max(result.max_ratio, ratio);
  }
  result.pass = result.min_ratio >= tau - result.tolerance &&
                result.max_ratio <= top + result.tolerance;
  return result;
}

SpectralReport spectral_report(const AdjacencyMatrix& a,
                               const std::optional<PersistenceResult>& persistence) {
  SpectralReport r;
  r.eta = scrambling(a);
  const LaplacianMatrix L = graph_laplacian(a);
  r.lambda2 = a.n() >= 2 ? lambda2(L) : 0.0;
  const SccDecomposition dec = scc_decompose(a);
  r.delta = dec.delta;
  r.n_components = dec.components.size();
  r.is_disjoint_union = dec.is_disjoint_union;
  if (dec.is_disjoint_union) {
    try {
      const PerronVector v = perron_vector(a, dec);
      r.perron = v.values;
      r.residual = v.residual;
      if (a.n() >= 2) r.lambda2_weighted = lambda2_weighted(L, v);
    } catch (const NumericalError&) {
    }
  }
  r.persistence = persistence;
  return r;
}

nlohmann::json to_json(const SpectralReport& r) {
  nlohmann::json j;
  j["eta"] = r.eta;
  j["lambda2"] = r.lambda2;
  j["lambda2_weighted"] = r.lambda2_weighted ? nlohmann::json(*r.lambda2_weighted) : nullptr;
  j["delta"] = r.delta;
  j["n_components"] = r.n_components;
  j["perron"] = r.perron;
  j["residual"] = r.residual ? nlohmann::json(*r.residual) : nullptr;
  if (r.persistence) {
    j["persistence"] = {{"mode", to_string(r.persistence->mode)},
                        {"tau", r.persistence->tau},
                        {"mu_estimate", r.persistence->mu_estimate}};
  } else {
    j["persistence"] = nullptr;
  }
  return j;
}

}  // namespace graphon
