#pragma once

// Connectivity functionals of sampled adjacency matrices: scrambling
// coefficient, Laplacians, algebraic connectivity, strongly connected
// components, Perron weights, and the time-window persistence quantities.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "graphon/discretize.hpp"
#include "graphon/dynamics.hpp"
#include "graphon/kernel.hpp"
#include "graphon/matrix.hpp"
#include "json.hpp"

namespace graphon {

/// L = (1/N)(D - A), D_ii = sum_j a_ij.
struct LaplacianMatrix {
  Matrix entries;

  std::size_t n() const { return entries.size(); }
  double operator()(std::size_t i, std::size_t j) const { return entries(i, j); }
};

/// min over pairs i < j of (1/N) sum_k min(a_ik, a_jk); a_00 when N = 1.
double scrambling(const AdjacencyMatrix& a);

/// Same minimum written as (1/N)(sum_{k != i,j} min(a_ik, a_jk) + a_ij + a_ji),
/// which agrees with scrambling() when the diagonal is 1.
double scrambling_offdiag(const AdjacencyMatrix& a);

/// Off-diagonals kept, a_ii replaced by N - sum_{k != i} a_ik.
AdjacencyMatrix stochastic_reparam(const AdjacencyMatrix& a);

LaplacianMatrix graph_laplacian(const AdjacencyMatrix& a);
LaplacianMatrix graph_laplacian(const Matrix& weights);
/// Laplacian of the effective weights a_ij phi(|x_i - x_j|).
LaplacianMatrix nonlinear_laplacian(const AdjacencyMatrix& a, const NonlinKernel& phi,
                                    const State& x);

/// Smallest eigenvalue of the symmetric part of L restricted to mean-zero
/// vectors. Cyclic Jacobi on the Householder-deflated matrix.
double lambda2(const LaplacianMatrix& L);

struct SccDecomposition {
  std::vector<int> component_of;
  /// Sorted by smallest member; members increasing.
  std::vector<std::vector<int>> components;
  bool is_disjoint_union = true;
  double delta = 0.0;
};

/// Tarjan on the digraph with edge i -> j iff a_ij > threshold.
SccDecomposition scc_decompose(const AdjacencyMatrix& a, double threshold = 1e-12);

struct PerronVector {
  std::vector<double> values;
  double residual = 0.0;
  /// true when the dense fallback produced the result.
  bool used_fallback = false;
};

PerronVector perron_vector(const AdjacencyMatrix& a, const SccDecomposition& dec);

/// lambda2 of the row-rescaled Laplacian (L_v)_ij = v_i L_ij.
double lambda2_weighted(const LaplacianMatrix& L, const PerronVector& v);

/// d_i = (1/N) sum_j a_ij
std::vector<double> in_degree(const AdjacencyMatrix& a);

/// Mean of the sampled adjacency over [t, t + tau]: one evaluation per piece
/// for piecewise-constant kernels, composite midpoint otherwise.
AdjacencyMatrix window_average_adjacency(const TimeKernel& kernel, double t, double tau,
                                         std::size_t n, int time_quadrature = 8,
                                         int quadrature_order = 4);
LaplacianMatrix window_average_laplacian(const TimeKernel& kernel, double t, double tau,
                                         std::size_t n, int time_quadrature = 8,
                                         int quadrature_order = 4);

enum class PersistenceMode {
  scrambling,
  lambda2_of_average,
  average_of_lambda2,
  in_degree,
  weighted_lambda2
};

std::string to_string(PersistenceMode mode);
PersistenceMode parse_persistence_mode(const std::string& name);

struct PersistenceOptions {
  /// Spacing of window start times; tau / 20 when not positive.
  double grid_step = 0.0;
  int time_quadrature = 8;
  int quadrature_order = 4;
  double scc_threshold = 1e-12;
};

struct PersistenceResult {
  PersistenceMode mode = PersistenceMode::scrambling;
  double tau = 0.0;
  double mu_estimate = 0.0;
  std::size_t windows = 0;

  bool satisfied_at_level(double mu) const { return mu_estimate >= mu; }
};

/// Minimum over window start times of the window functional selected by
/// `mode`. Periodic kernels only need starts within one period, stationary
/// kernels a single window.
PersistenceResult persistence_check(const TimeKernel& kernel, std::size_t n, double tau,
                                    PersistenceMode mode, double horizon,
                                    const PersistenceOptions& options = {});

/// (2 / (mu nu^2)) log(1 / nu) < tau_d
bool dwell_check(double mu, double nu, double tau_d);

struct PsiCheckResult {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

/// Rayleigh quotients of Psi_tau(t) = (1 + c_phi) tau Id
///   - (1/tau) int_t^{t+tau} (t + tau - s) L(s, x(s)) ds
/// on random mean-zero vectors, against [tau, (1 + c_phi) tau]. The integral
/// uses the trapezoid rule on the recorded trajectory times.
PsiCheckResult psi_tau_bounds_check(const TimeKernel& kernel, const NonlinKernel& phi,
                                    const Trajectory& traj, double t, double tau,
                                    int samples, std::uint64_t seed = 1,
                                    int quadrature_order = 4);

struct SpectralReport {
  double eta = 0.0;
  double lambda2 = 0.0;
  std::optional<double> lambda2_weighted;
  double delta = 0.0;
  std::size_t n_components = 0;
  bool is_disjoint_union = true;
  std::vector<double> perron;
  std::optional<double> residual;
  std::optional<PersistenceResult> persistence;
};

SpectralReport spectral_report(const AdjacencyMatrix& a,
                               const std::optional<PersistenceResult>& persistence = {});

nlohmann::json to_json(const SpectralReport& report);

}  // namespace graphon
