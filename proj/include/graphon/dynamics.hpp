#pragma once

// Fixed-step RK4 integration of x_i' = (1/N) sum_j a_ij phi(|x_i - x_j|)(x_j - x_i)
// and the per-state diagnostics recorded along trajectories.

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "graphon/discretize.hpp"
#include "graphon/kernel.hpp"

namespace graphon {

struct SolverConfig {
  double dt = 0.01;
  double t_end = 1.0;
  int record_stride = 1;
  bool align_to_switches = true;
  int quadrature_order = 4;
  /// Optional scalar functional of the sampled adjacency (e.g. scrambling);
  /// its time integral is accumulated with Simpson's rule on the RK4 stage
  /// samples and stored in each record.
  std::function<double(const AdjacencyMatrix&)> tracked_functional;
  /// Positive weights with mean 1 for the weighted diagnostics.
  std::optional<std::vector<double>> weights;
};

struct Diagnostics {
  double diameter = 0.0;
  double std_dev = 0.0;
  std::optional<double> weighted_std_dev;
  std::vector<double> barycenter;
  std::optional<std::vector<double>> weighted_barycenter;
  double linf_norm = 0.0;
  double functional_integral = 0.0;
};

struct Trajectory {
  std::vector<double> times;
  std::vector<State> states;
  std::vector<Diagnostics> diagnostics;
  double dt = 0.0;
};

State drift(const AdjacencyMatrix& a, const NonlinKernel& phi, const State& x);

Trajectory integrate(const TimeKernel& kernel, const NonlinKernel& phi, const State& x0,
                     const SolverConfig& cfg);

/// Heuristic RK4 global error allowance 10 dt^4 t.
double integrator_tolerance(double dt, double t);

double diameter(const State& x);
double std_dev(const State& x);
double weighted_std_dev(const State& x, const std::vector<double>& v);
std::vector<double> barycenter(const State& x);
std::vector<double> weighted_barycenter(const State& x, const std::vector<double>& v);
/// max_i |x_i| (Euclidean norm per agent)
double linf_norm(const State& x);
/// max_i |x_i - p|
double linf_distance(const State& x, const std::vector<double>& p);
/// sqrt((1/N) sum_i |x_i - p|^2)
double l2_distance(const State& x, const std::vector<double>& p);

Diagnostics compute_diagnostics(const State& x, const std::vector<double>* weights = nullptr);

/// Long format `t,agent,coord,value`.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
/// `t,diameter,std_dev,weighted_std_dev,linf_norm,bary_0..bary_{d-1}`
void write_diagnostics_csv(std::ostream& out, const Trajectory& traj);

}  // namespace graphon
