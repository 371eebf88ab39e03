#pragma once

// Trajectory checks: theorem decay envelopes, consensus point estimates,
// log-linear decay rate fits and the L2 / Linf decay comparison.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "graphon/dynamics.hpp"
#include "graphon/kernel.hpp"
#include "json.hpp"

namespace graphon {

enum class Theorem {
  diameter_contraction,
  linf_persistent_scrambling,
  l2_symmetric,
  l2_balanced,
  l2_strong
};

std::string to_string(Theorem theorem);
Theorem parse_theorem(const std::string& name);

struct EnvelopeParams {
  std::optional<double> gamma_R;
  std::optional<double> mu;
  std::optional<double> tau;
  std::optional<double> c_phi;
  std::optional<double> nu;
  std::optional<double> tau_d;
  /// Consensus point for the Linf theorem.
  std::optional<std::vector<double>> x_inf;
  /// Integrator allowance factor in factor * dt^4 * t.
  double integrator_factor = 10.0;
};

struct EnvelopeReport {
  Theorem theorem = Theorem::diameter_contraction;
  /// min over recorded times of envelope - observed
  double margin = 0.0;
  /// 1e-9, and the integrator allowance at the final time.
  double base_tolerance = 1e-9;
  double integrator_tolerance = 0.0;
  bool pass = false;
  double rate = 0.0;
  double prefactor = 0.0;
  std::map<std::string, double> parameters;
  std::vector<std::string> warnings;
  std::vector<double> times;
  std::vector<double> observed;
  std::vector<double> envelope;
};

/// Compares the theorem's exponential bound with the observed quantity at
/// every recorded time. The diameter theorem reads the integral of the
/// scrambling coefficient from Diagnostics::functional_integral. Passing a
/// kernel enables topology mismatch warnings.
EnvelopeReport envelope_check(const Trajectory& traj, Theorem theorem,
                              const EnvelopeParams& params,
                              const TimeKernel* kernel = nullptr);

nlohmann::json to_json(const EnvelopeReport& report);
void write_envelope_csv(std::ostream& out, const EnvelopeReport& report);

enum class ConsensusStrategy { final_state_mean, weighted_barycenter, tail_extrapolation };

struct ConsensusEstimate {
  std::vector<double> point;
  ConsensusStrategy strategy = ConsensusStrategy::final_state_mean;
  /// Strategy actually used after hull / degeneracy fallback.
  ConsensusStrategy used = ConsensusStrategy::final_state_mean;
};

/// Estimate of the consensus point. Falls back to the final state mean when
/// the requested estimate is degenerate or leaves the convex hull of the
/// initial positions (support functions along 20 random directions).
ConsensusEstimate consensus_estimate(const Trajectory& traj, ConsensusStrategy strategy,
                                     const std::vector<double>* weights = nullptr);

/// Support-function test: <p, point> <= max_i <p, x_i> + tol along `directions`
/// random unit directions (and the coordinate axes).
bool in_convex_hull(const std::vector<double>& point, const State& x, int directions = 20,
                    double tol = 1e-9, std::uint64_t seed = 7);

struct RateFit {
  double rate = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  bool nonpositive = false;
};

/// Least squares line through (t, log value) over the trailing fraction of
/// samples; rate is the negated slope.
RateFit decay_rate_fit(const std::vector<double>& times, const std::vector<double>& values,
                       double tail_fraction);

struct EquivalenceObservation {
  bool l2_decayed = false;
  bool linf_decayed = false;
  bool consistent_with_equivalence = false;
  double l2_ratio = 0.0;
  double linf_ratio = 0.0;
};

/// decayed: final distance < threshold * initial distance (true when the
/// initial distance is 0).
EquivalenceObservation equivalence_observation(const Trajectory& traj,
                                               const std::vector<double>& x_inf,
                                               double threshold = 1e-3);

}  // namespace graphon
