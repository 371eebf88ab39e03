#include "graphon/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <stdexcept>

#include "graphon/csv.hpp"

namespace graphon {

std::string to_string(Theorem theorem) {
  switch (theorem) {
    case Theorem::diameter_contraction:
      return "diameter_contraction";
    case Theorem::linf_persistent_scrambling:
      return "linf_persistent_scrambling";
    case Theorem::l2_symmetric:
      return "l2_symmetric";
    case Theorem::l2_balanced:
      return "l2_balanced";
    case Theorem::l2_strong:
      return "l2_strong";
  }
  return "unknown";
}

Theorem parse_theorem(const std::string& name) {
  for (auto t : {Theorem::diameter_contraction, Theorem::linf_persistent_scrambling,
                 Theorem::l2_symmetric, Theorem::l2_balanced, Theorem::l2_strong}) {
    if (to_string(t) == name) return t;
  }
  throw std::invalid_argument("unknown theorem: " + name);
}

namespace {

double require(const std::optional<double>& v, const char* name, Theorem theorem) {
  if (!v) {
    throw std::invalid_argument("envelope_check(" + to_string(theorem) + "): missing " + name);
  }
  return *v;
}

}  // namespace

EnvelopeReport envelope_check(const Trajectory& traj, Theorem theorem,
                              const EnvelopeParams& params, const TimeKernel* kernel) {
  if (traj.times.empty()) throw std::invalid_argument("envelope_check: empty trajectory");
  EnvelopeReport r;
  r.theorem = theorem;
  const Diagnostics& d0 = traj.diagnostics.front();

  if (kernel) {
    const auto& meta = kernel->metadata();
    if (theorem == Theorem::l2_balanced && !kernel->balanced_topology()) {
      r.warnings.push_back("kernel is not flagged balanced");
    }
    if (theorem == Theorem::l2_symmetric && !meta.is_symmetric) {
      r.warnings.push_back("kernel is not flagged symmetric");
    }
    if (theorem == Theorem::l2_strong && !meta.piecewise_constant && !meta.is_stationary) {
      r.warnings.push_back("kernel is not piecewise constant in time");
    }
  }

  // observed(k) and the envelope as prefactor * start * exp(-rate * t), or
  // the diameter integral form.
  std::function<double(std::size_t)> observed;
  std::function<double(std::size_t)> envelope;
  switch (theorem) {
    case Theorem::diameter_contraction: {
      const double g = require(params.gamma_R, "gamma_R", theorem);
      r.parameters["gamma_R"] = g;
      r.prefactor = 1.0;
      r.rate = g;
      observed = [&](std::size_t k) { return traj.diagnostics[k].diameter; };
      envelope = [&, g](std::size_t k) {
        return d0.diameter * std::exp(-g * traj.diagnostics[k].functional_integral);
      };
      break;
    }
    case Theorem::linf_persistent_scrambling: {
      const double g = require(params.gamma_R, "gamma_R", theorem);
      const double mu = require(params.mu, "mu", theorem);
      const double tau = require(params.tau, "tau", theorem);
      if (!params.x_inf) throw std::invalid_argument("envelope_check: missing x_inf");
      r.parameters = {{"gamma_R", g}, {"mu", mu}, {"tau", tau}};
      r.prefactor = std::exp(g * mu * tau);
      r.rate = g * mu;
      r.parameters["alpha"] = r.prefactor;
      const std::vector<double> x_inf = *params.x_inf;
      observed = [&, x_inf](std::size_t k) { return linf_distance(traj.states[k], x_inf); };
      envelope = [&](std::size_t k) {
        return r.prefactor * d0.diameter * std::exp(-r.rate * traj.times[k]);
      };
      break;
    }
    case Theorem::l2_balanced: {
      const double mu = require(params.mu, "mu", theorem);
      const double tau = require(params.tau, "tau", theorem);
      r.parameters = {{"mu", mu}, {"tau", tau}};
      r.prefactor = std::exp(mu * tau);
      r.rate = mu;
      r.parameters["alpha"] = r.prefactor;
      observed = [&](std::size_t k) { return traj.diagnostics[k].std_dev; };
      envelope = [&](std::size_t k) {
        return r.prefactor * d0.std_dev * std::exp(-r.rate * traj.times[k]);
      };
      break;
    }
    case Theorem::l2_symmetric: {
      const double g = require(params.gamma_R, "gamma_R", theorem);
      const double mu = require(params.mu, "mu", theorem);
      const double tau = require(params.tau, "tau", theorem);
      const double c = require(params.c_phi, "c_phi", theorem);
      const double root = std::sqrt((1.0 + c) * tau);
      const double eps = g * mu / (2.0 * std::sqrt(1.0 + c));
      const double lambda =
          std::max(0.0, 1.0 / std::sqrt(tau) + 1.0 / (2.0 * std::sqrt(tau) * eps) - root);
      const double alpha = lambda + root;
      // X_tau(t) is squeezed between (lambda + sqrt(tau)) X and alpha X.
      r.prefactor = std::max(alpha, alpha / (lambda + std::sqrt(tau)));
      r.rate = g * mu / (4.0 * root * alpha);
      r.parameters = {{"gamma_R", g}, {"mu", mu},         {"tau", tau},
                      {"c_phi", c},   {"epsilon", eps},   {"lambda", lambda},
                      {"alpha", r.prefactor}};
      observed = [&](std::size_t k) { return traj.diagnostics[k].std_dev; };
      envelope = [&](std::size_t k) {
        return r.prefactor * d0.std_dev * std::exp(-r.rate * traj.times[k]);
      };
      break;
    }
    case Theorem::l2_strong: {
      const double mu = require(params.mu, "mu", theorem);
      const double tau = require(params.tau, "tau", theorem);
      const double nu = require(params.nu, "nu", theorem);
      const double tau_d = require(params.tau_d, "tau_d", theorem);
      r.parameters = {{"mu", mu}, {"tau", tau}, {"nu", nu}, {"tau_d", tau_d}};
      r.prefactor = std::exp(mu * nu * nu * tau) / (nu * nu);
      r.rate = mu * nu * nu - (2.0 / tau_d) * std::log(1.0 / nu);
      r.parameters["alpha"] = r.prefactor;
      observed = [&](std::size_t k) { return traj.diagnostics[k].std_dev; };
      envelope = [&](std::size_t k) {
        return r.prefactor * d0.std_dev * std::exp(-r.rate * traj.times[k]);
      };
      break;
    }
  }

  r.margin = std::numeric_limits<double>::infinity();
  r.pass = true;
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const double obs = observed(k);
    const double env = envelope(k);
    r.times.push_back(traj.times[k]);
    r.observed.push_back(obs);
    r.envelope.push_back(env);
    const double gap = env - obs;
    r.margin = std::min(r.margin, gap);
    const double tol = r.base_tolerance + integrator_tolerance(traj.dt, traj.times[k]) *
                                              (params.integrator_factor / 10.0);
    if (!(gap >= -tol)) r.pass = false;
  }
  r.integrator_tolerance =
      integrator_tolerance(traj.dt, traj.times.back()) * (params.integrator_factor / 10.0);
  return r;
}

nlohmann::json to_json(const EnvelopeReport& r) {
  nlohmann::json j;
  j["theorem"] = to_string(r.theorem);
  j["pass"] = r.pass;
  j["margin"] = r.margin;
  j["base_tolerance"] = r.base_tolerance;
  j["integrator_tolerance"] = r.integrator_tolerance;
  j["rate"] = r.rate;
  j["prefactor"] = r.prefactor;
  j["parameters"] = r.parameters;
  j["warnings"] = r.warnings;
  return j;
}

void write_envelope_csv(std::ostream& out, const EnvelopeReport& r) {
  out << "t,observed,envelope\n";
  for (std::size_t k = 0; k < r.times.size(); ++k) {
    out << format_double(r.times[k]) << ',' << format_double(r.observed[k]) << ','
        << format_double(r.envelope[k]) << '\n';
  }
}

bool in_convex_hull(const std::vector<double>& point, const State& x, int directions,
                    double tol, std::uint64_t seed) {
  const std::size_t dim = x.dim();
  if (point.size() != dim) throw std::invalid_argument("in_convex_hull: dimension mismatch");
  std::vector<std::vector<double>> dirs;
  for (std::size_t c = 0; c < dim; ++c) {
    std::vector<double> e(dim, 0.0);
    e[c] = 1.0;
    dirs.push_back(e);
    e[c] = -1.0;
    dirs.push_back(e);
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int k = 0; k < directions; ++k) {
    std::vector<double> p(dim);
    double norm = 0.0;
    for (double& v : p) {
      v = gauss(rng);
      norm += v * v;
    }
    norm = std::sqrt(norm);
    for (double& v : p) v /= norm;
    dirs.push_back(p);
  }
  for (const auto& p : dirs) {
    double support = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < x.n(); ++i) {
      double s = 0.0;
      for (std::size_t c = 0; c < dim; ++c) s += p[c] * x(i, c);
      support = std::max(support, s);
    }
    double s = 0.0;
    for (std::size_t c = 0; c < dim; ++c) s += p[c] * point[c];
    if (s > support + tol) return false;
  }
  return true;
}

ConsensusEstimate consensus_estimate(const Trajectory& traj, ConsensusStrategy strategy,
                                     const std::vector<double>* weights) {
  if (traj.states.empty()) throw std::invalid_argument("consensus_estimate: empty trajectory");
  ConsensusEstimate est;
  est.strategy = strategy;
  const State& last = traj.states.back();
  const std::vector<double> fallback = barycenter(last);
  est.point = fallback;
  est.used = ConsensusStrategy::final_state_mean;

  std::optional<std::vector<double>> candidate;
  if (strategy == ConsensusStrategy::weighted_barycenter) {
    if (!weights) throw std::invalid_argument("consensus_estimate: weighted strategy needs v");
    candidate = weighted_barycenter(last, *weights);
  } else if (strategy == ConsensusStrategy::tail_extrapolation) {
    const std::size_t count = traj.states.size();
    const std::size_t k = std::max<std::size_t>(1, count / 20);
    if (count >= 2 * k + 1) {
      const std::vector<double> b0 = barycenter(traj.states[count - 1 - 2 * k]);
      const std::vector<double> b1 = barycenter(traj.states[count - 1 - k]);
      const std::vector<double>& b2 = fallback;
      std::vector<double> out(b2.size());
      const double scale = std::max(1.0, linf_norm(traj.states.front()));
      bool ok = true;
      for (std::size_t c = 0; c < b2.size(); ++c) {
        const double d1 = b1[c] - b0[c];
        const double d2 = b2[c] - b1[c];
        const double denom = d2 - d1;
        if (std::abs(d2) <= 1e-15 * scale || std::abs(denom) <= 1e-15 * scale) {
          out[c] = b2[c];
          continue;
        }
        const double ratio = d2 / d1;
        if (!(std::abs(ratio) < 1.0) || ratio < 0.0) {
          ok = false;
          break;
        }
        out[c] = b2[c] - d2 * d2 / denom;
      }
      if (ok) candidate = out;
    }
  } else {
    est.used = strategy;
    return est;
  }

  if (candidate && in_convex_hull(*candidate, traj.states.front(), 20, 1e-9)) {
    est.point = *candidate;
    est.used = strategy;
  }
  return est;
}

RateFit decay_rate_fit(const std::vector<double>& times, const std::vector<double>& values,
                       double tail_fraction) {
  if (times.size() != values.size()) throw std::invalid_argument("decay_rate_fit: size mismatch");
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw std::invalid_argument("decay_rate_fit: tail_fraction must lie in (0, 1]");
  }
  const std::size_t count = times.size();
  const std::size_t tail = std::min(
      count, static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(count) - 1e-9)));
  if (tail < 3) throw std::invalid_argument("decay_rate_fit: fewer than 3 tail points");
  const std::size_t first = count - tail;

  RateFit fit;
  for (std::size_t k = first; k < count; ++k) {
    if (!(values[k] > 0.0)) {
      fit.nonpositive = true;
      return fit;
    }
  }
  double tm = 0.0, ym = 0.0;
  std::vector<double> y(tail);
  for (std::size_t k = 0; k < tail; ++k) {
    y[k] = std::log(values[first + k]);
    tm += times[first + k];
    ym += y[k];
  }
  tm /= static_cast<double>(tail);
  ym /= static_cast<double>(tail);
  double stt = 0.0, sty = 0.0, syy = 0.0;
  for (std::size_t k = 0; k < tail; ++k) {
    const double dt = times[first + k] - tm;
    const double dy = y[k] - ym;
    stt += dt * dt;
    sty += dt * dy;
    syy += dy * dy;
  }
  if (!(stt > 0.0)) throw std::invalid_argument("decay_rate_fit: tail times are identical");
  const double slope = sty / stt;
  fit.rate = -slope;
  fit.intercept = ym - slope * tm;
  double ss_res = 0.0;
  for (std::size_t k = 0; k < tail; ++k) {
    const double e = y[k] - (fit.intercept + slope * times[first + k]);
    ss_res += e * e;
  }
  fit.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
  return fit;
}

EquivalenceObservation equivalence_observation(const Trajectory& traj,
                                               const std::vector<double>& x_inf,
                                               double threshold) {
  if (traj.states.empty()) throw std::invalid_argument("equivalence_observation: empty trajectory");
  const State& first = traj.states.front();
  const State& last = traj.states.back();
  const double l2_0 = l2_distance(first, x_inf);
  const double linf_0 = linf_distance(first, x_inf);
  const double l2_1 = l2_distance(last, x_inf);
  const double linf_1 = linf_distance(last, x_inf);
  EquivalenceObservation obs;
  obs.l2_ratio = l2_0 > 0.0 ? l2_1 / l2_0 : 0.0;
  obs.linf_ratio = linf_0 > 0.0 ? linf_1 / linf_0 : 0.0;
  obs.l2_decayed = l2_0 == 0.0 || l2_1 < threshold * l2_0;
  obs.linf_decayed = linf_0 == 0.0 || linf_1 < threshold * linf_0;
  obs.consistent_with_equivalence = obs.l2_decayed == obs.linf_decayed;
  return obs;
}

}  // namespace graphon
