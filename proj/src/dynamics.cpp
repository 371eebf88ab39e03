#include "graphon/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>
#include <string>

#include "graphon/csv.hpp"
#include "graphon/errors.hpp"
#include "graphon/simd/kernels.hpp"

namespace graphon {

namespace {

void drift_into(const AdjacencyMatrix& a, const NonlinKernel& phi, const State& x,
                State& out, std::vector<double>& scratch) {
  const std::size_t n = x.n();
  const std::size_t dim = x.dim();
  if (a.n() != n) throw std::invalid_argument("drift: adjacency and state sizes differ");
  const auto& k = simd::active();
  const double inv_n = 1.0 / static_cast<double>(n);

  if (phi.kind() == NonlinKernel::Kind::constant) {
    const double scale = phi(0.0) * inv_n;
    for (std::size_t c = 0; c < dim; ++c) {
      const double* xc = x.coord(c);
      double* vc = out.coord(c);
      for (std::size_t i = 0; i < n; ++i) vc[i] = scale * k.pull_linear(a.weights.row(i), xc, xc[i], n);
    }
    return;
  }
  if (dim == 1 && phi.kind() == NonlinKernel::Kind::cucker_smale) {
    const double* xc = x.coord(0);
    double* vc = out.coord(0);
    for (std::size_t i = 0; i < n; ++i)
      vc[i] = inv_n * k.pull_cucker_smale(a.weights.row(i), xc, xc[i], n);
    return;
  }

  scratch.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double* row = a.weights.row(i);
    for (std::size_t j = 0; j < n; ++j) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < dim; ++c) {
        const double d = x(j, c) - x(i, c);
        r2 += d * d;
      }
      scratch[j] = row[j] == 0.0 ? 0.0 : row[j] * phi(std::sqrt(r2));
    }
    for (std::size_t c = 0; c < dim; ++c) {
      const double* xc = x.coord(c);
      out(i, c) = inv_n * k.pull_linear(scratch.data(), xc, xc[i], n);
    }
  }
}

bool all_finite(const State& x) {
  for (double v : x.values())
    if (!std::isfinite(v)) return false;
  return true;
}

// y = x + h * k
void offset(const State& x, const State& k, double h, State& y) {
  const auto& xv = x.values();
  const auto& kv = k.values();
  auto& yv = y.values();
  for (std::size_t m = 0; m < xv.size(); ++m) yv[m] = xv[m] + h * kv[m];
}

struct Sample {
  AdjacencyMatrix a;
  double functional = 0.0;
};

}  // namespace

State drift(const AdjacencyMatrix& a, const NonlinKernel& phi, const State& x) {
  State out(x.n(), x.dim());
  std::vector<double> scratch;
  drift_into(a, phi, x, out, scratch);
  return out;
}

double integrator_tolerance(double dt, double t) { return 10.0 * std::pow(dt, 4) * t; }

Trajectory integrate(const TimeKernel& kernel, const NonlinKernel& phi, const State& x0,
                     const SolverConfig& cfg) {
  if (!(cfg.dt > 0.0) || !(cfg.t_end > 0.0) || cfg.dt > cfg.t_end) {
    throw std::invalid_argument("integrate: need 0 < dt <= t_end");
  }
  if (cfg.record_stride < 1) throw std::invalid_argument("integrate: record_stride must be >= 1");
  if (x0.n() == 0 || x0.dim() == 0) throw std::invalid_argument("integrate: empty state");
  if (!all_finite(x0)) throw NumericalError("initial state is not finite", 0.0);
  const std::vector<double>* weights = cfg.weights ? &*cfg.weights : nullptr;

  const std::size_t n = x0.n();
  const auto& meta = kernel.metadata();
  auto sample = [&](double t) {
    Sample s{sample_adjacency(kernel, t, n, cfg.quadrature_order), 0.0};
    if (cfg.tracked_functional) s.functional = cfg.tracked_functional(s.a);
    return s;
  };

  std::vector<double> bounds{0.0};
  if (cfg.align_to_switches && !meta.is_stationary) {
    for (double b : kernel.breakpoints(0.0, cfg.t_end)) bounds.push_back(b);
  }
  bounds.push_back(cfg.t_end);

  Trajectory traj;
  traj.dt = cfg.dt;
  auto record = [&](double t, const State& x, double integral) {
    traj.times.push_back(t);
    traj.states.push_back(x);
    Diagnostics d = compute_diagnostics(x, weights);
    d.functional_integral = integral;
    traj.diagnostics.push_back(std::move(d));
  };

  State x = x0;
  State k1(n, x0.dim()), k2(n, x0.dim()), k3(n, x0.dim()), k4(n, x0.dim()), y(n, x0.dim());
  std::vector<double> scratch;
  double integral = 0.0;
  long step = 0;
  record(0.0, x, integral);

  std::optional<Sample> fixed;
  if (meta.is_stationary) fixed = sample(0.0);

  for (std::size_t seg = 0; seg + 1 < bounds.size(); ++seg) {
    const double s0 = bounds[seg];
    const double s1 = bounds[seg + 1];
    const long steps = std::max(1L, static_cast<long>(std::ceil((s1 - s0) / cfg.dt - 1e-9)));
    const double h = (s1 - s0) / static_cast<double>(steps);
    const double nudge = 1e-9 * h;
    std::optional<Sample> carried;

    for (long m = 0; m < steps; ++m) {
      const double ta = s0 + static_cast<double>(m) * h;
      const double tb = m + 1 == steps ? s1 : s0 + static_cast<double>(m + 1) * h;
      const double tm = 0.5 * (ta + tb);
      const Sample* sa;
      const Sample* sm;
      const Sample* sb;
      Sample mid_sample, end_sample;
      if (fixed) {
        sa = sm = sb = &*fixed;
      } else if (meta.piecewise_constant) {
        mid_sample = sample(tm);
        sa = sm = sb = &mid_sample;
      } else {
        if (!carried) carried = sample(m == 0 ? ta + nudge : ta);
        mid_sample = sample(tm);
        end_sample = sample(m + 1 == steps ? tb - nudge : tb);
        sa = &*carried;
        sm = &mid_sample;
        sb = &end_sample;
      }

      drift_into(sa->a, phi, x, k1, scratch);
      offset(x, k1, 0.5 * h, y);
      drift_into(sm->a, phi, y, k2, scratch);
      offset(x, k2, 0.5 * h, y);
      drift_into(sm->a, phi, y, k3, scratch);
      offset(x, k3, h, y);
      drift_into(sb->a, phi, y, k4, scratch);

      auto& xv = x.values();
      for (std::size_t q = 0; q < xv.size(); ++q) {
        xv[q] += (h / 6.0) * (k1.values()[q] + 2.0 * k2.values()[q] + 2.0 * k3.values()[q] +
                              k4.values()[q]);
      }
      integral += (h / 6.0) * (sa->functional + 4.0 * sm->functional + sb->functional);
      ++step;

      if (!all_finite(x)) {
        throw NumericalError("non-finite state at t = " + format_double(tb), tb);
      }
      if (!fixed && !meta.piecewise_constant) {
        if (m + 1 < steps) {
          carried = std::move(end_sample);
        } else {
          carried.reset();
        }
      }
      const bool last = seg + 2 == bounds.size() && m + 1 == steps;
      if (last || step % cfg.record_stride == 0) record(last ? cfg.t_end : tb, x, integral);
    }
  }
  return traj;
}

double diameter(const State& x) {
  double best = 0.0;
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t j = i + 1; j < x.n(); ++j) {
      double r2 = 0.0;
      for (std::size_t c = 0; c < x.dim(); ++c) {
        const double d = x(i, c) - x(j, c);
        r2 += d * d;
      }
      best = std::max(best, r2);
    }
  }
  return std::sqrt(best);
}

namespace {

void check_weights(const State& x, const std::vector<double>& v) {
  if (v.size() != x.n()) throw std::invalid_argument("weights: size differs from agent count");
  double total = 0.0;
  for (double w : v) {
    if (!(w > 0.0)) throw std::invalid_argument("weights must be strictly positive");
    total += w;
  }
  if (std::abs(total / static_cast<double>(v.size()) - 1.0) > 1e-9) {
    throw std::invalid_argument("weights must have mean 1");
  }
}

std::vector<double> weighted_mean(const State& x, const std::vector<double>& v) {
  std::vector<double> out(x.dim(), 0.0);
  for (std::size_t c = 0; c < x.dim(); ++c) {
    const double* xc = x.coord(c);
    double s = 0.0;
    for (std::size_t i = 0; i < x.n(); ++i) s += v[i] * xc[i];
    out[c] = s / static_cast<double>(x.n());
  }
  return out;
}

double weighted_deviation(const State& x, const std::vector<double>& v) {
  const std::vector<double> mean = weighted_mean(x, v);
  double s = 0.0;
  for (std::size_t i = 0; i < x.n(); ++i) {
    double r2 = 0.0;
    for (std::size_t c = 0; c < x.dim(); ++c) {
      const double d = x(i, c) - mean[c];
      r2 += d * d;
    }
    s += v[i] * r2;
  }
  return std::sqrt(s / static_cast<double>(x.n()));
}

}  // namespace

double std_dev(const State& x) { return weighted_deviation(x, std::vector<double>(x.n(), 1.0)); }

double weighted_std_dev(const State& x, const std::vector<double>& v) {
  check_weights(x, v);
  return weighted_deviation(x, v);
}

std::vector<double> barycenter(const State& x) {
  return weighted_mean(x, std::vector<double>(x.n(), 1.0));
}

std::vector<double> weighted_barycenter(const State& x, const std::vector<double>& v) {
  check_weights(x, v);
  return weighted_mean(x, v);
}

double linf_distance(const State& x, const std::vector<double>& p) {
  if (p.size() != x.dim()) throw std::invalid_argument("linf_distance: dimension mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < x.n(); ++i) {
    double r2 = 0.0;
    for (std::size_t c = 0; c < x.dim(); ++c) {
      const double d = x(i, c) - p[c];
      r2 += d * d;
    }
    best = std::max(best, r2);
  }
  return std::sqrt(best);
}

double linf_norm(const State& x) { return linf_distance(x, std::vector<double>(x.dim(), 0.0)); }

double l2_distance(const State& x, const std::vector<double>& p) {
  if (p.size() != x.dim()) throw std::invalid_argument("l2_distance: dimension mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t c = 0; c < x.dim(); ++c) {
      const double d = x(i, c) - p[c];
      s += d * d;
    }
  }
  return std::sqrt(s / static_cast<double>(x.n()));
}

Diagnostics compute_diagnostics(const State& x, const std::vector<double>* weights) {
  Diagnostics d;
  d.diameter = diameter(x);
  d.std_dev = std_dev(x);
  d.barycenter = barycenter(x);
  d.linf_norm = linf_norm(x);
  if (weights) {
    d.weighted_std_dev = weighted_std_dev(x, *weights);
    d.weighted_barycenter = weighted_barycenter(x, *weights);
  }
  return d;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,agent,coord,value\n";
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const State& x = traj.states[k];
    const std::string t = format_double(traj.times[k]);
    for (std::size_t i = 0; i < x.n(); ++i) {
      for (std::size_t c = 0; c < x.dim(); ++c) {
        out << t << ',' << i << ',' << c << ',' << format_double(x(i, c)) << '\n';
      }
    }
  }
}

void write_diagnostics_csv(std::ostream& out, const Trajectory& traj) {
  const std::size_t dim = traj.states.empty() ? 0 : traj.states.front().dim();
  out << "t,diameter,std_dev,weighted_std_dev,linf_norm";
  for (std::size_t c = 0; c < dim; ++c) out << ",bary_" << c;
  out << '\n';
  for (std::size_t k = 0; k < traj.times.size(); ++k) {
    const Diagnostics& d = traj.diagnostics[k];
    out << format_double(traj.times[k]) << ',' << format_double(d.diameter) << ','
        << format_double(d.std_dev) << ','
        << (d.weighted_std_dev ? format_double(*d.weighted_std_dev) : std::string()) << ','
        << format_double(d.linf_norm);
    for (double b : d.barycenter) out << ',' << format_double(b);
    out << '\n';
  }
}

}  // namespace graphon
