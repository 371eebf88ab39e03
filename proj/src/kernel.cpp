#include "graphon/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "graphon/matrix.hpp"

namespace graphon {

TimeKernel::TimeKernel(std::string name, Evaluator evaluator, KernelMetadata metadata)
    : name_(std::move(name)), evaluator_(std::move(evaluator)), metadata_(std::move(metadata)) {
  if (metadata_.period && !(*metadata_.period > 0.0)) {
    throw std::invalid_argument("kernel period must be positive");
  }
  const auto& s = metadata_.switch_times;
  if (!s.empty() && s.front() != 0.0) {
    throw std::invalid_argument("switch times must start at 0");
  }
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (!(s[k] > s[k - 1])) throw std::invalid_argument("switch times must increase");
  }
  if (metadata_.period && !s.empty() && !(s.back() < *metadata_.period)) {
    throw std::invalid_argument("switch times must lie inside one period");
  }
}

TimeKernel& TimeKernel::with_row_profile(RowProfile profile) {
  row_profile_ = std::move(profile);
  return *this;
}

TimeKernel& TimeKernel::with_factor(Factor factor) {
  factor_ = std::move(factor);
  return *this;
}

std::vector<double> TimeKernel::breakpoints(double t0, double t1) const {
  std::vector<double> out;
  const auto& s = metadata_.switch_times;
  if (s.empty() || !(t1 > t0)) return out;
  if (!metadata_.period) {
    for (double x : s)
      if (x > t0 && x < t1) out.push_back(x);
    return out;
  }
  const double T = *metadata_.period;
  for (double k = std::floor(t0 / T); k * T < t1; k += 1.0) {
    for (double x : s) {
      const double b = k * T + x;
      if (b > t0 && b < t1) out.push_back(b);
    }
  }
  return out;
}

double TimeKernel::dwell_time() const {
  const auto& s = metadata_.switch_times;
  double gap = std::numeric_limits<double>::infinity();
  for (std::size_t k = 1; k < s.size(); ++k) gap = std::min(gap, s[k] - s[k - 1]);
  if (metadata_.period && !s.empty()) gap = std::min(gap, *metadata_.period - s.back() + s.front());
  return gap;
}

namespace {

// Exact remainder, so a(t) and a(t + T) agree whenever t + T is representable.
double phase(double t, double T) {
  double p = std::fmod(t, T);
  if (p < 0.0) p += T;
  return p;
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

TimeKernel leader_kernel(double T, int n) {
  const double nd = n;
  const double off_phase = (nd - 1.0) * T / nd;
  auto profile = [T, nd, off_phase](double t, double j) {
    const double p = phase(t, T);
    if (p >= off_phase) return 0.0;
    if (j < p / T || j > (p + 1.0) / T) return 0.0;
    const double centre = (2.0 * nd * p + T) / (2.0 * nd * T);
    return clamp01(1.0 - 2.0 * nd * std::abs(j - centre));
  };
  KernelMetadata meta;
  meta.period = T;
  meta.switch_times = {0.0};
  if (off_phase > 0.0) meta.switch_times.push_back(off_phase);
  TimeKernel k("leader", [profile](double t, double, double j) { return profile(t, j); },
               meta);
  k.with_row_profile(profile);
  return k;
}

double tent(double s) {
  s -= std::floor(s);
  return s <= 0.25 ? 1.0 - 4.0 * s : 0.0;
}

TimeKernel balanced_cycle_kernel() {
  KernelMetadata meta;
  meta.is_balanced = true;
  meta.is_stationary = true;
  return TimeKernel("balanced_cycle", [](double, double i, double j) { return tent(i - j); },
                    meta);
}

TimeKernel symmetric_switch_kernel(double T, int n) {
  const double nd = n;
  const double wrap_phase = (nd - 1.0) * T / nd;
  auto factor = [T, nd, wrap_phase](double t, double i) {
    const double p = phase(t, T);
    const double lo = p / T;
    if (p < wrap_phase) return (i >= lo && i <= lo + 1.0 / nd) ? 1.0 : 0.0;
    return (i >= lo || i <= lo + 1.0 / nd - 1.0) ? 1.0 : 0.0;
  };
  KernelMetadata meta;
  meta.is_symmetric = true;
  meta.period = T;
  meta.switch_times = {0.0};
  if (wrap_phase > 0.0) meta.switch_times.push_back(wrap_phase);
  TimeKernel k("symmetric_switch",
               [factor](double t, double i, double j) { return factor(t, i) * factor(t, j); },
               meta);
  k.with_factor(factor);
  return k;
}

bool half_connected_edge(double i, double j) {
  return (i <= 0.5 && i / 2.0 <= j && j <= 2.0 * i) || (i >= 0.5 && j >= 0.5);
}

TimeKernel half_connected_kernel() {
  KernelMetadata meta;
  meta.is_symmetric = true;
  meta.is_stationary = true;
  return TimeKernel("half_connected",
                    [](double, double i, double j) {
                      return (half_connected_edge(i, j) || half_connected_edge(j, i)) ? 1.0 : 0.0;
                    },
                    meta);
}

KernelMetadata symmetric_stationary() {
  KernelMetadata meta;
  meta.is_symmetric = true;
  meta.is_balanced = true;
  meta.is_stationary = true;
  return meta;
}

}  // namespace

TimeKernel builtin_kernel(const std::string& name, const KernelParams& params) {
  const bool needs_params = name == "leader" || name == "symmetric_switch";
  if (needs_params) {
    if (!(params.T > 0.0) || !std::isfinite(params.T)) {
      throw std::invalid_argument("kernel parameter T must be positive");
    }
    if (params.n <= 0) throw std::invalid_argument("kernel parameter n must be positive");
  }
  if (name == "leader") return leader_kernel(params.T, params.n);
  if (name == "balanced_cycle") return balanced_cycle_kernel();
  if (name == "symmetric_switch") return symmetric_switch_kernel(params.T, params.n);
  if (name == "half_connected") return half_connected_kernel();
  if (name == "complete") {
    return TimeKernel("complete", [](double, double, double) { return 1.0; },
                      symmetric_stationary());
  }
  if (name == "two_block") {
    return TimeKernel("two_block",
                      [](double, double i, double j) { return (i < 0.5) == (j < 0.5) ? 1.0 : 0.0; },
                      symmetric_stationary());
  }
  if (name == "zero") {
    return TimeKernel("zero", [](double, double, double) { return 0.0; },
                      symmetric_stationary());
  }
  throw std::invalid_argument("unknown kernel: " + name);
}

TimeKernel parse_grid_kernel(std::istream& in, double block_duration) {
  if (!(block_duration > 0.0)) throw std::invalid_argument("block duration must be positive");
  std::string tag_n, tag_t;
  long n = 0, samples = 0;
  if (!(in >> tag_n >> n >> tag_t >> samples) || tag_n != "N" || tag_t != "T_SAMPLES") {
    throw std::invalid_argument("grid kernel: expected header 'N <int> T_SAMPLES <int>'");
  }
  if (n <= 0 || samples <= 0) throw std::invalid_argument("grid kernel: sizes must be positive");

  auto blocks = std::make_shared<std::vector<Matrix>>();
  for (long b = 0; b < samples; ++b) {
    Matrix m(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
      for (long j = 0; j < n; ++j) {
        double w = 0.0;
        if (!(in >> w)) {
          throw std::invalid_argument("grid kernel: block " + std::to_string(b) +
                                      " is truncated");
        }
        if (!(w >= 0.0 && w <= 1.0)) {
          throw std::invalid_argument("grid kernel: weights must lie in [0, 1]");
        }
        m(i, j) = w;
      }
    }
    blocks->push_back(std::move(m));
  }

  KernelMetadata meta;
  meta.is_symmetric = true;
  meta.is_balanced = true;
  for (const Matrix& m : *blocks) {
    for (long i = 0; i < n; ++i) {
      double row = 0.0, col = 0.0;
      for (long j = 0; j < n; ++j) {
        if (m(i, j) != m(j, i)) meta.is_symmetric = false;
        row += m(i, j);
        col += m(j, i);
      }
      if (std::abs(row - col) > 1e-12 * n) meta.is_balanced = false;
    }
  }
  meta.is_stationary = samples == 1;
  meta.piecewise_constant = true;
  if (samples > 1) {
    meta.period = block_duration * static_cast<double>(samples);
    for (long b = 0; b < samples; ++b) meta.switch_times.push_back(block_duration * b);
  }

  const double nd = static_cast<double>(n);
  auto cell = [n, nd](double x) {
    const double c = std::floor(x * nd);
    return static_cast<std::size_t>(std::clamp(c, 0.0, nd - 1.0));
  };
  auto eval = [blocks, cell, block_duration, samples](double t, double i, double j) {
    std::size_t b = 0;
    if (samples > 1) {
      const double p = phase(t, block_duration * static_cast<double>(samples));
      b = std::min(static_cast<std::size_t>(p / block_duration),
                   static_cast<std::size_t>(samples - 1));
    }
    return (*blocks)[b](cell(i), cell(j));
  };
  return TimeKernel("grid", eval, meta);
}

TimeKernel load_grid_kernel(const std::string& path, double block_duration) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open kernel file: " + path);
  return parse_grid_kernel(in, block_duration);
}

NonlinKernel::NonlinKernel(std::string description, std::function<double(double)> evaluator,
                           double c_phi, Kind kind)
    : description_(std::move(description)),
      evaluator_(std::move(evaluator)),
      c_phi_(c_phi),
      kind_(kind) {
  if (!(c_phi_ > 0.0) || !std::isfinite(c_phi_)) {
    throw std::invalid_argument("c_phi must be positive and finite");
  }
}

NonlinKernel cucker_smale_phi() {
  return NonlinKernel(
      "cucker_smale",
      [](double r) {
        const double d = 1.0 + r;
        return 1.0 / (d * d);
      },
      1.0, NonlinKernel::Kind::cucker_smale);
}

NonlinKernel constant_phi(double value) {
  if (!(value > 0.0)) throw std::invalid_argument("constant phi must be positive");
  return NonlinKernel("constant", [value](double) { return value; }, value,
                      NonlinKernel::Kind::constant);
}

double gamma_R(const NonlinKernel& phi, double R, int grid_points) {
  if (!(R > 0.0) || !std::isfinite(R)) throw std::invalid_argument("gamma_R: R must be positive");
  if (grid_points < 2) throw std::invalid_argument("gamma_R: need at least 2 grid points");
  const double hi = 2.0 * R;
  const double step = hi / (grid_points - 1);
  int best = 0;
  double best_value = phi(0.0);
  for (int k = 1; k < grid_points; ++k) {
    const double r = k == grid_points - 1 ? hi : k * step;
    const double v = phi(r);
    if (v < best_value) {
      best_value = v;
      best = k;
    }
  }

  double a = best > 0 ? (best - 1) * step : 0.0;
  double b = best < grid_points - 1 ? (best + 1) * step : hi;
  const double inv_golden = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_golden * (b - a);
  double d = a + inv_golden * (b - a);
  double fc = phi(c), fd = phi(d);
  for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, hi); ++it) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_golden * (b - a);
      fc = phi(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_golden * (b - a);
      fd = phi(d);
    }
  }
  return std::min({best_value, fc, fd, phi(a), phi(b)});
}

}  // namespace graphon
