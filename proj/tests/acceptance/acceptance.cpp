// Acceptance run: one PASS/FAIL line per criterion at the required tolerances.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <sstream>
#include <string>

#include "graphon/csv.hpp"
#include "graphon/diagnostics.hpp"
#include "graphon/experiment.hpp"
#include "graphon/simd/kernels.hpp"
#include "graphon/spectral.hpp"
#include "oracles.hpp"

using namespace graphon;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [violated]");
  }
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

State sin2_state(std::size_t n) {
  return sample_state(
      [](double i) {
        const double s = std::sin(4.0 * i);
        return std::vector<double>{s * s};
      },
      n);
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string scratch(const std::string& name) {
  const fs::path p = fs::path(GRAPHON_TEST_TMP) / "acceptance" / name;
  fs::remove_all(p);
  return p.string();
}

Outcome closed_form() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  SolverConfig cfg;
  cfg.dt = 1e-2;
  cfg.t_end = 5.0;
  cfg.record_stride = 500;
  const Trajectory tr = integrate(builtin_kernel("complete"), constant_phi(1.0), sin2_state(50), cfg);
  const double secs = seconds_since(t0);
  const double ratio = tr.diagnostics.back().std_dev / tr.diagnostics.front().std_dev;
  const double rel = std::abs(ratio / std::exp(-5.0) - 1.0);
  o.require(rel <= 1e-5, "rel err " + num(rel) + " <= 1e-5");
  o.require(secs < 1.0, "runtime " + num(secs) + " s < 1 s");
  return o;
}

Outcome lambda2_golden() {
  Outcome o;
  const double lc = lambda2(graph_laplacian(sample_adjacency(builtin_kernel("complete"), 0.0, 50)));
  o.require(std::abs(lc - 1.0) <= 1e-10, "complete |l2-1| = " + num(std::abs(lc - 1.0)));
  const double lb = lambda2(graph_laplacian(sample_adjacency(builtin_kernel("two_block"), 0.0, 50)));
  o.require(std::abs(lb) <= 1e-12, "two_block |l2| = " + num(std::abs(lb)));
  Matrix path(3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) path(i, j) = (i > j ? i - j : j - i) <= 1 ? 1.0 : 0.0;
  const LaplacianMatrix L = graph_laplacian(path);
  const double lp = lambda2(L);
  const double ref = oracle::lambda2(L.entries);
  o.require(std::abs(lp - 1.0 / 3.0) <= 1e-9 && std::abs(lp - ref) <= 1e-9,
            "path |l2-1/3| = " + num(std::abs(lp - 1.0 / 3.0)) + ", vs char poly " +
                num(std::abs(lp - ref)));
  return o;
}

Outcome scrambling_invariance() {
  Outcome o;
  oracle::Rng rng(1001);
  int mismatches = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(2, 20));
    AdjacencyMatrix a = oracle::random_adjacency(rng, n, 0.6);
    for (std::size_t i = 0; i < n; ++i) a(i, i) = 1.0;
    if (scrambling(stochastic_reparam(a)) != scrambling(a)) ++mismatches;
  }
  o.require(mismatches == 0, std::to_string(mismatches) + "/1000 mismatches");
  return o;
}

Outcome concavity() {
  Outcome o;
  oracle::Rng rng(1002);
  double worst = INFINITY;
  for (int trial = 0; trial < 100; ++trial) {
    const AdjacencyMatrix a = oracle::random_symmetric(rng, 30, rng.uniform(0.1, 0.9));
    const AdjacencyMatrix b = oracle::random_symmetric(rng, 30, rng.uniform(0.1, 0.9));
    const double la = lambda2(graph_laplacian(a)), lb = lambda2(graph_laplacian(b));
    for (double z : {0.25, 0.5, 0.75}) {
      const double lm = lambda2(graph_laplacian(Matrix::blend(a.weights, b.weights, z)));
      worst = std::min(worst, lm - ((1.0 - z) * la + z * lb));
    }
  }
  o.require(worst >= -1e-10, "min margin " + num(worst));
  return o;
}

Outcome perron_suite() {
  Outcome o;
  oracle::Rng rng(1003);
  double res = 0.0, mean_err = 0.0, max_excess = -INFINITY, min_excess = -INFINITY, vmin = INFINITY;
  int done = 0;
  while (done < 100) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(2, 30));
    const AdjacencyMatrix a = oracle::random_adjacency(rng, n, rng.uniform(0.15, 1.0));
    const auto dec = scc_decompose(a);
    if (dec.components.size() != 1) continue;
    ++done;
    const auto v = perron_vector(a, dec);
    const LaplacianMatrix L = graph_laplacian(a);
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t i = 0; i < n; ++i) s += L(i, j) * v.values[i];
      res = std::max(res, std::abs(s));
    }
    double sum = 0.0, mx = 0.0, mn = INFINITY;
    for (double e : v.values) {
      sum += e;
      mx = std::max(mx, e);
      mn = std::min(mn, e);
    }
    vmin = std::min(vmin, mn);
    mean_err = std::max(mean_err, std::abs(sum / static_cast<double>(n) - 1.0));
    max_excess = std::max(max_excess, mx - 1.0 / dec.delta);
    min_excess = std::max(min_excess, lambda2_weighted(L, v) - mn);
  }
  o.require(res <= 1e-8, "max |L^T v| " + num(res));
  o.require(vmin > 0.0, "min v " + num(vmin));
  o.require(mean_err <= 1e-12, "mean err " + num(mean_err));
  o.require(max_excess <= 1e-8, "max v - 1/delta " + num(max_excess));
  o.require(min_excess <= 1e-8, "l2(L_v) - min v " + num(min_excess));

  double bal = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(2, 30));
    AdjacencyMatrix a = trial % 2 ? oracle::random_symmetric(rng, n)
                                  : sample_adjacency(builtin_kernel("balanced_cycle"), 0.0, n);
    const auto dec = scc_decompose(a);
    if (!dec.is_disjoint_union) continue;
    for (double e : perron_vector(a, dec).values) bal = std::max(bal, std::abs(e - 1.0));
  }
  o.require(bal <= 1e-10, "balanced |v-1| " + num(bal));
  return o;
}

Outcome leader_diameter() {
  Outcome o;
  ExperimentConfig c;
  c.experiment = ExperimentKind::leader;
  c.n = 100;
  c.t_end = 100.0;
  c.kernel_T = 10.0;
  c.kernel_n = 10;
  c.out_dir = scratch("leader");
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult r = run_experiment(c);
  const double secs = seconds_since(t0);
  double margin = NAN;
  for (const auto& e : r.summary["envelopes"])
    if (e["theorem"] == "diameter_contraction") margin = e["margin"].get<double>();
  const double allowed = -(1e-9 + integrator_tolerance(c.dt, c.t_end));
  o.require(margin >= allowed, "margin " + num(margin) + " >= " + num(allowed));
  o.require(secs < 30.0, "runtime " + num(secs) + " s < 30 s");
  return o;
}

Outcome balanced_cycle() {
  Outcome o;
  const TimeKernel k = builtin_kernel("balanced_cycle");
  const AdjacencyMatrix a = sample_adjacency(k, 0.0, 64);
  double deg_err = 0.0, rc = 0.0;
  for (std::size_t i = 0; i < 64; ++i) {
    double row = 0.0, col = 0.0;
    for (std::size_t j = 0; j < 64; ++j) {
      row += a(i, j) / 64.0;
      col += a(j, i) / 64.0;
    }
    deg_err = std::max(deg_err, std::abs(row - 0.125));
    rc = std::max(rc, std::abs(row - col));
  }
  o.require(deg_err <= 2e-2, "|in-degree - 1/8| " + num(deg_err));
  o.require(rc <= 1e-3, "|row - col| " + num(rc));

  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 50.0;
  cfg.record_stride = 10;
  const State x0 = sin2_state(64);
  const Trajectory tr = integrate(k, constant_phi(1.0), x0, cfg);
  double drift = 0.0;
  for (const auto& d : tr.diagnostics)
    drift = std::max(drift, std::abs(d.barycenter[0] - tr.diagnostics[0].barycenter[0]));
  o.require(drift <= 1e-8, "barycenter drift " + num(drift));

  const std::vector<double> x_inf = consensus_estimate(tr, ConsensusStrategy::tail_extrapolation).point;
  std::vector<double> l2;
  for (const State& x : tr.states) l2.push_back(l2_distance(x, x_inf));
  const RateFit fit = decay_rate_fit(tr.times, l2, 0.5);
  o.require(fit.rate > 0.0, "L2 rate " + num(fit.rate));

  const auto pers = persistence_check(k, 64, 1.0, PersistenceMode::average_of_lambda2, 50.0);
  EnvelopeParams p;
  p.mu = pers.mu_estimate;
  p.tau = 1.0;
  const EnvelopeReport rep = envelope_check(tr, Theorem::l2_balanced, p, &k);
  o.require(pers.mu_estimate > 0.0 && rep.pass,
            "l2_balanced mu " + num(pers.mu_estimate) + " margin " + num(rep.margin));
  return o;
}

Outcome non_consensus() {
  Outcome o;
  const TimeKernel k = builtin_kernel("half_connected");
  SolverConfig cfg;
  cfg.dt = 0.01;
  cfg.t_end = 200.0;
  cfg.record_stride = 10;
  const Trajectory tr = integrate(k, constant_phi(1.0), sin2_state(100), cfg);
  const std::vector<double> x_inf = consensus_estimate(tr, ConsensusStrategy::tail_extrapolation).point;
  const double linf = linf_distance(tr.states.back(), x_inf) / linf_distance(tr.states.front(), x_inf);
  const double l2 = l2_distance(tr.states.back(), x_inf) / l2_distance(tr.states.front(), x_inf);
  o.require(linf >= 0.1, "Linf final/initial " + num(linf) + " >= 0.1");
  o.require(l2 <= 0.1, "L2 final/initial " + num(l2) + " <= 0.1");
  return o;
}

Outcome rate_sweep() {
  Outcome o;
  ExperimentConfig c;
  c.experiment = ExperimentKind::rate_sweep;
  c.sweep_ns = {10, 20, 40, 80};
  c.out_dir = scratch("sweep");
  const auto t0 = std::chrono::steady_clock::now();
  const ExperimentResult r = run_rate_sweep(c);
  const double secs = seconds_since(t0);
  const auto& runs = r.summary["runs"];
  bool strict = true, rates = true;
  std::string l2s, rs;
  for (std::size_t k = 0; k < runs.size(); ++k) {
    const double l = runs[k]["lambda2"].get<double>();
    const double q = runs[k]["rate_l2"].get<double>();
    l2s += (k ? "," : "") + num(l);
    rs += (k ? "," : "") + num(q);
    if (k > 0) {
      strict = strict && l < runs[k - 1]["lambda2"].get<double>();
      rates = rates && q <= 1.05 * runs[k - 1]["rate_l2"].get<double>();
    }
  }
  o.require(strict, "lambda2 " + l2s + " strictly decreasing");
  o.require(rates, "L2 rates " + rs + " non-increasing within 5%");
  o.require(secs < 120.0, "runtime " + num(secs) + " s < 120 s");
  return o;
}

Outcome invariants() {
  Outcome o;
  oracle::Rng rng(1010);

  // Linf non-expansion and convex hull support functions.
  bool linf_ok = true, hull_ok = true;
  for (const char* name : {"leader", "balanced_cycle", "symmetric_switch", "half_connected"}) {
    const State x0 = oracle::random_state(rng, 30, 2);
    SolverConfig cfg;
    cfg.dt = 0.02;
    cfg.t_end = 20.0;
    cfg.record_stride = 10;
    const Trajectory tr = integrate(builtin_kernel(name, {10.0, 4}), cucker_smale_phi(), x0, cfg);
    std::vector<std::vector<double>> dirs;
    for (int k = 0; k < 20; ++k) {
      const double th = rng.uniform(0.0, 2.0 * M_PI);
      dirs.push_back({std::cos(th), std::sin(th)});
    }
    auto support = [](const State& x, const std::vector<double>& p) {
      double best = -INFINITY;
      for (std::size_t i = 0; i < x.n(); ++i) best = std::max(best, p[0] * x(i, 0) + p[1] * x(i, 1));
      return best;
    };
    for (std::size_t k = 0; k < tr.times.size(); ++k) {
      const double tol = integrator_tolerance(cfg.dt, tr.times[k]);
      linf_ok = linf_ok && linf_norm(tr.states[k]) <= linf_norm(x0) + tol;
      for (const auto& p : dirs) hull_ok = hull_ok && support(tr.states[k], p) <= support(x0, p) + tol;
    }
    const auto est = consensus_estimate(tr, ConsensusStrategy::tail_extrapolation);
    hull_ok = hull_ok && in_convex_hull(est.point, x0);
  }
  o.require(linf_ok, "Linf non-expansion");
  o.require(hull_ok, "convex hull");

  // Scalar product inequality on the diameter-realising pair.
  int lemma_bad = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(2, 40));
    const std::size_t d = static_cast<std::size_t>(rng.integer(1, 4));
    const State x = oracle::random_state(rng, n, d);
    std::size_t bi = 0, bj = 0;
    double best = -1.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (oracle::distance(x, i, j) > best) {
          best = oracle::distance(x, i, j);
          bi = i;
          bj = j;
        }
    auto inner = [&](std::size_t k) {
      double s = 0.0;
      for (std::size_t c = 0; c < d; ++c) s += x(k, c) * (x(bi, c) - x(bj, c));
      return s;
    };
    for (std::size_t k = 0; k < n; ++k)
      if (inner(k) > inner(bi) + 1e-12 || inner(k) < inner(bj) - 1e-12) ++lemma_bad;
  }
  o.require(lemma_bad == 0, "scalar product lemma " + std::to_string(lemma_bad) + " violations");

  // Psi_tau bounds along a symmetric-kernel run.
  {
    const TimeKernel k = builtin_kernel("symmetric_switch", {10.0, 4});
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 12.0;
    const Trajectory tr = integrate(k, cucker_smale_phi(), sin2_state(40), cfg);
    const auto r = psi_tau_bounds_check(k, cucker_smale_phi(), tr, 1.0, 10.0, 50);
    o.require(r.pass, "Psi ratios [" + num(r.min_ratio) + ", " + num(r.max_ratio) + "] in [10, 20] +/- " +
                          num(r.tolerance));
  }

  // Connectivity <-> lambda2 > 0.
  int cert_bad = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = static_cast<std::size_t>(rng.integer(2, 16));
    const AdjacencyMatrix a = oracle::random_symmetric(rng, n, rng.uniform(0.05, 0.5));
    const bool connected = scc_decompose(a).components.size() == 1;
    if ((lambda2(graph_laplacian(a)) > 1e-10) != connected) ++cert_bad;
  }
  o.require(cert_bad == 0, "connectivity certification " + std::to_string(cert_bad) + " mismatches");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    std::function<Outcome()> run;
  };
  const Criterion criteria[] = {
      {1, "closed-form complete-kernel decay", closed_form},
      {2, "lambda2 golden values", lambda2_golden},
      {3, "scrambling reparametrisation invariance", scrambling_invariance},
      {4, "lambda2 concavity", concavity},
      {5, "Perron suite", perron_suite},
      {6, "leader diameter envelope", leader_diameter},
      {7, "balanced cycle", balanced_cycle},
      {8, "non-consensus case", non_consensus},
      {9, "rate sweep", rate_sweep},
      {10, "invariant suites", invariants},
  };
  std::printf("kernels: %s\n", std::string(simd::name(simd::active().isa)).c_str());
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    if (!o.pass) ++failed;
    std::printf("criterion %2d %s: %s (%.2f s) %s\n", c.id, o.pass ? "PASS" : "FAIL", c.name,
                seconds_since(t0), o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/10 criteria passed\n", 10 - failed);
  return failed == 0 ? 0 : 1;
}
