#include <cmath>
#include <sstream>

#include "doctest.h"
#include "graphon/dynamics.hpp"
#include "graphon/errors.hpp"
#include "oracles.hpp"

using namespace graphon;

namespace {

State sin2_state(std::size_t n) {
  return sample_state(
      [](double i) {
        const double s = std::sin(4.0 * i);
        return std::vector<double>{s * s};
      },
      n);
}

// <x_k, x_i - x_j>
double inner(const State& x, std::size_t k, std::size_t i, std::size_t j) {
  double s = 0.0;
  for (std::size_t c = 0; c < x.dim(); ++c) s += x(k, c) * (x(i, c) - x(j, c));
  return s;
}

}  // namespace

TEST_SUITE("dynamics") {
  TEST_CASE("drift examples") {
    const AdjacencyMatrix ones(Matrix(2, 1.0));
    State x(2, 1);
    x(1, 0) = 1.0;
    const State v = drift(ones, constant_phi(1.0), x);
    CHECK(v(0, 0) == 0.5);
    CHECK(v(1, 0) == -0.5);

    const State c(5, 2, 3.0);
    oracle::Rng rng(31);
    const State vc = drift(oracle::random_adjacency(rng, 5), cucker_smale_phi(), c);
    for (double e : vc.values()) CHECK(e == 0.0);
  }

  TEST_CASE("drift against elementwise oracle") {
    oracle::Rng rng(32);
    const NonlinKernel cs = cucker_smale_phi();
    for (int trial = 0; trial < 50; ++trial) {
      const std::size_t n = trial < 25 ? 3 : static_cast<std::size_t>(rng.integer(2, 40));
      const std::size_t d = trial % 3 == 0 ? 2 : 1;
      const AdjacencyMatrix a = oracle::random_adjacency(rng, n);
      const State x = oracle::random_state(rng, n, d);
      for (const NonlinKernel& phi : {cs, constant_phi(0.7)}) {
        const State v = drift(a, phi, x);
        const State ref = oracle::drift(a, [&](double r) { return phi(r); }, x);
        for (std::size_t k = 0; k < v.values().size(); ++k)
          CHECK(v.values()[k] == doctest::Approx(ref.values()[k]).epsilon(1e-14).scale(1.0));
      }
    }
    CHECK_THROWS_AS(drift(oracle::random_adjacency(rng, 3), cs, State(4, 1)), std::invalid_argument);
  }

  TEST_CASE("complete kernel closed form") {
    const State x0 = sin2_state(50);
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 5.0;
    cfg.record_stride = 100;
    const Trajectory tr = integrate(builtin_kernel("complete"), constant_phi(1.0), x0, cfg);
    REQUIRE(tr.times.back() == doctest::Approx(5.0));
    const double ratio = tr.diagnostics.back().std_dev / tr.diagnostics.front().std_dev;
    CHECK(std::abs(ratio / std::exp(-5.0) - 1.0) <= 1e-6);
    CHECK(tr.times.size() == 6);
  }

  TEST_CASE("two agents closed form") {
    State x0(2, 1);
    x0(1, 0) = 1.0;
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 3.0;
    const Trajectory tr = integrate(builtin_kernel("complete"), constant_phi(1.0), x0, cfg);
    const State& x = tr.states.back();
    CHECK(std::abs(std::abs(x(1, 0) - x(0, 0)) - std::exp(-3.0)) <= 1e-6);
  }

  TEST_CASE("constant initial state stays put") {
    const State x0(7, 2, 0.3);
    SolverConfig cfg;
    cfg.dt = 0.05;
    cfg.t_end = 4.0;
    const Trajectory tr = integrate(builtin_kernel("leader"), cucker_smale_phi(), x0, cfg);
    for (const State& x : tr.states) CHECK(x == x0);
  }

  TEST_CASE("records include the endpoints and respect the stride") {
    SolverConfig cfg;
    cfg.dt = 0.1;
    cfg.t_end = 1.05;
    cfg.record_stride = 4;
    const Trajectory tr = integrate(builtin_kernel("complete"), constant_phi(1.0), sin2_state(4), cfg);
    CHECK(tr.times.front() == 0.0);
    CHECK(tr.times.back() == doctest::Approx(1.05).epsilon(1e-14));
    for (std::size_t k = 1; k < tr.times.size(); ++k) CHECK(tr.times[k] > tr.times[k - 1]);
    CHECK(tr.states.size() == tr.times.size());
    CHECK(tr.diagnostics.size() == tr.times.size());
  }

  TEST_CASE("tracked functional integral") {
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 2.0;
    cfg.record_stride = 50;
    cfg.tracked_functional = [](const AdjacencyMatrix& a) { return a(0, 0); };
    const Trajectory tr = integrate(builtin_kernel("complete"), constant_phi(1.0), sin2_state(3), cfg);
    for (std::size_t k = 0; k < tr.times.size(); ++k)
      CHECK(tr.diagnostics[k].functional_integral == doctest::Approx(tr.times[k]).epsilon(1e-12));
  }

  TEST_CASE("invalid configs") {
    SolverConfig cfg;
    cfg.dt = 2.0;
    cfg.t_end = 1.0;
    CHECK_THROWS_AS(integrate(builtin_kernel("complete"), constant_phi(1.0), State(2, 1), cfg),
                    std::invalid_argument);
    cfg.dt = 0.1;
    State bad(2, 1);
    bad(0, 0) = NAN;
    CHECK_THROWS_AS(integrate(builtin_kernel("complete"), constant_phi(1.0), bad, cfg), NumericalError);
  }

  TEST_CASE("diameter") {
    CHECK(diameter(State(4, 2, 1.5)) == 0.0);
    State x(3, 1);
    x(1, 0) = 1.0;
    x(2, 0) = 3.0;
    CHECK(diameter(x) == 3.0);
    oracle::Rng rng(33);
    for (int trial = 0; trial < 20; ++trial) {
      const State r = oracle::random_state(rng, 20, 1 + trial % 3);
      CHECK(diameter(r) == doctest::Approx(oracle::diameter(r)).epsilon(1e-15));
    }
  }

  TEST_CASE("standard deviations") {
    const State c(5, 2, -0.4);
    CHECK(std_dev(c) == 0.0);
    CHECK(weighted_std_dev(c, std::vector<double>(5, 1.0)) == 0.0);
    State x(2, 1);
    x(1, 0) = 1.0;
    CHECK(std_dev(x) == 0.5);
    oracle::Rng rng(34);
    const State r = oracle::random_state(rng, 13, 2);
    CHECK(weighted_std_dev(r, std::vector<double>(13, 1.0)) == std_dev(r));
    double brute = 0.0;
    for (std::size_t i = 0; i < 13; ++i)
      for (std::size_t j = 0; j < 13; ++j) brute += std::pow(oracle::distance(r, i, j), 2);
    CHECK(std_dev(r) == doctest::Approx(std::sqrt(brute / (2.0 * 169.0))).epsilon(1e-13));
    CHECK_THROWS_AS(weighted_std_dev(r, std::vector<double>(13, 2.0)), std::invalid_argument);
  }

  TEST_CASE("barycenters") {
    CHECK(barycenter(State(3, 1, 0.7))[0] == doctest::Approx(0.7).epsilon(1e-15));
    State x(2, 1);
    x(1, 0) = 1.0;
    CHECK(barycenter(x)[0] == 0.5);
    oracle::Rng rng(35);
    const State r = oracle::random_state(rng, 17, 3);
    const auto a = barycenter(r);
    const auto b = weighted_barycenter(r, std::vector<double>(17, 1.0));
    for (std::size_t c = 0; c < 3; ++c) CHECK(std::abs(a[c] - b[c]) <= 1e-15);
  }

  TEST_CASE("trajectory invariants") {
    oracle::Rng rng(36);
    struct Case {
      const char* kernel;
      bool cs;
    };
    for (Case cse : {Case{"leader", false}, Case{"balanced_cycle", false},
                     Case{"symmetric_switch", true}, Case{"half_connected", false}}) {
      const State x0 = oracle::random_state(rng, 24, 2);
      SolverConfig cfg;
      cfg.dt = 0.02;
      cfg.t_end = 15.0;
      cfg.record_stride = 5;
      const NonlinKernel phi = cse.cs ? cucker_smale_phi() : constant_phi(1.0);
      const Trajectory tr = integrate(builtin_kernel(cse.kernel, {10.0, 4}), phi, x0, cfg);
      const double l0 = linf_norm(x0);
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
      double prev_diam = diameter(x0);
      bool linf_ok = true, hull_ok = true, diam_ok = true;
      for (std::size_t k = 0; k < tr.times.size(); ++k) {
        const double tol = integrator_tolerance(cfg.dt, tr.times[k]);
        linf_ok = linf_ok && linf_norm(tr.states[k]) <= l0 + tol;
        for (const auto& p : dirs) hull_ok = hull_ok && support(tr.states[k], p) <= support(x0, p) + tol;
        const double dk = tr.diagnostics[k].diameter;
        diam_ok = diam_ok && dk <= prev_diam + tol + 1e-15;
        prev_diam = dk;
      }
      CHECK_MESSAGE(linf_ok, cse.kernel);
      CHECK_MESSAGE(hull_ok, cse.kernel);
      CHECK_MESSAGE(diam_ok, cse.kernel);
    }
  }

  TEST_CASE("barycenter conserved for balanced kernels") {
    SolverConfig cfg;
    cfg.dt = 0.01;
    cfg.t_end = 50.0;
    cfg.record_stride = 100;
    const State x0 = sin2_state(64);
    const Trajectory tr = integrate(builtin_kernel("balanced_cycle"), constant_phi(1.0), x0, cfg);
    double drift_max = 0.0;
    for (const auto& d : tr.diagnostics)
      drift_max = std::max(drift_max, std::abs(d.barycenter[0] - tr.diagnostics[0].barycenter[0]));
    CHECK(drift_max <= 1e-8);
  }

  TEST_CASE("scalar product inequality on the diameter pair") {
    oracle::Rng rng(37);
    for (int trial = 0; trial < 100; ++trial) {
      const std::size_t n = static_cast<std::size_t>(rng.integer(2, 30));
      const State x = oracle::random_state(rng, n, static_cast<std::size_t>(rng.integer(1, 4)));
      std::size_t bi = 0, bj = 0;
      double best = -1.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          if (oracle::distance(x, i, j) > best) {
            best = oracle::distance(x, i, j);
            bi = i;
            bj = j;
          }
      for (std::size_t k = 0; k < n; ++k) {
        CHECK(inner(x, k, bi, bj) <= inner(x, bi, bi, bj) + 1e-12);
        CHECK(inner(x, k, bi, bj) >= inner(x, bj, bi, bj) - 1e-12);
      }
    }
  }

  TEST_CASE("distances and csv") {
    State x(2, 1);
    x(1, 0) = 2.0;
    CHECK(linf_distance(x, {1.0}) == 1.0);
    CHECK(l2_distance(x, {1.0}) == 1.0);
    SolverConfig cfg;
    cfg.dt = 0.5;
    cfg.t_end = 1.0;
    const Trajectory tr = integrate(builtin_kernel("complete"), constant_phi(1.0), x, cfg);
    std::ostringstream a, b;
    write_trajectory_csv(a, tr);
    write_diagnostics_csv(b, tr);
    CHECK(a.str().rfind("t,agent,coord,value\n0,0,0,0\n", 0) == 0);
    CHECK(b.str().rfind("t,diameter,std_dev,weighted_std_dev,linf_norm,bary_0\n", 0) == 0);
  }
}
