#include <cmath>
#include <sstream>

#include "doctest.h"
#include "graphon/discretize.hpp"
#include "oracles.hpp"

using namespace graphon;

TEST_SUITE("discretize") {
  TEST_CASE("cell index convention") {
    CHECK(cell_index(0.0, 4) == 0);
    CHECK(cell_index(0.25, 4) == 1);
    CHECK(cell_index(0.2499, 4) == 0);
    CHECK(cell_index(1.0, 4) == 3);
  }

  TEST_CASE("complete and two block samples") {
    const AdjacencyMatrix a = sample_adjacency(builtin_kernel("complete"), 2.0, 3);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) CHECK(a(i, j) == 1.0);
    const AdjacencyMatrix b = sample_adjacency(builtin_kernel("two_block"), 0.0, 4);
    for (std::size_t i = 0; i < 4; ++i)
      for (std::size_t j = 0; j < 4; ++j) CHECK(b(i, j) == ((i < 2) == (j < 2) ? 1.0 : 0.0));
  }

  TEST_CASE("balanced cycle cells against fine quadrature") {
    const TimeKernel k = builtin_kernel("balanced_cycle");
    const AdjacencyMatrix coarse = sample_adjacency(k, 0.0, 8, 4);
    const AdjacencyMatrix fine = sample_adjacency(k, 0.0, 8, 64);
    const AdjacencyMatrix finer = sample_adjacency(k, 0.0, 8, 512);
    // Off the diagonal the tent is continuous with one kink per cell, so the
    // midpoint error is second order in the sub-cell width.
    for (std::size_t i = 0; i < 8; ++i)
      for (std::size_t j = 0; j < 8; ++j)
        if (i != j) {
          CHECK(std::abs(coarse(i, j) - finer(i, j)) <= 4.0 / (32.0 * 32.0) * 2.0);
          CHECK(std::abs(fine(i, j) - finer(i, j)) <= 4.0 / (512.0 * 512.0) * 2.0);
        }
    // The tent jumps on the diagonal, where midpoints converge at first order
    // to the exact cell mean 1/2 - (2/3)(1/8).
    const double exact = 0.5 - 2.0 / 3.0 / 8.0;
    for (std::size_t i = 0; i < 8; ++i) {
      CHECK(std::abs(finer(i, i) - exact) < std::abs(fine(i, i) - exact));
      CHECK(std::abs(fine(i, i) - exact) < std::abs(coarse(i, i) - exact));
      CHECK(std::abs(finer(i, i) - exact) <= 1.0 / 512.0);
    }
  }

  TEST_CASE("sample_state") {
    const State c = sample_state([](double) { return std::vector<double>{2.5, -1.0}; }, 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(c(i, 0) == 2.5);
      CHECK(c(i, 1) == -1.0);
    }
    const State id = sample_state([](double i) { return std::vector<double>{i}; }, 2);
    CHECK(id(0, 0) == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(id(1, 0) == doctest::Approx(0.75).epsilon(1e-15));

    auto prof = [](double i) {
      const double s = std::sin(4.0 * i);
      return std::vector<double>{s * s};
    };
    const State x = sample_state(prof, 100);
    double worst = 0.0;
    for (std::size_t k = 0; k < 100; ++k) {
      double ref = 0.0;
      for (int q = 0; q < 64; ++q) ref += prof((k + (q + 0.5) / 64.0) / 100.0)[0] / 64.0;
      worst = std::max(worst, std::abs(ref - x(k, 0)));
    }
    CHECK(worst <= 1e-6);
  }

  TEST_CASE("lift examples") {
    Matrix one(1, 0.5);
    const TimeKernel k = lift_piecewise(AdjacencyMatrix(one));
    CHECK(k(0.0, 0.1, 0.9) == 0.5);
    CHECK(k(3.0, 1.0, 0.0) == 0.5);
    Matrix id(2);
    id(0, 0) = id(1, 1) = 1.0;
    CHECK(lift_piecewise(AdjacencyMatrix(id))(0.0, 0.1, 0.9) == 0.0);
    CHECK(lift_piecewise(AdjacencyMatrix(id))(0.0, 0.9, 0.9) == 1.0);
  }

  TEST_CASE("sample after lift is the identity") {
    oracle::Rng rng(21);
    for (int trial = 0; trial < 40; ++trial) {
      const std::size_t n = static_cast<std::size_t>(rng.integer(1, 64));
      const AdjacencyMatrix a = oracle::random_adjacency(rng, n, 0.7);
      const AdjacencyMatrix b = sample_adjacency(lift_piecewise(a), 1.0, n);
      CHECK(b.weights == a.weights);
    }
  }

  TEST_CASE("lift flags symmetric and balanced inputs") {
    oracle::Rng rng(22);
    const AdjacencyMatrix s = oracle::random_symmetric(rng, 6);
    CHECK(lift_piecewise(s).metadata().is_symmetric);
    CHECK(lift_piecewise(s).metadata().is_stationary);
    const AdjacencyMatrix a = oracle::random_adjacency(rng, 6);
    CHECK_FALSE(lift_piecewise(a).metadata().is_symmetric);
  }

  TEST_CASE("refinement consistency for a Lipschitz kernel") {
    const TimeKernel k("smooth", [](double, double i, double j) { return 0.5 + 0.4 * std::sin(3 * i + 2 * j); },
                       KernelMetadata{});
    double prev = INFINITY;
    for (std::size_t n : {4u, 8u, 16u, 32u}) {
      const AdjacencyMatrix a = sample_adjacency(k, 0.0, n);
      const AdjacencyMatrix b = sample_adjacency(k, 0.0, 2 * n);
      double diff = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
          const double avg = 0.25 * (b(2 * i, 2 * j) + b(2 * i + 1, 2 * j) + b(2 * i, 2 * j + 1) +
                                     b(2 * i + 1, 2 * j + 1));
          diff = std::max(diff, std::abs(a(i, j) - avg));
        }
      CHECK(diff < prev);
      prev = diff;
    }
  }

  TEST_CASE("force unit diagonal") {
    const AdjacencyMatrix a = sample_adjacency(builtin_kernel("two_block"), 0.0, 4, 4, true);
    CHECK(a.unit_diagonal);
    for (std::size_t i = 0; i < 4; ++i) CHECK(a(i, i) == 1.0);
  }

  TEST_CASE("csv round trips are exact") {
    oracle::Rng rng(23);
    const AdjacencyMatrix a = oracle::random_adjacency(rng, 7);
    std::stringstream ms;
    write_matrix_csv(ms, a.weights);
    CHECK(read_matrix_csv(ms) == a.weights);
    const State x = oracle::random_state(rng, 9, 3);
    std::stringstream ss;
    write_state_csv(ss, x);
    CHECK(read_state_csv(ss) == x);
  }
}
