#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "robustbayes/errors.hpp"
#include "robustbayes/oracles.hpp"

using namespace robustbayes;
using namespace robustbayes::oracles;
using testhelpers::make_observables;
using testhelpers::random_nonrefuted;
using testhelpers::random_observables;

TEST_CASE("simplex: bounded knapsack with one equality") {
  LpProblem lp;
  lp.c = {2.0, 1.0};
  lp.upper = {0.6, 0.6};
  lp.a_eq = {{1.0, 1.0}};
  lp.b_eq = {1.0};
  const auto sol = solve_lp(lp);
  CHECK(sol.x[0] == doctest::Approx(0.6));
  CHECK(sol.x[1] == doctest::Approx(0.4));
  CHECK(sol.value == doctest::Approx(1.6));
}

TEST_CASE("simplex: infeasible system throws") {
  LpProblem lp;
  lp.c = {1.0};
  lp.upper = {0.5};
  lp.a_eq = {{1.0}};
  lp.b_eq = {2.0};
  CHECK_THROWS_AS(solve_lp(lp), InfeasibleError);
}

TEST_CASE("simplex: degenerate ties resolve deterministically") {
  LpProblem lp;
  lp.c = {1.0, 1.0, 1.0};
  lp.upper = {0.25, 0.25, 0.25};
  lp.a_eq = {{1.0, 1.0, 1.0}};
  lp.b_eq = {0.5};
  const auto a = solve_lp(lp);
  const auto b = solve_lp(lp);
  CHECK(a.value == doctest::Approx(0.5));
  CHECK(a.x == b.x);
}

TEST_CASE("witness: floors on a non-refuted distribution have no defiers") {
  Rng rng(31);
  const auto f = random_nonrefuted(rng, 5);
  std::vector<double> h1(f.bins()), h0(f.bins());
  for (std::size_t i = 0; i < f.bins(); ++i) {
    h1[i] = std::max(f.p[i][1] - f.q[i][1], 0.0);
    h0[i] = std::max(f.q[i][0] - f.p[i][0], 0.0);
  }
  const auto w = witness_from_allocation(f, h1, h0);
  for (std::size_t i = 0; i < f.bins(); ++i) {
    CHECK(w.defier_z1[i] == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(w.defier_z0[i] == doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK(w.defier_probability == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("witness: full treated allocation removes always-takers") {
  Rng rng(32);
  const auto f = random_observables(rng, 4);
  std::vector<double> h1(f.bins()), h0(f.bins());
  for (std::size_t i = 0; i < f.bins(); ++i) {
    h1[i] = f.p[i][1];
    h0[i] = f.q[i][0];
  }
  const auto w = witness_from_allocation(f, h1, h0);
  for (std::size_t i = 0; i < f.bins(); ++i) {
    CHECK(w.always_taker[i] == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(w.never_taker[i] == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("witness: reassembly reproduces the observables exactly") {
  Rng rng(33);
  for (int rep = 0; rep < 15; ++rep) {
    const auto f = random_observables(rng, 6);
    std::vector<double> h1(f.bins()), h0(f.bins());
    for (std::size_t i = 0; i < f.bins(); ++i) {
      h1[i] = std::max(f.p[i][1] - f.q[i][1], 0.0) +
              rng.uniform() * std::min(f.p[i][1], f.q[i][1]);
      h0[i] = std::max(f.q[i][0] - f.p[i][0], 0.0) +
              rng.uniform() * std::min(f.q[i][0], f.p[i][0]);
    }
    const auto w = witness_from_allocation(f, h1, h0);
    for (std::size_t i = 0; i < f.bins(); ++i) {
      CHECK(std::abs(w.reassembled_p[i][0] - f.p[i][0]) < 1e-12);
      CHECK(std::abs(w.reassembled_p[i][1] - f.p[i][1]) < 1e-12);
      CHECK(std::abs(w.reassembled_q[i][0] - f.q[i][0]) < 1e-12);
      CHECK(std::abs(w.reassembled_q[i][1] - f.q[i][1]) < 1e-12);
      CHECK(w.defier_z1[i] >= -1e-12);
      CHECK(w.defier_z0[i] >= -1e-12);
      CHECK(w.always_taker[i] >= -1e-12);
      CHECK(w.never_taker[i] >= -1e-12);
    }
  }
}

TEST_CASE("witness: sandwich violation names the offending bin") {
  Rng rng(34);
  const auto f = random_observables(rng, 4);
  std::vector<double> h1(f.bins(), 0.0), h0(f.bins(), 0.0);
  for (std::size_t i = 0; i < f.bins(); ++i) {
    h1[i] = std::max(f.p[i][1] - f.q[i][1], 0.0);
    h0[i] = std::max(f.q[i][0] - f.p[i][0], 0.0);
  }
  h1[2] = f.p[2][1] + 0.5;  // above the cap
  try {
    witness_from_allocation(f, h1, h0);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("bin 2") != std::string::npos);
  }
}

TEST_CASE("chi2 oracle: two-atom closed form") {
  // One moment: Pr(pattern 1) must be 0.7 against a 50/50 base.
  const double div = chi2_min_divergence({0.5, 0.5}, {{1.0}, {0.0}}, {0.7});
  // t = (0.7, 0.3): 0.5 * (0.49/0.5 + 0.09/0.5 - 1)
  CHECK(div == doctest::Approx(0.08).epsilon(1e-9));
}

TEST_CASE("chi2 oracle: matching the base measure needs no divergence") {
  const double div = chi2_min_divergence({0.3, 0.45, 0.25}, {{1.0, 0.0}, {0.0, 1.0}, {0.0, 0.0}},
                                         {0.3, 0.45});
  CHECK(div == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("chi2 oracle: empty moment polytope throws") {
  CHECK_THROWS_AS(chi2_min_divergence({0.5, 0.5}, {{1.0}, {1.0}}, {0.2}), InfeasibleError);
}

TEST_CASE("intersection deviation needed: piecewise form") {
  CHECK(intersection_deviation_needed(0.4, 0.6, 0.5) == doctest::Approx(0.0));
  CHECK(intersection_deviation_needed(0.4, 0.6, 0.3) == doctest::Approx(0.1));
  CHECK(intersection_deviation_needed(0.4, 0.6, 0.8) == doctest::Approx(0.2));
  // Refuted layout: needs the gap regardless of theta in the middle.
  CHECK(intersection_deviation_needed(0.6, 0.4, 0.5) == doctest::Approx(0.2));
}
