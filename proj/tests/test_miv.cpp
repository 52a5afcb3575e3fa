#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "robustbayes/errors.hpp"
#include "robustbayes/miv.hpp"
#include "robustbayes/rng.hpp"

using namespace robustbayes;
using miv::MIVData;

namespace {

MIVData random_instance(Rng& rng, int points) {
  MIVData data;
  for (int i = 0; i < points; ++i) {
    data.z_grid.push_back(0.5 * i);
    const double lo = rng.uniform(-1.0, 1.0);
    data.h_lower.push_back(lo);
    data.h_upper.push_back(lo + rng.uniform(0.05, 1.0));
  }
  data.z0_index = 1 + static_cast<int>(rng.uniform() * (points - 1));
  return data;
}

// Candidate raised-tail mean used by the upper-bound threshold; mirrors the
// solver's construction so t-sweeps can audit the bisection.
std::vector<double> raised(const MIVData& data, double t) {
  auto env = miv::left_envelope(data.h_lower);
  for (std::size_t i = 0; i < env.size(); ++i) env[i] = std::min(env[i], data.h_upper[i]);
  for (std::size_t i = static_cast<std::size_t>(data.z0_index); i < env.size(); ++i)
    env[i] = std::min(std::max(t, env[i]), data.h_upper[i]);
  return env;
}

double random_sandwiched_deviation(Rng& rng, const MIVData& data) {
  std::vector<double> g(data.z_grid.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    g[i] = data.h_lower[i] + rng.uniform() * (data.h_upper[i] - data.h_lower[i]);
  return miv::deviation_left(g, data.spacing());
}

}  // namespace

TEST_CASE("left envelope: nondecreasing input is a fixed point") {
  const std::vector<double> h{-1.0, -0.5, 0.0, 0.7, 0.7, 2.0};
  CHECK(miv::left_envelope(h) == h);
}

TEST_CASE("left envelope: running maximum") {
  const std::vector<double> h{1.0, 0.0, 2.0};
  const std::vector<double> expected{1.0, 1.0, 2.0};
  CHECK(miv::left_envelope(h) == expected);
}

TEST_CASE("left envelope matches the prefix-scan oracle and is idempotent") {
  Rng rng(71);
  for (int rep = 0; rep < 30; ++rep) {
    std::vector<double> h(8);
    for (auto& v : h) v = rng.uniform(-2.0, 2.0);
    const auto env = miv::left_envelope(h);
    for (std::size_t i = 0; i < h.size(); ++i) {
      double best = h[0];
      for (std::size_t j = 1; j <= i; ++j) best = std::max(best, h[j]);
      CHECK(env[i] == doctest::Approx(best));
      CHECK(env[i] >= h[i]);
    }
    CHECK(miv::left_envelope(env) == env);
  }
}

TEST_CASE("deviation_left: zero exactly for monotone functions") {
  CHECK(miv::deviation_left(std::vector<double>{0.0, 0.5, 0.5, 1.0}, 0.5) ==
        doctest::Approx(0.0));
  CHECK(miv::deviation_left(std::vector<double>{1.0, 0.0, 2.0}, 1.0) == doctest::Approx(1.0));
  Rng rng(72);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> h(6);
    for (auto& v : h) v = rng.uniform(-1.0, 1.0);
    double total = 0.0;
    double running = h[0];
    for (double v : h) {
      running = std::max(running, v);
      total += running - v;
    }
    CHECK(miv::deviation_left(h, 0.25) == doctest::Approx(total * 0.25));
  }
}

TEST_CASE("min deviation: monotone lower envelope below the upper needs nothing") {
  MIVData data{{0, 1, 2, 3}, {1.0, 1.1, 1.4, 1.8}, {0.0, 0.2, 0.5, 0.9}, 2};
  CHECK(miv::min_deviation(data) == doctest::Approx(0.0));
}

TEST_CASE("min deviation: five-point hand computation") {
  MIVData data{{0, 1, 2, 3, 4}, {1.0, 1.0, 0.4, 1.0, 0.5}, {0.0, 0.5, 0.2, 0.6, 0.4}, 2};
  // envelope of lower = (0,.5,.5,.6,.6); capped at upper = (0,.5,.4,.6,.5);
  // gaps to its own envelope = (0,0,.1,0,.1).
  CHECK(miv::min_deviation(data) == doctest::Approx(0.2).epsilon(1e-12));
}

TEST_CASE("min deviation lower-bounds every sandwiched mean") {
  Rng rng(73);
  for (int rep = 0; rep < 10; ++rep) {
    const auto data = random_instance(rng, 6);
    const double floor = miv::min_deviation(data);
    const double ceiling = miv::max_deviation(data);
    for (int draw = 0; draw < 50; ++draw) {
      const double dev = random_sandwiched_deviation(rng, data);
      CHECK(dev >= floor - 1e-12);
      CHECK(dev <= ceiling + 1e-12);
    }
  }
}

TEST_CASE("max deviation matches brute force over envelope choices") {
  Rng rng(74);
  for (int rep = 0; rep < 10; ++rep) {
    const auto data = random_instance(rng, 7);
    // The maximizer sits on one of the two envelopes at every grid point.
    double best = 0.0;
    const std::size_t k = data.z_grid.size();
    for (std::size_t mask = 0; mask < (1u << k); ++mask) {
      std::vector<double> g(k);
      for (std::size_t i = 0; i < k; ++i)
        g[i] = (mask & (1u << i)) ? data.h_upper[i] : data.h_lower[i];
      best = std::max(best, miv::deviation_left(g, data.spacing()));
    }
    CHECK(miv::max_deviation(data) == doctest::Approx(best).epsilon(1e-10));
  }
}

TEST_CASE("theta bounds: tiny slack pins the upper bound near the capped envelope") {
  MIVData data{{0, 1, 2, 3, 4}, {1.0, 1.0, 0.4, 1.0, 0.5}, {0.0, 0.5, 0.2, 0.6, 0.4}, 2};
  const auto b = miv::theta_bounds(data, 1e-9);
  CHECK(b.lower == doctest::Approx(0.2));  // lower envelope at z0
  CHECK(b.upper == doctest::Approx(0.4).epsilon(1e-6));  // h-tilde at z0
}

TEST_CASE("theta bounds: generous slack clips at the upper envelope") {
  MIVData data{{0, 1, 2, 3}, {0.6, 0.9, 1.0, 1.2}, {0.0, 0.2, 0.3, 0.6}, 1};
  const double room = miv::max_deviation(data) - miv::min_deviation(data);
  const auto b = miv::theta_bounds(data, 0.9 * room);
  CHECK(b.upper == doctest::Approx(0.9));
}

TEST_CASE("theta bounds: bisection agrees with an exhaustive t-grid") {
  Rng rng(75);
  for (int rep = 0; rep < 6; ++rep) {
    const auto data = random_instance(rng, 6);
    const double room = miv::max_deviation(data) - miv::min_deviation(data);
    if (room < 1e-6) continue;
    const double delta_m = 0.3 * room;
    const auto b = miv::theta_bounds(data, delta_m);
    const double budget = miv::min_deviation(data) + delta_m;

    const auto z0 = static_cast<std::size_t>(data.z0_index);
    double best = data.h_lower[z0];
    const int grid_n = 10000;
    for (int i = 0; i <= grid_n; ++i) {
      const double t =
          data.h_lower[z0] + (data.h_upper[z0] - data.h_lower[z0]) * i / grid_n;
      if (miv::deviation_left(raised(data, t), data.spacing()) <= budget)
        best = std::max(best, t);
    }
    CHECK(std::abs(b.upper - best) < 1e-4 * std::max(1.0, std::abs(best)) + 1e-6);
  }
}

TEST_CASE("theta bounds: threshold deviation is monotone in t, bounds monotone in slack") {
  Rng rng(76);
  const auto data = random_instance(rng, 6);
  const auto z0 = static_cast<std::size_t>(data.z0_index);
  double prev = -1.0;
  for (int i = 0; i <= 20; ++i) {
    const double t = data.h_lower[z0] + (data.h_upper[z0] - data.h_lower[z0]) * i / 20.0;
    const double dev = miv::deviation_left(raised(data, t), data.spacing());
    CHECK(dev >= prev - 1e-12);
    prev = dev;
  }

  const double room = miv::max_deviation(data) - miv::min_deviation(data);
  if (room > 1e-6) {
    const auto b1 = miv::theta_bounds(data, 0.2 * room);
    const auto b2 = miv::theta_bounds(data, 0.6 * room);
    CHECK(b1.upper <= b2.upper + 1e-12);
    CHECK(b1.lower == doctest::Approx(b2.lower));  // lower bound constant in slack
  }
}

TEST_CASE("theta bounds: infeasible budget throws") {
  MIVData data{{0, 1, 2, 3}, {0.6, 0.9, 1.0, 1.2}, {0.0, 0.2, 0.3, 0.6}, 1};
  const double room = miv::max_deviation(data) - miv::min_deviation(data);
  CHECK_THROWS_AS(miv::theta_bounds(data, room + 0.5), InfeasibleError);
  CHECK_THROWS_AS(miv::theta_bounds(data, 0.0), InfeasibleError);
}

TEST_CASE("right metric mirrors the left metric through reflect-and-negate") {
  Rng rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> h(7);
    for (auto& v : h) v = rng.uniform(-1.0, 1.0);
    // Right-metric deviation computed directly: gap to the running minimum
    // from the right.
    double direct = 0.0;
    double running = h.back();
    std::vector<double> env_right(h.size());
    for (std::size_t i = h.size(); i-- > 0;) {
      running = std::min(running, h[i]);
      env_right[i] = running;
    }
    for (std::size_t i = 0; i < h.size(); ++i) direct += h[i] - env_right[i];

    std::vector<double> reflected(h.size());
    for (std::size_t i = 0; i < h.size(); ++i) reflected[i] = -h[h.size() - 1 - i];
    CHECK(miv::deviation_left(reflected, 1.0) == doctest::Approx(direct).epsilon(1e-12));
  }
}

TEST_CASE("union bounds contain each single-metric interval") {
  Rng rng(78);
  for (int rep = 0; rep < 8; ++rep) {
    const auto data = random_instance(rng, 6);
    const double room_l = miv::max_deviation(data, miv::Metric::left) -
                          miv::min_deviation(data, miv::Metric::left);
    const double room_r = miv::max_deviation(data, miv::Metric::right) -
                          miv::min_deviation(data, miv::Metric::right);
    const double delta_m = 0.25 * std::min(room_l, room_r);
    if (delta_m < 1e-9) continue;
    const auto left = miv::theta_bounds(data, delta_m, miv::Metric::left);
    const auto right = miv::theta_bounds(data, delta_m, miv::Metric::right);
    const auto both = miv::theta_bounds_union(data, delta_m);
    CHECK(both.lower <= left.lower + 1e-12);
    CHECK(both.lower <= right.lower + 1e-12);
    CHECK(both.upper >= left.upper - 1e-12);
    CHECK(both.upper >= right.upper - 1e-12);
  }
}
