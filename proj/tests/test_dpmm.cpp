#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "robustbayes/dpmm.hpp"
#include "robustbayes/errors.hpp"
#include "robustbayes/stats.hpp"

using namespace robustbayes;

namespace {

std::vector<Observation> single_cell_data(const std::vector<double>& ys) {
  std::vector<Observation> out;
  for (double y : ys) out.push_back({y, 1, 1});
  return out;
}

DPMMConfig fast_config() {
  DPMMConfig config;
  config.truncation_level = 10;
  config.burn_in = 20;
  config.thinning = 1;
  return config;
}

}  // namespace

TEST_CASE("config invariants") {
  DPMMConfig config;
  config.gamma_shape = 1.0;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = DPMMConfig{};
  config.truncation_level = 5;
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
  config = DPMMConfig{};
  config.dz_pseudocounts = {0, 0, 0, 0};
  CHECK_THROWS_AS(config.validate(), std::invalid_argument);
}

TEST_CASE("identical data and seed give bitwise-identical draw sequences") {
  Rng gen(41);
  std::vector<Observation> data;
  for (int i = 0; i < 120; ++i)
    data.push_back({gen.normal(0.3, 1.1), static_cast<int>(gen.uniform() < 0.5),
                    static_cast<int>(gen.uniform() < 0.5)});

  auto s1 = fit(data, fast_config(), 2024);
  auto s2 = fit(data, fast_config(), 2024);
  const auto d1 = s1.draw(5);
  const auto d2 = s2.draw(5);
  REQUIRE(d1.size() == d2.size());
  for (std::size_t k = 0; k < d1.size(); ++k) {
    for (int c = 0; c < 4; ++c) {
      CHECK(d1[k].dz_probs[c] == d2[k].dz_probs[c]);
      CHECK(d1[k].cells[c].sd == d2[k].cells[c].sd);
      CHECK(d1[k].cells[c].weights == d2[k].cells[c].weights);
      CHECK(d1[k].cells[c].means == d2[k].cells[c].means);
    }
  }

  auto s3 = fit(data, fast_config(), 2025);
  const auto d3 = s3.draw(1);
  CHECK(d3[0].dz_probs[0] != d1[0].dz_probs[0]);
}

TEST_CASE("cell-probability posterior matches the conjugate Dirichlet mean") {
  // 6 observations spread as counts (1, 2, 0, 3); pseudocounts 0.25 each.
  std::vector<Observation> data;
  data.push_back({0.1, 0, 0});
  for (int i = 0; i < 2; ++i) data.push_back({0.2 + 0.1 * i, 1, 0});
  for (int i = 0; i < 3; ++i) data.push_back({-0.4 + 0.2 * i, 1, 1});

  auto config = fast_config();
  config.burn_in = 0;
  auto sampler = fit(data, config, 7);
  const int n_draws = 10000;
  const auto draws = sampler.draw(n_draws);

  std::array<double, 4> mean{};
  for (const auto& d : draws)
    for (int c = 0; c < 4; ++c) mean[c] += d.dz_probs[c] / n_draws;

  const double total = 1.0 + 6.0;
  const std::array<double, 4> expected = {(0.25 + 1) / total, (0.25 + 2) / total,
                                          (0.25 + 0) / total, (0.25 + 3) / total};
  for (int c = 0; c < 4; ++c) CHECK(mean[c] == doctest::Approx(expected[c]).epsilon(1e-2));
}

TEST_CASE("symmetric pseudocounts with no data center the cell draws") {
  auto config = fast_config();
  config.burn_in = 0;
  auto sampler = fit({}, config, 11);
  CHECK(sampler.warnings().size() == 4);

  const int n_draws = 8000;
  const auto draws = sampler.draw(n_draws);
  std::array<double, 4> mean{};
  for (const auto& d : draws)
    for (int c = 0; c < 4; ++c) mean[c] += d.dz_probs[c] / n_draws;
  for (int c = 0; c < 4; ++c) CHECK(mean[c] == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("forced single component recovers the conjugate normal posterior") {
  // Tiny concentration keeps one stick active; a sharp Gamma prior pins the
  // kernel sd, so the location posterior has a closed form.
  const double sigma = 0.7;
  DPMMConfig config;
  config.truncation_level = 10;
  config.concentration = 1e-8;
  config.gamma_shape = 1e8;
  config.gamma_rate = 1e8 * sigma * sigma;
  config.base_mean = 0.0;
  config.base_sd = 2.0;
  config.burn_in = 100;
  config.thinning = 2;

  Rng gen(42);
  std::vector<double> ys;
  double sum = 0.0;
  for (int i = 0; i < 40; ++i) {
    ys.push_back(gen.normal(1.3, sigma));
    sum += ys.back();
  }
  const double prec = 1.0 / (config.base_sd * config.base_sd) + ys.size() / (sigma * sigma);
  const double post_mean = (sum / (sigma * sigma)) / prec;
  const double post_sd = std::sqrt(1.0 / prec);

  auto sampler = fit(single_cell_data(ys), config, 99);
  const int n_draws = 2000;
  const auto draws = sampler.draw(n_draws);
  double mixture_mean = 0.0;
  for (const auto& d : draws) {
    const auto& cell = d.cells[cell_index(1, 1)];
    double m = 0.0;
    for (std::size_t h = 0; h < cell.weights.size(); ++h) m += cell.weights[h] * cell.means[h];
    mixture_mean += m / n_draws;
    CHECK(cell.sd == doctest::Approx(sigma).epsilon(1e-3));
  }
  CHECK(std::abs(mixture_mean - post_mean) <
        3.0 * post_sd / std::sqrt(static_cast<double>(n_draws)) + 5e-3);
}

TEST_CASE("posterior mean density approaches a known mixture in L1") {
  const double sd_true = 0.45;
  Rng gen(43);
  std::vector<double> ys;
  for (int i = 0; i < 5000; ++i) {
    const double mu = gen.uniform() < 0.5 ? -1.0 : 1.0;
    ys.push_back(gen.normal(mu, sd_true));
  }
  DPMMConfig config;
  config.truncation_level = 30;
  config.burn_in = 300;
  config.thinning = 3;
  auto sampler = fit(single_cell_data(ys), config, 4242);
  const int n_draws = 100;
  const auto draws = sampler.draw(n_draws);

  const GridSpec grid{-4.0, 4.0, 400};
  std::vector<double> estimate(400, 0.0);
  for (const auto& d : draws) {
    const auto& cell = d.cells[cell_index(1, 1)];
    for (int i = 0; i < grid.k; ++i) {
      double v = 0.0;
      for (std::size_t h = 0; h < cell.weights.size(); ++h)
        v += cell.weights[h] * normal_pdf(grid.midpoint(i), cell.means[h], cell.sd);
      estimate[static_cast<std::size_t>(i)] += v / n_draws;
    }
  }
  double l1 = 0.0;
  for (int i = 0; i < grid.k; ++i) {
    const double y = grid.midpoint(i);
    const double truth = 0.5 * normal_pdf(y, -1.0, sd_true) + 0.5 * normal_pdf(y, 1.0, sd_true);
    l1 += std::abs(estimate[static_cast<std::size_t>(i)] - truth) * grid.width();
  }
  CHECK(l1 < 0.1);
}

TEST_CASE("discretize: wide grid renormalizes by nearly nothing") {
  PosteriorDrawF draw;
  draw.dz_probs = {0.25, 0.25, 0.25, 0.25};
  for (int c = 0; c < 4; ++c) draw.cells[c] = CellMixture{{1.0}, {0.0}, 1.0};

  const GridSpec grid{-6.0, 6.0, 400};
  const auto f = discretize(draw, grid);
  // Conditional density of the treated cell recovers the kernel / renorm ~ 1.
  double renorm_error = 0.0;
  for (int i = 0; i < grid.k; ++i) {
    const double y = grid.midpoint(i);
    const double expected = normal_pdf(y, 0.0, 1.0) * 0.5;  // Pr(D=1|Z=1) = 1/2
    renorm_error = std::max(renorm_error,
                            std::abs(f.p[static_cast<std::size_t>(i)][1] - expected));
  }
  CHECK(renorm_error < 1e-4 * normal_pdf(0, 0, 1));
  CHECK_NOTHROW(f.validate());
}

TEST_CASE("discretize: degenerate weight vector equals the single kernel") {
  PosteriorDrawF draw;
  draw.dz_probs = {0.1, 0.2, 0.3, 0.4};
  for (int c = 0; c < 4; ++c)
    draw.cells[c] = CellMixture{{1.0, 0.0, 0.0}, {0.5, -3.0, 3.0}, 0.8};
  const GridSpec grid{-8.0, 9.0, 340};
  const auto f = discretize(draw, grid);
  const double pz1 = 0.3 + 0.4;
  for (int i = 0; i < grid.k; i += 17) {
    const double y = grid.midpoint(i);
    const double expected = normal_pdf(y, 0.5, 0.8) * (0.4 / pz1);
    CHECK(f.p[static_cast<std::size_t>(i)][1] == doctest::Approx(expected).epsilon(1e-3));
  }
}

TEST_CASE("discretize: narrow grid reports the truncated mass") {
  PosteriorDrawF draw;
  draw.dz_probs = {0.25, 0.25, 0.25, 0.25};
  for (int c = 0; c < 4; ++c) draw.cells[c] = CellMixture{{1.0}, {0.0}, 1.0};
  const GridSpec grid{-1.0, 1.0, 64};
  CHECK_THROWS_AS(discretize(draw, grid), NumericalError);
}

TEST_CASE("discretize output always passes the observable invariants") {
  Rng gen(44);
  std::vector<Observation> data;
  for (int i = 0; i < 200; ++i)
    data.push_back({gen.normal(0.0, 1.0), static_cast<int>(gen.uniform() < 0.6),
                    static_cast<int>(gen.uniform() < 0.5)});
  auto sampler = fit(data, fast_config(), 3);
  for (const auto& draw : sampler.draw(10))
    CHECK_NOTHROW(discretize(draw, GridSpec{-8.0, 8.0, 160}).validate());
}
