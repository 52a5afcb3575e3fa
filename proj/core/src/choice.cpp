#include "robustbayes/choice.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "robustbayes/errors.hpp"
#include "robustbayes/rng.hpp"

namespace robustbayes::choice {

namespace {

constexpr double kFeasTol = 1e-12;

// One availability pattern: the chosen good under each instrument value.
// Patterns are the only feature of an atom the moment function sees.
struct PatternTable {
  std::vector<double> weight;       // base probability of each pattern
  std::vector<double> min_atom;     // smallest atom weight inside the pattern
  std::vector<std::vector<double>> g;  // moment vector per pattern, length 2J-1
  int n_moments = 0;
};

int argmax_choice(std::span<const double> u, const std::vector<double>& xi, int available) {
  // Good 0 is the outside option with mean utility zero.
  int best = 0;
  double best_v = xi[0];
  for (int j = 1; j <= available; ++j) {
    const double v = u[static_cast<std::size_t>(j - 1)] + xi[static_cast<std::size_t>(j)];
    if (v > best_v) {
      best_v = v;
      best = j;
    }
  }
  return best;
}

PatternTable build_patterns(std::span<const double> u, const ShockAtoms& atoms) {
  const int j_goods = static_cast<int>(u.size());
  const int n_pat = (j_goods + 1) * j_goods;  // choice under z=1 in 0..J, under z=0 in 0..J-1
  PatternTable table;
  table.n_moments = 2 * j_goods - 1;
  table.weight.assign(static_cast<std::size_t>(n_pat), 0.0);
  table.min_atom.assign(static_cast<std::size_t>(n_pat),
                        std::numeric_limits<double>::infinity());

  for (std::size_t a = 0; a < atoms.xi.size(); ++a) {
    const int c1 = argmax_choice(u, atoms.xi[a], j_goods);
    const int c0 = argmax_choice(u, atoms.xi[a], j_goods - 1);
    const auto pat = static_cast<std::size_t>(c1 * j_goods + c0);
    table.weight[pat] += atoms.weights[a];
    table.min_atom[pat] = std::min(table.min_atom[pat], atoms.weights[a]);
  }

  table.g.assign(static_cast<std::size_t>(n_pat),
                 std::vector<double>(static_cast<std::size_t>(table.n_moments), 0.0));
  for (int c1 = 0; c1 <= j_goods; ++c1) {
    for (int c0 = 0; c0 < j_goods; ++c0) {
      auto& row = table.g[static_cast<std::size_t>(c1 * j_goods + c0)];
      if (c1 >= 1) row[static_cast<std::size_t>(c1 - 1)] = 1.0;
      if (c0 >= 1) row[static_cast<std::size_t>(j_goods + c0 - 1)] = 1.0;
    }
  }
  return table;
}

// Drops zero-weight patterns.
void compact(PatternTable& table) {
  std::size_t out = 0;
  for (std::size_t i = 0; i < table.weight.size(); ++i) {
    if (table.weight[i] <= 0.0) continue;
    table.weight[out] = table.weight[i];
    table.min_atom[out] = table.min_atom[i];
    table.g[out] = table.g[i];
    ++out;
  }
  table.weight.resize(out);
  table.min_atom.resize(out);
  table.g.resize(out);
}

bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>& x) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-13) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a[r][j] -= f * a[col][j];
      b[r] -= f * b[col];
    }
  }
  x.resize(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return true;
}

// Vertices of {t >= 0, sum t = 1, pattern moments = P}. Returns the maximal
// chi-squared divergence over the polytope when each pattern's mass may be
// concentrated on its least-likely atom; infinity flag when empty.
struct VertexScan {
  bool feasible = false;
  double max_divergence = 0.0;
};

VertexScan scan_vertices(const PatternTable& table, std::span<const double> probs) {
  const std::size_t rows = static_cast<std::size_t>(table.n_moments) + 1;
  const std::size_t n = table.weight.size();
  if (n > 24) throw std::invalid_argument("choice: pattern table too large for enumeration");

  VertexScan scan;
  std::vector<std::size_t> subset;
  std::vector<std::size_t> stack;

  const auto constraint = [&](std::size_t r, std::size_t j) -> double {
    return r == 0 ? 1.0 : table.g[j][r - 1];
  };

  const auto try_subset = [&](const std::vector<std::size_t>& live) {
    const std::size_t k = live.size();
    // Square system on the subset: pad with zero rows is not valid, so only
    // subsets of size == rows are candidate basic solutions; smaller subsets
    // are covered by degenerate vertices of larger ones.
    if (k != rows) return;
    std::vector<std::vector<double>> a(rows, std::vector<double>(k, 0.0));
    std::vector<double> b(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t j = 0; j < k; ++j) a[r][j] = constraint(r, live[j]);
      b[r] = r == 0 ? 1.0 : probs[r - 1];
    }
    std::vector<double> t;
    if (!solve_dense(std::move(a), std::move(b), t)) return;
    for (double v : t)
      if (v < -1e-9) return;

    scan.feasible = true;
    double quad = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
      const double tv = std::max(t[j], 0.0);
      quad += tv * tv / table.min_atom[live[j]];
    }
    scan.max_divergence = std::max(scan.max_divergence, 0.5 * (quad - 1.0));
  };

  // Enumerate subsets of size == rows.
  std::vector<std::size_t> idx(rows);
  const std::size_t k = rows;
  if (n < k) return scan;
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  for (;;) {
    try_subset(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) break;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
  return scan;
}

// Concave quadratic dual ascent (BFGS with Armijo backtracking).
struct DualResult {
  double value = 0.0;
  bool converged = false;
  double grad_norm = 0.0;
  std::vector<double> x;
};

double dual_objective(const PatternTable& table, std::span<const double> probs,
                      std::span<const double> x) {
  double value = -x[0];
  for (std::size_t m = 1; m < x.size(); ++m) value -= x[m] * probs[m - 1];
  for (std::size_t j = 0; j < table.weight.size(); ++j) {
    double s = x[0];
    for (std::size_t m = 1; m < x.size(); ++m) s += x[m] * table.g[j][m - 1];
    value -= table.weight[j] * (0.5 * s * s - s);
  }
  return value;
}

DualResult maximize_dual(const PatternTable& table, std::span<const double> probs) {
  const std::size_t dim = static_cast<std::size_t>(table.n_moments) + 1;
  const std::size_t n = table.weight.size();

  const auto eval = [&](const std::vector<double>& x, std::vector<double>& grad) -> double {
    // s_pat = zeta + lambda'g; objective -E[phi*(-s)] - zeta - lambda'P.
    grad.assign(dim, 0.0);
    double value = -x[0];
    for (std::size_t m = 1; m < dim; ++m) value -= x[m] * probs[m - 1];
    for (std::size_t j = 0; j < n; ++j) {
      double s = x[0];
      for (std::size_t m = 1; m < dim; ++m) s += x[m] * table.g[j][m - 1];
      const double w = table.weight[j];
      value -= w * (0.5 * s * s - s);
      const double dphi = w * (1.0 - s);  // derivative of -phi*(-s) wrt s
      grad[0] += dphi;
      for (std::size_t m = 1; m < dim; ++m) grad[m] += dphi * table.g[j][m - 1];
    }
    grad[0] -= 1.0;
    for (std::size_t m = 1; m < dim; ++m) grad[m] -= probs[m - 1];
    return value;
  };

  DualResult best;
  best.value = -std::numeric_limits<double>::infinity();

  for (int start = 0; start < 3; ++start) {
    std::vector<double> x(dim, 0.0);
    if (start > 0)
      for (std::size_t i = 0; i < dim; ++i)
        x[i] = 0.25 * static_cast<double>(start) * ((i % 2 == 0) ? 1.0 : -1.0);

    std::vector<std::vector<double>> h(dim, std::vector<double>(dim, 0.0));
    for (std::size_t i = 0; i < dim; ++i) h[i][i] = 1.0;
    std::vector<double> grad(dim), grad_new(dim);
    double value = eval(x, grad);

    bool converged = false;
    for (int iter = 0; iter < 300; ++iter) {
      double gnorm = 0.0;
      for (double g : grad) gnorm += g * g;
      gnorm = std::sqrt(gnorm);
      if (gnorm < 1e-11 * std::max(1.0, std::abs(value))) {
        converged = true;
        break;
      }
      std::vector<double> dir(dim, 0.0);
      for (std::size_t i = 0; i < dim; ++i)
        for (std::size_t j = 0; j < dim; ++j) dir[i] += h[i][j] * grad[j];

      double slope = 0.0;
      for (std::size_t i = 0; i < dim; ++i) slope += dir[i] * grad[i];
      if (slope <= 0.0) {  // reset to steepest ascent
        dir = grad;
        slope = gnorm * gnorm;
        for (std::size_t i = 0; i < dim; ++i)
          for (std::size_t j = 0; j < dim; ++j) h[i][j] = (i == j) ? 1.0 : 0.0;
      }

      double step = 1.0;
      std::vector<double> x_new(dim);
      double value_new = value;
      for (int ls = 0; ls < 60; ++ls) {
        for (std::size_t i = 0; i < dim; ++i) x_new[i] = x[i] + step * dir[i];
        value_new = eval(x_new, grad_new);
        if (value_new >= value + 1e-4 * step * slope) break;
        step *= 0.5;
      }
      if (!(value_new > value - 1e-16)) break;

      // BFGS update on the inverse Hessian (ascent convention).
      std::vector<double> svec(dim), yvec(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        svec[i] = x_new[i] - x[i];
        yvec[i] = grad[i] - grad_new[i];  // curvature of -f
      }
      double sy = 0.0;
      for (std::size_t i = 0; i < dim; ++i) sy += svec[i] * yvec[i];
      if (sy > 1e-14) {
        std::vector<double> hy(dim, 0.0);
        for (std::size_t i = 0; i < dim; ++i)
          for (std::size_t j = 0; j < dim; ++j) hy[i] += h[i][j] * yvec[j];
        double yhy = 0.0;
        for (std::size_t i = 0; i < dim; ++i) yhy += yvec[i] * hy[i];
        for (std::size_t i = 0; i < dim; ++i)
          for (std::size_t j = 0; j < dim; ++j)
            h[i][j] += ((sy + yhy) * svec[i] * svec[j]) / (sy * sy) -
                       (hy[i] * svec[j] + svec[i] * hy[j]) / sy;
      }
      x = x_new;
      grad = grad_new;
      value = value_new;
    }

    double gnorm = 0.0;
    for (double g : grad) gnorm += g * g;
    gnorm = std::sqrt(gnorm);
    if (value > best.value) {
      best.value = value;
      best.converged = converged;
      best.grad_norm = gnorm;
      best.x = x;
    }
  }
  return best;
}

}  // namespace

void ChoiceModelSpec::validate() const {
  if (num_goods < 2) throw std::invalid_argument("ChoiceModelSpec: need at least 2 inside goods");
  if (probs.size() != static_cast<std::size_t>(2 * num_goods - 1))
    throw std::invalid_argument("ChoiceModelSpec: expected 2J-1 choice probabilities");
  double z1 = 0.0, z0 = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] < 0.0) throw std::invalid_argument("ChoiceModelSpec: negative probability");
    (i < static_cast<std::size_t>(num_goods) ? z1 : z0) += probs[i];
  }
  if (z1 > 1.0 + 1e-9 || z0 > 1.0 + 1e-9)
    throw std::invalid_argument("ChoiceModelSpec: block probabilities exceed 1");
  if (mc_samples < 100) throw std::invalid_argument("ChoiceModelSpec: too few Monte Carlo draws");
}

std::vector<double> logit_probs(std::span<const double> u, int z) {
  const int j_goods = static_cast<int>(u.size());
  const int available = z == 1 ? j_goods : j_goods - 1;
  std::vector<double> out(static_cast<std::size_t>(available) + 1);
  double denom = 1.0;  // exp(0) for the outside option
  for (int j = 1; j <= available; ++j) denom += std::exp(u[static_cast<std::size_t>(j - 1)]);
  out[0] = 1.0 / denom;
  for (int j = 1; j <= available; ++j)
    out[static_cast<std::size_t>(j)] = std::exp(u[static_cast<std::size_t>(j - 1)]) / denom;
  return out;
}

ShockAtoms ShockAtoms::monte_carlo(int num_goods, int samples, std::uint64_t seed) {
  ShockAtoms atoms;
  atoms.discrete_support = false;
  Rng rng(seed);
  const int pairs = (samples + 1) / 2;
  atoms.xi.reserve(static_cast<std::size_t>(pairs) * 2);
  const auto dims = static_cast<std::size_t>(num_goods) + 1;
  for (int i = 0; i < pairs; ++i) {
    std::vector<double> a(dims), b(dims);
    for (std::size_t d = 0; d < dims; ++d) {
      const double v = rng.uniform();
      a[d] = -std::log(-std::log(v));
      b[d] = -std::log(-std::log(1.0 - v));  // antithetic partner
    }
    atoms.xi.push_back(std::move(a));
    atoms.xi.push_back(std::move(b));
  }
  atoms.weights.assign(atoms.xi.size(), 1.0 / static_cast<double>(atoms.xi.size()));
  return atoms;
}

ShockAtoms ShockAtoms::product_grid(int num_goods, int points_per_dim) {
  if (points_per_dim < 2) throw std::invalid_argument("product_grid: need at least 2 points");
  const auto dims = static_cast<std::size_t>(num_goods) + 1;
  std::vector<double> marks(static_cast<std::size_t>(points_per_dim));
  for (int i = 0; i < points_per_dim; ++i) {
    const double u = (i + 0.5) / points_per_dim;  // equal-probability cells
    marks[static_cast<std::size_t>(i)] = -std::log(-std::log(u));
  }
  ShockAtoms atoms;
  atoms.discrete_support = true;
  std::size_t total = 1;
  for (std::size_t d = 0; d < dims; ++d) total *= marks.size();
  atoms.xi.reserve(total);
  std::vector<std::size_t> digits(dims, 0);
  for (std::size_t n = 0; n < total; ++n) {
    std::vector<double> row(dims);
    for (std::size_t d = 0; d < dims; ++d) row[d] = marks[digits[d]];
    atoms.xi.push_back(std::move(row));
    for (std::size_t d = 0; d < dims; ++d) {
      if (++digits[d] < marks.size()) break;
      digits[d] = 0;
    }
  }
  atoms.weights.assign(total, 1.0 / static_cast<double>(total));
  return atoms;
}

DivergenceInterval divergence_interval_on_atoms(std::span<const double> u,
                                                std::span<const double> probs,
                                                const ShockAtoms& atoms) {
  PatternTable table = build_patterns(u, atoms);
  compact(table);

  const VertexScan scan = scan_vertices(table, probs);
  if (!scan.feasible)
    throw InfeasibleError("choice: probabilities not rationalizable on the shock support at this u");

  const DualResult dual = maximize_dual(table, probs);
  if (!dual.converged && dual.grad_norm > 1e-6)
    throw NumericalError("choice: dual ascent did not converge (best value " +
                         std::to_string(dual.value) + ", gradient norm " +
                         std::to_string(dual.grad_norm) + ")");

  DivergenceInterval out;
  out.delta_lower = std::max(dual.value, 0.0);
  out.delta_upper = std::max(scan.max_divergence, out.delta_lower);
  out.lower_attained = dual.converged;
  out.upper_attained = atoms.discrete_support;
  return out;
}

DualSolution solve_lower_dual(std::span<const double> u, std::span<const double> probs,
                              const ShockAtoms& atoms) {
  PatternTable table = build_patterns(u, atoms);
  compact(table);
  const DualResult dual = maximize_dual(table, probs);
  DualSolution out;
  out.value = dual.value;
  out.multipliers = dual.x;
  out.grad_norm = dual.grad_norm;
  out.converged = dual.converged;
  return out;
}

double lower_dual_objective(std::span<const double> u, std::span<const double> probs,
                            const ShockAtoms& atoms, std::span<const double> multipliers) {
  PatternTable table = build_patterns(u, atoms);
  compact(table);
  if (multipliers.size() != static_cast<std::size_t>(table.n_moments) + 1)
    throw std::invalid_argument("lower_dual_objective: expected 2J multipliers");
  return dual_objective(table, probs, multipliers);
}

DivergenceInterval divergence_interval(std::span<const double> u, const ChoiceModelSpec& spec) {
  spec.validate();
  if (u.size() != static_cast<std::size_t>(spec.num_goods))
    throw std::invalid_argument("divergence_interval: utility length must equal J");
  const ShockAtoms atoms = ShockAtoms::monte_carlo(spec.num_goods, spec.mc_samples, spec.seed);
  return divergence_interval_on_atoms(u, spec.probs, atoms);
}

void SearchBox::validate(int num_goods) const {
  if (lo.size() != static_cast<std::size_t>(num_goods) || hi.size() != lo.size())
    throw std::invalid_argument("SearchBox: bounds must have length J");
  for (std::size_t i = 0; i < lo.size(); ++i)
    if (!(lo[i] < hi[i])) throw std::invalid_argument("SearchBox: empty coordinate range");
}

namespace {

// Minimal delta_lower over the free coordinates at a fixed u_J, and the
// divergence interval at the minimizer.
struct SliceProbe {
  double min_lower = std::numeric_limits<double>::infinity();
  DivergenceInterval at_min;
  bool any_feasible = false;
};

SliceProbe probe_slice(double u_last, std::span<const double> probs, const ShockAtoms& atoms,
                       const SearchBox& box) {
  const std::size_t j_goods = box.lo.size();
  const std::size_t free_dim = j_goods - 1;
  SliceProbe probe;

  const auto eval = [&](const std::vector<double>& v) -> double {
    std::vector<double> u(j_goods);
    for (std::size_t i = 0; i < free_dim; ++i) u[i] = std::clamp(v[i], box.lo[i], box.hi[i]);
    u[free_dim] = u_last;
    try {
      const DivergenceInterval di = divergence_interval_on_atoms(u, probs, atoms);
      if (!probe.any_feasible || di.delta_lower < probe.min_lower) {
        probe.min_lower = di.delta_lower;
        probe.at_min = di;
      }
      probe.any_feasible = true;
      return di.delta_lower;
    } catch (const InfeasibleError&) {
      return 1e30;
    }
  };

  if (free_dim == 1) {
    // Scan plus golden refinement on the single free coordinate.
    const double lo = box.lo[0], hi = box.hi[0];
    constexpr int kScan = 16;
    double best_x = lo, best_v = eval({lo});
    for (int i = 1; i <= kScan; ++i) {
      const double x = lo + (hi - lo) * i / kScan;
      const double v = eval({x});
      if (v < best_v) {
        best_v = v;
        best_x = x;
      }
    }
    double a = std::max(lo, best_x - (hi - lo) / kScan);
    double b = std::min(hi, best_x + (hi - lo) / kScan);
    const double inv_phi = 0.6180339887498949;
    double x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
    double f1 = eval({x1}), f2 = eval({x2});
    for (int it = 0; it < 40; ++it) {
      if (f1 <= f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - inv_phi * (b - a);
        f1 = eval({x1});
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + inv_phi * (b - a);
        f2 = eval({x2});
      }
    }
    return probe;
  }

  // Multi-start Nelder-Mead over the free coordinates.
  Rng rng(0x5eedULL + static_cast<std::uint64_t>(free_dim));
  constexpr int kStarts = 8;
  for (int s = 0; s < kStarts; ++s) {
    std::vector<std::vector<double>> simplex;
    std::vector<double> center(free_dim);
    for (std::size_t i = 0; i < free_dim; ++i)
      center[i] = s == 0 ? 0.5 * (box.lo[i] + box.hi[i]) : rng.uniform(box.lo[i], box.hi[i]);
    simplex.push_back(center);
    for (std::size_t i = 0; i < free_dim; ++i) {
      auto v = center;
      v[i] += 0.1 * (box.hi[i] - box.lo[i]);
      simplex.push_back(v);
    }
    std::vector<double> fv(simplex.size());
    for (std::size_t i = 0; i < simplex.size(); ++i) fv[i] = eval(simplex[i]);

    for (int iter = 0; iter < 60; ++iter) {
      std::vector<std::size_t> order(simplex.size());
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
      std::sort(order.begin(), order.end(),
                [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
      const std::size_t worst = order.back();
      std::vector<double> centroid(free_dim, 0.0);
      for (std::size_t i = 0; i + 1 < order.size(); ++i)
        for (std::size_t d = 0; d < free_dim; ++d) centroid[d] += simplex[order[i]][d];
      for (double& c : centroid) c /= static_cast<double>(order.size() - 1);

      std::vector<double> refl(free_dim);
      for (std::size_t d = 0; d < free_dim; ++d)
        refl[d] = centroid[d] + (centroid[d] - simplex[worst][d]);
      const double f_refl = eval(refl);
      if (f_refl < fv[order.front()]) {
        std::vector<double> expand(free_dim);
        for (std::size_t d = 0; d < free_dim; ++d)
          expand[d] = centroid[d] + 2.0 * (centroid[d] - simplex[worst][d]);
        const double f_exp = eval(expand);
        if (f_exp < f_refl) {
          simplex[worst] = expand;
          fv[worst] = f_exp;
        } else {
          simplex[worst] = refl;
          fv[worst] = f_refl;
        }
      } else if (f_refl < fv[worst]) {
        simplex[worst] = refl;
        fv[worst] = f_refl;
      } else {
        std::vector<double> contract(free_dim);
        for (std::size_t d = 0; d < free_dim; ++d)
          contract[d] = centroid[d] - 0.5 * (centroid[d] - simplex[worst][d]);
        const double f_con = eval(contract);
        if (f_con < fv[worst]) {
          simplex[worst] = contract;
          fv[worst] = f_con;
        } else {
          for (std::size_t i = 1; i < order.size(); ++i) {
            for (std::size_t d = 0; d < free_dim; ++d)
              simplex[order[i]][d] =
                  0.5 * (simplex[order[i]][d] + simplex[order.front()][d]);
            fv[order[i]] = eval(simplex[order[i]]);
          }
        }
      }
    }
  }
  return probe;
}

bool slice_feasible(double m, const SliceProbe& probe) {
  if (!probe.any_feasible) return false;
  const DivergenceInterval& di = probe.at_min;
  const bool above_lower =
      di.lower_attained ? m >= di.delta_lower - kFeasTol : m > di.delta_lower + kFeasTol;
  const bool below_upper =
      di.upper_attained ? m <= di.delta_upper + kFeasTol : m < di.delta_upper - kFeasTol;
  return above_lower && below_upper;
}

}  // namespace

BoundPair utility_bounds_on_atoms(double m, std::span<const double> probs,
                                  const ShockAtoms& atoms, const SearchBox& box) {
  if (!(m >= 0.0)) throw std::invalid_argument("utility_bounds: m must be nonnegative");
  const std::size_t j_goods = box.lo.size();
  const double lo = box.lo[j_goods - 1];
  const double hi = box.hi[j_goods - 1];

  const auto feasible = [&](double u_last) {
    return slice_feasible(m, probe_slice(u_last, probs, atoms, box));
  };

  constexpr int kScan = 32;
  std::vector<char> fgrid(kScan + 1);
  int first = -1, last = -1;
  for (int i = 0; i <= kScan; ++i) {
    const double x = lo + (hi - lo) * i / kScan;
    fgrid[static_cast<std::size_t>(i)] = feasible(x) ? 1 : 0;
    if (fgrid[static_cast<std::size_t>(i)]) {
      if (first < 0) first = i;
      last = i;
    }
  }
  if (first < 0)
    throw InfeasibleError("utility_bounds: no utility rationalizable at divergence " +
                          std::to_string(m) + " in box");

  const auto grid_x = [&](int i) { return lo + (hi - lo) * i / kScan; };

  // Sharpen each feasible edge between the last infeasible and first feasible
  // grid points.
  double lower_edge = grid_x(first);
  if (first > 0) {
    double bad = grid_x(first - 1), good = lower_edge;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (bad + good);
      (feasible(mid) ? good : bad) = mid;
    }
    lower_edge = good;
  }
  double upper_edge = grid_x(last);
  if (last < kScan) {
    double good = upper_edge, bad = grid_x(last + 1);
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (bad + good);
      (feasible(mid) ? good : bad) = mid;
    }
    upper_edge = good;
  }
  return {lower_edge, upper_edge};
}

BoundPair utility_bounds(double m, const ChoiceModelSpec& spec, const SearchBox& box) {
  spec.validate();
  box.validate(spec.num_goods);
  const ShockAtoms atoms = ShockAtoms::monte_carlo(spec.num_goods, spec.mc_samples, spec.seed);
  return utility_bounds_on_atoms(m, spec.probs, atoms, box);
}

}  // namespace robustbayes::choice
