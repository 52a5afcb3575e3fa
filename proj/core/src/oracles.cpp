#include "robustbayes/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "robustbayes/errors.hpp"

namespace robustbayes::oracles {

namespace {

constexpr double kEps = 1e-11;

// Tableau simplex on: maximize c'x, A x = b, x >= 0, b >= 0 (rows pre-flipped).
// Column layout: structural vars, then one artificial per row.
class Simplex {
 public:
  Simplex(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double> c)
      : rows_(a.size()), cols_(c.size()), a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {}

  std::vector<double> solve() {
    const std::size_t total = cols_ + rows_;
    tableau_.assign(rows_ + 1, std::vector<double>(total + 1, 0.0));
    basis_.resize(rows_);
    for (std::size_t r = 0; r < rows_; ++r) {
      for (std::size_t j = 0; j < cols_; ++j) tableau_[r][j] = a_[r][j];
      tableau_[r][cols_ + r] = 1.0;
      tableau_[r][total] = b_[r];
      basis_[r] = cols_ + r;
    }
    // Phase 1: minimize the artificial sum.
    for (std::size_t j = 0; j <= total; ++j) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows_; ++r) s += tableau_[r][j];
      tableau_[rows_][j] = -s;
    }
    for (std::size_t r = 0; r < rows_; ++r) tableau_[rows_][cols_ + r] = 0.0;
    run_pivots(cols_);  // artificial columns stay out of the entering set
    if (tableau_[rows_][total] < -1e-7)
      throw InfeasibleError("solve_lp: infeasible constraint system");
    drive_out_artificials();

    // Phase 2: maximize the real objective.
    for (std::size_t j = 0; j <= total; ++j) tableau_[rows_][j] = 0.0;
    for (std::size_t j = 0; j < cols_; ++j) tableau_[rows_][j] = -c_[j];
    for (std::size_t r = 0; r < rows_; ++r) {
      const double coef = tableau_[rows_][basis_[r]];
      if (coef != 0.0)
        for (std::size_t j = 0; j <= total; ++j) tableau_[rows_][j] -= coef * tableau_[r][j];
    }
    run_pivots(cols_);

    std::vector<double> x(cols_, 0.0);
    for (std::size_t r = 0; r < rows_; ++r)
      if (basis_[r] < cols_) x[basis_[r]] = tableau_[r][cols_ + rows_];
    return x;
  }

 private:
  void pivot(std::size_t row, std::size_t col) {
    const std::size_t total = cols_ + rows_;
    const double pv = tableau_[row][col];
    for (std::size_t j = 0; j <= total; ++j) tableau_[row][j] /= pv;
    for (std::size_t r = 0; r <= rows_; ++r) {
      if (r == row) continue;
      const double factor = tableau_[r][col];
      if (factor == 0.0) continue;
      for (std::size_t j = 0; j <= total; ++j) tableau_[r][j] -= factor * tableau_[row][j];
    }
    basis_[row] = col;
  }

  // Bland's rule; `limit` caps the entering columns considered.
  void run_pivots(std::size_t limit) {
    const std::size_t total = cols_ + rows_;
    for (int iter = 0; iter < 100000; ++iter) {
      std::size_t entering = total;
      for (std::size_t j = 0; j < limit; ++j) {
        if (tableau_[rows_][j] < -kEps) {
          entering = j;
          break;
        }
      }
      if (entering == total) return;
      std::size_t leaving = rows_;
      double best_ratio = std::numeric_limits<double>::infinity();
      for (std::size_t r = 0; r < rows_; ++r) {
        if (tableau_[r][entering] > kEps) {
          const double ratio = tableau_[r][total] / tableau_[r][entering];
          if (ratio < best_ratio - kEps ||
              (ratio < best_ratio + kEps && (leaving == rows_ || basis_[r] < basis_[leaving]))) {
            best_ratio = ratio;
            leaving = r;
          }
        }
      }
      if (leaving == rows_) throw NumericalError("solve_lp: unbounded objective");
      pivot(leaving, entering);
    }
    throw NumericalError("solve_lp: pivot limit exceeded");
  }

  void drive_out_artificials() {
    for (std::size_t r = 0; r < rows_; ++r) {
      if (basis_[r] < cols_) continue;
      std::size_t col = cols_;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (std::abs(tableau_[r][j]) > 1e-9) {
          col = j;
          break;
        }
      }
      if (col < cols_) pivot(r, col);
      // A row with no structural coefficient is redundant; its artificial
      // stays basic at zero and never re-enters.
    }
  }

  std::size_t rows_, cols_;
  std::vector<std::vector<double>> a_;
  std::vector<double> b_;
  std::vector<double> c_;
  std::vector<std::vector<double>> tableau_;
  std::vector<std::size_t> basis_;
};

}  // namespace

LpSolution solve_lp(const LpProblem& problem) {
  const std::size_t n = problem.c.size();
  std::vector<std::vector<double>> rows;
  std::vector<double> rhs;

  for (std::size_t r = 0; r < problem.a_eq.size(); ++r) {
    std::vector<double> row(problem.a_eq[r]);
    row.resize(n, 0.0);
    double b = problem.b_eq[r];
    if (b < 0.0) {
      for (auto& v : row) v = -v;
      b = -b;
    }
    rows.push_back(std::move(row));
    rhs.push_back(b);
  }
  // Upper bounds become rows with a slack column appended per bound.
  std::size_t cols = n;
  std::vector<std::size_t> slack_of;
  for (std::size_t j = 0; j < n; ++j) {
    if (!std::isfinite(problem.upper[j])) continue;
    slack_of.push_back(j);
    ++cols;
  }
  for (auto& row : rows) row.resize(cols, 0.0);
  std::size_t slack = n;
  for (std::size_t j : slack_of) {
    std::vector<double> row(cols, 0.0);
    row[j] = 1.0;
    row[slack++] = 1.0;
    rows.push_back(std::move(row));
    rhs.push_back(problem.upper[j]);
  }

  std::vector<double> c(cols, 0.0);
  for (std::size_t j = 0; j < n; ++j) c[j] = problem.c[j];

  Simplex simplex(std::move(rows), std::move(rhs), std::move(c));
  LpSolution solution;
  auto x = simplex.solve();
  solution.x.assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n));
  solution.value = 0.0;
  for (std::size_t j = 0; j < n; ++j) solution.value += problem.c[j] * solution.x[j];
  return solution;
}

std::vector<double> lp_allocate(const DiscretizedObservables& f, Arm arm, Direction direction,
                                double mass) {
  const std::size_t k = f.bins();
  const double bw = f.bin_width;

  std::vector<double> floor(k), free(k);
  for (std::size_t i = 0; i < k; ++i) {
    if (arm == Arm::treated) {
      floor[i] = std::max(f.p[i][1] - f.q[i][1], 0.0);
      free[i] = std::min(f.p[i][1], f.q[i][1]);
    } else {
      floor[i] = std::max(f.q[i][0] - f.p[i][0], 0.0);
      free[i] = std::min(f.q[i][0], f.p[i][0]);
    }
  }
  double floor_mass = 0.0, total_mass = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    floor_mass += floor[i] * bw;
    total_mass += (floor[i] + free[i]) * bw;
  }
  if (mass < floor_mass - 1e-9 || mass > total_mass + 1e-9)
    throw InfeasibleError("lp_allocate: mass outside the sandwich range");
  mass = std::clamp(mass, floor_mass, total_mass);

  // Variables are the residual densities above the floor.
  const bool maximize_mean = (arm == Arm::treated) == (direction == Direction::max);
  LpProblem lp;
  lp.c.resize(k);
  lp.upper.resize(k);
  for (std::size_t i = 0; i < k; ++i) {
    lp.c[i] = (maximize_mean ? 1.0 : -1.0) * f.y_grid[i];
    lp.upper[i] = free[i];
  }
  lp.a_eq.push_back(std::vector<double>(k, bw));
  lp.b_eq.push_back(mass - floor_mass);

  const LpSolution sol = solve_lp(lp);
  std::vector<double> h(k);
  for (std::size_t i = 0; i < k; ++i) h[i] = floor[i] + sol.x[i];
  return h;
}

StructureWitness witness_from_allocation(const DiscretizedObservables& f,
                                         const std::vector<double>& h1,
                                         const std::vector<double>& h0) {
  const std::size_t k = f.bins();
  if (h1.size() != k || h0.size() != k)
    throw std::invalid_argument("witness_from_allocation: density length mismatch");
  constexpr double tol = 1e-9;

  StructureWitness w;
  w.complier_z1 = h1;
  w.complier_z0 = h0;
  w.defier_z1.resize(k);
  w.defier_z0.resize(k);
  w.always_taker.resize(k);
  w.never_taker.resize(k);
  w.reassembled_p.resize(k);
  w.reassembled_q.resize(k);

  for (std::size_t i = 0; i < k; ++i) {
    const double floor1 = std::max(f.p[i][1] - f.q[i][1], 0.0);
    const double floor0 = std::max(f.q[i][0] - f.p[i][0], 0.0);
    if (h1[i] < floor1 - tol || h1[i] > f.p[i][1] + tol)
      throw InfeasibleError("witness_from_allocation: treated sandwich violated at bin " +
                            std::to_string(i));
    if (h0[i] < floor0 - tol || h0[i] > f.q[i][0] + tol)
      throw InfeasibleError("witness_from_allocation: untreated sandwich violated at bin " +
                            std::to_string(i));

    w.defier_z1[i] = f.q[i][1] - f.p[i][1] + h1[i];
    w.defier_z0[i] = f.p[i][0] - f.q[i][0] + h0[i];
    w.always_taker[i] = f.p[i][1] - h1[i];
    w.never_taker[i] = f.q[i][0] - h0[i];

    w.reassembled_p[i][1] = w.always_taker[i] + w.complier_z1[i];
    w.reassembled_q[i][1] = w.always_taker[i] + w.defier_z1[i];
    w.reassembled_q[i][0] = w.never_taker[i] + w.complier_z0[i];
    w.reassembled_p[i][0] = w.never_taker[i] + w.defier_z0[i];
  }

  double defier1 = 0.0, defier0 = 0.0;
  for (std::size_t i = 0; i < k; ++i) {
    defier1 += w.defier_z1[i];
    defier0 += w.defier_z0[i];
  }
  w.defier_probability =
      f.pr_z1 * defier1 * f.bin_width + (1.0 - f.pr_z1) * defier0 * f.bin_width;
  return w;
}

double intersection_deviation_needed(double max_mean_lower, double min_mean_upper, double theta) {
  return std::max(max_mean_lower - theta, 0.0) + std::max(theta - min_mean_upper, 0.0);
}

namespace {

// Gaussian elimination with partial pivoting; returns false when singular.
bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b,
                 std::vector<double>& out) {
  const std::size_t n = a.size();
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < n; ++r)
      if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
    if (std::abs(a[piv][col]) < 1e-12) return false;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      const double factor = a[r][col] / a[col][col];
      if (factor == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) a[r][j] -= factor * a[col][j];
      b[r] -= factor * b[col];
    }
  }
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = b[i] / a[i][i];
  return true;
}

}  // namespace

double chi2_min_divergence(const std::vector<double>& base_weights,
                           const std::vector<std::vector<double>>& moments,
                           const std::vector<double>& target) {
  const std::size_t n = base_weights.size();
  const std::size_t n_mom = target.size();
  if (n > 20) throw std::invalid_argument("chi2_min_divergence: too many atoms for enumeration");

  // Constraint rows: total mass 1, then each moment.
  const std::size_t rows = n_mom + 1;
  auto constraint = [&](std::size_t r, std::size_t j) -> double {
    return r == 0 ? 1.0 : moments[j][r - 1];
  };

  double best = std::numeric_limits<double>::infinity();
  // Enumerate the set of atoms clamped to zero; solve the KKT system on the rest.
  for (std::uint64_t mask = 0; mask < (1ULL << n); ++mask) {
    std::vector<std::size_t> live;
    for (std::size_t j = 0; j < n; ++j)
      if (!(mask & (1ULL << j))) live.push_back(j);
    if (live.size() + rows > 40 || live.empty()) continue;

    const std::size_t dim = live.size() + rows;
    std::vector<std::vector<double>> kkt(dim, std::vector<double>(dim, 0.0));
    std::vector<double> rhs(dim, 0.0);
    for (std::size_t i = 0; i < live.size(); ++i) {
      kkt[i][i] = 1.0 / base_weights[live[i]];
      for (std::size_t r = 0; r < rows; ++r) {
        kkt[i][live.size() + r] = constraint(r, live[i]);
        kkt[live.size() + r][i] = constraint(r, live[i]);
      }
    }
    rhs[live.size()] = 1.0;
    for (std::size_t r = 1; r < rows; ++r) rhs[live.size() + r] = target[r - 1];

    std::vector<double> sol;
    if (!solve_dense(kkt, rhs, sol)) continue;
    bool ok = true;
    for (std::size_t i = 0; i < live.size(); ++i)
      if (sol[i] < -1e-10) ok = false;
    if (!ok) continue;
    // Verify the constraints (the KKT solve can succeed on inconsistent rows).
    for (std::size_t r = 0; r < rows && ok; ++r) {
      double s = 0.0;
      for (std::size_t i = 0; i < live.size(); ++i) s += constraint(r, live[i]) * sol[i];
      const double want = r == 0 ? 1.0 : target[r - 1];
      if (std::abs(s - want) > 1e-8) ok = false;
    }
    if (!ok) continue;

    double quad = 0.0;
    for (std::size_t i = 0; i < live.size(); ++i)
      quad += sol[i] * sol[i] / base_weights[live[i]];
    best = std::min(best, 0.5 * (quad - 1.0));
  }
  if (!std::isfinite(best))
    throw InfeasibleError("chi2_min_divergence: moment polytope is empty");
  return std::max(best, 0.0);
}

}  // namespace robustbayes::oracles
