#include "confpi/lasso.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "confpi/errors.hpp"

namespace confpi {
namespace {

double soft_threshold(double value, double threshold) {
  if (value > threshold) return value - threshold;
  if (value < -threshold) return value + threshold;
  return 0.0;
}

// Centered (and optionally scaled) copy of the problem: z_j = (x_j - m_j) / s_j,
// working coefficients b_j = beta_j * s_j.
struct Prepared {
  Eigen::MatrixXd z;
  Eigen::VectorXd yc;
  Eigen::VectorXd means;
  Eigen::VectorXd scales;
  Eigen::VectorXd col_sq;
  Eigen::MatrixXd gram;  // z'z
  Eigen::VectorXd zy;    // z'yc
  std::vector<Eigen::Index> active;
  double y_mean = 0.0;
};

Prepared prepare(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, bool standardize) {
  CONFPI_REQUIRE(x.rows() == y.size(), "lasso: row count mismatch");
  CONFPI_REQUIRE(x.rows() >= 2, "lasso: need at least two rows");
  Prepared p;
  const auto n = static_cast<double>(x.rows());
  p.means = x.colwise().mean().transpose();
  p.y_mean = y.mean();
  p.yc = y.array() - p.y_mean;
  p.z = x.rowwise() - p.means.transpose();
  p.scales = Eigen::VectorXd::Ones(x.cols());
  p.col_sq = Eigen::VectorXd::Zero(x.cols());
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double sd = std::sqrt(p.z.col(j).squaredNorm() / n);
    if (!(sd > 1e-12 * (1.0 + std::abs(p.means(j))))) continue;
    if (standardize) {
      p.scales(j) = sd;
      p.z.col(j) /= sd;
    }
    // An exact copy of an earlier column adds nothing; all weight stays on the first.
    const bool duplicate = std::any_of(p.active.begin(), p.active.end(), [&](Eigen::Index k) {
      return (p.z.col(j) - p.z.col(k)).squaredNorm() <= 1e-24 * (1.0 + p.z.col(k).squaredNorm());
    });
    if (duplicate) continue;
    p.col_sq(j) = p.z.col(j).squaredNorm();
    p.active.push_back(j);
  }
  p.gram = p.z.transpose() * p.z;
  p.zy = p.z.transpose() * p.yc;
  return p;
}

struct CdResult {
  int sweeps = 0;
  bool converged = false;
};

// Exact solution for the support and signs of `b`, accepted only when it
// satisfies the optimality conditions.
bool polish(const Prepared& p, double half, Eigen::VectorXd& b, Eigen::VectorXd& g) {
  std::vector<Eigen::Index> support;
  for (const Eigen::Index j : p.active) {
    if (b(j) != 0.0) support.push_back(j);
  }
  const auto k = static_cast<Eigen::Index>(support.size());
  Eigen::VectorXd cand = Eigen::VectorXd::Zero(b.size());
  if (k > 0) {
    Eigen::MatrixXd gaa(k, k);
    Eigen::VectorXd rhs(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      for (Eigen::Index c = 0; c < k; ++c) gaa(a, c) = p.gram(support[a], support[c]);
      rhs(a) = p.zy(support[a]) - half * (b(support[a]) > 0 ? 1.0 : -1.0);
    }
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(gaa);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
    const Eigen::VectorXd sol = ldlt.solve(rhs);
    if (!sol.allFinite() || (gaa * sol - rhs).norm() > 1e-9 * (1.0 + rhs.norm())) return false;
    for (Eigen::Index a = 0; a < k; ++a) {
      if (sol(a) == 0.0 || (sol(a) > 0) != (b(support[a]) > 0)) return false;
      cand(support[a]) = sol(a);
    }
  }
  const Eigen::VectorXd gc = p.zy - p.gram * cand;
  for (const Eigen::Index j : p.active) {
    if (cand(j) == 0.0 && std::abs(gc(j)) > half * (1.0 + 1e-9) + 1e-12) return false;
  }
  b = cand;
  g = gc;
  return true;
}

// Cyclic coordinate descent in Gram form; g = z'r is kept up to date.
CdResult coordinate_descent(const Prepared& p, double zeta, Eigen::VectorXd& b, Eigen::VectorXd& r,
                            const LassoOptions& options, std::vector<double>* trace) {
  CdResult res;
  const double half = 0.5 * zeta;
  Eigen::VectorXd g = p.zy - p.gram * b;
  auto objective = [&] { return (p.yc - p.z * b).squaredNorm() + zeta * b.cwiseAbs().sum(); };
  for (res.sweeps = 1; res.sweeps <= options.max_sweeps; ++res.sweeps) {
    double max_change = 0.0;
    for (const Eigen::Index j : p.active) {
      const double old = b(j);
      const double rho = g(j) + p.col_sq(j) * old;
      const double updated = soft_threshold(rho, half) / p.col_sq(j);
      if (updated != old) {
        g.noalias() -= (updated - old) * p.gram.col(j);
        b(j) = updated;
        max_change = std::max(max_change, std::abs(updated - old) / p.scales(j));
      }
    }
    if (max_change < options.tolerance) res.converged = true;
    if (!res.converged && res.sweeps % 5 == 0) res.converged = polish(p, half, b, g);
    if (trace) trace->push_back(objective());
    if (res.converged) break;
  }
  if (!res.converged) res.sweeps = options.max_sweeps;
  r = p.yc - p.z * b;
  return res;
}

LassoModel to_model(const Prepared& p, const Eigen::VectorXd& b, double zeta, const CdResult& cd) {
  LassoModel m;
  m.coef = b.cwiseQuotient(p.scales);
  m.intercept = p.y_mean - p.means.dot(m.coef);
  m.zeta = zeta;
  m.sweeps = cd.sweeps;
  m.converged = cd.converged;
  return m;
}

}  // namespace

std::vector<double> lasso_default_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 100; ++i) grid.push_back(i / 1000.0);
  return grid;
}

Eigen::VectorXd lasso_penalty_scales(const Eigen::MatrixXd& x, bool standardize) {
  Eigen::VectorXd s = Eigen::VectorXd::Ones(x.cols());
  if (!standardize) return s;
  const Eigen::VectorXd m = x.colwise().mean().transpose();
  for (Eigen::Index j = 0; j < x.cols(); ++j) {
    const double sd = std::sqrt((x.col(j).array() - m(j)).square().sum() / static_cast<double>(x.rows()));
    if (sd > 1e-12 * (1.0 + std::abs(m(j)))) s(j) = sd;
  }
  return s;
}

LassoModel lasso_fit_fixed(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double zeta,
                           const LassoOptions& options, const LassoModel* warm_start,
                           std::vector<double>* objective_trace) {
  CONFPI_REQUIRE(zeta >= 0.0, "lasso penalty must be non-negative");
  const Prepared p = prepare(x, y, options.standardize);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(x.cols());
  if (warm_start && warm_start->coef.size() == x.cols()) {
    for (const Eigen::Index j : p.active) b(j) = warm_start->coef(j) * p.scales(j);
  }
  Eigen::VectorXd r = p.yc - p.z * b;
  if (objective_trace) objective_trace->push_back(r.squaredNorm() + zeta * b.cwiseAbs().sum());
  const CdResult cd = coordinate_descent(p, zeta, b, r, options, objective_trace);
  return to_model(p, b, zeta, cd);
}

LassoModel lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const double> grid,
                     int cv_folds, const LassoOptions& options) {
  CONFPI_REQUIRE(!grid.empty(), "lasso: empty penalty grid");
  CONFPI_REQUIRE(cv_folds >= 2, "lasso: need at least two CV folds");
  const Eigen::Index n = x.rows();
  CONFPI_REQUIRE(n >= 2 * cv_folds, "lasso: too few rows for cross-validation");

  std::vector<double> cv_error(grid.size(), 0.0);
  for (int fold = 0; fold < cv_folds; ++fold) {
    const Eigen::Index start = n * fold / cv_folds;
    const Eigen::Index stop = n * (fold + 1) / cv_folds;
    const Eigen::Index held = stop - start;
    Eigen::MatrixXd xt(n - held, x.cols());
    Eigen::VectorXd yt(n - held);
    xt << x.topRows(start), x.bottomRows(n - stop);
    yt << y.head(start), y.tail(n - stop);
    const Prepared p = prepare(xt, yt, options.standardize);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(x.cols());
    Eigen::VectorXd r = p.yc;
    for (std::size_t g = 0; g < grid.size(); ++g) {
      const CdResult cd = coordinate_descent(p, grid[g], b, r, options, nullptr);
      const LassoModel m = to_model(p, b, grid[g], cd);
      const Eigen::VectorXd pred = (x.middleRows(start, held) * m.coef).array() + m.intercept;
      cv_error[g] += (y.segment(start, held) - pred).squaredNorm() / static_cast<double>(held);
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (cv_error[g] < cv_error[best]) best = g;
  }
  return lasso_fit_fixed(x, y, grid[best], options);
}

double lasso_predict(const LassoModel& model, const Eigen::VectorXd& row) {
  CONFPI_REQUIRE(row.size() == model.coef.size(), "lasso: row length mismatch");
  return model.intercept + model.coef.dot(row);
}

double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoModel& model,
                       double zeta, bool standardize) {
  const Eigen::VectorXd resid = (y - x * model.coef).array() - model.intercept;
  const Eigen::VectorXd s = lasso_penalty_scales(x, standardize);
  return resid.squaredNorm() + zeta * s.cwiseProduct(model.coef).cwiseAbs().sum();
}

}  // namespace confpi
