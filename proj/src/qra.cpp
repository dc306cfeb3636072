#include "confpi/qra.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "confpi/errors.hpp"

namespace confpi {
namespace {

constexpr double kPivotTol = 1e-11;
constexpr double kCostTol = 1e-11;

}  // namespace

double check_loss(double residual, double tau) { return residual < 0.0 ? (tau - 1.0) * residual : tau * residual; }

double qra_objective(const Eigen::MatrixXd& forecasts, const Eigen::VectorXd& y, const Eigen::VectorXd& weights,
                     double intercept, double tau) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double fit = (forecasts.cols() > 0 ? forecasts.row(i).dot(weights) : 0.0) + intercept;
    total += check_loss(y(i) - fit, tau);
  }
  return total;
}

QraModel qra_fit(const Eigen::MatrixXd& forecasts, const Eigen::VectorXd& y, double tau, bool intercept) {
  CONFPI_REQUIRE(tau > 0.0 && tau < 1.0, "qra: tau must lie in (0,1)");
  CONFPI_REQUIRE(forecasts.rows() == y.size(), "qra: row count mismatch");
  const Eigen::Index n = y.size();
  const Eigen::Index p = forecasts.cols() + (intercept ? 1 : 0);
  CONFPI_REQUIRE(p >= 1, "qra: no regressors");
  CONFPI_REQUIRE(n >= 10 * p, "qra: needs at least 10 rows per regressor");

  Eigen::MatrixXd x(n, p);
  if (forecasts.cols() > 0) x.leftCols(forecasts.cols()) = forecasts;
  if (intercept) x.col(p - 1).setOnes();

  // Columns: w+ (p), w- (p), u (n), v (n), rhs.
  const Eigen::Index m = 2 * p + 2 * n;
  const Eigen::Index rhs = m;
  auto col_u = [&](Eigen::Index i) { return 2 * p + i; };
  auto col_v = [&](Eigen::Index i) { return 2 * p + n + i; };
  Eigen::VectorXd cost = Eigen::VectorXd::Zero(m);
  cost.segment(2 * p, n).setConstant(tau);
  cost.segment(2 * p + n, n).setConstant(1.0 - tau);

  Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n + 1, m + 1);
  std::vector<Eigen::Index> basis(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double sign = y(i) >= 0.0 ? 1.0 : -1.0;
    t.block(i, 0, 1, p) = sign * x.row(i);
    t.block(i, p, 1, p) = -sign * x.row(i);
    t(i, col_u(i)) = sign;
    t(i, col_v(i)) = -sign;
    t(i, rhs) = sign * y(i);
    basis[static_cast<std::size_t>(i)] = sign > 0 ? col_u(i) : col_v(i);
  }
  // Reduced costs in the last row: c_j - c_B' B^-1 a_j, objective value at (n, rhs) negated.
  t.row(n).head(m) = cost.transpose();
  t(n, rhs) = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) t.row(n) -= cost(basis[static_cast<std::size_t>(i)]) * t.row(i);

  QraModel model;
  model.tau = tau;
  model.has_intercept = intercept;
  const int max_pivots = static_cast<int>(50 * (n + m));
  const int bland_after = static_cast<int>(10 * (n + m));
  while (true) {
    Eigen::Index enter = -1;
    if (model.pivots < bland_after) {
      double most_negative = -kCostTol;
      for (Eigen::Index j = 0; j < m; ++j) {
        if (t(n, j) < most_negative) {
          most_negative = t(n, j);
          enter = j;
        }
      }
    } else {
      for (Eigen::Index j = 0; j < m; ++j) {
        if (t(n, j) < -kCostTol) {
          enter = j;
          break;
        }
      }
    }
    if (enter < 0) break;
    if (model.pivots >= max_pivots) throw std::runtime_error("qra: simplex pivot limit reached");

    Eigen::Index leave = -1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (Eigen::Index i = 0; i < n; ++i) {
      const double a = t(i, enter);
      if (a <= kPivotTol) continue;
      const double ratio = t(i, rhs) / a;
      if (ratio < best_ratio - 1e-14 ||
          (ratio <= best_ratio + 1e-14 && leave >= 0 &&
           basis[static_cast<std::size_t>(i)] < basis[static_cast<std::size_t>(leave)])) {
        best_ratio = std::min(best_ratio, ratio);
        leave = i;
      }
    }
    // Every column has a finite optimum (the objective is bounded below by 0).
    if (leave < 0) throw std::runtime_error("qra: linear program reported unbounded");

    t.row(leave) /= t(leave, enter);
    for (Eigen::Index i = 0; i <= n; ++i) {
      if (i != leave && t(i, enter) != 0.0) t.row(i) -= t(i, enter) * t.row(leave);
    }
    basis[static_cast<std::size_t>(leave)] = enter;
    ++model.pivots;
  }

  Eigen::VectorXd value = Eigen::VectorXd::Zero(m);
  std::vector<bool> is_basic(static_cast<std::size_t>(m), false);
  for (Eigen::Index i = 0; i < n; ++i) {
    value(basis[static_cast<std::size_t>(i)]) = t(i, rhs);
    is_basic[static_cast<std::size_t>(basis[static_cast<std::size_t>(i)])] = true;
  }
  Eigen::VectorXd w = value.head(p) - value.segment(p, p);
  model.weights = w.head(forecasts.cols());
  model.intercept = intercept ? w(p - 1) : 0.0;
  model.objective = qra_objective(forecasts, y, model.weights, model.intercept, tau);

  // Re-solve on the interpolated rows (both slacks non-basic) to strip the
  // round-off that accumulates over the pivots. Kept only if no worse.
  std::vector<Eigen::Index> fitted;
  for (Eigen::Index i = 0; i < n; ++i)
    if (!is_basic[static_cast<std::size_t>(col_u(i))] && !is_basic[static_cast<std::size_t>(col_v(i))])
      fitted.push_back(i);
  if (static_cast<Eigen::Index>(fitted.size()) == p) {
    Eigen::MatrixXd sub(p, p);
    Eigen::VectorXd target(p);
    for (Eigen::Index r = 0; r < p; ++r) {
      sub.row(r) = x.row(fitted[static_cast<std::size_t>(r)]);
      target(r) = y(fitted[static_cast<std::size_t>(r)]);
    }
    const Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (lu.isInvertible()) {
      const Eigen::VectorXd exact = lu.solve(target);
      const Eigen::VectorXd ew = exact.head(forecasts.cols());
      const double eb = intercept ? exact(p - 1) : 0.0;
      const double obj = qra_objective(forecasts, y, ew, eb, tau);
      if (exact.allFinite() && obj <= model.objective + 1e-12 * (1.0 + std::abs(model.objective))) {
        model.weights = ew;
        model.intercept = eb;
        model.objective = obj;
      }
    }
  }

  // A zero reduced cost on a non-basic column whose mirror is also non-basic
  // means an alternative optimal vertex exists.
  for (Eigen::Index j = 0; j < m; ++j) {
    if (is_basic[static_cast<std::size_t>(j)]) continue;
    Eigen::Index mirror = j < p ? j + p : (j < 2 * p ? j - p : -1);
    if (mirror >= 0 && is_basic[static_cast<std::size_t>(mirror)]) continue;
    if (std::abs(t(n, j)) < 1e-9) {
      model.non_unique = true;
      break;
    }
  }
  return model;
}

double qra_predict(const QraModel& model, const Eigen::VectorXd& forecast_row) {
  CONFPI_REQUIRE(forecast_row.size() == model.weights.size(), "qra: forecast row length mismatch");
  return (model.weights.size() > 0 ? model.weights.dot(forecast_row) : 0.0) + model.intercept;
}

IntervalForecast qra_interval(const QraModel& lower, const QraModel& upper, const Eigen::VectorXd& forecast_row) {
  CONFPI_REQUIRE(std::abs(lower.tau - (1.0 - upper.tau)) < 1e-12, "qra_interval: quantile levels do not match");
  IntervalForecast f;
  f.alpha = 2.0 * lower.tau;
  double lo = qra_predict(lower, forecast_row);
  double hi = qra_predict(upper, forecast_row);
  if (lo > hi) {
    std::swap(lo, hi);
    f.crossed = true;
  }
  f.lower = lo;
  f.upper = hi;
  f.center = 0.5 * (lo + hi);
  return f;
}

}  // namespace confpi
