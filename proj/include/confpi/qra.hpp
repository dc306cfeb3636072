#pragma once

#include <Eigen/Dense>

#include "confpi/types.hpp"

namespace confpi {

/// Quantile regression of realized prices on a vector of point forecasts.
struct QraModel {
  double tau = 0.5;
  Eigen::VectorXd weights;  // one per forecast column
  double intercept = 0.0;
  bool has_intercept = true;
  double objective = 0.0;   // sum of pinball losses at the optimum
  bool non_unique = false;  // a zero reduced cost was left at the optimum
  int pivots = 0;
};

/// rho_tau(z) = (tau - 1{z < 0}) z.
double check_loss(double residual, double tau);

/// Sum of check losses of y - (forecasts * weights + intercept).
double qra_objective(const Eigen::MatrixXd& forecasts, const Eigen::VectorXd& y, const Eigen::VectorXd& weights,
                     double intercept, double tau);

/**
 * Minimizes sum rho_tau(y - forecasts * w - b) as the linear program
 *   min tau 1'u + (1 - tau) 1'v  s.t.  X w + u - v = y,  u, v >= 0,
 * solved with a dense primal simplex started from the slack basis.
 * Requires rows >= 10 x (columns + intercept) and 0 < tau < 1.
 */
QraModel qra_fit(const Eigen::MatrixXd& forecasts, const Eigen::VectorXd& y, double tau, bool intercept = true);

double qra_predict(const QraModel& model, const Eigen::VectorXd& forecast_row);

/// Interval from the tau = alpha/2 and tau = 1 - alpha/2 models; crossed
/// quantiles are swapped and flagged. Center is the interval midpoint.
IntervalForecast qra_interval(const QraModel& lower, const QraModel& upper, const Eigen::VectorXd& forecast_row);

}  // namespace confpi
