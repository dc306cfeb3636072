#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

namespace confpi {

struct LassoOptions {
  /// Scale columns to unit (population) variance before penalizing; the
  /// returned coefficients are always on the original column scale.
  bool standardize = true;
  /// Convergence when the largest coefficient change in a sweep is below this.
  double tolerance = 1e-7;
  int max_sweeps = 10000;
};

struct LassoModel {
  double intercept = 0.0;
  Eigen::VectorXd coef;
  double zeta = 0.0;
  int sweeps = 0;
  bool converged = false;
};

/// 0.001, 0.002, ..., 0.100.
std::vector<double> lasso_default_grid();

/**
 * Coordinate descent for
 *
 *   sum_t (y_t - b0 - x_t' beta)^2 + zeta * sum_j s_j |beta_j|
 *
 * with b0 unpenalized and s_j the column standard deviation (1 when
 * standardization is off). Zero-variance columns, and exact copies of an
 * earlier column, get coefficient 0.
 * `objective_trace`, when given, receives the objective after every sweep.
 */
LassoModel lasso_fit_fixed(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, double zeta,
                           const LassoOptions& options = {}, const LassoModel* warm_start = nullptr,
                           std::vector<double>* objective_trace = nullptr);

/// Selects zeta from `grid` by k-fold CV over contiguous row blocks (mean
/// squared error; first minimum in grid order wins), then refits on all rows.
LassoModel lasso_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, std::span<const double> grid,
                     int cv_folds = 2, const LassoOptions& options = {});

double lasso_predict(const LassoModel& model, const Eigen::VectorXd& row);

/// Objective value of lasso_fit_fixed's problem at `model`.
double lasso_objective(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const LassoModel& model,
                       double zeta, bool standardize = true);

/// Column scales s_j used by the penalty (population standard deviation, or 1).
Eigen::VectorXd lasso_penalty_scales(const Eigen::MatrixXd& x, bool standardize);

}  // namespace confpi
