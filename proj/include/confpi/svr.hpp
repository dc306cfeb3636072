#pragma once

#include <Eigen/Dense>

namespace confpi {

struct SvrOptions {
  double sigma = 0.005;  // RBF width: k(u,v) = exp(-sigma * |u - v|^2)
  double cost = 1.25;
  double epsilon = 0.1;
  int max_iterations = 1000;
  double tolerance = 1e-3;  // maximal KKT violation accepted as optimal
};

/**
 * Epsilon-insensitive support vector regression with an RBF kernel.
 * Prediction is sum_i (alpha_i - alpha*_i) k(x_i, x) + bias.
 */
struct SvrModel {
  Eigen::MatrixXd x;
  Eigen::VectorXd alpha;       // upper-tube multipliers, one per training row
  Eigen::VectorXd alpha_star;  // lower-tube multipliers
  double bias = 0.0;
  double sigma = 0.005;
  double cost = 1.25;
  int iterations = 0;
  bool converged = false;

  Eigen::VectorXd dual_coef() const { return alpha - alpha_star; }
};

/// Sequential minimal optimization with second-order working-set selection.
/// Stops at `max_iterations` and returns the current (feasible) iterate.
SvrModel svr_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SvrOptions& options = {});

double svr_predict(const SvrModel& model, const Eigen::VectorXd& query);

double rbf_kernel(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double sigma);

}  // namespace confpi
