#pragma once

#include <Eigen/Dense>

namespace confpi {

/// Exact k-nearest-neighbour regressor (Euclidean distance, unweighted mean).
struct KnnModel {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  int k = 1;
};

KnnModel knn_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k);

/// Equal distances are ordered by training row index, so the neighbour set is
/// deterministic; targets are summed in (distance, index) order.
double knn_predict(const KnnModel& model, const Eigen::VectorXd& query);

}  // namespace confpi
