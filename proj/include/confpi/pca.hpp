#pragma once

#include <Eigen/Dense>

#include "confpi/types.hpp"

namespace confpi {

inline constexpr int kPcaComponents = 3;

/// Principal components of daily 24-hour price vectors.
struct PcaModel {
  Eigen::VectorXd hour_means = Eigen::VectorXd::Zero(kHoursPerDay);
  /// 24 x 3, columns orthonormal for retained components, zero for padded ones.
  Eigen::MatrixXd loadings = Eigen::MatrixXd::Zero(kHoursPerDay, kPcaComponents);
  /// Share of total variance explained by each of the three columns.
  Eigen::Vector3d explained_share = Eigen::Vector3d::Zero();
  /// Number of components with non-negligible variance, capped at 3.
  int rank = 0;

  bool rank_deficient() const { return rank < kPcaComponents; }
};

/// Fits on the rows of `days` (each a 24-hour price vector). Needs >= 24 rows.
/// Covariance of centred prices, eigenvectors by descending eigenvalue, each
/// column signed so its largest-magnitude entry is positive.
PcaModel pca_fit(const DayMatrix& days);

/// Fits on panel days [first_day, end_day).
PcaModel pca_fit(const HourlyPanel& panel, std::size_t first_day, std::size_t end_day);

/// loadings^T (day_prices - hour_means).
Eigen::Vector3d pca_project(const PcaModel& model, const Eigen::VectorXd& day_prices);

}  // namespace confpi
