#include "confpi/pca.hpp"

#include "confpi/errors.hpp"

namespace confpi {

PcaModel pca_fit(const DayMatrix& days) {
  CONFPI_REQUIRE(days.cols() == kHoursPerDay, "PCA input must have 24 columns");
  CONFPI_REQUIRE(days.rows() >= 24, "PCA window must span at least 24 days");
  PcaModel model;
  model.hour_means = days.colwise().mean().transpose();
  const Eigen::MatrixXd centered = days.rowwise() - model.hour_means.transpose();
  const Eigen::MatrixXd cov = centered.transpose() * centered / static_cast<double>(days.rows() - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  // Eigen returns ascending eigenvalues.
  const Eigen::VectorXd values = solver.eigenvalues().reverse();
  const Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
  const double total = values.cwiseMax(0.0).sum();
  const double scale = days.cwiseAbs2().mean();
  if (!(values(0) > 1e-12 * (1.0 + scale))) return model;  // rank 0

  for (int k = 0; k < kPcaComponents; ++k) {
    if (!(values(k) > 1e-9 * values(0))) break;
    Eigen::VectorXd v = vectors.col(k);
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    model.loadings.col(k) = v;
    model.explained_share(k) = values(k) / total;
    model.rank = k + 1;
  }
  return model;
}

PcaModel pca_fit(const HourlyPanel& panel, std::size_t first_day, std::size_t end_day) {
  CONFPI_REQUIRE(first_day <= end_day && end_day <= panel.num_days(), "PCA window outside the panel");
  return pca_fit(DayMatrix(panel.prices.middleRows(static_cast<Eigen::Index>(first_day),
                                                   static_cast<Eigen::Index>(end_day - first_day))));
}

Eigen::Vector3d pca_project(const PcaModel& model, const Eigen::VectorXd& day_prices) {
  CONFPI_REQUIRE(day_prices.size() == kHoursPerDay, "PCA projection needs a 24-hour vector");
  return model.loadings.transpose() * (day_prices - model.hour_means);
}

}  // namespace confpi
