#include "confpi/knn.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "confpi/errors.hpp"

namespace confpi {

KnnModel knn_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, int k) {
  CONFPI_REQUIRE(x.rows() == y.size(), "knn: row count mismatch");
  CONFPI_REQUIRE(k >= 1, "knn: k must be at least 1");
  CONFPI_REQUIRE(k <= x.rows(), "knn: k exceeds the number of training rows");
  return {x, y, k};
}

double knn_predict(const KnnModel& model, const Eigen::VectorXd& query) {
  CONFPI_REQUIRE(query.size() == model.x.cols(), "knn: query length mismatch");
  std::vector<std::pair<double, Eigen::Index>> dist(static_cast<std::size_t>(model.x.rows()));
  for (Eigen::Index i = 0; i < model.x.rows(); ++i) {
    dist[static_cast<std::size_t>(i)] = {(model.x.row(i).transpose() - query).squaredNorm(), i};
  }
  const auto kth = dist.begin() + model.k;
  std::partial_sort(dist.begin(), kth, dist.end());
  double sum = 0.0;
  for (auto it = dist.begin(); it != kth; ++it) sum += model.y(it->second);
  return sum / model.k;
}

}  // namespace confpi
