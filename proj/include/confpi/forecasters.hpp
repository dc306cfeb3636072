#pragma once

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "confpi/knn.hpp"
#include "confpi/lasso.hpp"
#include "confpi/svr.hpp"
#include "confpi/types.hpp"

namespace confpi {

enum class ForecasterKind { naive, lasso, knn, svr };

/// "Naive", "Lasso", "KNN", "SVM" (the tags used in model names).
std::string_view display_name(ForecasterKind kind);
/// Accepts naive|lasso|knn|svr|svm (case-insensitive).
ForecasterKind forecaster_kind_from_string(std::string_view text);

struct ForecasterSpec {
  ForecasterKind kind = ForecasterKind::lasso;
  std::vector<double> lasso_grid = lasso_default_grid();
  int lasso_cv_folds = 2;
  int knn_k = 50;
  SvrOptions svr;

  /// Lasso and SVR work on Yeo-Johnson transformed prices; KNN and naive do not.
  bool uses_yeo_johnson() const { return kind == ForecasterKind::lasso || kind == ForecasterKind::svr; }
};

/**
 * Yeo-Johnson preprocessing of a design matrix. One eta is fitted on the
 * training targets and applied to the target and every price-valued column
 * (lags, previous-day extrema, last price); each fundamental column gets its
 * own eta. Dummies, PCA scores and the regime indicator pass through.
 */
struct FeatureTransform {
  bool active = false;
  double price_eta = 1.0;
  std::vector<double> fundamental_eta;
  bool degenerate = false;

  static FeatureTransform fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& price_targets);
  Eigen::MatrixXd apply(const Eigen::MatrixXd& x) const;
  Eigen::VectorXd apply(const Eigen::VectorXd& row) const;
  double apply_target(double y) const;
  double invert_target(double z) const;
};

/// Naive rule on the panel: y_{t-1,h} on Tue-Fri, y_{t-7,h} on Sat/Sun/Mon.
double naive_predict(const HourlyPanel& panel, std::size_t t, int h);

/// The same rule read off a design row (dummies select ar7, otherwise ar1).
double naive_predict_row(const Eigen::VectorXd& row);

/**
 * A fitted point-forecast engine. Rows passed to predict() are raw design
 * rows; any transform is applied internally and the output is on the price
 * scale (or on the raw error scale for error models).
 */
class FittedModel {
 public:
  ForecasterKind kind() const { return kind_; }
  double predict(const Eigen::VectorXd& row) const;
  Eigen::VectorXd predict(const Eigen::MatrixXd& rows) const;

  const FeatureTransform& transform() const { return transform_; }
  const std::vector<std::string>& warnings() const { return warnings_; }
  /// Engine state; std::monostate for naive.
  const std::variant<std::monostate, LassoModel, KnnModel, SvrModel>& engine() const { return engine_; }

 private:
  friend FittedModel fit_forecaster(const ForecasterSpec&, const Eigen::MatrixXd&, const Eigen::VectorXd&);
  friend FittedModel fit_error_model(const ForecasterSpec&, const Eigen::MatrixXd&, const Eigen::VectorXd&,
                                     const FeatureTransform&);

  ForecasterKind kind_ = ForecasterKind::naive;
  FeatureTransform transform_;
  bool transform_target_ = false;
  std::variant<std::monostate, LassoModel, KnnModel, SvrModel> engine_;
  std::vector<std::string> warnings_;
};

/// Fits a price model on raw design rows `x` and price targets `y`.
FittedModel fit_forecaster(const ForecasterSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& y);

/// Fits the companion error model of the same kind: targets are absolute
/// residuals (left untransformed); features reuse the point model's transform.
FittedModel fit_error_model(const ForecasterSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& abs_errors,
                            const FeatureTransform& transform);

}  // namespace confpi
