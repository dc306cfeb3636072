#include "confpi/forecasters.hpp"

#include <algorithm>
#include <cctype>

#include "confpi/errors.hpp"
#include "confpi/features.hpp"
#include "confpi/yeo_johnson.hpp"

namespace confpi {

std::string_view display_name(ForecasterKind kind) {
  switch (kind) {
    case ForecasterKind::naive: return "Naive";
    case ForecasterKind::lasso: return "Lasso";
    case ForecasterKind::knn: return "KNN";
    case ForecasterKind::svr: return "SVM";
  }
  return "?";
}

ForecasterKind forecaster_kind_from_string(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (s == "naive") return ForecasterKind::naive;
  if (s == "lasso") return ForecasterKind::lasso;
  if (s == "knn") return ForecasterKind::knn;
  if (s == "svr" || s == "svm") return ForecasterKind::svr;
  throw std::invalid_argument("unknown forecaster '" + std::string(text) + "'");
}

FeatureTransform FeatureTransform::fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& price_targets) {
  FeatureTransform t;
  t.active = true;
  const auto yj = yj_fit(std::span<const double>(price_targets.data(), static_cast<std::size_t>(price_targets.size())));
  t.price_eta = yj.params.eta;
  t.degenerate = yj.degenerate;
  for (Eigen::Index j = design_col::kFirstFundamental; j < x.cols(); ++j) {
    const Eigen::VectorXd col = x.col(j);
    const auto f = yj_fit(std::span<const double>(col.data(), static_cast<std::size_t>(col.size())));
    t.fundamental_eta.push_back(f.params.eta);
  }
  return t;
}

Eigen::VectorXd FeatureTransform::apply(const Eigen::VectorXd& row) const {
  if (!active) return row;
  Eigen::VectorXd out = row;
  for (const int j : design_col::kPriceColumns) out(j) = yj_apply(price_eta, row(j));
  for (std::size_t f = 0; f < fundamental_eta.size(); ++f) {
    const auto j = design_col::kFirstFundamental + static_cast<Eigen::Index>(f);
    out(j) = yj_apply(fundamental_eta[f], row(j));
  }
  return out;
}

Eigen::MatrixXd FeatureTransform::apply(const Eigen::MatrixXd& x) const {
  if (!active) return x;
  Eigen::MatrixXd out(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < x.rows(); ++r) out.row(r) = apply(Eigen::VectorXd(x.row(r).transpose())).transpose();
  return out;
}

double FeatureTransform::apply_target(double y) const { return active ? yj_apply(price_eta, y) : y; }
double FeatureTransform::invert_target(double z) const { return active ? yj_invert(price_eta, z) : z; }

double naive_predict(const HourlyPanel& panel, std::size_t t, int h) {
  CONFPI_REQUIRE(t >= kFeatureWarmupDays && t < panel.num_days(), "naive forecast needs 8 <= t < days");
  const unsigned wd = weekday_index(panel.dates[t]);
  const bool weekend_or_monday = wd == 6 || wd == 0 || wd == 1;
  return panel.price(weekend_or_monday ? t - 7 : t - 1, h);
}

double naive_predict_row(const Eigen::VectorXd& row) {
  const bool weekend_or_monday = row(design_col::kSat) != 0.0 || row(design_col::kSun) != 0.0 ||
                                 row(design_col::kMon) != 0.0;
  return weekend_or_monday ? row(design_col::kAr7) : row(design_col::kAr1);
}

namespace {

void fit_engine(const ForecasterSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& y,
                std::variant<std::monostate, LassoModel, KnnModel, SvrModel>& engine,
                std::vector<std::string>& warnings) {
  switch (spec.kind) {
    case ForecasterKind::naive:
      engine = std::monostate{};
      break;
    case ForecasterKind::lasso: {
      auto m = lasso_fit(x, y, spec.lasso_grid, spec.lasso_cv_folds);
      if (!m.converged) warnings.emplace_back("lasso coordinate descent hit the sweep cap");
      engine = std::move(m);
      break;
    }
    case ForecasterKind::knn:
      engine = knn_fit(x, y, spec.knn_k);
      break;
    case ForecasterKind::svr: {
      auto m = svr_fit(x, y, spec.svr);
      if (!m.converged) warnings.emplace_back("svr stopped at the iteration cap");
      engine = std::move(m);
      break;
    }
  }
}

}  // namespace

FittedModel fit_forecaster(const ForecasterSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& y) {
  CONFPI_REQUIRE(x.rows() == y.size(), "forecaster: row count mismatch");
  FittedModel m;
  m.kind_ = spec.kind;
  if (spec.uses_yeo_johnson()) {
    m.transform_ = FeatureTransform::fit(x, y);
    if (m.transform_.degenerate) m.warnings_.emplace_back("constant target: identity Yeo-Johnson transform");
    m.transform_target_ = true;
    const Eigen::VectorXd z = y.unaryExpr([&](double v) { return m.transform_.apply_target(v); });
    fit_engine(spec, m.transform_.apply(x), z, m.engine_, m.warnings_);
  } else {
    fit_engine(spec, x, y, m.engine_, m.warnings_);
  }
  return m;
}

FittedModel fit_error_model(const ForecasterSpec& spec, const Eigen::MatrixXd& x, const Eigen::VectorXd& abs_errors,
                            const FeatureTransform& transform) {
  CONFPI_REQUIRE(x.rows() == abs_errors.size(), "error model: row count mismatch");
  FittedModel m;
  m.kind_ = spec.kind;
  m.transform_ = transform;
  m.transform_target_ = false;
  fit_engine(spec, transform.apply(x), abs_errors, m.engine_, m.warnings_);
  return m;
}

double FittedModel::predict(const Eigen::VectorXd& row) const {
  if (kind_ == ForecasterKind::naive) return naive_predict_row(row);
  const Eigen::VectorXd r = transform_.apply(row);
  double z = 0.0;
  if (const auto* lasso = std::get_if<LassoModel>(&engine_)) {
    z = lasso_predict(*lasso, r);
  } else if (const auto* knn = std::get_if<KnnModel>(&engine_)) {
    z = knn_predict(*knn, r);
  } else if (const auto* svr = std::get_if<SvrModel>(&engine_)) {
    z = svr_predict(*svr, r);
  }
  return transform_target_ ? transform_.invert_target(z) : z;
}

Eigen::VectorXd FittedModel::predict(const Eigen::MatrixXd& rows) const {
  Eigen::VectorXd out(rows.rows());
  for (Eigen::Index r = 0; r < rows.rows(); ++r) out(r) = predict(Eigen::VectorXd(rows.row(r).transpose()));
  return out;
}

}  // namespace confpi
