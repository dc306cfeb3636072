#pragma once

#include <array>
#include <limits>
#include <span>
#include <string_view>
#include <vector>

#include "confpi/types.hpp"

namespace confpi {

/// Threshold returned when no calibration score satisfies the rank condition.
inline constexpr double kUnboundedThreshold = std::numeric_limits<double>::infinity();

/// Calibration non-conformity scores, with the (floored) normalizers that
/// produced them when the scores are normalized.
struct NonConformitySet {
  std::vector<double> scores;
  std::vector<double> normalizers;
  double normalizer_floor = 0.0;
};

/**
 * Smallest lambda in scores + {0} with
 *   (#{i : score_i < lambda} + 1) / (n + 1) >= 1 - alpha.
 * Always an element of the input (or 0); kUnboundedThreshold when even the
 * largest score does not qualify.
 */
double icp_threshold(std::span<const double> scores, double alpha);

/// [y_hat - lambda, y_hat + lambda]; an infinite lambda yields an unbounded interval.
IntervalForecast icp_interval(double y_hat, double threshold, double alpha);

/// max(1e-6, 0.01 * median(|calibration error estimates|)).
double normalizer_floor(std::span<const double> calibration_error_estimates);

/// lambda_i = |residual_i| / max(|err_hat_i|, floor).
NonConformitySet ncp_scores(std::span<const double> residuals, std::span<const double> error_estimates);

/// [y_hat - lambda * n, y_hat + lambda * n] with n = max(|err_hat|, floor).
IntervalForecast ncp_interval(double y_hat, double threshold, double error_estimate, double floor, double alpha);

/// y_hat -/+ type-7 quantile of |errors| at level 1 - alpha (needs >= 20 errors).
IntervalForecast empirical_interval(std::span<const double> abs_errors, double alpha, double y_hat);

/// One node of the symmetry / sampling / normalization cube.
struct LatticeVariant {
  bool symmetric = true;
  bool sampled = true;
  bool normalized = false;

  /// Model name of the node, e.g. "Conformal Prediction" for (T,T,F).
  std::string_view name() const;
  /// Short machine tag, e.g. "sym-smp-raw".
  std::string tag() const;
  static std::array<LatticeVariant, 8> all();
  friend bool operator==(const LatticeVariant&, const LatticeVariant&) = default;
};

/**
 * Everything a lattice node needs for one (day, hour, forecaster).
 * Unsampled nodes use the model fitted on the whole window and its in-sample
 * errors; sampled nodes use the model fitted on the training split and its
 * calibration-set errors. Residuals are signed (y - y_hat).
 */
struct LatticeContext {
  double full_center = 0.0;
  std::vector<double> full_residuals;
  std::vector<double> full_error_estimates;
  double full_query_error_estimate = 1.0;

  double split_center = 0.0;
  std::vector<double> calib_residuals;
  std::vector<double> calib_error_estimates;
  double split_query_error_estimate = 1.0;
};

/**
 * Interval of one lattice node.
 *  - symmetric + sampled: rank-rule threshold on |scores| (ICP / NCP);
 *  - symmetric + unsampled: type-7 quantile of |scores| at 1 - alpha;
 *  - asymmetric: type-7 quantiles of signed scores at alpha/2 and 1 - alpha/2.
 * Normalized nodes divide scores by the floored error estimate and rescale
 * the bounds by the query's estimate. Crossed bounds are swapped and flagged.
 */
IntervalForecast lattice_interval(const LatticeVariant& variant, const LatticeContext& context, double alpha);

}  // namespace confpi
