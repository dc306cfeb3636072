#include "confpi/conformal.hpp"

#include <algorithm>
#include <cmath>

#include "confpi/errors.hpp"
#include "confpi/stats.hpp"

namespace confpi {
namespace {

void require_alpha(double alpha) { CONFPI_REQUIRE(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0,1)"); }

IntervalForecast make_interval(double lower, double upper, double center, double alpha) {
  IntervalForecast f;
  f.alpha = alpha;
  f.center = center;
  if (lower > upper) {
    std::swap(lower, upper);
    f.crossed = true;
  }
  f.lower = lower;
  f.upper = upper;
  return f;
}

IntervalForecast unbounded_interval(double center, double alpha) {
  IntervalForecast f;
  f.alpha = alpha;
  f.center = center;
  f.lower = -std::numeric_limits<double>::infinity();
  f.upper = std::numeric_limits<double>::infinity();
  f.unbounded = true;
  return f;
}

double floored(double estimate, double floor) { return std::max(std::abs(estimate), floor); }

}  // namespace

double icp_threshold(std::span<const double> scores, double alpha) {
  CONFPI_REQUIRE(!scores.empty(), "icp_threshold: empty calibration set");
  require_alpha(alpha);
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  const double n1 = static_cast<double>(sorted.size() + 1);
  // Rank condition compared as counts: (#less + 1) >= (1 - alpha)(n + 1).
  const double needed = (1.0 - alpha) * n1 * (1.0 - 1e-12);

  const auto below_zero = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), 0.0) - sorted.begin());
  if (below_zero + 1.0 >= needed) return 0.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    // i scores are strictly smaller than sorted[i].
    if (static_cast<double>(i) + 1.0 >= needed) return sorted[i];
  }
  return kUnboundedThreshold;
}

IntervalForecast icp_interval(double y_hat, double threshold, double alpha) {
  CONFPI_REQUIRE(threshold >= 0.0, "icp_interval: negative threshold");
  if (std::isinf(threshold)) return unbounded_interval(y_hat, alpha);
  return make_interval(y_hat - threshold, y_hat + threshold, y_hat, alpha);
}

double normalizer_floor(std::span<const double> calibration_error_estimates) {
  if (calibration_error_estimates.empty()) return 1e-6;
  std::vector<double> abs_est(calibration_error_estimates.size());
  std::transform(calibration_error_estimates.begin(), calibration_error_estimates.end(), abs_est.begin(),
                 [](double v) { return std::abs(v); });
  return std::max(1e-6, 0.01 * median(abs_est));
}

NonConformitySet ncp_scores(std::span<const double> residuals, std::span<const double> error_estimates) {
  CONFPI_REQUIRE(residuals.size() == error_estimates.size(), "ncp_scores: size mismatch");
  NonConformitySet set;
  set.normalizer_floor = normalizer_floor(error_estimates);
  set.scores.reserve(residuals.size());
  set.normalizers.reserve(residuals.size());
  for (std::size_t i = 0; i < residuals.size(); ++i) {
    const double n = floored(error_estimates[i], set.normalizer_floor);
    set.normalizers.push_back(n);
    set.scores.push_back(std::abs(residuals[i]) / n);
  }
  return set;
}

IntervalForecast ncp_interval(double y_hat, double threshold, double error_estimate, double floor, double alpha) {
  CONFPI_REQUIRE(threshold >= 0.0, "ncp_interval: negative threshold");
  if (std::isinf(threshold)) return unbounded_interval(y_hat, alpha);
  const double half = threshold * floored(error_estimate, floor);
  return make_interval(y_hat - half, y_hat + half, y_hat, alpha);
}

IntervalForecast empirical_interval(std::span<const double> abs_errors, double alpha, double y_hat) {
  require_alpha(alpha);
  CONFPI_REQUIRE(abs_errors.size() >= 20, "empirical_interval: needs at least 20 errors");
  const double q = quantile_type7(abs_errors, 1.0 - alpha);
  return make_interval(y_hat - q, y_hat + q, y_hat, alpha);
}

std::string_view LatticeVariant::name() const {
  if (symmetric && sampled && normalized) return "Normalized Conformal Prediction";
  if (symmetric && sampled) return "Conformal Prediction";
  if (symmetric && normalized) return "quantiles norm-symmetric";
  if (symmetric) return "quantiles - symmetric";
  if (sampled && normalized) return "quantiles - norm-sampled";
  if (sampled) return "quantiles - sampled";
  if (normalized) return "quantiles - normalized";
  return "asymmetric quantiles";
}

std::string LatticeVariant::tag() const {
  return std::string(symmetric ? "sym" : "asym") + (sampled ? "-smp" : "-full") + (normalized ? "-norm" : "-raw");
}

std::array<LatticeVariant, 8> LatticeVariant::all() {
  std::array<LatticeVariant, 8> out{};
  for (int i = 0; i < 8; ++i) out[static_cast<std::size_t>(i)] = {(i & 4) != 0, (i & 2) != 0, (i & 1) != 0};
  return out;
}

IntervalForecast lattice_interval(const LatticeVariant& variant, const LatticeContext& ctx, double alpha) {
  require_alpha(alpha);
  const auto& residuals = variant.sampled ? ctx.calib_residuals : ctx.full_residuals;
  const auto& estimates = variant.sampled ? ctx.calib_error_estimates : ctx.full_error_estimates;
  const double center = variant.sampled ? ctx.split_center : ctx.full_center;
  const double query_estimate = variant.sampled ? ctx.split_query_error_estimate : ctx.full_query_error_estimate;
  CONFPI_REQUIRE(!residuals.empty(), "lattice_interval: no residuals");

  if (variant.symmetric) {
    if (variant.normalized) {
      const NonConformitySet set = ncp_scores(residuals, estimates);
      if (variant.sampled) {
        return ncp_interval(center, icp_threshold(set.scores, alpha), query_estimate, set.normalizer_floor, alpha);
      }
      const double q = quantile_type7(set.scores, 1.0 - alpha);
      const double half = q * floored(query_estimate, set.normalizer_floor);
      return make_interval(center - half, center + half, center, alpha);
    }
    std::vector<double> abs_res(residuals.size());
    std::transform(residuals.begin(), residuals.end(), abs_res.begin(), [](double r) { return std::abs(r); });
    if (variant.sampled) return icp_interval(center, icp_threshold(abs_res, alpha), alpha);
    return empirical_interval(abs_res, alpha, center);
  }

  std::vector<double> scores(residuals.begin(), residuals.end());
  double scale = 1.0;
  if (variant.normalized) {
    CONFPI_REQUIRE(estimates.size() == residuals.size(), "lattice_interval: estimate size mismatch");
    const double floor = normalizer_floor(estimates);
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i] /= floored(estimates[i], floor);
    scale = floored(query_estimate, floor);
  }
  std::sort(scores.begin(), scores.end());
  const double q_lo = quantile_type7_sorted(scores, alpha / 2.0);
  const double q_hi = quantile_type7_sorted(scores, 1.0 - alpha / 2.0);
  return make_interval(center + q_lo * scale, center + q_hi * scale, center, alpha);
}

}  // namespace confpi
