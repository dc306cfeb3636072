#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace confpi {

inline constexpr int kHoursPerDay = 24;

using Date = std::chrono::sys_days;

/// Parses an ISO-8601 calendar date (YYYY-MM-DD). Throws std::invalid_argument.
Date parse_date(std::string_view text);
std::string format_date(Date date);

/// 0 = Sunday ... 6 = Saturday.
unsigned weekday_index(Date date);

/// Matrix of shape [day][hour], hour index 0..23.
using DayMatrix = Eigen::MatrixXd;

/**
 * Hourly price panel. Prices and every exogenous series share the same
 * day x 24 shape; after ingestion dates are consecutive and all cells finite.
 */
struct HourlyPanel {
  std::vector<Date> dates;
  DayMatrix prices;
  std::map<std::string, DayMatrix> exog;
  std::string market_tag;

  std::size_t num_days() const { return dates.size(); }
  double price(std::size_t day, int hour) const { return prices(static_cast<Eigen::Index>(day), hour); }
  Eigen::VectorXd day_prices(std::size_t day) const { return prices.row(static_cast<Eigen::Index>(day)).transpose(); }
};

struct PanelViolation {
  std::string message;
  std::optional<std::size_t> day;
  std::optional<int> hour;
};

/// Returns every broken panel invariant; empty iff the panel is well formed.
std::vector<PanelViolation> validate_panel(const HourlyPanel& panel);

/// Regressor vector for one (day, hour).
struct DesignRow {
  double intercept = 1.0;
  double ar1 = 0.0;
  double ar2 = 0.0;
  double ar7 = 0.0;
  double y_min_prev = 0.0;
  double y_max_prev = 0.0;
  double d_sat = 0.0;
  double d_sun = 0.0;
  double d_mon = 0.0;
  double pca1 = 0.0;
  double pca2 = 0.0;
  double pca3 = 0.0;
  double y_h24_prev = 0.0;
  double delta = 0.0;
  std::vector<double> fundamentals;

  static constexpr int kBaseFields = 14;

  int size() const { return kBaseFields + static_cast<int>(fundamentals.size()); }
  Eigen::VectorXd to_vector() const;
  static std::vector<std::string> field_names(const std::vector<std::string>& fundamentals);
};

/// Column positions inside DesignRow::to_vector().
namespace design_col {
inline constexpr int kIntercept = 0;
inline constexpr int kAr1 = 1;
inline constexpr int kAr2 = 2;
inline constexpr int kAr7 = 3;
inline constexpr int kMinPrev = 4;
inline constexpr int kMaxPrev = 5;
inline constexpr int kSat = 6;
inline constexpr int kSun = 7;
inline constexpr int kMon = 8;
inline constexpr int kPca1 = 9;
inline constexpr int kPca2 = 10;
inline constexpr int kPca3 = 11;
inline constexpr int kH24Prev = 12;
inline constexpr int kDelta = 13;
inline constexpr int kFirstFundamental = 14;
inline constexpr int kPriceColumns[] = {kAr1, kAr2, kAr7, kMinPrev, kMaxPrev, kH24Prev};
}  // namespace design_col

/// Random partition of in-sample indices 0..n-1 into training and calibration.
struct SplitPlan {
  std::vector<std::size_t> train_idx;
  std::vector<std::size_t> calib_idx;
  double pi = 0.75;
  std::uint64_t seed = 0;

  /// |train| = round(pi * n); indices keep the sampled (shuffled) order.
  static SplitPlan draw(std::size_t n, double pi, std::uint64_t seed);
};

/// Mixes a base seed with a window index (splitmix64 finalizer).
std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index);

struct IntervalForecast {
  std::size_t day = 0;
  int hour = 0;
  double alpha = 0.1;
  double lower = 0.0;
  double upper = 0.0;
  double center = 0.0;
  std::string model_tag;
  bool unbounded = false;  // threshold could not be attained; counts as covering
  bool crossed = false;    // bounds arrived crossed and were swapped

  bool covers(double y) const { return unbounded || (lower <= y && y <= upper); }
  double width() const { return upper - lower; }
};

/// Per-hour ordered hit indicators (1 = realization inside the interval).
using HitSeries = std::vector<std::uint8_t>;

}  // namespace confpi
