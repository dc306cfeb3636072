#pragma once

#include <vector>

#include <Eigen/Dense>

#include "confpi/market.hpp"
#include "confpi/pca.hpp"
#include "confpi/types.hpp"

namespace confpi {

/// First day index with a complete regressor set (lag 7 plus the regime
/// comparison against day t-8).
inline constexpr std::size_t kFeatureWarmupDays = 8;

/**
 * Regressors for target day `t`, hour `h` (0-based). Only information from
 * day t-1 and earlier enters, except the fundamentals, which are the
 * day-ahead forecasts stored at (t, h).
 */
DesignRow build_row(const HourlyPanel& panel, const PcaModel& pca, std::size_t t, int h,
                    const MarketPreset& preset);

struct DesignMatrix {
  Eigen::MatrixXd x;
  Eigen::VectorXd y;
  std::vector<std::size_t> days;
};

/// One row per day in [first_day, end_day), targets y_{t,h}.
DesignMatrix build_matrix(const HourlyPanel& panel, const PcaModel& pca, int h, std::size_t first_day,
                          std::size_t end_day, const MarketPreset& preset);

}  // namespace confpi
