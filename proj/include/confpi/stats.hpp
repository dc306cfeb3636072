#pragma once

#include <span>
#include <vector>

namespace confpi {

/// Sample quantile by linear interpolation of order statistics (Hyndman-Fan type 7).
/// `p` in [0,1]; input need not be sorted. Throws ContractViolation on empty input.
double quantile_type7(std::span<const double> values, double p);

/// Same as quantile_type7 but assumes `sorted` is ascending.
double quantile_type7_sorted(std::span<const double> sorted, double p);

double median(std::span<const double> values);
double mean(std::span<const double> values);

/// Sample standard deviation with n-1 denominator; 0 for fewer than two values.
double sample_sd(std::span<const double> values);

}  // namespace confpi
