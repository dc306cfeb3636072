#include "confpi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "confpi/errors.hpp"

namespace confpi {

double quantile_type7_sorted(std::span<const double> sorted, double p) {
  CONFPI_REQUIRE(!sorted.empty(), "quantile of an empty sample");
  CONFPI_REQUIRE(p >= 0.0 && p <= 1.0, "quantile level must lie in [0,1]");
  const double h = static_cast<double>(sorted.size() - 1) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = h - static_cast<double>(lo);
  if (frac == 0.0) return sorted[lo];
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double quantile_type7(std::span<const double> values, double p) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return quantile_type7_sorted(sorted, p);
}

double median(std::span<const double> values) { return quantile_type7(values, 0.5); }

double mean(std::span<const double> values) {
  CONFPI_REQUIRE(!values.empty(), "mean of an empty sample");
  return std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
}

double sample_sd(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double ss = 0.0;
  for (double v : values) ss += (v - m) * (v - m);
  return std::sqrt(ss / static_cast<double>(values.size() - 1));
}

}  // namespace confpi
