#pragma once

#include <map>
#include <span>
#include <string>
#include <vector>

#include "confpi/types.hpp"

namespace confpi {

/// Interval width plus a (2/alpha)-scaled penalty for a miss.
double winkler(double y, double lower, double upper, double alpha);

/// (1 - tau)(q - y) when y < q, tau (y - q) otherwise.
double pinball(double q, double y, double tau);

/// Mean pinball loss of the two bounds at alpha/2 and 1 - alpha/2.
double interval_pinball(const IntervalForecast& f, double y);

/// Mean of the hit indicators.
double coverage(std::span<const std::uint8_t> hits);

struct ChristoffersenResult {
  std::size_t n = 0;
  std::size_t n0 = 0, n1 = 0;
  std::size_t n00 = 0, n01 = 0, n10 = 0, n11 = 0;
  double lr_uc = 0.0;
  double lr_ind = 0.0;
  double lr_cc = 0.0;
  double p_uc = 1.0;
  double p_ind = 1.0;
  double p_cc = 1.0;
  /// Some likelihood term was evaluated as 0 log 0 := 0.
  bool degenerate = false;
};

/// Unconditional coverage, independence and conditional coverage tests for
/// one hour's hit series, with `p` the nominal hit probability (1 - alpha).
ChristoffersenResult christoffersen(std::span<const std::uint8_t> hits, double p);

/// Upper tail of the chi-square distribution with 1 or 2 degrees of freedom.
double chi2_sf(double x, int df);

struct PercentileDeviation {
  int percentile = 0;
  double deviation = 0.0;
  bool interpolated = false;
};

/**
 * Empirical frequency of y below each percentile forecast minus p/100.
 * `quantiles` maps percentile (5..95 step 5, 50 excluded) to the forecast
 * series aligned with `realized`. The 50th slot is the mean of its neighbours.
 */
std::vector<PercentileDeviation> coverage_deviation_curve(const std::map<int, std::vector<double>>& quantiles,
                                                          std::span<const double> realized);

/// 5, 10, ..., 95 without 50.
std::vector<int> percentile_grid();

struct ScoreRow {
  std::string model;
  std::string market;
  int hour = -1;  // 0..23; -1 aggregates all hours
  double alpha = 0.1;
  std::size_t n = 0;
  std::size_t unbounded = 0;
  double coverage = 0.0;
  double mean_width = 0.0;
  double mean_winkler = 0.0;
  double mean_pinball = 0.0;
};

/// Score of a batch of intervals. Unbounded intervals count as hits but are
/// left out of the width, Winkler and pinball means.
ScoreRow score_intervals(std::span<const IntervalForecast> forecasts, std::span<const double> realized);

struct ScoreTable {
  std::vector<ScoreRow> rows;
  /// Per model: percentile deviations, present when the ledger held the full grid.
  std::map<std::string, std::vector<PercentileDeviation>> deviations;
};

}  // namespace confpi
