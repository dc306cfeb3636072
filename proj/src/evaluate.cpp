#include "confpi/evaluate.hpp"

#include <cmath>

#include "confpi/errors.hpp"

namespace confpi {
namespace {

// n * log(p) with 0 log 0 = 0.
double xlogp(double n, double p, bool& degenerate) {
  if (n == 0.0) {
    if (p <= 0.0 || p >= 1.0) degenerate = true;
    return 0.0;
  }
  if (p <= 0.0) {
    degenerate = true;
    return -std::numeric_limits<double>::infinity();
  }
  return n * std::log(p);
}

}  // namespace

double winkler(double y, double lower, double upper, double alpha) {
  CONFPI_REQUIRE(lower <= upper, "winkler: lower > upper");
  CONFPI_REQUIRE(alpha > 0.0 && alpha < 1.0, "winkler: alpha must lie in (0,1)");
  const double width = upper - lower;
  if (y < lower) return width + (2.0 / alpha) * (lower - y);
  if (y > upper) return width + (2.0 / alpha) * (y - upper);
  return width;
}

double pinball(double q, double y, double tau) {
  CONFPI_REQUIRE(tau > 0.0 && tau < 1.0, "pinball: tau must lie in (0,1)");
  return y < q ? (1.0 - tau) * (q - y) : tau * (y - q);
}

double interval_pinball(const IntervalForecast& f, double y) {
  return 0.5 * (pinball(f.lower, y, f.alpha / 2.0) + pinball(f.upper, y, 1.0 - f.alpha / 2.0));
}

double coverage(std::span<const std::uint8_t> hits) {
  CONFPI_REQUIRE(!hits.empty(), "coverage: empty hit series");
  std::size_t ones = 0;
  for (const auto h : hits) ones += h != 0 ? 1 : 0;
  return static_cast<double>(ones) / static_cast<double>(hits.size());
}

double chi2_sf(double x, int df) {
  if (x <= 0.0) return 1.0;
  if (df == 1) return std::erfc(std::sqrt(x / 2.0));
  if (df == 2) return std::exp(-x / 2.0);
  throw ContractViolation("chi2_sf: only df 1 and 2 are supported");
}

ChristoffersenResult christoffersen(std::span<const std::uint8_t> hits, double p) {
  CONFPI_REQUIRE(hits.size() >= 30, "christoffersen: needs at least 30 observations");
  CONFPI_REQUIRE(p > 0.0 && p < 1.0, "christoffersen: p must lie in (0,1)");
  ChristoffersenResult r;
  r.n = hits.size();
  for (std::size_t i = 0; i < hits.size(); ++i) {
    const bool cur = hits[i] != 0;
    (cur ? r.n1 : r.n0) += 1;
    if (i == 0) continue;
    const bool prev = hits[i - 1] != 0;
    if (!prev && !cur) ++r.n00;
    if (!prev && cur) ++r.n01;
    if (prev && !cur) ++r.n10;
    if (prev && cur) ++r.n11;
  }
  bool degenerate = false;
  const double n0 = static_cast<double>(r.n0), n1 = static_cast<double>(r.n1);
  const double pi_hat = n1 / static_cast<double>(r.n);
  const double ll_null = xlogp(n1, p, degenerate) + xlogp(n0, 1.0 - p, degenerate);
  const double ll_alt = xlogp(n1, pi_hat, degenerate) + xlogp(n0, 1.0 - pi_hat, degenerate);
  r.lr_uc = -2.0 * (ll_null - ll_alt);

  const double n00 = static_cast<double>(r.n00), n01 = static_cast<double>(r.n01);
  const double n10 = static_cast<double>(r.n10), n11 = static_cast<double>(r.n11);
  const double pi01 = n00 + n01 > 0 ? n01 / (n00 + n01) : 0.0;
  const double pi11 = n10 + n11 > 0 ? n11 / (n10 + n11) : 0.0;
  const double pi2 = (n01 + n11) / (n00 + n01 + n10 + n11);
  const double ll_ind_null = xlogp(n00 + n10, 1.0 - pi2, degenerate) + xlogp(n01 + n11, pi2, degenerate);
  const double ll_markov = xlogp(n00, 1.0 - pi01, degenerate) + xlogp(n01, pi01, degenerate) +
                           xlogp(n10, 1.0 - pi11, degenerate) + xlogp(n11, pi11, degenerate);
  r.lr_ind = -2.0 * (ll_ind_null - ll_markov);
  r.lr_cc = r.lr_uc + r.lr_ind;
  r.p_uc = chi2_sf(r.lr_uc, 1);
  r.p_ind = chi2_sf(r.lr_ind, 1);
  r.p_cc = chi2_sf(r.lr_cc, 2);
  r.degenerate = degenerate || r.n00 == 0 || r.n01 == 0 || r.n10 == 0 || r.n11 == 0;
  return r;
}

std::vector<int> percentile_grid() {
  std::vector<int> out;
  for (int p = 5; p <= 95; p += 5) {
    if (p != 50) out.push_back(p);
  }
  return out;
}

std::vector<PercentileDeviation> coverage_deviation_curve(const std::map<int, std::vector<double>>& quantiles,
                                                          std::span<const double> realized) {
  CONFPI_REQUIRE(!realized.empty(), "coverage_deviation_curve: no realizations");
  std::vector<PercentileDeviation> out;
  for (const int p : percentile_grid()) {
    const auto it = quantiles.find(p);
    CONFPI_REQUIRE(it != quantiles.end(), "coverage_deviation_curve: missing percentile " + std::to_string(p));
    CONFPI_REQUIRE(it->second.size() == realized.size(), "coverage_deviation_curve: length mismatch");
    std::size_t below = 0;
    for (std::size_t i = 0; i < realized.size(); ++i) below += realized[i] < it->second[i] ? 1 : 0;
    const double freq = static_cast<double>(below) / static_cast<double>(realized.size());
    out.push_back({p, freq - p / 100.0, false});
  }
  // 45 and 55 sit at positions 8 and 9.
  const PercentileDeviation mid{50, 0.5 * (out[8].deviation + out[9].deviation), true};
  out.insert(out.begin() + 9, mid);
  return out;
}

ScoreRow score_intervals(std::span<const IntervalForecast> forecasts, std::span<const double> realized) {
  CONFPI_REQUIRE(forecasts.size() == realized.size(), "score_intervals: length mismatch");
  CONFPI_REQUIRE(!forecasts.empty(), "score_intervals: nothing to score");
  ScoreRow row;
  row.alpha = forecasts.front().alpha;
  row.n = forecasts.size();
  std::size_t hits = 0, bounded = 0;
  double width = 0.0, wink = 0.0, pin = 0.0;
  for (std::size_t i = 0; i < forecasts.size(); ++i) {
    const auto& f = forecasts[i];
    hits += f.covers(realized[i]) ? 1 : 0;
    if (f.unbounded) {
      ++row.unbounded;
      continue;
    }
    ++bounded;
    width += f.width();
    wink += winkler(realized[i], f.lower, f.upper, f.alpha);
    pin += interval_pinball(f, realized[i]);
  }
  row.coverage = static_cast<double>(hits) / static_cast<double>(row.n);
  if (bounded > 0) {
    const double b = static_cast<double>(bounded);
    row.mean_width = width / b;
    row.mean_winkler = wink / b;
    row.mean_pinball = pin / b;
  } else {
    row.mean_width = row.mean_winkler = row.mean_pinball = std::numeric_limits<double>::infinity();
  }
  return row;
}

}  // namespace confpi
