#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "confpi/conformal.hpp"
#include "confpi/evaluate.hpp"
#include "confpi/forecasters.hpp"
#include "confpi/market.hpp"
#include "confpi/types.hpp"

namespace confpi {

enum class IntervalMethod { empirical, icp, ncp, qra };

/// One roster entry: a forecaster paired with an interval construction.
struct ModelSpec {
  ForecasterKind kind = ForecasterKind::lasso;
  IntervalMethod method = IntervalMethod::empirical;

  /// Ledger tag, e.g. "Lasso_NCP", "Naive_E", "QRA".
  std::string tag() const;
  /// Accepts the lower-case ids naive_e, lasso_e, lasso_icp, lasso_ncp, ..., qra.
  static ModelSpec parse(std::string_view id);
  /// Naive_E, {Lasso,KNN,SVM}_{E,NCP} and QRA.
  static std::vector<ModelSpec> full_roster();
  friend bool operator==(const ModelSpec&, const ModelSpec&) = default;
};

struct BacktestConfig {
  int parameterization_days = 330;
  std::vector<ModelSpec> roster = ModelSpec::full_roster();
  std::vector<double> alphas = {0.5, 0.1};
  /// Adds alpha 0.1, 0.2, ..., 0.9 so every percentile 5..95 is forecast.
  bool percentile_grid = false;
  std::uint64_t base_seed = 1;
  MarketPreset preset = MarketPreset::nordpool();
  std::optional<int> knn_k;  // overrides the preset
  /// Share of the window used for training in split-based methods.
  double train_fraction = 0.75;
  int qra_window_days = 56;
  /// Fewest rows a point model may be fitted on when producing QRA inputs.
  int qra_min_fit_rows = 20;
  /// 0 = hardware concurrency.
  int threads = 0;

  /// Every alpha the run forecasts, sorted descending, duplicates removed.
  std::vector<double> effective_alphas() const;
  /// Throws ContractViolation for a broken invariant.
  void validate() const;
  /// Canonical text echo of every field (used for hashing and manifests).
  std::string canonical() const;
  /// FNV-1a 64 of canonical().
  std::uint64_t hash() const;
};

struct LedgerEntry {
  IntervalForecast forecast;
  Date date{};
  double realized = 0.0;
  bool hit = false;
  /// Latest panel day whose prices entered this forecast.
  std::size_t latest_input_day = 0;
  /// Forecaster kinds of the point and error models (same kind for NCP).
  std::optional<ForecasterKind> point_kind;
  std::optional<ForecasterKind> error_kind;
};

struct Gap {
  std::size_t day = 0;
  int hour = 0;
  std::string model;
  std::string reason;
};

struct RunLedger {
  std::vector<LedgerEntry> entries;  // ordered by day, hour, roster, alpha
  std::vector<Gap> gaps;
  std::vector<std::string> warnings;
  std::string market;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  double wall_clock_seconds = 0.0;
  std::size_t first_forecast_day = 0;
  std::size_t forecast_days = 0;
};

/// Days the rolling scheme emits: panel days - parameterization days - 8.
std::size_t forecast_day_count(std::size_t panel_days, int parameterization_days);

/**
 * Rolling daily backtest. Forecast day d uses the window [d - P, d - 1] of
 * target days; every model is refitted per day and hour. Split-based
 * methods draw one train/calibration split per day from derive_seed(seed, d).
 * A failing fit records a Gap and the run continues.
 */
RunLedger run_backtest(const HourlyPanel& panel, const BacktestConfig& config);

/// Entries whose inputs reach the target day. Empty for a sound ledger.
std::vector<std::size_t> audit_look_ahead(const RunLedger& ledger);

/// Scores per (model, hour, alpha) plus all-hour aggregates (hour = -1).
ScoreTable score_ledger(const RunLedger& ledger);

struct ChristoffersenRow {
  std::string model;
  int hour = 0;
  double alpha = 0.1;
  ChristoffersenResult result;
};

/// Hourly Christoffersen tests for every (model, alpha) with >= 30 days.
std::vector<ChristoffersenRow> christoffersen_table(const RunLedger& ledger);

struct AblationNode {
  LatticeVariant variant;
  ForecasterKind kind = ForecasterKind::lasso;
  double alpha = 0.1;
  ScoreRow score;
};

/// One extension switched on along a cube edge; deltas are (to - from).
struct AblationEdge {
  ForecasterKind kind = ForecasterKind::lasso;
  double alpha = 0.1;
  LatticeVariant from;
  LatticeVariant to;
  std::string extension;  // "symmetry", "sampling" or "normalization"
  double d_winkler = 0.0;
  double d_pinball = 0.0;
  double d_width = 0.0;
  /// Standard error of the mean paired Winkler difference.
  double se_winkler = 0.0;
};

struct AblationResult {
  std::vector<AblationNode> nodes;  // 8 nodes x 3 forecasters x alphas
  std::vector<AblationEdge> edges;  // 12 edges x 3 forecasters x alphas
  RunLedger ledger;                 // model tags "<Forecaster>|<node tag>"
};

/// The symmetry / sampling / normalization lattice for Lasso, KNN and SVM.
AblationResult run_ablation(const HourlyPanel& panel, const BacktestConfig& config);

}  // namespace confpi
