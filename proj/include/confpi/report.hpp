#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "confpi/backtest.hpp"
#include "confpi/evaluate.hpp"

namespace confpi {

/// `date,hour,model,alpha,lower,upper,center,realized,hit`, hour written 1..24.
void write_ledger_csv(std::ostream& out, const RunLedger& ledger);

/// Reads a ledger CSV back. Day indices count calendar days from the earliest
/// date in the file; unbounded intervals come back with infinite bounds.
RunLedger read_ledger_csv(std::istream& in, const std::string& market = "unknown");

/// `model,market,hour,alpha,n,coverage,mean_width,mean_winkler,mean_pinball,unbounded`;
/// hour is 1..24, or "all" for the aggregate row.
void write_scores_csv(std::ostream& out, const ScoreTable& table);

/// `model,percentile,deviation,interpolated`.
void write_deviation_csv(std::ostream& out, const ScoreTable& table);

void write_christoffersen_csv(std::ostream& out, const std::vector<ChristoffersenRow>& rows);

void write_ablation_nodes_csv(std::ostream& out, const AblationResult& result);
void write_ablation_edges_csv(std::ostream& out, const AblationResult& result);

/// `day,hour,model,reason` for every recorded gap.
void write_gaps_csv(std::ostream& out, const RunLedger& ledger, const std::vector<Date>& dates);

enum class PlotKind { winkler_hourly, pinball_percentile, coverage_dev, lr_hourly };

/// Throws std::invalid_argument for an unknown name.
PlotKind plot_kind_from_string(std::string_view name);

/// Largest LR value shown in lr_hourly plot data.
inline constexpr double kPlotLrCap = 20.0;

/// Long-format plot table. The LR cap applies to lr_hourly only.
void write_plotdata(std::ostream& out, const RunLedger& ledger, PlotKind kind);

/// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view bytes);
std::string sha256_file(const std::string& path);

struct RunManifest {
  std::string command;
  std::string config;  // BacktestConfig::canonical()
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version;
  std::map<std::string, std::string> input_digests;   // path -> sha256
  std::map<std::string, std::string> output_digests;  // file name -> sha256
  std::size_t entries = 0;
  std::size_t gaps = 0;
  std::vector<std::string> warnings;
};

/// Pretty-printed JSON with sorted keys (byte-stable for equal content).
std::string manifest_json(const RunManifest& manifest);

}  // namespace confpi
