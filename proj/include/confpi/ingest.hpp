#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "confpi/market.hpp"
#include "confpi/types.hpp"

namespace confpi {

struct IngestOptions {
  /// Replace Tukey outliers by the imputer (off: outliers are only reported).
  bool remove_outliers = false;
  /// Any column with a larger missing share after DST averaging is fatal.
  double max_missing_fraction = 0.10;
};

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t duplicate_hours_averaged = 0;
  std::size_t cells_imputed = 0;
  std::size_t outliers_replaced = 0;
};

/**
 * Reads `date,hour,price[,load][,wind][,zonal_load][,system_load][,dst]`.
 *
 * Duplicate (date, hour) observations are averaged; absent cells and empty
 * or "NA" fields are filled by impute_missing(). Throws SchemaError for an
 * unreadable layout (message carries the line number) and ValidationError
 * when a column is missing more than `max_missing_fraction` of its cells.
 */
HourlyPanel load_panel(std::istream& in, const MarketPreset& preset,
                       const IngestOptions& options = {}, IngestReport* report = nullptr);
HourlyPanel load_panel(const std::string& path, const MarketPreset& preset,
                       const IngestOptions& options = {}, IngestReport* report = nullptr);

/**
 * Fills NaN cells of a day x 24 matrix in place. Per hour-of-day series:
 * linear interpolation between the nearest observed neighbours when both lie
 * within 7 days, otherwise the median of that hour over the trailing 28 days
 * (leading 28 days when no trailing observation exists). Returns the number
 * of filled cells; throws ValidationError if a cell has no usable donor.
 */
std::size_t impute_missing(DayMatrix& matrix);

struct TukeyFences {
  double q1 = 0.0;
  double q3 = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct OutlierFlag {
  std::size_t day = 0;
  int hour = 0;
  double value = 0.0;
};

struct OutlierReport {
  std::array<TukeyFences, kHoursPerDay> fences{};
  std::vector<OutlierFlag> flags;
};

/// Q1 - 1.5 IQR and Q3 + 1.5 IQR with type-7 quartiles.
TukeyFences tukey_fences(std::span<const double> values);

/// Flags cells strictly outside their hour's fences. The panel is not modified.
OutlierReport tukey_outliers(const HourlyPanel& panel);

/// Copy of `panel` with flagged price cells replaced through impute_missing().
HourlyPanel replace_outliers(const HourlyPanel& panel, const OutlierReport& report);

struct SummaryStats {
  std::size_t count = 0;
  double mean = 0.0;
  double sd = 0.0;
  double q1 = 0.0;
  double q3 = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Statistics over every day x hour price cell (sd with n-1, quartiles type 7).
SummaryStats summary_stats(const HourlyPanel& panel);

}  // namespace confpi
