#include "confpi/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>

#include "confpi/csv.hpp"
#include "confpi/errors.hpp"
#include "confpi/stats.hpp"

namespace confpi {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
const std::vector<std::string> kKnownExog{"load", "wind", "zonal_load", "system_load"};

struct CellAccumulator {
  double sum = 0.0;
  int observed = 0;
  int rows = 0;
};

std::optional<double> parse_field(const std::string& text, std::size_t line, const std::string& column) {
  if (text.empty() || text == "NA" || text == "na" || text == "NaN") return std::nullopt;
  auto v = parse_number(text);
  if (!v || !std::isfinite(*v)) {
    throw SchemaError("line " + std::to_string(line) + ": cannot parse " + column + " value '" + text + "'");
  }
  return v;
}

}  // namespace

HourlyPanel load_panel(std::istream& in, const MarketPreset& preset, const IngestOptions& options,
                       IngestReport* report) {
  const CsvTable table = parse_csv(in);
  for (const char* required : {"date", "hour", "price"}) {
    if (!table.column(required)) throw SchemaError(std::string("missing required column '") + required + "'");
  }
  for (const auto& f : preset.fundamentals) {
    if (!table.column(f)) throw SchemaError("missing column '" + f + "' required by market preset " + preset.name);
  }
  const std::size_t c_date = *table.column("date");
  const std::size_t c_hour = *table.column("hour");
  const std::size_t c_price = *table.column("price");
  const auto c_dst = table.column("dst");

  std::vector<std::pair<std::string, std::size_t>> series{{"price", c_price}};
  for (const auto& name : kKnownExog) {
    if (auto c = table.column(name)) series.emplace_back(name, *c);
  }

  // (date, hour) -> accumulator per series
  std::map<std::pair<Date, int>, std::vector<CellAccumulator>> cells;
  IngestReport local;
  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::size_t line = table.line_numbers[r];
    Date date;
    try {
      date = parse_date(row[c_date]);
    } catch (const std::invalid_argument&) {
      throw SchemaError("line " + std::to_string(line) + ": invalid date '" + row[c_date] + "'");
    }
    const auto hour_value = parse_number(row[c_hour]);
    if (!hour_value || *hour_value != std::floor(*hour_value) || *hour_value < 1 || *hour_value > 24) {
      throw SchemaError("line " + std::to_string(line) + ": hour must be an integer in 1..24, got '" +
                        row[c_hour] + "'");
    }
    std::string dst = c_dst ? row[*c_dst] : std::string("none");
    if (dst.empty()) dst = "none";
    if (dst != "none" && dst != "dup_a" && dst != "dup_b" && dst != "missing") {
      throw SchemaError("line " + std::to_string(line) + ": unknown dst marker '" + dst + "'");
    }
    auto& acc = cells[{date, static_cast<int>(*hour_value) - 1}];
    acc.resize(series.size());
    ++local.rows_read;
    for (std::size_t s = 0; s < series.size(); ++s) {
      ++acc[s].rows;
      if (dst == "missing") continue;
      if (auto v = parse_field(row[series[s].second], line, series[s].first)) {
        acc[s].sum += *v;
        ++acc[s].observed;
      }
    }
  }
  if (cells.empty()) throw SchemaError("no data rows");

  const Date first = cells.begin()->first.first;
  const Date last = cells.rbegin()->first.first;
  const auto n_days = static_cast<Eigen::Index>((last - first).count() + 1);

  std::vector<DayMatrix> mats(series.size(), DayMatrix::Constant(n_days, kHoursPerDay, kNaN));
  for (const auto& [key, acc] : cells) {
    const auto d = static_cast<Eigen::Index>((key.first - first).count());
    if (acc.front().rows > 1) ++local.duplicate_hours_averaged;
    for (std::size_t s = 0; s < series.size(); ++s) {
      if (acc[s].observed > 0) mats[s](d, key.second) = acc[s].sum / acc[s].observed;
    }
  }

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto missing = static_cast<double>(mats[s].array().isNaN().count());
    const double share = missing / static_cast<double>(mats[s].size());
    if (share > options.max_missing_fraction) {
      throw ValidationError("column '" + series[s].first + "' is missing " +
                            std::to_string(static_cast<int>(std::lround(share * 100))) +
                            "% of its cells; imputation would be unreliable");
    }
    local.cells_imputed += impute_missing(mats[s]);
  }

  HourlyPanel panel;
  panel.market_tag = preset.name;
  panel.dates.reserve(static_cast<std::size_t>(n_days));
  for (Eigen::Index d = 0; d < n_days; ++d) panel.dates.push_back(first + std::chrono::days{d});
  panel.prices = std::move(mats[0]);
  for (std::size_t s = 1; s < series.size(); ++s) panel.exog[series[s].first] = std::move(mats[s]);

  if (options.remove_outliers) {
    const auto outliers = tukey_outliers(panel);
    local.outliers_replaced = outliers.flags.size();
    panel = replace_outliers(panel, outliers);
  }

  if (auto violations = validate_panel(panel); !violations.empty()) {
    throw ValidationError("panel invalid after ingestion: " + violations.front().message);
  }
  if (report) *report = local;
  return panel;
}

HourlyPanel load_panel(const std::string& path, const MarketPreset& preset, const IngestOptions& options,
                       IngestReport* report) {
  std::ifstream in(path);
  if (!in) throw SchemaError("cannot open '" + path + "'");
  return load_panel(in, preset, options, report);
}

std::size_t impute_missing(DayMatrix& matrix) {
  const DayMatrix observed = matrix;
  const Eigen::Index n = matrix.rows();
  std::size_t filled = 0;
  for (Eigen::Index h = 0; h < matrix.cols(); ++h) {
    for (Eigen::Index t = 0; t < n; ++t) {
      if (!std::isnan(observed(t, h))) continue;
      Eigen::Index prev = t - 1;
      while (prev >= 0 && std::isnan(observed(prev, h))) --prev;
      Eigen::Index next = t + 1;
      while (next < n && std::isnan(observed(next, h))) ++next;
      if (prev >= 0 && next < n && t - prev <= 7 && next - t <= 7) {
        const double w = static_cast<double>(t - prev) / static_cast<double>(next - prev);
        matrix(t, h) = observed(prev, h) + w * (observed(next, h) - observed(prev, h));
        ++filled;
        continue;
      }
      std::vector<double> donors;
      for (Eigen::Index k = std::max<Eigen::Index>(0, t - 28); k < t; ++k) {
        if (!std::isnan(observed(k, h))) donors.push_back(observed(k, h));
      }
      if (donors.empty()) {
        for (Eigen::Index k = t + 1; k < std::min(n, t + 29); ++k) {
          if (!std::isnan(observed(k, h))) donors.push_back(observed(k, h));
        }
      }
      if (donors.empty()) {
        throw ValidationError("cannot impute cell (" + std::to_string(t) + "," + std::to_string(h) +
                              "): no observation of that hour within 28 days");
      }
      matrix(t, h) = median(donors);
      ++filled;
    }
  }
  return filled;
}

TukeyFences tukey_fences(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  TukeyFences f;
  f.q1 = quantile_type7_sorted(sorted, 0.25);
  f.q3 = quantile_type7_sorted(sorted, 0.75);
  const double iqr = f.q3 - f.q1;
  f.lower = f.q1 - 1.5 * iqr;
  f.upper = f.q3 + 1.5 * iqr;
  return f;
}

OutlierReport tukey_outliers(const HourlyPanel& panel) {
  OutlierReport report;
  const Eigen::Index n = panel.prices.rows();
  std::vector<double> column(static_cast<std::size_t>(n));
  for (int h = 0; h < kHoursPerDay; ++h) {
    for (Eigen::Index d = 0; d < n; ++d) column[static_cast<std::size_t>(d)] = panel.prices(d, h);
    const auto fences = tukey_fences(column);
    report.fences[static_cast<std::size_t>(h)] = fences;
    for (Eigen::Index d = 0; d < n; ++d) {
      const double v = panel.prices(d, h);
      if (v < fences.lower || v > fences.upper) report.flags.push_back({static_cast<std::size_t>(d), h, v});
    }
  }
  std::sort(report.flags.begin(), report.flags.end(),
            [](const OutlierFlag& a, const OutlierFlag& b) { return std::tie(a.day, a.hour) < std::tie(b.day, b.hour); });
  return report;
}

HourlyPanel replace_outliers(const HourlyPanel& panel, const OutlierReport& report) {
  HourlyPanel out = panel;
  for (const auto& f : report.flags) out.prices(static_cast<Eigen::Index>(f.day), f.hour) = kNaN;
  impute_missing(out.prices);
  return out;
}

SummaryStats summary_stats(const HourlyPanel& panel) {
  std::vector<double> all(panel.prices.data(), panel.prices.data() + panel.prices.size());
  CONFPI_REQUIRE(!all.empty(), "summary of an empty panel");
  std::sort(all.begin(), all.end());
  SummaryStats s;
  s.count = all.size();
  s.mean = mean(all);
  s.sd = sample_sd(all);
  s.q1 = quantile_type7_sorted(all, 0.25);
  s.q3 = quantile_type7_sorted(all, 0.75);
  s.min = all.front();
  s.max = all.back();
  return s;
}

}  // namespace confpi
