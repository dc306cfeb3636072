#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "confpi/types.hpp"

namespace confpi {

/// Generator settings for a synthetic hourly market.
struct SyntheticOptions {
  std::size_t days = 100;
  std::string start_date = "2013-01-07";
  std::uint64_t seed = 1;
  double level = 40.0;
  double daily_amplitude = 8.0;    // morning/evening peak shape
  double weekend_discount = 6.0;   // lower prices on Saturday and Sunday
  double day_persistence = 0.7;    // AR(1) coefficient of the daily level shock
  double day_shock_sd = 3.0;
  double noise_sd = 2.0;
  /// Scale hourly noise with the hour's load profile instead of keeping it constant.
  bool heteroscedastic = false;
  /// Extra exogenous series (for instance "load", "wind"); prices load on them.
  std::vector<std::string> fundamentals;
};

HourlyPanel synthetic_panel(const SyntheticOptions& options);

/// `date,hour,price[,fundamentals...]` with hours 1..24, readable by load_panel().
void write_panel_csv(std::ostream& out, const HourlyPanel& panel);

}  // namespace confpi
