#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace confpi {

/// Market-specific layout of the regression: which fundamental series enter
/// the design, plus the defaults used for backtests on that market.
struct MarketPreset {
  std::string name;
  std::vector<std::string> fundamentals;
  int knn_k = 50;
  int parameterization_days = 330;
  int out_of_sample_days = 182;

  static MarketPreset nordpool();
  static MarketPreset gefcom();
  static MarketPreset epex();
  /// Throws std::invalid_argument for an unknown name.
  static MarketPreset from_name(std::string_view name);
};

inline MarketPreset MarketPreset::nordpool() { return {"nordpool", {}, 50, 330, 182}; }
inline MarketPreset MarketPreset::gefcom() { return {"gefcom", {"zonal_load", "system_load"}, 50, 330, 365}; }
inline MarketPreset MarketPreset::epex() { return {"epex", {"load", "wind"}, 200, 330, 831}; }

inline MarketPreset MarketPreset::from_name(std::string_view name) {
  if (name == "nordpool") return nordpool();
  if (name == "gefcom") return gefcom();
  if (name == "epex") return epex();
  throw std::invalid_argument("unknown market preset '" + std::string(name) + "'");
}

}  // namespace confpi
