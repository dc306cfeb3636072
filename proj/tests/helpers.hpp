#pragma once

#include <functional>
#include <sstream>
#include <string>

#include "confpi/types.hpp"

namespace testing_helpers {

/// Panel of `days` consecutive days from `start` with price f(day, hour).
inline confpi::HourlyPanel make_panel(std::size_t days, const std::function<double(std::size_t, int)>& f,
                                      const std::string& start = "2013-01-07") {
  confpi::HourlyPanel p;
  p.market_tag = "test";
  const auto d0 = confpi::parse_date(start);
  p.prices.resize(static_cast<Eigen::Index>(days), confpi::kHoursPerDay);
  for (std::size_t d = 0; d < days; ++d) {
    p.dates.push_back(d0 + std::chrono::days(static_cast<long>(d)));
    for (int h = 0; h < confpi::kHoursPerDay; ++h) p.prices(static_cast<Eigen::Index>(d), h) = f(d, h);
  }
  return p;
}

/// CSV text `date,hour,price` for a panel-like generator.
inline std::string make_csv(std::size_t days, const std::function<double(std::size_t, int)>& f,
                            const std::string& start = "2013-01-07") {
  std::ostringstream os;
  os << "date,hour,price\n";
  const auto d0 = confpi::parse_date(start);
  for (std::size_t d = 0; d < days; ++d) {
    for (int h = 0; h < confpi::kHoursPerDay; ++h) {
      os << confpi::format_date(d0 + std::chrono::days(static_cast<long>(d))) << ',' << h + 1 << ',' << f(d, h)
         << '\n';
    }
  }
  return os.str();
}

}  // namespace testing_helpers
