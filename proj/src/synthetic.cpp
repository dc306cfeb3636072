#include "confpi/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>

#include "confpi/csv.hpp"
#include "confpi/errors.hpp"

namespace confpi {

HourlyPanel synthetic_panel(const SyntheticOptions& o) {
  CONFPI_REQUIRE(o.days > 0, "synthetic_panel: no days requested");
  std::mt19937_64 rng(o.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);

  HourlyPanel panel;
  panel.market_tag = "synthetic";
  const Date start = parse_date(o.start_date);
  const auto n = static_cast<Eigen::Index>(o.days);
  panel.prices.resize(n, kHoursPerDay);
  for (const auto& f : o.fundamentals) panel.exog[f] = DayMatrix(n, kHoursPerDay);

  double shock = 0.0;
  for (Eigen::Index d = 0; d < n; ++d) {
    const Date date = start + std::chrono::days(d);
    panel.dates.push_back(date);
    const unsigned wd = weekday_index(date);
    const bool weekend = wd == 0 || wd == 6;
    shock = o.day_persistence * shock + o.day_shock_sd * gauss(rng);
    for (int h = 0; h < kHoursPerDay; ++h) {
      // Two bumps: morning around 9h and evening around 19h.
      const double x = static_cast<double>(h);
      const double profile = 0.6 * std::exp(-0.5 * std::pow((x - 9.0) / 2.5, 2)) +
                             std::exp(-0.5 * std::pow((x - 19.0) / 2.0, 2)) - 0.3;
      double price = o.level + o.daily_amplitude * profile + shock - (weekend ? o.weekend_discount : 0.0);
      for (std::size_t f = 0; f < o.fundamentals.size(); ++f) {
        // Load-like series follow the daily profile; the first one also moves the price.
        const double value = 100.0 + 30.0 * profile + 5.0 * gauss(rng) - (weekend ? 10.0 : 0.0);
        panel.exog[o.fundamentals[f]](d, h) = value;
        price += (f == 0 ? 0.1 : 0.02) * (value - 100.0);
      }
      const double scale = o.heteroscedastic ? (0.5 + 1.5 * (profile + 0.3)) : 1.0;
      panel.prices(d, h) = price + o.noise_sd * scale * gauss(rng);
    }
  }
  return panel;
}

void write_panel_csv(std::ostream& out, const HourlyPanel& panel) {
  out << "date,hour,price";
  for (const auto& [name, m] : panel.exog) out << ',' << name;
  out << '\n';
  for (std::size_t d = 0; d < panel.num_days(); ++d) {
    const std::string date = format_date(panel.dates[d]);
    for (int h = 0; h < kHoursPerDay; ++h) {
      out << date << ',' << h + 1 << ',' << format_number(panel.price(d, h));
      for (const auto& [name, m] : panel.exog) out << ',' << format_number(m(static_cast<Eigen::Index>(d), h));
      out << '\n';
    }
  }
}

}  // namespace confpi
