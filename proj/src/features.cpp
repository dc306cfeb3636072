#include "confpi/features.hpp"

#include "confpi/errors.hpp"

namespace confpi {

DesignRow build_row(const HourlyPanel& panel, const PcaModel& pca, std::size_t t, int h,
                    const MarketPreset& preset) {
  CONFPI_REQUIRE(t >= kFeatureWarmupDays, "design row needs t >= 8");
  CONFPI_REQUIRE(t < panel.num_days(), "design row day outside the panel");
  CONFPI_REQUIRE(h >= 0 && h < kHoursPerDay, "hour index outside 0..23");
  const auto& p = panel.prices;
  const auto yesterday = static_cast<Eigen::Index>(t - 1);

  DesignRow row;
  row.ar1 = p(yesterday, h);
  row.ar2 = p(yesterday - 1, h);
  row.ar7 = p(static_cast<Eigen::Index>(t - 7), h);
  row.y_min_prev = p.row(yesterday).minCoeff();
  row.y_max_prev = p.row(yesterday).maxCoeff();

  switch (weekday_index(panel.dates[t])) {
    case 6: row.d_sat = 1.0; break;
    case 0: row.d_sun = 1.0; break;
    case 1: row.d_mon = 1.0; break;
    default: break;
  }

  const Eigen::Vector3d scores = pca_project(pca, panel.day_prices(t - 1));
  row.pca1 = scores(0);
  row.pca2 = scores(1);
  row.pca3 = scores(2);
  row.y_h24_prev = p(yesterday, kHoursPerDay - 1);
  row.delta = p.row(yesterday).mean() > p.row(static_cast<Eigen::Index>(t - 8)).mean() ? 1.0 : 0.0;

  row.fundamentals.reserve(preset.fundamentals.size());
  for (const auto& name : preset.fundamentals) {
    const auto it = panel.exog.find(name);
    if (it == panel.exog.end()) {
      throw ValidationError("panel lacks fundamental series '" + name + "' required by preset " + preset.name);
    }
    row.fundamentals.push_back(it->second(static_cast<Eigen::Index>(t), h));
  }
  return row;
}

DesignMatrix build_matrix(const HourlyPanel& panel, const PcaModel& pca, int h, std::size_t first_day,
                          std::size_t end_day, const MarketPreset& preset) {
  CONFPI_REQUIRE(first_day >= kFeatureWarmupDays && first_day <= end_day && end_day <= panel.num_days(),
                 "design matrix day range outside [8, number of days]");
  const auto rows = static_cast<Eigen::Index>(end_day - first_day);
  DesignMatrix m;
  m.x.resize(rows, DesignRow::kBaseFields + static_cast<Eigen::Index>(preset.fundamentals.size()));
  m.y.resize(rows);
  m.days.reserve(static_cast<std::size_t>(rows));
  for (std::size_t t = first_day; t < end_day; ++t) {
    const auto r = static_cast<Eigen::Index>(t - first_day);
    m.x.row(r) = build_row(panel, pca, t, h, preset).to_vector().transpose();
    m.y(r) = panel.price(t, h);
    m.days.push_back(t);
  }
  return m;
}

}  // namespace confpi
