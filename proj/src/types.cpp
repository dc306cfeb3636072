#include "confpi/types.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <stdexcept>

namespace confpi {

using namespace std::chrono;

Date parse_date(std::string_view text) {
  int y = 0;
  unsigned m = 0;
  unsigned d = 0;
  auto bad = [&] { return std::invalid_argument("invalid ISO date '" + std::string(text) + "'"); };
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') throw bad();
  auto parse = [&](std::string_view s, auto& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) throw bad();
  };
  parse(text.substr(0, 4), y);
  parse(text.substr(5, 2), m);
  parse(text.substr(8, 2), d);
  year_month_day ymd{year{y}, month{m}, day{d}};
  if (!ymd.ok()) throw bad();
  return sys_days{ymd};
}

std::string format_date(Date date) {
  const year_month_day ymd{date};
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
  return buf;
}

unsigned weekday_index(Date date) { return weekday{date}.c_encoding(); }

std::vector<PanelViolation> validate_panel(const HourlyPanel& panel) {
  std::vector<PanelViolation> out;
  const auto n = static_cast<Eigen::Index>(panel.dates.size());
  if (panel.prices.rows() != n || panel.prices.cols() != kHoursPerDay) {
    out.push_back({"price matrix shape " + std::to_string(panel.prices.rows()) + "x" +
                       std::to_string(panel.prices.cols()) + " does not match " +
                       std::to_string(n) + "x24",
                   {}, {}});
  }
  for (const auto& [name, m] : panel.exog) {
    if (m.rows() != n || m.cols() != kHoursPerDay) {
      out.push_back({"exogenous series '" + name + "' has mismatched shape", {}, {}});
    }
  }
  for (std::size_t i = 1; i < panel.dates.size(); ++i) {
    const auto step = (panel.dates[i] - panel.dates[i - 1]).count();
    if (step <= 0) {
      out.push_back({"dates not strictly increasing at " + format_date(panel.dates[i]), i, {}});
    } else if (step > 1) {
      out.push_back({"date gap between " + format_date(panel.dates[i - 1]) + " and " +
                         format_date(panel.dates[i]),
                     i, {}});
    }
  }
  auto scan = [&](const DayMatrix& m, const std::string& label) {
    for (Eigen::Index d = 0; d < m.rows(); ++d) {
      for (Eigen::Index h = 0; h < m.cols(); ++h) {
        if (!std::isfinite(m(d, h))) {
          out.push_back({"non-finite " + label + " at (" + std::to_string(d) + "," +
                             std::to_string(h) + ")",
                         static_cast<std::size_t>(d), static_cast<int>(h)});
        }
      }
    }
  };
  scan(panel.prices, "price");
  for (const auto& [name, m] : panel.exog) scan(m, name);
  return out;
}

Eigen::VectorXd DesignRow::to_vector() const {
  Eigen::VectorXd v(size());
  v.head<kBaseFields>() << intercept, ar1, ar2, ar7, y_min_prev, y_max_prev, d_sat, d_sun, d_mon,
      pca1, pca2, pca3, y_h24_prev, delta;
  for (std::size_t i = 0; i < fundamentals.size(); ++i) {
    v(kBaseFields + static_cast<Eigen::Index>(i)) = fundamentals[i];
  }
  return v;
}

std::vector<std::string> DesignRow::field_names(const std::vector<std::string>& fundamentals) {
  std::vector<std::string> names{"intercept", "ar1",   "ar2",   "ar7",  "y_min_prev",
                                 "y_max_prev", "d_sat", "d_sun", "d_mon", "pca1",
                                 "pca2",      "pca3",  "y_h24_prev", "delta"};
  names.insert(names.end(), fundamentals.begin(), fundamentals.end());
  return names;
}

std::uint64_t derive_seed(std::uint64_t base_seed, std::uint64_t index) {
  std::uint64_t z = base_seed + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

SplitPlan SplitPlan::draw(std::size_t n, double pi, std::uint64_t seed) {
  if (!(pi > 0.0 && pi < 1.0)) throw std::invalid_argument("split ratio must lie in (0,1)");
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  // Fisher-Yates with explicit reduction so the permutation does not depend
  // on the standard library's distribution implementation.
  std::mt19937_64 rng(seed);
  for (std::size_t i = n; i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(perm[i - 1], perm[j]);
  }
  const auto m = static_cast<std::size_t>(std::llround(pi * static_cast<double>(n)));
  SplitPlan plan;
  plan.pi = pi;
  plan.seed = seed;
  plan.train_idx.assign(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(m));
  plan.calib_idx.assign(perm.begin() + static_cast<std::ptrdiff_t>(m), perm.end());
  return plan;
}

}  // namespace confpi
