#include "confpi/yeo_johnson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "confpi/errors.hpp"

namespace confpi {
namespace {

void require_eta(double eta) {
  CONFPI_REQUIRE(eta >= 0.0 && eta <= 2.0, "Yeo-Johnson eta must lie in [0,2], got " + std::to_string(eta));
}

}  // namespace

double yj_apply(double eta, double y) {
  require_eta(eta);
  if (y >= 0.0) {
    if (eta == 0.0) return std::log1p(y);
    return std::expm1(eta * std::log1p(y)) / eta;
  }
  const double e = 2.0 - eta;
  if (e == 0.0) return -std::log1p(-y);
  return -std::expm1(e * std::log1p(-y)) / e;
}

double yj_invert(double eta, double z) {
  require_eta(eta);
  if (!std::isfinite(z)) throw DomainError("Yeo-Johnson inverse of a non-finite value");
  if (z >= 0.0) {
    if (eta == 0.0) return std::expm1(z);
    const double base = eta * z;  // 1 + eta*z > 0 for z >= 0
    return std::expm1(std::log1p(base) / eta);
  }
  const double e = 2.0 - eta;
  if (e == 0.0) return -std::expm1(-z);
  return -std::expm1(std::log1p(-e * z) / e);
}

double yj_profile_loglik(double eta, std::span<const double> y) {
  const auto n = static_cast<double>(y.size());
  double sum = 0.0;
  double jac = 0.0;
  for (double v : y) {
    sum += yj_apply(eta, v);
    jac += (v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0)) * std::log1p(std::abs(v));
  }
  const double mu = sum / n;
  double ss = 0.0;
  for (double v : y) {
    const double d = yj_apply(eta, v) - mu;
    ss += d * d;
  }
  const double sigma2 = ss / n;
  if (!(sigma2 > 0.0)) return -std::numeric_limits<double>::infinity();
  return -0.5 * n * std::log(2.0 * std::numbers::pi) - 0.5 * n * std::log(sigma2) - 0.5 * n +
         (eta - 1.0) * jac;
}

YjFit yj_fit(std::span<const double> y) {
  CONFPI_REQUIRE(y.size() >= 10, "Yeo-Johnson fit needs at least 10 observations");
  YjFit fit;
  const auto [lo_it, hi_it] = std::minmax_element(y.begin(), y.end());
  if (*lo_it == *hi_it) {
    fit.degenerate = true;
    fit.params = {1.0, *lo_it, 1.0};
    fit.log_likelihood = std::numeric_limits<double>::infinity();
    return fit;
  }

  constexpr int kGrid = 200;
  int best = 0;
  double best_ll = -std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kGrid; ++i) {
    const double ll = yj_profile_loglik(i * 0.01, y);
    if (ll > best_ll) {
      best_ll = ll;
      best = i;
    }
  }

  double a = std::max(0, best - 1) * 0.01;
  double b = std::min(kGrid, best + 1) * 0.01;
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = yj_profile_loglik(c, y);
  double fd = yj_profile_loglik(d, y);
  while (b - a > 1e-4) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = yj_profile_loglik(c, y);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = yj_profile_loglik(d, y);
    }
  }
  double eta = 0.5 * (a + b);
  double ll = yj_profile_loglik(eta, y);
  if (ll < best_ll) {
    eta = best * 0.01;
    ll = best_ll;
  }

  double sum = 0.0;
  for (double v : y) sum += yj_apply(eta, v);
  const double mu = sum / static_cast<double>(y.size());
  double ss = 0.0;
  for (double v : y) ss += (yj_apply(eta, v) - mu) * (yj_apply(eta, v) - mu);
  fit.params = {eta, mu, ss / static_cast<double>(y.size())};
  fit.log_likelihood = ll;
  return fit;
}

}  // namespace confpi
