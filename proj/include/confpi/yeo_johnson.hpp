#pragma once

#include <span>
#include <vector>

namespace confpi {

/// theta = (eta, mu, sigma2) of a fitted Yeo-Johnson transform.
struct YjParams {
  double eta = 1.0;
  double mu = 0.0;
  double sigma2 = 1.0;
};

struct YjFit {
  YjParams params;
  double log_likelihood = 0.0;
  bool degenerate = false;  // constant input: identity transform returned
};

/// Yeo-Johnson transform psi(eta, y) for 0 <= eta <= 2.
double yj_apply(double eta, double y);

/// Inverse of yj_apply. Throws DomainError when z is not in the image of psi(eta, .).
double yj_invert(double eta, double z);

/// Profile log-likelihood of eta (mu and sigma2 at their MLEs), including the
/// Jacobian term (eta - 1) * sum sgn(y) log(|y| + 1).
double yj_profile_loglik(double eta, std::span<const double> y);

/**
 * Maximizes the profile likelihood over eta in [0,2]: grid with step 0.01,
 * then golden-section refinement on the bracketing grid cells to 1e-4.
 * Requires at least 10 observations.
 */
YjFit yj_fit(std::span<const double> y);

}  // namespace confpi
