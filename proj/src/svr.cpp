#include "confpi/svr.hpp"

#include <cmath>
#include <limits>
#include <vector>

#include "confpi/errors.hpp"

namespace confpi {
namespace {

constexpr double kTau = 1e-12;

}  // namespace

double rbf_kernel(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double sigma) {
  return std::exp(-sigma * (u - v).squaredNorm());
}

SvrModel svr_fit(const Eigen::MatrixXd& x, const Eigen::VectorXd& y, const SvrOptions& options) {
  CONFPI_REQUIRE(x.rows() == y.size(), "svr: row count mismatch");
  CONFPI_REQUIRE(x.rows() >= 2, "svr: need at least two rows");
  CONFPI_REQUIRE(options.cost > 0.0 && options.sigma > 0.0 && options.epsilon >= 0.0,
                 "svr: cost and sigma must be positive, epsilon non-negative");
  const Eigen::Index n = x.rows();
  const Eigen::Index l = 2 * n;
  const double c = options.cost;

  Eigen::MatrixXd kernel(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    kernel(i, i) = 1.0;
    for (Eigen::Index j = 0; j < i; ++j) {
      kernel(i, j) = kernel(j, i) = std::exp(-options.sigma * (x.row(i) - x.row(j)).squaredNorm());
    }
  }

  // Variables 0..n-1 are alpha (label +1), n..2n-1 are alpha* (label -1).
  std::vector<double> alpha(static_cast<std::size_t>(l), 0.0);
  std::vector<double> grad(static_cast<std::size_t>(l));
  std::vector<int> label(static_cast<std::size_t>(l));
  for (Eigen::Index i = 0; i < n; ++i) {
    grad[static_cast<std::size_t>(i)] = options.epsilon - y(i);
    grad[static_cast<std::size_t>(i + n)] = options.epsilon + y(i);
    label[static_cast<std::size_t>(i)] = 1;
    label[static_cast<std::size_t>(i + n)] = -1;
  }
  auto q = [&](Eigen::Index i, Eigen::Index j) {
    return label[static_cast<std::size_t>(i)] * label[static_cast<std::size_t>(j)] * kernel(i % n, j % n);
  };
  auto at_upper = [&](Eigen::Index i) { return alpha[static_cast<std::size_t>(i)] >= c; };
  auto at_lower = [&](Eigen::Index i) { return alpha[static_cast<std::size_t>(i)] <= 0.0; };

  SvrModel model;
  for (model.iterations = 0; model.iterations < options.max_iterations; ++model.iterations) {
    // Working set: maximal violating i, then j by second-order gain.
    double gmax = -std::numeric_limits<double>::infinity();
    Eigen::Index i_sel = -1;
    for (Eigen::Index t = 0; t < l; ++t) {
      const double g = grad[static_cast<std::size_t>(t)];
      if (label[static_cast<std::size_t>(t)] == 1) {
        if (!at_upper(t) && -g >= gmax) {
          gmax = -g;
          i_sel = t;
        }
      } else if (!at_lower(t) && g >= gmax) {
        gmax = g;
        i_sel = t;
      }
    }
    double gmax2 = -std::numeric_limits<double>::infinity();
    Eigen::Index j_sel = -1;
    double best_gain = std::numeric_limits<double>::infinity();
    if (i_sel >= 0) {
      const int yi = label[static_cast<std::size_t>(i_sel)];
      for (Eigen::Index t = 0; t < l; ++t) {
        const double g = grad[static_cast<std::size_t>(t)];
        double diff = 0.0;
        double quad = 0.0;
        if (label[static_cast<std::size_t>(t)] == 1) {
          if (at_lower(t)) continue;
          gmax2 = std::max(gmax2, g);
          diff = gmax + g;
          quad = 2.0 - 2.0 * yi * q(i_sel, t);
        } else {
          if (at_upper(t)) continue;
          gmax2 = std::max(gmax2, -g);
          diff = gmax - g;
          quad = 2.0 + 2.0 * yi * q(i_sel, t);
        }
        if (diff > 0.0) {
          const double gain = -(diff * diff) / (quad > 0.0 ? quad : kTau);
          if (gain <= best_gain) {
            best_gain = gain;
            j_sel = t;
          }
        }
      }
    }
    if (i_sel < 0 || j_sel < 0 || gmax + gmax2 < options.tolerance) {
      model.converged = true;
      break;
    }

    const auto i = static_cast<std::size_t>(i_sel);
    const auto j = static_cast<std::size_t>(j_sel);
    const double old_i = alpha[i];
    const double old_j = alpha[j];
    const double qij = q(i_sel, j_sel);
    if (label[i] != label[j]) {
      double quad = 2.0 + 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = 2.0 - 2.0 * qij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i;
    const double dj = alpha[j] - old_j;
    for (Eigen::Index t = 0; t < l; ++t) {
      grad[static_cast<std::size_t>(t)] += q(i_sel, t) * di + q(j_sel, t) * dj;
    }
  }

  // Offset from free multipliers, or the midpoint of the feasible range.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  int free_count = 0;
  for (Eigen::Index t = 0; t < l; ++t) {
    const int yt = label[static_cast<std::size_t>(t)];
    const double yg = yt * grad[static_cast<std::size_t>(t)];
    if (at_upper(t)) {
      if (yt == -1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (at_lower(t)) {
      if (yt == 1) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      free_sum += yg;
      ++free_count;
    }
  }
  const double rho = free_count > 0 ? free_sum / free_count : 0.5 * (ub + lb);

  model.x = x;
  model.alpha.resize(n);
  model.alpha_star.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    model.alpha(i) = alpha[static_cast<std::size_t>(i)];
    model.alpha_star(i) = alpha[static_cast<std::size_t>(i + n)];
  }
  model.bias = -rho;
  model.sigma = options.sigma;
  model.cost = c;
  return model;
}

double svr_predict(const SvrModel& model, const Eigen::VectorXd& query) {
  CONFPI_REQUIRE(query.size() == model.x.cols(), "svr: query length mismatch");
  double f = model.bias;
  for (Eigen::Index i = 0; i < model.x.rows(); ++i) {
    const double coef = model.alpha(i) - model.alpha_star(i);
    if (coef != 0.0) f += coef * std::exp(-model.sigma * (model.x.row(i).transpose() - query).squaredNorm());
  }
  return f;
}

}  // namespace confpi
