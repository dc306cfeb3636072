#include <gtest/gtest.h>

#include <random>
#include <set>

#include "confpi/conformal.hpp"
#include "confpi/errors.hpp"
#include "confpi/stats.hpp"
#include "oracles.hpp"

using namespace confpi;

TEST(IcpThreshold, FourScoreToyCase) {
  const std::vector<double> s = {1, 2, 3, 4};
  EXPECT_EQ(icp_threshold(s, 0.3), 4.0);
  EXPECT_EQ(icp_threshold(std::vector<double>{4, 1, 3, 2}, 0.3), 4.0);
}

TEST(IcpThreshold, AllEqualScores) {
  // Ties rank with nothing strictly below them, so c only reaches 1/(n+1),
  // which the zero candidate already attains.
  const std::vector<double> s(9, 2.5);
  EXPECT_EQ(icp_threshold(s, 0.95), 0.0);
  EXPECT_EQ(icp_threshold(s, 0.5), kUnboundedThreshold);
  EXPECT_EQ(icp_threshold(s, 0.1), kUnboundedThreshold);
  // One distinct larger score lifts the tie group out of the sentinel.
  auto t = s;
  t.push_back(3.0);
  EXPECT_EQ(icp_threshold(t, 0.1), 3.0);
}

TEST(IcpThreshold, SentinelWhenAlphaBelowResolution) {
  std::vector<double> s;
  for (int i = 1; i <= 9; ++i) s.push_back(i);
  // Largest score ranks (8+1)/10 = 0.9: enough for alpha 0.1, not for 0.05.
  EXPECT_EQ(icp_threshold(s, 0.1), 9.0);
  EXPECT_EQ(icp_threshold(s, 0.05), kUnboundedThreshold);
  const auto f = icp_interval(10.0, kUnboundedThreshold, 0.05);
  EXPECT_TRUE(f.unbounded);
  EXPECT_TRUE(f.covers(-1e300));
}

TEST(IcpThreshold, ZeroCandidateAndContract) {
  // With alpha near 1 the rank condition holds already at lambda = 0.
  EXPECT_EQ(icp_threshold(std::vector<double>{3, 5, 8}, 0.9), 0.0);
  EXPECT_THROW(icp_threshold(std::vector<double>{}, 0.1), ContractViolation);
  EXPECT_THROW(icp_threshold(std::vector<double>{1.0}, 0.0), ContractViolation);
  EXPECT_THROW(icp_threshold(std::vector<double>{1.0}, 1.0), ContractViolation);
}

TEST(IcpThreshold, PropertiesAgainstBruteForce) {
  std::mt19937_64 rng(21);
  std::uniform_int_distribution<int> size(1, 60);
  std::uniform_int_distribution<int> coarse(0, 12);  // many ties
  std::exponential_distribution<double> smooth(0.3);
  const std::vector<double> alphas = {0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9};
  for (int rep = 0; rep < 400; ++rep) {
    std::vector<double> s(static_cast<std::size_t>(size(rng)));
    for (auto& v : s) v = rep % 2 ? smooth(rng) : coarse(rng);
    const std::set<double> members(s.begin(), s.end());
    double prev = kUnboundedThreshold;
    for (const double a : alphas) {
      const double lam = icp_threshold(s, a);
      EXPECT_EQ(lam, oracle::icp_threshold(s, a)) << "n=" << s.size() << " alpha=" << a;
      EXPECT_TRUE(std::isinf(lam) || lam == 0.0 || members.count(lam)) << "not an element";
      EXPECT_LE(lam, prev) << "not monotone in alpha";
      prev = lam;
    }
    // Adding a score above the threshold never lowers it.
    const double lam = icp_threshold(s, 0.2);
    if (std::isfinite(lam)) {
      auto t = s;
      t.push_back(lam + 1.0);
      EXPECT_GE(icp_threshold(t, 0.2), lam);
    }
  }
}

TEST(IcpInterval, DirectSubstitution) {
  const auto f = icp_interval(50, 4, 0.1);
  EXPECT_EQ(f.lower, 46);
  EXPECT_EQ(f.upper, 54);
  EXPECT_EQ(f.center, 50);
  EXPECT_EQ(f.center - f.lower, f.upper - f.center);
  const auto z = icp_interval(0, 0, 0.1);
  EXPECT_EQ(z.lower, 0);
  EXPECT_EQ(z.upper, 0);
  EXPECT_THROW(icp_interval(0, -1, 0.1), ContractViolation);
}

TEST(NcpInterval, DirectSubstitutionAndFloor) {
  const auto f = ncp_interval(50, 2, 3, 1e-6, 0.1);
  EXPECT_EQ(f.lower, 44);
  EXPECT_EQ(f.upper, 56);
  // Negative estimates use their magnitude, tiny ones hit the floor.
  EXPECT_EQ(ncp_interval(50, 2, -3, 1e-6, 0.1).upper, 56);
  EXPECT_DOUBLE_EQ(ncp_interval(0, 2, 1e-12, 0.5, 0.1).upper, 1.0);
  const std::vector<double> est = {2, 4, 6, 8, 100};
  EXPECT_DOUBLE_EQ(normalizer_floor(est), 0.06);
  EXPECT_DOUBLE_EQ(normalizer_floor(std::vector<double>{0, 0, 0}), 1e-6);
  const auto set = ncp_scores(std::vector<double>{1, -2}, std::vector<double>{0, 4});
  EXPECT_DOUBLE_EQ(set.normalizer_floor, 0.02);
  EXPECT_DOUBLE_EQ(set.scores[0], 1 / 0.02);
  EXPECT_DOUBLE_EQ(set.scores[1], 0.5);
}

TEST(NcpInterval, CommonNormalizerReducesToIcp) {
  std::mt19937_64 rng(22);
  std::normal_distribution<double> g(0, 3);
  for (const double c : {1.0, 7.0, 0.25}) {
    std::vector<double> res(80);
    for (auto& r : res) r = g(rng);
    const std::vector<double> est(80, c);
    std::vector<double> abs_res(80);
    std::transform(res.begin(), res.end(), abs_res.begin(), [](double r) { return std::abs(r); });
    const auto set = ncp_scores(res, est);
    for (const double a : {0.1, 0.5}) {
      const auto n = ncp_interval(12.0, icp_threshold(set.scores, a), c, set.normalizer_floor, a);
      const auto i = icp_interval(12.0, icp_threshold(abs_res, a), a);
      EXPECT_NEAR(n.lower, i.lower, 1e-9);
      EXPECT_NEAR(n.upper, i.upper, 1e-9);
    }
  }
}

TEST(EmpiricalInterval, LadderAndMedian) {
  std::vector<double> e;
  for (int i = 1; i <= 100; ++i) e.push_back(i);
  const auto f = empirical_interval(e, 0.1, 0.0);
  EXPECT_NEAR(f.upper, 90.1, 1e-12);
  EXPECT_NEAR(f.lower, -90.1, 1e-12);
  EXPECT_NEAR(empirical_interval(e, 0.5, 10.0).upper - 10.0, median(e), 1e-12);
  const std::vector<double> zeros(25, 0.0);
  EXPECT_EQ(empirical_interval(zeros, 0.1, 3.0).width(), 0.0);
  EXPECT_THROW(empirical_interval(std::vector<double>(19, 1.0), 0.1, 0.0), ContractViolation);
}

TEST(Lattice, NamesAndEnumeration) {
  const auto all = LatticeVariant::all();
  std::set<std::string> names;
  for (const auto& v : all) names.insert(std::string(v.name()));
  EXPECT_EQ(names.size(), 8u);
  EXPECT_EQ((LatticeVariant{true, true, false}).name(), "Conformal Prediction");
  EXPECT_EQ((LatticeVariant{true, true, true}).name(), "Normalized Conformal Prediction");
  EXPECT_EQ((LatticeVariant{false, true, true}).name(), "quantiles - norm-sampled");
  EXPECT_EQ((LatticeVariant{false, false, false}).name(), "asymmetric quantiles");
  EXPECT_EQ((LatticeVariant{true, false, false}).tag(), "sym-full-raw");
}

namespace {

LatticeContext random_context(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0, 2);
  std::uniform_real_distribution<double> u(0.5, 3);
  LatticeContext c;
  c.full_center = 40 + g(rng);
  c.split_center = 40 + g(rng);
  for (int i = 0; i < 60; ++i) {
    c.full_residuals.push_back(g(rng));
    c.full_error_estimates.push_back(u(rng));
  }
  for (int i = 0; i < 20; ++i) {
    c.calib_residuals.push_back(g(rng));
    c.calib_error_estimates.push_back(u(rng));
  }
  c.full_query_error_estimate = u(rng);
  c.split_query_error_estimate = u(rng);
  return c;
}

std::vector<double> abs_of(const std::vector<double>& v) {
  std::vector<double> out;
  for (const double x : v) out.push_back(std::abs(x));
  return out;
}

}  // namespace

TEST(Lattice, NodesReproduceTheirPipelinesExactly) {
  std::mt19937_64 rng(23);
  for (int rep = 0; rep < 100; ++rep) {
    const auto c = random_context(rng);
    for (const double a : {0.1, 0.5}) {
      const auto icp = icp_interval(c.split_center, icp_threshold(abs_of(c.calib_residuals), a), a);
      const auto node_icp = lattice_interval({true, true, false}, c, a);
      EXPECT_EQ(node_icp.lower, icp.lower);
      EXPECT_EQ(node_icp.upper, icp.upper);

      const auto emp = empirical_interval(abs_of(c.full_residuals), a, c.full_center);
      const auto node_e = lattice_interval({true, false, false}, c, a);
      EXPECT_EQ(node_e.lower, emp.lower);
      EXPECT_EQ(node_e.upper, emp.upper);

      const auto set = ncp_scores(c.calib_residuals, c.calib_error_estimates);
      const auto ncp = ncp_interval(c.split_center, icp_threshold(set.scores, a), c.split_query_error_estimate,
                                    set.normalizer_floor, a);
      const auto node_n = lattice_interval({true, true, true}, c, a);
      EXPECT_EQ(node_n.lower, ncp.lower);
      EXPECT_EQ(node_n.upper, ncp.upper);
    }
  }
}

TEST(Lattice, AsymmetricNodeUsesSignedQuantiles) {
  LatticeContext c;
  c.full_center = 100;
  for (int i = -30; i <= 30; ++i) c.full_residuals.push_back(i > 0 ? 2.0 * i : i);  // right-skewed
  c.full_error_estimates.assign(c.full_residuals.size(), 1.0);
  c.calib_residuals = {1.0};
  c.calib_error_estimates = {1.0};
  const auto f = lattice_interval({false, false, false}, c, 0.1);
  EXPECT_NEAR(f.lower, 100 + oracle::quantile7(c.full_residuals, 0.05), 1e-12);
  EXPECT_NEAR(f.upper, 100 + oracle::quantile7(c.full_residuals, 0.95), 1e-12);
  EXPECT_GT(f.upper - 100, 100 - f.lower);
}

TEST(Lattice, AsymmetricMatchesSymmetricOnSymmetricNoise) {
  std::mt19937_64 rng(24);
  std::normal_distribution<double> g(0, 1);
  LatticeContext c;
  c.full_center = 0;
  for (int i = 0; i < 20000; ++i) c.full_residuals.push_back(g(rng));
  c.full_error_estimates.assign(c.full_residuals.size(), 1.0);
  c.calib_residuals = {1.0};
  c.calib_error_estimates = {1.0};
  const auto a = lattice_interval({false, false, false}, c, 0.1);
  const auto s = lattice_interval({true, false, false}, c, 0.1);
  EXPECT_NEAR(a.lower, s.lower, 0.05);
  EXPECT_NEAR(a.upper, s.upper, 0.05);
}

TEST(Lattice, NormalizedAsymmetricNodeKeepsOrderedBounds) {
  LatticeContext c;
  c.full_center = 10;
  c.full_residuals.assign(30, 1.0);  // every error positive
  c.full_error_estimates.assign(30, 1.0);
  c.full_query_error_estimate = -2.0;  // magnitude used, still non-crossing
  c.calib_residuals = {1.0};
  c.calib_error_estimates = {1.0};
  const auto f = lattice_interval({false, false, true}, c, 0.1);
  EXPECT_LE(f.lower, f.upper);
  EXPECT_FALSE(f.crossed);
  // One-sided errors put both bounds above the point forecast.
  EXPECT_GT(f.lower, f.center);
}

TEST(Conformal, HeteroscedasticWidthTracksScale) {
  // y = x + N(0, 0.1 x); oracle error model sigma(x) = 0.1 x * sqrt(2/pi).
  std::mt19937_64 rng(25);
  std::uniform_real_distribution<double> ux(1, 10);
  std::normal_distribution<double> g;
  std::vector<double> res, est;
  for (int i = 0; i < 500; ++i) {
    const double x = ux(rng);
    res.push_back(0.1 * x * g(rng));
    est.push_back(0.1 * x * std::sqrt(2 / M_PI));
  }
  const auto set = ncp_scores(res, est);
  const double lam = icp_threshold(set.scores, 0.1);
  double prev = 0;
  for (double x = 1; x <= 10; x += 0.5) {
    const double w = ncp_interval(x, lam, 0.1 * x * std::sqrt(2 / M_PI), set.normalizer_floor, 0.1).width();
    EXPECT_GT(w, prev);
    prev = w;
  }
}
