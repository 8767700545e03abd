#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <string>

#include "oracles.hpp"
#include "reference_tables.hpp"
#include "tailsum/diagnostics.hpp"
#include "tailsum/errors.hpp"

using namespace tailsum;

namespace {

double round_to(double x, int sig) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*e", sig - 1, x);
  return std::stod(buf);
}

}  // namespace

TEST(RhoHat, Examples) {
  const ModelSpec s = ModelSpec::lognormal(2, 0.9);
  EXPECT_NEAR(rho_hat(s, 0, 10.0), 0.638, 5e-4);
  EXPECT_NEAR(rho_hat(s, 0, 50.0), 0.651, 5e-4);
  EXPECT_NEAR(rho_hat(s, 0, 1e6), 0.81, 5e-3);
  for (double u : {10.0, 77.0, 1e5}) {
    const double lu = std::log(u);
    EXPECT_NEAR(rho_hat(s, 1, u), 1.0 - std::log(lu) / lu, 1e-14);
  }
  EXPECT_THROW(rho_hat(s, 0, 1.0), DomainError);
  EXPECT_THROW(rho_hat(s, 2, 10.0), DomainError);
}

TEST(RhoHat, EveryTableRowToPrintedPrecision) {
  for (const auto& t : tables::all()) {
    const ModelSpec s = ModelSpec::lognormal(2, t.rho);
    for (const auto& r : t.rows) {
      const double v = rho_hat(s, 0, r.u);
      // Printed with three significant digits (1.53 at u = 2, 0.81 at u = 1e6).
      EXPECT_EQ(round_to(v, 3), r.rho_hat) << t.name << " u=" << r.u;
    }
  }
}

TEST(RhoHat, IndependentOfCorrelationAndIncreasing) {
  // 1 - log(log u)/log u has its minimum at u = e^e.
  double prev = -1.0;
  for (double u = std::exp(std::exp(1.0)); u < 1e12; u *= 1.7) {
    const double ref = rho_hat(ModelSpec::lognormal(2, 0.0), 0, u);
    for (double rho : {0.9, 0.5, -0.9})
      EXPECT_EQ(rho_hat(ModelSpec::lognormal(2, rho), 0, u), ref);
    EXPECT_GT(ref, prev);
    EXPECT_GT(ref, 0.0);
    EXPECT_LT(ref, 1.0);
    prev = ref;
  }
}

TEST(Epsilon, Examples) {
  const ModelSpec s = ModelSpec::lognormal(2, 0.9);
  EXPECT_NEAR(epsilon_measure(s, 1, 0, 10.0, 0.1532).epsilon, 2.0, 2e-3);
  for (double rho : {-0.5, 0.0, 0.9}) {
    const ModelSpec m = ModelSpec::lognormal(2, rho);
    for (double u : {10.0, 1e3}) {
      EXPECT_NEAR(epsilon_measure(m, 1, 0, u, 0.0).epsilon,
                  std::pow(u, rho) / (u / std::log(u)), 1e-12 * std::pow(u, rho));
    }
  }
  EXPECT_THROW(epsilon_measure(s, 0, 0, 10.0, 1.0), DomainError);
  EXPECT_THROW(epsilon_measure(s, 1, 0, 1.0, 1.0), DomainError);
}

TEST(Epsilon, MonotoneInCAndExp) {
  const ModelSpec s = ModelSpec::lognormal(2, 0.5);
  double prev = 0.0;
  for (double c = 0.0; c <= 3.0; c += 0.25) {
    const auto e = epsilon_measure(s, 1, 0, 100.0, c);
    EXPECT_GT(e.epsilon, prev);
    EXPECT_NEAR(e.exp_epsilon, std::exp(e.epsilon), 1e-12 * e.exp_epsilon);
    prev = e.epsilon;
  }
}

TEST(BuildTable, MatchesTable1WithoutMc) {
  const auto& t = tables::all()[0];
  std::vector<double> us;
  for (const auto& r : t.rows) us.push_back(r.u);
  const auto rows = build_table(ModelSpec::lognormal(2, t.rho), us, {});
  ASSERT_EQ(rows.size(), t.rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    EXPECT_EQ(rows[k].u, t.rows[k].u);
    EXPECT_EQ(round_to(rows[k].asympt1, 3), t.rows[k].asympt1);
    EXPECT_EQ(round_to(rows[k].asympt2, 3), t.rows[k].asympt2);
    EXPECT_NEAR(rows[k].rho_hat, t.rows[k].rho_hat, 5e-3);
    EXPECT_TRUE(std::isnan(rows[k].mc));
    EXPECT_TRUE(std::isnan(rows[k].ratio2));
    EXPECT_NEAR(rows[k].exp_epsilon, std::exp(rows[k].epsilon), 1e-12 * rows[k].exp_epsilon);
  }
  const std::vector<double> one = {30.0};
  EXPECT_EQ(build_table(ModelSpec::lognormal(2, 0.9), one, {}).size(), 1u);
  EXPECT_THROW(build_table(ModelSpec::lognormal(2, 0.9), std::vector<double>{}, {}), DomainError);
}

TEST(BuildTable, NegativeCorrelationRowWithMc) {
  TableOptions opts;
  opts.mc = MCOptions{};
  opts.mc->n = 200'000;
  opts.mc->seed = 5;
  const std::vector<double> us = {100.0};
  const auto row = build_table(ModelSpec::lognormal(2, -0.9), us, opts)[0];
  EXPECT_EQ(round_to(row.asympt1, 3), 4.12e-06);
  EXPECT_EQ(round_to(row.asympt2, 3), 4.12e-06);
  EXPECT_NEAR(row.ratio1, 1.0, 0.01);
  EXPECT_NEAR(row.ratio2, 1.0, 0.01);
  EXPECT_NEAR(row.ratio1, row.mc / row.asympt1, 1e-12);
  EXPECT_NEAR(row.ratio2, row.mc / row.asympt2, 1e-12);
  EXPECT_GT(row.mc_stderr, 0.0);
}

TEST(BuildTable, RatioTwoCloserToOneThanRatioOne) {
  // MC column from the radial-conditional estimator; where the two ratios are
  // closer than the sampling error can resolve, fall back to the quadrature
  // value of the same probability.
  TableOptions opts;
  opts.mc = MCOptions{};
  opts.mc->n = 400'000;
  opts.mc->seed = 77;
  for (const auto& t : tables::all()) {
    std::vector<double> us;
    for (const auto& r : t.rows)
      if (r.u >= 10.0) us.push_back(r.u);
    const auto rows = build_table(ModelSpec::lognormal(2, t.rho), us, opts);
    for (const auto& r : rows) {
      const double gap = std::abs(r.asympt2 - r.asympt1);
      double truth = r.mc;
      if (gap < 6.0 * r.mc_stderr) truth = std::exp(oracle::log_bivariate_lognormal_sum_tail(t.rho, r.u));
      EXPECT_LT(std::abs(truth / r.asympt2 - 1.0), std::abs(truth / r.asympt1 - 1.0))
          << t.name << " u=" << r.u;
    }
  }
}
