#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "stochvote/numerics.hpp"
#include "stochvote/rng.hpp"
#include "stochvote/voting_sample.hpp"

namespace stochvote {
namespace {

TEST(MuPlusExact, EmptyAndFullSums) {
  for (long size : {1L, 4L, 37L}) {
    const VotingSampleSpec never{0.4, 2.0, size, static_cast<double>(size)};
    const VotingSampleSpec always{0.4, 2.0, size, -1.0};
    EXPECT_EQ(mu_plus_exact(never), 0.0);
    EXPECT_NEAR(mu_plus_exact(always), 0.4, 1e-14);
    EXPECT_NEAR(mu_minus_exact(never), 0.4, 1e-14);
    EXPECT_EQ(mu_minus_exact(always), 0.0);
  }
}

TEST(MuPlusExact, IndependenceFactorization) {
  // l = 2, both must be positive: E[zeta_1; zeta_1 > 0] P{zeta_2 > 0} = f(0)/2.
  EXPECT_NEAR(mu_plus_exact({0.0, 1.0, 2, 1.0}), 0.19947114020071634, 1e-15);
}

TEST(MuPlusExact, MatchesHighPrecisionOracle) {
  EXPECT_NEAR(mu_plus_exact({0.5, 2.0, 7, 3.0}), 0.56834989296178886, 1e-14);
  EXPECT_NEAR(mu_plus_exact({-0.3, 10.0, 276, 139.0}), 0.077788623305276071, 1e-13);
}

TEST(MuPlusExact, SingleElementClosedForm) {
  // mu+(mu, s, 1, 0) = mu F(mu/s) + s f(mu/s) for any (mu, s), including sigma/sqrt(g).
  for (double mu : {-2.0, -0.3, 0.0, 0.7}) {
    for (double g : {1.0, 3.0, 24.0, 387.0}) {
      const double s = 10.0 / std::sqrt(g);
      const double closed = mu * std_normal_cdf(mu / s) + s * std_normal_pdf(mu / s);
      EXPECT_NEAR(mu_plus_exact({mu, s, 1, 0.0}), closed, 1e-12) << mu << ' ' << g;
    }
  }
}

TEST(MuPlusExact, ConstantBetweenIntegerThresholds) {
  const double base = mu_plus_exact({0.2, 1.5, 30, 12.0});
  for (double l0 : {12.0, 12.25, 12.5, 12.999}) {
    EXPECT_EQ(mu_plus_exact({0.2, 1.5, 30, l0}), base) << l0;
  }
  EXPECT_NE(mu_plus_exact({0.2, 1.5, 30, 13.0}), base);
}

TEST(MuPlusExact, ExtremeMeansStayFinite) {
  EXPECT_NEAR(mu_plus_exact({400.0, 10.0, 50, 25.0}), 400.0, 1e-9);
  EXPECT_EQ(mu_plus_exact({-400.0, 10.0, 50, 25.0}), 0.0);
  EXPECT_NEAR(mu_minus_exact({-400.0, 10.0, 50, 25.0}), -400.0, 1e-9);
}

TEST(MuPlusExact, RejectsInvalidSpec) {
  EXPECT_THROW(mu_plus_exact({0.0, 0.0, 3, 1.0}), parameter_error);
  EXPECT_THROW(mu_plus_exact({0.0, 1.0, 0, 1.0}), parameter_error);
  EXPECT_THROW(mu_minus_exact({0.0, 1.0, 3, NAN}), parameter_error);
}

TEST(VotingSample, PartitionIdentityOnRandomGrid) {
  std::mt19937_64 gen(12);
  std::uniform_real_distribution<double> mus(-5.0, 5.0);
  std::uniform_real_distribution<double> sigmas(1e-3, 20.0);
  std::uniform_int_distribution<long> sizes(1, 500);
  for (int i = 0; i < 1000; ++i) {
    VotingSampleSpec spec{mus(gen), sigmas(gen), sizes(gen), 0.0};
    std::uniform_real_distribution<double> thresholds(-2.0, spec.size + 2.0);
    spec.threshold = thresholds(gen);
    EXPECT_NEAR(mu_plus_exact(spec) + mu_minus_exact(spec), spec.mu, 1e-10)
        << spec.mu << ' ' << spec.sigma << ' ' << spec.size << ' ' << spec.threshold;
  }
}

TEST(MuPlusApprox, DirectFormula) {
  const VotingSampleSpec spec{0.0, 1.0, 100, 49.0};
  EXPECT_NEAR(mu_plus_approx(spec), 0.031672230900327409, 1e-15);
  EXPECT_NEAR(mu_minus_approx(spec), -0.031672230900327409, 1e-15);
  EXPECT_NEAR(mu_plus_approx(spec), mu_plus_exact(spec), 2e-3);
}

TEST(MuPlusApprox, CertainAcceptance) {
  EXPECT_NEAR(mu_plus_approx({5.0, 1.0, 100, 50.0}), 5.0, 1e-9);
  EXPECT_NEAR(mu_minus_approx({0.3, 1.0, 40, 1000.0}), 0.3, 1e-12);
}

TEST(MuPlusApprox, PartitionCancelsExactly) {
  std::mt19937_64 gen(99);
  std::uniform_real_distribution<double> mus(-5.0, 5.0);
  std::uniform_real_distribution<double> sigmas(0.5, 20.0);
  std::uniform_int_distribution<long> sizes(1, 500);
  for (int i = 0; i < 1000; ++i) {
    VotingSampleSpec spec{mus(gen), sigmas(gen), sizes(gen), 0.0};
    std::uniform_real_distribution<double> thresholds(-2.0, spec.size + 2.0);
    spec.threshold = thresholds(gen);
    EXPECT_NEAR(mu_plus_approx(spec) + mu_minus_approx(spec), spec.mu, 1e-12);
  }
}

TEST(MuPlusApprox, CloseToExactForLargeVariance) {
  // Scan over p q l >= 9, every threshold: worst gap relative to sigma is
  // 7.5e-3 (mu/sigma = 0.8, l = 100, skewed votes); 1.9e-3 for |mu/sigma| <= 0.3.
  double worst = 0.0;
  for (double z : {-0.3, -0.03, 0.0, 0.25, 0.8}) {
    for (long size : {40L, 100L, 276L, 450L}) {
      const double p = std_normal_cdf(z);
      if (p * (1 - p) * size < 9.0) continue;
      for (long l0 = -1; l0 <= size; ++l0) {
        const VotingSampleSpec spec{z * 10.0, 10.0, size, static_cast<double>(l0)};
        worst = std::max(worst, std::abs(mu_plus_approx(spec) - mu_plus_exact(spec)) / 10.0);
      }
    }
  }
  EXPECT_LE(worst, 1e-2);
}

TEST(MuPlusApprox, ZeroVarianceRejected) {
  EXPECT_THROW(mu_plus_approx({-400.0, 1.0, 10, 3.0}), parameter_error);
}

// Monte Carlo oracle: simulate the sample directly and average every element
// of the voting sample within each replication.
struct McResult { double mean; double standard_error; };

McResult simulate_mu_plus(const VotingSampleSpec& spec, long replications, std::uint64_t seed) {
  NormalSampler rng(seed);
  std::vector<double> zeta(static_cast<std::size_t>(spec.size));
  double sum = 0.0, sum_sq = 0.0;
  const long threshold = static_cast<long>(std::floor(spec.threshold));
  for (long r = 0; r < replications; ++r) {
    long positives = 0;
    double total = 0.0;
    for (double& z : zeta) {
      z = rng(spec.mu, spec.sigma);
      positives += z > 0.0;
      total += z;
    }
    const double value = positives > threshold ? total / spec.size : 0.0;
    sum += value;
    sum_sq += value * value;
  }
  const double mean = sum / replications;
  const double var = (sum_sq - replications * mean * mean) / (replications - 1);
  return {mean, std::sqrt(var / replications)};
}

TEST(MuPlusExact, AgreesWithMonteCarlo) {
  const VotingSampleSpec specs[] = {
      {0.0, 1.0, 5, 2.0}, {-0.3, 10.0, 20, 10.0}, {1.0, 2.0, 2, 0.0}, {1.0, 2.0, 20, 19.0}};
  std::uint64_t seed = 1;
  for (const auto& spec : specs) {
    const auto mc = simulate_mu_plus(spec, 200'000, seed++);
    EXPECT_LE(std::abs(mc.mean - mu_plus_exact(spec)), 4 * mc.standard_error)
        << spec.mu << ' ' << spec.size << ' ' << spec.threshold;
  }
}

}  // namespace
}  // namespace stochvote
