#pragma once

// Expected value of one element of a "normal voting sample".
//
// Draw zeta_1..zeta_l i.i.d. N(mu, sigma^2) and let n+ be the number of
// strictly positive draws. With a vote threshold l0:
//
//   mu_plus  = E[zeta_k * 1{n+ >  l0}]
//   mu_minus = E[zeta_k * 1{n+ <= l0}]
//
// Exact values are finite binomial sums; approximate values replace the
// binomial law of n+ by a continuity-corrected normal.

#include <algorithm>
#include <cmath>
#include <cstdint>

#include "stochvote/errors.hpp"
#include "stochvote/numerics.hpp"

namespace stochvote {

struct VotingSampleSpec {
  double mu = 0.0;
  double sigma = 1.0;
  std::int64_t size = 1;
  // Real-valued; only its integer part matters.
  double threshold = 0.0;

  void validate() const {
    detail::require_finite(mu, "mu");
    detail::require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive and finite");
    detail::require(size >= 1, "voting sample size must be at least 1");
    detail::require_finite(threshold, "voting threshold");
  }
};

namespace detail {

// Per-element quantities shared by the exact and approximate forms.
struct SampleElementLaw {
  double p;             // P{zeta > 0}
  double q;             // P{zeta <= 0}
  double f;             // f(mu / sigma)
  double mean_positive; // E[zeta | zeta > 0]
  double mean_nonpositive;

  explicit SampleElementLaw(const VotingSampleSpec& spec) {
    const double z = spec.mu / spec.sigma;
    p = std_normal_cdf(z);
    q = std_normal_cdf(-z);
    f = std_normal_pdf(z);
    mean_positive = spec.mu + spec.sigma * std_normal_hazard(-z);
    mean_nonpositive = spec.mu - spec.sigma * std_normal_hazard(z);
  }

  // E[zeta_k | n+ = x] = (x/l) E[zeta | zeta>0] + (1 - x/l) E[zeta | zeta<=0].
  // Written this way the weights vanish exactly where p or q underflow.
  double conditional_mean(std::int64_t x, std::int64_t size) const {
    const double share = static_cast<double>(x) / static_cast<double>(size);
    double value = 0.0;
    if (x > 0) value += mean_positive * share;
    if (x < size) value += mean_nonpositive * (1.0 - share);
    return value;
  }
};

inline double voting_sample_sum(const VotingSampleSpec& spec, std::int64_t first,
                                std::int64_t last) {
  const SampleElementLaw law(spec);
  CompensatedSum sum;
  for (std::int64_t x = first; x <= last; ++x) {
    const double weight = binomial_pmf_unchecked(x, spec.size, law.p, law.q);
    if (weight == 0.0) continue;
    sum.add(law.conditional_mean(x, spec.size) * weight);
  }
  return sum.value();
}

struct ApproxTerms {
  double mean_term;    // mu
  double density_term; // sigma f / sqrt(p q l) * f(l0')
  double z;            // l0' = ([l0] + 0.5 - p l) / sqrt(p q l)
};

inline ApproxTerms approx_terms(const VotingSampleSpec& spec) {
  const SampleElementLaw law(spec);
  const double variance = law.p * law.q * static_cast<double>(spec.size);
  require(variance > 0.0, "normal approximation needs p q l > 0");
  const double sd = std::sqrt(variance);
  const double z =
      (static_cast<double>(integer_part(spec.threshold)) + 0.5 - law.p * spec.size) / sd;
  return {spec.mu, spec.sigma * law.f / sd * std_normal_pdf(z), z};
}

}  // namespace detail

// Exact mu_plus: sum over x = [l0]+1 .. l of E[zeta_k | n+ = x] b(x | l).
// Zero when [l0] >= l; mu when [l0] < 0.
inline double mu_plus_exact(const VotingSampleSpec& spec) {
  spec.validate();
  const std::int64_t first = std::max<std::int64_t>(0, integer_part(spec.threshold) + 1);
  if (first > spec.size) return 0.0;
  return detail::voting_sample_sum(spec, first, spec.size);
}

// Exact mu_minus: sum over x = 0 .. [l0]. Computed by its own sum, not as
// mu - mu_plus, so the partition identity stays a real check.
inline double mu_minus_exact(const VotingSampleSpec& spec) {
  spec.validate();
  const std::int64_t last = std::min(spec.size, integer_part(spec.threshold));
  if (last < 0) return 0.0;
  return detail::voting_sample_sum(spec, 0, last);
}

// mu F(-l0') + sigma f / sqrt(p q l) * f(l0').
inline double mu_plus_approx(const VotingSampleSpec& spec) {
  spec.validate();
  const auto t = detail::approx_terms(spec);
  return t.mean_term * std_normal_cdf(-t.z) + t.density_term;
}

// mu F(l0') - sigma f / sqrt(p q l) * f(l0').
inline double mu_minus_approx(const VotingSampleSpec& spec) {
  spec.validate();
  const auto t = detail::approx_terms(spec);
  return t.mean_term * std_normal_cdf(t.z) - t.density_term;
}

}  // namespace stochvote
