#pragma once

// Special functions and distribution kernels: standard normal pdf/cdf,
// binomial pmf and tails (exact, log-space, and normal-approximated),
// regularized incomplete beta, truncated-normal conditional means.
//
// Everything here is a pure function of its arguments.

#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <string>

#include "stochvote/errors.hpp"

namespace stochvote {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617640;

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double term) {
    const double t = sum_ + term;
    if (std::abs(sum_) >= std::abs(term)) {
      compensation_ += (sum_ - t) + term;
    } else {
      compensation_ += (term - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

// Integer part [v] used for every vote-count threshold.
//
// Floor semantics, so that "more than v votes" is exactly "at least [v]+1
// votes" for any real v, negatives included. Products such as alpha*n that
// land within a relative 1e-9 of an integer are snapped to it, so that
// 0.52*300 and (4*156)*(1/1200)*300 both give 156.
inline std::int64_t integer_part(double v) {
  detail::require_finite(v, "threshold");
  detail::require(std::abs(v) < 9.0e15, "threshold magnitude too large");
  const double nearest = std::round(v);
  if (std::abs(v - nearest) <= 1e-9 * std::max(1.0, std::abs(v))) {
    return static_cast<std::int64_t>(nearest);
  }
  return static_cast<std::int64_t>(std::floor(v));
}

inline double std_normal_pdf(double x) {
  detail::require_finite(x, "x");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

// F(x) = erfc(-x/sqrt 2)/2; accurate in both tails.
inline double std_normal_cdf(double x) {
  detail::require_finite(x, "x");
  return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

// Hazard rate f(z) / (1 - F(z)) of the standard normal, i.e. the inverse
// Mills ratio. Stays finite where both numerator and denominator underflow.
inline double std_normal_hazard(double z) {
  detail::require_finite(z, "z");
  if (z < 25.0) return std_normal_pdf(z) / std_normal_cdf(-z);
  // Laplace continued fraction for (1 - F(z)) / f(z); converges fast for large z.
  double t = z;
  for (int k = 60; k >= 1; --k) t = z + k / t;
  return t;
}

// -----------------------------------------------------------------------------
// Binomial distribution

struct BinomialSpec {
  std::int64_t trials = 0;
  double success_prob = 0.0;
  // Carried separately so that callers holding an accurate complement
  // (e.g. q = F(-z) when p = F(z) is close to 1) don't lose it to 1 - p.
  double failure_prob = 1.0;

  BinomialSpec(std::int64_t n, double p) : BinomialSpec(n, p, 1.0 - p) {}

  BinomialSpec(std::int64_t n, double p, double q)
      : trials(n), success_prob(p), failure_prob(q) {
    detail::require(n >= 0, "binomial trials must be nonnegative");
    detail::require(p >= 0.0 && p <= 1.0, "binomial success probability must lie in [0,1]");
    detail::require(q >= 0.0 && q <= 1.0, "binomial failure probability must lie in [0,1]");
    detail::require(std::abs(p + q - 1.0) <= 4 * std::numeric_limits<double>::epsilon(),
                    "binomial success and failure probabilities must sum to 1");
  }

  double variance() const { return success_prob * failure_prob * static_cast<double>(trials); }
};

namespace detail {

// log(n!) - log(sqrt(2 pi n) (n/e)^n), the Stirling-formula error.
inline double stirling_error(double n) {
  constexpr double s0 = 1.0 / 12.0;
  constexpr double s1 = 1.0 / 360.0;
  constexpr double s2 = 1.0 / 1260.0;
  constexpr double s3 = 1.0 / 1680.0;
  constexpr double s4 = 1.0 / 1188.0;
  if (n <= 15.0) {
    return std::lgamma(n + 1.0) - (n + 0.5) * std::log(n) + n - kLogSqrt2Pi;
  }
  const double nn = n * n;
  if (n > 500) return (s0 - s1 / nn) / n;
  if (n > 80) return (s0 - (s1 - s2 / nn) / nn) / n;
  if (n > 35) return (s0 - (s1 - (s2 - s3 / nn) / nn) / nn) / n;
  return (s0 - (s1 - (s2 - (s3 - s4 / nn) / nn) / nn) / nn) / n;
}

// Deviance term x log(x/np) + np - x, evaluated without cancellation.
inline double binomial_deviance(double x, double np) {
  if (std::abs(x - np) < 0.1 * (x + np)) {
    double v = (x - np) / (x + np);
    double s = (x - np) * v;
    double ej = 2 * x * v;
    v *= v;
    for (int j = 1; j < 1000; ++j) {
      ej *= v;
      const double s1 = s + ej / (2 * j + 1);
      if (s1 == s) return s1;
      s = s1;
    }
    return s;
  }
  return x * std::log(x / np) + np - x;
}

// Saddle-point (Loader) form of the binomial pmf; all work is in log space.
inline double binomial_pmf_unchecked(std::int64_t x, std::int64_t n, double p, double q) {
  if (p == 0.0) return x == 0 ? 1.0 : 0.0;
  if (q == 0.0) return x == n ? 1.0 : 0.0;
  const double dn = static_cast<double>(n);
  if (x == 0) {
    if (n == 0) return 1.0;
    const double lc = p < 0.1 ? -binomial_deviance(dn, dn * q) - dn * p : dn * std::log(q);
    return std::exp(lc);
  }
  if (x == n) {
    const double lc = q < 0.1 ? -binomial_deviance(dn, dn * p) - dn * q : dn * std::log(p);
    return std::exp(lc);
  }
  const double dx = static_cast<double>(x);
  const double lc = stirling_error(dn) - stirling_error(dx) - stirling_error(dn - dx) -
                    binomial_deviance(dx, dn * p) - binomial_deviance(dn - dx, dn * q);
  const double lf = 2 * kLogSqrt2Pi + std::log(dx) + std::log1p(-dx / dn);
  return std::exp(lc - 0.5 * lf);
}

}  // namespace detail

// b(x | n) = C(n, x) p^x q^(n-x).
inline double binomial_pmf(std::int64_t x, const BinomialSpec& spec) {
  detail::require(x >= 0 && x <= spec.trials, "binomial_pmf: x out of range [0, trials]");
  return detail::binomial_pmf_unchecked(x, spec.trials, spec.success_prob, spec.failure_prob);
}

// P{X > t}: the sum of the pmf over x = max(0, t+1) .. trials, ascending.
inline double binomial_tail_above(std::int64_t t, const BinomialSpec& spec) {
  if (t < 0) return 1.0;
  if (t >= spec.trials) return 0.0;
  CompensatedSum sum;
  for (std::int64_t x = t + 1; x <= spec.trials; ++x) {
    sum.add(detail::binomial_pmf_unchecked(x, spec.trials, spec.success_prob, spec.failure_prob));
  }
  return std::min(1.0, sum.value());
}

// Regularized incomplete beta I_x(a, b), by the modified Lentz evaluation of
// the standard continued fraction with the usual symmetry switch.
inline double regularized_incomplete_beta(double x, double a, double b) {
  detail::require(a > 0.0 && b > 0.0, "incomplete beta: shape parameters must be positive");
  detail::require(x >= 0.0 && x <= 1.0, "incomplete beta: x must lie in [0,1]");
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;

  const auto continued_fraction = [](double xx, double aa, double bb) {
    constexpr double tiny = 1e-300;
    constexpr double eps = 1e-16;
    const double qab = aa + bb;
    const double qap = aa + 1.0;
    const double qam = aa - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * xx / qap;
    if (std::abs(d) < tiny) d = tiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= 100000; ++m) {
      const double m2 = 2.0 * m;
      double coef = m * (bb - m) * xx / ((qam + m2) * (aa + m2));
      d = 1.0 + coef * d;
      if (std::abs(d) < tiny) d = tiny;
      c = 1.0 + coef / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      h *= d * c;
      coef = -(aa + m) * (qab + m) * xx / ((aa + m2) * (qap + m2));
      d = 1.0 + coef * d;
      if (std::abs(d) < tiny) d = tiny;
      c = 1.0 + coef / c;
      if (std::abs(c) < tiny) c = tiny;
      d = 1.0 / d;
      const double delta = d * c;
      h *= delta;
      if (std::abs(delta - 1.0) < eps) return h;
    }
    throw unrepresentable_error("incomplete beta: continued fraction did not converge");
  };

  const double log_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                           a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * continued_fraction(x, a, b) / a;
  }
  return 1.0 - front * continued_fraction(1.0 - x, b, a) / b;
}

// P{X >= t} through the beta-distribution identity:
//   sum_{x=t}^{n} b(x|n) = I_p(t, n - t + 1).
// Independent of the pmf summation; used to cross-check it.
inline double binomial_tail_beta_identity(std::int64_t t, const BinomialSpec& spec) {
  detail::require(t >= 1 && t <= spec.trials,
                  "binomial_tail_beta_identity: t must lie in [1, trials]");
  return regularized_incomplete_beta(spec.success_prob, static_cast<double>(t),
                                     static_cast<double>(spec.trials - t + 1));
}

// Normal approximation of P{X > t} with continuity correction:
//   F(-(t + 0.5 - p n) / sqrt(p q n)).
// Applied unconditionally; callers decide when it is adequate.
inline double binomial_tail_normal_approx(std::int64_t t, const BinomialSpec& spec) {
  detail::require(spec.trials >= 1, "normal approximation needs at least one trial");
  detail::require(spec.success_prob > 0.0 && spec.failure_prob > 0.0,
                  "normal approximation needs 0 < p < 1 (zero variance otherwise)");
  const double mean = spec.success_prob * static_cast<double>(spec.trials);
  const double z = (static_cast<double>(t) + 0.5 - mean) / std::sqrt(spec.variance());
  return std_normal_cdf(-z);
}

// -----------------------------------------------------------------------------
// Truncated normal

// E[Z | Z > t] for Z ~ N(mu, sigma^2): mu + sigma f(a) / F(a), a = (mu - t)/sigma.
inline double truncated_normal_mean_above(double mu, double sigma, double t) {
  detail::require_finite(mu, "mu");
  detail::require_finite(t, "t");
  detail::require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive and finite");
  const double a = (mu - t) / sigma;
  if (!(std_normal_cdf(a) > 0.0)) {
    throw unrepresentable_error("truncated_normal_mean_above: P{Z > t} underflows");
  }
  return mu + sigma * std_normal_hazard(-a);
}

// E[Z | Z <= t] for Z ~ N(mu, sigma^2): mu - sigma f(b) / F(b), b = (t - mu)/sigma.
inline double truncated_normal_mean_below(double mu, double sigma, double t) {
  detail::require_finite(mu, "mu");
  detail::require_finite(t, "t");
  detail::require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive and finite");
  const double b = (t - mu) / sigma;
  if (!(std_normal_cdf(b) > 0.0)) {
    throw unrepresentable_error("truncated_normal_mean_below: P{Z <= t} underflows");
  }
  return mu - sigma * std_normal_hazard(-b);
}

}  // namespace stochvote
