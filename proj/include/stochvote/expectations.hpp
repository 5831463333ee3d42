#pragma once

// Expected one-step capital increments of an egoist and of a group member.
//
// Egoist:  M_E = mu+(l, [gamma n]) P_G + mu+(l, [alpha n]) Q_G
// Group:   M_G = mu P_alpha + inner (P_gamma - P_alpha)
//
// where P_G is the probability of group support, P_theta = P{more than
// theta*n egoists vote for}, and `inner` is the group member's expectation
// on the event that the bloc's vote decides (mu+(g, internal threshold) for
// the count principles, mu+(mu, sigma/sqrt g, 1, 0) for B).

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "stochvote/errors.hpp"
#include "stochvote/model.hpp"
#include "stochvote/numerics.hpp"
#include "stochvote/voting_sample.hpp"

namespace stochvote {

struct EvalOptions {
  // Count principles in approximate mode: use the normal approximation of
  // P_G instead of the exact binomial tail.
  bool approximate_group_support = false;
};

// One-step expectations plus the probabilities they are built from.
struct StepExpectation {
  EvalMode mode = EvalMode::exact;     // resolved: exact or approx
  std::optional<double> egoist;        // absent when there are no egoists
  std::optional<double> group;         // absent when there is no group
  double p_gamma = 0.0;                // P{egoist votes > gamma n}
  double p_alpha = 0.0;                // P{egoist votes > alpha n}
  double p_group_support = 0.0;        // P_G (0 without a group)
};

// auto picks the approximation only when p q l >= 9 and p q g >= 9.
inline EvalMode resolve_mode(const ModelParams& params, EvalMode mode) {
  if (mode != EvalMode::auto_select) return mode;
  const double pq = params.p() * params.q();
  const bool large = pq * static_cast<double>(params.egoists()) >= 9.0 &&
                     pq * static_cast<double>(params.group()) >= 9.0;
  return large ? EvalMode::approx : EvalMode::exact;
}

// P_G for the given principle. A-family: P{more than [theta g] members gain};
// B: F(mu sqrt(g) / sigma).
inline double group_support_probability(const ModelParams& params, Principle principle,
                                        bool approximate = false) {
  detail::require(params.group() >= 1, "group support needs a group (g >= 1)");
  if (principle == Principle::B) {
    return std_normal_cdf(params.mu() * std::sqrt(static_cast<double>(params.group())) /
                          params.sigma());
  }
  const std::int64_t threshold = integer_part(*group_vote_threshold(params, principle));
  const BinomialSpec law = params.group_vote_law();
  return approximate ? binomial_tail_normal_approx(threshold, law)
                     : binomial_tail_above(threshold, law);
}

namespace detail {

inline double support_or_zero(const ModelParams& params, Principle principle, bool approximate) {
  return params.group() >= 1 ? group_support_probability(params, principle, approximate) : 0.0;
}

inline StepExpectation evaluate_exact(const ModelParams& params, Principle principle) {
  StepExpectation out;
  out.mode = EvalMode::exact;
  const std::int64_t ell = params.egoists();
  const std::int64_t g = params.group();
  const double alpha_n = static_cast<double>(params.alpha_votes());
  const double gamma_n = static_cast<double>(params.gamma_votes());

  out.p_group_support = support_or_zero(params, principle, false);
  const BinomialSpec egoist_law = params.egoist_vote_law();
  out.p_alpha = binomial_tail_above(params.alpha_votes(), egoist_law);
  out.p_gamma = binomial_tail_above(params.gamma_votes(), egoist_law);

  if (ell >= 1) {
    const double given_support =
        mu_plus_exact({params.mu(), params.sigma(), ell, gamma_n});
    const double given_no_support =
        mu_plus_exact({params.mu(), params.sigma(), ell, alpha_n});
    out.egoist = given_support * out.p_group_support +
                 given_no_support * (1.0 - out.p_group_support);
  }
  if (g >= 1) {
    double inner = 0.0;
    if (principle == Principle::B) {
      inner = mu_plus_exact(
          {params.mu(), params.sigma() / std::sqrt(static_cast<double>(g)), 1, 0.0});
    } else {
      inner = mu_plus_exact(
          {params.mu(), params.sigma(), g, *group_vote_threshold(params, principle)});
    }
    out.group = params.mu() * out.p_alpha + inner * (out.p_gamma - out.p_alpha);
  }
  return out;
}

inline StepExpectation evaluate_approx(const ModelParams& params, Principle principle,
                                       const EvalOptions& options) {
  StepExpectation out;
  out.mode = EvalMode::approx;
  const std::int64_t ell = params.egoists();
  const std::int64_t g = params.group();
  require(ell >= 1 && params.p() > 0.0 && params.q() > 0.0,
          "approximate mode needs at least one egoist and 0 < p < 1");

  // B always uses its exact P_G; the count principles use the exact tail
  // unless asked otherwise.
  const bool approximate_support =
      principle != Principle::B && options.approximate_group_support;
  out.p_group_support = support_or_zero(params, principle, approximate_support);

  const BinomialSpec egoist_law = params.egoist_vote_law();
  out.p_alpha = binomial_tail_normal_approx(params.alpha_votes(), egoist_law);
  out.p_gamma = binomial_tail_normal_approx(params.gamma_votes(), egoist_law);

  const double alpha_n = static_cast<double>(params.alpha_votes());
  const double gamma_n = static_cast<double>(params.gamma_votes());
  out.egoist = mu_plus_approx({params.mu(), params.sigma(), ell, gamma_n}) * out.p_group_support +
               mu_plus_approx({params.mu(), params.sigma(), ell, alpha_n}) *
                   (1.0 - out.p_group_support);

  if (g >= 1) {
    const double dg = static_cast<double>(g);
    double inner = 0.0;
    if (principle == Principle::B) {
      const double zg = params.mu() * std::sqrt(dg) / params.sigma();
      inner = params.mu() * out.p_group_support +
              params.sigma() / std::sqrt(dg) * std_normal_pdf(zg);
    } else {
      const double variance = params.p() * params.q() * dg;
      const double sd = std::sqrt(variance);
      const double threshold =
          static_cast<double>(integer_part(*group_vote_threshold(params, principle)));
      const double density = std_normal_pdf((threshold + 0.5 - params.p() * dg) / sd);
      inner = params.mu() * out.p_group_support + params.sigma() * params.f() * density / sd;
    }
    out.group = params.mu() * out.p_alpha + inner * (out.p_gamma - out.p_alpha);
  }
  return out;
}

}  // namespace detail

inline StepExpectation evaluate(const ModelParams& params, Principle principle, EvalMode mode,
                                const EvalOptions& options = {}) {
  if (principle == Principle::APrime) {
    detail::require(params.egoists() >= 1,
                    "Principle A' is undefined without egoists (beta = 0)");
  }
  return resolve_mode(params, mode) == EvalMode::approx
             ? detail::evaluate_approx(params, principle, options)
             : detail::evaluate_exact(params, principle);
}

inline double expected_egoist_increment(const ModelParams& params, Principle principle,
                                        EvalMode mode, const EvalOptions& options = {}) {
  detail::require(params.egoists() >= 1, "egoist expectation needs at least one egoist");
  return *evaluate(params, principle, mode, options).egoist;
}

inline double expected_group_increment(const ModelParams& params, Principle principle,
                                       EvalMode mode, const EvalOptions& options = {}) {
  detail::require(params.group() >= 1, "group expectation needs at least one group member");
  return *evaluate(params, principle, mode, options).group;
}

// -----------------------------------------------------------------------------
// Sweeps over alpha

struct SweepPoint {
  double alpha = 0.0;
  Principle principle = Principle::A;
  EvalMode mode = EvalMode::exact;
  std::optional<double> egoist_step_mean;
  std::optional<double> group_step_mean;
  std::optional<double> egoist_total;  // steps * egoist_step_mean
  std::optional<double> group_total;
  double p_accept_given_support = 0.0;     // P_gamma
  double p_accept_given_no_support = 0.0;  // P_alpha
  double p_group_support = 0.0;
};

inline std::optional<double> scaled(std::optional<double> value, std::int64_t steps) {
  if (!value) return std::nullopt;
  return *value * static_cast<double>(steps);
}

inline SweepPoint make_sweep_point(const ModelParams& params, Principle principle,
                                   EvalMode mode, std::int64_t steps,
                                   const EvalOptions& options = {}) {
  const StepExpectation e = evaluate(params, principle, mode, options);
  return {params.alpha(), principle, e.mode, e.egoist, e.group,
          scaled(e.egoist, steps), scaled(e.group, steps),
          e.p_gamma, e.p_alpha, e.p_group_support};
}

// alpha = start + k*step for k = 0, 1, ... while alpha <= stop (1e-12 slack).
inline std::vector<double> alpha_grid(double start, double stop, double step) {
  detail::require(std::isfinite(start) && std::isfinite(stop) && std::isfinite(step),
                  "alpha range must be finite");
  detail::require(start >= 0.0 && stop < 1.0, "alpha range must lie within [0, 1)");
  detail::require(start <= stop, "alpha range start must not exceed stop");
  detail::require(step > 0.0, "alpha step must be positive");
  std::vector<double> grid;
  for (std::int64_t k = 0;; ++k) {
    const double a = start + static_cast<double>(k) * step;
    if (a > stop + 1e-12) break;
    grid.push_back(std::min(a, stop));
  }
  return grid;
}

// Evaluates `model` (its alpha is ignored) at every grid value, in order.
inline std::vector<SweepPoint> sweep(const ModelParams& model, Principle principle,
                                     EvalMode mode, std::span<const double> alphas,
                                     std::int64_t steps, const EvalOptions& options = {}) {
  detail::require(!alphas.empty(), "alpha grid is empty");
  detail::require(steps >= 1, "number of steps s must be at least 1");
  std::vector<SweepPoint> points;
  points.reserve(alphas.size());
  for (double a : alphas) {
    points.push_back(make_sweep_point(model.with_alpha(a), principle, mode, steps, options));
  }
  return points;
}

}  // namespace stochvote
