#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "stochvote/errors.hpp"
#include "stochvote/numerics.hpp"

namespace stochvote {

// Society of n participants: `egoists` vote by their own sign, the remaining
// g = n - egoists vote as one bloc. Proposals are i.i.d. N(mu, sigma^2) per
// participant and pass iff more than alpha*n participants vote for them.
class ModelParams {
 public:
  ModelParams(std::int64_t n, std::int64_t egoists, double mu, double sigma, double alpha)
      : n_(n), egoists_(egoists), mu_(mu), sigma_(sigma), alpha_(alpha) {
    detail::require(n >= 1, "n must be at least 1");
    detail::require(egoists >= 0 && egoists <= n, "egoist count must lie in [0, n]");
    detail::require_finite(mu, "mu");
    detail::require(std::isfinite(sigma) && sigma > 0.0, "sigma must be positive and finite");
    detail::require(std::isfinite(alpha) && alpha >= 0.0 && alpha < 1.0,
                    "alpha must lie in [0, 1)");
    const double z = mu / sigma;
    p_ = std_normal_cdf(z);
    q_ = std_normal_cdf(-z);
    f_ = std_normal_pdf(z);
  }

  // beta = egoists / (2n); 2*beta*n must be an integer.
  static ModelParams from_beta(std::int64_t n, double beta, double mu, double sigma,
                               double alpha) {
    detail::require(n >= 1, "n must be at least 1");
    detail::require(std::isfinite(beta) && beta >= 0.0 && beta <= 0.5,
                    "beta must lie in [0, 0.5]");
    const double count = 2.0 * beta * static_cast<double>(n);
    const double rounded = std::round(count);
    if (std::abs(count - rounded) > 1e-9 * std::max(1.0, count)) {
      throw parameter_error("2*beta*n = " + std::to_string(count) +
                            " is not an integer egoist count; give the egoist count instead");
    }
    return {n, static_cast<std::int64_t>(rounded), mu, sigma, alpha};
  }

  ModelParams with_alpha(double alpha) const { return {n_, egoists_, mu_, sigma_, alpha}; }

  std::int64_t n() const { return n_; }
  std::int64_t egoists() const { return egoists_; }
  std::int64_t group() const { return n_ - egoists_; }
  double beta() const { return static_cast<double>(egoists_) / (2.0 * static_cast<double>(n_)); }
  double mu() const { return mu_; }
  double sigma() const { return sigma_; }
  double alpha() const { return alpha_; }
  // gamma = alpha - (1 - 2 beta) = alpha - g/n.
  double gamma() const { return alpha_ - static_cast<double>(group()) / static_cast<double>(n_); }

  // p = P{d_i > 0} = F(mu/sigma); q = 1 - p; f = f(mu/sigma).
  double p() const { return p_; }
  double q() const { return q_; }
  double f() const { return f_; }

  // [alpha n]: a proposal passes with at least this many votes plus one.
  std::int64_t alpha_votes() const {
    return integer_part(alpha_ * static_cast<double>(n_));
  }
  // [gamma n] = [alpha n] - g, exactly.
  std::int64_t gamma_votes() const { return alpha_votes() - group(); }

  BinomialSpec egoist_vote_law() const { return {egoists_, p_, q_}; }
  BinomialSpec group_vote_law() const { return {group(), p_, q_}; }

 private:
  std::int64_t n_;
  std::int64_t egoists_;
  double mu_;
  double sigma_;
  double alpha_;
  double p_;
  double q_;
  double f_;
};

// How the bloc decides to support a proposal.
//   A:  more group members gain than lose
//   B:  the group's summed increment is positive
//   A': share of gaining members exceeds alpha'(alpha, beta)
//   A'': share of gaining members exceeds alpha
enum class Principle { A, B, APrime, ADoublePrime };

inline constexpr std::array<Principle, 4> kAllPrinciples = {
    Principle::A, Principle::B, Principle::APrime, Principle::ADoublePrime};

inline std::string_view to_string(Principle principle) {
  switch (principle) {
    case Principle::A: return "A";
    case Principle::B: return "B";
    case Principle::APrime: return "Aprime";
    case Principle::ADoublePrime: return "Adprime";
  }
  return "?";
}

inline Principle parse_principle(std::string_view name) {
  if (name == "A") return Principle::A;
  if (name == "B") return Principle::B;
  if (name == "Aprime" || name == "A'" || name == "A1") return Principle::APrime;
  if (name == "Adprime" || name == "Adoubleprime" || name == "A''" || name == "A2") {
    return Principle::ADoublePrime;
  }
  throw parameter_error("unknown principle '" + std::string(name) +
                        "' (expected A, B, Aprime or Adprime)");
}

inline bool is_count_principle(Principle principle) { return principle != Principle::B; }

enum class EvalMode { exact, approx, auto_select };

inline std::string_view to_string(EvalMode mode) {
  switch (mode) {
    case EvalMode::exact: return "exact";
    case EvalMode::approx: return "approx";
    case EvalMode::auto_select: return "auto";
  }
  return "?";
}

// Internal support threshold of Principle A' as a share of the group:
//   alpha/(2 beta)            for alpha < beta
//   1 - (1 - alpha)/(2 beta)  for alpha > 1 - beta
//   1/2                       otherwise
inline double alpha_prime(double alpha, double beta) {
  detail::require(std::isfinite(alpha) && alpha >= 0.0 && alpha < 1.0,
                  "alpha must lie in [0, 1)");
  detail::require(std::isfinite(beta) && beta > 0.0 && beta <= 0.5,
                  "Principle A' needs beta in (0, 0.5]: without egoists alpha' is undefined");
  if (alpha < beta) return alpha / (2.0 * beta);
  if (alpha > 1.0 - beta) return 1.0 - (1.0 - alpha) / (2.0 * beta);
  return 0.5;
}

// Group-internal vote threshold (in members, before taking the integer part)
// for the count-based principles; nullopt for B.
inline std::optional<double> group_vote_threshold(const ModelParams& params, Principle principle) {
  const double g = static_cast<double>(params.group());
  switch (principle) {
    case Principle::A: return g / 2.0;
    case Principle::APrime: return alpha_prime(params.alpha(), params.beta()) * g;
    case Principle::ADoublePrime: return params.alpha() * g;
    case Principle::B: return std::nullopt;
  }
  return std::nullopt;
}

}  // namespace stochvote
