#pragma once

// Monte Carlo simulation of the voting process, step by step.
//
// Each step draws one proposal d ~ N(mu, sigma^2)^n, counts egoist votes
// (d_i > 0 strictly), lets the group vote as a bloc under its principle and
// accepts iff at least [alpha n] + 1 votes are for. Capitals change only on
// acceptance. Replications are independent and may run on several threads;
// per-block results are merged in a fixed order, so output does not depend
// on the thread count.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <new>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "stochvote/errors.hpp"
#include "stochvote/model.hpp"
#include "stochvote/numerics.hpp"
#include "stochvote/rng.hpp"

namespace stochvote {

// Vote-count requirements derived once from the parameters.
struct BallotRule {
  std::int64_t egoists = 0;
  std::int64_t group = 0;
  Principle principle = Principle::A;
  std::int64_t required_votes = 1;           // [alpha n] + 1
  std::int64_t required_group_positive = 1;  // [theta g] + 1 for count principles
  std::int64_t gamma_votes = 0;              // [gamma n], diagnostics only

  BallotRule(const ModelParams& params, Principle p)
      : egoists(params.egoists()),
        group(params.group()),
        principle(p),
        required_votes(params.alpha_votes() + 1),
        gamma_votes(params.gamma_votes()) {
    if (group >= 1 && is_count_principle(p)) {
      required_group_positive = integer_part(*group_vote_threshold(params, p)) + 1;
    }
  }
};

struct Ballot {
  std::int64_t egoist_votes = 0;
  std::int64_t group_positive = 0;
  double group_sum = 0.0;
  bool group_supports = false;
  bool accepted = false;
};

// `increments` holds the egoists' entries first, then the group's.
inline Ballot tally(std::span<const double> increments, const BallotRule& rule) {
  Ballot b;
  for (std::int64_t i = 0; i < rule.egoists; ++i) {
    if (increments[i] > 0.0) ++b.egoist_votes;
  }
  for (std::int64_t i = rule.egoists; i < rule.egoists + rule.group; ++i) {
    if (increments[i] > 0.0) ++b.group_positive;
    b.group_sum += increments[i];
  }
  if (rule.group >= 1) {
    b.group_supports = rule.principle == Principle::B
                           ? b.group_sum > 0.0
                           : b.group_positive >= rule.required_group_positive;
  }
  const std::int64_t votes = b.egoist_votes + (b.group_supports ? rule.group : 0);
  b.accepted = votes >= rule.required_votes;
  return b;
}

// Capitals of one simulated society. Per-role sums always; per-participant
// values only when requested.
class SimState {
 public:
  explicit SimState(const ModelParams& params, bool per_participant = false)
      : proposal_(static_cast<std::size_t>(params.n())) {
    if (per_participant) participants_.assign(static_cast<std::size_t>(params.n()), 0.0);
  }

  double egoist_capital_sum() const { return egoist_sum_; }
  double group_capital_sum() const { return group_sum_; }
  bool tracks_participants() const { return !participants_.empty(); }
  std::span<const double> participant_capitals() const { return participants_; }
  std::span<const double> last_proposal() const { return proposal_; }

 private:
  friend struct StepKernel;
  std::vector<double> proposal_;
  std::vector<double> participants_;
  double egoist_sum_ = 0.0;
  double group_sum_ = 0.0;
};

struct StepOutcome {
  Ballot ballot;
  double egoist_increment = 0.0;  // summed over egoists, 0 when rejected
  double group_increment = 0.0;
};

struct StepKernel {
  static void draw(SimState& state, const ModelParams& params, NormalSampler& rng) {
    for (double& d : state.proposal_) d = rng(params.mu(), params.sigma());
  }

  static StepOutcome decide(SimState& state, const BallotRule& rule) {
    StepOutcome out;
    out.ballot = tally(state.proposal_, rule);
    if (!out.ballot.accepted) return out;
    const auto ego = static_cast<std::size_t>(rule.egoists);
    for (std::size_t i = 0; i < ego; ++i) out.egoist_increment += state.proposal_[i];
    out.group_increment = out.ballot.group_sum;
    state.egoist_sum_ += out.egoist_increment;
    state.group_sum_ += out.group_increment;
    if (!state.participants_.empty()) {
      for (std::size_t i = 0; i < state.proposal_.size(); ++i) {
        state.participants_[i] += state.proposal_[i];
      }
    }
    return out;
  }
};

inline StepOutcome simulate_step(SimState& state, const ModelParams& params,
                                 const BallotRule& rule, NormalSampler& rng) {
  StepKernel::draw(state, params, rng);
  return StepKernel::decide(state, rule);
}

inline StepOutcome simulate_step(SimState& state, const ModelParams& params, Principle principle,
                                 NormalSampler& rng) {
  return simulate_step(state, params, BallotRule(params, principle), rng);
}

// -----------------------------------------------------------------------------
// Replicated runs

struct SimConfig {
  ModelParams params;
  Principle principle = Principle::A;
  std::int64_t steps = 1;
  std::int64_t replications = 1;
  std::uint64_t seed = 0;
  // Keep the per-participant capital path of replication 0.
  bool record_trajectory = false;
  // 0 = hardware concurrency.
  unsigned threads = 0;
};

struct Estimate {
  double mean = 0.0;
  double half_width = 0.0;  // 1.96 * sample std / sqrt(replications)
};

struct TrajectoryStats {
  std::optional<Estimate> mean_egoist_increment;  // per step
  std::optional<Estimate> mean_group_increment;
  std::optional<double> final_egoist_capital;     // mean final capital, start at 0
  std::optional<double> final_group_capital;
  double acceptance_rate = 0.0;
  // Empirical frequencies of the events behind P_gamma, P_alpha and P_G.
  double egoists_exceed_gamma_rate = 0.0;
  double egoists_exceed_alpha_rate = 0.0;
  double group_support_rate = 0.0;
  std::uint64_t seed_used = 0;
  std::int64_t replications = 0;
  std::int64_t steps = 0;
  // capitals[t][i] after step t for replication 0, if recorded.
  std::optional<std::vector<std::vector<double>>> trajectory;
};

namespace detail {

// Welford accumulator with Chan's pairwise merge.
struct RunningMoments {
  std::int64_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }

  void merge(const RunningMoments& other) {
    if (other.count == 0) return;
    if (count == 0) {
      *this = other;
      return;
    }
    const double total = static_cast<double>(count + other.count);
    const double delta = other.mean - mean;
    mean += delta * static_cast<double>(other.count) / total;
    m2 += other.m2 + delta * delta * static_cast<double>(count) *
                         static_cast<double>(other.count) / total;
    count += other.count;
  }

  double half_width() const {
    if (count < 2) return std::numeric_limits<double>::infinity();
    const double variance = m2 / static_cast<double>(count - 1);
    return 1.96 * std::sqrt(variance / static_cast<double>(count));
  }
};

struct BlockResult {
  RunningMoments egoist;
  RunningMoments group;
  std::int64_t accepted = 0;
  std::int64_t exceed_gamma = 0;
  std::int64_t exceed_alpha = 0;
  std::int64_t supported = 0;

  void merge(const BlockResult& o) {
    egoist.merge(o.egoist);
    group.merge(o.group);
    accepted += o.accepted;
    exceed_gamma += o.exceed_gamma;
    exceed_alpha += o.exceed_alpha;
    supported += o.supported;
  }
};

inline constexpr std::int64_t kReplicationBlock = 1024;

inline void run_replication(const SimConfig& config, const BallotRule& rule, std::int64_t r,
                            BlockResult& block,
                            std::vector<std::vector<double>>* trajectory) {
  const ModelParams& params = config.params;
  NormalSampler rng(replication_seed(config.seed, static_cast<std::uint64_t>(r)));
  SimState state(params, trajectory != nullptr);
  for (std::int64_t t = 0; t < config.steps; ++t) {
    const StepOutcome step = simulate_step(state, params, rule, rng);
    block.accepted += step.ballot.accepted ? 1 : 0;
    block.exceed_gamma += step.ballot.egoist_votes > rule.gamma_votes ? 1 : 0;
    block.exceed_alpha += step.ballot.egoist_votes >= rule.required_votes ? 1 : 0;
    block.supported += step.ballot.group_supports ? 1 : 0;
    if (trajectory) {
      const auto caps = state.participant_capitals();
      trajectory->emplace_back(caps.begin(), caps.end());
    }
  }
  if (rule.egoists >= 1) {
    block.egoist.add(state.egoist_capital_sum() / static_cast<double>(rule.egoists));
  }
  if (rule.group >= 1) {
    block.group.add(state.group_capital_sum() / static_cast<double>(rule.group));
  }
}

}  // namespace detail

inline TrajectoryStats run(const SimConfig& config) {
  detail::require(config.steps >= 1, "steps must be at least 1");
  detail::require(config.replications >= 1, "replications must be at least 1");
  if (config.principle == Principle::APrime) {
    detail::require(config.params.egoists() >= 1,
                    "Principle A' is undefined without egoists (beta = 0)");
  }
  constexpr double kMaxTrajectoryValues = 5e7;
  if (config.record_trajectory &&
      static_cast<double>(config.steps) * static_cast<double>(config.params.n()) >
          kMaxTrajectoryValues) {
    throw resource_error("trajectory of steps*n values exceeds the 5e7 recording limit");
  }

  const BallotRule rule(config.params, config.principle);
  const std::int64_t blocks =
      (config.replications + detail::kReplicationBlock - 1) / detail::kReplicationBlock;
  std::vector<detail::BlockResult> results(static_cast<std::size_t>(blocks));
  std::vector<std::vector<double>> trajectory;

  std::atomic<std::int64_t> next_block{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};
  const auto worker = [&] {
    try {
      for (;;) {
        const std::int64_t b = next_block.fetch_add(1);
        if (b >= blocks || failed.load()) return;
        const std::int64_t begin = b * detail::kReplicationBlock;
        const std::int64_t end =
            std::min(config.replications, begin + detail::kReplicationBlock);
        for (std::int64_t r = begin; r < end; ++r) {
          const bool record = config.record_trajectory && r == 0;
          detail::run_replication(config, rule, r, results[static_cast<std::size_t>(b)],
                                  record ? &trajectory : nullptr);
        }
      }
    } catch (...) {
      if (!failed.exchange(true)) failure = std::current_exception();
    }
  };

  unsigned threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(blocks)));
  {
    std::vector<std::jthread> pool;
    for (unsigned i = 1; i < threads; ++i) pool.emplace_back(worker);
    worker();
  }
  if (failure) {
    try {
      std::rethrow_exception(failure);
    } catch (const std::bad_alloc&) {
      throw resource_error("simulation ran out of memory");
    }
  }

  detail::BlockResult total;
  for (const auto& block : results) total.merge(block);

  TrajectoryStats stats;
  const double steps = static_cast<double>(config.steps);
  const double step_count = steps * static_cast<double>(config.replications);
  if (total.egoist.count > 0) {
    stats.mean_egoist_increment = Estimate{total.egoist.mean / steps,
                                           total.egoist.half_width() / steps};
    stats.final_egoist_capital = total.egoist.mean;
  }
  if (total.group.count > 0) {
    stats.mean_group_increment = Estimate{total.group.mean / steps,
                                          total.group.half_width() / steps};
    stats.final_group_capital = total.group.mean;
  }
  stats.acceptance_rate = static_cast<double>(total.accepted) / step_count;
  stats.egoists_exceed_gamma_rate = static_cast<double>(total.exceed_gamma) / step_count;
  stats.egoists_exceed_alpha_rate = static_cast<double>(total.exceed_alpha) / step_count;
  stats.group_support_rate = static_cast<double>(total.supported) / step_count;
  stats.seed_used = config.seed;
  stats.replications = config.replications;
  stats.steps = config.steps;
  if (config.record_trajectory) stats.trajectory = std::move(trajectory);
  return stats;
}

}  // namespace stochvote
