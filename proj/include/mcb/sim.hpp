#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "mcb/core.hpp"
#include "mcb/rng.hpp"

namespace mcb {

// ---------------------------------------------------------------------------
// Arrivals

enum class ArrivalKind { kRoundRobin, kIidUniform, kBlockShuffled };

struct ArrivalModel {
  ArrivalKind kind = ArrivalKind::kRoundRobin;

  static ArrivalModel round_robin() { return {ArrivalKind::kRoundRobin}; }
  static ArrivalModel iid_uniform() { return {ArrivalKind::kIidUniform}; }
  static ArrivalModel block_shuffled() { return {ArrivalKind::kBlockShuffled}; }
  std::string to_string() const;
  static ArrivalModel parse(const std::string& text);
};

class ArrivalProcess {
 public:
  ArrivalProcess(ArrivalModel model, int num_users, std::uint64_t seed);
  // User arriving at step t (1-based). Calls must be made with t = 1, 2, ...
  int user_at(std::int64_t t);

 private:
  ArrivalModel model_;
  int num_users_;
  std::uint64_t seed_;
  CounterStream draws_;
  std::int64_t block_ = -1;
  std::vector<int> perm_;
};

/// Largest max_i n_i(t) / min_i n_i(t) over from_t <= t <= T (from_t defaults to L).
/// Returns +inf if some user has not arrived by from_t.
double verify_arrival(const ArrivalModel& arrival, int num_users, std::int64_t horizon, std::uint64_t seed,
                      std::int64_t from_t = -1);

// ---------------------------------------------------------------------------
// Population and adversaries

enum class AdversaryKind { kHonest, kBoost, kFlip, kConstant, kLeCam };
enum class ContextChoice { kUniform, kFixed };

struct AdversaryStrategy {
  AdversaryKind kind = AdversaryKind::kHonest;
  ContextChoice context_choice = ContextChoice::kUniform;
  int fixed_context = 0;
  // boost: reward_hi on target[s], reward_lo elsewhere. An empty target means the
  // lowest-index suboptimal arm of every context.
  std::vector<int> target;
  double reward_hi = 1.0;
  double reward_lo = 0.0;
  // constant: every reported reward.
  double constant = 0.0;
  // lecam: hidden optimal arm per context; tapes live on the population.
  std::vector<int> a_star;

  static AdversaryStrategy honest() { return {}; }
  static AdversaryStrategy boost(double hi = 1.0, double lo = 0.0) {
    AdversaryStrategy a;
    a.kind = AdversaryKind::kBoost;
    a.reward_hi = hi;
    a.reward_lo = lo;
    return a;
  }
  static AdversaryStrategy flip() {
    AdversaryStrategy a;
    a.kind = AdversaryKind::kFlip;
    return a;
  }
  static AdversaryStrategy constant_reward(double value) {
    AdversaryStrategy a;
    a.kind = AdversaryKind::kConstant;
    a.constant = value;
    return a;
  }
  AdversaryStrategy& in_context(int s) {
    context_choice = ContextChoice::kFixed;
    fixed_context = s;
    return *this;
  }

  // Compact text form used in configs and CSV rows, e.g. "boost:1:0", "constant:1e6",
  // "flip", "honest", with an optional "@s" suffix pinning the reported context.
  std::string to_string() const;
  static AdversaryStrategy parse(const std::string& text);
};

enum class AdversaryCount { kExact, kBernoulli };

struct Population {
  int num_users = 0;
  std::vector<std::uint8_t> good;  // I*
  AdversaryStrategy adversary;
  double hetero_eps0 = 0.0;
  // Per-user S x A tables for good users when heterogeneous; empty otherwise.
  std::vector<std::vector<double>> per_user_mu;
  // lecam: one reward tape per user, consumed in order on a*-plays.
  std::vector<std::vector<std::uint8_t>> tapes;

  int num_good() const;
  bool is_good(int i) const { return good[static_cast<std::size_t>(i)] != 0; }
  // Good user whose task is used for evaluation, chosen uniformly from I*.
  int pick_good_user(std::uint64_t seed) const;
  // Task seen by good user i (shared instance unless heterogeneous).
  BanditInstance task_of(const BanditInstance& shared, int i) const;
};

/// floor(alpha * L) adversaries placed uniformly at random (kExact), or each user
/// adversarial with probability alpha (kBernoulli).
Population make_population(int num_users, double alpha, AdversaryStrategy adversary, std::uint64_t seed,
                           AdversaryCount count = AdversaryCount::kExact);

/// Good users receive private mean tables mu + U[-eps0, eps0], clamped to the legal range.
Population perturb_population(const BanditInstance& instance, int num_users, double alpha, double eps0,
                              std::uint64_t seed, AdversaryStrategy adversary = AdversaryStrategy::honest());

// ---------------------------------------------------------------------------
// Interaction

struct Record {
  std::int64_t t = 0;
  int user = 0;
  int context = 0;
  int action = 0;
  double reward = 0.0;
};

class InteractionLog {
 public:
  InteractionLog(int num_users = 0, int num_contexts = 0);

  void append(const Record& r);
  const std::vector<Record>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  std::int64_t user_count(int i) const { return user_counts_[static_cast<std::size_t>(i)]; }
  std::int64_t context_count(int s) const { return context_counts_[static_cast<std::size_t>(s)]; }
  int num_users() const { return static_cast<int>(user_counts_.size()); }
  int num_contexts() const { return static_cast<int>(context_counts_.size()); }

 private:
  std::vector<Record> records_;
  std::vector<std::int64_t> user_counts_;
  std::vector<std::int64_t> context_counts_;
};

/// Learner side of the protocol. `history` never exposes which users are adversarial.
class Agent {
 public:
  virtual ~Agent() = default;
  virtual int choose(int user, int context, const InteractionLog& history) = 0;
  virtual void observe(double reward) = 0;
};

struct RngStreams {
  CounterStream arrivals;
  CounterStream contexts;
  CounterStream rewards;
  CounterStream adversary;
  std::uint64_t arrival_seed;
  std::uint64_t agent_seed;

  explicit RngStreams(std::uint64_t master);
};

/// Runs the protocol step by step; successive run() calls continue the same clock.
class Environment {
 public:
  Environment(BanditInstance instance, Population population, ArrivalModel arrival, std::uint64_t seed);

  void run(Agent& agent, std::int64_t steps);
  // Stop-early variant: the predicate sees each completed record.
  template <typename Stop>
  void run_until(Agent& agent, std::int64_t steps, Stop&& stop) {
    for (std::int64_t k = 0; k < steps; ++k) {
      step(agent);
      if (stop(log_.records().back())) break;
    }
  }

  const BanditInstance& instance() const { return instance_; }
  const Population& population() const { return population_; }
  const InteractionLog& log() const { return log_; }
  // Analysis only; agents never see this.
  const std::vector<std::uint8_t>& adversarial_flags() const { return adversarial_; }
  std::int64_t time() const { return t_; }
  std::uint64_t agent_seed() const { return streams_.agent_seed; }
  std::uint64_t seed() const { return seed_; }

 private:
  void step(Agent& agent);
  double good_reward(int user, int context, int action) const;
  double draw_reward(double mean) const;
  int adversary_context() const;
  double adversary_reward(int user, int context, int action);

  BanditInstance instance_;
  Population population_;
  std::uint64_t seed_;
  RngStreams streams_;
  ArrivalProcess arrivals_;
  InteractionLog log_;
  std::vector<std::uint8_t> adversarial_;
  std::vector<std::size_t> tape_pos_;
  std::vector<int> boost_target_;
  std::vector<double> context_cdf_;
  std::int64_t t_ = 0;
};

struct EpisodeResult {
  InteractionLog log;
  std::vector<std::uint8_t> adversarial;
};

EpisodeResult run_episode(const BanditInstance& instance, const Population& population, const ArrivalModel& arrival,
                          Agent& agent, std::int64_t horizon, std::uint64_t seed);

// CSV with columns t,user,context,action,reward,is_adversarial.
void write_transcript_csv(std::ostream& os, const InteractionLog& log, const std::vector<std::uint8_t>& adversarial);

}  // namespace mcb
