#include <algorithm>
#include <cmath>

#include "mcb/error.hpp"
#include "mcb/sim.hpp"

namespace mcb {

InteractionLog::InteractionLog(int num_users, int num_contexts)
    : user_counts_(static_cast<std::size_t>(num_users), 0), context_counts_(static_cast<std::size_t>(num_contexts), 0) {}

void InteractionLog::append(const Record& r) {
  if (!records_.empty() && r.t <= records_.back().t) fail(ErrorCode::kInternal, "log times must increase");
  records_.push_back(r);
  ++user_counts_[static_cast<std::size_t>(r.user)];
  ++context_counts_[static_cast<std::size_t>(r.context)];
}

RngStreams::RngStreams(std::uint64_t master)
    : arrivals(derive_seed(master, "arrivals")),
      contexts(derive_seed(master, "contexts")),
      rewards(derive_seed(master, "rewards")),
      adversary(derive_seed(master, "adversary")),
      arrival_seed(derive_seed(master, "arrivals")),
      agent_seed(derive_seed(master, "agent")) {}

Environment::Environment(BanditInstance instance, Population population, ArrivalModel arrival, std::uint64_t seed)
    : instance_(std::move(instance)),
      population_(std::move(population)),
      seed_(seed),
      streams_(seed),
      arrivals_(arrival, population_.num_users, streams_.arrival_seed),
      log_(population_.num_users, instance_.num_contexts()) {
  const int S = instance_.num_contexts();
  const int A = instance_.num_actions();
  require(population_.num_users >= 1 && population_.good.size() == static_cast<std::size_t>(population_.num_users),
          "population is malformed");
  const auto& adv = population_.adversary;
  if (adv.context_choice == ContextChoice::kFixed) {
    require(adv.fixed_context >= 0 && adv.fixed_context < S, "adversary context pin out of range");
  }
  if (adv.kind == AdversaryKind::kBoost) {
    if (adv.target.empty()) {
      boost_target_.resize(static_cast<std::size_t>(S));
      for (int s = 0; s < S; ++s) {
        const int best = argmax_lowest(instance_.mu_row(s));
        boost_target_[static_cast<std::size_t>(s)] = (A == 1) ? 0 : (best == 0 ? 1 : 0);
      }
    } else {
      if (adv.target.size() != static_cast<std::size_t>(S)) fail(ErrorCode::kDimensionMismatch, "boost target size");
      for (int a : adv.target) require(a >= 0 && a < A, "boost target arm out of range");
      boost_target_ = adv.target;
    }
  }
  if (adv.kind == AdversaryKind::kLeCam) {
    if (adv.a_star.size() != static_cast<std::size_t>(S)) fail(ErrorCode::kDimensionMismatch, "lecam a* table size");
    if (population_.tapes.size() != static_cast<std::size_t>(population_.num_users)) {
      fail(ErrorCode::kDimensionMismatch, "lecam adversaries need one tape per user");
    }
    tape_pos_.assign(static_cast<std::size_t>(population_.num_users), 0);
  }
  context_cdf_.resize(static_cast<std::size_t>(S));
  double acc = 0.0;
  for (int s = 0; s < S; ++s) context_cdf_[static_cast<std::size_t>(s)] = (acc += instance_.nu()[s]);
}

double Environment::draw_reward(double mean) const {
  const auto t = static_cast<std::uint64_t>(t_);
  if (instance_.noise().kind == NoiseKind::kBernoulli) return streams_.rewards.uniform(t) < mean ? 1.0 : 0.0;
  // Symmetric truncation keeps the mean and shrinks the variance.
  const double sd = std::sqrt(instance_.noise().variance);
  for (std::uint64_t j = 0;; ++j) {
    const double z = streams_.rewards.normal(t, j);
    if (std::abs(z) <= NoiseLaw::kTruncation) return mean + sd * z;
  }
}

double Environment::good_reward(int user, int context, int action) const {
  const auto& tables = population_.per_user_mu;
  if (!tables.empty() && !tables[static_cast<std::size_t>(user)].empty()) {
    return draw_reward(tables[static_cast<std::size_t>(user)][static_cast<std::size_t>(context) *
                                                                 instance_.num_actions() + action]);
  }
  return draw_reward(instance_.mu(context, action));
}

int Environment::adversary_context() const {
  const auto& adv = population_.adversary;
  if (adv.context_choice == ContextChoice::kFixed) return adv.fixed_context;
  return static_cast<int>(
      streams_.adversary.below(static_cast<std::uint64_t>(t_), static_cast<std::uint64_t>(instance_.num_contexts())));
}

double Environment::adversary_reward(int user, int context, int action) {
  const auto& adv = population_.adversary;
  switch (adv.kind) {
    case AdversaryKind::kHonest:
      return draw_reward(instance_.mu(context, action));
    case AdversaryKind::kBoost:
      return action == boost_target_[static_cast<std::size_t>(context)] ? adv.reward_hi : adv.reward_lo;
    case AdversaryKind::kFlip:
      return draw_reward(instance_.min_mean() + instance_.max_mean() - instance_.mu(context, action));
    case AdversaryKind::kConstant:
      return adv.constant;
    case AdversaryKind::kLeCam: {
      auto& pos = tape_pos_[static_cast<std::size_t>(user)];
      const auto& tape = population_.tapes[static_cast<std::size_t>(user)];
      if (action == adv.a_star[static_cast<std::size_t>(context)] && pos < tape.size()) return tape[pos++];
      return streams_.rewards.uniform(static_cast<std::uint64_t>(t_)) < 0.5 ? 1.0 : 0.0;
    }
  }
  return 0.0;
}

void Environment::step(Agent& agent) {
  ++t_;
  const int user = arrivals_.user_at(t_);
  const bool good = population_.is_good(user);
  int context = 0;
  if (good) {
    const double u = streams_.contexts.uniform(static_cast<std::uint64_t>(t_));
    const auto it = std::upper_bound(context_cdf_.begin(), context_cdf_.end(), u);
    context = std::min(static_cast<int>(it - context_cdf_.begin()), instance_.num_contexts() - 1);
  } else {
    context = adversary_context();
  }
  const int action = agent.choose(user, context, log_);
  if (action < 0 || action >= instance_.num_actions()) {
    fail(ErrorCode::kInvalidArgument, "agent chose action " + std::to_string(action) + " outside [0, " +
                                          std::to_string(instance_.num_actions()) + ")");
  }
  const double reward = good ? good_reward(user, context, action) : adversary_reward(user, context, action);
  log_.append({t_, user, context, action, reward});
  adversarial_.push_back(good ? 0 : 1);
  agent.observe(reward);
}

void Environment::run(Agent& agent, std::int64_t steps) {
  require(steps >= 0, "negative step count");
  for (std::int64_t k = 0; k < steps; ++k) step(agent);
}

EpisodeResult run_episode(const BanditInstance& instance, const Population& population, const ArrivalModel& arrival,
                          Agent& agent, std::int64_t horizon, std::uint64_t seed) {
  require(horizon >= 1, "run_episode: T must be >= 1");
  Environment env(instance, population, arrival, seed);
  env.run(agent, horizon);
  return {env.log(), env.adversarial_flags()};
}

void write_transcript_csv(std::ostream& os, const InteractionLog& log, const std::vector<std::uint8_t>& adversarial) {
  os << "t,user,context,action,reward,is_adversarial\n";
  os.precision(17);
  const auto& recs = log.records();
  for (std::size_t k = 0; k < recs.size(); ++k) {
    const auto& r = recs[k];
    os << r.t << ',' << r.user << ',' << r.context << ',' << r.action << ',' << r.reward << ','
       << (k < adversarial.size() ? static_cast<int>(adversarial[k]) : 0) << '\n';
  }
}

}  // namespace mcb
