#include <algorithm>
#include <cmath>

#include "mcb/error.hpp"
#include "mcb/lowerbound.hpp"

namespace mcb {
namespace {

SystemRun run_system_impl(const SystemSpec& spec, Agent& agent, std::int64_t per_user_budget, std::uint64_t seed,
                          std::int64_t astar_cap, const WeightLawE* law) {
  const int S = spec.num_contexts;
  const int A = spec.num_actions;
  const int L = spec.num_users;
  require(S >= 1 && A >= 1 && L >= 1, "run_system: empty system");
  require(spec.a_star.size() == static_cast<std::size_t>(S), "run_system: a* table size");
  for (int a : spec.a_star) require(a >= 0 && a < A, "run_system: a* out of range");
  require(per_user_budget >= 1, "run_system: per-user budget must be >= 1");

  const CounterStream membership(derive_seed(seed, "membership"));
  const CounterStream contexts(derive_seed(seed, "contexts"));
  const CounterStream rewards(derive_seed(seed, "rewards"));

  SystemRun run;
  run.log = InteractionLog(L, S);
  std::vector<std::uint8_t> bad(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i) bad[static_cast<std::size_t>(i)] = membership.uniform(static_cast<std::uint64_t>(i)) < spec.alpha;

  std::vector<std::vector<std::uint8_t>> tapes(static_cast<std::size_t>(L));
  if (spec.variant == SystemVariant::kB) {
    Rng tape_rng(derive_seed(seed, "tapes"));
    for (int i = 0; i < L; ++i) {
      if (bad[static_cast<std::size_t>(i)]) tapes[static_cast<std::size_t>(i)] = sample_tape(*law, tape_rng);
    }
  }
  std::vector<std::size_t> tape_pos(static_cast<std::size_t>(L), 0);
  std::vector<std::int64_t> steps(static_cast<std::size_t>(L), 0);
  std::vector<std::int64_t> astar(static_cast<std::size_t>(L), 0);
  std::vector<std::uint8_t> active(static_cast<std::size_t>(L), 1);

  std::int64_t t = 0;
  for (bool any = true; any;) {
    any = false;
    for (int i = 0; i < L; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      if (!active[ui]) continue;
      any = true;
      ++t;
      const auto tu = static_cast<std::uint64_t>(t);
      const int s = static_cast<int>(contexts.below(tu, static_cast<std::uint64_t>(S)));
      const int a = agent.choose(i, s, run.log);
      require(a >= 0 && a < A, "run_system: agent chose an action out of range");
      const bool hit = a == spec.a_star[static_cast<std::size_t>(s)];
      double mean = 0.5;
      double r = -1.0;
      if (spec.variant == SystemVariant::kB && hit) {
        if (!bad[ui]) {
          mean = 0.5 + spec.eps;
        } else if (tape_pos[ui] < tapes[ui].size()) {
          r = tapes[ui][tape_pos[ui]++];
        }
      }
      if (r < 0.0) r = rewards.uniform(tu) < mean ? 1.0 : 0.0;
      run.log.append({t, i, s, a, r});
      run.adversarial.push_back(bad[ui]);
      agent.observe(r);
      if (hit) {
        ++astar[ui];
        if (astar[ui] > spec.n) run.event_e = true;
        if (astar_cap > 0 && astar[ui] >= astar_cap) active[ui] = 0;
      }
      if (++steps[ui] >= per_user_budget) active[ui] = 0;
    }
  }
  run.max_astar_plays = *std::max_element(astar.begin(), astar.end());
  return run;
}

class CoinFlip : public Distinguisher {
 public:
  CoinFlip(const GameInfo& info, std::uint64_t seed) : A_(info.num_actions), rng_(seed) {}
  int choose(int, int, const InteractionLog&) override { return static_cast<int>(rng_.below(static_cast<std::uint64_t>(A_))); }
  void observe(double) override {}
  bool guess_b() override { return rng_.bernoulli(0.5); }

 private:
  int A_;
  Rng rng_;
};

// Plays uniformly; B raises the overall reward rate by about (1 - alpha) eps / A.
class UniformRandom : public Distinguisher {
 public:
  UniformRandom(const GameInfo& info, std::uint64_t seed)
      : A_(info.num_actions), threshold_(0.5 + info.eps * (1.0 - info.alpha) / (2.0 * info.num_actions)), rng_(seed) {}
  int choose(int, int, const InteractionLog&) override { return static_cast<int>(rng_.below(static_cast<std::uint64_t>(A_))); }
  void observe(double r) override {
    sum_ += r;
    ++count_;
  }
  bool guess_b() override { return count_ > 0 && sum_ / count_ > threshold_; }

 private:
  int A_;
  double threshold_;
  Rng rng_;
  double sum_ = 0.0;
  double count_ = 0.0;
};

// Explores for half of each user's budget, then commits per context to the best pooled arm.
class ExploreGreedy : public Distinguisher {
 public:
  ExploreGreedy(const GameInfo& info, std::uint64_t seed)
      : info_(info),
        sum_(static_cast<std::size_t>(info.num_contexts) * info.num_actions, 0.0),
        cnt_(sum_.size(), 0.0),
        steps_(static_cast<std::size_t>(info.num_users), 0),
        rng_(seed) {}

  int choose(int user, int context, const InteractionLog&) override {
    exploit_ = 2 * steps_[static_cast<std::size_t>(user)]++ >= info_.per_user_budget;
    context_ = context;
    if (!exploit_) {
      action_ = static_cast<int>(rng_.below(static_cast<std::uint64_t>(info_.num_actions)));
      return action_;
    }
    action_ = 0;
    double best = -1.0;
    for (int a = 0; a < info_.num_actions; ++a) {
      const auto idx = static_cast<std::size_t>(context) * info_.num_actions + a;
      const double m = cnt_[idx] > 0 ? sum_[idx] / cnt_[idx] : 0.0;
      if (m > best) {
        best = m;
        action_ = a;
      }
    }
    return action_;
  }

  void observe(double r) override {
    if (exploit_) {
      exploit_sum_ += r;
      ++exploit_count_;
      return;
    }
    const auto idx = static_cast<std::size_t>(context_) * info_.num_actions + action_;
    sum_[idx] += r;
    cnt_[idx] += 1.0;
  }

  bool guess_b() override {
    if (exploit_count_ > 0) return exploit_sum_ / exploit_count_ > 0.5 + info_.eps * (1.0 - info_.alpha) / 2.0;
    double s = 0.0;
    double c = 0.0;
    for (std::size_t k = 0; k < sum_.size(); ++k) {
      s += sum_[k];
      c += cnt_[k];
    }
    return c > 0 && s / c > 0.5 + info_.eps * (1.0 - info_.alpha) / (2.0 * info_.num_actions);
  }

 private:
  GameInfo info_;
  std::vector<double> sum_;
  std::vector<double> cnt_;
  std::vector<std::int64_t> steps_;
  Rng rng_;
  int context_ = 0;
  int action_ = 0;
  bool exploit_ = false;
  double exploit_sum_ = 0.0;
  double exploit_count_ = 0.0;
};

// Knows a*; plays it every time and thresholds its mean reward.
class Oracle : public Distinguisher {
 public:
  explicit Oracle(const GameInfo& info) : info_(info) {}
  int choose(int, int context, const InteractionLog&) override { return info_.a_star[static_cast<std::size_t>(context)]; }
  void observe(double r) override {
    sum_ += r;
    ++count_;
  }
  bool guess_b() override { return count_ > 0 && sum_ / count_ > 0.5 + info_.eps * (1.0 - info_.alpha) / 2.0; }

 private:
  GameInfo info_;
  double sum_ = 0.0;
  double count_ = 0.0;
};

}  // namespace

SystemRun run_system(const SystemSpec& spec, Agent& agent, std::int64_t per_user_budget, std::uint64_t seed,
                     std::int64_t astar_cap) {
  if (spec.variant == SystemVariant::kA) return run_system_impl(spec, agent, per_user_budget, seed, astar_cap, nullptr);
  const WeightLawE law = build_E_n(spec.n, spec.alpha, spec.eps, spec.num_users);
  return run_system_impl(spec, agent, per_user_budget, seed, astar_cap, &law);
}

std::string to_string(DistinguisherKind kind) {
  switch (kind) {
    case DistinguisherKind::kCoinFlip:
      return "coin_flip";
    case DistinguisherKind::kUniformRandom:
      return "uniform_random";
    case DistinguisherKind::kExploreGreedy:
      return "explore_greedy";
    case DistinguisherKind::kOracle:
      return "oracle";
  }
  return "?";
}

DistinguisherKind parse_distinguisher(const std::string& text) {
  for (auto kind : kAllDistinguishers) {
    if (to_string(kind) == text) return kind;
  }
  fail(ErrorCode::kUnknownKind, "unknown distinguisher '" + text + "'");
}

std::unique_ptr<Distinguisher> make_distinguisher(DistinguisherKind kind, const GameInfo& info, std::uint64_t seed) {
  switch (kind) {
    case DistinguisherKind::kCoinFlip:
      return std::make_unique<CoinFlip>(info, seed);
    case DistinguisherKind::kUniformRandom:
      return std::make_unique<UniformRandom>(info, seed);
    case DistinguisherKind::kExploreGreedy:
      return std::make_unique<ExploreGreedy>(info, seed);
    case DistinguisherKind::kOracle:
      return std::make_unique<Oracle>(info);
  }
  fail(ErrorCode::kUnknownKind, "unknown distinguisher");
}

GameResult distinguish_experiment(const GameParams& p, DistinguisherKind kind) {
  require(p.pairs >= 1, "distinguish_experiment: need at least one pair");
  const WeightLawE law = build_E_n(p.n, p.alpha, p.eps, p.num_users);
  GameResult out;
  int events = 0;
  for (int j = 0; j < p.pairs; ++j) {
    const std::uint64_t seed = derive_seed(p.seed, static_cast<std::uint64_t>(j));
    SystemSpec spec;
    spec.num_contexts = p.num_contexts;
    spec.num_actions = p.num_actions;
    spec.alpha = p.alpha;
    spec.eps = p.eps;
    spec.n = p.n;
    spec.num_users = p.num_users;
    Rng star(derive_seed(seed, "a_star"));
    for (int s = 0; s < p.num_contexts; ++s) {
      spec.a_star.push_back(static_cast<int>(star.below(static_cast<std::uint64_t>(p.num_actions))));
    }
    GameInfo info{p.num_contexts, p.num_actions, p.alpha, p.eps, p.num_users, p.per_user_budget, spec.a_star};
    for (auto variant : {SystemVariant::kA, SystemVariant::kB}) {
      spec.variant = variant;
      auto agent = make_distinguisher(kind, info, derive_seed(seed, "agent"));
      const SystemRun run = run_system_impl(spec, *agent, p.per_user_budget, seed, p.astar_cap,
                                            variant == SystemVariant::kB ? &law : nullptr);
      events += run.event_e ? 1 : 0;
      if (agent->guess_b() == (variant == SystemVariant::kB)) ++out.correct;
      ++out.trials;
    }
  }
  out.accuracy = static_cast<double>(out.correct) / out.trials;
  out.event_rate = static_cast<double>(events) / out.trials;
  return out;
}

}  // namespace mcb
