#include <cmath>
#include <limits>

#include "internal.hpp"
#include "mcb/error.hpp"

namespace mcb {
namespace {

struct UcbTable {
  int num_actions = 0;
  std::vector<std::int64_t> count;
  std::vector<double> sum;
  std::vector<std::int64_t> context_total;

  UcbTable(int S, int A)
      : num_actions(A),
        count(static_cast<std::size_t>(S) * A, 0),
        sum(static_cast<std::size_t>(S) * A, 0.0),
        context_total(static_cast<std::size_t>(S), 0) {}

  int select(int s) const {
    const std::size_t base = static_cast<std::size_t>(s) * num_actions;
    for (int a = 0; a < num_actions; ++a) {
      if (count[base + a] == 0) return a;
    }
    const double logn = std::log(static_cast<double>(context_total[static_cast<std::size_t>(s)]));
    int best = 0;
    double best_index = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < num_actions; ++a) {
      const double n = static_cast<double>(count[base + a]);
      const double index = sum[base + a] / n + std::sqrt(2.0 * logn / n);
      if (index > best_index) {
        best_index = index;
        best = a;
      }
    }
    return best;
  }

  void update(int s, int a, double r) {
    const std::size_t idx = static_cast<std::size_t>(s) * num_actions + a;
    ++count[idx];
    sum[idx] += r;
    ++context_total[static_cast<std::size_t>(s)];
  }

  std::vector<double> means() const {
    std::vector<double> m(sum.size(), 0.0);
    for (std::size_t k = 0; k < m.size(); ++k) {
      if (count[k] > 0) m[k] = sum[k] / static_cast<double>(count[k]);
    }
    return m;
  }

  // Greedy on empirical means; unplayed arms rank last.
  Policy greedy(int S) const {
    std::vector<double> score = means();
    for (std::size_t k = 0; k < score.size(); ++k) {
      if (count[k] == 0) score[k] = -std::numeric_limits<double>::infinity();
    }
    return greedy_policy(score, S, num_actions);
  }
};

MuEstimate empirical_estimate(const UcbTable& table, int S, int A) {
  return {S, A, table.means(), std::vector<Provenance>(static_cast<std::size_t>(S), Provenance::kUnivariate), {}};
}

class PooledUcb : public Agent {
 public:
  PooledUcb(int S, int A) : table(S, A) {}
  int choose(int, int context, const InteractionLog&) override {
    context_ = context;
    action_ = table.select(context);
    return action_;
  }
  void observe(double r) override { table.update(context_, action_, r); }

  UcbTable table;

 private:
  int context_ = 0;
  int action_ = 0;
};

class PerUserUcb : public Agent {
 public:
  PerUserUcb(int L, int S, int A) : tables(static_cast<std::size_t>(L), UcbTable(S, A)) {}
  int choose(int user, int context, const InteractionLog&) override {
    user_ = user;
    context_ = context;
    action_ = tables[static_cast<std::size_t>(user)].select(context);
    return action_;
  }
  void observe(double r) override { tables[static_cast<std::size_t>(user_)].update(context_, action_, r); }

  std::vector<UcbTable> tables;

 private:
  int user_ = 0;
  int context_ = 0;
  int action_ = 0;
};

// One active-arm-elimination race per (context, layer).
class LayeredElimination : public Agent {
 public:
  LayeredElimination(int S, int A, std::int64_t horizon, std::uint64_t seed)
      : S_(S), A_(A), layers_(std::max(1, static_cast<int>(std::ceil(std::log2(static_cast<double>(horizon)))))),
        rng_(seed) {
    const auto cells = static_cast<std::size_t>(S) * layers_ * A;
    count_.assign(cells, 0);
    sum_.assign(cells, 0.0);
    active_.assign(cells, 1);
    log_term_ = std::log(4.0 * A * layers_ * static_cast<double>(horizon) / kDelta);
  }

  int choose(int, int context, const InteractionLog&) override {
    const double u = std::max(rng_.uniform(), 0x1.0p-60);
    layer_ = std::min(layers_, 1 + static_cast<int>(std::floor(-std::log2(u))));
    context_ = context;
    int best = -1;
    for (int a = 0; a < A_; ++a) {
      const auto idx = cell(context, layer_, a);
      if (active_[idx] && (best < 0 || count_[idx] < count_[cell(context, layer_, best)])) best = a;
    }
    action_ = best;
    return best;
  }

  void observe(double r) override {
    const auto idx = cell(context_, layer_, action_);
    ++count_[idx];
    sum_[idx] += r;
    eliminate(context_, layer_);
  }

  int num_layers() const { return layers_; }

  // Best active arm of the requested layer, stepping down to layers with data.
  int recommend(int s, int layer) const {
    for (int l = std::min(layer, layers_); l >= 1; --l) {
      bool ready = true;
      for (int a = 0; a < A_; ++a) {
        if (active_[cell(s, l, a)] && count_[cell(s, l, a)] == 0) ready = false;
      }
      if (!ready && l > 1) continue;
      int best = -1;
      double best_mean = 0.0;
      for (int a = 0; a < A_; ++a) {
        const auto idx = cell(s, l, a);
        if (!active_[idx]) continue;
        const double m = count_[idx] > 0 ? sum_[idx] / static_cast<double>(count_[idx]) : 0.0;
        if (best < 0 || m > best_mean) {
          best = a;
          best_mean = m;
        }
      }
      return best;
    }
    return 0;
  }

  std::vector<double> means(int layer) const {
    std::vector<double> m(static_cast<std::size_t>(S_) * A_, 0.0);
    for (int s = 0; s < S_; ++s) {
      for (int a = 0; a < A_; ++a) {
        const auto idx = cell(s, layer, a);
        if (count_[idx] > 0) m[static_cast<std::size_t>(s) * A_ + a] = sum_[idx] / static_cast<double>(count_[idx]);
      }
    }
    return m;
  }

 private:
  static constexpr double kDelta = 0.05;

  std::size_t cell(int s, int layer, int a) const {
    return (static_cast<std::size_t>(s) * layers_ + static_cast<std::size_t>(layer - 1)) * A_ + a;
  }

  double width(std::int64_t n) const {
    const double nn = static_cast<double>(n);
    return std::sqrt(log_term_ / (2.0 * nn)) + log_term_ / nn;
  }

  void eliminate(int s, int layer) {
    double best_lower = -std::numeric_limits<double>::infinity();
    for (int a = 0; a < A_; ++a) {
      const auto idx = cell(s, layer, a);
      if (!active_[idx]) continue;
      if (count_[idx] == 0) return;
      best_lower = std::max(best_lower, sum_[idx] / static_cast<double>(count_[idx]) - width(count_[idx]));
    }
    for (int a = 0; a < A_; ++a) {
      const auto idx = cell(s, layer, a);
      if (!active_[idx]) continue;
      if (sum_[idx] / static_cast<double>(count_[idx]) + width(count_[idx]) < best_lower) {
        for (int l = 1; l <= layer; ++l) active_[cell(s, l, a)] = 0;
      }
    }
    // A lower layer emptied by propagation inherits the layer above.
    for (int l = layer - 1; l >= 1; --l) {
      bool any = false;
      for (int a = 0; a < A_; ++a) any = any || active_[cell(s, l, a)];
      if (!any) {
        for (int a = 0; a < A_; ++a) active_[cell(s, l, a)] = active_[cell(s, l + 1, a)];
      }
    }
  }

  int S_;
  int A_;
  int layers_;
  Rng rng_;
  double log_term_ = 0.0;
  std::vector<std::int64_t> count_;
  std::vector<double> sum_;
  std::vector<std::uint8_t> active_;
  int context_ = 0;
  int layer_ = 1;
  int action_ = 0;
};

}  // namespace

AlgoResult naive_ucb(Environment& env, std::int64_t horizon) {
  require(horizon >= 1, "naive_ucb: T must be >= 1");
  const int S = env.instance().num_contexts();
  const int A = env.instance().num_actions();
  PooledUcb agent(S, A);
  env.run(agent, horizon);
  AlgoResult out;
  out.algorithm = "naive_ucb";
  out.policy = agent.table.greedy(S);
  out.mu_hat = empirical_estimate(agent.table, S, A);
  return out;
}

AlgoResult independent_ucb(Environment& env, std::int64_t horizon, int eval_user) {
  require(horizon >= 1, "independent_ucb: T must be >= 1");
  const int S = env.instance().num_contexts();
  const int A = env.instance().num_actions();
  const int L = env.population().num_users;
  require(eval_user >= 0 && eval_user < L, "independent_ucb: evaluation user out of range");
  PerUserUcb agent(L, S, A);
  env.run(agent, horizon);
  const auto& table = agent.tables[static_cast<std::size_t>(eval_user)];
  AlgoResult out;
  out.algorithm = "independent_ucb";
  out.policy = table.greedy(S);
  out.mu_hat = empirical_estimate(table, S, A);
  out.diagnostics["eval_user"] = eval_user;
  return out;
}

AlgoResult corruption_robust_ucb(Environment& env, std::int64_t horizon, double corruption_budget) {
  require(horizon >= 1, "corruption_robust_ucb: T must be >= 1");
  require(corruption_budget >= 0.0, "corruption_robust_ucb: budget must be non-negative");
  const int S = env.instance().num_contexts();
  const int A = env.instance().num_actions();
  LayeredElimination agent(S, A, horizon, derive_seed(env.agent_seed(), "layers"));
  env.run(agent, horizon);
  const int report =
      std::min(agent.num_layers(), 1 + static_cast<int>(std::ceil(std::log2(std::max(corruption_budget, 1.0)))));
  std::vector<int> actions(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) actions[static_cast<std::size_t>(s)] = agent.recommend(s, report);
  AlgoResult out;
  out.algorithm = "corruption_robust_ucb";
  out.policy = Policy::deterministic(std::move(actions), A);
  out.mu_hat = MuEstimate{S, A, agent.means(report), std::vector<Provenance>(static_cast<std::size_t>(S),
                                                                               Provenance::kUnivariate), {}};
  out.diagnostics["layers"] = agent.num_layers();
  out.diagnostics["report_layer"] = report;
  return out;
}

}  // namespace mcb
