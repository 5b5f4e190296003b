#include <cmath>

#include "internal.hpp"
#include "mcb/error.hpp"

namespace mcb {
namespace {

class PinnedAgent : public Agent {
 public:
  explicit PinnedAgent(const GroupAssignment& g) : groups_(g) {}
  int choose(int user, int context, const InteractionLog&) override { return groups_.arm_of(user, context); }
  void observe(double) override {}

 private:
  const GroupAssignment& groups_;
};

double l2_distance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) acc += (a[k] - b[k]) * (a[k] - b[k]);
  return std::sqrt(acc);
}

}  // namespace

AlgoResult mab_baseline(Environment& env, double alpha_hat, std::int64_t horizon, const RobustOptions& opts) {
  require(horizon >= 1, "mab_baseline: T must be >= 1");
  const int S = env.instance().num_contexts();
  const int A = env.instance().num_actions();
  const int L = env.population().num_users;
  std::vector<int> all(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) all[static_cast<std::size_t>(s)] = s;
  const GroupAssignment groups = assign_groups(L, A, S, all, derive_seed(env.agent_seed(), "groups"));

  const std::size_t begin = env.log().size();
  PinnedAgent agent(groups);
  env.run(agent, horizon);

  const auto SL = static_cast<std::size_t>(S) * static_cast<std::size_t>(L);
  std::vector<double> sum(SL, 0.0);
  std::vector<std::int64_t> cnt(SL, 0);
  const auto& recs = env.log().records();
  for (std::size_t k = begin; k < recs.size(); ++k) {
    const auto idx = static_cast<std::size_t>(recs[k].user) * S + static_cast<std::size_t>(recs[k].context);
    sum[idx] += recs[k].reward;
    ++cnt[idx];
  }

  MuEstimate est{S, A, std::vector<double>(static_cast<std::size_t>(S) * A, 0.0),
                 std::vector<Provenance>(static_cast<std::size_t>(S), Provenance::kUnivariate), {}};
  std::vector<double> values;
  for (int s = 0; s < S; ++s) {
    for (int a = 0; a < A; ++a) {
      values.clear();
      for (int i : groups.group(s, a)) {
        const auto idx = static_cast<std::size_t>(i) * S + static_cast<std::size_t>(s);
        if (cnt[idx] > 0) values.push_back(sum[idx] / static_cast<double>(cnt[idx]));
      }
      if (values.empty()) {
        fail(ErrorCode::kEmptyGroup, "mab_baseline: no user in group (s=" + std::to_string(s) +
                                         ", a=" + std::to_string(a) + ") observed its context");
      }
      est.table[static_cast<std::size_t>(s) * A + a] = robust_location(values, alpha_hat, opts);
    }
  }
  AlgoResult out;
  out.algorithm = "mab_baseline";
  out.policy = greedy_policy(est.table, S, A);
  out.mu_hat = std::move(est);
  return out;
}

AlgoResult highdim_baseline(Environment& env, double alpha_hat, std::int64_t horizon, const RobustOptions& opts) {
  require(horizon >= 1, "highdim_baseline: T must be >= 1");
  const int S = env.instance().num_contexts();
  const int A = env.instance().num_actions();
  const int L = env.population().num_users;
  const int d = S * A;

  const std::size_t begin = env.log().size();
  detail::UniformAgent agent(A, derive_seed(env.agent_seed(), "explore"));
  env.run(agent, horizon);
  const auto& recs = env.log().records();
  const auto n = detail::user_counts(env.log(), begin, recs.size());

  std::vector<int> row_of(static_cast<std::size_t>(L), -1);
  int rows = 0;
  for (int i = 0; i < L; ++i) {
    if (n[static_cast<std::size_t>(i)] > 0) row_of[static_cast<std::size_t>(i)] = rows++;
  }
  if (rows == 0) fail(ErrorCode::kEmptyGroup, "highdim_baseline: no user arrived");
  Eigen::MatrixXd points = Eigen::MatrixXd::Zero(rows, d);
  for (std::size_t k = begin; k < recs.size(); ++k) {
    const auto& r = recs[k];
    const double w = static_cast<double>(d) / static_cast<double>(n[static_cast<std::size_t>(r.user)]);
    points(row_of[static_cast<std::size_t>(r.user)], r.context * A + r.action) += w * r.reward;
  }
  const double sigma_sq = static_cast<double>(d) * static_cast<double>(L) / static_cast<double>(horizon);
  RobustEstimate robust = robust_mean_highdim(points, alpha_hat, sigma_sq, opts.filter);

  MuEstimate est{S, A, std::vector<double>(robust.estimate.data(), robust.estimate.data() + d),
                 std::vector<Provenance>(static_cast<std::size_t>(S), Provenance::kHighDim), {}};
  AlgoResult out;
  out.algorithm = "highdim_baseline";
  out.policy = greedy_policy(est.table, S, A);
  out.warnings = robust.warnings;
  if (rows < L) out.warnings.push_back(std::to_string(L - rows) + " users never arrived");
  out.diagnostics["sigma_sq"] = sigma_sq;
  out.diagnostics["removed_fraction"] = robust.removed_fraction;
  out.diagnostics["certificate"] = 2.0 / std::sqrt(static_cast<double>(S)) * l2_distance(env.instance().mu(), est.table);
  out.mu_hat = std::move(est);
  return out;
}

}  // namespace mcb
