#include <algorithm>
#include <cmath>

#include "internal.hpp"
#include "mcb/error.hpp"

namespace mcb {
namespace {

class GroupedAgent : public Agent {
 public:
  GroupedAgent(const GroupAssignment& g, int num_actions, std::uint64_t seed)
      : groups_(g), num_actions_(num_actions), rng_(seed) {}
  int choose(int user, int context, const InteractionLog&) override {
    if (groups_.slot[static_cast<std::size_t>(context)] >= 0) return groups_.arm_of(user, context);
    return static_cast<int>(rng_.below(static_cast<std::uint64_t>(num_actions_)));
  }
  void observe(double) override {}

 private:
  const GroupAssignment& groups_;
  int num_actions_;
  Rng rng_;
};

}  // namespace

NuEstimate estimate_nu(Environment& env, double alpha_hat, std::int64_t t0, const RobustOptions& opts) {
  require(t0 >= 1, "estimate_nu: T0 must be >= 1");
  const int S = env.instance().num_contexts();
  const int L = env.population().num_users;

  const std::size_t begin = env.log().size();
  detail::UniformAgent agent(env.instance().num_actions(), derive_seed(env.agent_seed(), "nu"));
  env.run(agent, t0);
  const auto& recs = env.log().records();
  const auto n = detail::user_counts(env.log(), begin, recs.size());

  NuEstimate out;
  out.scale.t0 = t0;
  out.scale.sigma_sq.assign(static_cast<std::size_t>(S), 0.0);
  out.empirical_nu.assign(static_cast<std::size_t>(S), 0.0);
  for (std::size_t k = begin; k < recs.size(); ++k) out.empirical_nu[static_cast<std::size_t>(recs[k].context)] += 1.0;
  const double floor = opts.log_constant * std::log(static_cast<double>(S));
  const double T0 = static_cast<double>(t0);
  for (int s = 0; s < S; ++s) {
    auto& ns = out.empirical_nu[static_cast<std::size_t>(s)];
    out.scale.sigma_sq[static_cast<std::size_t>(s)] = std::max({ns, floor, 1.0}) / T0;
    ns /= T0;
  }
  if (S == 1) {
    out.nu_hat = {1.0};
    return out;
  }

  std::vector<int> row_of(static_cast<std::size_t>(L), -1);
  int rows = 0;
  for (int i = 0; i < L; ++i) {
    if (n[static_cast<std::size_t>(i)] > 0) row_of[static_cast<std::size_t>(i)] = rows++;
  }
  if (rows == 0) fail(ErrorCode::kEmptyGroup, "estimate_nu: no user arrived");
  std::vector<double> inv_sigma(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) inv_sigma[static_cast<std::size_t>(s)] = 1.0 / std::sqrt(out.scale.sigma_sq[s]);
  Eigen::MatrixXd points = Eigen::MatrixXd::Zero(rows, S);
  for (std::size_t k = begin; k < recs.size(); ++k) {
    const auto& r = recs[k];
    points(row_of[static_cast<std::size_t>(r.user)], r.context) +=
        inv_sigma[static_cast<std::size_t>(r.context)] / static_cast<double>(n[static_cast<std::size_t>(r.user)]);
  }
  out.filter = robust_mean_highdim(points, alpha_hat, static_cast<double>(L) / T0, opts.filter);

  out.nu_hat.resize(static_cast<std::size_t>(S));
  double total = 0.0;
  for (int s = 0; s < S; ++s) {
    const double v = std::max(0.0, out.filter.estimate(s) / inv_sigma[static_cast<std::size_t>(s)]);
    out.nu_hat[static_cast<std::size_t>(s)] = v;
    total += v;
  }
  if (total <= 0.0) {
    out.filter.warnings.push_back("estimated context distribution vanished; using uniform");
    std::fill(out.nu_hat.begin(), out.nu_hat.end(), 1.0 / S);
  } else {
    for (auto& v : out.nu_hat) v /= total;
  }
  return out;
}

AlgoResult robust_mcb(Environment& env, double alpha_hat, std::int64_t t0, std::int64_t horizon,
                      const RobustOptions& opts) {
  require(horizon >= 1, "robust_mcb: T must be >= 1");
  const int S = env.instance().num_contexts();
  const int A = env.instance().num_actions();
  const int L = env.population().num_users;

  AlgoResult out;
  out.algorithm = "robust_mcb";
  std::vector<double> nu_hat;
  std::vector<double> sigma_sq;
  if (opts.known_nu) {
    require(opts.known_nu->size() == static_cast<std::size_t>(S), "robust_mcb: known nu has the wrong size");
    nu_hat = *opts.known_nu;
    sigma_sq = nu_hat;
    for (auto& v : sigma_sq) require(v > 0.0, "robust_mcb: known nu must be positive");
  } else {
    NuEstimate nu = estimate_nu(env, alpha_hat, t0, opts);
    nu_hat = nu.nu_hat;
    sigma_sq = nu.scale.sigma_sq;
    out.warnings = nu.filter.warnings;
    out.diagnostics["nu_removed_fraction"] = nu.filter.removed_fraction;
    double l1 = 0.0;
    for (int s = 0; s < S; ++s) l1 += std::abs(nu_hat[static_cast<std::size_t>(s)] - env.instance().nu()[s]);
    out.diagnostics["nu_l1_error"] = l1;
  }

  const std::vector<int> frequent = top_contexts(nu_hat, std::min(S, A));
  const GroupAssignment groups = assign_groups(L, A, S, frequent, derive_seed(env.agent_seed(), "groups"));
  const std::size_t begin = env.log().size();
  GroupedAgent agent(groups, A, derive_seed(env.agent_seed(), "explore"));
  env.run(agent, horizon);
  const auto& recs = env.log().records();
  const auto n = detail::user_counts(env.log(), begin, recs.size());

  std::vector<double> inv_sigma(static_cast<std::size_t>(S));
  for (int s = 0; s < S; ++s) inv_sigma[static_cast<std::size_t>(s)] = 1.0 / std::sqrt(sigma_sq[s]);

  MuEstimate est{S, A, std::vector<double>(static_cast<std::size_t>(S) * A, 0.0),
                 std::vector<Provenance>(static_cast<std::size_t>(S), Provenance::kHighDim), sigma_sq};

  // Frequent contexts: one scalar per (user, context), combined inside each arm group.
  const std::size_t F = frequent.size();
  std::vector<double> acc(static_cast<std::size_t>(L) * F, 0.0);
  for (std::size_t k = begin; k < recs.size(); ++k) {
    const int slot = groups.slot[static_cast<std::size_t>(recs[k].context)];
    if (slot >= 0) acc[static_cast<std::size_t>(recs[k].user) * F + static_cast<std::size_t>(slot)] += recs[k].reward;
  }
  std::vector<double> values;
  for (std::size_t slot = 0; slot < F; ++slot) {
    const int s = frequent[slot];
    est.provenance[static_cast<std::size_t>(s)] = Provenance::kUnivariate;
    for (int a = 0; a < A; ++a) {
      values.clear();
      for (int i : groups.group(s, a)) {
        const auto ni = n[static_cast<std::size_t>(i)];
        if (ni > 0) {
          values.push_back(acc[static_cast<std::size_t>(i) * F + slot] * inv_sigma[static_cast<std::size_t>(s)] /
                           static_cast<double>(ni));
        }
      }
      if (values.empty()) {
        fail(ErrorCode::kEmptyGroup, "robust_mcb: group (s=" + std::to_string(s) + ", a=" + std::to_string(a) +
                                         ") has no active user");
      }
      est.table[static_cast<std::size_t>(s) * A + a] =
          robust_location(values, alpha_hat, opts) * inv_sigma[static_cast<std::size_t>(s)];
    }
  }

  // Remaining contexts: one importance-weighted vector per user, filtered jointly.
  std::vector<int> rest_slot(static_cast<std::size_t>(S), -1);
  std::vector<int> rest;
  for (int s = 0; s < S; ++s) {
    if (groups.slot[static_cast<std::size_t>(s)] < 0) {
      rest_slot[static_cast<std::size_t>(s)] = static_cast<int>(rest.size());
      rest.push_back(s);
    }
  }
  out.diagnostics["num_frequent"] = static_cast<double>(F);
  if (!rest.empty()) {
    const int d = static_cast<int>(rest.size()) * A;
    std::vector<int> row_of(static_cast<std::size_t>(L), -1);
    int rows = 0;
    for (int i = 0; i < L; ++i) {
      if (n[static_cast<std::size_t>(i)] > 0) row_of[static_cast<std::size_t>(i)] = rows++;
    }
    if (rows == 0) fail(ErrorCode::kEmptyGroup, "robust_mcb: no user arrived");
    Eigen::MatrixXd points = Eigen::MatrixXd::Zero(rows, d);
    for (std::size_t k = begin; k < recs.size(); ++k) {
      const auto& r = recs[k];
      const int rs = rest_slot[static_cast<std::size_t>(r.context)];
      if (rs < 0) continue;
      points(row_of[static_cast<std::size_t>(r.user)], rs * A + r.action) +=
          static_cast<double>(A) * r.reward * inv_sigma[static_cast<std::size_t>(r.context)] /
          static_cast<double>(n[static_cast<std::size_t>(r.user)]);
    }
    double ratio = 1.0;
    for (int s : rest) ratio = std::max(ratio, nu_hat[static_cast<std::size_t>(s)] / sigma_sq[static_cast<std::size_t>(s)]);
    const double sigma_hd = static_cast<double>(A) * static_cast<double>(L) / static_cast<double>(horizon) * ratio;
    RobustEstimate robust = robust_mean_highdim(points, alpha_hat, sigma_hd, opts.filter);
    for (int s : rest) {
      const int rs = rest_slot[static_cast<std::size_t>(s)];
      for (int a = 0; a < A; ++a) {
        est.table[static_cast<std::size_t>(s) * A + a] =
            robust.estimate(rs * A + a) * inv_sigma[static_cast<std::size_t>(s)];
      }
    }
    out.warnings.insert(out.warnings.end(), robust.warnings.begin(), robust.warnings.end());
    out.diagnostics["highdim_sigma_sq"] = sigma_hd;
    out.diagnostics["highdim_removed_fraction"] = robust.removed_fraction;
  }

  out.policy = greedy_policy(est.table, S, A);
  out.mu_hat = std::move(est);
  return out;
}

}  // namespace mcb
