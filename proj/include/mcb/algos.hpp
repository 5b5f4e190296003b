#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mcb/core.hpp"
#include "mcb/estimators.hpp"
#include "mcb/sim.hpp"

namespace mcb {

enum class Provenance { kUnivariate, kHighDim };

struct ContextScale {
  std::vector<double> sigma_sq;  // per context
  std::int64_t t0 = 0;
};

struct MuEstimate {
  int num_contexts = 0;
  int num_actions = 0;
  std::vector<double> table;            // S x A, row-major
  std::vector<Provenance> provenance;   // per context
  std::vector<double> sigma_sq;         // scales used; empty for unscaled estimators

  double at(int s, int a) const { return table[static_cast<std::size_t>(s) * num_actions + a]; }
};

struct AlgoResult {
  std::string algorithm;
  std::optional<MuEstimate> mu_hat;
  Policy policy = Policy::deterministic({0}, 1);
  std::vector<std::string> warnings;
  std::map<std::string, double> diagnostics;
};

struct RobustOptions {
  TrimOptions trim;
  FilterOptions filter;
  // Constant c in sigma_s^2 = max(n_s(T0), c log S) / T0.
  double log_constant = 20.0;
  // Fall back to the lower median when the trimmed mean would over-trim a group.
  bool median_fallback = true;
  // Skip Estimate-nu and use these context probabilities (scale-correctness experiments).
  std::optional<std::vector<double>> known_nu;
};

struct NuEstimate {
  std::vector<double> nu_hat;
  ContextScale scale;
  std::vector<double> empirical_nu;  // n_s(T0) / T0, uncorrected
  RobustEstimate filter;
};

struct GroupAssignment {
  int num_users = 0;
  int num_actions = 0;
  std::vector<int> frequent;          // S+ in rank order
  std::vector<int> slot;              // context -> index into `frequent`, or -1
  std::vector<int> arm;               // user-major: arm[i * |S+| + k] = a_{i, frequent[k]}
  std::vector<std::vector<int>> members;  // I_{s,a}, indexed k * A + a

  int arm_of(int user, int context) const {
    return arm[static_cast<std::size_t>(user) * frequent.size() + static_cast<std::size_t>(slot[context])];
  }
  const std::vector<int>& group(int context, int action) const {
    return members[static_cast<std::size_t>(slot[context]) * num_actions + action];
  }
};

// Univariate estimate for one (s,a) group: alpha-trimmed mean, or the lower
// median once trimming would consume the whole group.
double robust_location(std::span<const double> values, double alpha, const RobustOptions& opts);

// Top-min(A, S) contexts by probability, ties to the lower index.
std::vector<int> top_contexts(const std::vector<double>& nu, int count);

GroupAssignment assign_groups(int num_users, int num_actions, int num_contexts, const std::vector<int>& frequent,
                              std::uint64_t seed);

/// Per-context user partition into A groups; per-user empirical means combined by
/// a trimmed mean inside each group.
AlgoResult mab_baseline(Environment& env, double alpha_hat, std::int64_t horizon, const RobustOptions& opts = {});

/// Uniform exploration, per-user importance-weighted vectors and one high-dimensional
/// robust mean. `diagnostics["certificate"]` holds (2/sqrt(S)) * ||mu - mu_hat||_2.
AlgoResult highdim_baseline(Environment& env, double alpha_hat, std::int64_t horizon, const RobustOptions& opts = {});

/// Robust context-distribution estimate from T0 steps of arbitrary play.
NuEstimate estimate_nu(Environment& env, double alpha_hat, std::int64_t t0, const RobustOptions& opts = {});

/// Estimate nu, pin one arm per (user, frequent context), explore the rest uniformly,
/// then recover mu with univariate estimators on S+ and one high-dimensional estimate on S-.
AlgoResult robust_mcb(Environment& env, double alpha_hat, std::int64_t t0, std::int64_t horizon,
                      const RobustOptions& opts = {});

/// Pooled UCB1 over (context, action), blind to user identities.
AlgoResult naive_ucb(Environment& env, std::int64_t horizon);

/// One UCB1 table per user; the reported policy is eval_user's greedy policy.
AlgoResult independent_ucb(Environment& env, std::int64_t horizon, int eval_user);

/// Multi-layer active arm elimination per context: layer l sees a 2^-l share of the
/// traffic, eliminations propagate to lower layers, and the recommendation comes from
/// the first layer whose share dilutes `corruption_budget` to O(1) corrupted samples.
AlgoResult corruption_robust_ucb(Environment& env, std::int64_t horizon, double corruption_budget);

}  // namespace mcb
