#include <algorithm>
#include <numeric>

#include "internal.hpp"
#include "mcb/error.hpp"

namespace mcb {

double robust_location(std::span<const double> values, double alpha, const RobustOptions& opts) {
  if (values.empty()) fail(ErrorCode::kEmptyGroup, "robust_location: empty group");
  if (values.size() == 1) return values[0];
  const std::size_t k = trim_count(values.size(), alpha, opts.trim);
  if (2 * k >= values.size()) {
    if (!opts.median_fallback) {
      fail(ErrorCode::kOverTrimmed, "group of " + std::to_string(values.size()) + " over-trimmed at alpha " +
                                        std::to_string(alpha));
    }
    return lower_median(std::vector<double>(values.begin(), values.end()));
  }
  return trimmed_mean(values, alpha, opts.trim).scalar();
}

std::vector<int> top_contexts(const std::vector<double>& nu, int count) {
  std::vector<int> order(nu.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return nu[a] > nu[b]; });
  order.resize(static_cast<std::size_t>(std::clamp(count, 0, static_cast<int>(nu.size()))));
  return order;
}

GroupAssignment assign_groups(int num_users, int num_actions, int num_contexts, const std::vector<int>& frequent,
                              std::uint64_t seed) {
  require(num_users >= 1 && num_actions >= 1, "assign_groups: empty population or action set");
  GroupAssignment g;
  g.num_users = num_users;
  g.num_actions = num_actions;
  g.frequent = frequent;
  g.slot.assign(static_cast<std::size_t>(num_contexts), -1);
  for (std::size_t k = 0; k < frequent.size(); ++k) {
    require(frequent[k] >= 0 && frequent[k] < num_contexts, "assign_groups: context out of range");
    g.slot[static_cast<std::size_t>(frequent[k])] = static_cast<int>(k);
  }
  const std::size_t F = frequent.size();
  g.arm.resize(static_cast<std::size_t>(num_users) * F);
  g.members.assign(F * static_cast<std::size_t>(num_actions), {});
  Rng rng(seed);
  for (int i = 0; i < num_users; ++i) {
    for (std::size_t k = 0; k < F; ++k) {
      const int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(num_actions)));
      g.arm[static_cast<std::size_t>(i) * F + k] = a;
      g.members[k * static_cast<std::size_t>(num_actions) + static_cast<std::size_t>(a)].push_back(i);
    }
  }
  return g;
}

namespace detail {

std::vector<std::int64_t> user_counts(const InteractionLog& log, std::size_t begin, std::size_t end) {
  std::vector<std::int64_t> n(static_cast<std::size_t>(log.num_users()), 0);
  const auto& recs = log.records();
  for (std::size_t k = begin; k < end; ++k) ++n[static_cast<std::size_t>(recs[k].user)];
  return n;
}

}  // namespace detail
}  // namespace mcb
