#include <algorithm>
#include <limits>
#include <numeric>

#include "mcb/error.hpp"
#include "mcb/sim.hpp"

namespace mcb {

std::string ArrivalModel::to_string() const {
  switch (kind) {
    case ArrivalKind::kRoundRobin:
      return "round_robin";
    case ArrivalKind::kIidUniform:
      return "iid_uniform";
    case ArrivalKind::kBlockShuffled:
      return "block_shuffled";
  }
  return "round_robin";
}

ArrivalModel ArrivalModel::parse(const std::string& text) {
  if (text == "round_robin") return round_robin();
  if (text == "iid_uniform") return iid_uniform();
  if (text == "block_shuffled") return block_shuffled();
  fail(ErrorCode::kParse, "unknown arrival model '" + text + "'");
}

ArrivalProcess::ArrivalProcess(ArrivalModel model, int num_users, std::uint64_t seed)
    : model_(model), num_users_(num_users), seed_(seed), draws_(seed) {
  require(num_users_ >= 1, "arrival process needs at least one user");
}

int ArrivalProcess::user_at(std::int64_t t) {
  const auto idx = static_cast<std::uint64_t>(t - 1);
  switch (model_.kind) {
    case ArrivalKind::kRoundRobin:
      return static_cast<int>(idx % static_cast<std::uint64_t>(num_users_));
    case ArrivalKind::kIidUniform:
      return static_cast<int>(draws_.below(idx, static_cast<std::uint64_t>(num_users_)));
    case ArrivalKind::kBlockShuffled: {
      const auto block = static_cast<std::int64_t>(idx / static_cast<std::uint64_t>(num_users_));
      if (block != block_) {
        block_ = block;
        perm_.resize(static_cast<std::size_t>(num_users_));
        std::iota(perm_.begin(), perm_.end(), 0);
        Rng rng(derive_seed(seed_, static_cast<std::uint64_t>(block)));
        for (std::size_t i = perm_.size() - 1; i > 0; --i) std::swap(perm_[i], perm_[rng.below(i + 1)]);
      }
      return perm_[idx % static_cast<std::uint64_t>(num_users_)];
    }
  }
  return 0;
}

double verify_arrival(const ArrivalModel& arrival, int num_users, std::int64_t horizon, std::uint64_t seed,
                      std::int64_t from_t) {
  require(horizon >= num_users, "verify_arrival: need T >= L");
  if (from_t < 0) from_t = num_users;
  ArrivalProcess process(arrival, num_users, seed);
  std::vector<std::int64_t> counts(static_cast<std::size_t>(num_users), 0);
  // hist[c] = number of users with count c; tracks min and max in O(1) amortised.
  std::vector<std::int64_t> hist(static_cast<std::size_t>(horizon) + 2, 0);
  hist[0] = num_users;
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  double worst = 1.0;
  for (std::int64_t t = 1; t <= horizon; ++t) {
    auto& c = counts[static_cast<std::size_t>(process.user_at(t))];
    --hist[static_cast<std::size_t>(c)];
    ++c;
    ++hist[static_cast<std::size_t>(c)];
    hi = std::max(hi, c);
    while (hist[static_cast<std::size_t>(lo)] == 0) ++lo;
    if (t < from_t) continue;
    if (lo == 0) return std::numeric_limits<double>::infinity();
    worst = std::max(worst, static_cast<double>(hi) / static_cast<double>(lo));
  }
  return worst;
}

}  // namespace mcb
