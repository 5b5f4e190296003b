#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "mcb/error.hpp"
#include "mcb/sim.hpp"

namespace mcb {

namespace {

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, sep)) parts.push_back(item);
  return parts;
}

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(17);
  os << x;
  return os.str();
}

}  // namespace

std::string AdversaryStrategy::to_string() const {
  std::string out;
  switch (kind) {
    case AdversaryKind::kHonest:
      out = "honest";
      break;
    case AdversaryKind::kBoost:
      out = "boost:" + fmt(reward_hi) + ":" + fmt(reward_lo);
      break;
    case AdversaryKind::kFlip:
      out = "flip";
      break;
    case AdversaryKind::kConstant:
      out = "constant:" + fmt(constant);
      break;
    case AdversaryKind::kLeCam:
      out = "lecam";
      break;
  }
  if (context_choice == ContextChoice::kFixed) out += "@" + std::to_string(fixed_context);
  return out;
}

AdversaryStrategy AdversaryStrategy::parse(const std::string& text) {
  std::string body = text;
  AdversaryStrategy out;
  int pinned = -1;
  if (const auto at = text.find('@'); at != std::string::npos) {
    body = text.substr(0, at);
    try {
      pinned = std::stoi(text.substr(at + 1));
    } catch (const std::logic_error&) {
      fail(ErrorCode::kParse, "bad context pin in adversary '" + text + "'");
    }
    require(pinned >= 0, "adversary context pin must be non-negative");
  }
  const auto parts = split(body, ':');
  require(!parts.empty(), "empty adversary spec");
  try {
    if (parts[0] == "honest" && parts.size() == 1) {
      out = honest();
    } else if (parts[0] == "boost" && (parts.size() == 1 || parts.size() == 3)) {
      out = parts.size() == 3 ? boost(std::stod(parts[1]), std::stod(parts[2])) : boost();
    } else if (parts[0] == "flip" && parts.size() == 1) {
      out = flip();
    } else if (parts[0] == "constant" && parts.size() == 2) {
      out = constant_reward(std::stod(parts[1]));
    } else if (parts[0] == "lecam" && parts.size() == 1) {
      out.kind = AdversaryKind::kLeCam;
    } else {
      fail(ErrorCode::kParse, "unknown adversary spec '" + text + "'");
    }
  } catch (const std::logic_error&) {
    fail(ErrorCode::kParse, "malformed adversary spec '" + text + "'");
  }
  if (pinned >= 0) out.in_context(pinned);
  return out;
}

int Population::num_good() const {
  return static_cast<int>(std::count(good.begin(), good.end(), std::uint8_t{1}));
}

int Population::pick_good_user(std::uint64_t seed) const {
  std::vector<int> ids;
  for (int i = 0; i < num_users; ++i) {
    if (is_good(i)) ids.push_back(i);
  }
  require(!ids.empty(), "population has no good users");
  Rng rng(derive_seed(seed, "eval_user"));
  return ids[rng.below(ids.size())];
}

BanditInstance Population::task_of(const BanditInstance& shared, int i) const {
  if (per_user_mu.empty() || per_user_mu[static_cast<std::size_t>(i)].empty()) return shared;
  return BanditInstance(shared.num_contexts(), shared.num_actions(), shared.nu(),
                        per_user_mu[static_cast<std::size_t>(i)], shared.noise(), shared.seed());
}

Population make_population(int num_users, double alpha, AdversaryStrategy adversary, std::uint64_t seed,
                           AdversaryCount count) {
  require(num_users >= 1, "population needs at least one user");
  require(alpha >= 0.0 && alpha < 1.0, "alpha must lie in [0, 1)");
  Population pop;
  pop.num_users = num_users;
  pop.good.assign(static_cast<std::size_t>(num_users), 1);
  pop.adversary = std::move(adversary);
  Rng rng(derive_seed(seed, "population"));
  if (count == AdversaryCount::kExact) {
    const auto bad = static_cast<std::size_t>(std::floor(alpha * num_users + 1e-9));
    std::vector<int> ids(static_cast<std::size_t>(num_users));
    std::iota(ids.begin(), ids.end(), 0);
    // Partial Fisher-Yates: the first `bad` slots are a uniform subset.
    for (std::size_t k = 0; k < bad; ++k) {
      std::swap(ids[k], ids[k + rng.below(ids.size() - k)]);
      pop.good[static_cast<std::size_t>(ids[k])] = 0;
    }
  } else {
    for (auto& g : pop.good) g = rng.bernoulli(alpha) ? 0 : 1;
  }
  return pop;
}

Population perturb_population(const BanditInstance& instance, int num_users, double alpha, double eps0,
                              std::uint64_t seed, AdversaryStrategy adversary) {
  require(eps0 >= 0.0, "eps0 must be non-negative");
  Population pop = make_population(num_users, alpha, std::move(adversary), seed);
  pop.hetero_eps0 = eps0;
  if (eps0 == 0.0) return pop;
  Rng rng(derive_seed(seed, "hetero"));
  pop.per_user_mu.resize(static_cast<std::size_t>(num_users));
  for (int i = 0; i < num_users; ++i) {
    if (!pop.is_good(i)) continue;
    auto& table = pop.per_user_mu[static_cast<std::size_t>(i)];
    table = instance.mu();
    for (double& m : table) {
      m = std::clamp(m + eps0 * (2.0 * rng.uniform() - 1.0), instance.min_mean(), instance.max_mean());
    }
  }
  return pop;
}

}  // namespace mcb
