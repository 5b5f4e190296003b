#include "mcb/core.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <sstream>

#include "mcb/error.hpp"
#include "mcb/rng.hpp"

namespace mcb {

namespace {

constexpr double kSimplexTol = 1e-12;

double sum_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

}  // namespace

BanditInstance::BanditInstance(int num_contexts, int num_actions, std::vector<double> nu, std::vector<double> mu,
                               NoiseLaw noise, std::uint64_t seed)
    : num_contexts_(num_contexts),
      num_actions_(num_actions),
      nu_(std::move(nu)),
      mu_(std::move(mu)),
      noise_(noise),
      seed_(seed) {
  require(num_contexts_ > 0 && num_actions_ > 0, "instance needs S >= 1 and A >= 1");
  if (nu_.size() != static_cast<std::size_t>(num_contexts_) ||
      mu_.size() != static_cast<std::size_t>(num_contexts_) * num_actions_) {
    fail(ErrorCode::kDimensionMismatch, "nu must have S entries and mu S*A entries");
  }
  for (double p : nu_) require(p >= 0.0 && std::isfinite(p), "nu entries must be finite and non-negative");
  require(std::abs(sum_of(nu_) - 1.0) <= kSimplexTol, "nu must sum to 1");
  if (noise_.kind == NoiseKind::kTruncatedGaussian) {
    require(noise_.variance >= 0.0 && noise_.variance <= 1.0, "Gaussian noise variance must lie in [0, 1]");
  }
  for (double m : mu_) {
    require(std::isfinite(m) && m >= min_mean() && m <= max_mean(), "mean reward outside the admissible range");
  }
}

double BanditInstance::min_mean() const { return noise_.kind == NoiseKind::kBernoulli ? 0.0 : -1.0; }
double BanditInstance::max_mean() const { return 1.0; }

Policy Policy::deterministic(std::vector<int> actions, int num_actions) {
  require(num_actions > 0, "policy needs at least one action");
  for (int a : actions) require(a >= 0 && a < num_actions, "deterministic action out of range");
  const int s = static_cast<int>(actions.size());
  return Policy(std::move(actions), s, num_actions);
}

Policy Policy::stochastic(std::vector<double> probs, int num_contexts, int num_actions) {
  require(num_contexts > 0 && num_actions > 0, "policy needs S >= 1 and A >= 1");
  if (probs.size() != static_cast<std::size_t>(num_contexts) * num_actions) {
    fail(ErrorCode::kDimensionMismatch, "stochastic policy must have S*A entries");
  }
  for (int s = 0; s < num_contexts; ++s) {
    std::span<const double> row(probs.data() + static_cast<std::size_t>(s) * num_actions, num_actions);
    for (double p : row) require(p >= 0.0, "policy probabilities must be non-negative");
    require(std::abs(sum_of(row) - 1.0) <= kSimplexTol, "policy rows must sum to 1");
  }
  return Policy(std::move(probs), num_contexts, num_actions);
}

double Policy::prob(int s, int a) const {
  if (const auto* acts = std::get_if<std::vector<int>>(&rep_)) return (*acts)[s] == a ? 1.0 : 0.0;
  return std::get<std::vector<double>>(rep_)[static_cast<std::size_t>(s) * num_actions_ + a];
}

int Policy::action(int s) const {
  if (const auto* acts = std::get_if<std::vector<int>>(&rep_)) return (*acts)[s];
  const auto& p = std::get<std::vector<double>>(rep_);
  return argmax_lowest({p.data() + static_cast<std::size_t>(s) * num_actions_, static_cast<std::size_t>(num_actions_)});
}

const std::vector<int>& Policy::actions() const {
  const auto* acts = std::get_if<std::vector<int>>(&rep_);
  require(acts != nullptr, "policy is not deterministic");
  return *acts;
}

int argmax_lowest(std::span<const double> row) {
  require(!row.empty(), "argmax of an empty row");
  int best = 0;
  for (int a = 1; a < static_cast<int>(row.size()); ++a) {
    if (row[a] > row[best]) best = a;
  }
  return best;
}

double value(const BanditInstance& instance, const Policy& policy) {
  if (policy.num_contexts() != instance.num_contexts() || policy.num_actions() != instance.num_actions()) {
    fail(ErrorCode::kDimensionMismatch, "policy dimensions do not match the instance");
  }
  double v = 0.0;
  for (int s = 0; s < instance.num_contexts(); ++s) {
    double row = 0.0;
    if (policy.is_deterministic()) {
      row = instance.mu(s, policy.action(s));
    } else {
      for (int a = 0; a < instance.num_actions(); ++a) row += policy.prob(s, a) * instance.mu(s, a);
    }
    v += instance.nu()[s] * row;
  }
  return v;
}

Policy optimal_policy(const BanditInstance& instance) {
  std::vector<int> acts(instance.num_contexts());
  for (int s = 0; s < instance.num_contexts(); ++s) acts[s] = argmax_lowest(instance.mu_row(s));
  return Policy::deterministic(std::move(acts), instance.num_actions());
}

ValueReport evaluate(const BanditInstance& instance, const Policy& policy) {
  ValueReport r;
  r.value = value(instance, policy);
  r.optimal_value = value(instance, optimal_policy(instance));
  r.suboptimality = r.optimal_value - r.value;
  return r;
}

Policy greedy_policy(std::span<const double> table, int num_contexts, int num_actions) {
  if (table.size() != static_cast<std::size_t>(num_contexts) * num_actions) {
    fail(ErrorCode::kDimensionMismatch, "table must have S*A entries");
  }
  std::vector<int> acts(num_contexts);
  for (int s = 0; s < num_contexts; ++s) {
    acts[s] = argmax_lowest(table.subspan(static_cast<std::size_t>(s) * num_actions, num_actions));
  }
  return Policy::deterministic(std::move(acts), num_actions);
}

std::string NuSpec::to_string() const {
  std::ostringstream os;
  os.precision(17);
  switch (kind) {
    case Kind::kUniform:
      return "uniform";
    case Kind::kPowerLaw:
      os << "powerlaw:" << gamma;
      return os.str();
    case Kind::kExplicit:
      os << "explicit:";
      for (std::size_t i = 0; i < weights.size(); ++i) os << (i ? ";" : "") << weights[i];
      return os.str();
  }
  return "uniform";
}

NuSpec NuSpec::parse(const std::string& text) {
  if (text == "uniform") return uniform();
  const auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : text.substr(colon + 1);
  try {
    if (head == "powerlaw") return power_law(std::stod(tail));
    if (head == "explicit") {
      std::vector<double> w;
      std::stringstream ss(tail);
      std::string item;
      while (std::getline(ss, item, ';')) w.push_back(std::stod(item));
      return explicit_weights(std::move(w));
    }
  } catch (const std::logic_error&) {
    fail(ErrorCode::kParse, "malformed nu spec '" + text + "'");
  }
  fail(ErrorCode::kParse, "unknown nu spec '" + text + "'");
}

std::vector<double> make_nu(int num_contexts, const NuSpec& spec) {
  require(num_contexts > 0, "need at least one context");
  std::vector<double> w(num_contexts);
  switch (spec.kind) {
    case NuSpec::Kind::kUniform:
      std::fill(w.begin(), w.end(), 1.0);
      break;
    case NuSpec::Kind::kPowerLaw:
      require(spec.gamma > 0.0, "power-law exponent gamma must be positive");
      for (int j = 0; j < num_contexts; ++j) w[j] = std::pow(static_cast<double>(j + 1), -(1.0 + spec.gamma));
      break;
    case NuSpec::Kind::kExplicit:
      if (spec.weights.size() != static_cast<std::size_t>(num_contexts)) {
        fail(ErrorCode::kDimensionMismatch, "explicit nu must have S weights");
      }
      w = spec.weights;
      for (double x : w) require(x >= 0.0 && std::isfinite(x), "explicit nu weights must be non-negative");
      break;
  }
  const double total = sum_of(w);
  require(total > 0.0, "nu weights sum to zero");
  for (double& x : w) x /= total;
  return w;
}

BanditInstance make_instance(int num_contexts, int num_actions, double gap, const NuSpec& nu_spec,
                             std::uint64_t seed, NoiseLaw noise) {
  require(gap > 0.0 && gap <= 1.0, "gap must lie in (0, 1]");
  require(num_contexts > 0 && num_actions > 0, "instance needs S >= 1 and A >= 1");
  const double base = 0.5 - gap / 2.0;
  Rng rng(derive_seed(seed, "instance"));
  std::vector<double> mu(static_cast<std::size_t>(num_contexts) * num_actions, base);
  for (int s = 0; s < num_contexts; ++s) {
    const auto best = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(num_actions)));
    // base + gap, written so the row maximum is exactly 0.5 + gap/2.
    mu[static_cast<std::size_t>(s) * num_actions + best] = 0.5 + gap / 2.0;
  }
  return BanditInstance(num_contexts, num_actions, make_nu(num_contexts, nu_spec), std::move(mu), noise, seed);
}

double instance_constant_K(const BanditInstance& instance, int a_cut) {
  require(a_cut >= 0, "A_cut must be non-negative");
  std::vector<double> sorted = instance.nu();
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const auto head = std::min<std::size_t>(static_cast<std::size_t>(a_cut), sorted.size());
  double k = 0.0;
  for (std::size_t j = 0; j < head; ++j) k += std::sqrt(sorted[j]);
  double tail = 0.0;
  for (std::size_t j = head; j < sorted.size(); ++j) tail += sorted[j];
  return k + std::sqrt(tail * a_cut);
}

}  // namespace mcb
