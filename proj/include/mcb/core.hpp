#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace mcb {

enum class NoiseKind { kBernoulli, kTruncatedGaussian };

struct NoiseLaw {
  NoiseKind kind = NoiseKind::kBernoulli;
  // Variance of the untruncated Gaussian; ignored for Bernoulli.
  double variance = 0.25;

  static NoiseLaw bernoulli() { return {}; }
  static NoiseLaw truncated_gaussian(double variance) { return {NoiseKind::kTruncatedGaussian, variance}; }
  // Half-width of the symmetric truncation window, in standard deviations.
  static constexpr double kTruncation = 2.0;

  bool operator==(const NoiseLaw&) const = default;
};

/// Shared contextual bandit task: context law nu over S contexts, mean-reward
/// table mu (row-major S x A) and the reward noise law.
class BanditInstance {
 public:
  BanditInstance(int num_contexts, int num_actions, std::vector<double> nu, std::vector<double> mu,
                 NoiseLaw noise = NoiseLaw::bernoulli(), std::uint64_t seed = 0);

  int num_contexts() const { return num_contexts_; }
  int num_actions() const { return num_actions_; }
  const std::vector<double>& nu() const { return nu_; }
  const std::vector<double>& mu() const { return mu_; }
  double mu(int s, int a) const { return mu_[static_cast<std::size_t>(s) * num_actions_ + a]; }
  std::span<const double> mu_row(int s) const {
    return {mu_.data() + static_cast<std::size_t>(s) * num_actions_, static_cast<std::size_t>(num_actions_)};
  }
  const NoiseLaw& noise() const { return noise_; }
  std::uint64_t seed() const { return seed_; }

  // Lowest and highest admissible mean under the noise law.
  double min_mean() const;
  double max_mean() const;

  bool operator==(const BanditInstance&) const = default;

 private:
  int num_contexts_;
  int num_actions_;
  std::vector<double> nu_;
  std::vector<double> mu_;
  NoiseLaw noise_;
  std::uint64_t seed_;
};

/// Deterministic (one action per context) or stochastic (row-stochastic S x A) policy.
class Policy {
 public:
  static Policy deterministic(std::vector<int> actions, int num_actions);
  static Policy stochastic(std::vector<double> probs, int num_contexts, int num_actions);

  bool is_deterministic() const { return std::holds_alternative<std::vector<int>>(rep_); }
  int num_contexts() const { return num_contexts_; }
  int num_actions() const { return num_actions_; }
  double prob(int s, int a) const;
  // Action of a deterministic policy, or the most probable action (lowest index on ties).
  int action(int s) const;
  const std::vector<int>& actions() const;

 private:
  Policy(std::variant<std::vector<int>, std::vector<double>> rep, int num_contexts, int num_actions)
      : rep_(std::move(rep)), num_contexts_(num_contexts), num_actions_(num_actions) {}

  std::variant<std::vector<int>, std::vector<double>> rep_;
  int num_contexts_;
  int num_actions_;
};

struct ValueReport {
  double value = 0.0;
  double optimal_value = 0.0;
  double suboptimality = 0.0;
};

struct NuSpec {
  enum class Kind { kUniform, kPowerLaw, kExplicit };
  Kind kind = Kind::kUniform;
  double gamma = 1.0;
  std::vector<double> weights;

  static NuSpec uniform() { return {}; }
  static NuSpec power_law(double gamma) { return {Kind::kPowerLaw, gamma, {}}; }
  static NuSpec explicit_weights(std::vector<double> w) { return {Kind::kExplicit, 0.0, std::move(w)}; }
  std::string to_string() const;
  static NuSpec parse(const std::string& text);
};

// Index of the largest entry; ties go to the lowest index.
int argmax_lowest(std::span<const double> row);

double value(const BanditInstance& instance, const Policy& policy);
Policy optimal_policy(const BanditInstance& instance);
ValueReport evaluate(const BanditInstance& instance, const Policy& policy);
// Deterministic greedy policy w.r.t. an S x A table.
Policy greedy_policy(std::span<const double> table, int num_contexts, int num_actions);

std::vector<double> make_nu(int num_contexts, const NuSpec& spec);

/// One optimal arm per context at base + gap, every other arm at base.
/// Bernoulli noise centres the two levels on 1/2.
BanditInstance make_instance(int num_contexts, int num_actions, double gap, const NuSpec& nu_spec,
                             std::uint64_t seed, NoiseLaw noise = NoiseLaw::bernoulli());

double instance_constant_K(const BanditInstance& instance, int a_cut);

std::string to_json(const BanditInstance& instance);
BanditInstance instance_from_json(const std::string& text);

}  // namespace mcb
