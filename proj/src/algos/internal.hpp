#pragma once

#include "mcb/algos.hpp"
#include "mcb/rng.hpp"

namespace mcb::detail {

// Uniform over actions, drawn from the agent stream.
class UniformAgent : public Agent {
 public:
  UniformAgent(int num_actions, std::uint64_t seed) : num_actions_(num_actions), rng_(seed) {}
  int choose(int, int, const InteractionLog&) override {
    return static_cast<int>(rng_.below(static_cast<std::uint64_t>(num_actions_)));
  }
  void observe(double) override {}

 private:
  int num_actions_;
  Rng rng_;
};

// Per-user sample counts over log records [begin, end).
std::vector<std::int64_t> user_counts(const InteractionLog& log, std::size_t begin, std::size_t end);

}  // namespace mcb::detail
