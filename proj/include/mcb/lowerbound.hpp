#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "mcb/rng.hpp"
#include "mcb/sim.hpp"

namespace mcb {

/// Adversarial reward-tape law E^(n), stored per Hamming-weight class.
struct WeightLawE {
  int n = 0;
  double alpha = 0.0;
  double eps = 0.0;
  int num_users = 0;
  double delta_max = 0.0;    // 4 sqrt(n ln L)
  std::vector<double> mass;  // mass[k]: total probability of all weight-k sequences
  double z = 1.0;
  double z_minus_one = 0.0;  // kept separately; Z - 1 is often far below machine epsilon
  std::vector<std::string> warnings;

  // Imbalance (#1 - #0) within the threshold.
  bool good_class(int k) const { return 2.0 * k - n <= delta_max; }
};

/// Largest n inside the construction's regime: floor(0.01 alpha^2 / (eps^2 ln L)).
int lecam_max_n(double alpha, double eps, int num_users);

WeightLawE build_E_n(int n, double alpha, double eps, int num_users);

/// Exact d_TV(B(1/2)^n, (1 - alpha) B(1/2 + eps)^n + alpha E^(n)).
double tv_mixture(const WeightLawE& law);
double tv_mixture(int n, double alpha, double eps, int num_users);
// TV between the first m coordinates of the mixture and B(1/2)^m, 0 <= m <= law.n.
double tv_prefix(const WeightLawE& law, int m);

/// Weight class by mass, then a uniformly random arrangement of that many ones.
std::vector<std::uint8_t> sample_tape(const WeightLawE& law, Rng& rng);

struct LowerBoundRow {
  int n = 0;
  double alpha = 0.0;
  double eps = 0.0;
  int num_users = 0;
  double z = 1.0;
  double tv = 0.0;
  double bound = 0.0;  // 1 / L^4
  bool pass = false;
  std::string error;
};

/// Grid rows for alpha x L x n with eps chosen so that lecam_max_n(alpha, eps, L) == n.
std::vector<LowerBoundRow> lower_bound_grid(const std::vector<double>& alphas, const std::vector<int>& users,
                                            const std::vector<int>& ns);

// ---------------------------------------------------------------------------
// Systems A and B

enum class SystemVariant { kA, kB };

struct SystemSpec {
  SystemVariant variant = SystemVariant::kA;
  int num_contexts = 2;
  int num_actions = 2;
  std::vector<int> a_star;  // hidden optimal arm per context
  double alpha = 0.1;
  double eps = 0.01;
  int n = 8;
  int num_users = 20;
};

struct SystemRun {
  InteractionLog log;
  std::vector<std::uint8_t> adversarial;
  bool event_e = false;  // some user exceeded n plays of a*(s_t)
  std::int64_t max_astar_plays = 0;
};

/// Round-robin over users with per-user budget N. A user whose a*-play count reaches
/// `astar_cap` leaves the system (cap <= 0 disables the limit). Users are adversarial
/// independently with probability alpha; contexts are uniform for everyone.
SystemRun run_system(const SystemSpec& spec, Agent& agent, std::int64_t per_user_budget, std::uint64_t seed,
                     std::int64_t astar_cap = 0);

struct GameInfo {
  int num_contexts = 0;
  int num_actions = 0;
  double alpha = 0.0;
  double eps = 0.0;
  int num_users = 0;
  std::int64_t per_user_budget = 0;
  std::vector<int> a_star;  // handed only to the oracle
};

class Distinguisher : public Agent {
 public:
  // true = guess system B.
  virtual bool guess_b() = 0;
};

enum class DistinguisherKind { kCoinFlip, kUniformRandom, kExploreGreedy, kOracle };

std::string to_string(DistinguisherKind kind);
DistinguisherKind parse_distinguisher(const std::string& text);
std::unique_ptr<Distinguisher> make_distinguisher(DistinguisherKind kind, const GameInfo& info, std::uint64_t seed);
inline constexpr DistinguisherKind kAllDistinguishers[] = {DistinguisherKind::kCoinFlip,
                                                           DistinguisherKind::kUniformRandom,
                                                           DistinguisherKind::kExploreGreedy,
                                                           DistinguisherKind::kOracle};

struct GameParams {
  double alpha = 0.15;
  double eps = 0.01;
  int num_users = 50;
  int num_contexts = 2;
  int num_actions = 2;
  int n = 8;
  std::int64_t per_user_budget = 800;
  std::int64_t astar_cap = 8;  // n-play budget; 100 n lifts it
  int pairs = 400;
  std::uint64_t seed = 1;
};

struct GameResult {
  double accuracy = 0.0;
  int correct = 0;
  int trials = 0;
  double event_rate = 0.0;
};

/// Each pair runs A and B on the same seed and the same hidden a*; accuracy is over both runs.
GameResult distinguish_experiment(const GameParams& params, DistinguisherKind kind);

}  // namespace mcb
