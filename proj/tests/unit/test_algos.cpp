#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "mcb/algos.hpp"
#include "mcb/error.hpp"

using namespace mcb;

namespace {

Environment make_env(const BanditInstance& inst, int L, double alpha, AdversaryStrategy adv, std::uint64_t seed) {
  return Environment(inst, make_population(L, alpha, std::move(adv), derive_seed(seed, "population")),
                     ArrivalModel::round_robin(), seed);
}

double subopt(const Environment& env, const AlgoResult& r) { return evaluate(env.instance(), r.policy).suboptimality; }

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / v.size(); }

BanditInstance noiseless(int S, int A, double gap, NuSpec nu, std::uint64_t seed) {
  return make_instance(S, A, gap, nu, seed, NoiseLaw::truncated_gaussian(0.0));
}

// Textbook UCB1 per context: play each arm once, then maximise mean + sqrt(2 ln N_s / n).
class TextbookUcb : public Agent {
 public:
  TextbookUcb(int S, int A) : A_(A), n_(S * A, 0), sum_(S * A, 0.0), total_(S, 0) {}
  int choose(int, int s, const InteractionLog&) override {
    s_ = s;
    a_ = -1;
    for (int a = 0; a < A_ && a_ < 0; ++a) {
      if (n_[s * A_ + a] == 0) a_ = a;
    }
    if (a_ < 0) {
      double best = -std::numeric_limits<double>::infinity();
      for (int a = 0; a < A_; ++a) {
        const double v = sum_[s * A_ + a] / n_[s * A_ + a] + std::sqrt(2.0 * std::log(double(total_[s])) / n_[s * A_ + a]);
        if (v > best) {
          best = v;
          a_ = a;
        }
      }
    }
    return a_;
  }
  void observe(double r) override {
    ++n_[s_ * A_ + a_];
    sum_[s_ * A_ + a_] += r;
    ++total_[s_];
  }

 private:
  int A_;
  std::vector<int> n_;
  std::vector<double> sum_;
  std::vector<int> total_;
  int s_ = 0, a_ = 0;
};

}  // namespace

TEST_CASE("robust location") {
  RobustOptions opts;
  const std::vector<double> x{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  CHECK(robust_location(x, 0.1, opts) == doctest::Approx(5.5));
  // 2k >= N falls back to the lower median.
  const std::vector<double> y{5, 1, 9, 3};
  CHECK(robust_location(y, 0.3, opts) == 3.0);
  opts.median_fallback = false;
  CHECK_THROWS_AS(robust_location(y, 0.3, opts), Error);
  CHECK_THROWS_AS(robust_location(std::vector<double>{}, 0.1, RobustOptions{}), Error);
}

TEST_CASE("top contexts and group assignment") {
  const std::vector<double> nu{0.1, 0.3, 0.1, 0.3, 0.2};
  CHECK(top_contexts(nu, 3) == std::vector<int>{1, 3, 4});
  CHECK(top_contexts(nu, 5) == std::vector<int>{1, 3, 4, 0, 2});

  const auto g = assign_groups(103, 4, 5, {1, 3, 4}, 7);
  CHECK(g.frequent.size() == 3);
  for (int s : {0, 2}) CHECK(g.slot[s] == -1);
  for (int s : {1, 3, 4}) {
    std::set<int> seen;
    std::size_t total = 0, smallest = 1000, largest = 0;
    for (int a = 0; a < 4; ++a) {
      const auto& members = g.group(s, a);
      for (int i : members) {
        CHECK(g.arm_of(i, s) == a);
        seen.insert(i);
      }
      total += members.size();
      smallest = std::min(smallest, members.size());
      largest = std::max(largest, members.size());
    }
    CHECK(total == 103);
    CHECK(seen.size() == 103);
    CHECK(smallest >= 10);
    CHECK(largest <= 45);
  }
  const auto again = assign_groups(103, 4, 5, {1, 3, 4}, 7);
  for (int i = 0; i < 103; ++i) CHECK(again.arm_of(i, 3) == g.arm_of(i, 3));
}

TEST_CASE("mab_baseline: alpha=0 and noiseless recovers mu exactly") {
  const auto inst = noiseless(3, 4, 0.3, NuSpec::uniform(), 1);
  auto env = make_env(inst, 40, 0.0, AdversaryStrategy::honest(), 1);
  const auto r = mab_baseline(env, 0.0, 40 * 30);
  REQUIRE(r.mu_hat);
  for (std::size_t c = 0; c < inst.mu().size(); ++c) CHECK(r.mu_hat->table[c] == doctest::Approx(inst.mu()[c]).epsilon(1e-12));
  CHECK(subopt(env, r) == 0.0);
}

TEST_CASE("mab_baseline: S=1, A=5, boost attack at T/L = 5 alpha / eps^2") {
  const double eps = 0.1, alpha = 0.2;
  const auto per_user = static_cast<std::int64_t>(std::ceil(5 * alpha / (eps * eps)));
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto inst = make_instance(1, 5, 0.3, NuSpec::uniform(), seed);
    auto env = make_env(inst, 100, alpha, AdversaryStrategy::boost(), seed);
    ok += subopt(env, mab_baseline(env, alpha, 100 * per_user)) <= eps ? 1 : 0;
  }
  CHECK(ok >= 45);
}

TEST_CASE("mab_baseline: huge constant rewards stay inside the trimming band") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto inst = make_instance(2, 3, 0.3, NuSpec::uniform(), seed);
    auto honest = make_env(inst, 200, 0.1, AdversaryStrategy::honest(), seed);
    auto attacked = make_env(inst, 200, 0.1, AdversaryStrategy::constant_reward(1e6), seed);
    const auto a = mab_baseline(honest, 0.1, 200 * 60);
    const auto b = mab_baseline(attacked, 0.1, 200 * 60);
    for (std::size_t c = 0; c < 6; ++c) {
      CHECK(std::abs(a.mu_hat->table[c] - b.mu_hat->table[c]) <= 3.0 * 0.5 * std::sqrt(0.1));
    }
  }
}

TEST_CASE("highdim_baseline") {
  SUBCASE("alpha=0, noiseless: error within 3 sqrt(SA L / T)") {
    const auto inst = noiseless(4, 3, 0.3, NuSpec::uniform(), 2);
    auto env = make_env(inst, 50, 0.0, AdversaryStrategy::honest(), 2);
    const std::int64_t T = 50 * 2000;
    const auto r = highdim_baseline(env, 0.0, T);
    double err = 0.0;
    for (std::size_t c = 0; c < 12; ++c) err += std::pow(r.mu_hat->table[c] - inst.mu()[c], 2);
    CHECK(std::sqrt(err) <= 3.0 * std::sqrt(12.0 * 50 / T));
    CHECK(r.diagnostics.at("certificate") == doctest::Approx(2.0 / std::sqrt(4.0) * std::sqrt(err)));
  }
  SUBCASE("single user degenerates to empirical means") {
    const auto inst = make_instance(3, 2, 0.3, NuSpec::uniform(), 3);
    auto env = make_env(inst, 1, 0.0, AdversaryStrategy::honest(), 3);
    const auto r = highdim_baseline(env, 0.0, 600);
    std::vector<double> sum(6, 0.0);
    for (const auto& rec : env.log().records()) sum[rec.context * 2 + rec.action] += rec.reward;
    for (int c = 0; c < 6; ++c) CHECK(r.mu_hat->table[c] == doctest::Approx(2.0 * sum[c] / 600.0 * 3.0).epsilon(1e-12));
    CHECK(r.diagnostics.at("removed_fraction") == 0.0);
  }
  SUBCASE("S=20, A=5, alpha=0.1 at T/L = 2 alpha A / eps^2") {
    const double eps = 0.15, alpha = 0.1;
    const auto per_user = static_cast<std::int64_t>(std::ceil(2 * alpha * 5 / (eps * eps)));
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto inst = make_instance(20, 5, 0.3, NuSpec::uniform(), seed);
      auto env = make_env(inst, 500, alpha, AdversaryStrategy::boost(), seed);
      ok += subopt(env, highdim_baseline(env, alpha, 500 * per_user)) <= eps ? 1 : 0;
    }
    CHECK(ok >= 40);
  }
}

TEST_CASE("estimate_nu") {
  SUBCASE("single context") {
    const auto inst = make_instance(1, 3, 0.3, NuSpec::uniform(), 1);
    auto env = make_env(inst, 20, 0.2, AdversaryStrategy::boost(), 1);
    const auto nu = estimate_nu(env, 0.2, 200);
    REQUIRE(nu.nu_hat.size() == 1);
    CHECK(nu.nu_hat[0] == doctest::Approx(1.0).epsilon(1e-15));
  }
  SUBCASE("uniform, alpha=0, T0 = 50 L") {
    int ok = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
      const auto inst = make_instance(10, 5, 0.3, NuSpec::uniform(), seed);
      auto env = make_env(inst, 100, 0.0, AdversaryStrategy::honest(), seed);
      const auto nu = estimate_nu(env, 0.0, 5000);
      double l1 = 0.0;
      for (int s = 0; s < 10; ++s) l1 += std::abs(nu.nu_hat[s] - 0.1);
      ok += l1 <= 0.1 ? 1 : 0;
      CHECK(std::accumulate(nu.nu_hat.begin(), nu.nu_hat.end(), 0.0) == doctest::Approx(1.0));
    }
    CHECK(ok >= 45);
  }
}

TEST_CASE("robust_mcb structure") {
  for (auto [S, A] : std::vector<std::pair<int, int>>{{10, 4}, {4, 10}, {6, 6}, {1, 3}}) {
    const auto inst = make_instance(S, A, 0.3, NuSpec::power_law(1.0), 5);
    auto env = make_env(inst, 200, 0.1, AdversaryStrategy::boost(), 5);
    const auto r = robust_mcb(env, 0.1, 2000, 200 * 30);
    REQUIRE(r.mu_hat);
    const auto& prov = r.mu_hat->provenance;
    REQUIRE(prov.size() == static_cast<std::size_t>(S));
    const auto plus = std::count(prov.begin(), prov.end(), Provenance::kUnivariate);
    const auto minus = std::count(prov.begin(), prov.end(), Provenance::kHighDim);
    CHECK(plus == std::min(S, A));
    CHECK(plus + minus == S);
    CHECK(r.diagnostics.at("num_frequent") == std::min(S, A));
  }
}

TEST_CASE("robust_mcb: frequent and rare contexts are estimated independently") {
  const int S = 6, A = 3;
  const auto base = make_instance(S, A, 0.3, NuSpec::power_law(1.0), 8);
  auto run = [&](const BanditInstance& inst) {
    auto env = make_env(inst, 150, 0.1, AdversaryStrategy::constant_reward(1.0), 8);
    return robust_mcb(env, 0.1, 1500, 150 * 40);
  };
  const auto ref = run(base);
  const auto& prov = ref.mu_hat->provenance;
  for (Provenance changed : {Provenance::kUnivariate, Provenance::kHighDim}) {
    std::vector<double> mu = base.mu();
    for (int s = 0; s < S; ++s) {
      if (prov[s] != changed) continue;
      for (int a = 0; a < A; ++a) mu[s * A + a] = 0.9 - 0.5 * mu[s * A + a];
    }
    const auto other = run(BanditInstance(S, A, base.nu(), mu));
    REQUIRE(other.mu_hat->provenance == prov);
    for (int s = 0; s < S; ++s) {
      if (prov[s] == changed) continue;
      for (int a = 0; a < A; ++a) CHECK(other.mu_hat->at(s, a) == ref.mu_hat->at(s, a));
    }
  }
}

TEST_CASE("robust_mcb: injecting the true nu changes suboptimality by at most the nu error") {
  std::vector<double> est_sub, known_sub, l1;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto inst = make_instance(10, 10, 0.3, NuSpec::uniform(), seed);
    auto e1 = make_env(inst, 500, 0.2, AdversaryStrategy::boost(10, 0), seed);
    auto e2 = make_env(inst, 500, 0.2, AdversaryStrategy::boost(10, 0), seed);
    const auto a = robust_mcb(e1, 0.2, 1500, 13500);
    RobustOptions opts;
    opts.known_nu = inst.nu();
    const auto b = robust_mcb(e2, 0.2, 1500, 13500, opts);
    est_sub.push_back(subopt(e1, a));
    known_sub.push_back(subopt(e2, b));
    l1.push_back(a.diagnostics.at("nu_l1_error"));
  }
  CHECK(mean(known_sub) <= mean(est_sub) + mean(l1));
}

TEST_CASE("robust_mcb: uniform nu with S <= A behaves like mab_baseline") {
  std::vector<double> mcb, mab;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto inst = make_instance(4, 6, 0.3, NuSpec::uniform(), seed);
    auto e1 = make_env(inst, 300, 0.2, AdversaryStrategy::boost(), seed);
    auto e2 = make_env(inst, 300, 0.2, AdversaryStrategy::boost(), seed);
    const auto r = robust_mcb(e1, 0.2, 1200, 300 * 36);
    CHECK(r.diagnostics.at("num_frequent") == 4);
    mcb.push_back(subopt(e1, r));
    mab.push_back(subopt(e2, mab_baseline(e2, 0.2, 300 * 40)));
  }
  CHECK(mean(mcb) <= 2.0 * mean(mab) + 0.01);
  CHECK(mean(mab) <= 2.0 * mean(mcb) + 0.01);
}

TEST_CASE("robust_mcb: power-law nu costs at most the K ratio plus slack") {
  std::vector<double> pl, un;
  double k_pl = 0.0, k_un = 0.0;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const auto a = make_instance(10, 10, 0.3, NuSpec::power_law(1.0), seed);
    const auto b = make_instance(10, 10, 0.3, NuSpec::uniform(), seed);
    auto e1 = make_env(a, 500, 0.2, AdversaryStrategy::boost(10, 0), seed);
    auto e2 = make_env(b, 500, 0.2, AdversaryStrategy::boost(10, 0), seed);
    pl.push_back(subopt(e1, robust_mcb(e1, 0.2, 1500, 13500)));
    un.push_back(subopt(e2, robust_mcb(e2, 0.2, 1500, 13500)));
    k_pl = instance_constant_K(a, 10);
    k_un = instance_constant_K(b, 10);
  }
  CHECK(mean(pl) <= (k_pl / k_un + 0.5) * mean(un));
}

TEST_CASE("naive_ucb") {
  SUBCASE("consistent without adversaries") {
    double prev = 1.0;
    for (std::int64_t T : {2000, 20000, 200000}) {
      std::vector<double> s;
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = make_instance(3, 4, 0.3, NuSpec::uniform(), seed);
        auto env = make_env(inst, 50, 0.0, AdversaryStrategy::honest(), seed);
        s.push_back(subopt(env, naive_ucb(env, T)));
      }
      CHECK(mean(s) <= prev);
      prev = mean(s);
    }
    CHECK(prev == 0.0);
  }
  SUBCASE("boost adversaries flip the chosen arm to the target") {
    // pooled target mean 0.8 * 0.4 + 0.2 = 0.52 beats 0.8 * 0.6 = 0.48
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto inst = make_instance(2, 3, 0.2, NuSpec::uniform(), seed);
      auto env = make_env(inst, 100, 0.2, AdversaryStrategy::boost(), seed);
      const auto r = naive_ucb(env, 100000);
      for (int s = 0; s < 2; ++s) {
        const int best = argmax_lowest(inst.mu_row(s));
        CHECK(r.policy.action(s) == (best == 0 ? 1 : 0));
      }
      CHECK(subopt(env, r) == doctest::Approx(0.2).epsilon(1e-9));
    }
  }
  SUBCASE("ties in the reported policy follow the lowest-index rule") {
    BanditInstance flat(2, 3, {0.5, 0.5}, {0, 0, 0, 0, 0, 0});
    auto env = make_env(flat, 5, 0.0, AdversaryStrategy::honest(), 1);
    const auto r = naive_ucb(env, 300);
    CHECK(r.policy.action(0) == 0);
    CHECK(r.policy.action(1) == 0);
  }
}

TEST_CASE("independent_ucb") {
  SUBCASE("a single user runs textbook UCB1") {
    const auto inst = make_instance(3, 4, 0.3, NuSpec::uniform(), 4);
    auto env = make_env(inst, 1, 0.0, AdversaryStrategy::honest(), 4);
    (void)independent_ucb(env, 5000, 0);
    TextbookUcb oracle(3, 4);
    Environment ref = make_env(inst, 1, 0.0, AdversaryStrategy::honest(), 4);
    ref.run(oracle, 5000);
    for (std::size_t k = 0; k < 5000; ++k) {
      CHECK(env.log().records()[k].action == ref.log().records()[k].action);
    }
  }
  SUBCASE("good users are immune to adversaries") {
    const auto inst = make_instance(4, 4, 0.3, NuSpec::uniform(), 6);
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      Population clean = make_population(40, 0.0, AdversaryStrategy::honest(), seed);
      Population dirty = make_population(40, 0.3, AdversaryStrategy::boost(10, 0), seed);
      const int user = dirty.pick_good_user(seed);
      Environment e1(inst, clean, ArrivalModel::round_robin(), seed);
      Environment e2(inst, dirty, ArrivalModel::round_robin(), seed);
      const auto a = independent_ucb(e1, 40 * 200, user);
      const auto b = independent_ucb(e2, 40 * 200, user);
      CHECK(a.policy.actions() == b.policy.actions());
      CHECK(a.mu_hat->table == b.mu_hat->table);
    }
  }
  SUBCASE("without sharing, few interactions leave a gap") {
    std::vector<double> s;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto inst = make_instance(10, 10, 0.3, NuSpec::uniform(), seed);
      auto env = make_env(inst, 100, 0.0, AdversaryStrategy::honest(), seed);
      s.push_back(subopt(env, independent_ucb(env, 100 * 30, 0)));
    }
    CHECK(mean(s) >= 0.1);
  }
}

TEST_CASE("corruption_robust_ucb") {
  SUBCASE("alpha=0 matches naive UCB within noise") {
    std::vector<double> cr, nv;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const auto inst = make_instance(2, 4, 0.3, NuSpec::uniform(), seed);
      auto e1 = make_env(inst, 100, 0.0, AdversaryStrategy::honest(), seed);
      auto e2 = make_env(inst, 100, 0.0, AdversaryStrategy::honest(), seed);
      cr.push_back(subopt(e1, corruption_robust_ucb(e1, 100000, std::sqrt(100000.0))));
      nv.push_back(subopt(e2, naive_ucb(e2, 100000)));
    }
    CHECK(std::abs(mean(cr) - mean(nv)) <= 0.05);
  }
  SUBCASE("corruption within the budget keeps the optimal arm") {
    // Two adversaries out of 1000 users: about T/500 corrupted steps, inside a budget of 2 T / 500.
    int ok = 0;
    const std::int64_t T = 200000;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto inst = make_instance(1, 4, 0.3, NuSpec::uniform(), seed);
      auto env = make_env(inst, 1000, 0.002, AdversaryStrategy::boost(), seed);
      ok += subopt(env, corruption_robust_ucb(env, T, 2.0 * T / 500)) == 0.0 ? 1 : 0;
    }
    CHECK(ok >= 16);
  }
  SUBCASE("a persistent attack breaks it as alpha grows") {
    std::vector<double> by_alpha;
    for (double alpha : {0.0, 0.1, 0.3}) {
      std::vector<double> s;
      for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto inst = make_instance(2, 5, 0.3, NuSpec::uniform(), seed);
        auto env = make_env(inst, 500, alpha, AdversaryStrategy::boost(), seed);
        s.push_back(subopt(env, corruption_robust_ucb(env, 100000, std::sqrt(100000.0))));
      }
      by_alpha.push_back(mean(s));
    }
    CHECK(by_alpha[0] < by_alpha[1]);
    CHECK(by_alpha[1] <= by_alpha[2]);
  }
}
