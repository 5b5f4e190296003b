#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "mcb/error.hpp"
#include "mcb/harness.hpp"

using namespace mcb;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig c;
  c.name = "small";
  c.seed = 42;
  c.replications = 3;
  c.num_contexts = 3;
  c.num_actions = 3;
  c.num_users = 60;
  c.alpha = 0.2;
  c.t_over_l = 20;
  c.algorithms = {AlgorithmSpec{"robust_mcb"}, AlgorithmSpec{"naive_ucb"}};
  return c;
}

std::string to_csv(const SweepResult& r) {
  std::ostringstream os;
  write_results_csv(os, r);
  return os.str();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

fs::path scratch_dir(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("mcb_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("row count") {
  auto c = small_config();
  c.replications = 1;
  CHECK(run_experiment(c, 1).rows.size() == 2);

  c.replications = 4;
  c.sweep = Sweep{"alpha", {0.0, 0.1, 0.2}};
  const auto r = run_experiment(c, 2);
  REQUIRE(r.rows.size() == 3 * 2 * 4);
  // Canonical order: grid point, then algorithm, then replication.
  std::size_t k = 0;
  for (double x : {0.0, 0.1, 0.2}) {
    for (const char* algo : {"robust_mcb", "naive_ucb"}) {
      for (int rep = 0; rep < 4; ++rep, ++k) {
        CHECK(r.rows[k].x == x);
        CHECK(r.rows[k].algorithm == algo);
        CHECK(r.rows[k].rep == rep);
      }
    }
  }
}

TEST_CASE("paired seeds are derived from the master seed and indices") {
  auto c = small_config();
  c.sweep = Sweep{"T_over_L", {10, 20}};
  const auto r = run_experiment(c, 1);
  for (const auto& row : r.rows) {
    const std::size_t grid = row.x == 10 ? 0 : 1;
    CHECK(row.seed == derive_seed(derive_seed(c.seed, grid), static_cast<std::uint64_t>(row.rep)));
  }
  CHECK(r.rows[0].seed == r.rows[3].seed);  // same replication, different algorithm
}

TEST_CASE("determinism across reruns and worker counts") {
  auto c = small_config();
  c.sweep = Sweep{"alpha", {0.1, 0.2}};
  const auto a = to_csv(run_experiment(c, 1));
  const auto b = to_csv(run_experiment(c, 1));
  const auto d = to_csv(run_experiment(c, 3));
  CHECK(a == b);
  CHECK(a == d);
  CHECK(a.rfind(kResultsVersion, 0) == 0);
}

TEST_CASE("CSV round trip") {
  auto c = small_config();
  c.record_wall_time = true;
  const auto r = run_experiment(c, 1);
  const auto text = to_csv(r);
  CHECK(text.find("wall_time") != std::string::npos);
  std::istringstream in(text);
  const auto back = read_results_csv(in);
  REQUIRE(back.rows.size() == r.rows.size());
  CHECK(to_csv(back) == text);

  c.record_wall_time = false;
  CHECK(to_csv(run_experiment(c, 1)).find("wall_time") == std::string::npos);

  std::istringstream bad("t,user\n1,2\n");
  CHECK_THROWS_AS(read_results_csv(bad), Error);
}

TEST_CASE("replay reproduces every row in isolation") {
  auto c = small_config();
  c.algorithms.push_back(AlgorithmSpec{"independent_ucb"});
  c.algorithms.push_back(AlgorithmSpec{"corruption_robust_ucb"});
  const auto r = run_experiment(c, 1);
  std::istringstream in(to_csv(r));
  const auto loaded = read_results_csv(in);
  for (std::size_t k = 0; k < loaded.rows.size(); ++k) {
    const auto again = replay(loaded, k);
    CHECK(again.suboptimality == loaded.rows[k].suboptimality);
    CHECK(again.value == loaded.rows[k].value);
    CHECK(again.diagnostics == loaded.rows[k].diagnostics);
  }
  CHECK_THROWS_AS(replay(loaded, loaded.rows.size()), Error);
}

TEST_CASE("algorithm failures are recorded per row") {
  auto c = small_config();
  c.num_users = 2;  // fewer users than arms: some (context, arm) group is empty
  c.num_actions = 4;
  c.algorithms = {AlgorithmSpec{"mab_baseline"}, AlgorithmSpec{"naive_ucb"}};
  const auto r = run_experiment(c, 1);
  REQUIRE(r.rows.size() == 6);
  CHECK(r.rows[0].status == "error");
  CHECK_FALSE(r.rows[0].message.empty());
  CHECK(r.rows[3].status == "ok");
}

TEST_CASE("effective corruption column") {
  auto c = small_config();
  c.replications = 1;
  const auto r = sweep_effective_corruption(c, {10, 45, 200}, 1);
  REQUIRE(r.rows.size() == 6);
  for (const auto& row : r.rows) {
    CHECK(row.param == "L");
    CHECK(row.num_users == static_cast<int>(row.x));
    CHECK(row.alpha_eff == std::max(9.0 / row.num_users, 0.2));
  }
}

TEST_CASE("alpha misspecification sweep fixes alpha_hat") {
  auto c = small_config();
  c.replications = 1;
  const auto r = sweep_alpha_misspec(c, 0.1, {0.0, 0.3}, 1);
  REQUIRE(r.rows.size() == 4);
  for (const auto& row : r.rows) {
    CHECK(row.alpha == row.x);
    if (row.algorithm == "robust_mcb") CHECK(row.alpha_hat == 0.1);
  }
}

TEST_CASE("aggregation matches a recomputation from raw rows") {
  auto c = small_config();
  c.replications = 7;
  c.sweep = Sweep{"alpha", {0.0, 0.2}};
  const auto r = run_experiment(c, 1);
  std::map<std::pair<double, std::string>, std::vector<double>> groups;
  for (const auto& row : r.rows) groups[{row.x, row.algorithm}].push_back(row.suboptimality);
  const auto summary = aggregate(r);
  REQUIRE(summary.size() == groups.size());
  for (const auto& s : summary) {
    const auto& v = groups.at({s.x, s.algorithm});
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    double ss = 0.0;
    for (double x : v) ss += (x - m) * (x - m);
    const double se = std::sqrt(ss / (v.size() - 1)) / std::sqrt(double(v.size()));
    CHECK(s.n == static_cast<int>(v.size()));
    CHECK(s.mean == doctest::Approx(m).epsilon(1e-12));
    CHECK(s.stderr_mean == doctest::Approx(se).epsilon(1e-12));
  }
  std::ostringstream os;
  write_summary_csv(os, summary);
  std::istringstream in(os.str());
  const auto back = read_summary_csv(in);
  REQUIRE(back.size() == summary.size());
  for (std::size_t k = 0; k < back.size(); ++k) CHECK(back[k].mean == summary[k].mean);
}

TEST_CASE("plots") {
  const auto dir = scratch_dir("plots");
  SUBCASE("empty result is an error and writes nothing") {
    CHECK_THROWS_AS(emit_plots(SweepResult{}, "fig2d", (dir / "empty").string()), Error);
    CHECK(fs::is_empty(dir));
  }
  SUBCASE("unknown kind is an error") {
    auto c = small_config();
    c.replications = 1;
    try {
      (void)emit_plots(run_experiment(c, 1), "fig9z", (dir / "x").string());
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::kUnknownKind);
    }
    CHECK(fs::is_empty(dir));
  }
  SUBCASE("four curves against alpha, byte-identical re-render") {
    auto c = small_config();
    c.replications = 2;
    c.algorithms = {AlgorithmSpec{"robust_mcb"}, AlgorithmSpec{"naive_ucb"}, AlgorithmSpec{"independent_ucb"},
                    AlgorithmSpec{"corruption_robust_ucb"}};
    c.sweep = Sweep{"alpha", {0.0, 0.1, 0.2, 0.3}};
    const auto r = run_experiment(c, 1);
    const auto files = emit_plots(r, "fig2d", (dir / "a").string());
    const auto svg = slurp(files.svg);
    CHECK(svg.rfind("<svg", 0) == 0);
    for (const char* name : {"robust_mcb", "naive_ucb", "independent_ucb", "corruption_robust_ucb"}) {
      CHECK(svg.find(name) != std::string::npos);
    }
    std::ifstream in(files.summary_csv);
    CHECK(render_svg(read_summary_csv(in), "fig2d") == svg);
    const auto again = emit_plots(r, "fig2d", (dir / "b").string());
    CHECK(slurp(again.svg) == svg);
    CHECK(slurp(again.summary_csv) == slurp(files.summary_csv));
  }
  fs::remove_all(dir);
}

TEST_CASE("config JSON") {
  const std::string text = R"({
    "name": "demo", "seed": 9, "replications": 5,
    "instance": {"S": 4, "A": 6, "gap": 0.25, "nu": "powerlaw:1", "noise": "gaussian:0.1"},
    "population": {"L": 80, "alpha": 0.15, "attack": "boost:1:0@2", "eps0": 0.01, "count": "bernoulli"},
    "arrival": "iid_uniform",
    "budget": {"T_over_L": 12},
    "algorithms": ["naive_ucb", {"name": "robust_mcb", "alpha_hat": 0.2, "t0_fraction": 0.2}],
    "sweep": {"param": "alpha", "values": [0.0, 0.1]},
    "output": "out.csv"
  })";
  const auto c = ExperimentConfig::from_json(text);
  CHECK(c.name == "demo");
  CHECK(c.num_actions == 6);
  CHECK(c.attack.to_string() == "boost:1:0@2");
  CHECK(c.count == AdversaryCount::kBernoulli);
  CHECK(c.algorithms.size() == 2);
  CHECK(c.algorithms[1].alpha_hat == 0.2);
  CHECK(c.sweep->values.size() == 2);
  CHECK(ExperimentConfig::from_json(c.to_json()).to_json() == c.to_json());

  const auto over = ExperimentConfig::from_json(
      apply_overrides(text, {"population.alpha=0.3", "instance.S=7", "name=renamed", "sweep.values=[0.2]"}));
  CHECK(over.alpha == 0.3);
  CHECK(over.num_contexts == 7);
  CHECK(over.name == "renamed");
  CHECK(over.sweep->values == std::vector<double>{0.2});

  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"instance\": {\"S\": \"many\"}}"), Error);
  CHECK_THROWS_AS(apply_overrides(text, {"no_equals_sign"}), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_json("{\"budget\": {\"T_over_l\": 5}, \"algorithms\": [\"naive_ucb\"]}"), Error);
  CHECK_THROWS_AS(ExperimentConfig::from_json(apply_overrides(text, {"T_over_L=20"})), Error);
  auto bad = c;
  bad.algorithms = {AlgorithmSpec{"magic_ucb"}};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = c;
  bad.sweep = Sweep{"colour", {1}};
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("L rule scales users with SA log SA") {
  auto c = small_config();
  c.l_rule = "sa_log_sa";
  c.num_users = 500;
  c.l_ref_sa = 9;
  c.replications = 1;
  c.algorithms = {AlgorithmSpec{"naive_ucb"}};
  c.sweep = Sweep{"S", {3, 6}};
  const auto r = run_experiment(c, 1);
  CHECK(r.rows[0].num_users == 500);
  CHECK(r.rows[1].num_users == static_cast<int>(std::lround(500 * 18 * std::log(18.0) / (9 * std::log(9.0)))));
}

TEST_CASE("estimator bench") {
  BenchParams p;
  p.alphas = {0.1};
  p.dims = {1, 5};
  p.reps = 5;
  const auto rows = estimators_bench(p);
  CHECK_FALSE(rows.empty());
  for (const auto& r : rows) {
    CHECK(r.reps == 5);
    CHECK(r.within <= r.reps);
    CHECK(r.bound == doctest::Approx(3.0 * std::sqrt(0.1)));
  }
  std::ostringstream a, b;
  write_bench_csv(a, rows);
  write_bench_csv(b, estimators_bench(p));
  CHECK(a.str() == b.str());
}
