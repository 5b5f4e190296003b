#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <thread>

#include "format.hpp"
#include "mcb/algos.hpp"
#include "mcb/harness.hpp"

namespace mcb {
namespace {

double sa_log_sa(double sa) { return sa < 2.0 ? sa : sa * std::log(sa); }

struct GridPoint {
  ExperimentConfig config;
  double x = 0.0;
};

std::vector<GridPoint> grid_points(const ExperimentConfig& base) {
  std::vector<GridPoint> grid;
  const std::vector<double> xs = base.sweep ? base.sweep->values : std::vector<double>{0.0};
  for (double x : xs) {
    GridPoint g{base, x};
    ExperimentConfig& c = g.config;
    if (base.sweep) {
      const std::string& p = base.sweep->param;
      if (p == "S") c.num_contexts = static_cast<int>(std::lround(x));
      if (p == "A") c.num_actions = static_cast<int>(std::lround(x));
      if (p == "L") {
        c.num_users = static_cast<int>(std::lround(x));
        c.l_rule = "fixed";
      }
      if (p == "alpha") c.alpha = x;
      if (p == "alpha_hat") {
        for (auto& a : c.algorithms) a.alpha_hat = x;
      }
      if (p == "T_over_L") c.t_over_l = x;
      if (p == "eps0") c.eps0 = x;
      if (p == "gap") c.gap = x;
    }
    if (c.l_rule == "sa_log_sa") {
      const double sa = static_cast<double>(c.num_contexts) * c.num_actions;
      c.num_users = std::max(
          1, static_cast<int>(std::lround(c.num_users * sa_log_sa(sa) / sa_log_sa(static_cast<double>(c.l_ref_sa)))));
      c.l_rule = "fixed";
    }
    c.validate();
    grid.push_back(std::move(g));
  }
  return grid;
}

std::vector<ResultRow> plan_rows(const ExperimentConfig& config) {
  const auto grid = grid_points(config);
  std::vector<ResultRow> rows;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const ExperimentConfig& c = grid[gi].config;
    const std::int64_t T = c.horizon ? *c.horizon : std::llround(c.t_over_l * c.num_users);
    for (const auto& algo : c.algorithms) {
      for (int rep = 0; rep < c.replications; ++rep) {
        ResultRow r;
        r.experiment = c.name;
        r.param = config.sweep ? config.sweep->param : "none";
        r.x = grid[gi].x;
        r.algorithm = algo.name;
        r.alpha_hat = algo.alpha_hat.value_or(c.alpha);
        r.algo_params = algo.params_string(r.alpha_hat, T);
        r.rep = rep;
        r.seed = derive_seed(derive_seed(config.seed, static_cast<std::uint64_t>(gi)), static_cast<std::uint64_t>(rep));
        r.num_contexts = c.num_contexts;
        r.num_actions = c.num_actions;
        r.num_users = c.num_users;
        r.gap = c.gap;
        r.nu = c.nu.to_string();
        r.noise = noise_to_string(c.noise);
        r.alpha = c.alpha;
        r.alpha_eff = std::max(static_cast<double>(c.num_contexts) * c.num_actions / c.num_users, c.alpha);
        r.attack = c.attack.to_string();
        r.eps0 = c.eps0;
        r.count = detail::count_to_string(c.count);
        r.arrival = c.arrival.to_string();
        r.horizon = T;
        r.t0 = algo.name == "robust_mcb" ? std::max<std::int64_t>(1, std::llround(algo.t0_fraction * T)) : 0;
        rows.push_back(std::move(r));
      }
    }
  }
  return rows;
}

std::string diagnostics_string(const AlgoResult& res) {
  std::string out;
  for (const auto& [k, v] : res.diagnostics) {
    if (!out.empty()) out += ';';
    out += k + "=" + detail::fmt(v);
  }
  if (!res.warnings.empty()) {
    if (!out.empty()) out += ';';
    out += "warnings=" + std::to_string(res.warnings.size());
  }
  return out;
}

AlgoResult dispatch(const ResultRow& row, Environment& env, const Population& pop) {
  const AlgorithmSpec spec = AlgorithmSpec::from_params(row.algorithm, row.algo_params);
  RobustOptions opts;
  opts.trim.c_trim = spec.c_trim;
  const double alpha_hat = spec.alpha_hat.value_or(row.alpha);
  if (row.algorithm == "robust_mcb") {
    require(row.t0 >= 1 && row.t0 < row.horizon, "robust_mcb: need 1 <= T0 < T");
    return robust_mcb(env, alpha_hat, row.t0, row.horizon - row.t0, opts);
  }
  if (row.algorithm == "mab_baseline") return mab_baseline(env, alpha_hat, row.horizon, opts);
  if (row.algorithm == "highdim_baseline") return highdim_baseline(env, alpha_hat, row.horizon, opts);
  if (row.algorithm == "naive_ucb") return naive_ucb(env, row.horizon);
  if (row.algorithm == "independent_ucb") {
    return independent_ucb(env, row.horizon, pop.pick_good_user(row.seed));
  }
  if (row.algorithm == "corruption_robust_ucb") {
    return corruption_robust_ucb(env, row.horizon,
                                 spec.corruption_budget.value_or(std::sqrt(static_cast<double>(row.horizon))));
  }
  fail(ErrorCode::kUnknownKind, "unknown algorithm '" + row.algorithm + "'");
}

}  // namespace

int default_workers() {
  if (const char* env = std::getenv("MCB_WORKERS")) {
    const int w = std::atoi(env);
    if (w >= 1) return w;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

ResultRow execute_row(ResultRow row, bool record_wall_time) {
  const auto start = std::chrono::steady_clock::now();
  row.status = "ok";
  row.message.clear();
  row.diagnostics.clear();
  try {
    const BanditInstance inst = make_instance(row.num_contexts, row.num_actions, row.gap, NuSpec::parse(row.nu),
                                              row.seed, parse_noise(row.noise));
    const AdversaryStrategy strategy = AdversaryStrategy::parse(row.attack);
    const Population pop = row.eps0 > 0.0
                               ? perturb_population(inst, row.num_users, row.alpha, row.eps0, row.seed, strategy)
                               : make_population(row.num_users, row.alpha, strategy, row.seed,
                                                 detail::parse_count(row.count));
    row.k_constant = instance_constant_K(inst, row.num_actions);
    Environment env(inst, pop, ArrivalModel::parse(row.arrival), row.seed);
    const AlgoResult res = dispatch(row, env, pop);
    const BanditInstance task = pop.task_of(inst, pop.pick_good_user(row.seed));
    row.optimal_value = value(task, optimal_policy(task));
    row.value = value(task, res.policy);
    row.suboptimality = row.optimal_value - row.value;
    row.diagnostics = diagnostics_string(res);
  } catch (const std::exception& e) {
    row.status = "error";
    row.message = e.what();
    row.optimal_value = row.value = row.suboptimality = 0.0;
  }
  if (record_wall_time) {
    row.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return row;
}

SweepResult run_experiment(const ExperimentConfig& config, int workers) {
  config.validate();
  SweepResult out;
  out.rows = plan_rows(config);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next++; k < out.rows.size(); k = next++) {
      out.rows[k] = execute_row(std::move(out.rows[k]), config.record_wall_time);
    }
  };
  const int n = std::max(1, std::min<int>(workers, static_cast<int>(out.rows.size())));
  std::vector<std::thread> pool;
  for (int w = 1; w < n; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  return out;
}

SweepResult sweep_effective_corruption(ExperimentConfig config, const std::vector<int>& users, int workers) {
  Sweep s;
  s.param = "L";
  for (int L : users) s.values.push_back(L);
  config.sweep = s;
  return run_experiment(config, workers);
}

SweepResult sweep_alpha_misspec(ExperimentConfig config, double alpha_hat, const std::vector<double>& alphas,
                                int workers) {
  for (auto& a : config.algorithms) a.alpha_hat = alpha_hat;
  config.sweep = Sweep{"alpha", alphas};
  return run_experiment(config, workers);
}

ResultRow replay(const SweepResult& result, std::size_t index) {
  require(index < result.rows.size(), "replay: row index out of range");
  const ResultRow& row = result.rows[index];
  return execute_row(row, row.wall_time.has_value());
}

}  // namespace mcb
