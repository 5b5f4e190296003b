#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <string>
#include <vector>

#include "mcb/mcb.h"

namespace {

struct Failure {
  int code;
};

void check(mcb_status s) {
  if (s != MCB_OK) {
    std::cerr << "mcb: " << mcb_last_error() << '\n';
    throw Failure{static_cast<int>(s)};
  }
}

std::string take(char* s) {
  std::string out = s ? s : "";
  mcb_string_free(s);
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    std::cerr << "mcb: cannot open " << path << '\n';
    throw Failure{MCB_ERR_IO};
  }
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void emit(const std::string& text, const std::string& path) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  const auto parent = std::filesystem::path(path).parent_path();
  std::error_code ec;
  if (!parent.empty()) std::filesystem::create_directories(parent, ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "mcb: cannot write " << path << '\n';
    throw Failure{MCB_ERR_IO};
  }
  out << text;
}

using ExpPtr = std::unique_ptr<mcb_experiment, decltype(&mcb_experiment_free)>;
using ResPtr = std::unique_ptr<mcb_results, decltype(&mcb_results_free)>;

ExpPtr load_experiment(const std::string& path, const std::vector<std::string>& overrides) {
  std::vector<const char*> ptrs;
  for (const auto& o : overrides) ptrs.push_back(o.c_str());
  mcb_experiment* exp = nullptr;
  check(mcb_experiment_from_json(slurp(path).c_str(), ptrs.data(), ptrs.size(), &exp));
  return {exp, mcb_experiment_free};
}

void write_results(const mcb_experiment* exp, const mcb_results* res, const std::string& out) {
  std::string path = out;
  if (path.empty()) {
    char* p = nullptr;
    check(mcb_experiment_output_path(exp, &p));
    path = take(p);
  }
  char* csv = nullptr;
  check(mcb_results_to_csv(res, &csv));
  emit(take(csv), path);
  if (!path.empty() && path != "-") std::cerr << "wrote " << path << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust multi-user contextual bandits: experiments, estimators and lower-bound tools"};
  app.require_subcommand(1);
  app.set_version_flag("--version", mcb_version());

  std::string config, out, csv_path, kind = "auto", prefix, agent = "oracle";
  std::vector<std::string> overrides;
  int workers = 0;
  std::vector<int> users, dims{1, 20, 50}, ns{8, 16, 32, 64}, lb_users{20, 100};
  std::vector<double> alphas, bench_alphas{0.05, 0.1, 0.2}, lb_alphas{0.1, 0.2, 0.3};
  double alpha_hat = 0.1;
  int reps = 100;
  std::uint64_t seed = 1;
  std::size_t row = 0;

  auto* run = app.add_subcommand("run", "Run an experiment config and write the results CSV");
  run->add_option("config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  run->add_option("--set", overrides, "Override a config value, e.g. population.alpha=0.3");
  run->add_option("--workers", workers, "Worker threads (default: MCB_WORKERS or all cores)");
  run->add_option("-o,--out", out, "Output CSV (default: the config's output, '-' for stdout)");

  auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep");
  sweep->add_option("config", config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  sweep->add_option("--set", overrides, "Override a config value");
  sweep->add_option("--users", users, "Sweep L over these values (effective corruption)")->delimiter(',');
  sweep->add_option("--alphas", alphas, "Sweep the true alpha with a fixed alpha_hat")->delimiter(',');
  sweep->add_option("--alpha-hat", alpha_hat, "alpha_hat used with --alphas");
  sweep->add_option("--workers", workers, "Worker threads");
  sweep->add_option("-o,--out", out, "Output CSV");

  auto* lower = app.add_subcommand("lower-bound", "Exact TV certificate of the E^(n) mixture over a grid");
  lower->add_option("--alphas", lb_alphas, "Corruption rates")->delimiter(',');
  lower->add_option("--users", lb_users, "User counts L")->delimiter(',');
  lower->add_option("--n", ns, "Tape lengths n (eps is set so that n is the regime's largest)")->delimiter(',');
  lower->add_option("-o,--out", out, "Output CSV (default stdout)");

  auto* lecam = app.add_subcommand("lecam", "Play the A-vs-B guessing game");
  double g_alpha = 0.15, g_eps = 0.01;
  int g_users = 50, g_S = 2, g_A = 2, g_n = 8, pairs = 400;
  std::int64_t budget = 800, cap = 8;
  lecam->add_option("--agent", agent, "coin_flip | uniform_random | explore_greedy | oracle");
  lecam->add_option("--alpha", g_alpha);
  lecam->add_option("--eps", g_eps);
  lecam->add_option("--users", g_users);
  lecam->add_option("--contexts", g_S);
  lecam->add_option("--actions", g_A);
  lecam->add_option("--n", g_n);
  lecam->add_option("--budget", budget, "Per-user interaction budget");
  lecam->add_option("--cap", cap, "a*-plays after which a user leaves (<= 0: no cap)");
  lecam->add_option("--pairs", pairs);
  lecam->add_option("--seed", seed);

  auto* bench = app.add_subcommand("estimators-bench", "Robust estimators under shift and inlier corruption");
  bench->add_option("--alphas", bench_alphas, "Corruption rates")->delimiter(',');
  bench->add_option("--dims", dims, "Dimensions")->delimiter(',');
  bench->add_option("--reps", reps, "Replications per cell");
  bench->add_option("--seed", seed, "Master seed");
  bench->add_option("-o,--out", out, "Output CSV (default stdout)");

  auto* replay = app.add_subcommand("replay", "Re-run one row of a results CSV from its own columns");
  replay->add_option("csv", csv_path, "Results CSV")->required()->check(CLI::ExistingFile);
  replay->add_option("row", row, "Zero-based data row")->required();

  auto* plot = app.add_subcommand("plot", "Aggregate a results CSV and render an SVG line chart");
  plot->add_option("csv", csv_path, "Results CSV")->required()->check(CLI::ExistingFile);
  plot->add_option("--kind", kind, "fig2a | fig2b | fig2c | fig2d | fig3a | fig3b | fig3c | auto");
  plot->add_option("--prefix", prefix, "Output prefix (default: CSV path without extension)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run || *sweep) {
      ExpPtr exp = load_experiment(config, overrides);
      mcb_results* res = nullptr;
      if (*sweep && !users.empty()) {
        check(mcb_experiment_sweep_users(exp.get(), users.data(), users.size(), workers, &res));
      } else if (*sweep && !alphas.empty()) {
        check(mcb_experiment_sweep_misspec(exp.get(), alpha_hat, alphas.data(), alphas.size(), workers, &res));
      } else {
        if (*sweep) {
          int has = 0;
          check(mcb_experiment_has_sweep(exp.get(), &has));
          if (!has) {
            std::cerr << "mcb: config has no sweep; pass --users or --alphas\n";
            return MCB_ERR_INVALID_ARGUMENT;
          }
        }
        check(mcb_experiment_run(exp.get(), workers, &res));
      }
      ResPtr owned(res, mcb_results_free);
      write_results(exp.get(), res, out);
    } else if (*lower) {
      char* csv = nullptr;
      check(mcb_lower_bound_csv(lb_alphas.data(), lb_alphas.size(), lb_users.data(), lb_users.size(), ns.data(),
                                ns.size(), &csv));
      emit(take(csv), out);
    } else if (*lecam) {
      double acc = 0.0, events = 0.0;
      check(mcb_distinguish(g_alpha, g_eps, g_users, g_S, g_A, g_n, budget, cap, pairs, seed, agent.c_str(), &acc,
                            &events));
      std::printf("agent=%s accuracy=%.4f event_rate=%.4f trials=%d\n", agent.c_str(), acc, events, 2 * pairs);
    } else if (*bench) {
      char* csv = nullptr;
      check(mcb_estimators_bench(bench_alphas.data(), bench_alphas.size(), dims.data(), dims.size(), reps, seed, &csv));
      emit(take(csv), out);
    } else if (*replay) {
      mcb_results* res = nullptr;
      check(mcb_results_read_csv(csv_path.c_str(), &res));
      ResPtr owned(res, mcb_results_free);
      char* line = nullptr;
      int identical = 0;
      check(mcb_results_replay(res, row, &line, &identical));
      std::cout << take(line);
      std::cerr << (identical ? "replay matches the recorded row\n" : "replay DIFFERS from the recorded row\n");
      return identical ? 0 : 3;
    } else if (*plot) {
      mcb_results* res = nullptr;
      check(mcb_results_read_csv(csv_path.c_str(), &res));
      ResPtr owned(res, mcb_results_free);
      if (prefix.empty()) {
        prefix = csv_path;
        if (prefix.size() > 4 && prefix.substr(prefix.size() - 4) == ".csv") prefix.resize(prefix.size() - 4);
      }
      check(mcb_results_plot(res, kind.c_str(), prefix.c_str()));
      std::cerr << "wrote " << prefix << ".summary.csv and " << prefix << ".svg\n";
    }
  } catch (const Failure& f) {
    return f.code;
  }
  return 0;
}
