#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mcb/core.hpp"
#include "mcb/sim.hpp"

namespace mcb {

std::string noise_to_string(const NoiseLaw& noise);
NoiseLaw parse_noise(const std::string& text);

struct AlgorithmSpec {
  std::string name;
  std::optional<double> alpha_hat;  // unset: the population's true alpha
  double c_trim = 2.0;
  double t0_fraction = 0.1;                // robust_mcb: share of T spent estimating nu
  std::optional<double> corruption_budget;  // corruption_robust_ucb; unset: sqrt(T)

  // "alpha_hat=0.2;c_trim=2;t0_fraction=0.1" style, as stored in result rows.
  std::string params_string(double resolved_alpha_hat, std::int64_t horizon) const;
  static AlgorithmSpec from_params(const std::string& name, const std::string& params);
};

inline constexpr const char* kAlgorithmNames[] = {"robust_mcb",      "mab_baseline",   "highdim_baseline",
                                                  "naive_ucb",       "independent_ucb", "corruption_robust_ucb"};

struct Sweep {
  std::string param;  // S, A, L, alpha, alpha_hat, T_over_L, eps0, gap
  std::vector<double> values;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 1;
  int replications = 50;

  int num_contexts = 10;
  int num_actions = 10;
  double gap = 0.3;
  NuSpec nu;
  NoiseLaw noise;

  int num_users = 500;
  // "fixed", or "sa_log_sa": L scaled by SA ln(SA) relative to l_ref_sa.
  std::string l_rule = "fixed";
  int l_ref_sa = 100;
  double alpha = 0.2;
  AdversaryStrategy attack = AdversaryStrategy::boost(10.0, 0.0);
  double eps0 = 0.0;
  AdversaryCount count = AdversaryCount::kExact;
  ArrivalModel arrival;

  double t_over_l = 30.0;
  std::optional<std::int64_t> horizon;  // overrides t_over_l

  std::vector<AlgorithmSpec> algorithms;
  std::optional<Sweep> sweep;
  std::string output;
  bool record_wall_time = false;

  static ExperimentConfig from_json(const std::string& text);
  std::string to_json() const;
  void validate() const;
};

/// Applies "dotted.path=value" overrides to a JSON config text; the value is parsed
/// as JSON when possible and kept as a string otherwise.
std::string apply_overrides(const std::string& json_text, const std::vector<std::string>& assignments);

struct ResultRow {
  std::string experiment;
  std::string param = "none";
  double x = 0.0;
  std::string algorithm;
  std::string algo_params;
  int rep = 0;
  std::uint64_t seed = 0;
  int num_contexts = 0;
  int num_actions = 0;
  int num_users = 0;
  double gap = 0.0;
  std::string nu;
  std::string noise;
  double alpha = 0.0;
  double alpha_hat = 0.0;
  double alpha_eff = 0.0;
  std::string attack;
  double eps0 = 0.0;
  std::string count;
  std::string arrival;
  std::int64_t t0 = 0;
  std::int64_t horizon = 0;
  double k_constant = 0.0;
  double optimal_value = 0.0;
  double value = 0.0;
  double suboptimality = 0.0;
  std::string status = "ok";
  std::string message;
  std::string diagnostics;
  std::optional<double> wall_time;
};

struct SweepResult {
  std::vector<ResultRow> rows;
};

/// Number of worker threads: MCB_WORKERS if set, else hardware concurrency.
int default_workers();

/// Every grid point x algorithm x replication, in that canonical order.
SweepResult run_experiment(const ExperimentConfig& config, int workers = default_workers());

/// Sweeps L at fixed S, A, T/L and alpha; rows carry alpha' = max(SA/L, alpha).
SweepResult sweep_effective_corruption(ExperimentConfig config, const std::vector<int>& users,
                                       int workers = default_workers());

/// Fixes every algorithm's alpha_hat and sweeps the true alpha.
SweepResult sweep_alpha_misspec(ExperimentConfig config, double alpha_hat, const std::vector<double>& alphas,
                                int workers = default_workers());

/// Executes the row described by the spec columns of `row` and fills in its outcome columns.
ResultRow execute_row(ResultRow row, bool record_wall_time = false);

/// Re-runs row `index` from its own columns.
ResultRow replay(const SweepResult& result, std::size_t index);

inline constexpr const char* kResultsVersion = "# mcb-results v1";
inline constexpr const char* kSummaryVersion = "# mcb-summary v1";

void write_results_csv(std::ostream& os, const SweepResult& result);
SweepResult read_results_csv(std::istream& is);

struct SummaryRow {
  std::string experiment;
  std::string param;
  double x = 0.0;
  std::string algorithm;
  int n = 0;
  int errors = 0;
  double mean = 0.0;
  double stderr_mean = 0.0;
};

/// Mean and standard error of suboptimality per (experiment, param, x, algorithm), over ok rows.
std::vector<SummaryRow> aggregate(const SweepResult& result);
void write_summary_csv(std::ostream& os, const std::vector<SummaryRow>& rows);
std::vector<SummaryRow> read_summary_csv(std::istream& is);

inline constexpr const char* kPlotKinds[] = {"fig2a", "fig2b", "fig2c", "fig2d", "fig3a", "fig3b", "fig3c", "auto"};

/// SVG line chart (mean +/- one standard error) from summary rows only.
std::string render_svg(const std::vector<SummaryRow>& summary, const std::string& kind);

struct PlotFiles {
  std::string summary_csv;
  std::string svg;
};

/// Writes <prefix>.summary.csv, then renders <prefix>.svg from that file's contents.
PlotFiles emit_plots(const SweepResult& result, const std::string& kind, const std::string& prefix);

// ---------------------------------------------------------------------------
// Estimator bench

struct BenchParams {
  std::vector<double> alphas{0.05, 0.1, 0.2};
  std::vector<int> dims{1, 20, 50};
  int reps = 100;
  std::uint64_t seed = 1;
  double shift = 10.0;  // corrupted points sit at mu + shift * 1
  double n_factor = 20.0;
  std::vector<std::string> attacks{"shift", "inlier"};
};

struct BenchRow {
  std::string estimator;  // trimmed_mean | robust_mean_highdim | plain_mean
  std::string attack;     // shift | inlier
  double alpha = 0.0;
  int dim = 0;
  int num_points = 0;
  int reps = 0;
  int within = 0;  // reps with error <= bound
  double mean_error = 0.0;
  double bound = 0.0;  // 3 sigma sqrt(alpha), sigma = 1
};

/// N = n_factor * d * max(1, ceil(ln d)) / alpha standard-normal points around a
/// random centre, floor(alpha N) of them replaced by the attack.
std::vector<BenchRow> estimators_bench(const BenchParams& params);
void write_bench_csv(std::ostream& os, const std::vector<BenchRow>& rows);

}  // namespace mcb
