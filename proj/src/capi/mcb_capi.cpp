#include "mcb/mcb.h"

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <sstream>

#include "mcb/core.hpp"
#include "mcb/error.hpp"
#include "mcb/estimators.hpp"
#include "mcb/harness.hpp"
#include "mcb/lowerbound.hpp"
#include "../harness/format.hpp"

struct mcb_instance {
  mcb::BanditInstance value;
};
struct mcb_experiment {
  mcb::ExperimentConfig config;
};
struct mcb_results {
  mcb::SweepResult value;
};

namespace {

thread_local std::string g_last_error;

template <typename F>
mcb_status guarded(F&& f) {
  g_last_error.clear();
  try {
    f();
    return MCB_OK;
  } catch (const mcb::Error& e) {
    g_last_error = e.what();
    return static_cast<mcb_status>(static_cast<int>(e.code()));
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
  } catch (const std::exception& e) {
    g_last_error = e.what();
  } catch (...) {
    g_last_error = "unknown failure";
  }
  return MCB_ERR_INTERNAL;
}

void need(const void* p, const char* what) {
  if (p == nullptr) mcb::fail(mcb::ErrorCode::kInvalidArgument, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

template <typename T>
std::vector<T> vec(const T* p, std::size_t n) {
  if (n > 0) need(p, "array");
  return std::vector<T>(p, p + n);
}

bool same_outcome(const mcb::ResultRow& a, const mcb::ResultRow& b) {
  return a.status == b.status && a.message == b.message && a.optimal_value == b.optimal_value &&
         a.value == b.value && a.suboptimality == b.suboptimality && a.diagnostics == b.diagnostics &&
         a.k_constant == b.k_constant;
}

}  // namespace

extern "C" {

const char* mcb_version(void) { return "1.0.0"; }
const char* mcb_last_error(void) { return g_last_error.c_str(); }
void mcb_string_free(char* s) { std::free(s); }
int mcb_default_workers(void) { return mcb::default_workers(); }

mcb_status mcb_instance_make(int num_contexts, int num_actions, double gap, const char* nu_spec, uint64_t seed,
                             mcb_instance** out) {
  return guarded([&] {
    need(out, "out");
    const mcb::NuSpec spec = nu_spec ? mcb::NuSpec::parse(nu_spec) : mcb::NuSpec::uniform();
    *out = new mcb_instance{mcb::make_instance(num_contexts, num_actions, gap, spec, seed)};
  });
}

mcb_status mcb_instance_from_json(const char* json, mcb_instance** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    *out = new mcb_instance{mcb::instance_from_json(json)};
  });
}

mcb_status mcb_instance_to_json(const mcb_instance* inst, char** out) {
  return guarded([&] {
    need(inst, "instance");
    need(out, "out");
    *out = dup(mcb::to_json(inst->value));
  });
}

mcb_status mcb_instance_dims(const mcb_instance* inst, int* num_contexts, int* num_actions) {
  return guarded([&] {
    need(inst, "instance");
    if (num_contexts) *num_contexts = inst->value.num_contexts();
    if (num_actions) *num_actions = inst->value.num_actions();
  });
}

mcb_status mcb_instance_optimal(const mcb_instance* inst, int* actions, double* value) {
  return guarded([&] {
    need(inst, "instance");
    const mcb::Policy pi = mcb::optimal_policy(inst->value);
    if (actions) std::copy(pi.actions().begin(), pi.actions().end(), actions);
    if (value) *value = mcb::value(inst->value, pi);
  });
}

mcb_status mcb_instance_value(const mcb_instance* inst, const int* actions, double* value) {
  return guarded([&] {
    need(inst, "instance");
    need(actions, "actions");
    need(value, "value");
    const auto S = static_cast<std::size_t>(inst->value.num_contexts());
    *value = mcb::value(inst->value,
                        mcb::Policy::deterministic(std::vector<int>(actions, actions + S), inst->value.num_actions()));
  });
}

mcb_status mcb_instance_constant_k(const mcb_instance* inst, int a_cut, double* out) {
  return guarded([&] {
    need(inst, "instance");
    need(out, "out");
    *out = mcb::instance_constant_K(inst->value, a_cut);
  });
}

void mcb_instance_free(mcb_instance* inst) { delete inst; }

mcb_status mcb_trimmed_mean(const double* samples, size_t n, double alpha, double c_trim, double* out) {
  return guarded([&] {
    need(out, "out");
    const auto x = vec(samples, n);
    *out = mcb::trimmed_mean(x, alpha, mcb::TrimOptions{c_trim}).scalar();
  });
}

mcb_status mcb_median_of_means(const double* samples, size_t n, int num_blocks, double* out) {
  return guarded([&] {
    need(out, "out");
    const auto x = vec(samples, n);
    *out = mcb::median_of_means(x, num_blocks);
  });
}

mcb_status mcb_robust_mean_highdim(const double* points, size_t n, size_t d, double alpha, double sigma_sq,
                                   double* out, double* removed_fraction) {
  return guarded([&] {
    need(points, "points");
    need(out, "out");
    const Eigen::MatrixXd X = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        points, static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d));
    const mcb::RobustEstimate est = mcb::robust_mean_highdim(X, alpha, sigma_sq);
    std::copy(est.estimate.data(), est.estimate.data() + d, out);
    if (removed_fraction) *removed_fraction = est.removed_fraction;
  });
}

mcb_status mcb_estimators_bench(const double* alphas, size_t num_alphas, const int* dims, size_t num_dims, int reps,
                                uint64_t seed, char** csv) {
  return guarded([&] {
    need(csv, "csv");
    mcb::BenchParams p;
    if (num_alphas) p.alphas = vec(alphas, num_alphas);
    if (num_dims) p.dims = vec(dims, num_dims);
    p.reps = reps;
    p.seed = seed;
    std::ostringstream os;
    mcb::write_bench_csv(os, mcb::estimators_bench(p));
    *csv = dup(os.str());
  });
}

mcb_status mcb_tv_mixture(int n, double alpha, double eps, int num_users, double* tv, double* z) {
  return guarded([&] {
    const mcb::WeightLawE law = mcb::build_E_n(n, alpha, eps, num_users);
    if (tv) *tv = mcb::tv_mixture(law);
    if (z) *z = law.z;
  });
}

mcb_status mcb_lower_bound_csv(const double* alphas, size_t num_alphas, const int* users, size_t num_users,
                               const int* ns, size_t num_ns, char** csv) {
  return guarded([&] {
    need(csv, "csv");
    const auto rows = mcb::lower_bound_grid(vec(alphas, num_alphas), vec(users, num_users), vec(ns, num_ns));
    using mcb::detail::fmt;
    std::ostringstream os;
    os << "n,alpha,eps,L,Z,tv,bound_1_over_L4,pass\n";
    for (const auto& r : rows) {
      os << r.n << ',' << fmt(r.alpha) << ',' << fmt(r.eps) << ',' << r.num_users << ',' << fmt(r.z) << ','
         << fmt(r.tv) << ',' << fmt(r.bound) << ',' << (r.error.empty() ? (r.pass ? "true" : "false") : "error") << '\n';
    }
    *csv = dup(os.str());
  });
}

mcb_status mcb_distinguish(double alpha, double eps, int num_users, int num_contexts, int num_actions, int n,
                           int64_t per_user_budget, int64_t astar_cap, int pairs, uint64_t seed, const char* agent,
                           double* accuracy, double* event_rate) {
  return guarded([&] {
    need(agent, "agent");
    mcb::GameParams p;
    p.alpha = alpha;
    p.eps = eps;
    p.num_users = num_users;
    p.num_contexts = num_contexts;
    p.num_actions = num_actions;
    p.n = n;
    p.per_user_budget = per_user_budget;
    p.astar_cap = astar_cap;
    p.pairs = pairs;
    p.seed = seed;
    const mcb::GameResult r = mcb::distinguish_experiment(p, mcb::parse_distinguisher(agent));
    if (accuracy) *accuracy = r.accuracy;
    if (event_rate) *event_rate = r.event_rate;
  });
}

mcb_status mcb_experiment_from_json(const char* json, const char* const* overrides, size_t num_overrides,
                                    mcb_experiment** out) {
  return guarded([&] {
    need(json, "json");
    need(out, "out");
    std::vector<std::string> assigns;
    for (size_t k = 0; k < num_overrides; ++k) {
      need(overrides, "overrides");
      need(overrides[k], "override");
      assigns.emplace_back(overrides[k]);
    }
    const std::string text = assigns.empty() ? std::string(json) : mcb::apply_overrides(json, assigns);
    *out = new mcb_experiment{mcb::ExperimentConfig::from_json(text)};
  });
}

mcb_status mcb_experiment_to_json(const mcb_experiment* exp, char** out) {
  return guarded([&] {
    need(exp, "experiment");
    need(out, "out");
    *out = dup(exp->config.to_json());
  });
}

mcb_status mcb_experiment_output_path(const mcb_experiment* exp, char** out) {
  return guarded([&] {
    need(exp, "experiment");
    need(out, "out");
    *out = dup(exp->config.output);
  });
}

mcb_status mcb_experiment_has_sweep(const mcb_experiment* exp, int* out) {
  return guarded([&] {
    need(exp, "experiment");
    need(out, "out");
    *out = exp->config.sweep.has_value() ? 1 : 0;
  });
}

mcb_status mcb_experiment_run(const mcb_experiment* exp, int workers, mcb_results** out) {
  return guarded([&] {
    need(exp, "experiment");
    need(out, "out");
    *out = new mcb_results{mcb::run_experiment(exp->config, workers > 0 ? workers : mcb::default_workers())};
  });
}

mcb_status mcb_experiment_sweep_users(const mcb_experiment* exp, const int* users, size_t count, int workers,
                                      mcb_results** out) {
  return guarded([&] {
    need(exp, "experiment");
    need(out, "out");
    *out = new mcb_results{mcb::sweep_effective_corruption(exp->config, vec(users, count),
                                                           workers > 0 ? workers : mcb::default_workers())};
  });
}

mcb_status mcb_experiment_sweep_misspec(const mcb_experiment* exp, double alpha_hat, const double* alphas,
                                        size_t count, int workers, mcb_results** out) {
  return guarded([&] {
    need(exp, "experiment");
    need(out, "out");
    *out = new mcb_results{mcb::sweep_alpha_misspec(exp->config, alpha_hat, vec(alphas, count),
                                                    workers > 0 ? workers : mcb::default_workers())};
  });
}

void mcb_experiment_free(mcb_experiment* exp) { delete exp; }

mcb_status mcb_results_read_csv(const char* path, mcb_results** out) {
  return guarded([&] {
    need(path, "path");
    need(out, "out");
    std::ifstream is(path, std::ios::binary);
    if (!is) mcb::fail(mcb::ErrorCode::kIo, std::string("cannot open ") + path);
    *out = new mcb_results{mcb::read_results_csv(is)};
  });
}

mcb_status mcb_results_write_csv(const mcb_results* res, const char* path) {
  return guarded([&] {
    need(res, "results");
    need(path, "path");
    std::ofstream os(path, std::ios::binary);
    if (!os) mcb::fail(mcb::ErrorCode::kIo, std::string("cannot write ") + path);
    mcb::write_results_csv(os, res->value);
  });
}

mcb_status mcb_results_to_csv(const mcb_results* res, char** out) {
  return guarded([&] {
    need(res, "results");
    need(out, "out");
    std::ostringstream os;
    mcb::write_results_csv(os, res->value);
    *out = dup(os.str());
  });
}

mcb_status mcb_results_count(const mcb_results* res, size_t* count) {
  return guarded([&] {
    need(res, "results");
    need(count, "count");
    *count = res->value.rows.size();
  });
}

mcb_status mcb_results_summary_csv(const mcb_results* res, char** out) {
  return guarded([&] {
    need(res, "results");
    need(out, "out");
    std::ostringstream os;
    mcb::write_summary_csv(os, mcb::aggregate(res->value));
    *out = dup(os.str());
  });
}

mcb_status mcb_results_replay(const mcb_results* res, size_t row, char** row_csv, int* identical) {
  return guarded([&] {
    need(res, "results");
    const mcb::ResultRow again = mcb::replay(res->value, row);
    if (identical) *identical = same_outcome(again, res->value.rows[row]) ? 1 : 0;
    if (row_csv) {
      std::ostringstream os;
      mcb::write_results_csv(os, mcb::SweepResult{{again}});
      *row_csv = dup(os.str());
    }
  });
}

mcb_status mcb_results_plot(const mcb_results* res, const char* kind, const char* prefix) {
  return guarded([&] {
    need(res, "results");
    need(kind, "kind");
    need(prefix, "prefix");
    mcb::emit_plots(res->value, kind, prefix);
  });
}

void mcb_results_free(mcb_results* res) { delete res; }

}  // extern "C"
