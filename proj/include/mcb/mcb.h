/* C interface to the mcb library. Every call returns an mcb_status; on failure
 * mcb_last_error() describes the problem (thread-local, valid until the next call).
 * Strings returned through char** are owned by the caller: release with mcb_string_free. */
#ifndef MCB_MCB_H
#define MCB_MCB_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(MCB_BUILDING_LIBRARY)
#define MCB_API __attribute__((visibility("default")))
#else
#define MCB_API
#endif

typedef enum mcb_status {
  MCB_OK = 0,
  MCB_ERR_INVALID_ARGUMENT = 1,
  MCB_ERR_DIMENSION_MISMATCH = 2,
  MCB_ERR_OVER_TRIMMED = 3,
  MCB_ERR_FILTER_COLLAPSE = 4,
  MCB_ERR_NEGATIVE_DENSITY = 5,
  MCB_ERR_EMPTY_GROUP = 6,
  MCB_ERR_PARSE = 7,
  MCB_ERR_IO = 8,
  MCB_ERR_UNKNOWN_KIND = 9,
  MCB_ERR_INTERNAL = 100
} mcb_status;

typedef struct mcb_instance mcb_instance;
typedef struct mcb_experiment mcb_experiment;
typedef struct mcb_results mcb_results;

MCB_API const char* mcb_version(void);
MCB_API const char* mcb_last_error(void);
MCB_API void mcb_string_free(char* s);
/* MCB_WORKERS if set, else the hardware thread count. */
MCB_API int mcb_default_workers(void);

/* ---- bandit instances ---- */
/* nu_spec: "uniform", "powerlaw:<gamma>" or "explicit:<w1>;<w2>;..." */
MCB_API mcb_status mcb_instance_make(int num_contexts, int num_actions, double gap, const char* nu_spec,
                                     uint64_t seed, mcb_instance** out);
MCB_API mcb_status mcb_instance_from_json(const char* json, mcb_instance** out);
MCB_API mcb_status mcb_instance_to_json(const mcb_instance* inst, char** out);
MCB_API mcb_status mcb_instance_dims(const mcb_instance* inst, int* num_contexts, int* num_actions);
/* actions: S entries, lowest-index argmax per context. */
MCB_API mcb_status mcb_instance_optimal(const mcb_instance* inst, int* actions, double* value);
MCB_API mcb_status mcb_instance_value(const mcb_instance* inst, const int* actions, double* value);
MCB_API mcb_status mcb_instance_constant_k(const mcb_instance* inst, int a_cut, double* out);
MCB_API void mcb_instance_free(mcb_instance* inst);

/* ---- robust estimators ---- */
MCB_API mcb_status mcb_trimmed_mean(const double* samples, size_t n, double alpha, double c_trim, double* out);
MCB_API mcb_status mcb_median_of_means(const double* samples, size_t n, int num_blocks, double* out);
/* points: n x d, row-major. out: d entries. removed_fraction may be NULL. */
MCB_API mcb_status mcb_robust_mean_highdim(const double* points, size_t n, size_t d, double alpha, double sigma_sq,
                                           double* out, double* removed_fraction);
/* CSV of the estimator bench (see README). */
MCB_API mcb_status mcb_estimators_bench(const double* alphas, size_t num_alphas, const int* dims, size_t num_dims,
                                        int reps, uint64_t seed, char** csv);

/* ---- lower-bound construction ---- */
MCB_API mcb_status mcb_tv_mixture(int n, double alpha, double eps, int num_users, double* tv, double* z);
/* CSV with columns n,alpha,eps,L,Z,tv,bound_1_over_L4,pass. */
MCB_API mcb_status mcb_lower_bound_csv(const double* alphas, size_t num_alphas, const int* users, size_t num_users,
                                       const int* ns, size_t num_ns, char** csv);
/* agent: coin_flip | uniform_random | explore_greedy | oracle. astar_cap <= 0 removes the play cap. */
MCB_API mcb_status mcb_distinguish(double alpha, double eps, int num_users, int num_contexts, int num_actions, int n,
                                   int64_t per_user_budget, int64_t astar_cap, int pairs, uint64_t seed,
                                   const char* agent, double* accuracy, double* event_rate);

/* ---- experiments ---- */
/* overrides: "dotted.path=value" strings applied to the JSON before parsing (may be NULL). */
MCB_API mcb_status mcb_experiment_from_json(const char* json, const char* const* overrides, size_t num_overrides,
                                            mcb_experiment** out);
MCB_API mcb_status mcb_experiment_to_json(const mcb_experiment* exp, char** out);
MCB_API mcb_status mcb_experiment_output_path(const mcb_experiment* exp, char** out);
MCB_API mcb_status mcb_experiment_has_sweep(const mcb_experiment* exp, int* out);
MCB_API mcb_status mcb_experiment_run(const mcb_experiment* exp, int workers, mcb_results** out);
MCB_API mcb_status mcb_experiment_sweep_users(const mcb_experiment* exp, const int* users, size_t count, int workers,
                                              mcb_results** out);
MCB_API mcb_status mcb_experiment_sweep_misspec(const mcb_experiment* exp, double alpha_hat, const double* alphas,
                                                size_t count, int workers, mcb_results** out);
MCB_API void mcb_experiment_free(mcb_experiment* exp);

MCB_API mcb_status mcb_results_read_csv(const char* path, mcb_results** out);
MCB_API mcb_status mcb_results_write_csv(const mcb_results* res, const char* path);
MCB_API mcb_status mcb_results_to_csv(const mcb_results* res, char** out);
MCB_API mcb_status mcb_results_count(const mcb_results* res, size_t* count);
MCB_API mcb_status mcb_results_summary_csv(const mcb_results* res, char** out);
/* Re-runs one row; *row_csv receives the recomputed row (with header), *identical
 * is 1 when every outcome column matches the recorded one. */
MCB_API mcb_status mcb_results_replay(const mcb_results* res, size_t row, char** row_csv, int* identical);
/* Writes <prefix>.summary.csv and <prefix>.svg. */
MCB_API mcb_status mcb_results_plot(const mcb_results* res, const char* kind, const char* prefix);
MCB_API void mcb_results_free(mcb_results* res);

#ifdef __cplusplus
}
#endif

#endif /* MCB_MCB_H */
