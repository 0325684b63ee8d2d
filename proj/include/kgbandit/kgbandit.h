#ifndef KGBANDIT_KGBANDIT_H
#define KGBANDIT_KGBANDIT_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#if defined(KGBANDIT_BUILDING)
#define KGB_API __declspec(dllexport)
#else
#define KGB_API __declspec(dllimport)
#endif
#else
#define KGB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Every fallible call returns a status; on failure kgb_last_error() holds a
 * message for the calling thread until its next failing call. */
typedef enum kgb_status {
  KGB_OK = 0,
  KGB_ERR_CONFIG = 1,
  KGB_ERR_NUMERIC = 2,
  KGB_ERR_IO = 3,
  KGB_ERR_DOMAIN = 4,
  KGB_ERR_MONOTONICITY = 5,
  KGB_ERR_INTERNAL = 6,
  KGB_ERR_NULL_ARGUMENT = 7
} kgb_status;

typedef enum kgb_family { KGB_BERNOULLI = 0, KGB_EXPONENTIAL = 1, KGB_GAUSSIAN = 2 } kgb_family;

typedef enum kgb_index_kind {
  KGB_INDEX_GITTINS = 0,
  KGB_INDEX_KGI = 1,
  KGB_INDEX_GAUSSIAN_BONUS = 2,
  KGB_INDEX_EXPONENTIAL_FACTOR = 3
} kgb_index_kind;

typedef enum kgb_precompute_outcome { KGB_TABLE_WRITTEN = 0, KGB_TABLE_VERIFIED = 1, KGB_TABLE_REPLACED = 2 } kgb_precompute_outcome;

/* Horizon argument meaning an infinite discounted horizon. */
#define KGB_HORIZON_INFINITE (-1)

KGB_API const char* kgb_version(void);
KGB_API const char* kgb_last_error(void);
KGB_API const char* kgb_status_name(kgb_status status);
/* Process exit code for a status: 0 success, 1 config, 2 numeric, 3 I/O. */
KGB_API int kgb_exit_code(kgb_status status);

/* Strings handed out through char** parameters are released here. */
KGB_API void kgb_string_free(char* s);

/* ---- indices and single decisions ----
 * An arm belief is (sum, n): Beta(sum, n - sum) for Bernoulli, Gamma(n + 1,
 * rate sum) on the rate for Exponential, Normal(sum / n, 1 / n) for Gaussian
 * with observation precision tau. `remaining` is the number of pulls left or
 * KGB_HORIZON_INFINITE. */
KGB_API kgb_status kgb_gittins_index(kgb_family family, double tau, double sum, double n, double gamma,
                                     int64_t remaining, double* out);
KGB_API kgb_status kgb_kgi_index(kgb_family family, double tau, double sum, double n, double gamma,
                                 int64_t remaining, double* out);
/* KG scores of k arms at time `epoch` of horizon `horizon`. */
KGB_API kgb_status kgb_kg_scores(kgb_family family, double tau, const double* sums, const double* ns, size_t k,
                                 double gamma, int64_t horizon, int64_t epoch, double* scores);
/* Arm chosen by a named policy (greedy, kg, nkg, pkg, thompson, kgi, gi, gibl,
 * gicg, gibl-fh, ikg). `seed` drives Thompson sampling only. */
KGB_API kgb_status kgb_decide(const char* policy, kgb_family family, double tau, const double* sums,
                              const double* ns, size_t k, double gamma, int64_t horizon, int64_t epoch,
                              uint64_t seed, size_t* chosen);

/* ---- experiments ---- */
typedef struct kgb_experiment kgb_experiment;
typedef void (*kgb_progress_fn)(size_t done, size_t total, void* user);

KGB_API size_t kgb_registry_size(void);
/* Name of registry entry i, or NULL past the end. */
KGB_API const char* kgb_registry_name(size_t i);
KGB_API kgb_status kgb_experiment_from_registry(const char* name, int desk_scale, kgb_experiment** out);
KGB_API kgb_status kgb_experiment_from_config(const char* path, kgb_experiment** out);
KGB_API kgb_status kgb_experiment_from_config_text(const char* text, kgb_experiment** out);
KGB_API void kgb_experiment_free(kgb_experiment* e);
KGB_API kgb_status kgb_experiment_set_seed(kgb_experiment* e, uint64_t seed);
KGB_API kgb_status kgb_experiment_set_runs(kgb_experiment* e, size_t n_runs);
/* Multi-line summary of the grid, policies and scale. */
KGB_API kgb_status kgb_experiment_describe(const kgb_experiment* e, char** text);
/* Runs the grid and returns the CSV text. The output does not depend on
 * `threads`; wall times are zero unless `record_wall_time`. */
KGB_API kgb_status kgb_experiment_run(const kgb_experiment* e, unsigned threads, int record_wall_time,
                                      kgb_progress_fn progress, void* user, char** csv);
/* Atomic write; an existing file is replaced only when `force`. */
KGB_API kgb_status kgb_write_file(const char* path, const char* text, int force);

/* ---- exact evaluation (Bernoulli, two arms) ----
 * `policies` is a comma list; values[i] receives the Bayes return of policy i.
 * depth <= 0 selects the truncation depth for eps = 1e-7. */
KGB_API kgb_status kgb_exact_bernoulli_k2(double gamma, double sum1, double n1, double sum2, double n2,
                                          int64_t depth, const char* policies, unsigned threads, double* optimal,
                                          double* values, size_t n_values);

/* ---- index tables ----
 * Bernoulli kinds use the lattice 1 <= sum < n <= n_max; the other kinds use
 * n_values. */
KGB_API kgb_status kgb_precompute(kgb_index_kind kind, kgb_family family, double tau, double gamma, int64_t horizon,
                                  int64_t n_max, const double* n_values, size_t n_count, const char* path, int force,
                                  kgb_precompute_outcome* outcome, size_t* rows);

/* ---- analyses ---- */
typedef struct kgb_report kgb_report;

KGB_API kgb_status kgb_analyze_witness(kgb_family family, double tau, double gamma, kgb_report** out);
KGB_API kgb_status kgb_analyze_rlb(const char* policies, double gamma, double tau, double n1, const double* n2_values,
                                   size_t count, kgb_report** out);
KGB_API kgb_status kgb_analyze_consistency(const char* policy, double gamma, double tau, double resolution,
                                           kgb_report** out);
KGB_API kgb_status kgb_analyze_over_exploration(const char* policy, double gamma, double tau, const double* n_grid,
                                                size_t count, kgb_report** out);
KGB_API kgb_status kgb_analyze_closed_form(const double* gammas, size_t count, int64_t n_max, kgb_report** out);
/* Re-evaluates every decision stored in a witness file's text. */
KGB_API kgb_status kgb_replay_witness(const char* text, int* reproduced);

KGB_API const char* kgb_report_text(const kgb_report* r);
KGB_API const char* kgb_report_csv(const kgb_report* r);
/* Replayable witness text, or "" when the analysis has none. */
KGB_API const char* kgb_report_artifact(const kgb_report* r);
KGB_API void kgb_report_free(kgb_report* r);

#ifdef __cplusplus
}
#endif

#endif
