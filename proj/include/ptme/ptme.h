#ifndef PTME_PTME_H
#define PTME_PTME_H

/*
 * C interface to the parametric-task MAP-Elites library.
 *
 * Every object is an opaque handle created by a ptme_*_create/_load/_run
 * call and released with the matching ptme_*_destroy. Functions that can
 * fail return a ptme_status; on failure ptme_last_error() describes the
 * problem for the calling thread until its next failing call.
 *
 * Handles are not synchronized: a handle may be read from several threads
 * at once but must not be destroyed while in use.
 */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(PTME_BUILDING_LIBRARY)
#    define PTME_API __declspec(dllexport)
#  else
#    define PTME_API __declspec(dllimport)
#  endif
#else
#  define PTME_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum ptme_status {
    PTME_OK = 0,
    PTME_ERR_INVALID_ARGUMENT = 1,
    PTME_ERR_IO = 2,
    PTME_ERR_PARSE = 3,
    PTME_ERR_DEGENERATE_GEOMETRY = 4,
    PTME_ERR_INSUFFICIENT_DATA = 5,
    PTME_ERR_NUMERICAL = 6,
    PTME_ERR_INTERNAL = 7
} ptme_status;

PTME_API const char* ptme_last_error(void);
PTME_API const char* ptme_status_string(ptme_status status);

/* ---- problems ---------------------------------------------------------- */

typedef struct ptme_problem ptme_problem;

/* spec: "arm10", "archery", "linear_toy(seed)" or "linear_toy(seed,dx,dtheta)" */
PTME_API ptme_status ptme_problem_create(const char* spec, ptme_problem** out);
PTME_API void ptme_problem_destroy(ptme_problem* problem);
PTME_API const char* ptme_problem_name(const ptme_problem* problem);
PTME_API size_t ptme_problem_solution_dim(const ptme_problem* problem);
PTME_API size_t ptme_problem_task_dim(const ptme_problem* problem);
PTME_API ptme_status ptme_problem_evaluate(const ptme_problem* problem, const double* x, size_t x_len,
                                           const double* theta, size_t theta_len, double* fitness);

/* ---- tessellations ------------------------------------------------------- */

typedef struct ptme_tessellation ptme_tessellation;

PTME_API ptme_status ptme_tessellation_create(uint64_t cells, size_t dim, uint64_t seed, int with_adjacency,
                                              ptme_tessellation** out);
PTME_API ptme_status ptme_tessellation_load(const char* path, ptme_tessellation** out);
PTME_API ptme_status ptme_tessellation_save(const ptme_tessellation* tess, const char* path);
PTME_API void ptme_tessellation_destroy(ptme_tessellation* tess);
PTME_API size_t ptme_tessellation_size(const ptme_tessellation* tess);
PTME_API size_t ptme_tessellation_dim(const ptme_tessellation* tess);
/* Copies dim values of the centroid of `cell` into `out`. */
PTME_API ptme_status ptme_tessellation_centroid(const ptme_tessellation* tess, size_t cell, double* out);
PTME_API ptme_status ptme_tessellation_nearest(const ptme_tessellation* tess, const double* theta, size_t theta_len,
                                               size_t* cell);
/* Neighbour count of `cell`; with a non-null `out` of capacity `cap`, also
 * copies up to `cap` neighbour indices. */
PTME_API ptme_status ptme_tessellation_neighbors(const ptme_tessellation* tess, size_t cell, size_t* out, size_t cap,
                                                 size_t* count);

/* ---- runs ---------------------------------------------------------------- */

typedef enum ptme_mode {
    PTME_MODE_PARAMETRIC = 0,
    PTME_MODE_FIXED_TASKS = 1,
    PTME_MODE_RANDOM_SEARCH = 2
} ptme_mode;

#define PTME_MAX_TOURNAMENT_SIZES 16

typedef struct ptme_run_config {
    uint64_t budget;
    uint64_t cells;
    uint32_t tournament_sizes[PTME_MAX_TOURNAMENT_SIZES];
    size_t tournament_size_count;
    double sigma_sbx;
    double sigma_reg;
    double regression_fraction;
    int tournament_enabled;
    ptme_mode mode;
    uint64_t fixed_tasks;
    uint64_t seed;
} ptme_run_config;

/* Defaults: budget 100000, 200 cells, sizes {1,5,10,50,100,500}, sigma_sbx 10,
 * sigma_reg 1, regression 0.5, tournament on, parametric mode, seed 0. */
PTME_API void ptme_run_config_init(ptme_run_config* config);

/* Applies the switches of a named method: ptme, ptme_no_reg, ptme_full_reg,
 * ptme_no_tournament, ptme_no_reg_no_tournament, mtme, mtme(K), random. */
PTME_API ptme_status ptme_run_config_for_method(const char* method, ptme_run_config* config);
PTME_API ptme_status ptme_run_config_validate(const ptme_run_config* config);
/* Overwrites the fields present in a JSON object (same keys as the struct,
 * "mode" as "parametric", "fixed_tasks" or "random_search"). */
PTME_API ptme_status ptme_run_config_apply_json(const char* json, ptme_run_config* config);

typedef struct ptme_log ptme_log;

/* `method` is recorded in the run metadata and may be NULL. */
PTME_API ptme_status ptme_run(const ptme_problem* problem, const ptme_run_config* config, const char* method,
                              ptme_log** out);

/* ---- evaluation logs ----------------------------------------------------- */

PTME_API ptme_status ptme_log_load(const char* path, ptme_log** out);
/* Writes JSON Lines to `path` and, when `metadata_path` is non-null, the run
 * metadata as JSON. */
PTME_API ptme_status ptme_log_save(const ptme_log* log, const char* path, const char* metadata_path);
/* Loads a metadata sidecar into an existing log. */
PTME_API ptme_status ptme_log_load_metadata(ptme_log* log, const char* metadata_path);
PTME_API void ptme_log_destroy(ptme_log* log);
PTME_API size_t ptme_log_size(const ptme_log* log);
PTME_API size_t ptme_log_task_dim(const ptme_log* log);
PTME_API size_t ptme_log_solution_dim(const ptme_log* log);
/* Any of theta/x/fitness/op may be NULL. `op` receives a static tag string. */
PTME_API ptme_status ptme_log_get(const ptme_log* log, size_t index, double* theta, double* x, double* fitness,
                                  const char** op);
/* Metadata as a JSON string owned by the log, valid until the next call on it. */
PTME_API const char* ptme_log_metadata(const ptme_log* log);

/* ---- metrics ------------------------------------------------------------- */

/* Fills `out` (capacity `count`) with a deduplicated log-spaced schedule and
 * stores its length in `out_count`. */
PTME_API ptme_status ptme_schedule_logspace(uint64_t lo, uint64_t hi, size_t count, uint64_t* out, size_t* out_count);
/* "logspace:LO:HI:COUNT" or "a,b,c". Stores the length in `out_count` and
 * copies up to `cap` entries when `out` is non-null. */
PTME_API ptme_status ptme_schedule_parse(const char* text, uint64_t* out, size_t cap, size_t* out_count);
PTME_API ptme_status ptme_qd_scores(const ptme_log* log, const uint64_t* schedule, size_t count, uint64_t master_seed,
                                    double* out);
PTME_API ptme_status ptme_mr_qd_score(const ptme_log* log, const uint64_t* schedule, size_t count,
                                      uint64_t master_seed, double* out);
/* One-sided Mann-Whitney p-value for "a tends to exceed b". */
PTME_API ptme_status ptme_rank_sum_test(const double* a, size_t a_len, const double* b, size_t b_len,
                                        double* p_value);

/* ---- distillation ---------------------------------------------------------- */

typedef struct ptme_train_settings {
    double learning_rate;
    size_t batch_size;
    size_t max_epochs;
    size_t patience;
    double validation_fraction;
} ptme_train_settings;

/* Defaults: learning rate 1e-3, batch 64, 2000 epochs, patience 50, 10% validation. */
PTME_API void ptme_train_settings_init(ptme_train_settings* settings);

typedef struct ptme_policy ptme_policy;

/* Re-archives `log` at `resolution` cells and trains a policy on the elites.
 * `settings` may be NULL for defaults. */
PTME_API ptme_status ptme_policy_distill(const ptme_log* log, uint64_t resolution, uint64_t master_seed,
                                         const ptme_train_settings* settings, uint64_t train_seed, ptme_policy** out);
PTME_API ptme_status ptme_policy_load(const char* path, ptme_policy** out);
PTME_API ptme_status ptme_policy_save(const ptme_policy* policy, const char* path);
PTME_API void ptme_policy_destroy(ptme_policy* policy);
PTME_API size_t ptme_policy_input_dim(const ptme_policy* policy);
PTME_API size_t ptme_policy_output_dim(const ptme_policy* policy);
PTME_API ptme_status ptme_policy_infer(const ptme_policy* policy, const double* theta, size_t theta_len, double* x,
                                       size_t x_len);
/* Mean fitness of the policy over the centroids of a `probes`-cell CVT. */
PTME_API ptme_status ptme_inference_score(const ptme_policy* policy, const ptme_problem* problem, uint64_t probes,
                                          uint64_t probe_seed, double* score);

#ifdef __cplusplus
}
#endif

#endif /* PTME_PTME_H */
