/*
 * convergema: stop-decision toolkit for incrementally trained learners.
 *
 * Feed (level, size, accuracy) observations, fit anchored power-law trends
 * and ask whether training has come within a chosen distance of its final
 * accuracy.
 *
 * Conventions:
 *   - Every function that can fail returns cvg_status. On failure a message
 *     is available from cvg_last_error() on the same thread.
 *   - Handles are opaque. Each *_create has a matching *_destroy that
 *     accepts NULL.
 *   - Strings returned through char** are heap allocated by the library and
 *     released with cvg_string_free().
 */
#ifndef CONVERGEMA_CONVERGEMA_H
#define CONVERGEMA_CONVERGEMA_H

#include <stddef.h>
#include <stdint.h>

#if defined(CONVERGEMA_BUILDING_LIBRARY)
#define CVG_API __attribute__((visibility("default")))
#else
#define CVG_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cvg_status {
  CVG_OK = 0,
  CVG_INVALID_ARGUMENT = 1,
  CVG_DOMAIN = 2,
  CVG_DEGENERATE_DATA = 3,
  CVG_FIT_DIVERGED = 4,
  CVG_COINCIDENT_CURVES = 5,
  CVG_NOT_DECREASING = 6,
  CVG_MISSING_WLEVEL = 7,
  CVG_MISSING_PLEVEL = 8,
  CVG_NOT_REACHED = 9,
  CVG_UNRESOLVED_CLEVEL = 10,
  CVG_MISSING_HORIZON = 11,
  CVG_PARSE = 12,
  CVG_IO = 13,
  CVG_LEVEL_GAP = 14,
  CVG_INTERNAL = 15
} cvg_status;

CVG_API const char* cvg_status_string(cvg_status status);

/* Message for the last failure on the calling thread ("" if none). */
CVG_API const char* cvg_last_error(void);

CVG_API void cvg_string_free(char* s);

CVG_API const char* cvg_version(void);

/* ---- curves: y(x) = -a * x^(-b) + c ---------------------------------- */

typedef struct cvg_curve {
  double a;
  double b;
  double c;
} cvg_curve;

CVG_API cvg_status cvg_curve_evaluate(cvg_curve curve, double x, double* out);
CVG_API cvg_status cvg_curve_derivative(cvg_curve curve, double x, double* out);

/* Crossings of two curves on [x_min, x_max]. *count is 0, 1 or 2; roots_x
 * and roots_y must hold 2 values each and are filled in increasing x. */
CVG_API cvg_status cvg_intersect(cvg_curve c1, cvg_curve c2, double x_min, double x_max,
                                 int* count, double* roots_x, double* roots_y);

/* ---- configuration ---------------------------------------------------- */

typedef struct cvg_config cvg_config;

CVG_API cvg_config* cvg_config_create(void);
CVG_API void cvg_config_destroy(cvg_config* cfg);

CVG_API cvg_status cvg_config_set_nu(cvg_config* cfg, double nu);
CVG_API cvg_status cvg_config_set_slowdown(cvg_config* cfg, int slowdown);
CVG_API cvg_status cvg_config_set_lambda(cvg_config* cfg, int lambda);
/* Setting either kernel or step makes sizes get checked against the scheme. */
CVG_API cvg_status cvg_config_set_kernel(cvg_config* cfg, int64_t kernel);
CVG_API cvg_status cvg_config_set_step(cvg_config* cfg, int64_t step);
/* "none" | "canonical" | "fixed:<beta>" | "fixed:<beta>+<lookahead>" */
CVG_API cvg_status cvg_config_set_strategy(cvg_config* cfg, const char* strategy);
/* "absolute" | "relative" */
CVG_API cvg_status cvg_config_set_condition(cvg_config* cfg, const char* condition);
CVG_API cvg_status cvg_config_set_tau(cvg_config* cfg, double tau);
/* Relative threshold for the unanchored baseline (tune). Pass a value <= 0 to clear. */
CVG_API cvg_status cvg_config_set_tau_r(cvg_config* cfg, double tau_r);
CVG_API cvg_status cvg_config_set_horizon_len(cvg_config* cfg, int horizon_len);
CVG_API cvg_status cvg_config_set_fit_tol(cvg_config* cfg, double tol);
CVG_API cvg_status cvg_config_set_fit_max_iter(cvg_config* cfg, int max_iter);
CVG_API cvg_status cvg_config_set_anchor_weight(cvg_config* cfg, double weight);
/* "reference" | "anchored" */
CVG_API cvg_status cvg_config_set_plevel_source(cvg_config* cfg, const char* source);
/* "raw" | "fitted" */
CVG_API cvg_status cvg_config_set_error_target(cvg_config* cfg, const char* target);
CVG_API cvg_status cvg_config_validate(const cvg_config* cfg);

/* ---- observations ----------------------------------------------------- */

typedef struct cvg_obs cvg_obs;

CVG_API cvg_obs* cvg_obs_create(void);
CVG_API void cvg_obs_destroy(cvg_obs* obs);
/* Replace contents from CSV text/file (header level,size,accuracy). When cfg
 * declares a kernel or step, sizes are checked against it; cfg may be NULL. */
CVG_API cvg_status cvg_obs_parse_csv(cvg_obs* obs, const char* text, const cvg_config* cfg);
CVG_API cvg_status cvg_obs_load_csv(cvg_obs* obs, const char* path, const cvg_config* cfg);
CVG_API cvg_status cvg_obs_add(cvg_obs* obs, int level, double size, double accuracy);
CVG_API size_t cvg_obs_count(const cvg_obs* obs);
CVG_API cvg_status cvg_obs_get(const cvg_obs* obs, size_t index, int* level, double* size,
                               double* accuracy);
CVG_API cvg_status cvg_obs_to_csv(const cvg_obs* obs, char** out);

/* ---- incremental trace ------------------------------------------------ */

typedef struct cvg_trace cvg_trace;

CVG_API cvg_status cvg_trace_create(const cvg_config* cfg, cvg_trace** out);
CVG_API void cvg_trace_destroy(cvg_trace* trace);
CVG_API cvg_status cvg_trace_extend(cvg_trace* trace, int level, double size, double accuracy);
/* *found is 0 while the level is unresolved. */
CVG_API cvg_status cvg_trace_wlevel(const cvg_trace* trace, int* found, int* level);
CVG_API cvg_status cvg_trace_plevel(const cvg_trace* trace, int* found, int* level);
CVG_API size_t cvg_trace_backbone_size(const cvg_trace* trace);
CVG_API cvg_status cvg_trace_backbone_get(const cvg_trace* trace, size_t index, int* level,
                                          double* alpha);
/* Trend in effect at a level; CVG_INVALID_ARGUMENT if it was skipped. */
CVG_API cvg_status cvg_trace_trend(const cvg_trace* trace, int level, cvg_curve* out);
/* Stop level under the configured condition. */
CVG_API cvg_status cvg_trace_clevel(const cvg_trace* trace, int* found, int* level);
/* Full analysis report of the current state as JSON. */
CVG_API cvg_status cvg_trace_report_json(const cvg_trace* trace, char** out);

/* ---- batch commands --------------------------------------------------- */

/* Analysis report JSON and, if series_csv is non-NULL, the plot series. */
CVG_API cvg_status cvg_analyze(const cvg_config* cfg, const cvg_obs* obs, char** report_json,
                               char** series_csv, int* converged);
CVG_API cvg_status cvg_tune(const cvg_config* cfg, const cvg_obs* obs, const cvg_obs* horizon,
                            char** report_json, int* selected);
/* Frame definition as JSON text; relative paths resolve against base_dir. */
CVG_API cvg_status cvg_evaluate_frame(const char* frame_json, const char* base_dir,
                                      char** report_json, char** table_csv);
/* Generator spec as JSON text. When has_seed is non-zero, seed replaces the
 * spec's own. *out receives a new handle. */
CVG_API cvg_status cvg_simulate(const char* spec_json, uint64_t seed, int has_seed,
                                cvg_obs** out);

#ifdef __cplusplus
}
#endif

#endif /* CONVERGEMA_CONVERGEMA_H */
