#ifndef QDSHIELD_H
#define QDSHIELD_H

/* C interface to the qdshield engine. Every call returns a qds_status;
 * on failure qds_last_error() describes the most recent error raised on
 * the calling thread. Handles are opaque and must be released with the
 * matching *_free function. */

#include <stddef.h>

#if defined(_WIN32)
#define QDS_API __declspec(dllexport)
#else
#define QDS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum qds_status {
  QDS_OK = 0,
  QDS_INVALID_ARGUMENT = 1,
  QDS_DOMAIN_ERROR = 2,
  QDS_STATE_CORRUPTION = 3,
  QDS_POSITIVITY_VIOLATION = 4,
  QDS_NUMERICAL_FAILURE = 5,
  QDS_INTERNAL_CONSISTENCY = 6,
  QDS_INTEGRATION_ABORT = 7,
  QDS_IO_ERROR = 8,
  QDS_UNKNOWN_ERROR = 99
} qds_status;

typedef struct qds_run qds_run;

/* Optional overrides; a zero field keeps the configured or default value. */
typedef struct qds_run_options {
  double dt;
  double quad_tol;
  int sample_stride;
  int threads;
} qds_run_options;

QDS_API const char* qds_version(void);
QDS_API const char* qds_last_error(void);
QDS_API const char* qds_status_name(qds_status status);

/* Runs the scenario described by a JSON config document. */
QDS_API qds_status qds_run_config_json(const char* json_text, const qds_run_options* options,
                                       qds_run** out);
QDS_API qds_status qds_run_config_file(const char* path, const qds_run_options* options,
                                       qds_run** out);
QDS_API void qds_run_free(qds_run* run);

QDS_API qds_status qds_run_name(const qds_run* run, const char** out);
QDS_API qds_status qds_run_write_csv(const qds_run* run, const char* path);
QDS_API qds_status qds_run_write_json(const qds_run* run, const char* path);

/* *found is set to 0 when the quantity is not applicable. */
QDS_API qds_status qds_run_transition_time(const qds_run* run, double* value, int* found);
QDS_API qds_status qds_run_effectiveness_time(const qds_run* run, int n_x, double* value,
                                              int* found);

/* Figure identifiers: fig1..fig6, rho1, or "all". */
QDS_API size_t qds_figure_count(void);
QDS_API const char* qds_figure_id(size_t index);
QDS_API qds_status qds_figures_write(const char* id, const char* out_dir,
                                     const qds_run_options* options);

QDS_API qds_status qds_derived_times(const char* state, int n_x, double temperature,
                                     const qds_run_options* options, double* t_star,
                                     int* t_star_found, double* t_e, int* t_e_found);

/* Runs the built-in oracle checks. report receives one line per check. */
typedef void (*qds_check_callback)(const char* name, int passed, const char* detail,
                                   void* user);
QDS_API qds_status qds_self_check(qds_check_callback report, void* user, int* all_passed);

/* Standalone measures on a row-major 4x4 complex density matrix given as
 * 16 (re, im) pairs. */
QDS_API qds_status qds_discord(const double* rho_re_im, double* out);
QDS_API qds_status qds_concurrence(const double* rho_re_im, double* out);

#ifdef __cplusplus
}
#endif

#endif
