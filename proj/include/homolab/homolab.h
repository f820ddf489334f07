/* Copyright The homolab Authors.
 * SPDX-License-Identifier: Apache-2.0 */

/* C interface of the homolab library. All functions are thread safe for
 * distinct handles; error text is kept per thread. */

#ifndef HOMOLAB_HOMOLAB_H
#define HOMOLAB_HOMOLAB_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define HOMOLAB_API __attribute__((visibility("default")))
#else
#define HOMOLAB_API
#endif

typedef enum homolab_status {
  HOMOLAB_OK = 0,
  HOMOLAB_ERR_CONFIG = 1,    /* malformed or inconsistent configuration */
  HOMOLAB_ERR_ARGUMENT = 2,  /* bad argument to an API call */
  HOMOLAB_ERR_NUMERICAL = 3, /* a solver failed or a run produced partial results */
  HOMOLAB_ERR_IO = 4,
  HOMOLAB_ERR_INTERNAL = 5
} homolab_status;

typedef struct homolab_config homolab_config;
typedef struct homolab_field homolab_field;

/* Receives progress lines of homolab_run. */
typedef void (*homolab_log_fn)(const char* line, void* user);

HOMOLAB_API const char* homolab_version(void);

/* Text of the most recent failure on the calling thread ("" if none). */
HOMOLAB_API const char* homolab_last_error(void);

/* Line of the config file that caused the last HOMOLAB_ERR_CONFIG (0 if not line specific). */
HOMOLAB_API int homolab_last_error_line(void);

HOMOLAB_API homolab_status homolab_config_parse_file(const char* path, homolab_config** out);
HOMOLAB_API homolab_status homolab_config_parse_string(const char* text, homolab_config** out);
HOMOLAB_API void homolab_config_destroy(homolab_config* config);

HOMOLAB_API homolab_status homolab_config_set_output_dir(homolab_config* config, const char* dir);
HOMOLAB_API homolab_status homolab_config_set_jobs(homolab_config* config, int jobs);

/* Resolved `key = value` text. The buffer is owned by the config and valid
 * until the next call on it or its destruction. */
HOMOLAB_API const char* homolab_config_resolved_text(homolab_config* config);

/* Number of commands and the name of command i. */
HOMOLAB_API size_t homolab_command_count(void);
HOMOLAB_API const char* homolab_command_name(size_t i);

/* Runs a command. *exit_code receives the process exit code
 * (0 ok, 1 configuration or usage, 2 numerical failure). The status is
 * HOMOLAB_OK when the run completed, even with partial numerical results;
 * in that case *exit_code is 2 and homolab_last_error describes the failure. */
HOMOLAB_API homolab_status homolab_run(const char* command, const homolab_config* config, homolab_log_fn log,
                                       void* user, int* exit_code);

/* Coefficient field described by a config's coeff.* keys. */
HOMOLAB_API homolab_status homolab_field_create(const homolab_config* config, homolab_field** out);
HOMOLAB_API void homolab_field_destroy(homolab_field* field);
HOMOLAB_API int homolab_field_dim(const homolab_field* field);

/* Evaluates the coefficient matrix at y (dim entries); writes dim*dim
 * entries row major. */
HOMOLAB_API homolab_status homolab_field_eval(const homolab_field* field, const double* y, double* a_out);

/* Homogenized tensor on a cell torus with cell_n nodes per axis;
 * writes dim*dim entries row major. */
HOMOLAB_API homolab_status homolab_homogenize(const homolab_field* field, int cell_n, double tol, double* a_hat_out);

/* Exit code that a CLI should use for a status. */
HOMOLAB_API int homolab_status_exit_code(homolab_status status);

#ifdef __cplusplus
}
#endif

#endif
