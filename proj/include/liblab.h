// Copyright 2026 The liberation-lab Authors - All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef LIBLAB_H
#define LIBLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define LIBLAB_API __declspec(dllexport)
#else
#define LIBLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum liblab_status {
  LIBLAB_OK = 0,
  LIBLAB_E_PARSE = 1,
  LIBLAB_E_NON_X_POLYNOMIAL = 2,
  LIBLAB_E_SIZE_LIMIT = 3,
  LIBLAB_E_DEGREE_OVERFLOW = 4,
  LIBLAB_E_UNSUPPORTED_WORD = 5,
  LIBLAB_E_UNSUPPORTED_STATE = 6,
  LIBLAB_E_DOMAIN = 7,
  LIBLAB_E_GRID_MISS = 8,
  LIBLAB_E_INCOMPATIBLE_N = 9,
  LIBLAB_E_CONFIG = 10,
  LIBLAB_E_IO = 11,
  LIBLAB_E_INVALID_ARGUMENT = 12,
  LIBLAB_E_INTERNAL = 100
} liblab_status;

/* Opaque handles. */
typedef struct liblab_poly liblab_poly;
typedef struct liblab_state liblab_state;

LIBLAB_API const char *liblab_version(void);
/* Message of the last failure on the calling thread ("" if none). */
LIBLAB_API const char *liblab_last_error(void);
/* Symbolic name of a status, e.g. "ConfigError". */
LIBLAB_API const char *liblab_status_name(liblab_status status);
/* Process exit code for a status: 0 ok, 2 configuration, 3 numeric, 4 I/O. */
LIBLAB_API int liblab_exit_code(liblab_status status);
/* Releases strings returned through char ** out-parameters. */
LIBLAB_API void liblab_string_free(char *s);

/* Polynomials in the letters X[i,j;t], V[i;t], V*[i;t]. */
LIBLAB_API liblab_status liblab_poly_parse(const char *text, liblab_poly **out);
LIBLAB_API void liblab_poly_free(liblab_poly *p);
LIBLAB_API liblab_status liblab_poly_to_string(const liblab_poly *p, char **out);
LIBLAB_API liblab_status liblab_poly_add(const liblab_poly *a, const liblab_poly *b, liblab_poly **out);
LIBLAB_API liblab_status liblab_poly_mul(const liblab_poly *a, const liblab_poly *b, liblab_poly **out);
LIBLAB_API liblab_status liblab_poly_adjoint(const liblab_poly *p, liblab_poly **out);
LIBLAB_API liblab_status liblab_poly_cyclic_derivative(const liblab_poly *p, int k, const char *s,
                                                       liblab_poly **out);

/* Trace states, described in JSON:
 *   {"kind": "liberation" | "constant" | "free-constant", "n": motions,
 *    "sigma0": "free" | "correlated" | {"generators": [...]},
 *    "marginals": [...]}                                                  */
LIBLAB_API liblab_status liblab_state_create(const char *json, liblab_state **out);
LIBLAB_API void liblab_state_free(liblab_state *s);
LIBLAB_API liblab_status liblab_state_evaluate(const liblab_state *s, const liblab_poly *p, double *re,
                                               double *im);
/* tau^t(P): the state applied to the time-shift substitution of P. */
LIBLAB_API liblab_status liblab_state_evaluate_shifted(const liblab_state *s, const liblab_poly *p,
                                                       const char *t, double *re, double *im);
LIBLAB_API liblab_status liblab_conditional_expectation(const liblab_state *s, const liblab_poly *p, int k,
                                                        const char *time, liblab_poly **out);
/* Rate functional of tau at P and time t relative to the liberation state. */
LIBLAB_API liblab_status liblab_rate_functional(const liblab_state *tau, const liblab_state *sigma_lib,
                                                const liblab_poly *p, const char *t, double *value);

/* n-th moment of the free unitary Brownian motion at time t. */
LIBLAB_API liblab_status liblab_ubm_moment(int n, double t, double *out);

/* Unitary heat kernel. */
LIBLAB_API liblab_status liblab_elliptic_ke(double k, double *K, double *E);
LIBLAB_API liblab_status liblab_heat_modulus(double T, double *k);
LIBLAB_API liblab_status liblab_heat_free_energy(double T, double *F);
LIBLAB_API liblab_status liblab_heat_sandwich(double T, double eps, double *low, double *high);

/* Non-crossing partitions. */
LIBLAB_API liblab_status liblab_nc_count(int n, uint64_t *out);
/* Kreweras complement of a partition written as {1,4|2,3}. */
LIBLAB_API liblab_status liblab_kreweras(const char *partition, char **out);

/* Runs an experiment; *csv receives the table (free with liblab_string_free). */
LIBLAB_API liblab_status liblab_run_experiment(const char *kind, const char *config_json, char **csv);
/* Newline-separated list of experiment kinds. */
LIBLAB_API liblab_status liblab_experiment_kinds(char **out);

#ifdef __cplusplus
}
#endif

#endif
