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

#include <math.h>
#include <stdint.h>
#include <stdio.h>
#include <string.h>

#include "liblab.h"

static int failures = 0;

#define EXPECT(cond)                                             \
  do {                                                           \
    if (!(cond)) {                                               \
      fprintf(stderr, "%s:%d: check failed: %s\n", __FILE__, __LINE__, #cond); \
      ++failures;                                                \
    }                                                            \
  } while (0)

#define EXPECT_NEAR(a, b, tol) EXPECT(fabs((a) - (b)) <= (tol))

static liblab_poly *parse(const char *text) {
  liblab_poly *p = NULL;
  EXPECT(liblab_poly_parse(text, &p) == LIBLAB_OK);
  return p;
}

static void test_basics(void) {
  EXPECT(liblab_version() != NULL && strlen(liblab_version()) > 0);
  EXPECT(strcmp(liblab_status_name(LIBLAB_OK), liblab_status_name(LIBLAB_E_PARSE)) != 0);
  EXPECT(liblab_exit_code(LIBLAB_OK) == 0);
  EXPECT(liblab_exit_code(LIBLAB_E_CONFIG) == 2);
  EXPECT(liblab_exit_code(LIBLAB_E_DOMAIN) == 3);
  EXPECT(liblab_exit_code(LIBLAB_E_IO) == 4);
}

static void test_polynomials(void) {
  liblab_poly *a = parse("X[1,1;1/2]");
  liblab_poly *b = parse("X[2,1;1]");
  liblab_poly *ab = NULL, *adj = NULL, *d = NULL, *sum = NULL;
  char *s = NULL;

  EXPECT(liblab_poly_mul(a, b, &ab) == LIBLAB_OK);
  EXPECT(liblab_poly_to_string(ab, &s) == LIBLAB_OK);
  EXPECT(s != NULL && strstr(s, "X[1,1;1/2]") != NULL && strstr(s, "X[2,1;1]") != NULL);
  liblab_string_free(s);

  EXPECT(liblab_poly_adjoint(ab, &adj) == LIBLAB_OK);
  EXPECT(liblab_poly_to_string(adj, &s) == LIBLAB_OK);
  EXPECT(s != NULL && strstr(s, "X[2,1;1]") < strstr(s, "X[1,1;1/2]"));
  liblab_string_free(s);

  EXPECT(liblab_poly_add(a, b, &sum) == LIBLAB_OK);
  EXPECT(liblab_poly_cyclic_derivative(a, 1, "1/4", &d) == LIBLAB_OK);
  EXPECT(liblab_poly_to_string(d, &s) == LIBLAB_OK);
  EXPECT(s != NULL && strcmp(s, "0") == 0);
  liblab_string_free(s);

  liblab_poly *bad = NULL;
  EXPECT(liblab_poly_parse("X[1,1;", &bad) == LIBLAB_E_PARSE);
  EXPECT(bad == NULL);
  EXPECT(strlen(liblab_last_error()) > 0);
  EXPECT(liblab_poly_to_string(NULL, &s) == LIBLAB_E_INVALID_ARGUMENT);

  liblab_poly_free(a);
  liblab_poly_free(b);
  liblab_poly_free(ab);
  liblab_poly_free(adj);
  liblab_poly_free(sum);
  liblab_poly_free(d);
  liblab_poly_free(NULL);
}

static void test_states(void) {
  liblab_state *lib = NULL, *fr = NULL;
  EXPECT(liblab_state_create("{\"kind\": \"liberation\", \"n\": 1, \"sigma0\": \"free\"}", &lib) == LIBLAB_OK);
  EXPECT(liblab_state_create("{\"kind\": \"free-constant\", \"n\": 1, \"sigma0\": \"free\"}", &fr) == LIBLAB_OK);

  double re = -1, im = -1;
  liblab_poly *pq = parse("X[1,1;0]X[2,1;0]");
  EXPECT(liblab_state_evaluate(lib, pq, &re, &im) == LIBLAB_OK);
  EXPECT_NEAR(re, 0.25, 1e-12);
  EXPECT_NEAR(im, 0.0, 1e-12);

  liblab_poly *pqpq = parse("X[1,1;0]X[2,1;0]X[1,1;0]X[2,1;0]");
  EXPECT(liblab_state_evaluate(fr, pqpq, &re, &im) == LIBLAB_OK);
  EXPECT_NEAR(re, 3.0 / 16.0, 1e-12);
  EXPECT(liblab_state_evaluate_shifted(lib, pq, "1", &re, &im) == LIBLAB_OK);
  EXPECT_NEAR(re, 0.25, 1e-12);

  liblab_poly *e = NULL;
  EXPECT(liblab_conditional_expectation(lib, pq, 1, "2", &e) == LIBLAB_OK);
  char *s = NULL;
  EXPECT(liblab_poly_to_string(e, &s) == LIBLAB_OK);
  EXPECT(s != NULL && strcmp(s, "0") == 0);
  liblab_string_free(s);

  double value = 1.0;
  liblab_poly *x = parse("X[1,1;1/2]X[2,1;1]+X[2,1;1]X[1,1;1/2]");
  EXPECT(liblab_rate_functional(lib, lib, x, "1", &value) == LIBLAB_OK);
  EXPECT(value <= 1e-8);

  liblab_state *bad = NULL;
  EXPECT(liblab_state_create("{\"kind\": \"weird\"}", &bad) == LIBLAB_E_CONFIG);
  EXPECT(bad == NULL);

  liblab_poly_free(pq);
  liblab_poly_free(pqpq);
  liblab_poly_free(e);
  liblab_poly_free(x);
  liblab_state_free(lib);
  liblab_state_free(fr);
}

static void test_numerics(void) {
  const double pi = 3.14159265358979323846;
  double m = 0, K = 0, E = 0, k = 0, F = 0, low = 0, high = 0;
  EXPECT(liblab_ubm_moment(1, 1.0, &m) == LIBLAB_OK);
  EXPECT_NEAR(m, exp(-0.5), 1e-10);
  EXPECT(liblab_ubm_moment(2, 1.0, &m) == LIBLAB_OK);
  EXPECT_NEAR(m, 0.0, 1e-10);

  EXPECT(liblab_elliptic_ke(0.0, &K, &E) == LIBLAB_OK);
  EXPECT_NEAR(K, pi / 2, 1e-14);
  EXPECT_NEAR(E, pi / 2, 1e-14);

  EXPECT(liblab_heat_modulus(50.0, &k) == LIBLAB_OK);
  EXPECT(k > 0.0 && k <= 1.0);
  EXPECT(liblab_heat_free_energy(50.0, &F) == LIBLAB_OK);
  EXPECT(isfinite(F));
  EXPECT(liblab_heat_sandwich(50.0, 0.9, &low, &high) == LIBLAB_OK);
  EXPECT(low <= F && F <= high);
  EXPECT(liblab_heat_free_energy(pi * pi, &F) == LIBLAB_E_DOMAIN);
  EXPECT(liblab_exit_code(LIBLAB_E_DOMAIN) == 3);
}

static void test_partitions(void) {
  uint64_t count = 0;
  EXPECT(liblab_nc_count(4, &count) == LIBLAB_OK);
  EXPECT(count == 14);
  EXPECT(liblab_nc_count(10, &count) == LIBLAB_OK);
  EXPECT(count == 16796);

  char *s = NULL;
  EXPECT(liblab_kreweras("{1,4|2,3}", &s) == LIBLAB_OK);
  EXPECT(s != NULL && strcmp(s, "{1,3|2|4}") == 0);
  liblab_string_free(s);
  s = NULL;
  EXPECT(liblab_kreweras("{1,3|2,4}", &s) != LIBLAB_OK);
  EXPECT(s == NULL);
}

static void test_experiments(void) {
  char *kinds = NULL;
  EXPECT(liblab_experiment_kinds(&kinds) == LIBLAB_OK);
  EXPECT(kinds != NULL && strstr(kinds, "heat-kernel") != NULL && strstr(kinds, "ubm-moments") != NULL);
  liblab_string_free(kinds);

  char *csv = NULL;
  EXPECT(liblab_run_experiment("heat-kernel", "{\"t_min\": 12, \"t_max\": 400, \"points\": 5}", &csv) ==
         LIBLAB_OK);
  EXPECT(csv != NULL && strstr(csv, "T,") != NULL);
  liblab_string_free(csv);

  csv = NULL;
  EXPECT(liblab_run_experiment("heat-kernel", "{\"no_such_key\": 1}", &csv) == LIBLAB_E_CONFIG);
  EXPECT(csv == NULL);
  EXPECT(liblab_run_experiment("no-such-kind", "{}", &csv) == LIBLAB_E_CONFIG);
}

int main(void) {
  test_basics();
  test_polynomials();
  test_states();
  test_numerics();
  test_partitions();
  test_experiments();
  if (failures) {
    fprintf(stderr, "%d check(s) failed\n", failures);
    return 1;
  }
  printf("C API: all checks passed\n");
  return 0;
}
