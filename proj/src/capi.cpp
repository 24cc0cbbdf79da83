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

#include "liblab.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "liblab/error.hpp"
#include "liblab/experiments.hpp"
#include "liblab/freestate.hpp"
#include "liblab/heatkern.hpp"
#include "liblab/ncalg.hpp"
#include "liblab/ncpart.hpp"
#include "liblab/ratefn.hpp"

struct liblab_poly {
  liblab::NCPolynomial p;
};

struct liblab_state {
  std::shared_ptr<liblab::TraceState> s;
};

namespace {

thread_local std::string last_error;

template <class F>
liblab_status guarded(F &&body) {
  try {
    body();
    last_error.clear();
    return LIBLAB_OK;
  } catch (const liblab::Error &e) {
    last_error = e.what();
    return static_cast<liblab_status>(e.code());
  } catch (const std::bad_alloc &) {
    last_error = "out of memory";
  } catch (const std::exception &e) {
    last_error = e.what();
  } catch (...) {
    last_error = "unknown failure";
  }
  return LIBLAB_E_INTERNAL;
}

void require(const void *p, const char *what) {
  if (!p) liblab::fail(liblab::ErrorCode::InvalidArgument, std::string(what) + " is null");
}

char *dup(const std::string &s) {
  char *out = static_cast<char *>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

liblab::Time parse_time(const char *t) {
  require(t, "time");
  return liblab::Time::parse(t);
}

}  // namespace

extern "C" {

const char *liblab_version(void) { return liblab::kVersion; }

const char *liblab_last_error(void) { return last_error.c_str(); }

const char *liblab_status_name(liblab_status status) {
  if (status == LIBLAB_E_INTERNAL) return "InternalError";
  if (status < LIBLAB_OK || status > LIBLAB_E_INVALID_ARGUMENT) return "Unknown";
  return liblab::error_name(static_cast<liblab::ErrorCode>(status));
}

int liblab_exit_code(liblab_status status) {
  if (status == LIBLAB_E_INTERNAL) return 3;
  if (status < LIBLAB_OK || status > LIBLAB_E_INVALID_ARGUMENT) return 3;
  return liblab::exit_status(static_cast<liblab::ErrorCode>(status));
}

void liblab_string_free(char *s) { std::free(s); }

liblab_status liblab_poly_parse(const char *text, liblab_poly **out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new liblab_poly{liblab::NCPolynomial::parse(text)};
  });
}

void liblab_poly_free(liblab_poly *p) { delete p; }

liblab_status liblab_poly_to_string(const liblab_poly *p, char **out) {
  return guarded([&] {
    require(p, "polynomial");
    require(out, "out");
    *out = dup(p->p.str());
  });
}

liblab_status liblab_poly_add(const liblab_poly *a, const liblab_poly *b, liblab_poly **out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = new liblab_poly{a->p + b->p};
  });
}

liblab_status liblab_poly_mul(const liblab_poly *a, const liblab_poly *b, liblab_poly **out) {
  return guarded([&] {
    require(a, "a");
    require(b, "b");
    require(out, "out");
    *out = new liblab_poly{a->p * b->p};
  });
}

liblab_status liblab_poly_adjoint(const liblab_poly *p, liblab_poly **out) {
  return guarded([&] {
    require(p, "polynomial");
    require(out, "out");
    *out = new liblab_poly{p->p.adjoint()};
  });
}

liblab_status liblab_poly_cyclic_derivative(const liblab_poly *p, int k, const char *s, liblab_poly **out) {
  return guarded([&] {
    require(p, "polynomial");
    require(out, "out");
    *out = new liblab_poly{liblab::cyclic_derivative(p->p, k, parse_time(s))};
  });
}

liblab_status liblab_state_create(const char *json, liblab_state **out) {
  return guarded([&] {
    require(json, "json");
    require(out, "out");
    *out = new liblab_state{liblab::state_from_json(json)};
  });
}

void liblab_state_free(liblab_state *s) { delete s; }

liblab_status liblab_state_evaluate(const liblab_state *s, const liblab_poly *p, double *re, double *im) {
  return guarded([&] {
    require(s, "state");
    require(p, "polynomial");
    liblab::Complex v = s->s->evaluate(p->p);
    if (re) *re = v.real();
    if (im) *im = v.imag();
  });
}

liblab_status liblab_state_evaluate_shifted(const liblab_state *s, const liblab_poly *p, const char *t,
                                            double *re, double *im) {
  return guarded([&] {
    require(s, "state");
    require(p, "polynomial");
    liblab::Complex v = s->s->evaluate_shifted(p->p, parse_time(t));
    if (re) *re = v.real();
    if (im) *im = v.imag();
  });
}

liblab_status liblab_conditional_expectation(const liblab_state *s, const liblab_poly *p, int k,
                                             const char *time, liblab_poly **out) {
  return guarded([&] {
    require(s, "state");
    require(p, "polynomial");
    require(out, "out");
    *out = new liblab_poly{liblab::conditional_expectation(p->p, k, parse_time(time), *s->s)};
  });
}

liblab_status liblab_rate_functional(const liblab_state *tau, const liblab_state *sigma_lib,
                                     const liblab_poly *p, const char *t, double *value) {
  return guarded([&] {
    require(tau, "tau");
    require(sigma_lib, "sigma_lib");
    require(p, "polynomial");
    require(value, "value");
    liblab::OracleDistribution dist(tau->s);
    *value = liblab::rate_functional(dist, *sigma_lib->s, p->p, parse_time(t)).value;
  });
}

liblab_status liblab_ubm_moment(int n, double t, double *out) {
  return guarded([&] {
    require(out, "out");
    *out = liblab::free_ubm_moment(n, t);
  });
}

liblab_status liblab_elliptic_ke(double k, double *K, double *E) {
  return guarded([&] {
    liblab::EllipticKE ke = liblab::elliptic_ke(k);
    if (K) *K = ke.K;
    if (E) *E = ke.E;
  });
}

liblab_status liblab_heat_modulus(double T, double *k) {
  return guarded([&] {
    require(k, "k");
    *k = liblab::invert_T(T).k;
  });
}

liblab_status liblab_heat_free_energy(double T, double *F) {
  return guarded([&] {
    require(F, "F");
    *F = liblab::free_energy(T);
  });
}

liblab_status liblab_heat_sandwich(double T, double eps, double *low, double *high) {
  return guarded([&] {
    liblab::Sandwich s = liblab::li_yau_sandwich(T, eps);
    if (low) *low = s.low;
    if (high) *high = s.high;
  });
}

liblab_status liblab_nc_count(int n, uint64_t *out) {
  return guarded([&] {
    require(out, "out");
    std::uint64_t c = 0;
    liblab::for_each_nc(n, [&](const liblab::SetPartition &) { ++c; });
    *out = c;
  });
}

liblab_status liblab_kreweras(const char *partition, char **out) {
  return guarded([&] {
    require(partition, "partition");
    require(out, "out");
    auto pi = liblab::SetPartition::parse(partition);
    if (!pi.is_noncrossing()) liblab::fail(liblab::ErrorCode::InvalidArgument, "partition is crossing");
    *out = dup(liblab::kreweras(pi).str());
  });
}

liblab_status liblab_run_experiment(const char *kind, const char *config_json, char **csv) {
  return guarded([&] {
    require(kind, "kind");
    require(csv, "csv");
    *csv = dup(liblab::run_experiment(kind, config_json ? config_json : ""));
  });
}

liblab_status liblab_experiment_kinds(char **out) {
  return guarded([&] {
    require(out, "out");
    std::string s;
    for (const auto &k : liblab::experiment_kinds()) s += k + "\n";
    *out = dup(s);
  });
}

}  // extern "C"
