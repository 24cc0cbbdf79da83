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

#ifndef LIBLAB_EXPERIMENTS_HPP
#define LIBLAB_EXPERIMENTS_HPP

#include <memory>
#include <string>
#include <vector>

#include "liblab/error.hpp"
#include "liblab/freestate.hpp"

namespace liblab {

inline constexpr const char *kVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Experiment kinds understood by run_experiment.
std::vector<std::string> experiment_kinds();

// Runs one experiment from a JSON configuration object and returns the CSV
// table, preceded by '#' lines echoing the effective configuration.
// Unknown keys are rejected with ConfigError.
std::string run_experiment(const std::string &kind, const std::string &config_json);

// Process exit status for an error code: 2 configuration, 3 numeric or
// domain, 4 I/O.
int exit_status(ErrorCode code);

// Builds a trace state from a JSON description:
//   {"kind": "liberation" | "constant" | "free-constant", "n": motions,
//    "marginals": [...], "sigma0": {...}}
std::shared_ptr<TraceState> state_from_json(const std::string &json);

// Default laws used by the experiments.
std::vector<MarginalLaw> two_projections();
std::shared_ptr<MatrixLaw> correlated_projections(double theta = 0.6);

// Default word sets for the conditional-expectation pairing check.
std::vector<NCPolynomial> pairing_test_polynomials();
std::vector<NCPolynomial> pairing_test_multipliers();

}  // namespace liblab

#endif
