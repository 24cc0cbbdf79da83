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

#ifndef LIBLAB_RMT_HPP
#define LIBLAB_RMT_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "liblab/freestate.hpp"
#include "liblab/ncalg.hpp"

namespace liblab {

using RandomEngine = std::mt19937_64;

// Deterministic N x N Hermitian matrices xi_ij realizing an initial law.
struct InitialFamily {
  int N = 0;
  int n_motions = 0;
  std::map<Gen, Eigen::MatrixXcd> xi;
  double norm_bound = 0;

  int num_algebras() const;
  int num_generators(int i) const;
  const Eigen::MatrixXcd &at(int i, int j) const;
  // The exact joint law of the family under tr_N.
  std::shared_ptr<MatrixLaw> law() const;
};

// Diagonal quantile discretization of single-generator marginals, Kronecker
// tiling of matrix marginals. With strict = true atomic weights must be
// multiples of 1/N.
InitialFamily build_initial_family(const std::vector<MarginalLaw> &marginals, int N, int n_motions,
                                   bool strict = false);
// Tiles a d x d matrix law to size N (N must be a multiple of d).
InitialFamily family_from_matrix_law(const MatrixLaw &law, int N, int n_motions);

// GUE normalized so that E tr H^2 = 1.
Eigen::MatrixXcd sample_gue(int N, RandomEngine &rng);
// exp(i sqrt(h) H) for Hermitian H: Taylor polynomial with scaling and squaring,
// truncated below double precision.
Eigen::MatrixXcd unitary_exponential(const Eigen::MatrixXcd &H, double h);
// One step U -> exp(i sqrt(h) H) U of the unitary Brownian motion.
Eigen::MatrixXcd step_ubm(const Eigen::MatrixXcd &U, double h, RandomEngine &rng);
// Haar-distributed unitary via QR of a complex Ginibre matrix.
Eigen::MatrixXcd sample_haar(int N, RandomEngine &rng);

std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path);

// n independent unitary Brownian motions recorded on the grid m*h,
// m = 0, record_every, 2*record_every, ..., steps.
class UnitaryTrajectory {
 public:
  UnitaryTrajectory(int N, int n_motions, Time h, int steps, std::uint64_t seed,
                    int record_every = 1);

  int N() const { return N_; }
  int n_motions() const { return n_; }
  Time h() const { return h_; }
  int steps() const { return steps_; }
  const std::vector<Time> &times() const { return times_; }
  bool on_grid(Time t) const;
  const Eigen::MatrixXcd &U(int i, Time t) const;

  // Binary dump: int32 N, n, M, record_every; int64 h_num, h_den; then for
  // every recorded time and motion the column-major complex<double> matrix.
  void write(const std::string &path) const;

 private:
  int N_, n_, steps_, record_every_;
  Time h_;
  std::vector<Time> times_;
  std::vector<std::vector<Eigen::MatrixXcd>> U_;  // [time index][motion]
};

// Runs paths without storing them; visit(path, step, U) is called at every
// recorded step (including 0) with the current unitaries. Paths are run in
// parallel; visit must only touch per-path state.
void simulate_paths(int N, int n_motions, double h, int steps, std::uint64_t seed, int paths,
                    int record_every,
                    const std::function<void(int, int, const std::vector<Eigen::MatrixXcd> &)> &visit);

// tr_N of the word realized by the matrix liberation process: X(i,j,t) ->
// U_i(t) xi_ij U_i(t)^*, V(i,t) -> U_i(t).
Complex evaluate_word_trace(const Word &w, const InitialFamily &family,
                            const UnitaryTrajectory &traj);
// Static version with one unitary per motion (times ignored).
Complex evaluate_word_static(const std::vector<Gen> &w, const InitialFamily &family,
                             const std::vector<Eigen::MatrixXcd> &U);

struct MomentCheckRow {
  int n = 0;
  Time t;
  Complex mean;
  double se = 0;  // standard error of the real part
  double se_im = 0;
  double ode = 0;
};

// Monte Carlo estimate of E tr U(t)^n for one motion against the free moments.
std::vector<MomentCheckRow> finite_n_moment_check(int N, int paths, Time T, int steps, int n_max,
                                                  std::uint64_t seed, int record_every);
// E tr_N(U_1(t)^* U_2(t)) for two independent motions, against e^{-t}
// (rows carry n = 1).
std::vector<MomentCheckRow> cross_correlation_check(int N, int paths, Time T, int steps,
                                                    std::uint64_t seed, int record_every);

}  // namespace liblab

#endif
