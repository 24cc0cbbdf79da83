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

#ifndef LIBLAB_RATEFN_HPP
#define LIBLAB_RATEFN_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

#include "liblab/freestate.hpp"
#include "liblab/ncalg.hpp"
#include "liblab/rmt.hpp"

namespace liblab {

// Something that assigns traces to time-dependent X-words.
class TrajectoryDistribution {
 public:
  virtual ~TrajectoryDistribution() = default;
  virtual Complex evaluate(const Word &w) const = 0;
  virtual int n_motions() const = 0;
  virtual int num_algebras() const = 0;
  virtual int num_generators(int i) const = 0;
  // Non-null when the distribution is an exactly computable trace state.
  virtual const TraceState *oracle() const { return nullptr; }
};

class OracleDistribution : public TrajectoryDistribution {
 public:
  explicit OracleDistribution(std::shared_ptr<const TraceState> state) : state_(std::move(state)) {}
  Complex evaluate(const Word &w) const override { return state_->evaluate(w); }
  int n_motions() const override { return state_->n_motions(); }
  int num_algebras() const override { return state_->law().num_algebras(); }
  int num_generators(int i) const override { return state_->law().num_generators(i); }
  const TraceState *oracle() const override { return state_.get(); }

 private:
  std::shared_ptr<const TraceState> state_;
};

// Empirical distribution of one sampled matrix liberation process.
class EmpiricalDistribution : public TrajectoryDistribution {
 public:
  EmpiricalDistribution(InitialFamily family, std::shared_ptr<const UnitaryTrajectory> traj);
  Complex evaluate(const Word &w) const override;
  int n_motions() const override { return family_.n_motions; }
  int num_algebras() const override { return family_.num_algebras(); }
  int num_generators(int i) const override { return family_.num_generators(i); }

 private:
  const Eigen::MatrixXcd &conjugated(const Letter &l) const;
  InitialFamily family_;
  std::shared_ptr<const UnitaryTrajectory> traj_;
  mutable std::map<std::tuple<int, int, Time>, Eigen::MatrixXcd> cache_;
  mutable std::mutex mu_;
};

struct MetricSpec {
  int m_max = 2;
  int l_max = 3;
  std::vector<Time> grid;  // candidate times; those in [0, m] are used at level m
};

// d(a, b) = sum_{m,l} 2^{-m-l} max over words of length <= l in the x_ij with
// j <= l and grid times in [0, m] of min(|a(w) - b(w)|, 1).
double trajectory_metric_d(const TrajectoryDistribution &a, const TrajectoryDistribution &b,
                           const MetricSpec &spec);

// ---------------------------------------------------------------------------
// Weak-* neighbourhoods of static tracial states.

using StaticEvaluator = std::function<Complex(const std::vector<Gen> &)>;

struct NeighborhoodSpec {
  int m = 2;
  double delta = 0.1;
};

// Words of length 1..m in x_ij, 1 <= i <= n_algebras, 1 <= j <= min(m, r(i)).
std::vector<std::vector<Gen>> neighborhood_words(const std::vector<int> &generators_per_algebra,
                                                 int m);
double neighborhood_distance(const StaticEvaluator &a, const StaticEvaluator &b,
                             const std::vector<std::vector<Gen>> &words);
// Open neighbourhood when closed = false (strict <), closed one otherwise.
bool neighborhood_member(const StaticEvaluator &candidate, const StaticEvaluator &center,
                         const std::vector<std::vector<Gen>> &words, double delta, bool closed);

// log of a probability, with log 0 represented explicitly.
struct LogValue {
  bool neg_inf = false;
  double value = 0;
  std::string str() const;
};

struct ChiOrbResult {
  int N = 0;
  int hits = 0;
  int samples = 0;
  LogValue log_fraction;
  LogValue normalized;  // log_fraction / N^2
};

// Monte Carlo estimate of the orbital-entropy probability: the fraction of
// Haar tuples (U_1..U_n) for which the rotated family lies in the open
// neighbourhood of the target.
ChiOrbResult chi_orb_mc(const StaticEvaluator &target, const InitialFamily &family,
                        const NeighborhoodSpec &spec, int samples, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Rate functional.

struct RateOptions {
  double tol = 1e-11;
  int max_order = 64;  // largest Gauss-Legendre order per segment
};

struct RateResult {
  double value = 0;
  Complex tau_t;        // tau^t(P)
  Complex sigma_lib;    // sigma0^lib(P)
  double integral = 0;  // sum_k int_0^t ||E_s^{(k)}||^2 ds
  std::vector<double> integral_per_k;
  int evaluations = 0;
};

// ||E||_2^2 of the conditional expectation of the cyclic derivative.
double cond_exp_norm2(const TraceState &tau, const NCPolynomial &P, int k, Time s);

// I_t(tau, P) = tau^t(P) - sigma0^lib(P) - 1/2 sum_k int_0^t ||E_s^{(k)}||^2 ds.
// The integral is split at the letter times of P (where the integrand jumps)
// and each piece is integrated by Gauss-Legendre rules of increasing order.
// Only exactly computable states are accepted.
RateResult rate_functional(const TrajectoryDistribution &tau, const TraceState &sigma0_lib,
                           const NCPolynomial &P, Time t, const RateOptions &opt = {});

// Twenty self-adjoint test polynomials in x_11, x_21 with times in [0, 2].
std::vector<NCPolynomial> standard_test_polynomials();

}  // namespace liblab

#endif
