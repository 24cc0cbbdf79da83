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

#ifndef LIBLAB_FREESTATE_HPP
#define LIBLAB_FREESTATE_HPP

#include <Eigen/Dense>
#include <complex>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "liblab/ncalg.hpp"

namespace liblab {

// ---------------------------------------------------------------------------
// Free unitary Brownian motion moments m_n(t) = tau(u(t)^n), n >= 0. The
// moments are real and m_{-n} = m_n.
double free_ubm_moment(int n, double t);
std::vector<double> free_ubm_moments(int n_max, double t);

// ---------------------------------------------------------------------------
// Static generators x_ij of the initial algebra.
struct Gen {
  int i = 1;
  int j = 1;
  friend bool operator==(const Gen &, const Gen &) = default;
  friend auto operator<=>(const Gen &, const Gen &) = default;
};

// Law of one tensor factor A_i, generated by self-adjoint x_i1..x_ir.
class MarginalLaw {
 public:
  enum class Kind { Atomic, Semicircle, Moments, Matrices };

  static MarginalLaw atomic(std::vector<double> atoms, std::vector<double> weights);
  static MarginalLaw semicircle(double mean, double variance);
  // moments[k] = phi(x^k) for k = 0..K (moments[0] must be 1).
  static MarginalLaw moment_sequence(std::vector<double> moments, double norm_bound);
  // Joint law of several generators realized by d x d Hermitian matrices
  // under the normalized trace.
  static MarginalLaw matrices(std::vector<Eigen::MatrixXcd> mats);

  Kind kind() const { return kind_; }
  int num_generators() const;
  // phi(x_{j_1} ... x_{j_m}), generator indices are 1-based.
  Complex moment(const std::vector<int> &js) const;
  double mean(int j) const { return moment({j}).real(); }
  // Upper bound for the operator norm of x_j.
  double norm_bound(int j) const;
  // Bound for the norm of x_j - phi(x_j).
  double centered_norm_bound(int j) const;

  const std::vector<double> &atoms() const { return atoms_; }
  const std::vector<double> &weights() const { return weights_; }
  double semicircle_mean() const { return sc_mean_; }
  double semicircle_variance() const { return sc_var_; }
  const std::vector<Eigen::MatrixXcd> &matrix_generators() const { return mats_; }
  // Quantile function of a single-generator law (Atomic / Semicircle).
  double quantile(double q) const;

  // Checks positivity of the Hankel matrices that the law determines.
  void validate() const;

 private:
  Kind kind_ = Kind::Atomic;
  std::vector<double> atoms_, weights_, moments_;
  double sc_mean_ = 0, sc_var_ = 1, bound_ = 0;
  std::vector<Eigen::MatrixXcd> mats_;
};

// Tracial law on the static generators x_ij, 1 <= i <= n+1.
class JointLaw {
 public:
  virtual ~JointLaw() = default;
  virtual Complex moment(const std::vector<Gen> &w) const = 0;
  virtual int num_algebras() const = 0;
  virtual int num_generators(int i) const = 0;
  virtual double norm_bound(int i, int j) const = 0;
  // Bound for the norm of x_ij - sigma(x_ij).
  virtual double centered_norm_bound(int i, int j) const = 0;
  double mean(int i, int j) const { return moment({{i, j}}).real(); }
  virtual bool is_free_product() const { return false; }
};

// Joint law realized by d x d matrices under tr_d (non-free initial data).
class MatrixLaw : public JointLaw {
 public:
  explicit MatrixLaw(std::map<Gen, Eigen::MatrixXcd> mats);
  Complex moment(const std::vector<Gen> &w) const override;
  int num_algebras() const override;
  int num_generators(int i) const override;
  double norm_bound(int i, int j) const override;
  double centered_norm_bound(int i, int j) const override;
  const std::map<Gen, Eigen::MatrixXcd> &matrices() const { return mats_; }
  int dim() const { return dim_; }

 private:
  std::map<Gen, Eigen::MatrixXcd> mats_;
  std::map<Gen, double> norms_, centered_norms_;
  int dim_ = 0;
};

class FreeProductEngine;

// Free product of marginal laws; marginals[i-1] is the law of A_i.
class FreeProductLaw : public JointLaw {
 public:
  explicit FreeProductLaw(std::vector<MarginalLaw> marginals);
  ~FreeProductLaw() override;
  Complex moment(const std::vector<Gen> &w) const override;
  int num_algebras() const override { return int(marginals_.size()); }
  int num_generators(int i) const override;
  double norm_bound(int i, int j) const override;
  double centered_norm_bound(int i, int j) const override;
  bool is_free_product() const override { return true; }
  const std::vector<MarginalLaw> &marginals() const { return marginals_; }

 private:
  std::vector<MarginalLaw> marginals_;
  std::unique_ptr<FreeProductEngine> engine_;
  mutable std::mutex mu_;
};

// Restriction of a joint law to one algebra, viewed as a marginal (supported
// for MatrixLaw and FreeProductLaw).
MarginalLaw restrict_marginal(const JointLaw &law, int i);
// The free product of the marginals of law.
std::shared_ptr<JointLaw> free_product_of_marginals(const JointLaw &law);

Complex free_product_moment(const std::vector<MarginalLaw> &marginals, const Word &word);

// ---------------------------------------------------------------------------
// Mixed moments of the auxiliary free unitary Brownian motions v_i: the word
// may contain only V / V* letters; v_i for i > n_free is the identity.
Complex mixed_v_moment(const Word &word, int n_free);

class StateEngine;

// Tracial state on trajectory polynomials, evaluated exactly through the
// free-product structure. Extended states also accept V / V* letters, which
// are realized as free unitary Brownian motions free from everything else.
class TraceState {
 public:
  enum class Kind { Constant, Liberation };

  // x_ij(t) -> x_ij for all t (e.g. the free product of the marginals).
  static std::shared_ptr<TraceState> constant(std::shared_ptr<const JointLaw> law, int n_motions);
  static std::shared_ptr<TraceState> free_product(std::vector<MarginalLaw> marginals,
                                                  int n_motions);
  // x_ij(t) -> u_i(t) x_ij u_i(t)^* for i <= n_motions.
  static std::shared_ptr<TraceState> liberation(std::shared_ptr<const JointLaw> law,
                                                int n_motions);

  Kind kind() const { return kind_; }
  int n_motions() const { return n_; }
  const JointLaw &law() const { return *law_; }
  std::shared_ptr<const JointLaw> law_ptr() const { return law_; }
  bool is_extended() const { return extended_; }
  // Same state, with V letters admitted.
  std::shared_ptr<TraceState> extended() const;

  Complex evaluate(const Word &w) const;
  Complex evaluate(const NCPolynomial &p) const;
  // tau^s(P) = extended tau of Pi^s(P).
  Complex evaluate_shifted(const NCPolynomial &p, Time s) const;
  // tau(P^* P)
  double norm2_squared(const NCPolynomial &p) const;

  std::string describe() const;

 private:
  TraceState(Kind kind, std::shared_ptr<const JointLaw> law, int n);
  Kind kind_;
  std::shared_ptr<const JointLaw> law_;
  int n_;
  bool extended_ = false;
  std::shared_ptr<StateEngine> engine_;
};

// Conditional expectation of the cyclic liberation derivative onto the von
// Neumann algebra of tau, expressed as an X-polynomial via free cumulants and
// the Kreweras complement. Accepts X-monomials of length <= 6.
constexpr int kMaxCondExpLength = 6;
NCPolynomial conditional_expectation(const Word &word, int k, Time s, const TraceState &tau);
NCPolynomial conditional_expectation(const NCPolynomial &p, int k, Time s, const TraceState &tau);

// Bound check for alternating centered words under the liberation process.
struct BoundCheck {
  double lhs = 0;
  double rhs = 0;
};
// generators[k] = (i_k, j_k) with i_k != i_{k+1}; each element is centered
// with respect to sigma0 and the bound uses the largest centered norm.
BoundCheck alternating_decay_bound(std::shared_ptr<const JointLaw> sigma0, int n_motions,
                               const std::vector<Gen> &generators, Time T);

}  // namespace liblab

#endif
