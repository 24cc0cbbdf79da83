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

#include "liblab/freestate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "free_engine.hpp"
#include "liblab/error.hpp"
#include "liblab/ncpart.hpp"

namespace liblab {

using detail::FreeEngine;

// ---------------------------------------------------------------------------
// Free unitary Brownian motion moments.

namespace {

std::mutex ubm_mu;
std::map<double, std::vector<double>> ubm_cache;

// m_n' = -(n/2) m_n - (n/2) sum_{k=1}^{n-1} m_k m_{n-k},  m_n(0) = 1.
std::vector<double> integrate_ubm(int n_max, double t) {
  std::vector<double> m(std::size_t(n_max) + 1, 1.0);
  if (t == 0.0 || n_max == 0) return m;
  const double h_max = 2.5e-4;
  const long steps = std::max(1L, long(std::ceil(t / h_max)));
  const double h = t / double(steps);
  auto rhs = [n_max](const std::vector<double> &y, std::vector<double> &dy) {
    dy[0] = 0.0;
    for (int n = 1; n <= n_max; ++n) {
      double conv = 0.0;
      for (int k = 1; k < n; ++k) conv += y[k] * y[n - k];
      dy[n] = -0.5 * n * (y[n] + conv);
    }
  };
  std::size_t sz = m.size();
  std::vector<double> k1(sz), k2(sz), k3(sz), k4(sz), tmp(sz);
  for (long s = 0; s < steps; ++s) {
    rhs(m, k1);
    for (std::size_t q = 0; q < sz; ++q) tmp[q] = m[q] + 0.5 * h * k1[q];
    rhs(tmp, k2);
    for (std::size_t q = 0; q < sz; ++q) tmp[q] = m[q] + 0.5 * h * k2[q];
    rhs(tmp, k3);
    for (std::size_t q = 0; q < sz; ++q) tmp[q] = m[q] + h * k3[q];
    rhs(tmp, k4);
    for (std::size_t q = 0; q < sz; ++q) m[q] += h / 6.0 * (k1[q] + 2 * k2[q] + 2 * k3[q] + k4[q]);
  }
  return m;
}

}  // namespace

std::vector<double> free_ubm_moments(int n_max, double t) {
  if (n_max < 0) fail(ErrorCode::InvalidArgument, "negative moment order");
  if (!(t >= 0.0) || !std::isfinite(t)) fail(ErrorCode::DomainError, "UBM time must be >= 0");
  {
    std::lock_guard<std::mutex> lock(ubm_mu);
    auto it = ubm_cache.find(t);
    if (it != ubm_cache.end() && int(it->second.size()) > n_max)
      return std::vector<double>(it->second.begin(), it->second.begin() + n_max + 1);
  }
  int n_comp = std::max(n_max, 12);
  std::vector<double> m = integrate_ubm(n_comp, t);
  std::lock_guard<std::mutex> lock(ubm_mu);
  auto &slot = ubm_cache[t];
  if (slot.size() < m.size()) slot = m;
  return std::vector<double>(m.begin(), m.begin() + n_max + 1);
}

double free_ubm_moment(int n, double t) {
  n = std::abs(n);
  return free_ubm_moments(n, t)[std::size_t(n)];
}

// ---------------------------------------------------------------------------
// Marginal laws.

MarginalLaw MarginalLaw::atomic(std::vector<double> atoms, std::vector<double> weights) {
  if (atoms.empty() || atoms.size() != weights.size())
    fail(ErrorCode::InvalidArgument, "atomic law needs matching atoms and weights");
  std::vector<std::size_t> idx(atoms.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  std::sort(idx.begin(), idx.end(), [&](auto a, auto b) { return atoms[a] < atoms[b]; });
  MarginalLaw m;
  m.kind_ = Kind::Atomic;
  for (auto k : idx) {
    m.atoms_.push_back(atoms[k]);
    m.weights_.push_back(weights[k]);
  }
  m.validate();
  return m;
}

MarginalLaw MarginalLaw::semicircle(double mean, double variance) {
  if (!(variance > 0.0)) fail(ErrorCode::InvalidArgument, "semicircle variance must be positive");
  MarginalLaw m;
  m.kind_ = Kind::Semicircle;
  m.sc_mean_ = mean;
  m.sc_var_ = variance;
  return m;
}

MarginalLaw MarginalLaw::moment_sequence(std::vector<double> moments, double norm_bound) {
  MarginalLaw m;
  m.kind_ = Kind::Moments;
  m.moments_ = std::move(moments);
  m.bound_ = norm_bound;
  m.validate();
  return m;
}

MarginalLaw MarginalLaw::matrices(std::vector<Eigen::MatrixXcd> mats) {
  if (mats.empty()) fail(ErrorCode::InvalidArgument, "matrix law needs at least one generator");
  MarginalLaw m;
  m.kind_ = Kind::Matrices;
  m.mats_ = std::move(mats);
  m.validate();
  return m;
}

int MarginalLaw::num_generators() const {
  return kind_ == Kind::Matrices ? int(mats_.size()) : 1;
}

Complex MarginalLaw::moment(const std::vector<int> &js) const {
  for (int j : js)
    if (j < 1 || j > num_generators())
      fail(ErrorCode::UnsupportedWord, "generator index out of range in marginal moment");
  const int p = int(js.size());
  if (p == 0) return 1.0;
  switch (kind_) {
    case Kind::Atomic: {
      double s = 0;
      for (std::size_t k = 0; k < atoms_.size(); ++k) s += weights_[k] * std::pow(atoms_[k], p);
      return s;
    }
    case Kind::Semicircle: {
      // E[(a + sigma S)^p] with E[S^{2q}] = Catalan(q).
      double sigma = std::sqrt(sc_var_), s = 0, binom = 1;
      for (int k = 0; k <= p; ++k) {
        if (k > 0) binom = binom * double(p - k + 1) / double(k);
        if (k % 2) continue;
        s += binom * std::pow(sc_mean_, p - k) * std::pow(sigma, k) * double(catalan(k / 2));
      }
      return s;
    }
    case Kind::Moments:
      if (p >= int(moments_.size()))
        fail(ErrorCode::DegreeOverflow, "moment of order " + std::to_string(p) +
                                            " requested beyond the supplied sequence");
      return moments_[std::size_t(p)];
    case Kind::Matrices: {
      Eigen::MatrixXcd acc = mats_[std::size_t(js[0] - 1)];
      for (int k = 1; k < p; ++k) acc = acc * mats_[std::size_t(js[k] - 1)];
      return acc.trace() / double(acc.rows());
    }
  }
  return 0.0;
}

double MarginalLaw::norm_bound(int j) const {
  switch (kind_) {
    case Kind::Atomic: {
      double b = 0;
      for (double a : atoms_) b = std::max(b, std::abs(a));
      return b;
    }
    case Kind::Semicircle: return std::abs(sc_mean_) + 2.0 * std::sqrt(sc_var_);
    case Kind::Moments: return bound_;
    case Kind::Matrices: {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(mats_[std::size_t(j - 1)], Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
  }
  return 0;
}

double MarginalLaw::centered_norm_bound(int j) const {
  double mu = mean(j);
  switch (kind_) {
    case Kind::Atomic: {
      double b = 0;
      for (double a : atoms_) b = std::max(b, std::abs(a - mu));
      return b;
    }
    case Kind::Semicircle: return 2.0 * std::sqrt(sc_var_);
    case Kind::Moments: return bound_ + std::abs(mu);
    case Kind::Matrices: {
      const auto &M = mats_[std::size_t(j - 1)];
      Eigen::MatrixXcd C = M - mu * Eigen::MatrixXcd::Identity(M.rows(), M.cols());
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(C, Eigen::EigenvaluesOnly);
      return es.eigenvalues().cwiseAbs().maxCoeff();
    }
  }
  return 0;
}

double MarginalLaw::quantile(double q) const {
  if (!(q >= 0.0 && q <= 1.0)) fail(ErrorCode::DomainError, "quantile level outside [0,1]");
  if (kind_ == Kind::Atomic) {
    double c = 0;
    for (std::size_t k = 0; k < atoms_.size(); ++k) {
      c += weights_[k];
      if (q <= c + 1e-15) return atoms_[k];
    }
    return atoms_.back();
  }
  if (kind_ == Kind::Semicircle) {
    // Standard semicircle on [-2, 2]: F(x) = 1/2 + x sqrt(4-x^2)/(4 pi) + asin(x/2)/pi.
    auto cdf = [](double x) {
      return 0.5 + x * std::sqrt(std::max(0.0, 4.0 - x * x)) / (4.0 * std::numbers::pi) +
             std::asin(std::clamp(x / 2.0, -1.0, 1.0)) / std::numbers::pi;
    };
    double lo = -2.0, hi = 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
      double mid = 0.5 * (lo + hi);
      (cdf(mid) < q ? lo : hi) = mid;
    }
    return sc_mean_ + std::sqrt(sc_var_) * 0.5 * (lo + hi);
  }
  fail(ErrorCode::IncompatibleN, "law has no quantile representation");
}

void MarginalLaw::validate() const {
  switch (kind_) {
    case Kind::Atomic: {
      double s = 0;
      for (double w : weights_) {
        if (!(w >= 0.0)) fail(ErrorCode::InvalidArgument, "negative atom weight");
        s += w;
      }
      if (std::abs(s - 1.0) > 1e-12) fail(ErrorCode::InvalidArgument, "atom weights must sum to 1");
      return;
    }
    case Kind::Semicircle: return;
    case Kind::Moments: {
      if (moments_.empty() || std::abs(moments_[0] - 1.0) > 1e-12)
        fail(ErrorCode::InvalidArgument, "moment sequence must start with 1");
      int h = int(moments_.size() - 1) / 2 + 1;
      Eigen::MatrixXd H(h, h);
      for (int a = 0; a < h; ++a)
        for (int b = 0; b < h; ++b) H(a, b) = moments_[std::size_t(a + b)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -1e-10 * std::max(1.0, H.norm()))
        fail(ErrorCode::InvalidArgument, "moment sequence is not positive (Hankel test)");
      return;
    }
    case Kind::Matrices: {
      Eigen::Index d = mats_[0].rows();
      for (const auto &M : mats_) {
        if (M.rows() != d || M.cols() != d)
          fail(ErrorCode::InvalidArgument, "matrix generators must share one square size");
        if ((M - M.adjoint()).norm() > 1e-10 * std::max(1.0, M.norm()))
          fail(ErrorCode::InvalidArgument, "matrix generators must be Hermitian");
      }
      return;
    }
  }
}

// ---------------------------------------------------------------------------
// Joint laws.

MatrixLaw::MatrixLaw(std::map<Gen, Eigen::MatrixXcd> mats) : mats_(std::move(mats)) {
  if (mats_.empty()) fail(ErrorCode::InvalidArgument, "matrix law needs generators");
  dim_ = int(mats_.begin()->second.rows());
  for (const auto &[g, M] : mats_) {
    if (M.rows() != dim_ || M.cols() != dim_)
      fail(ErrorCode::InvalidArgument, "matrix law generators must share one square size");
    if ((M - M.adjoint()).norm() > 1e-10 * std::max(1.0, M.norm()))
      fail(ErrorCode::InvalidArgument, "matrix law generators must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M, Eigen::EigenvaluesOnly);
    norms_[g] = es.eigenvalues().cwiseAbs().maxCoeff();
    double mu = (M.trace() / double(dim_)).real();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> ec(
        M - mu * Eigen::MatrixXcd::Identity(dim_, dim_), Eigen::EigenvaluesOnly);
    centered_norms_[g] = ec.eigenvalues().cwiseAbs().maxCoeff();
  }
}

Complex MatrixLaw::moment(const std::vector<Gen> &w) const {
  if (w.empty()) return 1.0;
  auto get = [&](const Gen &g) -> const Eigen::MatrixXcd & {
    auto it = mats_.find(g);
    if (it == mats_.end())
      fail(ErrorCode::UnsupportedWord, "unknown generator x_" + std::to_string(g.i) + "," +
                                           std::to_string(g.j));
    return it->second;
  };
  Eigen::MatrixXcd acc = get(w[0]);
  for (std::size_t k = 1; k < w.size(); ++k) acc = acc * get(w[k]);
  return acc.trace() / double(dim_);
}

int MatrixLaw::num_algebras() const {
  int m = 0;
  for (const auto &[g, M] : mats_) m = std::max(m, g.i);
  return m;
}

int MatrixLaw::num_generators(int i) const {
  int m = 0;
  for (const auto &[g, M] : mats_)
    if (g.i == i) m = std::max(m, g.j);
  return m;
}

double MatrixLaw::norm_bound(int i, int j) const {
  auto it = norms_.find({i, j});
  if (it == norms_.end()) fail(ErrorCode::InvalidArgument, "unknown generator");
  return it->second;
}

double MatrixLaw::centered_norm_bound(int i, int j) const {
  auto it = centered_norms_.find({i, j});
  if (it == centered_norms_.end()) fail(ErrorCode::InvalidArgument, "unknown generator");
  return it->second;
}

namespace {

struct GenL {
  int i, j;
  std::size_t hash() const { return std::size_t(i) * 131u + std::size_t(j); }
  friend bool operator==(const GenL &, const GenL &) = default;
  friend auto operator<=>(const GenL &, const GenL &) = default;
};

}  // namespace

class FreeProductEngine {
 public:
  explicit FreeProductEngine(const std::vector<MarginalLaw> &m)
      : engine_([](const GenL &g) { return g.i; },
                [&m](int c, const std::vector<GenL> &w) {
                  std::vector<int> js;
                  js.reserve(w.size());
                  for (const auto &g : w) js.push_back(g.j);
                  return m[std::size_t(c - 1)].moment(js);
                }) {}
  Complex evaluate(const std::vector<GenL> &w) { return engine_.evaluate(w); }

 private:
  FreeEngine<GenL> engine_;
};

FreeProductLaw::FreeProductLaw(std::vector<MarginalLaw> marginals)
    : marginals_(std::move(marginals)) {
  if (marginals_.empty()) fail(ErrorCode::InvalidArgument, "free product needs marginals");
  engine_ = std::make_unique<FreeProductEngine>(marginals_);
}

FreeProductLaw::~FreeProductLaw() = default;

Complex FreeProductLaw::moment(const std::vector<Gen> &w) const {
  std::vector<GenL> l;
  l.reserve(w.size());
  for (const Gen &g : w) {
    if (g.i < 1 || g.i > num_algebras() || g.j < 1 || g.j > num_generators(g.i))
      fail(ErrorCode::UnsupportedWord, "unknown generator x_" + std::to_string(g.i) + "," +
                                           std::to_string(g.j));
    l.push_back({g.i, g.j});
  }
  std::lock_guard<std::mutex> lock(mu_);
  return engine_->evaluate(l);
}

int FreeProductLaw::num_generators(int i) const {
  if (i < 1 || i > num_algebras()) return 0;
  return marginals_[std::size_t(i - 1)].num_generators();
}

double FreeProductLaw::norm_bound(int i, int j) const {
  return marginals_.at(std::size_t(i - 1)).norm_bound(j);
}

double FreeProductLaw::centered_norm_bound(int i, int j) const {
  return marginals_.at(std::size_t(i - 1)).centered_norm_bound(j);
}

MarginalLaw restrict_marginal(const JointLaw &law, int i) {
  if (auto fp = dynamic_cast<const FreeProductLaw *>(&law))
    return fp->marginals().at(std::size_t(i - 1));
  if (auto ml = dynamic_cast<const MatrixLaw *>(&law)) {
    std::vector<Eigen::MatrixXcd> mats;
    for (int j = 1; j <= ml->num_generators(i); ++j) mats.push_back(ml->matrices().at({i, j}));
    if (mats.empty()) fail(ErrorCode::InvalidArgument, "algebra has no generators");
    return MarginalLaw::matrices(std::move(mats));
  }
  fail(ErrorCode::UnsupportedState, "cannot restrict this law to a marginal");
}

std::shared_ptr<JointLaw> free_product_of_marginals(const JointLaw &law) {
  std::vector<MarginalLaw> m;
  for (int i = 1; i <= law.num_algebras(); ++i) m.push_back(restrict_marginal(law, i));
  return std::make_shared<FreeProductLaw>(std::move(m));
}

Complex free_product_moment(const std::vector<MarginalLaw> &marginals, const Word &word) {
  FreeProductLaw law(marginals);
  std::vector<Gen> g;
  for (const Letter &l : word) {
    if (!l.is_x()) fail(ErrorCode::UnsupportedWord, "free product moment of a V letter");
    g.push_back({l.i, l.j});
  }
  return law.moment(g);
}

// ---------------------------------------------------------------------------
// Unitary Brownian motions: several *-free families, each evaluated through
// its free right increments u(t_k) = g_1 ... g_k.

namespace {

struct MLetter {
  int fam;  // 0: the liberating motions u_i, 1: the auxiliary motions v_i
  int i;
  Time t;
  bool adj;
  std::size_t hash() const {
    return std::hash<Time>()(t) * 31u + std::size_t(fam * 1024 + i) * 2u + (adj ? 1u : 0u);
  }
  bool inverse_of(const MLetter &o) const {
    return fam == o.fam && i == o.i && t == o.t && adj != o.adj;
  }
  friend bool operator==(const MLetter &, const MLetter &) = default;
  friend auto operator<=>(const MLetter &, const MLetter &) = default;
};

struct IncL {
  int a;
  Time delta;
  bool adj;
  std::size_t hash() const { return std::hash<Time>()(delta) * 31u + std::size_t(a) * 2u + adj; }
  friend bool operator==(const IncL &, const IncL &) = default;
  friend auto operator<=>(const IncL &, const IncL &) = default;
};

template <class L, class Inv>
std::vector<L> free_reduce(const std::vector<L> &w, Inv inverse, bool cyclic) {
  std::vector<L> out;
  out.reserve(w.size());
  for (const L &l : w) {
    if (!out.empty() && inverse(out.back(), l)) out.pop_back();
    else out.push_back(l);
  }
  if (cyclic) {
    std::size_t a = 0, b = out.size();
    while (b - a >= 2 && inverse(out[b - 1], out[a])) {
      ++a;
      --b;
    }
    if (a > 0) return std::vector<L>(out.begin() + std::ptrdiff_t(a), out.begin() + std::ptrdiff_t(b));
  }
  return out;
}

class MotionAlgebra {
 public:
  MotionAlgebra()
      : outer_([](const MLetter &l) { return l.fam * 4096 + l.i; },
               [this](int, const std::vector<MLetter> &w) { return single(w); }),
        inc_([](const IncL &l) { return l.a; },
             [](int, const std::vector<IncL> &w) {
               int e = 0;
               for (const auto &l : w) e += l.adj ? -1 : 1;
               return Complex(free_ubm_moment(e, w.front().delta.to_double()));
             }) {}

  Complex evaluate(const std::vector<MLetter> &w) {
    auto r = reduce(w);
    return outer_.evaluate(r);
  }

  static std::vector<MLetter> reduce(const std::vector<MLetter> &w) {
    std::vector<MLetter> nz;
    nz.reserve(w.size());
    for (const auto &l : w)
      if (!l.t.is_zero()) nz.push_back(l);
    return free_reduce(nz, [](const MLetter &a, const MLetter &b) { return a.inverse_of(b); }, true);
  }

 private:
  // Trace of a word in a single motion.
  Complex single(const std::vector<MLetter> &w0) {
    std::vector<MLetter> w = reduce(w0);
    if (w.empty()) return 1.0;
    bool one_time = true;
    for (const auto &l : w)
      if (l.t != w[0].t) one_time = false;
    if (one_time) {
      int e = 0;
      for (const auto &l : w) e += l.adj ? -1 : 1;
      return free_ubm_moment(e, w[0].t.to_double());
    }
    std::vector<Time> times;
    for (const auto &l : w) times.push_back(l.t);
    std::sort(times.begin(), times.end());
    times.erase(std::unique(times.begin(), times.end()), times.end());
    std::vector<Time> delta(times.size());
    for (std::size_t a = 0; a < times.size(); ++a) delta[a] = a ? times[a] - times[a - 1] : times[a];
    std::vector<IncL> inc;
    for (const auto &l : w) {
      int k = int(std::lower_bound(times.begin(), times.end(), l.t) - times.begin());
      if (!l.adj)
        for (int a = 0; a <= k; ++a) inc.push_back({a, delta[std::size_t(a)], false});
      else
        for (int a = k; a >= 0; --a) inc.push_back({a, delta[std::size_t(a)], true});
    }
    inc = free_reduce(
        inc, [](const IncL &x, const IncL &y) { return x.a == y.a && x.adj != y.adj; }, true);
    return inc_.evaluate(inc);
  }

  FreeEngine<MLetter> outer_;
  FreeEngine<IncL> inc_;
};

std::mutex vmu;

}  // namespace

Complex mixed_v_moment(const Word &word, int n_free) {
  static MotionAlgebra algebra;
  std::vector<MLetter> w;
  for (const Letter &l : word) {
    if (l.is_x()) fail(ErrorCode::UnsupportedWord, "mixed_v_moment accepts only V letters");
    if (l.t < Time(0)) fail(ErrorCode::DomainError, "negative time");
    if (l.i < 1) fail(ErrorCode::UnsupportedWord, "motion index must be positive");
    if (l.i > n_free) continue;
    w.push_back({1, l.i, l.t, l.kind == LetterKind::VStar});
  }
  std::lock_guard<std::mutex> lock(vmu);
  return algebra.evaluate(w);
}

// ---------------------------------------------------------------------------
// Trace states.

namespace {

struct Atom {
  bool base;
  int i, j;  // generator for base atoms, motion index otherwise
  int fam;
  Time t;
  bool adj;
  std::size_t hash() const {
    return base ? std::size_t(i) * 131u + std::size_t(j) + 0x5bd1e995u
                : std::hash<Time>()(t) * 31u + std::size_t(fam * 1024 + i) * 2u + adj;
  }
  MLetter motion() const { return {fam, i, t, adj}; }
  friend bool operator==(const Atom &, const Atom &) = default;
  friend auto operator<=>(const Atom &, const Atom &) = default;
};

}  // namespace

class StateEngine {
 public:
  explicit StateEngine(std::shared_ptr<const JointLaw> law)
      : law_(std::move(law)),
        top_([](const Atom &a) { return a.base ? 0 : 1; },
             [this](int c, const std::vector<Atom> &w) -> Complex {
               if (c == 0) {
                 std::vector<Gen> g;
                 g.reserve(w.size());
                 for (const auto &a : w) g.push_back({a.i, a.j});
                 return law_->moment(g);
               }
               std::vector<MLetter> m;
               m.reserve(w.size());
               for (const auto &a : w) m.push_back(a.motion());
               return motions_.evaluate(m);
             }) {}

  Complex evaluate(const std::vector<Atom> &w) {
    std::lock_guard<std::mutex> lock(mu_);
    std::vector<Atom> r = free_reduce(
        w,
        [](const Atom &a, const Atom &b) {
          return !a.base && !b.base && a.motion().inverse_of(b.motion());
        },
        true);
    return top_.evaluate(r);
  }

 private:
  std::shared_ptr<const JointLaw> law_;
  MotionAlgebra motions_;
  FreeEngine<Atom> top_;
  std::mutex mu_;
};

TraceState::TraceState(Kind kind, std::shared_ptr<const JointLaw> law, int n)
    : kind_(kind), law_(std::move(law)), n_(n) {
  if (!law_) fail(ErrorCode::InvalidArgument, "state needs a law");
  if (n_ < 0) fail(ErrorCode::InvalidArgument, "negative number of motions");
  if (n_ + 1 < law_->num_algebras())
    fail(ErrorCode::InvalidArgument, "law has more than n+1 algebras");
  engine_ = std::make_shared<StateEngine>(law_);
}

std::shared_ptr<TraceState> TraceState::constant(std::shared_ptr<const JointLaw> law, int n) {
  return std::shared_ptr<TraceState>(new TraceState(Kind::Constant, std::move(law), n));
}

std::shared_ptr<TraceState> TraceState::free_product(std::vector<MarginalLaw> marginals, int n) {
  return constant(std::make_shared<FreeProductLaw>(std::move(marginals)), n);
}

std::shared_ptr<TraceState> TraceState::liberation(std::shared_ptr<const JointLaw> law, int n) {
  return std::shared_ptr<TraceState>(new TraceState(Kind::Liberation, std::move(law), n));
}

std::shared_ptr<TraceState> TraceState::extended() const {
  auto s = std::shared_ptr<TraceState>(new TraceState(*this));
  s->extended_ = true;
  return s;
}

Complex TraceState::evaluate(const Word &w) const {
  std::vector<Atom> atoms;
  atoms.reserve(3 * w.size());
  for (const Letter &l : w) {
    if (l.t < Time(0)) fail(ErrorCode::DomainError, "negative time in word");
    if (l.is_x()) {
      if (l.i < 1 || l.i > law_->num_algebras() || l.j < 1 || l.j > law_->num_generators(l.i))
        fail(ErrorCode::UnsupportedWord, "letter " + l.str() + " is not a generator of the state");
      bool conj = kind_ == Kind::Liberation && l.i <= n_ && !l.t.is_zero();
      if (conj) atoms.push_back({false, l.i, 0, 0, l.t, false});
      atoms.push_back({true, l.i, l.j, 0, Time(0), false});
      if (conj) atoms.push_back({false, l.i, 0, 0, l.t, true});
    } else {
      if (!extended_)
        fail(ErrorCode::UnsupportedWord, "V letters need the extended state");
      if (l.i < 1) fail(ErrorCode::UnsupportedWord, "motion index must be positive");
      if (l.i > n_ || l.t.is_zero()) continue;
      atoms.push_back({false, l.i, 0, 1, l.t, l.kind == LetterKind::VStar});
    }
  }
  return engine_->evaluate(atoms);
}

Complex TraceState::evaluate(const NCPolynomial &p) const {
  Complex s = 0.0;
  for (const auto &[w, c] : p.terms()) s += c * evaluate(w);
  return s;
}

Complex TraceState::evaluate_shifted(const NCPolynomial &p, Time s) const {
  return extended()->evaluate(pi_s_substitution(p, s, n_));
}

double TraceState::norm2_squared(const NCPolynomial &p) const {
  std::vector<std::pair<Word, Complex>> terms(p.terms().begin(), p.terms().end());
  double total = 0.0;
  for (std::size_t a = 0; a < terms.size(); ++a) {
    Word wa = adjoint(terms[a].first);
    for (std::size_t b = a; b < terms.size(); ++b) {
      Complex g = evaluate(concat(wa, terms[b].first));
      Complex v = std::conj(terms[a].second) * terms[b].second * g;
      total += a == b ? v.real() : 2.0 * v.real();
    }
  }
  return total;
}

std::string TraceState::describe() const {
  std::string s = kind_ == Kind::Liberation ? "liberation" : "constant";
  s += "(n=" + std::to_string(n_) + (law_->is_free_product() ? ",free" : "") + ")";
  if (extended_) s += "~";
  return s;
}

// ---------------------------------------------------------------------------
// Conditional expectation of the cyclic liberation derivative.

NCPolynomial conditional_expectation(const Word &word, int k, Time s, const TraceState &tau) {
  const int n = int(word.size());
  const int N = tau.n_motions();
  if (k < 1 || k > N) fail(ErrorCode::InvalidArgument, "derivative direction outside 1..n");
  if (!is_x_word(word)) fail(ErrorCode::NonXPolynomial, "conditional expectation of a V word");
  if (n > kMaxCondExpLength)
    fail(ErrorCode::SizeLimit, "conditional expectation limited to words of length <= 6");
  NCPolynomial out;
  if (n == 0) return out;

  std::vector<Time> d(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) d[l] = positive_part_diff(word[l].t, s);
  // w_l = v_{i_{l-1}}(d_{l-1})^* v_{i_l}(d_l), indices cyclic.
  std::vector<Word> w(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    int pl = (l + n - 1) % n;
    if (word[pl].i <= N) w[l].push_back(Letter::vstar(word[pl].i, d[pl]));
    if (word[l].i <= N) w[l].push_back(Letter::v(word[l].i, d[l]));
  }
  CumulantCalculator calc([&](const std::vector<int> &ids) {
    Word cat;
    for (int id : ids) cat.insert(cat.end(), w[id].begin(), w[id].end());
    return mixed_v_moment(cat, N);
  });
  std::vector<Letter> a(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) {
    const Letter &x = word[l];
    a[l] = Letter::x(x.i, x.j, x.i <= N ? tmin(s, x.t) : x.t);
  }
  std::map<std::vector<int>, Complex> tau_block;
  auto block_word = [&](const std::vector<int> &b) {
    Word bw;
    for (int l : b) bw.push_back(a[l]);
    return bw;
  };
  auto tau_of = [&](const std::vector<int> &b) {
    auto it = tau_block.find(b);
    if (it != tau_block.end()) return it->second;
    Complex v = tau.evaluate(block_word(b));
    tau_block.emplace(b, v);
    return v;
  };
  std::vector<int> ids(static_cast<std::size_t>(n));
  for (int l = 0; l < n; ++l) ids[l] = l;

  for_each_nc(n, [&](const SetPartition &pi) {
    Complex kappa = calc.partition_cumulant(pi, ids);
    if (kappa == Complex(0)) return;
    auto blocks = kreweras(pi).blocks();
    NCPolynomial C;
    for (std::size_t p = 0; p < blocks.size(); ++p) {
      Complex coef = 1.0;
      for (std::size_t q = 0; q < blocks.size() && coef != Complex(0); ++q)
        if (q != p) coef *= tau_of(blocks[q]);
      C.add_term(block_word(blocks[p]), coef);
    }
    out += kappa * cyclic_derivative(C, k, s);
  });
  return out;
}

NCPolynomial conditional_expectation(const NCPolynomial &p, int k, Time s, const TraceState &tau) {
  NCPolynomial out;
  for (const auto &[w, c] : p.terms()) {
    if (w.empty()) continue;
    out += c * conditional_expectation(w, k, s, tau);
  }
  return out;
}

BoundCheck alternating_decay_bound(std::shared_ptr<const JointLaw> sigma0, int n_motions,
                               const std::vector<Gen> &generators, Time T) {
  const int m = int(generators.size());
  if (m < 1) fail(ErrorCode::InvalidArgument, "bound check needs at least one element");
  for (int k = 0; k + 1 < m; ++k)
    if (generators[k].i == generators[k + 1].i)
      fail(ErrorCode::InvalidArgument, "consecutive elements must come from different algebras");
  NCPolynomial P(Complex(1.0));
  double sup = 0;
  for (const Gen &g : generators) {
    double mu = sigma0->mean(g.i, g.j);
    P = P * (NCPolynomial::x(g.i, g.j, T) - NCPolynomial(Complex(mu)));
    sup = std::max(sup, sigma0->centered_norm_bound(g.i, g.j));
  }
  auto state = TraceState::liberation(sigma0, n_motions);
  BoundCheck r;
  r.lhs = std::abs(state->evaluate(P));
  r.rhs = (std::pow(2.0, m - 1) - 1.0) * std::pow(sup, m) * std::exp(-0.5 * T.to_double());
  return r;
}

}  // namespace liblab
