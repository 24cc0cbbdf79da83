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

#include "liblab/ratefn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include "liblab/error.hpp"
#include "liblab/parallel.hpp"

namespace liblab {

EmpiricalDistribution::EmpiricalDistribution(InitialFamily family,
                                             std::shared_ptr<const UnitaryTrajectory> traj)
    : family_(std::move(family)), traj_(std::move(traj)) {
  if (!traj_) fail(ErrorCode::InvalidArgument, "empirical distribution needs a trajectory");
  if (traj_->N() != family_.N) fail(ErrorCode::IncompatibleN, "trajectory and family sizes differ");
  if (traj_->n_motions() != family_.n_motions)
    fail(ErrorCode::InvalidArgument, "trajectory and family disagree on the number of motions");
}

const Eigen::MatrixXcd &EmpiricalDistribution::conjugated(const Letter &l) const {
  auto key = std::make_tuple(l.i, l.j, l.t);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  const Eigen::MatrixXcd &x = family_.at(l.i, l.j);
  Eigen::MatrixXcd c;
  if (l.i <= family_.n_motions) {
    const Eigen::MatrixXcd &U = traj_->U(l.i, l.t);
    c = U * x * U.adjoint();
  } else {
    c = x;
  }
  return cache_.emplace(key, std::move(c)).first->second;
}

Complex EmpiricalDistribution::evaluate(const Word &w) const {
  std::lock_guard<std::mutex> lock(mu_);
  const int N = family_.N;
  if (w.empty()) return 1.0;
  for (const Letter &l : w)
    if (!l.is_x()) fail(ErrorCode::UnsupportedWord, "empirical distributions take X words only");
  if (w.size() == 1) return conjugated(w[0]).trace() / double(N);
  Eigen::MatrixXcd acc = conjugated(w[0]);
  for (std::size_t k = 1; k + 1 < w.size(); ++k) acc = acc * conjugated(w[k]);
  // tr(A B) without forming the last product.
  const Eigen::MatrixXcd &last = conjugated(w.back());
  return (acc.array() * last.transpose().array()).sum() / double(N);
}

double trajectory_metric_d(const TrajectoryDistribution &a, const TrajectoryDistribution &b,
                           const MetricSpec &spec) {
  if (spec.m_max < 1 || spec.l_max < 1) fail(ErrorCode::InvalidArgument, "metric truncation must be >= 1");
  if (a.n_motions() != b.n_motions())
    fail(ErrorCode::InvalidArgument, "distributions disagree on the number of motions");
  std::vector<Time> grid;
  for (const Time &t : spec.grid)
    if (t >= Time(0) && t <= Time(spec.m_max)) grid.push_back(t);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  if (grid.empty()) fail(ErrorCode::InvalidArgument, "metric grid has no point in [0, m_max]");

  struct Sym {
    int i, j;
  };
  std::vector<Sym> syms;
  int nalg = std::min(a.num_algebras(), b.num_algebras());
  for (int i = 1; i <= nalg; ++i) {
    int r = std::min({a.num_generators(i), b.num_generators(i), spec.l_max});
    for (int j = 1; j <= r; ++j) syms.push_back({i, j});
  }
  // best[len][maxj][level] with level = smallest m such that all times <= m
  const int L = spec.l_max, M = spec.m_max;
  std::vector<double> best(std::size_t((L + 1) * (L + 1) * (M + 1)), 0.0);
  auto slot = [&](int len, int mj, int lev) -> double & {
    return best[std::size_t((len * (L + 1) + mj) * (M + 1) + lev)];
  };
  const int S = int(syms.size()), G = int(grid.size());
  for (int len = 1; len <= L; ++len) {
    std::vector<int> idx(static_cast<std::size_t>(2 * len), 0);
    while (true) {
      Word w;
      int mj = 0;
      Time tmax(0);
      for (int p = 0; p < len; ++p) {
        const Sym &s = syms[std::size_t(idx[std::size_t(2 * p)])];
        const Time &t = grid[std::size_t(idx[std::size_t(2 * p + 1)])];
        w.push_back(Letter::x(s.i, s.j, t));
        mj = std::max(mj, s.j);
        tmax = tmax < t ? t : tmax;
      }
      int lev = 1;
      while (Time(lev) < tmax) ++lev;
      double d = std::min(std::abs(a.evaluate(w) - b.evaluate(w)), 1.0);
      double &cell = slot(len, mj, lev);
      cell = std::max(cell, d);
      int p = 0;
      for (; p < 2 * len; ++p) {
        int lim = p % 2 == 0 ? S : G;
        if (++idx[std::size_t(p)] < lim) break;
        idx[std::size_t(p)] = 0;
      }
      if (p == 2 * len) break;
    }
  }
  double d = 0;
  for (int m = 1; m <= M; ++m)
    for (int l = 1; l <= L; ++l) {
      double mx = 0;
      for (int len = 1; len <= l; ++len)
        for (int mj = 1; mj <= l; ++mj)
          for (int lev = 1; lev <= m; ++lev) mx = std::max(mx, slot(len, mj, lev));
      d += std::ldexp(mx, -m - l);
    }
  return d;
}

std::vector<std::vector<Gen>> neighborhood_words(const std::vector<int> &generators_per_algebra,
                                                 int m) {
  std::vector<Gen> letters;
  for (std::size_t i = 0; i < generators_per_algebra.size(); ++i)
    for (int j = 1; j <= std::min(m, generators_per_algebra[i]); ++j)
      letters.push_back({int(i) + 1, j});
  std::vector<std::vector<Gen>> out;
  std::vector<std::vector<Gen>> layer{{}};
  for (int len = 1; len <= m; ++len) {
    std::vector<std::vector<Gen>> next;
    for (const auto &w : layer)
      for (const Gen &g : letters) {
        auto nw = w;
        nw.push_back(g);
        next.push_back(nw);
      }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

double neighborhood_distance(const StaticEvaluator &a, const StaticEvaluator &b,
                             const std::vector<std::vector<Gen>> &words) {
  double d = 0;
  for (const auto &w : words) d = std::max(d, std::abs(a(w) - b(w)));
  return d;
}

bool neighborhood_member(const StaticEvaluator &candidate, const StaticEvaluator &center,
                         const std::vector<std::vector<Gen>> &words, double delta, bool closed) {
  for (const auto &w : words) {
    double d = std::abs(candidate(w) - center(w));
    if (closed ? d > delta : d >= delta) return false;
  }
  return true;
}

std::string LogValue::str() const {
  if (neg_inf) return "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

ChiOrbResult chi_orb_mc(const StaticEvaluator &target, const InitialFamily &family,
                        const NeighborhoodSpec &spec, int samples, std::uint64_t seed) {
  if (samples < 1) fail(ErrorCode::InvalidArgument, "need at least one sample");
  if (spec.m < 1 || !(spec.delta > 0)) fail(ErrorCode::InvalidArgument, "bad neighbourhood");
  std::vector<int> gens;
  for (int i = 1; i <= family.num_algebras(); ++i) gens.push_back(family.num_generators(i));
  auto words = neighborhood_words(gens, spec.m);
  std::vector<Complex> center;
  for (const auto &w : words) center.push_back(target(w));

  std::vector<char> hit(static_cast<std::size_t>(samples), 0);
  parallel_for(samples, [&](int s) {
    RandomEngine rng(path_seed(seed, std::uint64_t(s)));
    std::vector<Eigen::MatrixXcd> U;
    for (int i = 0; i < family.n_motions; ++i) U.push_back(sample_haar(family.N, rng));
    // rotated generators, then traces of products
    std::map<Gen, Eigen::MatrixXcd> rot;
    for (const auto &[g, x] : family.xi)
      rot[g] = g.i <= family.n_motions ? Eigen::MatrixXcd(U[std::size_t(g.i - 1)] * x *
                                                          U[std::size_t(g.i - 1)].adjoint())
                                       : x;
    bool in = true;
    for (std::size_t k = 0; k < words.size() && in; ++k) {
      Eigen::MatrixXcd acc = rot.at(words[k][0]);
      for (std::size_t p = 1; p < words[k].size(); ++p) acc = acc * rot.at(words[k][p]);
      Complex v = acc.trace() / double(family.N);
      if (std::abs(v - center[k]) >= spec.delta) in = false;
    }
    hit[std::size_t(s)] = in;
  });
  ChiOrbResult r;
  r.N = family.N;
  r.samples = samples;
  for (char h : hit) r.hits += h;
  if (r.hits == 0) {
    r.log_fraction.neg_inf = r.normalized.neg_inf = true;
  } else {
    r.log_fraction.value = std::log(double(r.hits) / samples);
    r.normalized.value = r.log_fraction.value / (double(family.N) * family.N);
  }
  return r;
}

// ---------------------------------------------------------------------------

namespace {

struct GaussRule {
  std::vector<double> x, w;
};

const GaussRule &gauss_legendre(int n) {
  static std::mutex mu;
  static std::map<int, GaussRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  if (auto it = cache.find(n); it != cache.end()) return it->second;
  GaussRule r;
  r.x.resize(std::size_t(n));
  r.w.resize(std::size_t(n));
  for (int k = 0; k < n; ++k) {
    double x = std::cos(std::numbers::pi * (k + 0.75) / (n + 0.5));
    double dp = 0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1, p1 = x;
      for (int q = 2; q <= n; ++q) {
        double p2 = ((2 * q - 1) * x * p1 - (q - 1) * p0) / q;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    r.x[std::size_t(k)] = x;
    r.w[std::size_t(k)] = 2.0 / ((1 - x * x) * dp * dp);
  }
  return cache.emplace(n, std::move(r)).first->second;
}

}  // namespace

double cond_exp_norm2(const TraceState &tau, const NCPolynomial &P, int k, Time s) {
  NCPolynomial E = conditional_expectation(P, k, s, tau);
  return tau.norm2_squared(E);
}

RateResult rate_functional(const TrajectoryDistribution &tau, const TraceState &sigma0_lib,
                           const NCPolynomial &P, Time t, const RateOptions &opt) {
  const TraceState *st = tau.oracle();
  if (!st) fail(ErrorCode::UnsupportedState, "the rate functional needs an exactly computable state");
  if (!P.is_x_polynomial()) fail(ErrorCode::NonXPolynomial, "rate functional of a non-X polynomial");
  if (t < Time(0)) fail(ErrorCode::DomainError, "negative time");
  if (P.degree() > 4) fail(ErrorCode::SizeLimit, "rate functional limited to degree <= 4");
  RateResult r;
  r.tau_t = st->evaluate_shifted(P, t);
  r.sigma_lib = sigma0_lib.evaluate(P);

  // The integrand vanishes once s exceeds every letter time and jumps at
  // each letter time, so integrate piecewise on the open segments.
  std::set<Time> cuts{Time(0)};
  Time tmax(0);
  for (const Time &x : P.times()) {
    tmax = tmax < x ? x : tmax;
    if (x > Time(0) && x < t) cuts.insert(x);
  }
  Time upper = tmin(t, tmax);
  cuts.insert(upper);
  std::vector<Time> pts(cuts.begin(), cuts.end());
  while (!pts.empty() && pts.back() > upper) pts.pop_back();

  const int n = st->n_motions();
  r.integral_per_k.assign(std::size_t(n), 0.0);
  for (int k = 1; k <= n; ++k) {
    double total = 0;
    for (std::size_t seg = 0; seg + 1 < pts.size(); ++seg) {
      double a = pts[seg].to_double(), b = pts[seg + 1].to_double();
      if (!(b > a)) continue;
      auto f = [&](double s) {
        ++r.evaluations;
        // Rational nodes keep all time arithmetic exact.
        Time ts(std::llround(s * 1e12), 1000000000000LL);
        return cond_exp_norm2(*st, P, k, ts);
      };
      double prev = std::numeric_limits<double>::quiet_NaN(), cur = 0;
      for (int order = 4; order <= opt.max_order; order *= 2) {
        const GaussRule &g = gauss_legendre(order);
        cur = 0;
        for (int q = 0; q < order; ++q)
          cur += g.w[std::size_t(q)] * f(0.5 * (b - a) * g.x[std::size_t(q)] + 0.5 * (a + b));
        cur *= 0.5 * (b - a);
        if (std::abs(cur - prev) <= opt.tol * std::max(1.0, std::abs(cur))) break;
        prev = cur;
      }
      total += cur;
    }
    r.integral_per_k[std::size_t(k - 1)] = total;
    r.integral += total;
  }
  r.value = (r.tau_t - r.sigma_lib).real() - 0.5 * r.integral;
  return r;
}

std::vector<NCPolynomial> standard_test_polynomials() {
  static const char *texts[] = {
      "X[1,1;1/2]",
      "X[2,1;1]",
      "X[1,1;1]X[1,1;1]",
      "X[1,1;1/2]X[2,1;1] + X[2,1;1]X[1,1;1/2]",
      "X[1,1;1]X[2,1;1] + X[2,1;1]X[1,1;1]",
      "(0,1)*X[1,1;1]X[2,1;1] + (0,-1)*X[2,1;1]X[1,1;1]",
      "X[1,1;1/2]X[1,1;3/2] + X[1,1;3/2]X[1,1;1/2]",
      "X[1,1;1]X[2,1;1]X[1,1;1]",
      "X[2,1;1/2]X[1,1;1]X[2,1;1/2]",
      "X[1,1;1]X[2,1;1]X[1,1;1]X[2,1;1] + X[2,1;1]X[1,1;1]X[2,1;1]X[1,1;1]",
      "X[1,1;2]X[2,1;1]X[1,1;2]",
      "X[1,1;1/2]X[2,1;1/2]X[1,1;2]X[2,1;2] + X[2,1;2]X[1,1;2]X[2,1;1/2]X[1,1;1/2]",
      "-1*X[1,1;1]X[2,1;1] - X[2,1;1]X[1,1;1]",
      "X[1,1;1/2] + X[2,1;1/2] + X[1,1;1/2]X[2,1;1/2] + X[2,1;1/2]X[1,1;1/2]",
      "X[1,1;1]X[1,1;2]X[1,1;1]",
      "(0,1)*X[1,1;1/2]X[2,1;3/2] + (0,-1)*X[2,1;3/2]X[1,1;1/2]",
      "X[1,1;3/2]X[2,1;3/2]X[1,1;3/2]X[2,1;3/2] + X[2,1;3/2]X[1,1;3/2]X[2,1;3/2]X[1,1;3/2]",
      "X[2,1;2]X[1,1;1]X[2,1;2]",
      "X[1,1;1/4]X[2,1;1/4] + X[2,1;1/4]X[1,1;1/4]",
      "2*X[1,1;1]X[2,1;2]X[1,1;1] - X[2,1;1]",
  };
  std::vector<NCPolynomial> out;
  for (const char *t : texts) out.push_back(NCPolynomial::parse(t));
  return out;
}

}  // namespace liblab
