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

#include "liblab/rmt.hpp"

#include <cmath>
#include <fstream>
#include <vector>

#include "liblab/error.hpp"
#include "liblab/parallel.hpp"

namespace liblab {

int InitialFamily::num_algebras() const {
  int m = 0;
  for (const auto &[g, M] : xi) m = std::max(m, g.i);
  return m;
}

int InitialFamily::num_generators(int i) const {
  int m = 0;
  for (const auto &[g, M] : xi)
    if (g.i == i) m = std::max(m, g.j);
  return m;
}

const Eigen::MatrixXcd &InitialFamily::at(int i, int j) const {
  auto it = xi.find({i, j});
  if (it == xi.end())
    fail(ErrorCode::UnsupportedWord,
         "family has no generator x_" + std::to_string(i) + "," + std::to_string(j));
  return it->second;
}

std::shared_ptr<MatrixLaw> InitialFamily::law() const { return std::make_shared<MatrixLaw>(xi); }

InitialFamily build_initial_family(const std::vector<MarginalLaw> &marginals, int N, int n_motions,
                                   bool strict) {
  if (N < 1) fail(ErrorCode::IncompatibleN, "matrix size must be positive");
  InitialFamily f;
  f.N = N;
  f.n_motions = n_motions;
  for (std::size_t idx = 0; idx < marginals.size(); ++idx) {
    const MarginalLaw &m = marginals[idx];
    int i = int(idx) + 1;
    switch (m.kind()) {
      case MarginalLaw::Kind::Atomic:
      case MarginalLaw::Kind::Semicircle: {
        if (strict) {
          if (m.kind() == MarginalLaw::Kind::Semicircle)
            fail(ErrorCode::IncompatibleN, "a continuous law has no exact N x N realization");
          for (double w : m.weights()) {
            double c = w * N;
            if (std::abs(c - std::round(c)) > 1e-9)
              fail(ErrorCode::IncompatibleN, "atom weight " + std::to_string(w) +
                                                 " is not a multiple of 1/" + std::to_string(N));
          }
        }
        Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(N, N);
        // Largest atoms first, so a trace-1/2 projection reads diag(1, ..., 0, ...).
        for (int k = 0; k < N; ++k) D(k, k) = m.quantile(1.0 - (k + 0.5) / N);
        f.xi[{i, 1}] = D;
        break;
      }
      case MarginalLaw::Kind::Matrices: {
        const auto &mats = m.matrix_generators();
        int d = int(mats[0].rows());
        if (N % d != 0)
          fail(ErrorCode::IncompatibleN, "N must be a multiple of the matrix size " + std::to_string(d));
        for (std::size_t j = 0; j < mats.size(); ++j) {
          Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(N, N);
          for (int b = 0; b < N / d; ++b) T.block(b * d, b * d, d, d) = mats[j];
          f.xi[{i, int(j) + 1}] = T;
        }
        break;
      }
      case MarginalLaw::Kind::Moments:
        fail(ErrorCode::IncompatibleN, "a bare moment sequence cannot be realized by matrices");
    }
  }
  for (const auto &[g, M] : f.xi)
    f.norm_bound = std::max(f.norm_bound, M.cwiseAbs().rowwise().sum().maxCoeff());
  return f;
}

InitialFamily family_from_matrix_law(const MatrixLaw &law, int N, int n_motions) {
  int d = law.dim();
  if (N % d != 0)
    fail(ErrorCode::IncompatibleN, "N must be a multiple of the law's matrix size " + std::to_string(d));
  InitialFamily f;
  f.N = N;
  f.n_motions = n_motions;
  for (const auto &[g, M] : law.matrices()) {
    Eigen::MatrixXcd T = Eigen::MatrixXcd::Zero(N, N);
    for (int b = 0; b < N / d; ++b) T.block(b * d, b * d, d, d) = M;
    f.xi[g] = T;
    f.norm_bound = std::max(f.norm_bound, law.norm_bound(g.i, g.j));
  }
  return f;
}

Eigen::MatrixXcd sample_gue(int N, RandomEngine &rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double sd_diag = 1.0 / std::sqrt(double(N));
  const double sd_off = 1.0 / std::sqrt(2.0 * N);
  Eigen::MatrixXcd H(N, N);
  for (int a = 0; a < N; ++a) {
    H(a, a) = sd_diag * gauss(rng);
    for (int b = a + 1; b < N; ++b) {
      double re = gauss(rng), im = gauss(rng);
      H(a, b) = Complex(sd_off * re, sd_off * im);
      H(b, a) = std::conj(H(a, b));
    }
  }
  return H;
}

Eigen::MatrixXcd unitary_exponential(const Eigen::MatrixXcd &H, double h) {
  const Eigen::Index N = H.rows();
  Eigen::MatrixXcd A = Complex(0.0, std::sqrt(h)) * H;
  // Scale until b = min(||A||_1, ||A||_F) <= 1, then pick the Taylor degree K
  // so that the tail bound e^b b^(K+1)/(K+1)! is below double precision.
  double b = std::min(A.cwiseAbs().colwise().sum().maxCoeff(), A.norm());
  int squarings = 0;
  while (b > 1.0) {
    b *= 0.5;
    ++squarings;
  }
  if (squarings) A *= std::ldexp(1.0, -squarings);
  std::vector<double> c{1.0};  // c[k] = 1/k!
  double tail = b;
  while (std::exp(b) * tail > 1e-17) {
    c.push_back(c.back() / double(c.size()));
    tail *= b / double(c.size());
  }
  // Paterson-Stockmeyer: p(A) = sum_j B_j (A^4)^j with B_j of degree 3.
  Eigen::MatrixXcd A2(N, N), A3(N, N), A4(N, N), R(N, N), T(N, N);
  A2.noalias() = A * A;
  A3.noalias() = A2 * A;
  A4.noalias() = A2 * A2;
  const Eigen::MatrixXcd *pw[4] = {nullptr, &A, &A2, &A3};
  auto add_block = [&](Eigen::MatrixXcd &M, std::size_t j) {
    M.diagonal().array() += c[4 * j];
    for (std::size_t i = 1; i < 4 && 4 * j + i < c.size(); ++i) M += c[4 * j + i] * *pw[i];
  };
  std::size_t top = (c.size() - 1) / 4;
  R.setZero();
  add_block(R, top);
  for (std::size_t j = top; j-- > 0;) {
    T.noalias() = R * A4;
    add_block(T, j);
    R.swap(T);
  }
  for (int k = 0; k < squarings; ++k) {
    T.noalias() = R * R;
    R.swap(T);
  }
  return R;
}

Eigen::MatrixXcd step_ubm(const Eigen::MatrixXcd &U, double h, RandomEngine &rng) {
  return unitary_exponential(sample_gue(int(U.rows()), rng), h) * U;
}

Eigen::MatrixXcd sample_haar(int N, RandomEngine &rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::MatrixXcd G(N, N);
  for (int a = 0; a < N; ++a)
    for (int b = 0; b < N; ++b) G(a, b) = Complex(gauss(rng), gauss(rng));
  Eigen::HouseholderQR<Eigen::MatrixXcd> qr(G);
  Eigen::MatrixXcd Q = qr.householderQ();
  const Eigen::MatrixXcd &R = qr.matrixQR();
  for (int k = 0; k < N; ++k) {
    Complex d = R(k, k);
    double a = std::abs(d);
    Q.col(k) *= a > 0 ? d / a : Complex(1.0);
  }
  return Q;
}

std::uint64_t path_seed(std::uint64_t base_seed, std::uint64_t path) { return base_seed ^ path; }

UnitaryTrajectory::UnitaryTrajectory(int N, int n_motions, Time h, int steps, std::uint64_t seed,
                                     int record_every)
    : N_(N), n_(n_motions), steps_(steps), record_every_(record_every), h_(h) {
  if (N < 1 || n_motions < 0 || steps < 0 || record_every < 1)
    fail(ErrorCode::InvalidArgument, "bad trajectory parameters");
  if (!(h > Time(0))) fail(ErrorCode::DomainError, "time step must be positive");
  RandomEngine rng(seed);
  std::vector<Eigen::MatrixXcd> U(static_cast<std::size_t>(n_), Eigen::MatrixXcd::Identity(N, N));
  times_.push_back(Time(0));
  U_.push_back(U);
  const double hd = h.to_double();
  for (int s = 1; s <= steps; ++s) {
    for (auto &u : U) u = step_ubm(u, hd, rng);
    if (s % record_every == 0 || s == steps) {
      times_.push_back(h * Time(s));
      U_.push_back(U);
    }
  }
}

bool UnitaryTrajectory::on_grid(Time t) const {
  return std::binary_search(times_.begin(), times_.end(), t);
}

const Eigen::MatrixXcd &UnitaryTrajectory::U(int i, Time t) const {
  if (i < 1 || i > n_) fail(ErrorCode::InvalidArgument, "motion index out of range");
  auto it = std::lower_bound(times_.begin(), times_.end(), t);
  if (it == times_.end() || *it != t)
    fail(ErrorCode::GridMiss, "time " + t.str() + " is not on the simulation grid");
  return U_[std::size_t(it - times_.begin())][std::size_t(i - 1)];
}

void UnitaryTrajectory::write(const std::string &path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open " + path + " for writing");
  auto put32 = [&](std::int32_t v) { out.write(reinterpret_cast<const char *>(&v), sizeof v); };
  auto put64 = [&](std::int64_t v) { out.write(reinterpret_cast<const char *>(&v), sizeof v); };
  put32(N_);
  put32(n_);
  put32(steps_);
  put32(record_every_);
  put64(h_.num());
  put64(h_.den());
  for (const auto &slice : U_)
    for (const auto &M : slice)
      out.write(reinterpret_cast<const char *>(M.data()),
                std::streamsize(sizeof(Complex) * std::size_t(M.size())));
  if (!out) fail(ErrorCode::IoError, "write failed for " + path);
}

void simulate_paths(int N, int n_motions, double h, int steps, std::uint64_t seed, int paths,
                    int record_every,
                    const std::function<void(int, int, const std::vector<Eigen::MatrixXcd> &)> &visit) {
  if (record_every < 1) fail(ErrorCode::InvalidArgument, "record_every must be >= 1");
  parallel_for(paths, [&](int p) {
    RandomEngine rng(path_seed(seed, std::uint64_t(p)));
    std::vector<Eigen::MatrixXcd> U(static_cast<std::size_t>(n_motions),
                                    Eigen::MatrixXcd::Identity(N, N));
    visit(p, 0, U);
    for (int s = 1; s <= steps; ++s) {
      for (auto &u : U) u = step_ubm(u, h, rng);
      if (s % record_every == 0 || s == steps) visit(p, s, U);
    }
  });
}

Complex evaluate_word_trace(const Word &w, const InitialFamily &family,
                            const UnitaryTrajectory &traj) {
  const int N = family.N;
  if (traj.N() != N) fail(ErrorCode::IncompatibleN, "trajectory and family sizes differ");
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(N, N);
  for (const Letter &l : w) {
    if (l.is_x()) {
      const Eigen::MatrixXcd &x = family.at(l.i, l.j);
      if (l.i <= traj.n_motions()) {
        const Eigen::MatrixXcd &U = traj.U(l.i, l.t);
        acc = acc * U * x * U.adjoint();
      } else {
        acc = acc * x;
      }
    } else if (l.i <= traj.n_motions()) {
      const Eigen::MatrixXcd &U = traj.U(l.i, l.t);
      acc = l.kind == LetterKind::V ? Eigen::MatrixXcd(acc * U) : Eigen::MatrixXcd(acc * U.adjoint());
    }
  }
  return acc.trace() / double(N);
}

Complex evaluate_word_static(const std::vector<Gen> &w, const InitialFamily &family,
                             const std::vector<Eigen::MatrixXcd> &U) {
  const int N = family.N;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(N, N);
  for (const Gen &g : w) {
    const Eigen::MatrixXcd &x = family.at(g.i, g.j);
    if (g.i <= int(U.size())) acc = acc * U[std::size_t(g.i - 1)] * x * U[std::size_t(g.i - 1)].adjoint();
    else acc = acc * x;
  }
  return acc.trace() / double(N);
}

namespace {

// Runs `paths` trajectories and reduces the per-record samples produced by
// `sample(U, out)` (one slot per quantity) into mean / standard-error rows.
std::vector<MomentCheckRow> sampled_rows(
    int N, int n_motions, int paths, Time T, int steps, int quantities, std::uint64_t seed,
    int record_every,
    const std::function<void(const std::vector<Eigen::MatrixXcd> &, std::vector<Complex> &)> &sample,
    const std::function<double(int, double)> &oracle) {
  if (paths < 2) fail(ErrorCode::InvalidArgument, "need at least two paths");
  if (steps < 1 || quantities < 1) fail(ErrorCode::InvalidArgument, "need steps >= 1");
  if (record_every < 1) fail(ErrorCode::InvalidArgument, "record_every must be >= 1");
  if (N < 1) fail(ErrorCode::InvalidArgument, "N must be >= 1");
  const Time h = T / Time(steps);
  std::vector<int> rec;
  for (int s = 0; s <= steps; ++s)
    if (s % record_every == 0 || s == steps) rec.push_back(s);
  const std::size_t R = rec.size();
  // samples[path][record][quantity]
  std::vector<std::vector<std::vector<Complex>>> samples(
      static_cast<std::size_t>(paths),
      std::vector<std::vector<Complex>>(R, std::vector<Complex>(static_cast<std::size_t>(quantities))));
  simulate_paths(N, n_motions, h.to_double(), steps, seed, paths, record_every,
                 [&](int p, int s, const std::vector<Eigen::MatrixXcd> &U) {
                   std::size_t r = std::size_t(std::lower_bound(rec.begin(), rec.end(), s) - rec.begin());
                   sample(U, samples[std::size_t(p)][r]);
                 });
  std::vector<MomentCheckRow> rows;
  for (int q = 0; q < quantities; ++q)
    for (std::size_t r = 0; r < R; ++r) {
      Complex mean = 0;
      for (int p = 0; p < paths; ++p) mean += samples[std::size_t(p)][r][std::size_t(q)];
      mean /= double(paths);
      double vr = 0, vi = 0;
      for (int p = 0; p < paths; ++p) {
        Complex d = samples[std::size_t(p)][r][std::size_t(q)] - mean;
        vr += d.real() * d.real();
        vi += d.imag() * d.imag();
      }
      MomentCheckRow row;
      row.n = q + 1;
      row.t = h * Time(rec[r]);
      row.mean = mean;
      row.se = std::sqrt(vr / (paths - 1) / paths);
      row.se_im = std::sqrt(vi / (paths - 1) / paths);
      row.ode = oracle(q + 1, row.t.to_double());
      rows.push_back(row);
    }
  return rows;
}

}  // namespace

std::vector<MomentCheckRow> finite_n_moment_check(int N, int paths, Time T, int steps, int n_max,
                                                  std::uint64_t seed, int record_every) {
  return sampled_rows(
      N, 1, paths, T, steps, n_max, seed, record_every,
      [N, n_max](const std::vector<Eigen::MatrixXcd> &U, std::vector<Complex> &out) {
        Eigen::MatrixXcd P = U[0];
        for (int n = 1; n <= n_max; ++n) {
          if (n > 1) P = P * U[0];
          out[std::size_t(n - 1)] = P.trace() / double(N);
        }
      },
      [](int n, double t) { return free_ubm_moment(n, t); });
}

std::vector<MomentCheckRow> cross_correlation_check(int N, int paths, Time T, int steps,
                                                    std::uint64_t seed, int record_every) {
  return sampled_rows(
      N, 2, paths, T, steps, 1, seed, record_every,
      [N](const std::vector<Eigen::MatrixXcd> &U, std::vector<Complex> &out) {
        out[0] = (U[0].adjoint().array().transpose() * U[1].array()).sum() / double(N);
      },
      [](int, double t) { return std::exp(-t); });
}

}  // namespace liblab
