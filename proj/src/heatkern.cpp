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

#include "liblab/heatkern.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "liblab/error.hpp"

namespace liblab {

namespace {

constexpr double kPi = std::numbers::pi;

// The four terms of F are O(log(1/kc)) while F itself decays like e^{-T/2},
// so F is evaluated in extended precision.
using Wide = boost::multiprecision::number<boost::multiprecision::cpp_bin_float<160>>;

template <class R>
void agm_ke(const R &kc, R &K, R &E) {
  using std::abs;
  using std::sqrt;
  const R pi = boost::math::constants::pi<R>();
  R a = 1, b = kc, sum = (1 - kc * kc) / 2, pow2 = R(1) / 2;
  const R tol = std::numeric_limits<R>::epsilon() * 4;
  for (int it = 0; it < 200; ++it) {
    R an = (a + b) / 2, bn = sqrt(a * b), cn = (a - b) / 2;
    pow2 *= 2;
    sum += pow2 * cn * cn;
    a = an;
    b = bn;
    if (abs(a - b) <= tol * a) break;
  }
  K = pi / (2 * a);
  E = K * (1 - sum);
}

double free_energy_kc(double kc_d) {
  using std::log;
  Wide kc = kc_d, K, E;
  agm_ke(kc, K, E);
  Wide kc2 = kc * kc, k2 = 1 - kc2;
  Wide D = 2 * E - kc2 * K;
  Wide r = kc2 * K / D;
  Wide F = K * D / 6 + (log(kc) - log(2 * D)) + 2 * (1 + k2) * K / (3 * D) + r * r / 12;
  return F.convert_to<double>();
}

}  // namespace

EllipticKE elliptic_ke_complementary(double kc) {
  if (!(kc > 0.0) || kc > 1.0)
    fail(ErrorCode::DomainError, "complementary modulus must lie in (0, 1]");
  double a = 1.0, b = kc;
  double c2 = 1.0 - kc * kc;  // c_0^2 = k^2
  double sum = 0.5 * c2, pow2 = 0.5;
  for (int it = 0; it < 64; ++it) {
    double an = 0.5 * (a + b), bn = std::sqrt(a * b);
    double cn = 0.5 * (a - b);
    pow2 *= 2.0;
    sum += pow2 * cn * cn;
    a = an;
    b = bn;
    if (std::abs(a - b) <= 1e-16 * a) break;
  }
  EllipticKE r;
  r.K = kPi / (2.0 * a);
  r.E = r.K * (1.0 - sum);
  return r;
}

EllipticKE elliptic_ke(double k) {
  if (!(k >= 0.0) || !(k < 1.0)) fail(ErrorCode::DomainError, "modulus must lie in [0, 1)");
  return elliptic_ke_complementary(std::sqrt((1.0 - k) * (1.0 + k)));
}

double t_of_complementary(double kc) {
  EllipticKE ke = elliptic_ke_complementary(kc);
  return 4.0 * ke.K * (2.0 * ke.E - kc * kc * ke.K);
}

double t_of_modulus(double k) {
  if (!(k >= 0.0) || !(k < 1.0)) fail(ErrorCode::DomainError, "modulus must lie in [0, 1)");
  return t_of_complementary(std::sqrt((1.0 - k) * (1.0 + k)));
}

Modulus invert_T(double T) {
  if (!(T > kPi * kPi) || !std::isfinite(T))
    fail(ErrorCode::DomainError, "T must exceed pi^2");
  // Work in u = -log(kc): T grows linearly in u, so brackets stay tame.
  auto T_of_u = [](double u) { return t_of_complementary(std::exp(-u)); };
  double lo = 0.0, hi = 1.0;
  // kc = e^{-u} stays a normal double for u <= 700.
  const double u_max = 700.0;
  if (T_of_u(u_max) < T) fail(ErrorCode::DomainError, "T too large to invert");
  while (T_of_u(hi) < T) {
    lo = hi;
    hi = std::min(2.0 * hi, u_max);
  }
  double u = 0.5 * (lo + hi);
  for (int it = 0; it < 200; ++it) {
    double kc = std::exp(-u), kc2 = kc * kc, k2 = 1.0 - kc2;
    EllipticKE ke = elliptic_ke_complementary(kc);
    double D = 2.0 * ke.E - kc2 * ke.K;
    double f = 4.0 * ke.K * D - T;
    if (f < 0) lo = u;
    else hi = u;
    // dT/du = 4 (E - kc^2 K)(D + kc^2 K) / k^2
    double dfdu = 4.0 * (ke.E - kc2 * ke.K) * (D + kc2 * ke.K) / k2;
    double next = u - f / dfdu;
    if (!(next > lo && next < hi) || !std::isfinite(next)) next = 0.5 * (lo + hi);
    if (std::abs(next - u) <= 1e-15 * std::max(1.0, u) || hi - lo <= 1e-15 * std::max(1.0, u)) {
      u = next;
      break;
    }
    u = next;
  }
  Modulus m;
  m.kc = std::exp(-u);
  m.k = std::sqrt((1.0 - m.kc) * (1.0 + m.kc));
  return m;
}

double free_energy(double T) {
  return free_energy_kc(invert_T(T).kc);
}

Sandwich li_yau_sandwich(double T, double eps) {
  if (!(eps > 0.0 && eps < 1.0)) fail(ErrorCode::DomainError, "eps must lie in (0, 1)");
  if (!(eps * T > kPi * kPi)) fail(ErrorCode::DomainError, "eps*T must exceed pi^2");
  Sandwich s;
  s.high = free_energy(T);
  s.low = free_energy(eps * T) + 0.5 * std::log(eps) - kPi * kPi / (2.0 * (1.0 - eps) * T);
  return s;
}

double circle_heat_kernel(double theta, double t, int terms) {
  if (!(t > 0.0)) fail(ErrorCode::DomainError, "heat kernel time must be positive");
  double sum = 1.0;
  for (int n = 1;; ++n) {
    if (terms > 0 && n > terms) break;
    double w = std::exp(-0.5 * double(n) * double(n) * t);
    if (terms <= 0 && w < 1e-18) break;
    sum += 2.0 * w * std::cos(double(n) * theta);
  }
  return sum / (2.0 * kPi);
}

}  // namespace liblab
