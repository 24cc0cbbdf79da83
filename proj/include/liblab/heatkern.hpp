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

#ifndef LIBLAB_HEATKERN_HPP
#define LIBLAB_HEATKERN_HPP

namespace liblab {

struct EllipticKE {
  double K = 0;
  double E = 0;
};

// Complete elliptic integrals of the first and second kind (modulus k).
EllipticKE elliptic_ke(double k);
// Same integrals parametrized by the complementary modulus kc = sqrt(1-k^2);
// this is the accurate form close to k = 1.
EllipticKE elliptic_ke_complementary(double kc);

// T(k) = 4K(2E - (1-k^2)K), strictly increasing from pi^2 to infinity.
double t_of_modulus(double k);
double t_of_complementary(double kc);

struct Modulus {
  double k = 0;
  double kc = 1;
};

// Inverse of T on (pi^2, infinity).
Modulus invert_T(double T);

// Limiting free energy of the unitary heat kernel at the identity.
double free_energy(double T);

struct Sandwich {
  double low = 0;
  double high = 0;
};

// Li-Yau type bounds: low = F(eps T) + log(eps)/2 - pi^2/(2(1-eps)T), high = F(T).
Sandwich li_yau_sandwich(double T, double eps);

// Heat kernel on U(1) at time t, as a density in theta on [-pi, pi).
// terms <= 0 selects the truncation automatically.
double circle_heat_kernel(double theta, double t, int terms = 0);

}  // namespace liblab

#endif
