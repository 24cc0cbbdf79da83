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

#ifndef LIBLAB_TESTS_SUPPORT_HPP
#define LIBLAB_TESTS_SUPPORT_HPP

#include <complex>
#include <random>
#include <string>
#include <vector>

#include "liblab/ncalg.hpp"

namespace liblab::testing {

inline Time random_time(std::mt19937_64 &rng, int max_quarters = 8) {
  std::uniform_int_distribution<int> q(0, max_quarters);
  return Time(q(rng), 4);
}

// Random X word over algebras 1..n_alg (generator j in 1..n_gen).
inline Word random_x_word(std::mt19937_64 &rng, int len, int n_alg = 2, int n_gen = 1,
                          int max_quarters = 8) {
  std::uniform_int_distribution<int> ia(1, n_alg), ja(1, n_gen);
  Word w;
  for (int k = 0; k < len; ++k) w.push_back(Letter::x(ia(rng), ja(rng), random_time(rng, max_quarters)));
  return w;
}

// Random word mixing X, V and V* letters (times drawn from a small set so
// that cancellations actually occur).
inline Word random_mixed_word(std::mt19937_64 &rng, int len, int n_motions = 2) {
  std::uniform_int_distribution<int> kind(0, 2), ia(1, n_motions), tq(0, 2);
  Word w;
  for (int k = 0; k < len; ++k) {
    int c = kind(rng);
    Time t(tq(rng), 2);
    if (c == 0) w.push_back(Letter::x(ia(rng), 1, t));
    else if (c == 1) w.push_back(Letter::v(ia(rng), t));
    else w.push_back(Letter::vstar(ia(rng), t));
  }
  return w;
}

inline Complex random_coefficient(std::mt19937_64 &rng) {
  std::uniform_int_distribution<int> c(-3, 3);
  return Complex(c(rng), c(rng));
}

inline NCPolynomial random_x_polynomial(std::mt19937_64 &rng, int terms, int max_len, int n_alg = 2,
                                        int n_gen = 1) {
  std::uniform_int_distribution<int> len(0, max_len);
  NCPolynomial p;
  for (int k = 0; k < terms; ++k) p.add_term(random_x_word(rng, len(rng), n_alg, n_gen), random_coefficient(rng));
  return p;
}

// Splits one CSV record, honouring double-quoted cells.
inline std::vector<std::string> split_csv_line(const std::string &line) {
  std::vector<std::string> cells(1);
  bool quoted = false;
  for (std::size_t k = 0; k < line.size(); ++k) {
    char c = line[k];
    if (quoted) {
      if (c == '"' && k + 1 < line.size() && line[k + 1] == '"') {
        cells.back() += '"';
        ++k;
      } else if (c == '"') {
        quoted = false;
      } else {
        cells.back() += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      cells.emplace_back();
    } else {
      cells.back() += c;
    }
  }
  return cells;
}

}  // namespace liblab::testing

#endif
