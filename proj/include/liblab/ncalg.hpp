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

#ifndef LIBLAB_NCALG_HPP
#define LIBLAB_NCALG_HPP

#include <complex>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "liblab/rational.hpp"

namespace liblab {

using Complex = std::complex<double>;

enum class LetterKind : unsigned char { X = 0, V = 1, VStar = 2 };

// One generator: X[i,j;t] is the self-adjoint trajectory generator x_ij(t),
// V[i;t] / V*[i;t] are the auxiliary free unitary Brownian motion v_i(t) and
// its adjoint. For V letters j is always 0.
struct Letter {
  LetterKind kind = LetterKind::X;
  int i = 1;
  int j = 1;
  Time t;

  static Letter x(int i, int j, Time t) { return {LetterKind::X, i, j, t}; }
  static Letter v(int i, Time t) { return {LetterKind::V, i, 0, t}; }
  static Letter vstar(int i, Time t) { return {LetterKind::VStar, i, 0, t}; }

  bool is_x() const { return kind == LetterKind::X; }
  Letter adjoint() const;
  std::string str() const;

  friend bool operator==(const Letter &, const Letter &) = default;
  friend auto operator<=>(const Letter &a, const Letter &b) {
    if (auto c = a.kind <=> b.kind; c != 0) return c;
    if (auto c = a.i <=> b.i; c != 0) return c;
    if (auto c = a.j <=> b.j; c != 0) return c;
    return a.t <=> b.t;
  }
};

using Word = std::vector<Letter>;

// Drops V letters at time 0 and cancels adjacent v v* / v* v pairs with the
// same index and time (free-group reduction).
Word canonical(const Word &w);
Word adjoint(const Word &w);
Word concat(const Word &a, const Word &b);
bool is_x_word(const Word &w);
std::string word_str(const Word &w);
Word parse_word(const std::string &text);

class NCPolynomial {
 public:
  using Terms = std::map<Word, Complex>;

  NCPolynomial() = default;
  explicit NCPolynomial(Complex c);
  explicit NCPolynomial(const Word &w, Complex c = 1.0);
  static NCPolynomial x(int i, int j, Time t) {
    return NCPolynomial(Word{Letter::x(i, j, t)});
  }

  const Terms &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }
  std::size_t degree() const;
  bool is_x_polynomial() const;
  std::set<Time> times() const;
  Complex coefficient(const Word &w) const;

  // Adds c * w after canonicalizing w; exact zeros are erased.
  void add_term(const Word &w, Complex c);

  NCPolynomial &operator+=(const NCPolynomial &o);
  NCPolynomial &operator-=(const NCPolynomial &o);
  NCPolynomial &operator*=(Complex c);
  friend NCPolynomial operator+(NCPolynomial a, const NCPolynomial &b) { return a += b; }
  friend NCPolynomial operator-(NCPolynomial a, const NCPolynomial &b) { return a -= b; }
  friend NCPolynomial operator*(NCPolynomial a, Complex c) { return a *= c; }
  friend NCPolynomial operator*(Complex c, NCPolynomial a) { return a *= c; }
  friend NCPolynomial operator*(const NCPolynomial &a, const NCPolynomial &b);
  friend bool operator==(const NCPolynomial &a, const NCPolynomial &b) {
    return a.terms_ == b.terms_;
  }

  NCPolynomial adjoint() const;
  NCPolynomial pruned(double tol) const;
  double max_abs_diff(const NCPolynomial &o) const;

  std::string str() const;
  static NCPolynomial parse(const std::string &text);

 private:
  Terms terms_;
};

// Element of the algebraic tensor product, stored as sum c * (a (x) b).
class TensorPolynomial {
 public:
  using Terms = std::map<std::pair<Word, Word>, Complex>;
  const Terms &terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  void add_term(const Word &a, const Word &b, Complex c);
  TensorPolynomial &operator+=(const TensorPolynomial &o);

 private:
  Terms terms_;
};

// Time-dependent liberation derivation in direction k at time s, extended to
// words by the Leibniz rule. Only X-polynomials are accepted.
TensorPolynomial liberation_derivation(const NCPolynomial &p, int k, Time s);
// a (x) b -> b a
NCPolynomial flip_multiply(const TensorPolynomial &t);
// Cyclic derivative: flip_multiply o liberation_derivation.
NCPolynomial cyclic_derivative(const NCPolynomial &p, int k, Time s);
// Substitution x_ij(t) -> v_i((t-s) v 0) x_ij(s ^ t) v_i((t-s) v 0)^* for
// i <= n_motions; every other letter is left unchanged.
NCPolynomial pi_s_substitution(const NCPolynomial &p, Time s, int n_motions);

}  // namespace liblab

#endif
