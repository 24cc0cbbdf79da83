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

#include <algorithm>
#include <random>

#include "doctest.h"
#include "liblab/error.hpp"
#include "liblab/ncalg.hpp"
#include "support.hpp"

using namespace liblab;
using liblab::testing::random_mixed_word;
using liblab::testing::random_x_polynomial;
using liblab::testing::random_x_word;

namespace {

NCPolynomial P(const std::string &s) { return NCPolynomial::parse(s); }

Time T(const std::string &s) { return Time::parse(s); }

// (a (x) b) products used to state the Leibniz rule.
TensorPolynomial right_mul(const TensorPolynomial &t, const NCPolynomial &q) {
  TensorPolynomial out;
  for (const auto &[ab, c] : t.terms())
    for (const auto &[w, d] : q.terms()) out.add_term(ab.first, concat(ab.second, w), c * d);
  return out;
}

TensorPolynomial left_mul(const NCPolynomial &p, const TensorPolynomial &t) {
  TensorPolynomial out;
  for (const auto &[w, d] : p.terms())
    for (const auto &[ab, c] : t.terms()) out.add_term(concat(w, ab.first), ab.second, d * c);
  return out;
}

double tensor_diff(const TensorPolynomial &a, const TensorPolynomial &b) {
  TensorPolynomial d = a;
  for (const auto &[ab, c] : b.terms()) d.add_term(ab.first, ab.second, -c);
  double m = 0;
  for (const auto &[ab, c] : d.terms()) m = std::max(m, std::abs(c));
  return m;
}

// Reference reduction: repeatedly deletes a randomly chosen cancelling pair
// (or a V letter at time 0) until none is left.
Word reduce_randomly(Word w, std::mt19937_64 &rng) {
  while (true) {
    std::vector<std::size_t> zero, pairs;
    for (std::size_t k = 0; k < w.size(); ++k)
      if (!w[k].is_x() && w[k].t.is_zero()) zero.push_back(k);
    for (std::size_t k = 0; k + 1 < w.size(); ++k) {
      const Letter &a = w[k], &b = w[k + 1];
      if (!a.is_x() && !b.is_x() && a.kind != b.kind && a.i == b.i && a.t == b.t) pairs.push_back(k);
    }
    std::size_t total = zero.size() + pairs.size();
    if (total == 0) return w;
    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, total - 1)(rng);
    if (pick < zero.size()) {
      w.erase(w.begin() + std::ptrdiff_t(zero[pick]));
    } else {
      std::size_t k = pairs[pick - zero.size()];
      w.erase(w.begin() + std::ptrdiff_t(k), w.begin() + std::ptrdiff_t(k + 2));
    }
  }
}

}  // namespace

TEST_CASE("times are exact rationals") {
  CHECK(T("3/4") + T("1/4") == Time(1));
  CHECK(T("0.125") == Time(1, 8));
  CHECK(T("-1/2") < Time(0));
  CHECK(T("6/8").str() == "3/4");
  CHECK(T("2").str() == "2");
  CHECK(positive_part_diff(T("1/2"), T("3/4")) == Time(0));
  CHECK(positive_part_diff(T("3/2"), T("1/2")) == Time(1));
  CHECK_THROWS_AS(T("1/0"), Error);
  CHECK_THROWS_AS(T("abc"), Error);
}

TEST_CASE("word and polynomial text round-trips exactly") {
  for (const char *w : {"X[1,1;0]", "X[2,3;3/4]V[1;1/2]V*[2;5/2]", "V*[1;1]X[1,1;1]V[1;1]"})
    CHECK(word_str(parse_word(w)) == w);
  std::mt19937_64 rng(11);
  for (int r = 0; r < 100; ++r) {
    NCPolynomial p = random_x_polynomial(rng, 5, 4, 3, 2);
    p.add_term(random_mixed_word(rng, 5), Complex(0.1, -1.0 / 3.0));
    CHECK(NCPolynomial::parse(p.str()) == p);
  }
  CHECK(NCPolynomial().str() == "0");
  CHECK(P("2").coefficient({}) == Complex(2));
  CHECK(P("(0,1)*X[1,1;1] - X[2,1;1]").coefficient(parse_word("X[1,1;1]")) == Complex(0, 1));
  CHECK_THROWS_AS(P("X[1,1;1"), Error);
  CHECK_THROWS_AS(P("X[1;1]"), Error);
  try {
    P("Y[1,1;1]");
    FAIL("parse should fail");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::ParseError);
  }
}

TEST_CASE("products respect the unit and unitarity relations") {
  NCPolynomial p = P("X[1,1;1]X[2,1;1/2] + 3*X[1,2;2]");
  CHECK(NCPolynomial(Complex(1)) * p == p);
  CHECK(p * NCPolynomial(Complex(1)) == p);
  CHECK(P("V[1;1]") * P("V*[1;1]") == NCPolynomial(Complex(1)));
  CHECK(P("V*[2;1/2]") * P("V[2;1/2]") == NCPolynomial(Complex(1)));
  CHECK(P("V[1;1]") * P("V*[1;2]") != NCPolynomial(Complex(1)));
  CHECK(P("V[1;0]X[1,1;1]V*[1;0]") == P("X[1,1;1]"));
  NCPolynomial sq = P("X[1,1;1/2] + X[2,1;1/2]") * P("X[1,1;1/2] + X[2,1;1/2]");
  CHECK(sq.size() == 4);
}

TEST_CASE("canonical form is independent of the rewrite order") {
  std::mt19937_64 rng(5);
  for (int r = 0; r < 100; ++r) {
    Word w = random_mixed_word(rng, 1 + int(rng() % 12));
    Word expected = canonical(w);
    for (int rep = 0; rep < 3; ++rep) CHECK(reduce_randomly(w, rng) == expected);
  }
}

TEST_CASE("adjoint is an antilinear antihomomorphism") {
  std::mt19937_64 rng(6);
  for (int r = 0; r < 50; ++r) {
    NCPolynomial p = random_x_polynomial(rng, 4, 3), q = random_x_polynomial(rng, 4, 3);
    p.add_term(random_mixed_word(rng, 3), Complex(0, 2));
    CHECK((p * q).adjoint() == q.adjoint() * p.adjoint());
    CHECK((Complex(2, 3) * p).adjoint() == Complex(2, -3) * p.adjoint());
    CHECK(p.adjoint().adjoint() == p);
  }
  CHECK(P("X[1,1;1]").adjoint() == P("X[1,1;1]"));
  CHECK(P("V[1;1]").adjoint() == P("V*[1;1]"));
}

TEST_CASE("liberation derivation on single letters") {
  CHECK(liberation_derivation(P("X[2,1;1]"), 1, T("1/2")).is_zero());
  CHECK(liberation_derivation(P("X[1,1;1/2]"), 1, T("1")).is_zero());
  // x v (x) v* - v (x) v* x with v = V(1, t - s)
  TensorPolynomial d = liberation_derivation(P("X[1,1;2]"), 1, T("1/2"));
  TensorPolynomial expected;
  expected.add_term(parse_word("X[1,1;2]V[1;3/2]"), parse_word("V*[1;3/2]"), 1.0);
  expected.add_term(parse_word("V[1;3/2]"), parse_word("V*[1;3/2]X[1,1;2]"), -1.0);
  CHECK(d.terms() == expected.terms());
  // At s = t the unitaries are trivial and the two terms live in different slots.
  TensorPolynomial at_t = liberation_derivation(P("X[1,1;1]"), 1, T("1"));
  CHECK(at_t.terms().size() == 2);
  try {
    liberation_derivation(P("V[1;1]X[1,1;1]"), 1, T("1/2"));
    FAIL("V letters must be rejected");
  } catch (const Error &e) {
    CHECK(e.code() == ErrorCode::NonXPolynomial);
  }
  CHECK_THROWS_AS(cyclic_derivative(P("V*[1;1]"), 1, T("0")), Error);
}

TEST_CASE("liberation derivation satisfies the Leibniz rule") {
  std::mt19937_64 rng(7);
  for (int r = 0; r < 50; ++r) {
    NCPolynomial p = random_x_polynomial(rng, 3, 3), q = random_x_polynomial(rng, 3, 3);
    int k = 1 + int(rng() % 2);
    Time s = testing::random_time(rng);
    TensorPolynomial lhs = liberation_derivation(p * q, k, s);
    TensorPolynomial rhs = right_mul(liberation_derivation(p, k, s), q);
    rhs += left_mul(p, liberation_derivation(q, k, s));
    CHECK(tensor_diff(lhs, rhs) < 1e-12);
  }
}

TEST_CASE("cyclic derivative of a single letter") {
  // theta(X V (x) V*) = V* X V and theta(V (x) V* X) = V* X V cancel.
  NCPolynomial d = cyclic_derivative(P("X[1,1;2]"), 1, T("1/2"));
  CHECK(d.is_zero());
  CHECK(flip_multiply(liberation_derivation(P("X[1,1;2]"), 1, T("1/2"))).is_zero());
  CHECK(cyclic_derivative(P("5"), 1, T("1/2")).is_zero());
  CHECK(cyclic_derivative(P("X[1,1;1]"), 1, T("1")).is_zero());
}

TEST_CASE("cyclic derivative equals the rotated commutator sum") {
  // theta(delta(w)) = sum over rotated letters l of V*(k,t_l - s)[R_l, x_l]V(k,t_l - s)
  // with R_l the cyclic rotation of w that starts right after l; after the
  // time-shift substitution the inner commutator becomes
  // [V* Pi^s(R_l) V, X(i_l, j_l, s)].
  std::mt19937_64 rng(8);
  const int n = 2;
  for (int r = 0; r < 60; ++r) {
    Word w = random_x_word(rng, 1 + int(rng() % 6));
    int k = 1 + int(rng() % n);
    Time s = testing::random_time(rng);
    NCPolynomial plain, shifted;
    for (std::size_t l = 0; l < w.size(); ++l) {
      const Letter &x = w[l];
      if (x.i != k || x.t < s) continue;
      Word R(w.begin() + std::ptrdiff_t(l + 1), w.end());
      R.insert(R.end(), w.begin(), w.begin() + std::ptrdiff_t(l));
      NCPolynomial v = NCPolynomial(Word{Letter::v(k, x.t - s)});
      NCPolynomial vs = NCPolynomial(Word{Letter::vstar(k, x.t - s)});
      NCPolynomial rot(R), xl(Word{x});
      plain += vs * (rot * xl - xl * rot) * v;
      NCPolynomial inner = vs * pi_s_substitution(rot, s, n) * v;
      NCPolynomial xs(Word{Letter::x(x.i, x.j, s)});
      shifted += inner * xs - xs * inner;
    }
    NCPolynomial d = cyclic_derivative(NCPolynomial(w), k, s);
    CHECK(d.max_abs_diff(plain) == 0.0);
    CHECK(pi_s_substitution(d, s, n).max_abs_diff(shifted) < 1e-12);
  }
}

TEST_CASE("cyclic derivative of a self-adjoint polynomial is skew-adjoint") {
  std::mt19937_64 rng(9);
  for (int r = 0; r < 20; ++r) {
    NCPolynomial p = random_x_polynomial(rng, 4, 4);
    p = p + p.adjoint();
    Time s = testing::random_time(rng);
    for (int k = 1; k <= 2; ++k) {
      NCPolynomial d = cyclic_derivative(p, k, s);
      CHECK(d.max_abs_diff(Complex(-1) * d.adjoint()) < 1e-12);
      NCPolynomial id = Complex(0, 1) * d;
      CHECK(id.max_abs_diff(id.adjoint()) < 1e-12);
    }
  }
}

TEST_CASE("time-shift substitution") {
  CHECK(pi_s_substitution(P("X[3,1;2]"), T("1"), 2) == P("X[3,1;2]"));
  CHECK(pi_s_substitution(P("X[1,1;2]"), T("0"), 2) == P("V[1;2]X[1,1;0]V*[1;2]"));
  CHECK(pi_s_substitution(P("X[1,1;1]"), T("3/2"), 2) == P("X[1,1;1]"));
  CHECK(pi_s_substitution(P("X[2,1;2]"), T("1/2"), 2) == P("V[2;3/2]X[2,1;1/2]V*[2;3/2]"));
  CHECK(pi_s_substitution(P("V[1;1]"), T("1/2"), 2) == P("V[1;1]"));
  std::mt19937_64 rng(10);
  for (int r = 0; r < 30; ++r) {
    NCPolynomial p = random_x_polynomial(rng, 4, 4);
    CHECK(pi_s_substitution(p, Time(2), 2) == p);
  }
}
