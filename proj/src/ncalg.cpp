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

#include "liblab/ncalg.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "liblab/error.hpp"

namespace liblab {

Letter Letter::adjoint() const {
  Letter a = *this;
  if (kind == LetterKind::V) a.kind = LetterKind::VStar;
  else if (kind == LetterKind::VStar) a.kind = LetterKind::V;
  return a;
}

std::string Letter::str() const {
  switch (kind) {
    case LetterKind::X:
      return "X[" + std::to_string(i) + "," + std::to_string(j) + ";" + t.str() + "]";
    case LetterKind::V:
      return "V[" + std::to_string(i) + ";" + t.str() + "]";
    case LetterKind::VStar:
      return "V*[" + std::to_string(i) + ";" + t.str() + "]";
  }
  return {};
}

Word canonical(const Word &w) {
  Word out;
  out.reserve(w.size());
  for (const Letter &l : w) {
    if (!l.is_x() && l.t.is_zero()) continue;
    if (!l.is_x() && !out.empty()) {
      const Letter &b = out.back();
      if (!b.is_x() && b.i == l.i && b.t == l.t && b.kind != l.kind) {
        out.pop_back();
        continue;
      }
    }
    out.push_back(l);
  }
  return out;
}

Word adjoint(const Word &w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(it->adjoint());
  return out;
}

Word concat(const Word &a, const Word &b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

bool is_x_word(const Word &w) {
  for (const Letter &l : w)
    if (!l.is_x()) return false;
  return true;
}

std::string word_str(const Word &w) {
  if (w.empty()) return "1";
  std::string s;
  for (const Letter &l : w) s += l.str();
  return s;
}

namespace {

class Cursor {
 public:
  explicit Cursor(const std::string &s) : s_(s) {}
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool done() {
    skip();
    return pos_ >= s_.size();
  }
  char peek() {
    skip();
    return pos_ < s_.size() ? s_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }
  bool accept(const std::string &tok) {
    skip();
    if (s_.compare(pos_, tok.size(), tok) == 0) {
      pos_ += tok.size();
      return true;
    }
    return false;
  }
  void expect(char c) {
    if (!accept(c)) error(std::string("expected '") + c + "'");
  }
  int integer() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (start == pos_) error("expected integer");
    return std::stoi(s_.substr(start, pos_ - start));
  }
  Time time() {
    skip();
    std::size_t start = pos_;
    while (pos_ < s_.size() && s_[pos_] != ']') ++pos_;
    return Time::parse(s_.substr(start, pos_ - start));
  }
  double number() {
    skip();
    const char *begin = s_.c_str() + pos_;
    char *end = nullptr;
    double v = std::strtod(begin, &end);
    if (end == begin) error("expected number");
    pos_ += std::size_t(end - begin);
    return v;
  }
  bool at_letter() {
    char c = peek();
    return c == 'X' || c == 'V';
  }
  Letter letter() {
    if (accept("X[")) {
      int i = integer();
      expect(',');
      int j = integer();
      expect(';');
      Time t = time();
      expect(']');
      return Letter::x(i, j, t);
    }
    bool star = accept("V*[");
    if (!star && !accept("V[")) error("expected letter");
    int i = integer();
    expect(';');
    Time t = time();
    expect(']');
    return star ? Letter::vstar(i, t) : Letter::v(i, t);
  }
  [[noreturn]] void error(const std::string &msg) {
    fail(ErrorCode::ParseError, msg + " at offset " + std::to_string(pos_) + " in '" + s_ + "'");
  }

 private:
  const std::string &s_;
  std::size_t pos_ = 0;
};

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

Word parse_word(const std::string &text) {
  Cursor c(text);
  Word w;
  if (c.accept('1')) {
    if (!c.done()) c.error("trailing characters");
    return w;
  }
  while (!c.done()) w.push_back(c.letter());
  return w;
}

NCPolynomial::NCPolynomial(Complex c) { add_term({}, c); }
NCPolynomial::NCPolynomial(const Word &w, Complex c) { add_term(w, c); }

std::size_t NCPolynomial::degree() const {
  std::size_t d = 0;
  for (const auto &[w, c] : terms_) d = std::max(d, w.size());
  return d;
}

bool NCPolynomial::is_x_polynomial() const {
  for (const auto &[w, c] : terms_)
    if (!is_x_word(w)) return false;
  return true;
}

std::set<Time> NCPolynomial::times() const {
  std::set<Time> out;
  for (const auto &[w, c] : terms_)
    for (const Letter &l : w) out.insert(l.t);
  return out;
}

Complex NCPolynomial::coefficient(const Word &w) const {
  auto it = terms_.find(canonical(w));
  return it == terms_.end() ? Complex(0) : it->second;
}

void NCPolynomial::add_term(const Word &w, Complex c) {
  if (c == Complex(0)) return;
  Word cw = canonical(w);
  auto [it, inserted] = terms_.try_emplace(std::move(cw), c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0)) terms_.erase(it);
  }
}

NCPolynomial &NCPolynomial::operator+=(const NCPolynomial &o) {
  for (const auto &[w, c] : o.terms_) add_term(w, c);
  return *this;
}

NCPolynomial &NCPolynomial::operator-=(const NCPolynomial &o) {
  for (const auto &[w, c] : o.terms_) add_term(w, -c);
  return *this;
}

NCPolynomial &NCPolynomial::operator*=(Complex c) {
  if (c == Complex(0)) {
    terms_.clear();
    return *this;
  }
  for (auto &[w, v] : terms_) v *= c;
  return *this;
}

NCPolynomial operator*(const NCPolynomial &a, const NCPolynomial &b) {
  NCPolynomial out;
  for (const auto &[wa, ca] : a.terms_)
    for (const auto &[wb, cb] : b.terms_) out.add_term(concat(wa, wb), ca * cb);
  return out;
}

NCPolynomial NCPolynomial::adjoint() const {
  NCPolynomial out;
  for (const auto &[w, c] : terms_) out.add_term(liblab::adjoint(w), std::conj(c));
  return out;
}

NCPolynomial NCPolynomial::pruned(double tol) const {
  NCPolynomial out;
  for (const auto &[w, c] : terms_)
    if (std::abs(c) > tol) out.terms_.emplace(w, c);
  return out;
}

double NCPolynomial::max_abs_diff(const NCPolynomial &o) const {
  double m = 0;
  for (const auto &[w, c] : (*this - o).terms_) m = std::max(m, std::abs(c));
  return m;
}

std::string NCPolynomial::str() const {
  if (terms_.empty()) return "0";
  std::string s;
  bool first = true;
  for (const auto &[w, c] : terms_) {
    if (!first) s += " + ";
    first = false;
    std::string coef = c.imag() == 0.0
                           ? format_double(c.real())
                           : "(" + format_double(c.real()) + "," + format_double(c.imag()) + ")";
    if (w.empty()) s += coef;
    else if (c == Complex(1)) s += word_str(w);
    else s += coef + "*" + word_str(w);
  }
  return s;
}

NCPolynomial NCPolynomial::parse(const std::string &text) {
  Cursor cur(text);
  NCPolynomial out;
  if (cur.done()) cur.error("empty polynomial");
  double sign = 1;
  if (cur.accept('-')) sign = -1;
  while (true) {
    Complex coef = 1.0;
    bool have_coef = false;
    char c = cur.peek();
    if (c == '(') {
      cur.expect('(');
      double re = cur.number();
      cur.expect(',');
      double im = cur.number();
      cur.expect(')');
      coef = Complex(re, im);
      have_coef = true;
    } else if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '+' || c == '-') {
      coef = cur.number();
      have_coef = true;
    }
    Word w;
    if (have_coef) {
      if (cur.accept('*')) {
        if (!cur.at_letter()) cur.error("expected word after '*'");
      }
    } else if (!cur.at_letter()) {
      cur.error("expected term");
    }
    while (cur.at_letter()) w.push_back(cur.letter());
    out.add_term(w, sign * coef);
    if (cur.done()) break;
    if (cur.accept('+')) sign = 1;
    else if (cur.accept('-')) sign = -1;
    else cur.error("expected '+' or '-'");
  }
  return out;
}

void TensorPolynomial::add_term(const Word &a, const Word &b, Complex c) {
  if (c == Complex(0)) return;
  auto key = std::make_pair(canonical(a), canonical(b));
  auto [it, inserted] = terms_.try_emplace(std::move(key), c);
  if (!inserted) {
    it->second += c;
    if (it->second == Complex(0)) terms_.erase(it);
  }
}

TensorPolynomial &TensorPolynomial::operator+=(const TensorPolynomial &o) {
  for (const auto &[k, c] : o.terms_) add_term(k.first, k.second, c);
  return *this;
}

namespace {

void require_x(const NCPolynomial &p) {
  if (!p.is_x_polynomial())
    fail(ErrorCode::NonXPolynomial, "derivation applied to a polynomial containing V letters");
}

}  // namespace

TensorPolynomial liberation_derivation(const NCPolynomial &p, int k, Time s) {
  require_x(p);
  TensorPolynomial out;
  for (const auto &[w, c] : p.terms()) {
    for (std::size_t l = 0; l < w.size(); ++l) {
      const Letter &x = w[l];
      if (x.i != k || x.t < s) continue;
      Time d = x.t - s;
      Word prefix(w.begin(), w.begin() + l), suffix(w.begin() + l + 1, w.end());
      // A x v (x) v* B  -  A v (x) v* x B
      Word a1 = prefix, b1{Letter::vstar(k, d)};
      a1.push_back(x);
      a1.push_back(Letter::v(k, d));
      b1.insert(b1.end(), suffix.begin(), suffix.end());
      Word a2 = prefix, b2{Letter::vstar(k, d), x};
      a2.push_back(Letter::v(k, d));
      b2.insert(b2.end(), suffix.begin(), suffix.end());
      out.add_term(a1, b1, c);
      out.add_term(a2, b2, -c);
    }
  }
  return out;
}

NCPolynomial flip_multiply(const TensorPolynomial &t) {
  NCPolynomial out;
  for (const auto &[k, c] : t.terms()) out.add_term(concat(k.second, k.first), c);
  return out;
}

NCPolynomial cyclic_derivative(const NCPolynomial &p, int k, Time s) {
  return flip_multiply(liberation_derivation(p, k, s));
}

NCPolynomial pi_s_substitution(const NCPolynomial &p, Time s, int n_motions) {
  NCPolynomial out;
  for (const auto &[w, c] : p.terms()) {
    Word nw;
    nw.reserve(3 * w.size());
    for (const Letter &l : w) {
      if (l.is_x() && l.i >= 1 && l.i <= n_motions) {
        Time d = positive_part_diff(l.t, s);
        nw.push_back(Letter::v(l.i, d));
        nw.push_back(Letter::x(l.i, l.j, tmin(s, l.t)));
        nw.push_back(Letter::vstar(l.i, d));
      } else {
        nw.push_back(l);
      }
    }
    out.add_term(nw, c);
  }
  return out;
}

}  // namespace liblab
