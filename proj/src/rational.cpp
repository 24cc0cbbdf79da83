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

#include "liblab/rational.hpp"

#include <cctype>
#include <numeric>

#include "liblab/error.hpp"

namespace liblab {

namespace {

using i128 = __int128;

Time make(i128 n, i128 d) {
  if (d == 0) fail(ErrorCode::DomainError, "time with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  i128 a = n < 0 ? -n : n, b = d;
  while (b != 0) {
    i128 r = a % b;
    a = b;
    b = r;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  const i128 lim = i128(INT64_MAX);
  if (n > lim || -n > lim || d > lim)
    fail(ErrorCode::DomainError, "time arithmetic overflow");
  return Time(std::int64_t(n), std::int64_t(d));
}

}  // namespace

Time::Time(std::int64_t n, std::int64_t d) {
  if (d == 0) fail(ErrorCode::DomainError, "time with zero denominator");
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n, d);
  if (g > 1) {
    n /= g;
    d /= g;
  }
  num_ = n;
  den_ = d;
}

Time Time::operator+(const Time &o) const {
  return make(i128(num_) * o.den_ + i128(o.num_) * den_, i128(den_) * o.den_);
}
Time Time::operator-(const Time &o) const {
  return make(i128(num_) * o.den_ - i128(o.num_) * den_, i128(den_) * o.den_);
}
Time Time::operator*(const Time &o) const {
  return make(i128(num_) * o.num_, i128(den_) * o.den_);
}
Time Time::operator/(const Time &o) const {
  return make(i128(num_) * o.den_, i128(den_) * o.num_);
}

std::strong_ordering operator<=>(const Time &a, const Time &b) {
  i128 l = i128(a.num_) * b.den_, r = i128(b.num_) * a.den_;
  if (l < r) return std::strong_ordering::less;
  if (l > r) return std::strong_ordering::greater;
  return std::strong_ordering::equal;
}

Time Time::parse(const std::string &text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) fail(ErrorCode::ParseError, "empty time literal");
  auto parse_int = [&](const std::string &p) -> i128 {
    if (p.empty()) fail(ErrorCode::ParseError, "bad time literal '" + text + "'");
    i128 v = 0;
    for (char c : p) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        fail(ErrorCode::ParseError, "bad time literal '" + text + "'");
      v = v * 10 + (c - '0');
      if (v > i128(INT64_MAX))
        fail(ErrorCode::ParseError, "time literal too large '" + text + "'");
    }
    return v;
  };
  bool neg = false;
  if (s[0] == '-' || s[0] == '+') {
    neg = s[0] == '-';
    s = s.substr(1);
  }
  i128 n, d = 1;
  if (auto slash = s.find('/'); slash != std::string::npos) {
    n = parse_int(s.substr(0, slash));
    d = parse_int(s.substr(slash + 1));
  } else if (auto dot = s.find('.'); dot != std::string::npos) {
    std::string ip = s.substr(0, dot), fp = s.substr(dot + 1);
    if (fp.size() > 17) fail(ErrorCode::ParseError, "too many decimals in '" + text + "'");
    n = ip.empty() ? 0 : parse_int(ip);
    for (char c : fp) {
      if (!std::isdigit(static_cast<unsigned char>(c)))
        fail(ErrorCode::ParseError, "bad time literal '" + text + "'");
      n = n * 10 + (c - '0');
      d *= 10;
    }
  } else {
    n = parse_int(s);
  }
  return make(neg ? -n : n, d);
}

std::string Time::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

const char *error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::Ok: return "Ok";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::NonXPolynomial: return "NonXPolynomial";
    case ErrorCode::SizeLimit: return "SizeLimit";
    case ErrorCode::DegreeOverflow: return "DegreeOverflow";
    case ErrorCode::UnsupportedWord: return "UnsupportedWord";
    case ErrorCode::UnsupportedState: return "UnsupportedState";
    case ErrorCode::DomainError: return "DomainError";
    case ErrorCode::GridMiss: return "GridMiss";
    case ErrorCode::IncompatibleN: return "IncompatibleN";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace liblab
