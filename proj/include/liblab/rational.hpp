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

#ifndef LIBLAB_RATIONAL_HPP
#define LIBLAB_RATIONAL_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace liblab {

// Exact non-negative-friendly rational time value. Times must compare exactly
// (cancellation rules and grid lookups depend on equality), so they are never
// stored as floating point.
class Time {
 public:
  Time() = default;
  Time(std::int64_t n) : num_(n), den_(1) {}
  Time(std::int64_t n, std::int64_t d);

  std::int64_t num() const { return num_; }
  std::int64_t den() const { return den_; }
  double to_double() const { return double(num_) / double(den_); }
  bool is_zero() const { return num_ == 0; }

  Time operator+(const Time &o) const;
  Time operator-(const Time &o) const;
  Time operator*(const Time &o) const;
  Time operator/(const Time &o) const;

  friend bool operator==(const Time &a, const Time &b) {
    return a.num_ == b.num_ && a.den_ == b.den_;
  }
  friend std::strong_ordering operator<=>(const Time &a, const Time &b);

  // Accepts "3", "3/4", "0.125", "-1/2".
  static Time parse(const std::string &text);
  std::string str() const;

 private:
  std::int64_t num_ = 0;
  std::int64_t den_ = 1;
};

inline Time tmax(const Time &a, const Time &b) { return a < b ? b : a; }
inline Time tmin(const Time &a, const Time &b) { return a < b ? a : b; }
// (a - b) v 0
inline Time positive_part_diff(const Time &a, const Time &b) {
  return a < b ? Time(0) : a - b;
}

}  // namespace liblab

template <>
struct std::hash<liblab::Time> {
  std::size_t operator()(const liblab::Time &t) const noexcept {
    return std::hash<std::int64_t>()(t.num()) * 1000003u ^
           std::hash<std::int64_t>()(t.den());
  }
};

#endif
