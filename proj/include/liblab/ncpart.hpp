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

#ifndef LIBLAB_NCPART_HPP
#define LIBLAB_NCPART_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

namespace liblab {

constexpr int kMaxNCSize = 14;

// Partition of {0,...,n-1}; blocks are labelled in order of their minima.
// Text form is 1-based, e.g. "{1,4|2,3}".
class SetPartition {
 public:
  SetPartition() = default;
  explicit SetPartition(const std::vector<int> &block_of);
  static SetPartition from_blocks(const std::vector<std::vector<int>> &blocks, int n);

  int size() const { return int(label_.size()); }
  int num_blocks() const { return nblocks_; }
  int block_of(int k) const { return label_[k]; }
  std::vector<std::vector<int>> blocks() const;
  bool is_noncrossing() const;

  std::string str() const;
  static SetPartition parse(const std::string &text);

  friend bool operator==(const SetPartition &, const SetPartition &) = default;
  friend auto operator<=>(const SetPartition &a, const SetPartition &b) {
    return a.label_ <=> b.label_;
  }

 private:
  std::vector<unsigned char> label_;
  int nblocks_ = 0;
};

std::uint64_t catalan(int n);

void for_each_nc(int n, const std::function<void(const SetPartition &)> &visit);
std::vector<SetPartition> enumerate_nc(int n);

// Kreweras complement: point k of the complement sits between k and k+1.
SetPartition kreweras(const SetPartition &pi);

// Moebius function mu(pi, 1_n) on the noncrossing lattice.
double mobius_to_top(const SetPartition &pi);

// Free cumulants of an indexed family from its mixed moments. Arguments are
// integer ids; moment(ids) must return phi(a_{ids[0]} ... a_{ids[r-1]}).
// Cumulants are computed by exact Moebius inversion (first-block recursion)
// and memoized.
class CumulantCalculator {
 public:
  using Complex = std::complex<double>;
  using MomentFn = std::function<Complex(const std::vector<int> &)>;

  explicit CumulantCalculator(MomentFn moment) : moment_(std::move(moment)) {}

  Complex moment(const std::vector<int> &ids);
  Complex cumulant(const std::vector<int> &ids);
  Complex partition_cumulant(const SetPartition &pi, const std::vector<int> &ids);
  Complex partition_moment(const SetPartition &pi, const std::vector<int> &ids);

 private:
  MomentFn moment_;
  std::map<std::vector<int>, Complex> mcache_, kcache_;
};

// Forward transform: phi(a_1...a_n) = sum over NC(n) of products of cumulants.
std::complex<double> moment_from_cumulants(
    const std::function<std::complex<double>(const std::vector<int> &)> &cumulant,
    const std::vector<int> &ids);

}  // namespace liblab

#endif
