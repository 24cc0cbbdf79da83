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

#include "liblab/ncpart.hpp"

#include <algorithm>
#include <cctype>

#include "liblab/error.hpp"

namespace liblab {

SetPartition::SetPartition(const std::vector<int> &block_of) {
  if (int(block_of.size()) > 255) fail(ErrorCode::SizeLimit, "partition too large");
  std::map<int, int> relabel;
  label_.resize(block_of.size());
  for (std::size_t k = 0; k < block_of.size(); ++k) {
    auto [it, fresh] = relabel.try_emplace(block_of[k], int(relabel.size()));
    label_[k] = static_cast<unsigned char>(it->second);
  }
  nblocks_ = int(relabel.size());
}

SetPartition SetPartition::from_blocks(const std::vector<std::vector<int>> &blocks, int n) {
  std::vector<int> lab(std::size_t(n), -1);
  for (std::size_t b = 0; b < blocks.size(); ++b)
    for (int k : blocks[b]) {
      if (k < 0 || k >= n || lab[k] != -1)
        fail(ErrorCode::InvalidArgument, "blocks do not form a partition");
      lab[k] = int(b);
    }
  for (int v : lab)
    if (v == -1) fail(ErrorCode::InvalidArgument, "blocks do not cover the ground set");
  return SetPartition(lab);
}

std::vector<std::vector<int>> SetPartition::blocks() const {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(nblocks_));
  for (std::size_t k = 0; k < label_.size(); ++k) out[label_[k]].push_back(int(k));
  return out;
}

bool SetPartition::is_noncrossing() const {
  int n = size();
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      for (int c = b + 1; c < n; ++c)
        for (int d = c + 1; d < n; ++d)
          if (label_[a] == label_[c] && label_[b] == label_[d] && label_[a] != label_[b])
            return false;
  return true;
}

std::string SetPartition::str() const {
  std::string s = "{";
  bool first_block = true;
  for (const auto &b : blocks()) {
    if (!first_block) s += "|";
    first_block = false;
    for (std::size_t k = 0; k < b.size(); ++k) {
      if (k) s += ",";
      s += std::to_string(b[k] + 1);
    }
  }
  return s + "}";
}

SetPartition SetPartition::parse(const std::string &text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.size() < 2 || s.front() != '{' || s.back() != '}')
    fail(ErrorCode::ParseError, "partition must be written as {..|..}");
  s = s.substr(1, s.size() - 2);
  std::vector<std::vector<int>> blocks(1);
  int n = 0;
  std::string num;
  auto flush = [&] {
    if (num.empty()) fail(ErrorCode::ParseError, "empty element in partition '" + text + "'");
    int v = std::stoi(num) - 1;
    blocks.back().push_back(v);
    n = std::max(n, v + 1);
    num.clear();
  };
  if (s.empty()) return SetPartition();
  for (char c : s) {
    if (std::isdigit(static_cast<unsigned char>(c))) num += c;
    else if (c == ',') flush();
    else if (c == '|') {
      flush();
      blocks.emplace_back();
    } else
      fail(ErrorCode::ParseError, "bad character in partition '" + text + "'");
  }
  flush();
  return from_blocks(blocks, n);
}

std::uint64_t catalan(int n) {
  std::uint64_t c = 1;
  for (int k = 0; k < n; ++k) c = c * 2 * (2 * k + 1) / (k + 2);
  return c;
}

namespace {

struct Interval {
  int a, b;  // [a, b)
};

void fill(std::vector<int> &lab, int &next, std::vector<Interval> &todo,
          const std::function<void(const SetPartition &)> &visit) {
  while (!todo.empty() && todo.back().a >= todo.back().b) todo.pop_back();
  if (todo.empty()) {
    visit(SetPartition(lab));
    return;
  }
  Interval iv = todo.back();
  todo.pop_back();
  int rest = iv.b - iv.a - 1;
  int me = next++;
  // Each subset of (a, b) joins the block of a; the gaps are independent.
  for (std::uint32_t mask = 0; mask < (1u << rest); ++mask) {
    std::vector<Interval> saved = todo;
    lab[iv.a] = me;
    int prev = iv.a;
    for (int k = 0; k < rest; ++k) {
      if (mask & (1u << k)) {
        int pos = iv.a + 1 + k;
        lab[pos] = me;
        todo.push_back({prev + 1, pos});
        prev = pos;
      }
    }
    todo.push_back({prev + 1, iv.b});
    fill(lab, next, todo, visit);
    todo = std::move(saved);
  }
  --next;
  todo.push_back(iv);
}

}  // namespace

void for_each_nc(int n, const std::function<void(const SetPartition &)> &visit) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "negative partition size");
  if (n > kMaxNCSize) fail(ErrorCode::SizeLimit, "NC(n) enumeration limited to n <= 14");
  std::vector<int> lab(std::size_t(n), 0);
  int next = 0;
  std::vector<Interval> todo{{0, n}};
  fill(lab, next, todo, visit);
}

std::vector<SetPartition> enumerate_nc(int n) {
  std::vector<SetPartition> out;
  if (n <= kMaxNCSize && n >= 0) out.reserve(catalan(n));
  for_each_nc(n, [&](const SetPartition &p) { out.push_back(p); });
  return out;
}

SetPartition kreweras(const SetPartition &pi) {
  int n = pi.size();
  std::vector<int> next(static_cast<std::size_t>(n)), prev(static_cast<std::size_t>(n));
  for (const auto &b : pi.blocks())
    for (std::size_t k = 0; k < b.size(); ++k) {
      int nx = b[(k + 1) % b.size()];
      next[b[k]] = nx;
      prev[nx] = b[k];
    }
  // K = pi^{-1} o gamma with gamma(k) = k + 1 mod n.
  std::vector<int> lab(std::size_t(n), -1);
  int nb = 0;
  for (int k = 0; k < n; ++k) {
    if (lab[k] != -1) continue;
    int x = k;
    while (lab[x] == -1) {
      lab[x] = nb;
      x = prev[(x + 1) % n];
    }
    ++nb;
  }
  return SetPartition(lab);
}

double mobius_to_top(const SetPartition &pi) {
  double m = 1;
  for (const auto &b : kreweras(pi).blocks()) {
    int s = int(b.size()) - 1;
    m *= (s % 2 ? -1.0 : 1.0) * double(catalan(s));
  }
  return m;
}

CumulantCalculator::Complex CumulantCalculator::moment(const std::vector<int> &ids) {
  if (ids.empty()) return 1.0;
  auto it = mcache_.find(ids);
  if (it != mcache_.end()) return it->second;
  Complex v = moment_(ids);
  mcache_.emplace(ids, v);
  return v;
}

CumulantCalculator::Complex CumulantCalculator::cumulant(const std::vector<int> &ids) {
  int r = int(ids.size());
  if (r == 0) return 0.0;
  if (r > kMaxNCSize) fail(ErrorCode::SizeLimit, "cumulant order above 14");
  auto it = kcache_.find(ids);
  if (it != kcache_.end()) return it->second;
  Complex v = moment(ids);
  if (r > 1) {
    std::uint32_t full = (1u << (r - 1)) - 1;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
      std::vector<int> sub{ids[0]};
      Complex rest = 1.0;
      int prev = 0;
      for (int k = 1; k < r; ++k) {
        if (mask & (1u << (k - 1))) {
          sub.push_back(ids[k]);
          if (k > prev + 1)
            rest *= moment(std::vector<int>(ids.begin() + prev + 1, ids.begin() + k));
          prev = k;
        }
      }
      if (prev + 1 < r) rest *= moment(std::vector<int>(ids.begin() + prev + 1, ids.end()));
      if (rest == Complex(0)) continue;
      v -= cumulant(sub) * rest;
    }
  }
  kcache_.emplace(ids, v);
  return v;
}

CumulantCalculator::Complex CumulantCalculator::partition_cumulant(const SetPartition &pi,
                                                                  const std::vector<int> &ids) {
  Complex v = 1.0;
  for (const auto &b : pi.blocks()) {
    std::vector<int> sub;
    for (int k : b) sub.push_back(ids[k]);
    v *= cumulant(sub);
    if (v == Complex(0)) break;
  }
  return v;
}

CumulantCalculator::Complex CumulantCalculator::partition_moment(const SetPartition &pi,
                                                                const std::vector<int> &ids) {
  Complex v = 1.0;
  for (const auto &b : pi.blocks()) {
    std::vector<int> sub;
    for (int k : b) sub.push_back(ids[k]);
    v *= moment(sub);
  }
  return v;
}

std::complex<double> moment_from_cumulants(
    const std::function<std::complex<double>(const std::vector<int> &)> &cumulant,
    const std::vector<int> &ids) {
  std::complex<double> total = 0.0;
  for_each_nc(int(ids.size()), [&](const SetPartition &pi) {
    std::complex<double> v = 1.0;
    for (const auto &b : pi.blocks()) {
      std::vector<int> sub;
      for (int k : b) sub.push_back(ids[k]);
      v *= cumulant(sub);
    }
    total += v;
  });
  return total;
}

}  // namespace liblab
