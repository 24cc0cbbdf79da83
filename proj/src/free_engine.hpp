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

#ifndef LIBLAB_SRC_FREE_ENGINE_HPP
#define LIBLAB_SRC_FREE_ENGINE_HPP

#include <complex>
#include <cstdint>
#include <functional>
#include <map>
#include <unordered_map>
#include <utility>
#include <vector>

namespace liblab::detail {

using Complex = std::complex<double>;

template <class L>
struct SeqHash {
  std::size_t operator()(const std::vector<L> &s) const noexcept {
    std::size_t h = 0x9e3779b97f4a7c15ull ^ s.size();
    for (const L &l : s) h = (h ^ l.hash()) * 0x100000001b3ull;
    return h;
  }
};

// Trace of a word in a free product of algebras. Each letter belongs to one
// algebra (its colour); the moments within a single algebra come from the
// oracle. Mixed moments are reduced with the first-block decomposition of
// noncrossing partitions:
//   tau(e_1 ... e_K) = sum_{S first block, same colour} kappa(e_S) prod tau(gaps)
// where the within-colour cumulants are obtained by Moebius inversion.
template <class L>
class FreeEngine {
 public:
  using Seq = std::vector<L>;
  using ColorFn = std::function<int(const L &)>;
  using OracleFn = std::function<Complex(int, const Seq &)>;

  FreeEngine(ColorFn color, OracleFn oracle)
      : color_(std::move(color)), oracle_(std::move(oracle)) {}

  Complex evaluate(const Seq &w) {
    if (w.empty()) return 1.0;
    std::size_t n = w.size();
    int c0 = color_(w.front());
    bool single = true;
    for (const L &l : w)
      if (color_(l) != c0) {
        single = false;
        break;
      }
    if (single) return oracle(c0, w);

    // Rotate so that the first and the last letter have different colours.
    Seq rot;
    if (color_(w.back()) == c0) {
      std::size_t p = n;
      while (p > 0 && color_(w[p - 1]) == c0) --p;
      rot.reserve(n);
      rot.insert(rot.end(), w.begin() + p, w.end());
      rot.insert(rot.end(), w.begin(), w.begin() + p);
    } else {
      rot = w;
    }
    if (auto it = memo_.find(rot); it != memo_.end()) return it->second;

    std::vector<std::pair<std::size_t, std::size_t>> runs;  // [begin, end)
    std::vector<int> colors;
    for (std::size_t a = 0; a < n;) {
      std::size_t b = a + 1;
      int c = color_(rot[a]);
      while (b < n && color_(rot[b]) == c) ++b;
      runs.emplace_back(a, b);
      colors.push_back(c);
      a = b;
    }
    const int K = int(runs.size());
    const int cf = colors[0];
    std::vector<int> same;  // positions > 0 sharing the first colour
    for (int p = 1; p < K; ++p)
      if (colors[p] == cf) same.push_back(p);

    auto element = [&](int p) { return Seq(rot.begin() + runs[p].first, rot.begin() + runs[p].second); };
    auto span = [&](int p, int q) {  // elements p..q-1 concatenated
      return Seq(rot.begin() + runs[p].first, rot.begin() + runs[q - 1].second);
    };

    Complex total = 0.0;
    const std::uint32_t nmask = 1u << same.size();
    for (std::uint32_t mask = 0; mask < nmask; ++mask) {
      std::vector<int> S{0};
      for (std::size_t b = 0; b < same.size(); ++b)
        if (mask & (1u << b)) S.push_back(same[b]);
      Complex gaps = 1.0;
      for (std::size_t q = 0; q < S.size() && gaps != Complex(0); ++q) {
        int from = S[q] + 1, to = q + 1 < S.size() ? S[q + 1] : K;
        if (from < to) gaps *= evaluate(span(from, to));
      }
      if (gaps == Complex(0)) continue;
      std::vector<Seq> elems;
      elems.reserve(S.size());
      for (int p : S) elems.push_back(element(p));
      total += cumulant(cf, elems) * gaps;
    }
    memo_.emplace(std::move(rot), total);
    return total;
  }

  Complex oracle(int c, const Seq &w) {
    if (w.empty()) return 1.0;
    if (auto it = omemo_.find(w); it != omemo_.end()) return it->second;
    Complex v = oracle_(c, w);
    omemo_.emplace(w, v);
    return v;
  }

  // Free cumulant of elements of one colour.
  Complex cumulant(int c, const std::vector<Seq> &elems) {
    const int r = int(elems.size());
    if (r == 1) return oracle(c, elems[0]);
    auto key = std::make_pair(c, elems);
    if (auto it = kmemo_.find(key); it != kmemo_.end()) return it->second;
    auto cat = [&](int p, int q) {
      Seq s;
      for (int k = p; k < q; ++k) s.insert(s.end(), elems[k].begin(), elems[k].end());
      return s;
    };
    Complex v = oracle(c, cat(0, r));
    const std::uint32_t full = (1u << (r - 1)) - 1;
    for (std::uint32_t mask = 0; mask < full; ++mask) {
      std::vector<Seq> sub{elems[0]};
      Complex rest = 1.0;
      int prev = 0;
      for (int k = 1; k < r; ++k)
        if (mask & (1u << (k - 1))) {
          sub.push_back(elems[k]);
          if (k > prev + 1) rest *= oracle(c, cat(prev + 1, k));
          prev = k;
        }
      if (prev + 1 < r) rest *= oracle(c, cat(prev + 1, r));
      if (rest == Complex(0)) continue;
      v -= cumulant(c, sub) * rest;
    }
    kmemo_.emplace(std::move(key), v);
    return v;
  }

  void clear() {
    memo_.clear();
    omemo_.clear();
    kmemo_.clear();
  }

 private:
  ColorFn color_;
  OracleFn oracle_;
  std::unordered_map<Seq, Complex, SeqHash<L>> memo_, omemo_;
  std::map<std::pair<int, std::vector<Seq>>, Complex> kmemo_;
};

}  // namespace liblab::detail

#endif
