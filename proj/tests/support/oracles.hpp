// Copyright 2026  The stutterkit Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

// Independent reference implementations used by the tests. They are
// deliberately naive and share no code with the library.

#pragma once

#include <algorithm>
#include <cstddef>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

using Seq = std::vector<std::string>;

// Plain recursive edit distance with memoization, written from the
// definition: the cheapest of dropping a ref word, dropping a hyp word, or
// consuming one of each.
inline int EditDistance(const Seq &ref, const Seq &hyp) {
  std::map<std::pair<std::size_t, std::size_t>, int> memo;
  auto rec = [&](auto &&self, std::size_t i, std::size_t j) -> int {
    if (i == ref.size()) return static_cast<int>(hyp.size() - j);
    if (j == hyp.size()) return static_cast<int>(ref.size() - i);
    auto key = std::make_pair(i, j);
    if (auto it = memo.find(key); it != memo.end()) return it->second;
    int best = self(self, i + 1, j + 1) + (ref[i] == hyp[j] ? 0 : 1);
    best = std::min(best, self(self, i + 1, j) + 1);
    best = std::min(best, self(self, i, j + 1) + 1);
    memo[key] = best;
    return best;
  };
  return rec(rec, 0, 0);
}

// Exhaustive search over every monotone alignment for very short inputs.
// Returns the minimal number of errors.
inline int BruteForceErrors(const Seq &ref, const Seq &hyp) {
  int best = static_cast<int>(ref.size() + hyp.size());
  auto rec = [&](auto &&self, std::size_t i, std::size_t j, int cost) -> void {
    if (cost >= best) return;
    if (i == ref.size() && j == hyp.size()) {
      best = cost;
      return;
    }
    if (i < ref.size() && j < hyp.size()) self(self, i + 1, j + 1, cost + (ref[i] != hyp[j]));
    if (i < ref.size()) self(self, i + 1, j, cost + 1);
    if (j < hyp.size()) self(self, i, j + 1, cost + 1);
  };
  rec(rec, 0, 0, 0);
  return best;
}

inline bool IsSubsequence(const Seq &small, const Seq &big) {
  std::size_t i = 0;
  for (std::size_t j = 0; j < big.size() && i < small.size(); ++j) {
    if (big[j] == small[i]) ++i;
  }
  return i == small.size();
}

// Removes every position inside one of the half-open spans.
inline Seq DeletePositions(const Seq &tokens,
                           const std::vector<std::pair<std::size_t, std::size_t>> &spans) {
  std::vector<bool> drop(tokens.size(), false);
  for (auto [b, e] : spans) {
    for (std::size_t k = b; k < e && k < tokens.size(); ++k) drop[k] = true;
  }
  Seq out;
  for (std::size_t k = 0; k < tokens.size(); ++k) {
    if (!drop[k]) out.push_back(tokens[k]);
  }
  return out;
}

// Greedy-match BERTScore straight from the definition, on raw nested loops.
struct Prf {
  double p, r, f;
};
inline Prf BertScore(const std::vector<std::vector<double>> &hyp,
                     const std::vector<std::vector<double>> &ref) {
  auto dot = [](const std::vector<double> &a, const std::vector<double> &b) {
    double s = 0;
    for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
    return s;
  };
  double r = 0, p = 0;
  for (const auto &h : hyp) {
    double m = -2;
    for (const auto &x : ref) m = std::max(m, dot(h, x));
    r += m;
  }
  for (const auto &x : ref) {
    double m = -2;
    for (const auto &h : hyp) m = std::max(m, dot(h, x));
    p += m;
  }
  r /= static_cast<double>(hyp.size());
  p /= static_cast<double>(ref.size());
  return {p, r, (p + r) == 0 ? 0.0 : 2 * p * r / (p + r)};
}

}  // namespace oracle
