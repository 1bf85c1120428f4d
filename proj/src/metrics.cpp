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

#include "stutterkit/metrics.hpp"

#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "stutterkit/error.hpp"

namespace stutterkit {

namespace {

// Deletes every open...close span (inclusive) whose body has at least
// `min_body` bytes; an unmatched opener is left in place.
std::string DeleteEnclosed(std::string_view s, char open, char close, std::size_t min_body) {
  std::string out;
  out.reserve(s.size());
  std::size_t i = 0;
  while (i < s.size()) {
    if (s[i] == open) {
      const auto end = s.find(close, i + 1);
      if (end != std::string_view::npos && end - i - 1 >= min_body) {
        i = end + 1;
        continue;
      }
    }
    out.push_back(s[i++]);
  }
  return out;
}

bool IsSeparator(UChar32 c) {
  constexpr uint32_t kDropMask = U_GC_M_MASK | U_GC_S_MASK | U_GC_P_MASK | U_GC_Z_MASK |
                                 U_GC_CC_MASK | U_GC_CF_MASK;
  return (U_GET_GC_MASK(c) & kDropMask) != 0 || u_isUWhiteSpace(c);
}

}  // namespace

NormalizedText Normalize(std::string_view raw) {
  NormalizedText out;
  out.original = std::string(raw);

  std::string stripped = DeleteEnclosed(raw, '[', ']', 0);
  stripped = DeleteEnclosed(stripped, '(', ')', 1);

  std::string lowered;
  icu::UnicodeString::fromUTF8(icu::StringPiece(stripped.data(),
                                                static_cast<int32_t>(stripped.size())))
      .toLower(icu::Locale::getRoot())
      .toUTF8String(lowered);

  std::string current;
  const auto flush = [&] {
    if (!current.empty()) out.tokens.push_back(std::move(current));
    current.clear();
  };
  const auto *bytes = reinterpret_cast<const uint8_t *>(lowered.data());
  const auto length = static_cast<int32_t>(lowered.size());
  int32_t i = 0;
  while (i < length) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(bytes, i, length, c);
    if (c < 0 || IsSeparator(c)) {
      flush();
      continue;
    }
    current.append(lowered, static_cast<std::size_t>(start), static_cast<std::size_t>(i - start));
  }
  flush();
  return out;
}

Alignment Align(std::span<const std::string> ref, std::span<const std::string> hyp) {
  const std::size_t m = ref.size();
  const std::size_t n = hyp.size();
  const std::size_t width = n + 1;
  std::vector<int> dist((m + 1) * width);
  const auto at = [&](std::size_t i, std::size_t j) -> int & { return dist[i * width + j]; };

  for (std::size_t i = 0; i <= m; ++i) at(i, 0) = static_cast<int>(i);
  for (std::size_t j = 0; j <= n; ++j) at(0, j) = static_cast<int>(j);
  for (std::size_t i = 1; i <= m; ++i) {
    for (std::size_t j = 1; j <= n; ++j) {
      const int diag = at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1);
      at(i, j) = std::min({diag, at(i - 1, j) + 1, at(i, j - 1) + 1});
    }
  }

  Alignment a;
  std::size_t i = m, j = n;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0) {
      const bool same = ref[i - 1] == hyp[j - 1];
      if (at(i, j) == at(i - 1, j - 1) + (same ? 0 : 1)) {
        a.ops.push_back({same ? EditOp::kMatch : EditOp::kSubstitute, i - 1, j - 1});
        (same ? a.counts.C : a.counts.S)++;
        --i;
        --j;
        continue;
      }
    }
    if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      a.ops.push_back({EditOp::kDelete, i - 1, std::nullopt});
      a.counts.D++;
      --i;
      continue;
    }
    a.ops.push_back({EditOp::kInsert, std::nullopt, j - 1});
    a.counts.I++;
    --j;
  }
  std::reverse(a.ops.begin(), a.ops.end());
  return a;
}

WerBreakdown Wer(const ErrorCounts &counts) {
  if (counts.ref_length() <= 0) {
    throw Error(ErrorKind::kEmptyReference, "WER undefined for an empty reference");
  }
  return {static_cast<double>(counts.errors()) / static_cast<double>(counts.ref_length()), counts};
}

WerBreakdown PooledWer(std::span<const ErrorCounts> per_utterance) {
  ErrorCounts total;
  for (const auto &c : per_utterance) total += c;
  return Wer(total);
}

double Dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += a[k] * b[k];
  return s;
}

double RescaleF1(double f1, double baseline_b) {
  if (!(baseline_b < 1.0)) {
    throw Error(ErrorKind::kInvalidArgument, "rescaling baseline b must be < 1");
  }
  return (f1 - baseline_b) / (1.0 - baseline_b);
}

BertScoreResult BertScore(std::span<const Vector> hyp_vecs, std::span<const Vector> ref_vecs,
                          double baseline_b) {
  if (hyp_vecs.empty() || ref_vecs.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "BERTScore needs non-empty embedding lists");
  }
  const std::size_t d = hyp_vecs.front().size();
  const auto check = [&](const Vector &v) {
    if (v.size() != d) throw Error(ErrorKind::kDimensionMismatch, "embedding dimension mismatch");
    const double norm = std::sqrt(Dot(v, v));
    if (std::abs(norm - 1.0) > 1e-6) {
      throw Error(ErrorKind::kInvalidArgument, "embeddings must be unit norm");
    }
  };
  for (const auto &v : hyp_vecs) check(v);
  for (const auto &v : ref_vecs) check(v);

  const std::size_t nh = hyp_vecs.size();
  const std::size_t nr = ref_vecs.size();
  std::vector<double> best_for_hyp(nh, -std::numeric_limits<double>::infinity());
  std::vector<double> best_for_ref(nr, -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < nh; ++i) {
    for (std::size_t j = 0; j < nr; ++j) {
      const double sim = Dot(hyp_vecs[i], ref_vecs[j]);
      best_for_hyp[i] = std::max(best_for_hyp[i], sim);
      best_for_ref[j] = std::max(best_for_ref[j], sim);
    }
  }
  BertScoreResult r;
  r.baseline_b = baseline_b;
  double sum = 0.0;
  for (double v : best_for_hyp) sum += v;
  r.recall = sum / static_cast<double>(nh);
  sum = 0.0;
  for (double v : best_for_ref) sum += v;
  r.precision = sum / static_cast<double>(nr);
  const double denom = r.precision + r.recall;
  r.f1 = denom > 0.0 ? 2.0 * r.precision * r.recall / denom : 0.0;
  r.f1_rescaled = RescaleF1(r.f1, baseline_b);
  return r;
}

}  // namespace stutterkit
