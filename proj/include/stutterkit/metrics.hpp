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

// Scoring primitives: transcript normalization, word alignment with
// substitution/deletion/insertion/correct counts, WER, and BERTScore.

#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stutterkit/chat_corpus.hpp"

namespace stutterkit {

struct NormalizedText {
  Tokens tokens;
  std::string original;
};

// Bracketed/parenthesized spans removed, lowercased, Unicode marks, symbols
// and punctuation replaced by spaces, whitespace collapsed, split.
NormalizedText Normalize(std::string_view raw);

enum class EditOp { kMatch, kSubstitute, kDelete, kInsert };

struct AlignedPair {
  EditOp op;
  std::optional<std::size_t> ref_index;
  std::optional<std::size_t> hyp_index;

  bool operator==(const AlignedPair &) const = default;
};

struct ErrorCounts {
  long long S = 0;
  long long D = 0;
  long long I = 0;
  long long C = 0;

  long long errors() const { return S + D + I; }
  long long ref_length() const { return S + D + C; }
  long long hyp_length() const { return S + I + C; }
  ErrorCounts &operator+=(const ErrorCounts &o) {
    S += o.S;
    D += o.D;
    I += o.I;
    C += o.C;
    return *this;
  }
  bool operator==(const ErrorCounts &) const = default;
};

struct Alignment {
  std::vector<AlignedPair> ops;
  ErrorCounts counts;
};

// Unit-cost Levenshtein alignment. Backtrace prefers match/substitute, then
// deletion, then insertion, so the S/D/I split is reproducible.
Alignment Align(std::span<const std::string> ref, std::span<const std::string> hyp);

struct WerBreakdown {
  double wer = 0.0;
  ErrorCounts counts;
};

// (S + D + I) / (S + D + C). Throws Error(kEmptyReference) when S + D + C == 0.
WerBreakdown Wer(const ErrorCounts &counts);
inline WerBreakdown Wer(const Alignment &a) { return Wer(a.counts); }

// Corpus-level WER from summed counts.
WerBreakdown PooledWer(std::span<const ErrorCounts> per_utterance);

using Vector = std::vector<double>;

struct BertScoreResult {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double f1_rescaled = 0.0;
  double baseline_b = 0.0;
};

double Dot(std::span<const double> a, std::span<const double> b);

double RescaleF1(double f1, double baseline_b);

// Greedy max matching over inner products of unit vectors:
//   recall    = mean over hyp of max over ref,
//   precision = mean over ref of max over hyp.
// Throws on empty input, dimension mismatch, non-unit vectors, or b >= 1.
BertScoreResult BertScore(std::span<const Vector> hyp_vecs, std::span<const Vector> ref_vecs,
                          double baseline_b);

}  // namespace stutterkit
