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

// Text-domain disfluency augmentation: randomized word repetitions, phrase
// repetitions and interjections inserted into fluent transcripts.

#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "stutterkit/chat_corpus.hpp"

namespace stutterkit {

struct IntRange {
  int lo = 1;
  int hi = 1;

  bool Contains(int v) const { return lo <= v && v <= hi; }
  bool operator==(const IntRange &) const = default;
};

struct WordRepRanges {
  IntRange n_words;
  IntRange n_repeats;
  bool operator==(const WordRepRanges &) const = default;
};

struct PhraseRepRanges {
  IntRange phrase_len;
  IntRange n_repeats;
  bool operator==(const PhraseRepRanges &) const = default;
};

struct InterjectionRanges {
  IntRange n_sites;
  IntRange n_repeats;
  Tokens lexicon;
  bool operator==(const InterjectionRanges &) const = default;
};

struct AugmentationProfile {
  std::string name;
  WordRepRanges word_rep;
  PhraseRepRanges phrase_rep;
  InterjectionRanges interjection;

  // word 1-3 words x 1-4 repeats; phrase 2-4 words x 1-3; fillers 1-4 sites x 1-4.
  static AugmentationProfile Standard();
  // Same selection ranges; repeats widened to 1-6 / 1-5 / 1-7.
  static AugmentationProfile Extended();
  static AugmentationProfile ByName(const std::string &name);

  bool operator==(const AugmentationProfile &) const = default;
};

// Throws Error(kInvalidArgument) unless every range has 1 <= lo <= hi and the
// lexicon is non-empty.
void ValidateProfile(const AugmentationProfile &p);

// The profile ranges after fitting them to an utterance of `n_tokens` words.
// The selection counts (words, phrase length, filler sites) get upper bound
// min(hi, n_tokens) and a lower bound that never exceeds it. Repeat counts
// say how often one selection recurs and are left as configured.
struct ClippedRanges {
  IntRange word_n_words;
  IntRange word_n_repeats;
  IntRange phrase_len;
  IntRange phrase_n_repeats;
  IntRange interj_n_sites;
  IntRange interj_n_repeats;
  bool phrase_fits = true;  // false when n_tokens < phrase_len.lo
};

ClippedRanges ClipRanges(const AugmentationProfile &p, std::size_t n_tokens);

// One insertion. For word repetition `position` is the word index and
// `length` 1; for phrase repetition the phrase is [position, position+length);
// for interjections `position` is the slot before fluent word `position`
// (slot n_tokens is the end) and `token` the filler.
struct Selection {
  std::size_t position = 0;
  std::size_t length = 1;
  std::string token;
  int repeat_count = 0;

  bool operator==(const Selection &) const = default;
};

struct AugmentationPlan {
  std::string source_utterance_id;
  DisfluencyTag requested_type = DisfluencyTag::kWordRepetition;
  DisfluencyTag event_type = DisfluencyTag::kWordRepetition;  // realized
  bool degraded = false;  // phrase request fell back to a 1-word repetition
  std::vector<Selection> selections;
  std::uint64_t seed = 0;

  bool operator==(const AugmentationPlan &) const = default;
};

struct AugmentedUtterance {
  std::string id;
  AugmentationPlan plan;
  Tokens verbatim_tokens;
  Tokens fluent_tokens;
  std::vector<DisfluencyEvent> events;

  bool operator==(const AugmentedUtterance &) const = default;
};

bool IsAugmentable(DisfluencyTag tag);

class Rng;

AugmentationPlan SamplePlan(const Tokens &fluent, const AugmentationProfile &profile,
                            DisfluencyTag event_type, Rng &rng);

AugmentedUtterance ApplyPlan(const Tokens &fluent, const AugmentationPlan &plan);

// Weights over {word repetition, phrase repetition, interjection}.
using TypeWeights = std::array<double, 3>;
inline constexpr TypeWeights kUniformTypeWeights{1.0, 1.0, 1.0};

struct AugmentRequest {
  std::size_t n = 0;
  AugmentationProfile profile = AugmentationProfile::Standard();
  TypeWeights type_weights = kUniformTypeWeights;
  std::uint64_t seed = 0;  // top-level seed; the "augment" substream is derived
  std::string id_prefix;
};

// Sample i is built from its own substream DeriveSeed(augment_seed, i); its
// first draw picks the source utterance, so outputs are independent of
// scheduling. OpenMP-parallel when available.
std::vector<AugmentedUtterance> AugmentCorpus(const Corpus &c, const AugmentRequest &req);

// Serial reference of AugmentCorpus.
std::vector<AugmentedUtterance> AugmentCorpusSerial(const Corpus &c, const AugmentRequest &req);

// Round-half-up of 100 * n / corpus_size.
long long ComputeP(long long n, long long corpus_size);

// Augmentation JSONL: {id, source_utterance_id, event_type, seed,
// verbatim_text, fluent_text, events[], plan{requested_type, degraded, selections[]}}.
std::string AugmentedToJsonLine(const AugmentedUtterance &a);
AugmentedUtterance AugmentedFromJsonLine(std::string_view line);
void SaveAugmented(const std::vector<AugmentedUtterance> &items,
                   const std::filesystem::path &path);
std::vector<AugmentedUtterance> LoadAugmented(const std::filesystem::path &path);

}  // namespace stutterkit
