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

// Speaker-disjoint cross-validation folds and augmentation source pools.

#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "stutterkit/chat_corpus.hpp"

namespace stutterkit {

struct FoldAssignment {
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<std::vector<std::string>> folds;  // speaker ids, sorted per fold
  std::map<std::string, int> fold_of_speaker;

  bool operator==(const FoldAssignment &) const = default;
};

// Distinct speaker ids of the corpus utterances, sorted.
std::vector<std::string> CorpusSpeakers(const Corpus &c);

// Seeded uniform grouping of speakers into k folds of `speakers_per_fold`.
// Requires k >= 2 and |speakers| == k * speakers_per_fold.
FoldAssignment AssignFolds(const Corpus &c, int k, int speakers_per_fold, std::uint64_t seed);

// Builds the speaker -> fold map from `folds`; checks disjointness.
FoldAssignment MakeFoldAssignment(int k, std::uint64_t seed,
                                  std::vector<std::vector<std::string>> folds);

// Utterances whose speaker is outside / inside fold `test_fold`.
std::vector<Utterance> TrainingPool(const Corpus &c, const FoldAssignment &fa, int test_fold);
std::vector<Utterance> TestSet(const Corpus &c, const FoldAssignment &fa, int test_fold);

// n i.i.d. uniform draws; draw i uses substream DeriveSeed(seed, i).
std::vector<Utterance> SampleWithReplacement(const std::vector<Utterance> &pool, std::size_t n,
                                             std::uint64_t seed);

// Fold file: {"k": .., "seed": .., "folds": [[speaker, ...], ...]}.
std::string FoldsToJson(const FoldAssignment &fa);
FoldAssignment FoldsFromJson(std::string_view text);
void SaveFolds(const FoldAssignment &fa, const std::filesystem::path &path);
FoldAssignment LoadFolds(const std::filesystem::path &path);

}  // namespace stutterkit
