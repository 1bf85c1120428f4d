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

#include "stutterkit/folds.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "stutterkit/error.hpp"
#include "stutterkit/rng.hpp"

namespace stutterkit {

namespace {

void CheckFoldIndex(const FoldAssignment &fa, int test_fold) {
  if (test_fold < 0 || test_fold >= fa.k) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("test fold {} outside [0, {})", test_fold, fa.k));
  }
}

std::vector<Utterance> Select(const Corpus &c, const FoldAssignment &fa, int test_fold,
                              bool in_fold) {
  CheckFoldIndex(fa, test_fold);
  std::vector<Utterance> out;
  for (const auto &u : c.utterances) {
    auto it = fa.fold_of_speaker.find(u.speaker_id);
    if (it == fa.fold_of_speaker.end()) {
      throw Error(ErrorKind::kMissingKey,
                  "speaker '" + u.speaker_id + "' is not assigned to any fold");
    }
    if ((it->second == test_fold) == in_fold) out.push_back(u);
  }
  return out;
}

}  // namespace

std::vector<std::string> CorpusSpeakers(const Corpus &c) {
  std::set<std::string> ids;
  for (const auto &u : c.utterances) ids.insert(u.speaker_id);
  return {ids.begin(), ids.end()};
}

FoldAssignment MakeFoldAssignment(int k, std::uint64_t seed,
                                  std::vector<std::vector<std::string>> folds) {
  if (k < 2) throw Error(ErrorKind::kInvalidArgument, "k must be >= 2");
  if (folds.size() != static_cast<std::size_t>(k)) {
    throw Error(ErrorKind::kFormat,
                fmt::format("fold list has {} folds, k = {}", folds.size(), k));
  }
  FoldAssignment fa;
  fa.k = k;
  fa.seed = seed;
  for (int f = 0; f < k; ++f) {
    auto &fold = folds[static_cast<std::size_t>(f)];
    std::sort(fold.begin(), fold.end());
    for (const auto &s : fold) {
      if (!fa.fold_of_speaker.emplace(s, f).second) {
        throw Error(ErrorKind::kDuplicateKey, "speaker '" + s + "' appears in two folds");
      }
    }
  }
  fa.folds = std::move(folds);
  return fa;
}

FoldAssignment AssignFolds(const Corpus &c, int k, int speakers_per_fold, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorKind::kInvalidArgument, "k must be >= 2");
  if (speakers_per_fold < 1) {
    throw Error(ErrorKind::kInvalidArgument, "speakers_per_fold must be >= 1");
  }
  auto speakers = CorpusSpeakers(c);
  const std::size_t need = static_cast<std::size_t>(k) * static_cast<std::size_t>(speakers_per_fold);
  if (speakers.size() != need) {
    const long long diff = static_cast<long long>(speakers.size()) - static_cast<long long>(need);
    throw Error(ErrorKind::kIndivisibleSpeakers,
                fmt::format("{} speakers cannot form {} folds of {} (need exactly {}, off by {:+d})",
                            speakers.size(), k, speakers_per_fold, need, diff));
  }
  Rng rng(DeriveSeed(seed, "split"));
  for (std::size_t i = speakers.size(); i > 1; --i) {
    std::swap(speakers[i - 1], speakers[rng.UniformIndex(i)]);
  }
  std::vector<std::vector<std::string>> folds(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    folds[i / static_cast<std::size_t>(speakers_per_fold)].push_back(speakers[i]);
  }
  return MakeFoldAssignment(k, seed, std::move(folds));
}

std::vector<Utterance> TrainingPool(const Corpus &c, const FoldAssignment &fa, int test_fold) {
  return Select(c, fa, test_fold, false);
}

std::vector<Utterance> TestSet(const Corpus &c, const FoldAssignment &fa, int test_fold) {
  return Select(c, fa, test_fold, true);
}

std::vector<Utterance> SampleWithReplacement(const std::vector<Utterance> &pool, std::size_t n,
                                             std::uint64_t seed) {
  if (pool.empty()) throw Error(ErrorKind::kEmptyPool, "cannot sample from an empty pool");
  std::vector<Utterance> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(DeriveSeed(seed, static_cast<std::uint64_t>(i)));
    out.push_back(pool[rng.UniformIndex(pool.size())]);
  }
  return out;
}

std::string FoldsToJson(const FoldAssignment &fa) {
  nlohmann::ordered_json j;
  j["k"] = fa.k;
  j["seed"] = fa.seed;
  j["folds"] = fa.folds;
  return j.dump(2);
}

FoldAssignment FoldsFromJson(std::string_view text) {
  try {
    const auto j = nlohmann::json::parse(text);
    return MakeFoldAssignment(j.at("k").get<int>(), j.at("seed").get<std::uint64_t>(),
                              j.at("folds").get<std::vector<std::vector<std::string>>>());
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("bad fold file: ") + e.what());
  }
}

void SaveFolds(const FoldAssignment &fa, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << FoldsToJson(fa) << '\n';
}

FoldAssignment LoadFolds(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return FoldsFromJson(ss.str());
}

}  // namespace stutterkit
