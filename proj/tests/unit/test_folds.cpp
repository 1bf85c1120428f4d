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

#include <doctest.h>

#include <set>

#include "fixture.hpp"
#include "stutterkit/error.hpp"
#include "stutterkit/folds.hpp"
#include "temp_dir.hpp"

using namespace stutterkit;

namespace {

Corpus SpeakersOnly(int n) {
  Corpus c;
  for (int i = 0; i < n; ++i) {
    Utterance u;
    u.id = "u" + std::to_string(i);
    u.speaker_id = "spk" + std::to_string(i);
    u.verbatim_tokens = {"hello"};
    c.utterances.push_back(u);
  }
  return c;
}

}  // namespace

TEST_CASE("fixture splits into six disjoint folds of two") {
  const auto c = testing_support::FixtureCorpus();
  REQUIRE(CorpusSpeakers(c).size() == 12);
  for (std::uint64_t seed : {0ull, 1ull, 42ull, 123456789ull}) {
    const auto fa = AssignFolds(c, 6, 2, seed);
    REQUIRE(fa.folds.size() == 6);
    std::set<std::string> seen;
    for (const auto &f : fa.folds) {
      CHECK(f.size() == 2);
      CHECK(std::is_sorted(f.begin(), f.end()));
      for (const auto &s : f) CHECK(seen.insert(s).second);
    }
    CHECK(seen.size() == 12);
    // Pairwise disjointness, checked exhaustively.
    for (std::size_t a = 0; a < 6; ++a) {
      for (std::size_t b = a + 1; b < 6; ++b) {
        for (const auto &x : fa.folds[a]) {
          CHECK(std::find(fa.folds[b].begin(), fa.folds[b].end(), x) == fa.folds[b].end());
        }
      }
    }
    for (int t = 0; t < 6; ++t) {
      const auto train = TrainingPool(c, fa, t);
      const auto test = TestSet(c, fa, t);
      CHECK(train.size() + test.size() == c.utterances.size());
      for (const auto &u : train) CHECK(fa.fold_of_speaker.at(u.speaker_id) != t);
      for (const auto &u : test) CHECK(fa.fold_of_speaker.at(u.speaker_id) == t);
    }
  }
}

TEST_CASE("fold assignment is seeded") {
  const auto c = testing_support::FixtureCorpus();
  CHECK(AssignFolds(c, 6, 2, 7) == AssignFolds(c, 6, 2, 7));
  bool differs = false;
  for (std::uint64_t s = 8; s < 20 && !differs; ++s) {
    differs = AssignFolds(c, 6, 2, s).folds != AssignFolds(c, 6, 2, 7).folds;
  }
  CHECK(differs);
}

TEST_CASE("every grouping is reachable") {
  // 4 speakers into 2 folds of 2: three distinct partitions exist.
  const auto c = SpeakersOnly(4);
  std::set<std::vector<std::vector<std::string>>> partitions;
  for (std::uint64_t s = 0; s < 200; ++s) {
    auto folds = AssignFolds(c, 2, 2, s).folds;
    std::sort(folds.begin(), folds.end());
    partitions.insert(folds);
  }
  CHECK(partitions.size() == 3);
}

TEST_CASE("indivisible speaker counts are rejected") {
  try {
    AssignFolds(SpeakersOnly(5), 2, 2, 0);
    FAIL("expected an error");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kIndivisibleSpeakers);
    CHECK(std::string(e.what()).find("off by +1") != std::string::npos);
  }
  CHECK_THROWS(AssignFolds(SpeakersOnly(4), 1, 4, 0));
  CHECK_THROWS(AssignFolds(SpeakersOnly(4), 2, 0, 0));
}

TEST_CASE("hand-made assignments") {
  CHECK_THROWS(MakeFoldAssignment(2, 0, {{"a", "b"}, {"b", "c"}}));
  CHECK_THROWS(MakeFoldAssignment(3, 0, {{"a"}, {"b"}}));
  const auto fa = MakeFoldAssignment(2, 5, {{"b", "a"}, {"c"}});
  CHECK(fa.folds[0] == std::vector<std::string>{"a", "b"});
  CHECK(fa.fold_of_speaker.at("c") == 1);

  const auto c = SpeakersOnly(4);
  CHECK_THROWS(TrainingPool(c, fa, 0));  // spk* are not assigned
  const auto full = MakeFoldAssignment(2, 0, {{"spk0", "spk1"}, {"spk2", "spk3"}});
  CHECK_THROWS(TestSet(c, full, 2));
  CHECK(TestSet(c, full, 1).size() == 2);
}

TEST_CASE("sampling with replacement") {
  const auto pool = SpeakersOnly(5).utterances;
  const auto a = SampleWithReplacement(pool, 100, 3);
  CHECK(a == SampleWithReplacement(pool, 100, 3));
  CHECK(a.size() == 100);
  std::set<std::string> ids;
  for (const auto &u : a) ids.insert(u.id);
  CHECK(ids.size() == 5);  // with 100 draws every item shows up
  CHECK(SampleWithReplacement(pool, 0, 3).empty());
  try {
    SampleWithReplacement({}, 1, 0);
    FAIL("expected EmptyPool");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kEmptyPool);
  }
}

TEST_CASE("fold file round trip") {
  testing_support::TempDir dir;
  const auto fa = AssignFolds(testing_support::FixtureCorpus(), 6, 2, 11);
  SaveFolds(fa, dir / "folds.json");
  CHECK(LoadFolds(dir / "folds.json") == fa);
  CHECK(FoldsFromJson(FoldsToJson(fa)) == fa);
  CHECK_THROWS(FoldsFromJson("{\"k\": 2}"));
}
