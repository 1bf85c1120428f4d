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

#include "augment_checks.hpp"
#include "stutterkit/augmentor.hpp"
#include "stutterkit/error.hpp"
#include "stutterkit/folds.hpp"
#include "stutterkit/rng.hpp"
#include "temp_dir.hpp"

using namespace stutterkit;
using testing_support::CheckAugmented;

namespace {

const Tokens kMyNameIs{"my", "name", "is"};

AugmentationPlan Plan(DisfluencyTag t, std::vector<Selection> sels) {
  AugmentationPlan p;
  p.requested_type = p.event_type = t;
  p.selections = std::move(sels);
  return p;
}

Corpus SmallCorpus() {
  Corpus c;
  const char *texts[] = {"my name is anna", "hello", "we went to the park on sunday",
                         "thank you", "i like it"};
  int i = 0;
  for (const char *t : texts) {
    Utterance u;
    u.id = "u" + std::to_string(i++);
    u.speaker_id = "s" + std::to_string(i % 2);
    std::istringstream in(t);
    for (std::string w; in >> w;) u.verbatim_tokens.push_back(w);
    c.utterances.push_back(u);
  }
  Utterance filler;  // never eligible
  filler.id = "u_filler";
  filler.speaker_id = "s0";
  filler.verbatim_tokens = {"um"};
  filler.events = {{DisfluencyKind::Of(DisfluencyTag::kInterjection), {0, 1}, 0}};
  c.utterances.push_back(filler);
  return c;
}

}  // namespace

TEST_CASE("apply plan: worked examples") {
  const auto word = ApplyPlan(kMyNameIs, Plan(DisfluencyTag::kWordRepetition, {{0, 1, "", 2}}));
  CHECK(word.verbatim_tokens == Tokens{"my", "my", "my", "name", "is"});
  REQUIRE(word.events.size() == 1);
  CHECK(word.events[0].span == TokenSpan{0, 2});
  CHECK(word.events[0].repeat_count == 2);

  const auto phrase =
      ApplyPlan(kMyNameIs, Plan(DisfluencyTag::kPhraseRepetition, {{0, 2, "", 1}}));
  CHECK(phrase.verbatim_tokens == Tokens{"my", "name", "my", "name", "is"});
  CHECK(phrase.events[0].span == TokenSpan{0, 2});

  const auto fill =
      ApplyPlan(kMyNameIs, Plan(DisfluencyTag::kInterjection, {{1, 1, "um", 2}, {3, 1, "uh", 1}}));
  CHECK(fill.verbatim_tokens == Tokens{"my", "um", "um", "name", "is", "uh"});
  REQUIRE(fill.events.size() == 2);
  CHECK(fill.events[0].span == TokenSpan{1, 3});
  CHECK(fill.events[1].span == TokenSpan{5, 6});

  const auto none = ApplyPlan(kMyNameIs, Plan(DisfluencyTag::kWordRepetition, {}));
  CHECK(none.verbatim_tokens == kMyNameIs);
  CHECK(none.events.empty());
}

TEST_CASE("apply plan rejects plans that do not fit") {
  const auto kind_of = [](auto &&fn) {
    try {
      fn();
    } catch (const Error &e) {
      return e.kind();
    }
    return ErrorKind::kConfig;
  };
  CHECK(kind_of([] { ApplyPlan(kMyNameIs, Plan(DisfluencyTag::kWordRepetition, {{3, 1, "", 1}})); }) ==
        ErrorKind::kPlanMismatch);
  CHECK(kind_of([] { ApplyPlan(kMyNameIs, Plan(DisfluencyTag::kPhraseRepetition, {{2, 2, "", 1}})); }) ==
        ErrorKind::kPlanMismatch);
  CHECK(kind_of([] { ApplyPlan(kMyNameIs, Plan(DisfluencyTag::kInterjection, {{4, 1, "um", 1}})); }) ==
        ErrorKind::kPlanMismatch);
  CHECK_THROWS(ApplyPlan(kMyNameIs, Plan(DisfluencyTag::kPause, {})));
}

TEST_CASE("sample plan preconditions") {
  Rng r(1);
  const auto p = AugmentationProfile::Standard();
  CHECK_THROWS(SamplePlan({}, p, DisfluencyTag::kWordRepetition, r));
  CHECK_THROWS(SamplePlan(kMyNameIs, p, DisfluencyTag::kRetracing, r));
  auto bad = p;
  bad.word_rep.n_repeats = {3, 2};
  CHECK_THROWS(SamplePlan(kMyNameIs, bad, DisfluencyTag::kWordRepetition, r));
  bad = p;
  bad.interjection.lexicon.clear();
  CHECK_THROWS(ValidateProfile(bad));
}

TEST_CASE("built-in profiles") {
  const auto s = AugmentationProfile::Standard();
  CHECK(s.word_rep.n_words == IntRange{1, 3});
  CHECK(s.word_rep.n_repeats == IntRange{1, 4});
  CHECK(s.phrase_rep.phrase_len == IntRange{2, 4});
  CHECK(s.phrase_rep.n_repeats == IntRange{1, 3});
  CHECK(s.interjection.n_sites == IntRange{1, 4});
  CHECK(s.interjection.n_repeats == IntRange{1, 4});
  CHECK(s.interjection.lexicon == Tokens{"uh", "um"});
  const auto e = AugmentationProfile::Extended();
  CHECK(e.word_rep.n_repeats == IntRange{1, 6});
  CHECK(e.phrase_rep.n_repeats == IntRange{1, 5});
  CHECK(e.interjection.n_repeats == IntRange{1, 7});
  CHECK(AugmentationProfile::ByName("extended").interjection.n_repeats == IntRange{1, 7});
  CHECK(AugmentationProfile::ByName("standard").name == "standard");
  CHECK_THROWS(AugmentationProfile::ByName("wild"));
}

TEST_CASE("two words clip every count upper bound to two") {
  const auto c = ClipRanges(AugmentationProfile::Extended(), 2);
  for (const auto &r : {c.word_n_words, c.phrase_len, c.interj_n_sites}) {
    CHECK(r.hi == 2);
    CHECK(r.lo <= r.hi);
  }
  CHECK(c.word_n_repeats == IntRange{1, 6});
  CHECK(c.phrase_fits);
  CHECK_FALSE(ClipRanges(AugmentationProfile::Standard(), 1).phrase_fits);
}

TEST_CASE("word repetition draws from the stated ranges") {
  const auto p = AugmentationProfile::Standard();
  std::set<std::size_t> counts;
  std::set<int> repeats;
  for (std::uint64_t seed = 0; seed < 2000; ++seed) {
    Rng r(seed);
    const auto plan = SamplePlan(kMyNameIs, p, DisfluencyTag::kWordRepetition, r);
    counts.insert(plan.selections.size());
    for (const auto &s : plan.selections) repeats.insert(s.repeat_count);
  }
  CHECK(counts == std::set<std::size_t>{1, 2, 3});
  CHECK(repeats == std::set<int>{1, 2, 3, 4});
}

TEST_CASE("short phrase requests degrade to word repetition") {
  Rng r(4);
  const auto plan =
      SamplePlan(Tokens{"hi"}, AugmentationProfile::Standard(), DisfluencyTag::kPhraseRepetition, r);
  CHECK(plan.degraded);
  CHECK(plan.requested_type == DisfluencyTag::kPhraseRepetition);
  CHECK(plan.event_type == DisfluencyTag::kWordRepetition);
  REQUIRE(plan.selections.size() == 1);
  CHECK(IntRange{1, 3}.Contains(plan.selections[0].repeat_count));
}

TEST_CASE("random plans satisfy the invariants") {
  Rng meta(31337);
  const char *vocab[] = {"a", "b", "c", "dog", "the", "run"};
  for (int i = 0; i < 2000; ++i) {
    Tokens fluent(1 + meta.UniformIndex(20));
    for (auto &w : fluent) w = vocab[meta.UniformIndex(6)];
    auto profile = meta.UniformIndex(2) ? AugmentationProfile::Standard()
                                        : AugmentationProfile::Extended();
    // Random custom ranges too.
    if (meta.UniformIndex(3) == 0) {
      const auto lo = static_cast<int>(1 + meta.UniformIndex(4));
      profile.word_rep.n_words = {lo, lo + static_cast<int>(meta.UniformIndex(5))};
      profile.phrase_rep.phrase_len = {lo, lo + static_cast<int>(meta.UniformIndex(5))};
      profile.interjection.n_sites = {lo, lo + static_cast<int>(meta.UniformIndex(5))};
    }
    const DisfluencyTag type = std::array{DisfluencyTag::kWordRepetition,
                                          DisfluencyTag::kPhraseRepetition,
                                          DisfluencyTag::kInterjection}[meta.UniformIndex(3)];
    Rng r(meta.Next());
    const auto a = ApplyPlan(fluent, SamplePlan(fluent, profile, type, r));
    const auto problem = CheckAugmented(a, profile);
    INFO("fluent size ", fluent.size(), " type ", KindName(type));
    CHECK(problem == "");
  }
}

TEST_CASE("augment corpus is reproducible and order independent") {
  const auto c = SmallCorpus();
  AugmentRequest req;
  req.n = 300;
  req.seed = 42;
  req.id_prefix = "fold0_";
  const auto a = AugmentCorpus(c, req);
  const auto b = AugmentCorpus(c, req);
  const auto serial = AugmentCorpusSerial(c, req);
  CHECK(a == b);
  CHECK(a == serial);
  REQUIRE(a.size() == 300);
  CHECK(a[0].id == "fold0_aug_000000");
  for (const auto &x : a) {
    CHECK(x.plan.source_utterance_id != "u_filler");
    CHECK(CheckAugmented(x, req.profile) == "");
  }

  // A prefix of a longer run is the shorter run.
  req.n = 50;
  const auto shorter = AugmentCorpus(c, req);
  CHECK(std::equal(shorter.begin(), shorter.end(), a.begin()));

  req.seed = 43;
  CHECK(AugmentCorpus(c, req) != shorter);
}

TEST_CASE("augmentation sources are i.i.d. draws from the eligible pool") {
  const auto c = SmallCorpus();
  std::vector<Utterance> pool(c.utterances.begin(), c.utterances.end() - 1);
  AugmentRequest req;
  req.n = 200;
  req.seed = 9;
  const auto out = AugmentCorpus(c, req);
  const auto drawn = SampleWithReplacement(pool, req.n, DeriveSeed(req.seed, "augment"));
  for (std::size_t i = 0; i < out.size(); ++i) {
    CHECK(out[i].plan.source_utterance_id == drawn[i].id);
  }
}

TEST_CASE("type weights select the event type") {
  const auto c = SmallCorpus();
  AugmentRequest req;
  req.n = 100;
  req.type_weights = {0.0, 0.0, 1.0};
  for (const auto &a : AugmentCorpus(c, req)) {
    CHECK(a.plan.event_type == DisfluencyTag::kInterjection);
  }
  req.type_weights = {0.0, 0.0, 0.0};
  CHECK_THROWS(AugmentCorpus(c, req));
}

TEST_CASE("edge cases of augment corpus") {
  AugmentRequest req;
  req.n = 0;
  CHECK(AugmentCorpus(SmallCorpus(), req).empty());
  req.n = 3;
  Corpus only_fillers;
  only_fillers.utterances.push_back(SmallCorpus().utterances.back());
  try {
    AugmentCorpus(only_fillers, req);
    FAIL("expected EmptyPool");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kEmptyPool);
  }
}

TEST_CASE("n to p mapping") {
  const std::pair<long long, long long> rows[] = {{500, 36},   {1000, 73},  {2000, 146},
                                                  {3000, 218}, {4000, 291}, {5000, 364},
                                                  {6000, 437}};
  for (auto [n, p] : rows) CHECK(ComputeP(n, 1373) == p);
  CHECK(ComputeP(0, 1373) == 0);
  CHECK(ComputeP(1373, 1373) == 100);
  CHECK(ComputeP(1, 200) == 1);  // 0.5 rounds up
  CHECK_THROWS(ComputeP(1, 0));
}

TEST_CASE("augmented jsonl round trip") {
  testing_support::TempDir dir;
  AugmentRequest req;
  req.n = 40;
  const auto a = AugmentCorpus(SmallCorpus(), req);
  SaveAugmented(a, dir / "aug.jsonl");
  CHECK(LoadAugmented(dir / "aug.jsonl") == a);
}
