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

#include <cmath>
#include <set>

#include "oracles.hpp"
#include "stutterkit/chat_corpus.hpp"
#include "stutterkit/error.hpp"
#include "stutterkit/report.hpp"
#include "temp_dir.hpp"

using namespace stutterkit;
using testing_support::DataDir;
using testing_support::TempDir;

namespace {

struct Pairs {
  Corpus corpus;
  ReferenceSet refs;
  std::vector<Hypothesis> hyps;
  std::vector<Hypothesis> perfect;
};

Pairs LoadPairs() {
  const auto dir = DataDir() / "pairs20";
  Pairs p;
  p.corpus = LoadCorpus(dir / "corpus.jsonl");
  p.refs = ReferencesFromCorpus(p.corpus, ReferenceText::kFluent);
  p.hyps = LoadHypotheses(dir / "hyps.jsonl");
  p.perfect = LoadHypotheses(dir / "perfect.jsonl");
  return p;
}

ConditionResult Run(const Pairs &p, const std::vector<Hypothesis> &hyps, std::string cond,
                    std::string label = "base", bool parallel = true) {
  MockEmbeddingSource emb;
  EvaluateOptions o;
  o.condition = std::move(cond);
  o.label = std::move(label);
  o.parallel = parallel;
  return EvaluateRun(p.refs, hyps, emb, o);
}

ErrorKind KindOf(const std::function<void()> &fn) {
  try {
    fn();
  } catch (const Error &e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::kConfig;
}

}  // namespace

TEST_CASE("the twenty-pair fixture replays to a pooled WER of 0.25") {
  const auto p = LoadPairs();
  REQUIRE(p.refs.items.size() == 20);
  const auto r = Run(p, p.hyps, "FB");

  // Oracle pass over the same normalized pairs.
  long long errors = 0, ref_words = 0;
  std::map<std::string, std::string> hyp_of;
  for (const auto &h : p.hyps) hyp_of[h.utterance_id] = h.text;
  for (std::size_t i = 0; i < p.refs.items.size(); ++i) {
    const auto &[id, text] = p.refs.items[i];
    const auto ref = Normalize(text).tokens;
    const auto hyp = Normalize(hyp_of.at(id)).tokens;
    const int d = oracle::EditDistance(ref, hyp);
    CHECK(r.per_utterance[i].counts.errors() == d);
    errors += d;
    ref_words += static_cast<long long>(ref.size());
  }
  CHECK(errors == 15);
  CHECK(ref_words == 60);
  CHECK(r.pooled_wer == 0.25);

  const auto perfect = Run(p, p.perfect, "FBN");
  CHECK(perfect.pooled_wer == 0.0);
  CHECK(perfect.mean_f1_rescaled == doctest::Approx(1.0).epsilon(1e-12));

  const auto bias = MakeBiasReport(r, perfect);
  CHECK(bias.delta_wer == 0.25);
  CHECK(bias.delta_f1 < 0.0);
}

TEST_CASE("parallel and serial scoring agree exactly") {
  const auto p = LoadPairs();
  CHECK(Run(p, p.hyps, "FB", "x", true) == Run(p, p.hyps, "FB", "x", false));
}

TEST_CASE("pooled wer is recomputable from any partition") {
  const auto p = LoadPairs();
  auto r = Run(p, p.hyps, "FB");
  const double pooled = r.pooled_wer;
  std::map<Setting, ErrorCounts> by;
  std::map<std::string, Setting> setting_of;
  for (const auto &u : p.corpus.utterances) setting_of[u.id] = u.setting;
  for (const auto &s : r.per_utterance) by[setting_of.at(s.utterance_id)] += s.counts;
  ErrorCounts sum;
  for (const auto &[_, c] : by) sum += c;
  CHECK(Wer(sum).wer == pooled);
  Reaggregate(r);
  CHECK(r.pooled_wer == pooled);
}

TEST_CASE("identical hypotheses give zero WER and unit F_BERT") {
  Corpus c;
  for (int i = 0; i < 3; ++i) {
    Utterance u;
    u.id = "u" + std::to_string(i);
    u.verbatim_tokens = {"hello", "world", std::to_string(i)};
    c.utterances.push_back(u);
  }
  Pairs p;
  p.refs = ReferencesFromCorpus(c, ReferenceText::kVerbatim);
  for (const auto &[id, text] : p.refs.items) p.hyps.push_back({id, text});
  const auto r = Run(p, p.hyps, "FB");
  CHECK(r.pooled_wer == 0.0);
  CHECK(r.mean_f1_rescaled == doctest::Approx(1.0));
}

TEST_CASE("coverage problems are reported") {
  auto p = LoadPairs();
  auto missing = p.hyps;
  missing.pop_back();
  CHECK(KindOf([&] { Run(p, missing, "FB"); }) == ErrorKind::kMissingKey);

  MockEmbeddingSource emb;
  EvaluateOptions partial;
  partial.allow_partial = true;
  const auto r = EvaluateRun(p.refs, missing, emb, partial);
  CHECK(r.per_utterance.size() == 19);
  CHECK(r.uncovered == std::vector<std::string>{"pair_19"});

  auto unknown = p.hyps;
  unknown.push_back({"nope", "x"});
  CHECK(KindOf([&] { Run(p, unknown, "FB"); }) == ErrorKind::kMissingKey);

  auto dup = p.hyps;
  dup.push_back(dup.front());
  CHECK(KindOf([&] { Run(p, dup, "FB"); }) == ErrorKind::kDuplicateKey);

  auto empty_hyp = p.hyps;
  empty_hyp[0].text = "[noise]";
  const auto e = Run(p, empty_hyp, "FB");
  CHECK(e.per_utterance[0].counts == ErrorCounts{0, 3, 0, 0});
  CHECK(e.per_utterance[0].f1 == 0.0);
}

TEST_CASE("empty references and excluded utterances") {
  Corpus c;
  Utterance filler;
  filler.id = "f";
  filler.verbatim_tokens = {"um"};
  filler.events = {{DisfluencyKind::Of(DisfluencyTag::kInterjection), {0, 1}, 0}};
  Utterance coded;
  coded.id = "c";
  coded.verbatim_tokens = {"[laughs]"};
  c.utterances = {filler, coded};
  const auto refs = ReferencesFromCorpus(c, ReferenceText::kFluent);
  CHECK(refs.excluded == std::vector<std::string>{"f"});
  CHECK(ReferencesFromCorpus(c, ReferenceText::kVerbatim).items.size() == 2);

  MockEmbeddingSource emb;
  const std::vector<Hypothesis> on_excluded{{"f", "um"}};
  CHECK(KindOf([&] { EvaluateRun(refs, on_excluded, emb, {}); }) == ErrorKind::kEmptyReference);
  const std::vector<Hypothesis> on_coded{{"c", "ha"}};
  CHECK(KindOf([&] { EvaluateRun(refs, on_coded, emb, {}); }) == ErrorKind::kEmptyReference);
}

TEST_CASE("hypothesis files") {
  TempDir dir;
  const std::vector<Hypothesis> hyps{{"a", "one"}, {"b", "two \"quoted\""}};
  SaveHypotheses(hyps, dir / "h.jsonl");
  const auto back = LoadHypotheses(dir / "h.jsonl");
  REQUIRE(back.size() == 2);
  CHECK(back[1].text == hyps[1].text);
  testing_support::WriteText(dir / "dup.jsonl",
                             "{\"utterance_id\":\"a\",\"text\":\"x\"}\n{\"utterance_id\":\"a\",\"text\":\"y\"}\n");
  CHECK(KindOf([&] { LoadHypotheses(dir / "dup.jsonl"); }) == ErrorKind::kDuplicateKey);
  testing_support::WriteText(dir / "bad.jsonl", "{\"utterance_id\":\"a\"}\n");
  CHECK(KindOf([&] { LoadHypotheses(dir / "bad.jsonl"); }) == ErrorKind::kParse);
}

TEST_CASE("bias deltas") {
  ConditionResult fb, fbn;
  fb.pooled_wer = .4223;
  fbn.pooled_wer = .1029;
  CHECK(MakeBiasReport(fb, fbn).delta_wer == doctest::Approx(.3194).epsilon(1e-12));
  fb.pooled_wer = .2522;
  fbn.pooled_wer = .1248;
  CHECK(MakeBiasReport(fb, fbn).delta_wer == doctest::Approx(.1274).epsilon(1e-12));
  fbn.baseline_b = 0.3;
  CHECK_THROWS(MakeBiasReport(fb, fbn));
  const BiasReport b{1, 2, -1, 3, 4, -1};
  CHECK(BiasFromJson(BiasToJson(b)) == b);
}

TEST_CASE("quartiles interpolate between order statistics") {
  const auto q = ComputeQuartiles({1.0, 0.1, 0.8, 0.25, 0.5, 0.3, 0.2, 0.6});
  // Sorted: .1 .2 .25 .3 .5 .6 .8 1.0; positions 1.75, 3.5, 5.25.
  CHECK(q.q1 == doctest::Approx(0.2375));
  CHECK(q.median == doctest::Approx(0.4));
  CHECK(q.q3 == doctest::Approx(0.65));
  CHECK(ComputeQuartiles({0.7}) == Quartiles{0.7, 0.7, 0.7});
  CHECK_THROWS(ComputeQuartiles({}));
}

TEST_CASE("breakdowns by setting, speaker and disfluency") {
  const auto p = LoadPairs();
  const auto r = Run(p, p.hyps, "FB");

  const auto settings = PerVideoType(r, p.corpus);
  REQUIRE(settings.rows.size() == 2);
  CHECK(settings.rows[0].setting == Setting::kReading);
  CHECK(settings.rows[1].setting == Setting::kInterview);
  CHECK(settings.rows[0].n_utterances + settings.rows[1].n_utterances == 20);
  CHECK(settings.notes.size() == 1);  // no synthetic utterances

  const auto speakers = PerSpeaker(r, p.corpus);
  REQUIRE(speakers.size() == 4);
  CHECK(speakers[0].label == "26f");
  CHECK(speakers[1].label == "41m");
  CHECK(speakers[3].label == "p04");
  SpeakerInfo partial;
  partial.gender = "female";
  CHECK(SpeakerLabel("x", &partial) == "x");
  CHECK(SpeakerLabel("x", nullptr) == "x");

  const auto disfl = PerDisfluencyType(r, p.corpus);
  REQUIRE(disfl.size() == 2);
  CHECK(disfl[0].kind == "repetition");
  CHECK(disfl[0].wers.size() == 2);
  CHECK(disfl[1].kind == "interjection");
  CHECK(disfl[1].wers.size() == 2);

  Corpus no_events = p.corpus;
  for (auto &u : no_events.utterances) u.events.clear();
  CHECK(PerDisfluencyType(r, no_events).empty());

  Corpus other = p.corpus;
  other.utterances.pop_back();
  CHECK(KindOf([&] { PerSpeaker(r, other); }) == ErrorKind::kMissingKey);
}

TEST_CASE("an utterance with both kinds lands in both rows") {
  Corpus c;
  Utterance u;
  u.id = "both";
  u.verbatim_tokens = {"I", "I", "um", "go"};
  u.events = {{DisfluencyKind::Of(DisfluencyTag::kWordRepetition), {0, 1}, 1},
              {DisfluencyKind::Of(DisfluencyTag::kInterjection), {2, 3}, 0}};
  c.utterances.push_back(u);
  ConditionResult r;
  r.per_utterance.push_back({"both", {0, 0, 0, 2}, 0.0, 1.0, 1.0});
  const auto rows = PerDisfluencyType(r, c);
  CHECK(rows.size() == 2);
}

TEST_CASE("table numbers") {
  CHECK(FormatTableNumber(0.4223) == ".4223");
  CHECK(FormatTableNumber(-0.01) == "-.0100");
  CHECK(FormatTableNumber(1.0) == "1.0000");
  CHECK(FormatTableNumber(-0.00001) == ".0000");
  CHECK(FormatTableNumber(0.25) == ".2500");
}

TEST_CASE("renderings round trip at four decimals") {
  const auto p = LoadPairs();
  Report rep;
  rep.runs.push_back(MakeEvaluationRecord(Run(p, p.hyps, "FB", "base"), &p.corpus));
  rep.runs.push_back(MakeEvaluationRecord(Run(p, p.perfect, "FBN", "base"), &p.corpus));
  rep.runs.push_back(MakeEvaluationRecord(Run(p, p.perfect, "FB", "p=36"), &p.corpus));

  const auto tables = BuildTables(rep);
  REQUIRE(tables.size() == 4);
  CHECK(tables[0].name == "metrics");
  CHECK(tables[0].columns ==
        std::vector<std::string>{"WER FB", "WER FBN", "F_BERT FB", "F_BERT FBN", "delta WER",
                                 "delta F_BERT"});
  CHECK(tables[0].rows[0].cells[4] == 0.25);
  CHECK_FALSE(tables[0].rows[1].cells[1].has_value());  // p=36 has no FBN run

  const auto check_close = [&](const std::vector<Table> &parsed) {
    REQUIRE(parsed.size() == tables.size());
    for (std::size_t t = 0; t < tables.size(); ++t) {
      CHECK(parsed[t].name == tables[t].name);
      REQUIRE(parsed[t].rows.size() == tables[t].rows.size());
      for (std::size_t r = 0; r < tables[t].rows.size(); ++r) {
        const auto &want = tables[t].rows[r];
        const auto &got = parsed[t].rows[r];
        CHECK(got.label == want.label);
        REQUIRE(got.cells.size() == want.cells.size());
        for (std::size_t k = 0; k < want.cells.size(); ++k) {
          REQUIRE(got.cells[k].has_value() == want.cells[k].has_value());
          if (want.cells[k]) CHECK(std::abs(*got.cells[k] - *want.cells[k]) <= 5e-5 + 1e-12);
        }
      }
    }
  };
  check_close(ParseMarkdownTables(Render(rep, ReportFormat::kMarkdown)));
  check_close(ParseCsvTables(Render(rep, ReportFormat::kCsv)));
  CHECK(ReportFromJson(Render(rep, ReportFormat::kJson)) == rep);
  CHECK(Render(rep, ReportFormat::kMarkdown).find("| base | .2500 |") != std::string::npos);
}

TEST_CASE("report inputs") {
  TempDir dir;
  const auto p = LoadPairs();
  const auto rec = MakeEvaluationRecord(Run(p, p.hyps, "FB"), &p.corpus);
  testing_support::WriteText(dir / "r.json", RecordToJson(rec));
  CHECK(RecordFromJson(RecordToJson(rec)) == rec);
  Report two;
  two.runs = {rec, rec};
  two.runs[1].result.label = "other";
  testing_support::WriteText(dir / "all.json", ReportToJson(two));
  const std::vector<std::filesystem::path> paths{dir / "r.json", dir / "all.json"};
  CHECK(LoadReport(paths).runs.size() == 3);
  // Same (label, condition) twice cannot be tabulated.
  CHECK(KindOf([&] { BuildTables(LoadReport(paths)); }) == ErrorKind::kDuplicateKey);
  CHECK(KindOf([&] { RecordFromJson("{}"); }) == ErrorKind::kFormat);
  CHECK(ParseReportFormat("markdown") == ReportFormat::kMarkdown);
  CHECK(ReportFormatExtension(ReportFormat::kCsv) == "csv");
  CHECK_THROWS(ParseReportFormat("xlsx"));
}

TEST_CASE("labels with separators survive both table formats") {
  Report rep;
  EvaluationRecord rec;
  rec.result.condition = "FB";
  rec.result.label = "a|b, \"c\"";
  rec.result.pooled_wer = 0.5;
  rep.runs.push_back(rec);
  CHECK(ParseMarkdownTables(Render(rep, ReportFormat::kMarkdown))[0].rows[0].label == rec.result.label);
  CHECK(ParseCsvTables(Render(rep, ReportFormat::kCsv))[0].rows[0].label == rec.result.label);
}
