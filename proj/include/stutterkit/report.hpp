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

// Scoring of hypothesis transcripts against references, accuracy-bias deltas
// between disfluent (FB) and non-disfluent (FBN) conditions, breakdowns by
// video setting, speaker and disfluency type, and report rendering.

#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "stutterkit/chat_corpus.hpp"
#include "stutterkit/embeddings.hpp"
#include "stutterkit/metrics.hpp"
#include "stutterkit/synth_jobs.hpp"

namespace stutterkit {

enum class ReferenceText { kVerbatim, kFluent };

struct ReferenceSet {
  std::vector<std::pair<std::string, std::string>> items;  // (utterance id, raw text)
  std::vector<std::string> excluded;                       // ids without fluent text
};

ReferenceSet ReferencesFromCorpus(const Corpus &c, ReferenceText which);
ReferenceSet ReferencesFromManifest(const TtsManifest &m);

struct Hypothesis {
  std::string utterance_id;
  std::string text;
};

// JSONL {utterance_id, text}; duplicate ids are an error.
std::vector<Hypothesis> LoadHypotheses(const std::filesystem::path &path);
void SaveHypotheses(std::span<const Hypothesis> hyps, const std::filesystem::path &path);

struct UtteranceScore {
  std::string utterance_id;
  ErrorCounts counts;
  double wer = 0.0;
  double f1 = 0.0;
  double f1_rescaled = 0.0;

  bool operator==(const UtteranceScore &) const = default;
};

struct ConditionResult {
  std::string condition;  // "FB", "FBN", ...
  std::string label;      // row label, e.g. "Base", "p=36"
  double baseline_b = 0.0;
  double pooled_wer = 0.0;
  double mean_f1_rescaled = 0.0;
  std::vector<UtteranceScore> per_utterance;
  std::vector<std::string> uncovered;  // reference ids with no hypothesis

  bool operator==(const ConditionResult &) const = default;
};

// Normalized token streams plus their embeddings for one utterance.
struct ScoringInput {
  std::string utterance_id;
  Tokens ref;
  Tokens hyp;
  std::vector<Vector> ref_vecs;
  std::vector<Vector> hyp_vecs;
};

// Per-utterance alignment + BERTScore. OpenMP-parallel over utterances; the
// serial variant is the reference the parallel one is tested against. An
// empty hypothesis scores precision = recall = f1 = 0.
std::vector<UtteranceScore> ScorePairs(std::span<const ScoringInput> inputs, double baseline_b);
std::vector<UtteranceScore> ScorePairsSerial(std::span<const ScoringInput> inputs,
                                             double baseline_b);

struct EvaluateOptions {
  std::string condition = "FB";
  std::string label = "run";
  double baseline_b = 0.0;
  bool allow_partial = false;
  bool parallel = true;
};

// Validates ids (unknown or duplicate hypothesis ids fail; uncovered
// references fail unless allow_partial), normalizes both sides, embeds, and
// aggregates. Pooled WER = sum(S+D+I) / sum(S+D+C); F_BERT is the mean
// per-utterance rescaled f1.
ConditionResult EvaluateRun(const ReferenceSet &refs, std::span<const Hypothesis> hyps,
                            EmbeddingSource &embeddings, const EvaluateOptions &opts);

// Recomputes pooled_wer / mean_f1_rescaled from per_utterance.
void Reaggregate(ConditionResult &r);

struct BiasReport {
  double wer_fb = 0.0;
  double wer_fbn = 0.0;
  double delta_wer = 0.0;
  double f1_fb = 0.0;
  double f1_fbn = 0.0;
  double delta_f1 = 0.0;

  bool operator==(const BiasReport &) const = default;
};

// Positive delta_wer means worse on disfluent speech. Throws when the two
// results were computed with different baselines.
BiasReport MakeBiasReport(const ConditionResult &fb, const ConditionResult &fbn);

struct SettingRow {
  Setting setting;
  double pooled_wer = 0.0;
  std::size_t n_utterances = 0;

  bool operator==(const SettingRow &) const = default;
};

struct SettingBreakdown {
  std::vector<SettingRow> rows;
  std::vector<std::string> notes;
};

SettingBreakdown PerVideoType(const ConditionResult &r, const Corpus &c);

struct SpeakerRow {
  std::string speaker_id;
  std::string label;  // "26f" when demographics are known, else the id
  std::optional<int> age;
  std::string gender;
  double wer = 0.0;
  std::size_t n_utterances = 0;

  bool operator==(const SpeakerRow &) const = default;
};

std::string SpeakerLabel(const std::string &speaker_id, const SpeakerInfo *info);
std::vector<SpeakerRow> PerSpeaker(const ConditionResult &r, const Corpus &c);

struct Quartiles {
  double q1 = 0.0;
  double median = 0.0;
  double q3 = 0.0;

  bool operator==(const Quartiles &) const = default;
};

// Linear interpolation between order statistics at (n - 1) * q.
Quartiles ComputeQuartiles(std::vector<double> values);

struct DisfluencyRow {
  std::string kind;  // "repetition" | "interjection"
  std::vector<double> wers;
  Quartiles quartiles;

  bool operator==(const DisfluencyRow &) const = default;
};

// An utterance contributes to every category it contains.
std::vector<DisfluencyRow> PerDisfluencyType(const ConditionResult &r, const Corpus &c);

struct EvaluationRecord {
  ConditionResult result;
  std::vector<SettingRow> by_setting;
  std::vector<SpeakerRow> by_speaker;
  std::vector<DisfluencyRow> by_disfluency;
  std::vector<std::string> notes;

  bool operator==(const EvaluationRecord &) const = default;
};

EvaluationRecord MakeEvaluationRecord(ConditionResult result, const Corpus *corpus);

struct Report {
  std::vector<EvaluationRecord> runs;

  bool operator==(const Report &) const = default;
};

std::string RecordToJson(const EvaluationRecord &r);
EvaluationRecord RecordFromJson(std::string_view text);
std::string BiasToJson(const BiasReport &b);
BiasReport BiasFromJson(std::string_view text);

// Accepts either a single evaluation record or a {"runs": [...]} report.
Report LoadReport(std::span<const std::filesystem::path> paths);

enum class ReportFormat { kMarkdown, kCsv, kJson };

ReportFormat ParseReportFormat(std::string_view name);  // "md" | "markdown" | "csv" | "json"
std::string_view ReportFormatExtension(ReportFormat f);

struct TableRow {
  std::string label;
  std::vector<std::optional<double>> cells;

  bool operator==(const TableRow &) const = default;
};

struct Table {
  std::string name;
  std::string title;
  std::vector<std::string> columns;
  std::vector<TableRow> rows;

  bool operator==(const Table &) const = default;
};

// The tabular views rendered to markdown/csv: "metrics" (WER and F_BERT per
// condition plus bias deltas), "video_setting", "speakers", "disfluency".
std::vector<Table> BuildTables(const Report &report);

std::string Render(const Report &report, ReportFormat format);
std::string ReportToJson(const Report &report);
Report ReportFromJson(std::string_view text);

// Table readers for the markdown and csv renderings.
std::vector<Table> ParseMarkdownTables(std::string_view text);
std::vector<Table> ParseCsvTables(std::string_view text);

// ".4223", "-.0100", "1.0000": four decimals without a leading zero.
std::string FormatTableNumber(double v);

}  // namespace stutterkit
