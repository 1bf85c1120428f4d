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

#include "stutterkit/report.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <map>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "stutterkit/error.hpp"

namespace stutterkit {

namespace {

using json = nlohmann::ordered_json;

constexpr Setting kSettings[] = {Setting::kReading, Setting::kInterview, Setting::kSynthetic};

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string JoinIds(const std::vector<std::string> &ids, std::size_t limit = 10) {
  std::string out;
  for (std::size_t i = 0; i < ids.size() && i < limit; ++i) {
    if (i) out += ", ";
    out += ids[i];
  }
  if (ids.size() > limit) out += fmt::format(", ... ({} total)", ids.size());
  return out;
}

UtteranceScore ScoreOne(const ScoringInput &in, double baseline_b) {
  UtteranceScore s;
  s.utterance_id = in.utterance_id;
  const Alignment a = Align(in.ref, in.hyp);
  s.counts = a.counts;
  s.wer = Wer(a).wer;
  if (in.hyp.empty()) {
    s.f1 = 0.0;
    s.f1_rescaled = RescaleF1(0.0, baseline_b);
  } else {
    const auto bs = BertScore(in.hyp_vecs, in.ref_vecs, baseline_b);
    s.f1 = bs.f1;
    s.f1_rescaled = bs.f1_rescaled;
  }
  return s;
}

std::string Capitalized(std::string_view s) {
  std::string out(s);
  if (!out.empty()) out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
  return out;
}

std::map<std::string, const Utterance *> IndexCorpus(const Corpus &c) {
  std::map<std::string, const Utterance *> idx;
  for (const auto &u : c.utterances) idx[u.id] = &u;
  return idx;
}

const Utterance &Lookup(const std::map<std::string, const Utterance *> &idx,
                        const std::string &id) {
  auto it = idx.find(id);
  if (it == idx.end()) {
    throw Error(ErrorKind::kMissingKey, "scored utterance '" + id + "' is not in the corpus");
  }
  return *it->second;
}

double PooledOrZero(const std::vector<ErrorCounts> &counts) {
  return PooledWer(counts).wer;
}

json ScoreToJson(const UtteranceScore &s) {
  return {{"utterance_id", s.utterance_id}, {"wer", s.wer},         {"f1", s.f1},
          {"f1_rescaled", s.f1_rescaled},   {"S", s.counts.S},      {"D", s.counts.D},
          {"I", s.counts.I},                {"C", s.counts.C}};
}

UtteranceScore ScoreFromJson(const nlohmann::json &j) {
  UtteranceScore s;
  s.utterance_id = j.at("utterance_id").get<std::string>();
  s.wer = j.at("wer").get<double>();
  s.f1 = j.value("f1", 0.0);
  s.f1_rescaled = j.at("f1_rescaled").get<double>();
  s.counts = {j.at("S").get<long long>(), j.at("D").get<long long>(), j.at("I").get<long long>(),
              j.at("C").get<long long>()};
  return s;
}

json RecordToJsonValue(const EvaluationRecord &rec) {
  const auto &r = rec.result;
  json j;
  j["condition"] = r.condition;
  j["label"] = r.label;
  j["baseline_b"] = r.baseline_b;
  j["pooled_wer"] = r.pooled_wer;
  j["mean_f1_rescaled"] = r.mean_f1_rescaled;
  j["per_utterance"] = json::array();
  for (const auto &s : r.per_utterance) j["per_utterance"].push_back(ScoreToJson(s));
  j["uncovered"] = r.uncovered;
  j["by_setting"] = json::array();
  for (const auto &row : rec.by_setting) {
    j["by_setting"].push_back({{"setting", SettingName(row.setting)},
                               {"pooled_wer", row.pooled_wer},
                               {"n_utterances", row.n_utterances}});
  }
  j["by_speaker"] = json::array();
  for (const auto &row : rec.by_speaker) {
    j["by_speaker"].push_back({{"speaker_id", row.speaker_id},
                               {"label", row.label},
                               {"age", row.age ? json(*row.age) : json(nullptr)},
                               {"gender", row.gender},
                               {"wer", row.wer},
                               {"n_utterances", row.n_utterances}});
  }
  j["by_disfluency"] = json::array();
  for (const auto &row : rec.by_disfluency) {
    j["by_disfluency"].push_back({{"kind", row.kind},
                                  {"wers", row.wers},
                                  {"q1", row.quartiles.q1},
                                  {"median", row.quartiles.median},
                                  {"q3", row.quartiles.q3}});
  }
  j["notes"] = rec.notes;
  return j;
}

EvaluationRecord RecordFromJsonValue(const nlohmann::json &j) {
  EvaluationRecord rec;
  auto &r = rec.result;
  r.condition = j.at("condition").get<std::string>();
  r.label = j.at("label").get<std::string>();
  r.baseline_b = j.at("baseline_b").get<double>();
  r.pooled_wer = j.at("pooled_wer").get<double>();
  r.mean_f1_rescaled = j.at("mean_f1_rescaled").get<double>();
  for (const auto &s : j.at("per_utterance")) r.per_utterance.push_back(ScoreFromJson(s));
  r.uncovered = j.value("uncovered", std::vector<std::string>{});
  for (const auto &row : j.value("by_setting", nlohmann::json::array())) {
    rec.by_setting.push_back({SettingFromName(row.at("setting").get<std::string>()),
                              row.at("pooled_wer").get<double>(),
                              row.at("n_utterances").get<std::size_t>()});
  }
  for (const auto &row : j.value("by_speaker", nlohmann::json::array())) {
    SpeakerRow s;
    s.speaker_id = row.at("speaker_id").get<std::string>();
    s.label = row.at("label").get<std::string>();
    if (!row.at("age").is_null()) s.age = row.at("age").get<int>();
    s.gender = row.at("gender").get<std::string>();
    s.wer = row.at("wer").get<double>();
    s.n_utterances = row.at("n_utterances").get<std::size_t>();
    rec.by_speaker.push_back(std::move(s));
  }
  for (const auto &row : j.value("by_disfluency", nlohmann::json::array())) {
    DisfluencyRow d;
    d.kind = row.at("kind").get<std::string>();
    d.wers = row.at("wers").get<std::vector<double>>();
    d.quartiles = {row.at("q1").get<double>(), row.at("median").get<double>(),
                   row.at("q3").get<double>()};
    rec.by_disfluency.push_back(std::move(d));
  }
  rec.notes = j.value("notes", std::vector<std::string>{});
  return rec;
}

template <typename T>
T ParseJsonOrThrow(std::string_view text, const char *what, T (*fn)(const nlohmann::json &)) {
  try {
    return fn(nlohmann::json::parse(text));
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("bad ") + what + ": " + e.what());
  }
}

std::string EscapeCell(const std::string &s) {
  std::string out;
  for (char c : s) {
    if (c == '|') out += "\\|";
    else out.push_back(c);
  }
  return out;
}

std::vector<std::string> SplitMarkdownRow(std::string_view line) {
  std::vector<std::string> cells;
  std::string cur;
  bool started = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (c == '\\' && i + 1 < line.size() && line[i + 1] == '|') {
      cur.push_back('|');
      ++i;
    } else if (c == '|') {
      if (started) {
        const auto b = cur.find_first_not_of(' ');
        const auto e = cur.find_last_not_of(' ');
        cells.push_back(b == std::string::npos ? "" : cur.substr(b, e - b + 1));
      }
      started = true;
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  return cells;
}

std::string CsvQuote(const std::string &s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out.push_back(c);
  }
  return out + "\"";
}

std::vector<std::string> SplitCsvLine(std::string_view line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur.push_back('"');
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(std::move(cur));
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(std::move(cur));
  return out;
}

std::optional<double> ParseCell(const std::string &cell) {
  if (cell.empty()) return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(cell, &used);
    if (used != cell.size()) throw Error(ErrorKind::kFormat, "bad numeric cell '" + cell + "'");
    return v;
  } catch (const std::invalid_argument &) {
    throw Error(ErrorKind::kFormat, "bad numeric cell '" + cell + "'");
  }
}

std::size_t IndexOf(std::vector<std::string> &list, const std::string &v) {
  auto it = std::find(list.begin(), list.end(), v);
  if (it != list.end()) return static_cast<std::size_t>(it - list.begin());
  list.push_back(v);
  return list.size() - 1;
}

}  // namespace

ReferenceSet ReferencesFromCorpus(const Corpus &c, ReferenceText which) {
  ReferenceSet refs;
  for (const auto &u : c.utterances) {
    if (which == ReferenceText::kVerbatim) {
      refs.items.emplace_back(u.id, JoinTokens(u.verbatim_tokens));
      continue;
    }
    try {
      refs.items.emplace_back(u.id, JoinTokens(DeriveFluentText(u)));
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::kFluentEmpty) throw;
      refs.excluded.push_back(u.id);
    }
  }
  return refs;
}

ReferenceSet ReferencesFromManifest(const TtsManifest &m) {
  ReferenceSet refs;
  for (const auto &job : m.jobs) refs.items.emplace_back(job.job_id, job.text);
  return refs;
}

std::vector<Hypothesis> LoadHypotheses(const std::filesystem::path &path) {
  std::istringstream in(ReadFile(path));
  std::vector<Hypothesis> out;
  std::set<std::string> seen;
  std::vector<std::string> dups;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = nlohmann::json::parse(line);
      Hypothesis h{j.at("utterance_id").get<std::string>(), j.at("text").get<std::string>()};
      if (!seen.insert(h.utterance_id).second) dups.push_back(h.utterance_id);
      out.push_back(std::move(h));
    } catch (const nlohmann::json::exception &e) {
      throw ParseError(line_no, path.string() + ": " + e.what());
    }
  }
  if (!dups.empty()) {
    throw Error(ErrorKind::kDuplicateKey, "duplicate hypothesis ids: " + JoinIds(dups));
  }
  return out;
}

void SaveHypotheses(std::span<const Hypothesis> hyps, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto &h : hyps) {
    out << json{{"utterance_id", h.utterance_id}, {"text", h.text}}.dump() << '\n';
  }
}

std::vector<UtteranceScore> ScorePairsSerial(std::span<const ScoringInput> inputs,
                                             double baseline_b) {
  std::vector<UtteranceScore> out;
  out.reserve(inputs.size());
  for (const auto &in : inputs) out.push_back(ScoreOne(in, baseline_b));
  return out;
}

std::vector<UtteranceScore> ScorePairs(std::span<const ScoringInput> inputs, double baseline_b) {
  std::vector<UtteranceScore> out(inputs.size());
  std::exception_ptr failure;
  const auto n = static_cast<long long>(inputs.size());
#pragma omp parallel for schedule(dynamic, 16)
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = ScoreOne(inputs[static_cast<std::size_t>(i)], baseline_b);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

void Reaggregate(ConditionResult &r) {
  if (r.per_utterance.empty()) {
    throw Error(ErrorKind::kEmptyReference, "no scored utterances to aggregate");
  }
  ErrorCounts total;
  double f1_sum = 0.0;
  for (const auto &s : r.per_utterance) {
    total += s.counts;
    f1_sum += s.f1_rescaled;
  }
  r.pooled_wer = Wer(total).wer;
  r.mean_f1_rescaled = f1_sum / static_cast<double>(r.per_utterance.size());
}

ConditionResult EvaluateRun(const ReferenceSet &refs, std::span<const Hypothesis> hyps,
                            EmbeddingSource &embeddings, const EvaluateOptions &opts) {
  std::map<std::string, std::string> hyp_text;
  std::vector<std::string> dups, unknown;
  std::set<std::string> ref_ids;
  for (const auto &[id, text] : refs.items) ref_ids.insert(id);
  std::set<std::string> excluded(refs.excluded.begin(), refs.excluded.end());
  for (const auto &h : hyps) {
    if (!hyp_text.emplace(h.utterance_id, h.text).second) dups.push_back(h.utterance_id);
    if (!ref_ids.count(h.utterance_id)) unknown.push_back(h.utterance_id);
  }
  if (!dups.empty()) {
    throw Error(ErrorKind::kDuplicateKey, "duplicate hypothesis ids: " + JoinIds(dups));
  }
  if (!unknown.empty()) {
    std::vector<std::string> empty_refs;
    for (const auto &id : unknown) {
      if (excluded.count(id)) empty_refs.push_back(id);
    }
    if (!empty_refs.empty()) {
      throw Error(ErrorKind::kEmptyReference,
                  "hypotheses given for utterances without reference text: " +
                      JoinIds(empty_refs));
    }
    throw Error(ErrorKind::kMissingKey,
                "hypotheses reference unknown utterance ids: " + JoinIds(unknown));
  }

  ConditionResult result;
  result.condition = opts.condition;
  result.label = opts.label;
  result.baseline_b = opts.baseline_b;
  RescaleF1(0.0, opts.baseline_b);  // validates b

  std::vector<ScoringInput> inputs;
  for (const auto &[id, ref_raw] : refs.items) {
    auto it = hyp_text.find(id);
    if (it == hyp_text.end()) {
      result.uncovered.push_back(id);
      continue;
    }
    ScoringInput in;
    in.utterance_id = id;
    in.ref = Normalize(ref_raw).tokens;
    in.hyp = Normalize(it->second).tokens;
    if (in.ref.empty()) {
      throw Error(ErrorKind::kEmptyReference,
                  "reference for '" + id + "' is empty after normalization");
    }
    inputs.push_back(std::move(in));
  }
  if (!result.uncovered.empty() && !opts.allow_partial) {
    throw Error(ErrorKind::kMissingKey,
                fmt::format("{} references have no hypothesis: {} (pass --allow-partial to "
                            "score the covered subset)",
                            result.uncovered.size(), JoinIds(result.uncovered)));
  }
  if (inputs.empty()) throw Error(ErrorKind::kEmptyReference, "nothing to score");

  for (auto &in : inputs) {
    in.ref_vecs = embeddings.Embed(EmbeddingRecordId("ref", in.utterance_id), in.ref);
    if (!in.hyp.empty()) {
      in.hyp_vecs = embeddings.Embed(EmbeddingRecordId("hyp", in.utterance_id), in.hyp);
    }
  }

  result.per_utterance = opts.parallel ? ScorePairs(inputs, opts.baseline_b)
                                       : ScorePairsSerial(inputs, opts.baseline_b);
  Reaggregate(result);
  return result;
}

BiasReport MakeBiasReport(const ConditionResult &fb, const ConditionResult &fbn) {
  if (fb.baseline_b != fbn.baseline_b) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("bias report needs identical metric settings: baseline b {} vs {}",
                            fb.baseline_b, fbn.baseline_b));
  }
  BiasReport b;
  b.wer_fb = fb.pooled_wer;
  b.wer_fbn = fbn.pooled_wer;
  b.delta_wer = b.wer_fb - b.wer_fbn;
  b.f1_fb = fb.mean_f1_rescaled;
  b.f1_fbn = fbn.mean_f1_rescaled;
  b.delta_f1 = b.f1_fb - b.f1_fbn;
  return b;
}

SettingBreakdown PerVideoType(const ConditionResult &r, const Corpus &c) {
  const auto idx = IndexCorpus(c);
  std::map<Setting, std::vector<ErrorCounts>> by;
  for (const auto &s : r.per_utterance) by[Lookup(idx, s.utterance_id).setting].push_back(s.counts);
  SettingBreakdown out;
  for (Setting st : kSettings) {
    auto it = by.find(st);
    if (it == by.end()) {
      out.notes.push_back(fmt::format("no scored utterances for setting '{}'", SettingName(st)));
      continue;
    }
    out.rows.push_back({st, PooledOrZero(it->second), it->second.size()});
  }
  return out;
}

std::string SpeakerLabel(const std::string &speaker_id, const SpeakerInfo *info) {
  if (info && info->age && !info->gender.empty()) {
    return fmt::format("{}{}", *info->age,
                       static_cast<char>(std::tolower(static_cast<unsigned char>(info->gender[0]))));
  }
  return speaker_id;
}

std::vector<SpeakerRow> PerSpeaker(const ConditionResult &r, const Corpus &c) {
  const auto idx = IndexCorpus(c);
  std::map<std::string, std::vector<ErrorCounts>> by;
  for (const auto &s : r.per_utterance) {
    by[Lookup(idx, s.utterance_id).speaker_id].push_back(s.counts);
  }
  std::vector<SpeakerRow> rows;
  for (const auto &[speaker, counts] : by) {
    SpeakerRow row;
    row.speaker_id = speaker;
    auto it = c.speakers.find(speaker);
    const SpeakerInfo *info = it == c.speakers.end() ? nullptr : &it->second;
    row.label = SpeakerLabel(speaker, info);
    if (info) {
      row.age = info->age;
      row.gender = info->gender;
    }
    row.wer = PooledOrZero(counts);
    row.n_utterances = counts.size();
    rows.push_back(std::move(row));
  }
  return rows;
}

Quartiles ComputeQuartiles(std::vector<double> values) {
  if (values.empty()) throw Error(ErrorKind::kInvalidArgument, "quartiles of an empty list");
  std::sort(values.begin(), values.end());
  const auto at = [&](double q) {
    const double pos = q * static_cast<double>(values.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, values.size() - 1);
    return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
  };
  return {at(0.25), at(0.5), at(0.75)};
}

std::vector<DisfluencyRow> PerDisfluencyType(const ConditionResult &r, const Corpus &c) {
  const auto idx = IndexCorpus(c);
  DisfluencyRow rep{"repetition", {}, {}};
  DisfluencyRow interj{"interjection", {}, {}};
  for (const auto &s : r.per_utterance) {
    bool has_rep = false, has_interj = false;
    for (const auto &k : ClassifyDisfluencies(Lookup(idx, s.utterance_id))) {
      has_rep = has_rep || k.IsRepetition();
      has_interj = has_interj || k.tag == DisfluencyTag::kInterjection;
    }
    if (has_rep) rep.wers.push_back(s.wer);
    if (has_interj) interj.wers.push_back(s.wer);
  }
  std::vector<DisfluencyRow> rows;
  for (auto *row : {&rep, &interj}) {
    if (row->wers.empty()) continue;
    row->quartiles = ComputeQuartiles(row->wers);
    rows.push_back(std::move(*row));
  }
  return rows;
}

EvaluationRecord MakeEvaluationRecord(ConditionResult result, const Corpus *corpus) {
  EvaluationRecord rec;
  rec.notes.push_back(
      "pooled WER = sum(S+D+I) / sum(S+D+C); F_BERT = mean per-utterance rescaled BERTScore");
  if (corpus) {
    auto settings = PerVideoType(result, *corpus);
    rec.by_setting = std::move(settings.rows);
    for (auto &n : settings.notes) rec.notes.push_back(std::move(n));
    rec.by_speaker = PerSpeaker(result, *corpus);
    rec.by_disfluency = PerDisfluencyType(result, *corpus);
  }
  rec.result = std::move(result);
  return rec;
}

std::string RecordToJson(const EvaluationRecord &r) { return RecordToJsonValue(r).dump(2); }

EvaluationRecord RecordFromJson(std::string_view text) {
  return ParseJsonOrThrow<EvaluationRecord>(text, "evaluation record", &RecordFromJsonValue);
}

std::string BiasToJson(const BiasReport &b) {
  json j = {{"wer_fb", b.wer_fb}, {"wer_fbn", b.wer_fbn}, {"delta_wer", b.delta_wer},
            {"f1_fb", b.f1_fb},   {"f1_fbn", b.f1_fbn},   {"delta_f1", b.delta_f1}};
  return j.dump(2);
}

BiasReport BiasFromJson(std::string_view text) {
  return ParseJsonOrThrow<BiasReport>(text, "bias report", +[](const nlohmann::json &j) {
    return BiasReport{j.at("wer_fb").get<double>(),  j.at("wer_fbn").get<double>(),
                      j.at("delta_wer").get<double>(), j.at("f1_fb").get<double>(),
                      j.at("f1_fbn").get<double>(),  j.at("delta_f1").get<double>()};
  });
}

std::string ReportToJson(const Report &report) {
  json j;
  j["runs"] = json::array();
  for (const auto &r : report.runs) j["runs"].push_back(RecordToJsonValue(r));
  return j.dump(2);
}

Report ReportFromJson(std::string_view text) {
  return ParseJsonOrThrow<Report>(text, "report", +[](const nlohmann::json &j) {
    Report r;
    if (j.contains("runs")) {
      for (const auto &run : j.at("runs")) r.runs.push_back(RecordFromJsonValue(run));
    } else {
      r.runs.push_back(RecordFromJsonValue(j));
    }
    return r;
  });
}

Report LoadReport(std::span<const std::filesystem::path> paths) {
  Report out;
  for (const auto &p : paths) {
    Report part = ReportFromJson(ReadFile(p));
    for (auto &run : part.runs) out.runs.push_back(std::move(run));
  }
  return out;
}

ReportFormat ParseReportFormat(std::string_view name) {
  if (name == "md" || name == "markdown") return ReportFormat::kMarkdown;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "json") return ReportFormat::kJson;
  throw Error(ErrorKind::kInvalidArgument,
              "unknown report format '" + std::string(name) + "' (expected md|csv|json)");
}

std::string_view ReportFormatExtension(ReportFormat f) {
  switch (f) {
    case ReportFormat::kMarkdown: return "md";
    case ReportFormat::kCsv: return "csv";
    case ReportFormat::kJson: return "json";
  }
  return "json";
}

std::string FormatTableNumber(double v) {
  std::string s = fmt::format("{:.4f}", v);
  if (s == "-0.0000") s = "0.0000";
  if (s.rfind("0.", 0) == 0) return s.substr(1);
  if (s.rfind("-0.", 0) == 0) return "-" + s.substr(2);
  return s;
}

std::vector<Table> BuildTables(const Report &report) {
  std::vector<std::string> labels, conditions;
  std::map<std::pair<std::string, std::string>, const EvaluationRecord *> runs;
  for (const auto &rec : report.runs) {
    IndexOf(labels, rec.result.label);
    IndexOf(conditions, rec.result.condition);
    if (!runs.emplace(std::pair{rec.result.label, rec.result.condition}, &rec).second) {
      throw Error(ErrorKind::kDuplicateKey, fmt::format("two runs labelled '{}' / '{}'",
                                                        rec.result.label, rec.result.condition));
    }
  }
  const auto find = [&](const std::string &label,
                        const std::string &cond) -> const EvaluationRecord * {
    auto it = runs.find({label, cond});
    return it == runs.end() ? nullptr : it->second;
  };
  const bool has_bias = std::count(conditions.begin(), conditions.end(), "FB") &&
                        std::count(conditions.begin(), conditions.end(), "FBN");

  std::vector<Table> tables;

  Table metrics{"metrics", "WER and F_BERT per condition", {}, {}};
  for (const auto &c : conditions) metrics.columns.push_back("WER " + c);
  for (const auto &c : conditions) metrics.columns.push_back("F_BERT " + c);
  if (has_bias) {
    metrics.columns.push_back("delta WER");
    metrics.columns.push_back("delta F_BERT");
  }
  for (const auto &label : labels) {
    TableRow row{label, {}};
    for (const auto &c : conditions) {
      const auto *r = find(label, c);
      row.cells.push_back(r ? std::optional(r->result.pooled_wer) : std::nullopt);
    }
    for (const auto &c : conditions) {
      const auto *r = find(label, c);
      row.cells.push_back(r ? std::optional(r->result.mean_f1_rescaled) : std::nullopt);
    }
    if (has_bias) {
      const auto *fb = find(label, "FB");
      const auto *fbn = find(label, "FBN");
      if (fb && fbn) {
        const auto bias = MakeBiasReport(fb->result, fbn->result);
        row.cells.push_back(bias.delta_wer);
        row.cells.push_back(bias.delta_f1);
      } else {
        row.cells.push_back(std::nullopt);
        row.cells.push_back(std::nullopt);
      }
    }
    metrics.rows.push_back(std::move(row));
  }
  tables.push_back(std::move(metrics));

  Table settings{"video_setting", "WER per video setting", {}, {}};
  std::vector<std::pair<Setting, std::string>> setting_cols;
  for (Setting st : kSettings) {
    for (const auto &c : conditions) {
      bool present = false;
      for (const auto &rec : report.runs) {
        if (rec.result.condition != c) continue;
        for (const auto &row : rec.by_setting) present = present || row.setting == st;
      }
      if (!present) continue;
      setting_cols.emplace_back(st, c);
      settings.columns.push_back(fmt::format("WER {} {}", Capitalized(SettingName(st)), c));
    }
  }
  if (!setting_cols.empty()) {
    for (const auto &label : labels) {
      TableRow row{label, {}};
      for (const auto &[st, c] : setting_cols) {
        std::optional<double> v;
        if (const auto *r = find(label, c)) {
          for (const auto &sr : r->by_setting) {
            if (sr.setting == st) v = sr.pooled_wer;
          }
        }
        row.cells.push_back(v);
      }
      settings.rows.push_back(std::move(row));
    }
    tables.push_back(std::move(settings));
  }

  Table speakers{"speakers", "WER per speaker", {}, {}};
  std::vector<std::string> speaker_ids, speaker_labels;
  for (const auto &rec : report.runs) {
    for (const auto &row : rec.by_speaker) {
      if (std::count(speaker_ids.begin(), speaker_ids.end(), row.speaker_id)) continue;
      speaker_ids.push_back(row.speaker_id);
      speaker_labels.push_back(row.label);
    }
  }
  if (!speaker_ids.empty()) {
    for (const auto &rec : report.runs) {
      speakers.columns.push_back(rec.result.label + " " + rec.result.condition);
    }
    for (std::size_t s = 0; s < speaker_ids.size(); ++s) {
      std::string label = speaker_labels[s];
      if (std::count(speaker_labels.begin(), speaker_labels.end(), label) > 1) {
        label += " (" + speaker_ids[s] + ")";
      }
      TableRow row{label, {}};
      for (const auto &rec : report.runs) {
        std::optional<double> v;
        for (const auto &sr : rec.by_speaker) {
          if (sr.speaker_id == speaker_ids[s]) v = sr.wer;
        }
        row.cells.push_back(v);
      }
      speakers.rows.push_back(std::move(row));
    }
    tables.push_back(std::move(speakers));
  }

  Table disfl{"disfluency", "Per-utterance WER distribution per disfluency type",
              {"q1", "median", "q3", "mean"}, {}};
  for (const auto &rec : report.runs) {
    for (const auto &d : rec.by_disfluency) {
      double sum = 0.0;
      for (double w : d.wers) sum += w;
      disfl.rows.push_back(
          {fmt::format("{} {} {}", rec.result.label, rec.result.condition, d.kind),
           {d.quartiles.q1, d.quartiles.median, d.quartiles.q3,
            sum / static_cast<double>(d.wers.size())}});
    }
  }
  if (!disfl.rows.empty()) tables.push_back(std::move(disfl));
  return tables;
}

namespace {

std::string RenderMarkdown(const Report &report) {
  std::string out = "# Evaluation report\n\n";
  out +=
      "WER is pooled over utterances: sum(S+D+I) / sum(S+D+C). F_BERT is the mean of the "
      "per-utterance rescaled BERTScore.\n";
  std::set<double> baselines;
  for (const auto &r : report.runs) baselines.insert(r.result.baseline_b);
  for (double b : baselines) out += fmt::format("Rescaling baseline b = {}.\n", b);
  for (const auto &t : BuildTables(report)) {
    out += fmt::format("\n### {}: {}\n\n|", t.name, t.title);
    for (const auto &c : t.columns) out += " " + EscapeCell(c) + " |";
    out += "\n|---|";
    for (std::size_t i = 0; i < t.columns.size(); ++i) out += "---:|";
    out += "\n";
    for (const auto &row : t.rows) {
      out += "| " + EscapeCell(row.label) + " |";
      for (const auto &cell : row.cells) {
        out += " " + (cell ? FormatTableNumber(*cell) : std::string()) + " |";
      }
      out += "\n";
    }
  }
  return out;
}

std::string RenderCsv(const Report &report) {
  std::string out = "table,row,column,value\n";
  for (const auto &t : BuildTables(report)) {
    for (const auto &row : t.rows) {
      for (std::size_t i = 0; i < row.cells.size(); ++i) {
        if (!row.cells[i]) continue;
        out += fmt::format("{},{},{},{:.4f}\n", CsvQuote(t.name), CsvQuote(row.label),
                           CsvQuote(t.columns[i]), *row.cells[i]);
      }
    }
  }
  return out;
}

}  // namespace

std::string Render(const Report &report, ReportFormat format) {
  switch (format) {
    case ReportFormat::kMarkdown: return RenderMarkdown(report);
    case ReportFormat::kCsv: return RenderCsv(report);
    case ReportFormat::kJson: return ReportToJson(report) + "\n";
  }
  throw Error(ErrorKind::kInvalidArgument, "unknown report format");
}

std::vector<Table> ParseMarkdownTables(std::string_view text) {
  std::vector<Table> tables;
  std::istringstream in{std::string(text)};
  std::string line;
  Table *current = nullptr;
  int header_state = 0;  // 0 none, 1 expect header, 2 expect separator, 3 rows
  while (std::getline(in, line)) {
    if (line.rfind("### ", 0) == 0) {
      const auto colon = line.find(": ");
      Table t;
      t.name = line.substr(4, colon == std::string::npos ? std::string::npos : colon - 4);
      if (colon != std::string::npos) t.title = line.substr(colon + 2);
      tables.push_back(std::move(t));
      current = &tables.back();
      header_state = 1;
      continue;
    }
    if (!current || line.empty() || line[0] != '|') {
      if (header_state == 3) header_state = 0;
      continue;
    }
    auto cells = SplitMarkdownRow(line);
    if (header_state == 1) {
      current->columns.assign(cells.begin() + (cells.empty() ? 0 : 1), cells.end());
      header_state = 2;
    } else if (header_state == 2) {
      header_state = 3;
    } else if (header_state == 3) {
      if (cells.empty()) continue;
      TableRow row{cells[0], {}};
      for (std::size_t i = 1; i < cells.size(); ++i) row.cells.push_back(ParseCell(cells[i]));
      current->rows.push_back(std::move(row));
    }
  }
  return tables;
}

std::vector<Table> ParseCsvTables(std::string_view text) {
  std::vector<Table> tables;
  std::istringstream in{std::string(text)};
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    if (header) {
      header = false;
      continue;
    }
    const auto f = SplitCsvLine(line);
    if (f.size() != 4) throw Error(ErrorKind::kFormat, "csv row needs 4 fields: " + line);
    auto it = std::find_if(tables.begin(), tables.end(),
                           [&](const Table &t) { return t.name == f[0]; });
    if (it == tables.end()) {
      tables.push_back(Table{f[0], {}, {}, {}});
      it = tables.end() - 1;
    }
    Table &t = *it;
    const std::size_t col = IndexOf(t.columns, f[2]);
    auto row = std::find_if(t.rows.begin(), t.rows.end(),
                            [&](const TableRow &r) { return r.label == f[1]; });
    if (row == t.rows.end()) {
      t.rows.push_back(TableRow{f[1], {}});
      row = t.rows.end() - 1;
    }
    if (row->cells.size() <= col) row->cells.resize(col + 1);
    row->cells[col] = ParseCell(f[3]);
  }
  for (auto &t : tables) {
    for (auto &r : t.rows) r.cells.resize(t.columns.size());
  }
  return tables;
}

}  // namespace stutterkit
