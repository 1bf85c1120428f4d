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

// stutterkit: command-line front end. Every subcommand prints one JSON
// summary line on stdout; diagnostics go to stderr.
// Exit status: 0 ok, 1 invalid input or configuration, 2 partial failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "stutterkit/augmentor.hpp"
#include "stutterkit/chat_corpus.hpp"
#include "stutterkit/config.hpp"
#include "stutterkit/embeddings.hpp"
#include "stutterkit/error.hpp"
#include "stutterkit/folds.hpp"
#include "stutterkit/metrics.hpp"
#include "stutterkit/report.hpp"
#include "stutterkit/synth_jobs.hpp"

namespace fs = std::filesystem;
namespace sk = stutterkit;
using json = nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPartial = 2;

struct Outcome {
  json summary = json::object();
  int exit_code = kExitOk;
};

std::string ReadText(const fs::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw sk::Error(sk::ErrorKind::kIo, "cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void WriteText(const fs::path &p, const std::string &text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw sk::Error(sk::ErrorKind::kIo, "cannot write " + p.string());
  out << text;
}

void EnsureParent(const fs::path &p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

// --out wins, then <out_dir>/<fallback>.
fs::path OutPath(const std::string &flag, const sk::RunConfig &cfg, const std::string &fallback) {
  if (!flag.empty()) return flag;
  if (!cfg.out_dir.empty()) return fs::path(cfg.out_dir) / fallback;
  throw sk::Error(sk::ErrorKind::kConfig, "no --out given and no paths.out_dir configured");
}

std::string CorpusPath(const std::string &flag, const sk::RunConfig &cfg) {
  if (!flag.empty()) return flag;
  if (!cfg.corpus.empty()) return cfg.corpus;
  throw sk::Error(sk::ErrorKind::kConfig, "no corpus given and no paths.corpus configured");
}

std::string SidecarUrl(const std::string &flag, const std::string &configured,
                       const char *where = "--endpoint or tts.endpoint") {
  if (!flag.empty()) return flag;
  if (!configured.empty()) return configured;
  if (const char *env = std::getenv("DISFLUENCY_SIDECAR_URL"); env && *env) return env;
  throw sk::Error(sk::ErrorKind::kConfig,
                  fmt::format("no endpoint: set {} or DISFLUENCY_SIDECAR_URL", where));
}

std::vector<sk::VoiceSpec> VoicePool(const sk::RunConfig &cfg) {
  return cfg.voices.empty() ? sk::DefaultSpeakerVectorPool() : cfg.voices;
}

sk::TypeWeights ParseTypeWeights(const std::string &s) {
  std::vector<double> w;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      w.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw sk::Error(sk::ErrorKind::kInvalidArgument, "bad type weight '" + item + "'");
    }
  }
  if (w.size() != 3) {
    throw sk::Error(sk::ErrorKind::kInvalidArgument,
                    "--type-weights takes three values: word,phrase,interjection");
  }
  sk::TypeWeights out{w[0], w[1], w[2]};
  sk::ValidateTypeWeights(out);
  return out;
}

bool LooksLikeManifest(const fs::path &p) {
  std::istringstream in(ReadText(p));
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const json j = json::parse(line, nullptr, false);
    return j.is_object() && j.contains("job_id");
  }
  return false;
}

sk::ReferenceText RefTextFromName(const std::string &s) {
  if (s == "fluent") return sk::ReferenceText::kFluent;
  if (s == "verbatim") return sk::ReferenceText::kVerbatim;
  throw sk::Error(sk::ErrorKind::kInvalidArgument, "--ref-text must be fluent or verbatim");
}

// Restricts a corpus to the test fold when a fold file is given.
sk::Corpus MaybeTestFold(sk::Corpus c, const std::string &fold_file, std::optional<int> fold) {
  if (fold_file.empty()) {
    if (fold) throw sk::Error(sk::ErrorKind::kInvalidArgument, "--test-fold needs --fold-file");
    return c;
  }
  if (!fold) throw sk::Error(sk::ErrorKind::kInvalidArgument, "--fold-file needs --test-fold");
  const auto fa = sk::LoadFolds(fold_file);
  c.utterances = sk::TestSet(c, fa, *fold);
  return c;
}

struct LoadedRefs {
  sk::ReferenceSet refs;
  std::optional<sk::Corpus> corpus;
  std::string kind;
};

LoadedRefs LoadRefs(const std::string &path, const std::string &ref_text,
                    const std::string &fold_file, std::optional<int> fold) {
  LoadedRefs out;
  if (LooksLikeManifest(path)) {
    if (!fold_file.empty()) {
      throw sk::Error(sk::ErrorKind::kInvalidArgument, "fold filtering applies to corpus references");
    }
    out.refs = sk::ReferencesFromManifest(sk::LoadManifest(path));
    out.kind = "manifest";
  } else {
    out.corpus = MaybeTestFold(sk::LoadCorpus(path), fold_file, fold);
    out.refs = sk::ReferencesFromCorpus(*out.corpus, RefTextFromName(ref_text));
    out.kind = "corpus";
  }
  return out;
}

// ---- subcommands -----------------------------------------------------------

struct ParseArgs {
  std::vector<std::string> files;
  std::string out;
  std::string setting = "interview";
  std::string meta;
};

Outcome RunParse(const ParseArgs &a, const sk::RunConfig &cfg) {
  json meta = json::object();
  if (!a.meta.empty()) {
    meta = json::parse(ReadText(a.meta), nullptr, false);
    if (!meta.is_object()) throw sk::Error(sk::ErrorKind::kConfig, a.meta + ": expected an object");
  }
  std::set<std::string> stems;
  sk::Corpus corpus;
  std::size_t n_warnings = 0;
  for (const auto &file : a.files) {
    const std::string stem = fs::path(file).stem().string();
    stems.insert(stem);
    sk::SourceMeta m;
    m.video_id = stem;
    m.setting = sk::SettingFromName(a.setting);
    if (meta.contains(stem)) {
      const json &e = meta[stem];
      for (const auto &[k, _] : e.items()) {
        if (k != "setting" && k != "video_id" && k != "speaker_alias" && k != "include_codes") {
          throw sk::Error(sk::ErrorKind::kConfig, fmt::format("{}: {}.{}: unknown key", a.meta, stem, k));
        }
      }
      try {
        if (e.contains("setting")) m.setting = sk::SettingFromName(e["setting"].get<std::string>());
        if (e.contains("video_id")) m.video_id = e["video_id"].get<std::string>();
        if (e.contains("speaker_alias")) {
          m.speaker_alias = e["speaker_alias"].get<std::map<std::string, std::string>>();
        }
        if (e.contains("include_codes")) {
          m.include_codes = e["include_codes"].get<std::set<std::string>>();
        }
      } catch (const json::exception &ex) {
        throw sk::Error(sk::ErrorKind::kConfig, fmt::format("{}: {}: {}", a.meta, stem, ex.what()));
      }
    }
    sk::ParsedDocument doc;
    try {
      doc = sk::ParseChat(ReadText(file), m);
    } catch (const sk::Error &e) {
      throw sk::Error(e.kind(), file + ": " + e.what());
    }
    for (const auto &w : doc.warnings) std::cerr << file << ": warning: " << w << '\n';
    n_warnings += doc.warnings.size();
    sk::MergeCorpus(corpus, std::move(doc.corpus));
  }
  for (const auto &[k, _] : meta.items()) {
    if (!stems.count(k)) {
      throw sk::Error(sk::ErrorKind::kConfig, a.meta + ": entry '" + k + "' matches no input file");
    }
  }
  sk::ValidateCorpus(corpus);
  const fs::path out = OutPath(a.out, cfg, "corpus.jsonl");
  EnsureParent(out);
  sk::SaveCorpus(corpus, out);
  Outcome o;
  o.summary = {{"out", out.string()},
               {"files", a.files.size()},
               {"utterances", corpus.utterances.size()},
               {"speakers", sk::CorpusSpeakers(corpus).size()},
               {"warnings", n_warnings}};
  return o;
}

Outcome RunStats(const std::string &corpus_flag, const std::string &out, const sk::RunConfig &cfg) {
  const auto corpus = sk::LoadCorpus(CorpusPath(corpus_flag, cfg));
  const auto s = sk::ComputeCorpusStats(corpus);
  Outcome o;
  o.summary = {{"utterances", s.n_utterances},
               {"total_duration_s", s.total_duration_s},
               {"pct_with_repetition", s.pct_with_repetition},
               {"pct_with_interjection", s.pct_with_interjection},
               {"per_speaker", s.per_speaker_counts}};
  if (!out.empty()) {
    WriteText(out, o.summary.dump(2) + "\n");
    o.summary["out"] = out;
  }
  return o;
}

struct SplitArgs {
  std::string corpus;
  std::optional<int> k;
  std::optional<int> spf;
  std::string out;
};

Outcome RunSplit(const SplitArgs &a, const sk::RunConfig &cfg) {
  const auto corpus = sk::LoadCorpus(CorpusPath(a.corpus, cfg));
  const int k = a.k.value_or(cfg.k_folds);
  const int spf = a.spf.value_or(cfg.speakers_per_fold);
  const auto fa = sk::AssignFolds(corpus, k, spf, cfg.seed);
  const fs::path out = OutPath(a.out, cfg, "folds.json");
  EnsureParent(out);
  sk::SaveFolds(fa, out);
  json folds = json::array();
  for (const auto &f : fa.folds) folds.push_back(f);
  Outcome o;
  o.summary = {{"out", out.string()}, {"k", k}, {"speakers_per_fold", spf}, {"folds", folds}};
  return o;
}

struct AugmentArgs {
  std::string corpus;
  std::string fold_file;
  std::optional<int> test_fold;
  std::optional<std::size_t> n;
  std::string profile;
  std::string type_weights;
  std::string out;
  bool serial = false;
};

Outcome RunAugment(const AugmentArgs &a, const sk::RunConfig &cfg) {
  const auto corpus = sk::LoadCorpus(CorpusPath(a.corpus, cfg));
  sk::AugmentRequest req;
  req.n = a.n.value_or(cfg.n_augment);
  req.seed = cfg.seed;
  req.type_weights = a.type_weights.empty() ? cfg.type_weights : ParseTypeWeights(a.type_weights);
  if (a.profile.empty()) {
    req.profile = cfg.profile;
  } else if (!a.profile.empty() && a.profile[0] == '@') {
    req.profile = sk::ProfileFromJson(ReadText(a.profile.substr(1)));
  } else {
    req.profile = sk::AugmentationProfile::ByName(a.profile);
  }
  sk::Corpus pool;
  if (!a.fold_file.empty()) {
    if (!a.test_fold) throw sk::Error(sk::ErrorKind::kInvalidArgument, "--fold-file needs --test-fold");
    const auto fa = sk::LoadFolds(a.fold_file);
    pool.utterances = sk::TrainingPool(corpus, fa, *a.test_fold);
    req.id_prefix = fmt::format("fold{}_", *a.test_fold);
  } else {
    if (a.test_fold) throw sk::Error(sk::ErrorKind::kInvalidArgument, "--test-fold needs --fold-file");
    pool.utterances = corpus.utterances;
  }
  const auto items = a.serial ? sk::AugmentCorpusSerial(pool, req) : sk::AugmentCorpus(pool, req);
  const fs::path out = OutPath(a.out, cfg, "augmented.jsonl");
  EnsureParent(out);
  sk::SaveAugmented(items, out);
  Outcome o;
  o.summary = {{"out", out.string()},
               {"n", req.n},
               {"p", sk::ComputeP(static_cast<long long>(req.n),
                                  static_cast<long long>(corpus.utterances.size()))},
               {"profile", req.profile.name},
               {"pool", pool.utterances.size()}};
  if (a.test_fold) o.summary["test_fold"] = *a.test_fold;
  return o;
}

Outcome RunManifest(const std::string &augmented, const std::string &out_flag,
                    const sk::RunConfig &cfg) {
  const auto items = sk::LoadAugmented(augmented);
  const auto pool = VoicePool(cfg);
  const auto m = sk::BuildManifest(items, pool, cfg.seed, fs::path(augmented).filename().string());
  const fs::path out = OutPath(out_flag, cfg, "manifest.jsonl");
  EnsureParent(out);
  sk::SaveManifest(m, out);
  Outcome o;
  o.summary = {{"out", out.string()}, {"jobs", m.jobs.size()}, {"voices", pool.size()}};
  return o;
}

struct SynthArgs {
  std::string input;
  std::string endpoint;
  std::optional<int> concurrency;
  std::string out_dir;
  std::string report;
  std::string manifest_out;
  int max_attempts = 3;
  int backoff_ms = 1000;
  bool manifest_only = false;
};

Outcome Execute(const sk::TtsManifest &m, const SynthArgs &a, const sk::RunConfig &cfg,
                const fs::path &base) {
  sk::ExecuteOptions opts;
  opts.endpoint = SidecarUrl(a.endpoint, cfg.tts_endpoint);
  opts.base_dir = base;
  opts.concurrency = a.concurrency.value_or(cfg.tts_concurrency);
  opts.retry.max_attempts = a.max_attempts;
  opts.retry.initial_backoff = std::chrono::milliseconds(a.backoff_ms);
  sk::SidecarHealth(opts.endpoint);  // preflight: fail fast on a dead endpoint
  const auto r = sk::ExecuteManifest(m, opts);
  const fs::path report = a.report.empty() ? base / "execution_report.jsonl" : fs::path(a.report);
  EnsureParent(report);
  sk::SaveExecutionReport(r, report);
  for (const auto &oc : r.outcomes) {
    if (oc.status == sk::JobStatus::kFailed) {
      std::cerr << "job " << oc.job_id << " failed: " << oc.detail << '\n';
    }
  }
  Outcome o;
  o.summary = {{"jobs", m.jobs.size()},
               {"ok", r.Count(sk::JobStatus::kOk)},
               {"skipped", r.Count(sk::JobStatus::kSkipped)},
               {"failed", r.Count(sk::JobStatus::kFailed)},
               {"execution_report", report.string()}};
  if (!r.AllSucceeded()) o.exit_code = kExitPartial;
  return o;
}

fs::path SynthBase(const SynthArgs &a, const sk::RunConfig &cfg, const fs::path &input) {
  if (!a.out_dir.empty()) return a.out_dir;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  return input.has_parent_path() ? input.parent_path() : fs::path(".");
}

Outcome RunSynth(const SynthArgs &a, const sk::RunConfig &cfg) {
  const auto m = sk::LoadManifest(a.input);
  return Execute(m, a, cfg, SynthBase(a, cfg, a.input));
}

Outcome RunSynthFluent(const SynthArgs &a, const sk::RunConfig &cfg) {
  const fs::path corpus_path = CorpusPath(a.input, cfg);
  const auto corpus = sk::LoadCorpus(corpus_path);
  const auto fm = sk::BuildFluentManifest(corpus, VoicePool(cfg), cfg.seed,
                                          corpus_path.filename().string());
  const fs::path base = SynthBase(a, cfg, corpus_path);
  const fs::path manifest =
      a.manifest_out.empty() ? base / "fluent_manifest.jsonl" : fs::path(a.manifest_out);
  EnsureParent(manifest);
  sk::SaveManifest(fm.manifest, manifest);
  Outcome o;
  if (!a.manifest_only) o = Execute(fm.manifest, a, cfg, base);
  o.summary["manifest"] = manifest.string();
  o.summary["jobs"] = fm.manifest.jobs.size();
  o.summary["skipped_fluent_empty"] = fm.skipped_fluent_empty;
  return o;
}

struct EvalArgs {
  std::string refs;
  std::string hyps;
  std::string emb;
  std::optional<double> b;
  std::string condition = "FB";
  std::string label = "run";
  std::string ref_text = "fluent";
  std::string fold_file;
  std::optional<int> test_fold;
  std::string out;
  std::string cache_dir;
  std::string model_id = "roberta-large";
  bool allow_partial = false;
  bool serial = false;
};

Outcome RunEmbedMock(const EvalArgs &a, const sk::RunConfig &cfg) {
  const auto loaded = LoadRefs(CorpusPath(a.refs, cfg), a.ref_text, a.fold_file, a.test_fold);
  const auto hyps = sk::LoadHypotheses(a.hyps);
  sk::EmbeddingTable table(16, "mock-embed");
  const auto add = [&](const std::string &role, const std::string &id, const std::string &text) {
    const auto tokens = sk::Normalize(text).tokens;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      table.Add(sk::EmbeddingRecordId(role, id), i, sk::MockTokenVector(tokens[i], i));
    }
  };
  for (const auto &[id, text] : loaded.refs.items) add("ref", id, text);
  for (const auto &h : hyps) add("hyp", h.utterance_id, h.text);
  const fs::path out = OutPath(a.out, cfg, "embeddings.tsv");
  EnsureParent(out);
  sk::SaveEmbeddings(table, out);
  Outcome o;
  o.summary = {{"out", out.string()}, {"vectors", table.size()}, {"dim", table.dim()}};
  return o;
}

Outcome RunEval(const EvalArgs &a, const sk::RunConfig &cfg) {
  const auto loaded = LoadRefs(CorpusPath(a.refs, cfg), a.ref_text, a.fold_file, a.test_fold);
  const auto hyps = sk::LoadHypotheses(a.hyps);
  const std::string emb_spec = SidecarUrl(a.emb, cfg.embeddings, "--emb or embeddings.source");
  fs::path cache = a.cache_dir;
  if (cache.empty()) cache = (cfg.out_dir.empty() ? fs::path(".") : fs::path(cfg.out_dir)) / "embed_cache";
  auto source = sk::OpenEmbeddingSource(emb_spec, a.model_id, cache);
  sk::EvaluateOptions opts;
  opts.condition = a.condition;
  opts.label = a.label;
  opts.baseline_b = a.b.value_or(cfg.baseline_b);
  opts.allow_partial = a.allow_partial;
  opts.parallel = !a.serial;
  auto result = sk::EvaluateRun(loaded.refs, hyps, *source, opts);
  const auto record =
      sk::MakeEvaluationRecord(std::move(result), loaded.corpus ? &*loaded.corpus : nullptr);
  const fs::path out = OutPath(a.out, cfg, fmt::format("eval_{}.json", a.condition));
  WriteText(out, sk::RecordToJson(record));
  for (const auto &id : record.result.uncovered) std::cerr << "uncovered: " << id << '\n';
  Outcome o;
  o.summary = {{"out", out.string()},
               {"condition", a.condition},
               {"label", a.label},
               {"refs", loaded.kind},
               {"utterances", record.result.per_utterance.size()},
               {"uncovered", record.result.uncovered.size()},
               {"excluded", loaded.refs.excluded.size()},
               {"pooled_wer", record.result.pooled_wer},
               {"mean_f1_rescaled", record.result.mean_f1_rescaled},
               {"baseline_b", record.result.baseline_b}};
  return o;
}

Outcome RunBias(const std::string &fb, const std::string &fbn, const std::string &out_flag,
                const sk::RunConfig &cfg) {
  const auto a = sk::RecordFromJson(ReadText(fb));
  const auto b = sk::RecordFromJson(ReadText(fbn));
  const auto bias = sk::MakeBiasReport(a.result, b.result);
  const fs::path out = OutPath(out_flag, cfg, "bias.json");
  WriteText(out, sk::BiasToJson(bias));
  Outcome o;
  o.summary = json::parse(sk::BiasToJson(bias));
  o.summary["out"] = out.string();
  return o;
}

struct ReportArgs {
  std::vector<std::string> inputs;
  std::string formats;
  std::string out_dir;
  std::string stem = "report";
};

Outcome RunReport(const ReportArgs &a, const sk::RunConfig &cfg) {
  std::vector<fs::path> paths(a.inputs.begin(), a.inputs.end());
  const auto report = sk::LoadReport(paths);
  std::vector<sk::ReportFormat> formats;
  if (a.formats.empty()) {
    formats = cfg.report_formats;
  } else {
    std::stringstream ss(a.formats);
    std::string f;
    while (std::getline(ss, f, ',')) formats.push_back(sk::ParseReportFormat(f));
  }
  const fs::path dir = !a.out_dir.empty() ? fs::path(a.out_dir)
                       : !cfg.out_dir.empty() ? fs::path(cfg.out_dir)
                                              : fs::path(".");
  json written = json::array();
  for (const auto f : formats) {
    const fs::path out = dir / fmt::format("{}.{}", a.stem, sk::ReportFormatExtension(f));
    WriteText(out, sk::Render(report, f));
    written.push_back(out.string());
  }
  Outcome o;
  o.summary = {{"runs", report.runs.size()}, {"written", written}};
  return o;
}

Outcome RunHealth(const std::string &endpoint, const sk::RunConfig &cfg) {
  const std::string url = SidecarUrl(endpoint, cfg.tts_endpoint);
  const std::string body = sk::SidecarHealth(url);
  Outcome o;
  const json j = json::parse(body, nullptr, false);
  o.summary = {{"endpoint", url}, {"health", j.is_discarded() ? json(body) : j}};
  return o;
}

void PrintSummary(const std::string &command, const std::string &status, std::uint64_t seed,
                  json body) {
  json line = {{"command", command}, {"status", status}, {"seed", seed}};
  for (auto &[k, v] : body.items()) line[k] = v;
  std::cout << line.dump() << std::endl;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"stutterkit: corpus, augmentation and evaluation tools for stuttered-speech ASR"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_help_all_flag("--help-all", "Expand all help");

  std::string config_path;
  std::optional<std::uint64_t> seed;
  app.add_option("--config", config_path, "JSON run configuration");
  app.add_option("--seed", seed, "top-level seed (overrides the config)");

  std::function<Outcome(const sk::RunConfig &)> handler;
  std::string command;
  const auto bind = [&](CLI::App *sub, std::function<Outcome(const sk::RunConfig &)> fn) {
    sub->callback([&, sub, fn] {
      command = sub->get_name();
      handler = fn;
    });
  };

  ParseArgs parse;
  auto *c_parse = app.add_subcommand("parse", "CHAT transcripts to a corpus JSONL");
  c_parse->add_option("files", parse.files, "CHAT files")->required()->check(CLI::ExistingFile);
  c_parse->add_option("--out", parse.out, "corpus JSONL to write");
  c_parse->add_option("--setting", parse.setting, "reading|interview|synthetic for all files");
  c_parse->add_option("--meta", parse.meta, "per-file metadata JSON keyed by file stem");
  bind(c_parse, [&](const sk::RunConfig &cfg) { return RunParse(parse, cfg); });

  std::string stats_corpus, stats_out;
  auto *c_stats = app.add_subcommand("stats", "corpus statistics");
  c_stats->add_option("corpus", stats_corpus);
  c_stats->add_option("--out", stats_out, "also write the statistics as JSON");
  bind(c_stats, [&](const sk::RunConfig &cfg) { return RunStats(stats_corpus, stats_out, cfg); });

  SplitArgs split;
  auto *c_split = app.add_subcommand("split", "speaker-disjoint folds");
  c_split->add_option("corpus", split.corpus);
  c_split->add_option("--k", split.k, "number of folds");
  c_split->add_option("--spf", split.spf, "speakers per fold");
  c_split->add_option("--out", split.out, "fold file to write");
  bind(c_split, [&](const sk::RunConfig &cfg) { return RunSplit(split, cfg); });

  AugmentArgs aug;
  auto *c_aug = app.add_subcommand("augment", "sample augmented utterances");
  c_aug->add_option("corpus", aug.corpus);
  c_aug->add_option("--fold-file", aug.fold_file);
  c_aug->add_option("--test-fold", aug.test_fold, "fold held out of the training pool");
  c_aug->add_option("--n", aug.n, "number of samples");
  c_aug->add_option("--profile", aug.profile, "standard|extended|@profile.json");
  c_aug->add_option("--type-weights", aug.type_weights, "word,phrase,interjection");
  c_aug->add_option("--out", aug.out);
  c_aug->add_flag("--serial", aug.serial, "use the single-threaded reference path");
  bind(c_aug, [&](const sk::RunConfig &cfg) { return RunAugment(aug, cfg); });

  std::string man_in, man_out;
  auto *c_man = app.add_subcommand("manifest", "TTS job manifest from augmented utterances");
  c_man->add_option("augmented", man_in)->required()->check(CLI::ExistingFile);
  c_man->add_option("--out", man_out);
  bind(c_man, [&](const sk::RunConfig &cfg) { return RunManifest(man_in, man_out, cfg); });

  SynthArgs synth;
  const auto synth_opts = [&](CLI::App *sub) {
    sub->add_option("--endpoint", synth.endpoint, "sidecar base URL");
    sub->add_option("--concurrency", synth.concurrency);
    sub->add_option("--out-dir", synth.out_dir, "base directory for audio");
    sub->add_option("--report", synth.report, "execution report JSONL");
    sub->add_option("--max-attempts", synth.max_attempts)->check(CLI::PositiveNumber);
    sub->add_option("--backoff-ms", synth.backoff_ms)->check(CLI::NonNegativeNumber);
  };
  auto *c_synth = app.add_subcommand("synth", "run a TTS manifest against the sidecar");
  c_synth->add_option("manifest", synth.input)->required()->check(CLI::ExistingFile);
  synth_opts(c_synth);
  bind(c_synth, [&](const sk::RunConfig &cfg) { return RunSynth(synth, cfg); });

  auto *c_fluent = app.add_subcommand("synth-fluent", "synthesize fluent versions of a corpus");
  c_fluent->add_option("corpus", synth.input);
  c_fluent->add_option("--manifest-out", synth.manifest_out);
  c_fluent->add_flag("--manifest-only", synth.manifest_only, "write the manifest, skip synthesis");
  synth_opts(c_fluent);
  bind(c_fluent, [&](const sk::RunConfig &cfg) { return RunSynthFluent(synth, cfg); });

  EvalArgs ev;
  const auto ref_opts = [&](CLI::App *sub) {
    sub->add_option("--refs", ev.refs, "corpus JSONL or TTS manifest");
    sub->add_option("--hyps", ev.hyps, "hypotheses JSONL")->required()->check(CLI::ExistingFile);
    sub->add_option("--ref-text", ev.ref_text, "fluent|verbatim (corpus references)");
    sub->add_option("--fold-file", ev.fold_file);
    sub->add_option("--test-fold", ev.test_fold, "score only this fold's utterances");
    sub->add_option("--out", ev.out);
  };
  auto *c_emock = app.add_subcommand("embed-mock", "deterministic embedding table for refs and hyps");
  ref_opts(c_emock);
  bind(c_emock, [&](const sk::RunConfig &cfg) { return RunEmbedMock(ev, cfg); });

  auto *c_eval = app.add_subcommand("eval", "score hypotheses: WER and rescaled BERTScore");
  ref_opts(c_eval);
  c_eval->add_option("--emb", ev.emb, "embedding table file or sidecar URL");
  c_eval->add_option("--b", ev.b, "BERTScore rescaling baseline");
  c_eval->add_option("--condition", ev.condition, "condition name, e.g. FB or FBN");
  c_eval->add_option("--label", ev.label, "row label, e.g. Base or p=36");
  c_eval->add_option("--cache-dir", ev.cache_dir, "embedding cache for sidecar sources");
  c_eval->add_option("--model-id", ev.model_id, "embedding model requested from the sidecar");
  c_eval->add_flag("--allow-partial", ev.allow_partial, "score only covered references");
  c_eval->add_flag("--serial", ev.serial, "use the single-threaded reference path");
  bind(c_eval, [&](const sk::RunConfig &cfg) { return RunEval(ev, cfg); });

  std::string bias_fb, bias_fbn, bias_out;
  auto *c_bias = app.add_subcommand("bias", "FB minus FBN deltas");
  c_bias->add_option("--fb", bias_fb)->required()->check(CLI::ExistingFile);
  c_bias->add_option("--fbn", bias_fbn)->required()->check(CLI::ExistingFile);
  c_bias->add_option("--out", bias_out);
  bind(c_bias, [&](const sk::RunConfig &cfg) { return RunBias(bias_fb, bias_fbn, bias_out, cfg); });

  ReportArgs rep;
  auto *c_rep = app.add_subcommand("report", "render evaluation records as tables");
  c_rep->add_option("--in", rep.inputs, "evaluation JSON files")->required()->check(CLI::ExistingFile);
  c_rep->add_option("--format", rep.formats, "comma list of md,csv,json");
  c_rep->add_option("--out-dir", rep.out_dir);
  c_rep->add_option("--stem", rep.stem, "output file name stem");
  bind(c_rep, [&](const sk::RunConfig &cfg) { return RunReport(rep, cfg); });

  std::string health_ep;
  auto *c_health = app.add_subcommand("health", "check that the sidecar answers");
  c_health->add_option("--endpoint", health_ep);
  bind(c_health, [&](const sk::RunConfig &cfg) { return RunHealth(health_ep, cfg); });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    for (auto *sub : app.get_subcommands({})) {
      for (int i = 1; i < argc && command.empty(); ++i) {
        if (sub->get_name() == argv[i]) command = argv[i];
      }
    }
    PrintSummary(command, "error", seed.value_or(0),
                 {{"error", "Usage"}, {"message", e.what()}});
    return kExitInvalid;
  }

  sk::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = sk::LoadRunConfig(config_path);
    if (seed) cfg.seed = *seed;
    Outcome o = handler(cfg);
    PrintSummary(command, o.exit_code == kExitOk ? "ok" : "partial", cfg.seed, std::move(o.summary));
    return o.exit_code;
  } catch (const sk::Error &e) {
    std::cerr << "stutterkit " << command << ": " << sk::ErrorKindName(e.kind()) << ": "
              << e.what() << '\n';
    PrintSummary(command, "error", cfg.seed,
                 {{"error", sk::ErrorKindName(e.kind())}, {"message", e.what()}});
    return kExitInvalid;
  } catch (const std::exception &e) {
    std::cerr << "stutterkit " << command << ": " << e.what() << '\n';
    PrintSummary(command, "error", cfg.seed, {{"error", "Internal"}, {"message", e.what()}});
    return kExitInvalid;
  }
}
