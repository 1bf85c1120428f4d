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

#include "stutterkit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "stutterkit/error.hpp"

namespace stutterkit {
namespace {

using json = nlohmann::json;

[[noreturn]] void Fail(const std::string &where, const std::string &what) {
  throw Error(ErrorKind::kConfig, where.empty() ? what : where + ": " + what);
}

std::string Join(const std::string &where, const std::string &key) {
  return where.empty() ? key : where + "." + key;
}

const json &Object(const json &j, const std::string &where,
                   std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) Fail(where, "expected an object");
  for (const auto &[key, _] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      Fail(Join(where, key), "unknown key");
    }
  }
  return j;
}

template <typename T>
T Get(const json &j, const std::string &where) {
  try {
    return j.get<T>();
  } catch (const json::exception &) {
    Fail(where, "wrong type (" + std::string(j.type_name()) + ")");
  }
}

int PositiveInt(const json &j, const std::string &where) {
  if (!j.is_number_integer()) Fail(where, "expected an integer");
  const auto v = j.get<long long>();
  if (v < 1 || v > 1'000'000) Fail(where, "must be a positive integer");
  return static_cast<int>(v);
}

IntRange RangeFrom(const json &j, const std::string &where) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer()) {
    Fail(where, "expected [lo, hi]");
  }
  const IntRange r{j[0].get<int>(), j[1].get<int>()};
  if (r.lo < 1 || r.hi < r.lo) Fail(where, fmt::format("invalid range [{}, {}]", r.lo, r.hi));
  return r;
}

AugmentationProfile InlineProfile(const json &j, const std::string &where) {
  Object(j, where, {"name", "base", "word_rep", "phrase_rep", "interjection"});
  AugmentationProfile p = AugmentationProfile::ByName(
      j.contains("base") ? Get<std::string>(j["base"], Join(where, "base")) : "standard");
  p.name = j.contains("name") ? Get<std::string>(j["name"], Join(where, "name")) : "custom";
  if (j.contains("word_rep")) {
    const std::string w = Join(where, "word_rep");
    const auto &o = Object(j["word_rep"], w, {"n_words", "n_repeats"});
    if (o.contains("n_words")) p.word_rep.n_words = RangeFrom(o["n_words"], Join(w, "n_words"));
    if (o.contains("n_repeats")) {
      p.word_rep.n_repeats = RangeFrom(o["n_repeats"], Join(w, "n_repeats"));
    }
  }
  if (j.contains("phrase_rep")) {
    const std::string w = Join(where, "phrase_rep");
    const auto &o = Object(j["phrase_rep"], w, {"phrase_len", "n_repeats"});
    if (o.contains("phrase_len")) {
      p.phrase_rep.phrase_len = RangeFrom(o["phrase_len"], Join(w, "phrase_len"));
    }
    if (o.contains("n_repeats")) {
      p.phrase_rep.n_repeats = RangeFrom(o["n_repeats"], Join(w, "n_repeats"));
    }
  }
  if (j.contains("interjection")) {
    const std::string w = Join(where, "interjection");
    const auto &o = Object(j["interjection"], w, {"n_sites", "n_repeats", "lexicon"});
    if (o.contains("n_sites")) {
      p.interjection.n_sites = RangeFrom(o["n_sites"], Join(w, "n_sites"));
    }
    if (o.contains("n_repeats")) {
      p.interjection.n_repeats = RangeFrom(o["n_repeats"], Join(w, "n_repeats"));
    }
    if (o.contains("lexicon")) {
      p.interjection.lexicon = Get<Tokens>(o["lexicon"], Join(w, "lexicon"));
    }
  }
  try {
    ValidateProfile(p);
  } catch (const Error &e) {
    Fail(where, e.what());
  }
  return p;
}

AugmentationProfile ProfileValue(const json &j, const std::string &where) {
  if (j.is_string()) {
    try {
      return AugmentationProfile::ByName(j.get<std::string>());
    } catch (const Error &e) {
      Fail(where, e.what());
    }
  }
  return InlineProfile(j, where);
}

std::size_t LineOf(std::string_view text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + byte, '\n'));
}

json ParseJson(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error &e) {
    // e.byte is one past the offending character
    Fail("", fmt::format("line {}: invalid JSON", LineOf(text, e.byte == 0 ? 0 : e.byte - 1)));
  }
}

}  // namespace

void ValidateTypeWeights(const TypeWeights &w) {
  double sum = 0.0;
  for (double x : w) {
    if (!std::isfinite(x) || x < 0.0) {
      throw Error(ErrorKind::kInvalidArgument, "type weights must be finite and non-negative");
    }
    sum += x;
  }
  if (sum <= 0.0) throw Error(ErrorKind::kInvalidArgument, "type weights sum to zero");
}

AugmentationProfile ProfileFromJson(std::string_view text) {
  return ProfileValue(ParseJson(text), "profile");
}

RunConfig ParseRunConfig(std::string_view text) {
  const json root = ParseJson(text);
  Object(root, "", {"paths", "seed", "folds", "augment", "tts", "embeddings", "report"});
  RunConfig c;

  if (root.contains("paths")) {
    const auto &o = Object(root["paths"], "paths", {"corpus", "out_dir"});
    if (o.contains("corpus")) c.corpus = Get<std::string>(o["corpus"], "paths.corpus");
    if (o.contains("out_dir")) c.out_dir = Get<std::string>(o["out_dir"], "paths.out_dir");
  }
  if (root.contains("seed")) {
    const auto &s = root["seed"];
    if (!s.is_number_unsigned()) Fail("seed", "expected a non-negative integer");
    c.seed = s.get<std::uint64_t>();
  }
  if (root.contains("folds")) {
    const auto &o = Object(root["folds"], "folds", {"k", "speakers_per_fold"});
    if (o.contains("k")) c.k_folds = PositiveInt(o["k"], "folds.k");
    if (o.contains("speakers_per_fold")) {
      c.speakers_per_fold = PositiveInt(o["speakers_per_fold"], "folds.speakers_per_fold");
    }
  }
  if (root.contains("augment")) {
    const auto &o = Object(root["augment"], "augment", {"n", "profile", "type_weights"});
    if (o.contains("n")) {
      if (!o["n"].is_number_unsigned()) Fail("augment.n", "expected a non-negative integer");
      c.n_augment = o["n"].get<std::size_t>();
    }
    if (o.contains("profile")) c.profile = ProfileValue(o["profile"], "augment.profile");
    if (o.contains("type_weights")) {
      const auto w = Get<std::vector<double>>(o["type_weights"], "augment.type_weights");
      if (w.size() != 3) Fail("augment.type_weights", "expected three weights");
      c.type_weights = {w[0], w[1], w[2]};
      try {
        ValidateTypeWeights(c.type_weights);
      } catch (const Error &e) {
        Fail("augment.type_weights", e.what());
      }
    }
  }
  if (root.contains("tts")) {
    const auto &o = Object(root["tts"], "tts", {"endpoint", "concurrency", "voices"});
    if (o.contains("endpoint")) c.tts_endpoint = Get<std::string>(o["endpoint"], "tts.endpoint");
    if (o.contains("concurrency")) c.tts_concurrency = PositiveInt(o["concurrency"], "tts.concurrency");
    if (o.contains("voices")) {
      if (!o["voices"].is_array() || o["voices"].empty()) {
        Fail("tts.voices", "expected a non-empty array");
      }
      for (std::size_t i = 0; i < o["voices"].size(); ++i) {
        const std::string w = fmt::format("tts.voices[{}]", i);
        const auto &v = Object(o["voices"][i], w, {"provider", "voice_id", "notes"});
        if (!v.contains("provider") || !v.contains("voice_id")) {
          Fail(w, "provider and voice_id are required");
        }
        VoiceSpec spec;
        try {
          spec.provider = ProviderFromName(Get<std::string>(v["provider"], Join(w, "provider")));
        } catch (const Error &e) {
          Fail(Join(w, "provider"), e.what());
        }
        spec.voice_id = Get<std::string>(v["voice_id"], Join(w, "voice_id"));
        if (v.contains("notes")) spec.notes = Get<std::string>(v["notes"], Join(w, "notes"));
        c.voices.push_back(std::move(spec));
      }
    }
  }
  if (root.contains("embeddings")) {
    const auto &o = Object(root["embeddings"], "embeddings", {"source", "baseline_b"});
    if (o.contains("source")) c.embeddings = Get<std::string>(o["source"], "embeddings.source");
    if (o.contains("baseline_b")) {
      c.baseline_b = Get<double>(o["baseline_b"], "embeddings.baseline_b");
      if (!std::isfinite(c.baseline_b) || c.baseline_b >= 1.0) {
        Fail("embeddings.baseline_b", "must be finite and below 1");
      }
    }
  }
  if (root.contains("report")) {
    const auto &o = Object(root["report"], "report", {"formats"});
    if (o.contains("formats")) {
      c.report_formats.clear();
      for (const auto &f : Get<std::vector<std::string>>(o["formats"], "report.formats")) {
        try {
          c.report_formats.push_back(ParseReportFormat(f));
        } catch (const Error &e) {
          Fail("report.formats", e.what());
        }
      }
      if (c.report_formats.empty()) Fail("report.formats", "empty");
    }
  }
  return c;
}

RunConfig LoadRunConfig(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return ParseRunConfig(ss.str());
  } catch (const Error &e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace stutterkit
