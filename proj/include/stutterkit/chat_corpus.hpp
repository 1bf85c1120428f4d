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

// CHAT transcript ingestion: the utterance model, the supported CHAT subset
// parser, fluent-text derivation and corpus JSONL persistence.

#pragma once

#include <compare>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace stutterkit {

using Tokens = std::vector<std::string>;

enum class DisfluencyTag {
  kWordRepetition,
  kPhraseRepetition,
  kInterjection,
  kRetracing,
  kFragment,
  kPause,
  kOther,
};

struct DisfluencyKind {
  DisfluencyTag tag = DisfluencyTag::kOther;
  std::string code;  // only meaningful for kOther

  static DisfluencyKind Of(DisfluencyTag tag) { return {tag, {}}; }
  static DisfluencyKind Other(std::string code) {
    return {DisfluencyTag::kOther, std::move(code)};
  }

  bool IsRepetition() const {
    return tag == DisfluencyTag::kWordRepetition || tag == DisfluencyTag::kPhraseRepetition;
  }

  auto operator<=>(const DisfluencyKind &) const = default;
};

// snake_case wire name ("word_repetition", ..., "other").
std::string_view KindName(DisfluencyTag tag);
DisfluencyTag KindFromName(std::string_view name);

// Half-open [begin, end) into an utterance's verbatim tokens.
struct TokenSpan {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool Contains(const TokenSpan &o) const { return begin <= o.begin && o.end <= end; }
  bool Disjoint(const TokenSpan &o) const { return end <= o.begin || o.end <= begin; }
  auto operator<=>(const TokenSpan &) const = default;
};

struct DisfluencyEvent {
  DisfluencyKind kind;
  TokenSpan span;
  int repeat_count = 0;

  auto operator<=>(const DisfluencyEvent &) const = default;
};

enum class Setting { kReading, kInterview, kSynthetic };

std::string_view SettingName(Setting s);
Setting SettingFromName(std::string_view name);

struct Utterance {
  std::string id;
  std::string speaker_id;
  std::string video_id;
  Setting setting = Setting::kInterview;
  Tokens verbatim_tokens;
  std::vector<DisfluencyEvent> events;
  std::optional<double> duration_s;

  bool operator==(const Utterance &) const = default;
};

struct SpeakerInfo {
  std::optional<int> age;
  std::string gender;

  bool operator==(const SpeakerInfo &) const = default;
};

struct Corpus {
  std::vector<Utterance> utterances;
  std::map<std::string, SpeakerInfo> speakers;

  bool operator==(const Corpus &) const = default;
};

struct SourceMeta {
  std::string video_id;
  Setting setting = Setting::kInterview;
  // Tier code (e.g. "PAR") -> corpus speaker id. Unmapped codes become
  // "<video_id>_<code>".
  std::map<std::string, std::string> speaker_alias;
  // When non-empty, only tiers with these codes are kept.
  std::set<std::string> include_codes;
};

struct ParsedDocument {
  Corpus corpus;
  std::vector<std::string> warnings;  // "line N: ..." in document order
};

// Parses one CHAT document. Throws ParseError (with line number) on malformed
// tiers, unbalanced groups, empty utterances or an empty document.
ParsedDocument ParseChat(std::string_view document, const SourceMeta &meta);

// Throws Error(kFluentEmpty) when nothing fluent remains.
Tokens DeriveFluentText(const Utterance &u);

std::set<DisfluencyKind> ClassifyDisfluencies(const Utterance &u);

struct CorpusStats {
  std::size_t n_utterances = 0;
  double total_duration_s = 0.0;
  double pct_with_repetition = 0.0;    // one decimal
  double pct_with_interjection = 0.0;  // one decimal
  std::map<std::string, std::size_t> per_speaker_counts;
};

CorpusStats ComputeCorpusStats(const Corpus &c);

// Structural checks: ids unique, non-empty tokens, span bounds, sorted events,
// no partial overlaps, repetition counts, speakers present when loaded.
// Throws Error(kFormat) naming the first violation.
void ValidateUtterance(const Utterance &u);
void ValidateCorpus(const Corpus &c);

// Appends `other` into `into`; throws kDuplicateKey on utterance id clashes.
void MergeCorpus(Corpus &into, Corpus other);

// Corpus JSONL: one utterance per line. Speaker demographics, when present,
// go to the sibling "<path>.speakers.json".
std::string UtteranceToJsonLine(const Utterance &u);
Utterance UtteranceFromJsonLine(std::string_view line);
void SaveCorpus(const Corpus &c, const std::filesystem::path &path);
Corpus LoadCorpus(const std::filesystem::path &path);

std::filesystem::path SpeakersSidecarPath(const std::filesystem::path &corpus_path);
// Sidecar speaker metadata: {"<speaker_id>": {"age": 26, "gender": "female"}}.
std::map<std::string, SpeakerInfo> LoadSpeakerMetadata(const std::filesystem::path &path);

std::string JoinTokens(const Tokens &tokens);

}  // namespace stutterkit
