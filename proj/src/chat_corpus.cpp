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

#include "stutterkit/chat_corpus.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "stutterkit/error.hpp"

namespace stutterkit {

namespace {

using json = nlohmann::ordered_json;

constexpr DisfluencyTag kAllTags[] = {
    DisfluencyTag::kWordRepetition, DisfluencyTag::kPhraseRepetition,
    DisfluencyTag::kInterjection,   DisfluencyTag::kRetracing,
    DisfluencyTag::kFragment,       DisfluencyTag::kPause,
    DisfluencyTag::kOther,
};

bool IsSpace(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; }

std::string_view Trim(std::string_view s) {
  while (!s.empty() && IsSpace(s.front())) s.remove_prefix(1);
  while (!s.empty() && IsSpace(s.back())) s.remove_suffix(1);
  return s;
}

bool StartsWith(std::string_view s, std::string_view prefix) {
  return s.substr(0, prefix.size()) == prefix;
}

// Removes CHAT in-word markers: prolongation ':', blocking '^', stress marks,
// omitted-sound parentheses, compound '+', and '@' special-form suffixes.
std::string CleanWord(std::string_view raw) {
  if (auto at = raw.find('@'); at != std::string_view::npos) raw = raw.substr(0, at);
  static const std::string_view kDropSeqs[] = {"ˈ", "ˌ", "≠", "↫", "‡", "„"};
  std::string out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size();) {
    bool dropped = false;
    for (auto seq : kDropSeqs) {
      if (raw.substr(i, seq.size()) == seq) {
        i += seq.size();
        dropped = true;
        break;
      }
    }
    if (dropped) continue;
    const char c = raw[i++];
    if (c == ':' || c == '^' || c == '(' || c == ')' || c == '+') continue;
    out.push_back(c);
  }
  while (!out.empty() && (out.back() == ',' || out.back() == '.' || out.back() == '?' ||
                          out.back() == '!' || out.back() == ';')) {
    out.pop_back();
  }
  return out;
}

bool IsPauseMark(std::string_view w) {
  if (w.size() < 3 || w.front() != '(' || w.back() != ')') return false;
  auto inner = w.substr(1, w.size() - 2);
  bool has_dot = false;
  for (char c : inner) {
    if (c == '.') {
      has_dot = true;
    } else if (!std::isdigit(static_cast<unsigned char>(c)) && c != ':') {
      return false;
    }
  }
  return has_dot;
}

bool IsSkippedPunct(std::string_view w) {
  return w == "." || w == "?" || w == "!" || w == "," || w == ";" || w == ":" ||
         w == "„" || w == "‡";
}

enum class LexKind { kGroupOpen, kGroupClose, kCode, kWord };

struct Lexeme {
  LexKind kind;
  std::string text;
};

std::vector<Lexeme> Lex(std::string_view s, std::size_t line) {
  std::vector<Lexeme> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (IsSpace(c)) {
      ++i;
    } else if (c == '<') {
      out.push_back({LexKind::kGroupOpen, "<"});
      ++i;
    } else if (c == '>') {
      out.push_back({LexKind::kGroupClose, ">"});
      ++i;
    } else if (c == '[') {
      const auto close = s.find(']', i);
      if (close == std::string_view::npos) throw ParseError(line, "unterminated '[' code");
      out.push_back({LexKind::kCode, std::string(Trim(s.substr(i + 1, close - i - 1)))});
      i = close + 1;
    } else {
      std::size_t j = i;
      while (j < s.size() && !IsSpace(s[j]) && s[j] != '[' && s[j] != '>') ++j;
      out.push_back({LexKind::kWord, std::string(s.substr(i, j - i))});
      i = j;
    }
  }
  return out;
}

struct TierLine {
  std::size_t line = 0;
  std::string code;
  std::string content;
};

struct TierResult {
  Tokens tokens;
  std::vector<DisfluencyEvent> events;
  std::optional<double> duration_s;
};

// Extracts a "\x15start_end\x15" media bullet (milliseconds) if present.
std::optional<double> TakeMediaBullet(std::string &content) {
  const auto open = content.find('\x15');
  if (open == std::string::npos) return std::nullopt;
  const auto close = content.find('\x15', open + 1);
  if (close == std::string::npos) return std::nullopt;
  const std::string bullet = content.substr(open + 1, close - open - 1);
  content.erase(open, close - open + 1);
  const auto sep = bullet.find('_');
  if (sep == std::string::npos) return std::nullopt;
  try {
    const double start = std::stod(bullet.substr(0, sep));
    const double end = std::stod(bullet.substr(sep + 1));
    if (end >= start) return (end - start) / 1000.0;
  } catch (const std::exception &) {
  }
  return std::nullopt;
}

void SortEvents(std::vector<DisfluencyEvent> &events) {
  std::stable_sort(events.begin(), events.end(), [](const auto &a, const auto &b) {
    if (a.span.begin != b.span.begin) return a.span.begin < b.span.begin;
    if (a.span.end != b.span.end) return a.span.end > b.span.end;
    return a.kind < b.kind;
  });
}

std::optional<std::string> FindPartialOverlap(const std::vector<DisfluencyEvent> &events) {
  for (std::size_t a = 0; a < events.size(); ++a) {
    for (std::size_t b = a + 1; b < events.size(); ++b) {
      const auto &x = events[a].span;
      const auto &y = events[b].span;
      if (x.size() == 0 || y.size() == 0) continue;
      if (x.Disjoint(y) || x.Contains(y) || y.Contains(x)) continue;
      return fmt::format("events {} [{},{}) and {} [{},{}) partially overlap", a, x.begin,
                         x.end, b, y.begin, y.end);
    }
  }
  return std::nullopt;
}

TierResult ParseTier(const TierLine &tier, std::vector<std::string> &warnings) {
  TierResult r;
  std::string content = tier.content;
  r.duration_s = TakeMediaBullet(content);

  const auto warn = [&](const std::string &msg) {
    warnings.push_back(fmt::format("line {}: {}", tier.line, msg));
  };

  std::vector<std::size_t> group_starts;
  std::optional<TokenSpan> last_scope;
  // Most recent repetition event; an adjacent identical "[/]" extends it.
  std::optional<std::size_t> open_repetition;

  const auto push_token = [&](std::string tok) {
    r.tokens.push_back(std::move(tok));
    const std::size_t i = r.tokens.size() - 1;
    last_scope = TokenSpan{i, i + 1};
    return i;
  };

  for (const auto &lx : Lex(content, tier.line)) {
    switch (lx.kind) {
      case LexKind::kGroupOpen:
        group_starts.push_back(r.tokens.size());
        last_scope.reset();
        break;
      case LexKind::kGroupClose:
        if (group_starts.empty()) throw ParseError(tier.line, "unbalanced '>'");
        last_scope = TokenSpan{group_starts.back(), r.tokens.size()};
        group_starts.pop_back();
        break;
      case LexKind::kCode: {
        const std::string &code = lx.text;
        if (code == "/" || code == "//") {
          if (!last_scope || last_scope->size() == 0) {
            throw ParseError(tier.line, "[" + code + "] without preceding material");
          }
          const TokenSpan scope = *last_scope;
          if (code == "//") {
            r.events.push_back({DisfluencyKind::Of(DisfluencyTag::kRetracing), scope, 0});
            open_repetition.reset();
            break;
          }
          if (open_repetition) {
            auto &prev = r.events[*open_repetition];
            const std::size_t n = scope.size();
            const bool adjacent = prev.span.end == scope.begin && prev.span.size() >= n;
            if (adjacent &&
                std::equal(r.tokens.begin() + static_cast<std::ptrdiff_t>(prev.span.end - n),
                           r.tokens.begin() + static_cast<std::ptrdiff_t>(prev.span.end),
                           r.tokens.begin() + static_cast<std::ptrdiff_t>(scope.begin))) {
              prev.span.end = scope.end;
              ++prev.repeat_count;
              break;
            }
          }
          const auto tag = scope.size() == 1 ? DisfluencyTag::kWordRepetition
                                             : DisfluencyTag::kPhraseRepetition;
          r.events.push_back({DisfluencyKind::Of(tag), scope, 1});
          open_repetition = r.events.size() - 1;
        } else {
          const TokenSpan scope =
              last_scope ? *last_scope : TokenSpan{r.tokens.size(), r.tokens.size()};
          r.events.push_back({DisfluencyKind::Other("[" + code + "]"), scope, 0});
          warn("unsupported code [" + code + "]");
        }
        break;
      }
      case LexKind::kWord: {
        const std::string_view w = lx.text;
        if (w.empty() || w.front() == '+' || IsSkippedPunct(w)) {
          last_scope.reset();
          break;
        }
        if (IsPauseMark(w)) {
          const auto i = push_token(std::string(w));
          r.events.push_back({DisfluencyKind::Of(DisfluencyTag::kPause), {i, i + 1}, 0});
          break;
        }
        if (w.front() == '&' && w.size() >= 2) {
          const std::string prefix(w.substr(0, 2));
          std::string word = CleanWord(w.substr(2));
          if (word.empty()) {
            warn("empty '" + prefix + "' item dropped");
            last_scope.reset();
            break;
          }
          const auto i = push_token(std::move(word));
          if (prefix == "&-") {
            r.events.push_back({DisfluencyKind::Of(DisfluencyTag::kInterjection), {i, i + 1}, 0});
          } else if (prefix == "&+") {
            r.events.push_back({DisfluencyKind::Of(DisfluencyTag::kFragment), {i, i + 1}, 0});
          } else {
            r.events.push_back({DisfluencyKind::Other(prefix), {i, i + 1}, 0});
            warn("unsupported prefix code '" + prefix + "' on '" + r.tokens[i] + "'");
          }
          break;
        }
        if (w.size() > 1 && w.front() == '0' &&
            std::isalpha(static_cast<unsigned char>(w[1]))) {
          // Omitted word: annotated but not spoken.
          last_scope.reset();
          break;
        }
        if (w == "0") {
          last_scope.reset();
          break;
        }
        std::string word = CleanWord(w);
        if (word.empty()) {
          last_scope.reset();
          break;
        }
        const bool unintelligible = word == "xxx" || word == "yyy" || word == "www";
        const auto i = push_token(std::move(word));
        if (unintelligible) {
          r.events.push_back({DisfluencyKind::Other(r.tokens[i]), {i, i + 1}, 0});
          warn("unintelligible marker '" + r.tokens[i] + "' kept as token");
        }
        break;
      }
    }
  }

  if (!group_starts.empty()) throw ParseError(tier.line, "unbalanced '<'");
  if (r.tokens.empty()) throw ParseError(tier.line, "empty utterance");
  SortEvents(r.events);
  if (auto msg = FindPartialOverlap(r.events)) throw ParseError(tier.line, *msg);
  return r;
}

std::optional<int> ParseAge(std::string_view field) {
  field = Trim(field);
  int years = 0;
  std::size_t i = 0;
  while (i < field.size() && std::isdigit(static_cast<unsigned char>(field[i]))) {
    years = years * 10 + (field[i] - '0');
    ++i;
  }
  if (i == 0) return std::nullopt;
  return years;
}

std::vector<std::string> SplitBar(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto bar = s.find('|', start);
    out.emplace_back(Trim(s.substr(start, bar == std::string_view::npos ? bar : bar - start)));
    if (bar == std::string_view::npos) break;
    start = bar + 1;
  }
  return out;
}

std::string Lower(std::string s) {
  for (auto &c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string SpeakerIdFor(const SourceMeta &meta, const std::string &code) {
  if (auto it = meta.speaker_alias.find(code); it != meta.speaker_alias.end()) return it->second;
  return meta.video_id + "_" + code;
}

json EventToJson(const DisfluencyEvent &e) {
  json j;
  j["kind"] = KindName(e.kind.tag);
  if (e.kind.tag == DisfluencyTag::kOther) j["code"] = e.kind.code;
  j["token_span"] = json::array({e.span.begin, e.span.end});
  j["repeat_count"] = e.repeat_count;
  return j;
}

DisfluencyEvent EventFromJson(const json &j) {
  DisfluencyEvent e;
  e.kind.tag = KindFromName(j.at("kind").get<std::string>());
  if (e.kind.tag == DisfluencyTag::kOther) e.kind.code = j.value("code", std::string());
  const auto &span = j.at("token_span");
  if (!span.is_array() || span.size() != 2) {
    throw Error(ErrorKind::kFormat, "token_span must be a [begin, end] pair");
  }
  e.span = {span[0].get<std::size_t>(), span[1].get<std::size_t>()};
  e.repeat_count = j.at("repeat_count").get<int>();
  return e;
}

}  // namespace

std::string_view KindName(DisfluencyTag tag) {
  switch (tag) {
    case DisfluencyTag::kWordRepetition: return "word_repetition";
    case DisfluencyTag::kPhraseRepetition: return "phrase_repetition";
    case DisfluencyTag::kInterjection: return "interjection";
    case DisfluencyTag::kRetracing: return "retracing";
    case DisfluencyTag::kFragment: return "fragment";
    case DisfluencyTag::kPause: return "pause";
    case DisfluencyTag::kOther: return "other";
  }
  return "other";
}

DisfluencyTag KindFromName(std::string_view name) {
  for (auto tag : kAllTags) {
    if (KindName(tag) == name) return tag;
  }
  throw Error(ErrorKind::kFormat, "unknown disfluency kind '" + std::string(name) + "'");
}

std::string_view SettingName(Setting s) {
  switch (s) {
    case Setting::kReading: return "reading";
    case Setting::kInterview: return "interview";
    case Setting::kSynthetic: return "synthetic";
  }
  return "interview";
}

Setting SettingFromName(std::string_view name) {
  const std::string lower = Lower(std::string(name));
  if (lower == "reading") return Setting::kReading;
  if (lower == "interview") return Setting::kInterview;
  if (lower == "synthetic") return Setting::kSynthetic;
  throw Error(ErrorKind::kFormat, "unknown setting '" + std::string(name) + "'");
}

std::string JoinTokens(const Tokens &tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.push_back(' ');
    out += tokens[i];
  }
  return out;
}

ParsedDocument ParseChat(std::string_view document, const SourceMeta &meta) {
  if (Trim(document).empty()) throw ParseError(1, "empty document");

  std::vector<TierLine> tiers;
  std::vector<std::array<std::string, 3>> id_rows;  // code, age, sex
  ParsedDocument out;

  enum class Cont { kNone, kSpeaker, kSkip } cont = Cont::kNone;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= document.size()) {
    auto nl = document.find('\n', pos);
    if (nl == std::string_view::npos) nl = document.size();
    std::string_view line = document.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (StartsWith(line, "\xEF\xBB\xBF")) line.remove_prefix(3);
    if (Trim(line).empty()) {
      if (nl == document.size()) break;
      continue;
    }

    const char head = line.front();
    if (head == '\t' || head == ' ') {
      if (cont == Cont::kNone) throw ParseError(line_no, "continuation line without a tier");
      if (cont == Cont::kSpeaker) {
        tiers.back().content += ' ';
        tiers.back().content += Trim(line);
      }
    } else if (head == '@') {
      cont = Cont::kSkip;
      if (StartsWith(line, "@ID:")) {
        auto fields = SplitBar(Trim(line.substr(4)));
        if (fields.size() >= 5) id_rows.push_back({fields[2], fields[3], fields[4]});
      }
    } else if (head == '*' || head == '%') {
      const auto colon = line.find(':');
      if (colon == std::string_view::npos) {
        throw ParseError(line_no, "malformed tier: missing ':' separator");
      }
      if (head == '%') {
        cont = Cont::kSkip;
        continue;
      }
      std::string code(Trim(line.substr(1, colon - 1)));
      if (code.empty()) throw ParseError(line_no, "malformed tier: empty speaker code");
      if (!meta.include_codes.empty() && !meta.include_codes.count(code)) {
        cont = Cont::kSkip;
        continue;
      }
      tiers.push_back({line_no, std::move(code), std::string(Trim(line.substr(colon + 1)))});
      cont = Cont::kSpeaker;
    } else {
      throw ParseError(line_no, "malformed tier: line does not start with '*', '%' or '@'");
    }
    if (nl == document.size()) break;
  }

  if (tiers.empty()) throw ParseError(line_no, "document contains no speaker tiers");

  for (const auto &[code, age, sex] : id_rows) {
    if (!meta.include_codes.empty() && !meta.include_codes.count(code)) continue;
    SpeakerInfo info;
    info.age = ParseAge(age);
    info.gender = Lower(sex);
    out.corpus.speakers[SpeakerIdFor(meta, code)] = info;
  }

  std::size_t index = 0;
  for (const auto &tier : tiers) {
    TierResult tr = ParseTier(tier, out.warnings);
    Utterance u;
    u.id = fmt::format("{}_{:04d}", meta.video_id, index++);
    u.speaker_id = SpeakerIdFor(meta, tier.code);
    u.video_id = meta.video_id;
    u.setting = meta.setting;
    u.verbatim_tokens = std::move(tr.tokens);
    u.events = std::move(tr.events);
    u.duration_s = tr.duration_s;
    if (!out.corpus.speakers.empty() && !out.corpus.speakers.count(u.speaker_id)) {
      out.warnings.push_back(fmt::format("line {}: speaker '{}' has no @ID row", tier.line,
                                         u.speaker_id));
      out.corpus.speakers[u.speaker_id] = SpeakerInfo{};
    }
    out.corpus.utterances.push_back(std::move(u));
  }
  return out;
}

Tokens DeriveFluentText(const Utterance &u) {
  std::vector<bool> drop(u.verbatim_tokens.size(), false);
  for (const auto &e : u.events) {
    if (e.kind.tag == DisfluencyTag::kOther) continue;
    for (std::size_t i = e.span.begin; i < e.span.end && i < drop.size(); ++i) drop[i] = true;
  }
  Tokens out;
  for (std::size_t i = 0; i < u.verbatim_tokens.size(); ++i) {
    if (!drop[i]) out.push_back(u.verbatim_tokens[i]);
  }
  if (out.empty()) {
    throw Error(ErrorKind::kFluentEmpty, "utterance '" + u.id + "' has no fluent material");
  }
  return out;
}

std::set<DisfluencyKind> ClassifyDisfluencies(const Utterance &u) {
  std::set<DisfluencyKind> kinds;
  for (const auto &e : u.events) kinds.insert(e.kind);
  return kinds;
}

CorpusStats ComputeCorpusStats(const Corpus &c) {
  if (c.utterances.empty()) throw Error(ErrorKind::kEmptyCorpus, "corpus has no utterances");
  CorpusStats s;
  s.n_utterances = c.utterances.size();
  std::size_t with_rep = 0, with_interj = 0;
  for (const auto &u : c.utterances) {
    if (u.duration_s) s.total_duration_s += *u.duration_s;
    ++s.per_speaker_counts[u.speaker_id];
    bool rep = false, interj = false;
    for (const auto &k : ClassifyDisfluencies(u)) {
      rep = rep || k.IsRepetition();
      interj = interj || k.tag == DisfluencyTag::kInterjection;
    }
    with_rep += rep;
    with_interj += interj;
  }
  const auto pct = [&](std::size_t count) {
    return std::round(1000.0 * static_cast<double>(count) / static_cast<double>(s.n_utterances)) /
           10.0;
  };
  s.pct_with_repetition = pct(with_rep);
  s.pct_with_interjection = pct(with_interj);
  return s;
}

void ValidateUtterance(const Utterance &u) {
  const auto fail = [&](const std::string &msg) {
    throw Error(ErrorKind::kFormat, "utterance '" + u.id + "': " + msg);
  };
  if (u.id.empty()) fail("empty id");
  if (u.verbatim_tokens.empty()) fail("verbatim_tokens is empty");
  for (const auto &t : u.verbatim_tokens) {
    if (t.empty()) fail("empty token");
  }
  const std::size_t n = u.verbatim_tokens.size();
  for (std::size_t i = 0; i < u.events.size(); ++i) {
    const auto &e = u.events[i];
    if (e.span.begin > e.span.end || e.span.end > n) {
      fail(fmt::format("event {} span [{},{}) outside {} tokens", i, e.span.begin, e.span.end, n));
    }
    if (e.repeat_count < 0) fail(fmt::format("event {} has negative repeat_count", i));
    if (e.kind.IsRepetition() && e.repeat_count < 1) {
      fail(fmt::format("repetition event {} needs repeat_count >= 1", i));
    }
    if (i > 0 && u.events[i - 1].span.begin > e.span.begin) fail("events not sorted by start");
  }
  if (auto msg = FindPartialOverlap(u.events)) fail(*msg);
}

void ValidateCorpus(const Corpus &c) {
  std::set<std::string_view> ids;
  for (const auto &u : c.utterances) {
    ValidateUtterance(u);
    if (!ids.insert(u.id).second) {
      throw Error(ErrorKind::kDuplicateKey, "duplicate utterance id '" + u.id + "'");
    }
    if (!c.speakers.empty() && !c.speakers.count(u.speaker_id)) {
      throw Error(ErrorKind::kFormat,
                  "speaker '" + u.speaker_id + "' missing from speaker metadata");
    }
  }
}

void MergeCorpus(Corpus &into, Corpus other) {
  std::set<std::string> ids;
  for (const auto &u : into.utterances) ids.insert(u.id);
  for (auto &u : other.utterances) {
    if (!ids.insert(u.id).second) {
      throw Error(ErrorKind::kDuplicateKey, "duplicate utterance id '" + u.id + "'");
    }
    into.utterances.push_back(std::move(u));
  }
  for (auto &[id, info] : other.speakers) {
    auto [it, inserted] = into.speakers.emplace(id, info);
    if (inserted) continue;
    if (!it->second.age) it->second.age = info.age;
    if (it->second.gender.empty()) it->second.gender = info.gender;
  }
}

std::string UtteranceToJsonLine(const Utterance &u) {
  json j;
  j["id"] = u.id;
  j["speaker_id"] = u.speaker_id;
  j["video_id"] = u.video_id;
  j["setting"] = SettingName(u.setting);
  j["verbatim_tokens"] = u.verbatim_tokens;
  j["events"] = json::array();
  for (const auto &e : u.events) j["events"].push_back(EventToJson(e));
  j["duration_s"] = u.duration_s ? json(*u.duration_s) : json(nullptr);
  return j.dump();
}

Utterance UtteranceFromJsonLine(std::string_view line) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error &e) {
    throw Error(ErrorKind::kFormat, std::string("invalid JSON: ") + e.what());
  }
  Utterance u;
  try {
    u.id = j.at("id").get<std::string>();
    u.speaker_id = j.at("speaker_id").get<std::string>();
    u.video_id = j.at("video_id").get<std::string>();
    u.setting = SettingFromName(j.at("setting").get<std::string>());
    u.verbatim_tokens = j.at("verbatim_tokens").get<Tokens>();
    for (const auto &e : j.at("events")) u.events.push_back(EventFromJson(e));
    if (j.contains("duration_s") && !j["duration_s"].is_null()) {
      u.duration_s = j["duration_s"].get<double>();
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("bad utterance record: ") + e.what());
  }
  ValidateUtterance(u);
  return u;
}

std::filesystem::path SpeakersSidecarPath(const std::filesystem::path &corpus_path) {
  auto p = corpus_path;
  p += ".speakers.json";
  return p;
}

void SaveCorpus(const Corpus &c, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto &u : c.utterances) out << UtteranceToJsonLine(u) << '\n';
  const auto sidecar = SpeakersSidecarPath(path);
  if (c.speakers.empty()) {
    std::error_code ec;
    std::filesystem::remove(sidecar, ec);
    return;
  }
  json speakers = json::object();
  for (const auto &[id, info] : c.speakers) {
    json s;
    s["age"] = info.age ? json(*info.age) : json(nullptr);
    s["gender"] = info.gender;
    speakers[id] = s;
  }
  std::ofstream side(sidecar, std::ios::binary);
  if (!side) throw Error(ErrorKind::kIo, "cannot write " + sidecar.string());
  side << speakers.dump(2) << '\n';
}

std::map<std::string, SpeakerInfo> LoadSpeakerMetadata(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::map<std::string, SpeakerInfo> out;
  try {
    const auto j = json::parse(in);
    for (const auto &[id, s] : j.items()) {
      SpeakerInfo info;
      if (s.contains("age") && !s["age"].is_null()) info.age = s["age"].get<int>();
      info.gender = s.value("gender", std::string());
      out[id] = info;
    }
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kFormat, path.string() + ": " + e.what());
  }
  return out;
}

Corpus LoadCorpus(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  Corpus c;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (Trim(line).empty()) continue;
    try {
      c.utterances.push_back(UtteranceFromJsonLine(line));
    } catch (const Error &e) {
      throw ParseError(line_no, path.string() + ": " + e.what());
    }
  }
  const auto sidecar = SpeakersSidecarPath(path);
  if (std::filesystem::exists(sidecar)) c.speakers = LoadSpeakerMetadata(sidecar);
  ValidateCorpus(c);
  return c;
}

}  // namespace stutterkit
