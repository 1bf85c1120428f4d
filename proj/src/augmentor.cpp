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

#include "stutterkit/augmentor.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <exception>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "stutterkit/error.hpp"
#include "stutterkit/rng.hpp"

namespace stutterkit {

namespace {

using json = nlohmann::ordered_json;

constexpr DisfluencyTag kAugmentableTags[3] = {
    DisfluencyTag::kWordRepetition,
    DisfluencyTag::kPhraseRepetition,
    DisfluencyTag::kInterjection,
};

IntRange Clip(IntRange r, int n) { return {std::min(r.lo, n), std::min(r.hi, n)}; }

int Draw(Rng &rng, IntRange r) { return static_cast<int>(rng.UniformInt(r.lo, r.hi)); }

// k distinct values from [0, n), ascending. Partial Fisher-Yates.
std::vector<std::size_t> ChooseDistinct(Rng &rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + rng.UniformIndex(n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

void CheckRange(const IntRange &r, const char *what) {
  if (r.lo < 1 || r.lo > r.hi) {
    throw Error(ErrorKind::kInvalidArgument,
                fmt::format("profile range {} = [{}, {}] must satisfy 1 <= lo <= hi", what, r.lo,
                            r.hi));
  }
}

Tokens SplitSpaces(const std::string &text) {
  Tokens out;
  std::istringstream ss(text);
  std::string tok;
  while (ss >> tok) out.push_back(tok);
  return out;
}

struct PoolEntry {
  const Utterance *utterance;
  Tokens fluent;
};

std::vector<PoolEntry> EligiblePool(const Corpus &c) {
  std::vector<PoolEntry> pool;
  for (const auto &u : c.utterances) {
    try {
      pool.push_back({&u, DeriveFluentText(u)});
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::kFluentEmpty) throw;
    }
  }
  return pool;
}

AugmentedUtterance BuildSample(const std::vector<PoolEntry> &pool, const AugmentRequest &req,
                               std::uint64_t augment_seed, std::size_t i) {
  const std::uint64_t sample_seed = DeriveSeed(augment_seed, static_cast<std::uint64_t>(i));
  Rng rng(sample_seed);
  const PoolEntry &src = pool[rng.UniformIndex(pool.size())];
  const DisfluencyTag type = kAugmentableTags[rng.Categorical(req.type_weights)];
  AugmentationPlan plan = SamplePlan(src.fluent, req.profile, type, rng);
  plan.source_utterance_id = src.utterance->id;
  plan.seed = sample_seed;
  AugmentedUtterance out = ApplyPlan(src.fluent, plan);
  out.id = req.id_prefix + fmt::format("aug_{:06d}", i);
  return out;
}

void CheckRequest(const AugmentRequest &req) {
  ValidateProfile(req.profile);
  double total = 0.0;
  for (double w : req.type_weights) {
    if (!(w >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "type weights must be >= 0");
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorKind::kInvalidArgument, "type weights sum to zero");
}

}  // namespace

AugmentationProfile AugmentationProfile::Standard() {
  AugmentationProfile p;
  p.name = "standard";
  p.word_rep = {{1, 3}, {1, 4}};
  p.phrase_rep = {{2, 4}, {1, 3}};
  p.interjection = {{1, 4}, {1, 4}, {"uh", "um"}};
  return p;
}

AugmentationProfile AugmentationProfile::Extended() {
  AugmentationProfile p = Standard();
  p.name = "extended";
  p.word_rep.n_repeats = {1, 6};
  p.phrase_rep.n_repeats = {1, 5};
  p.interjection.n_repeats = {1, 7};
  return p;
}

AugmentationProfile AugmentationProfile::ByName(const std::string &name) {
  if (name == "standard") return Standard();
  if (name == "extended") return Extended();
  throw Error(ErrorKind::kInvalidArgument,
              "unknown augmentation profile '" + name + "' (expected standard|extended)");
}

void ValidateProfile(const AugmentationProfile &p) {
  CheckRange(p.word_rep.n_words, "word_rep.n_words");
  CheckRange(p.word_rep.n_repeats, "word_rep.n_repeats");
  CheckRange(p.phrase_rep.phrase_len, "phrase_rep.phrase_len");
  CheckRange(p.phrase_rep.n_repeats, "phrase_rep.n_repeats");
  CheckRange(p.interjection.n_sites, "interjection.n_sites");
  CheckRange(p.interjection.n_repeats, "interjection.n_repeats");
  if (p.interjection.lexicon.empty()) {
    throw Error(ErrorKind::kInvalidArgument, "interjection lexicon is empty");
  }
  for (const auto &tok : p.interjection.lexicon) {
    if (tok.empty() || tok.find(' ') != std::string::npos) {
      throw Error(ErrorKind::kInvalidArgument, "lexicon entries must be single tokens");
    }
  }
}

ClippedRanges ClipRanges(const AugmentationProfile &p, std::size_t n_tokens) {
  const int n = static_cast<int>(std::min<std::size_t>(n_tokens, 1 << 20));
  ClippedRanges c;
  c.word_n_words = Clip(p.word_rep.n_words, n);
  c.word_n_repeats = p.word_rep.n_repeats;
  c.phrase_len = Clip(p.phrase_rep.phrase_len, n);
  c.phrase_n_repeats = p.phrase_rep.n_repeats;
  c.interj_n_sites = Clip(p.interjection.n_sites, n);
  c.interj_n_repeats = p.interjection.n_repeats;
  c.phrase_fits = p.phrase_rep.phrase_len.lo <= n;
  return c;
}

bool IsAugmentable(DisfluencyTag tag) {
  return std::find(std::begin(kAugmentableTags), std::end(kAugmentableTags), tag) !=
         std::end(kAugmentableTags);
}

// Draw order is part of the output contract (plans must be reproducible from
// the seed): count, positions, then per-selection token and repeat count.
AugmentationPlan SamplePlan(const Tokens &fluent, const AugmentationProfile &profile,
                            DisfluencyTag event_type, Rng &rng) {
  if (fluent.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot augment empty text");
  if (!IsAugmentable(event_type)) {
    throw Error(ErrorKind::kInvalidArgument,
                "event type '" + std::string(KindName(event_type)) + "' is not augmentable");
  }
  ValidateProfile(profile);
  const std::size_t m = fluent.size();
  const ClippedRanges r = ClipRanges(profile, m);

  AugmentationPlan plan;
  plan.requested_type = event_type;
  plan.event_type = event_type;

  switch (event_type) {
    case DisfluencyTag::kWordRepetition: {
      const auto k = static_cast<std::size_t>(Draw(rng, r.word_n_words));
      for (std::size_t pos : ChooseDistinct(rng, m, k)) {
        plan.selections.push_back({pos, 1, {}, Draw(rng, r.word_n_repeats)});
      }
      break;
    }
    case DisfluencyTag::kPhraseRepetition: {
      if (!r.phrase_fits) {
        plan.degraded = true;
        plan.event_type = DisfluencyTag::kWordRepetition;
        const std::size_t pos = rng.UniformIndex(m);
        plan.selections.push_back({pos, 1, {}, Draw(rng, r.phrase_n_repeats)});
        break;
      }
      const auto len = static_cast<std::size_t>(Draw(rng, r.phrase_len));
      const std::size_t start = rng.UniformIndex(m - len + 1);
      plan.selections.push_back({start, len, {}, Draw(rng, r.phrase_n_repeats)});
      break;
    }
    case DisfluencyTag::kInterjection: {
      const auto k = static_cast<std::size_t>(Draw(rng, r.interj_n_sites));
      const auto &lexicon = profile.interjection.lexicon;
      for (std::size_t slot : ChooseDistinct(rng, m + 1, k)) {
        std::string tok = lexicon[rng.UniformIndex(lexicon.size())];
        plan.selections.push_back({slot, 1, std::move(tok), Draw(rng, r.interj_n_repeats)});
      }
      break;
    }
    default:
      break;
  }
  return plan;
}

AugmentedUtterance ApplyPlan(const Tokens &fluent, const AugmentationPlan &plan) {
  const std::size_t m = fluent.size();
  const auto mismatch = [&](const std::string &msg) {
    throw Error(ErrorKind::kPlanMismatch,
                "plan for '" + plan.source_utterance_id + "' does not fit text: " + msg);
  };
  if (!IsAugmentable(plan.event_type)) mismatch("event type is not augmentable");

  std::vector<const Selection *> at(m + 1, nullptr);
  for (const auto &sel : plan.selections) {
    if (sel.repeat_count < 1) mismatch("repeat_count must be >= 1");
    const bool is_slot = plan.event_type == DisfluencyTag::kInterjection;
    const std::size_t limit = is_slot ? m : m - 1;
    if (sel.position > limit || (m == 0 && !is_slot)) {
      mismatch(fmt::format("position {} out of bounds for {} tokens", sel.position, m));
    }
    if (plan.event_type == DisfluencyTag::kPhraseRepetition) {
      if (sel.length < 1 || sel.position + sel.length > m) {
        mismatch(fmt::format("phrase [{}, {}) exceeds {} tokens", sel.position,
                             sel.position + sel.length, m));
      }
    } else if (sel.length != 1) {
      mismatch("selection length must be 1");
    }
    if (is_slot && sel.token.empty()) mismatch("interjection token is empty");
    if (at[sel.position]) mismatch(fmt::format("position {} selected twice", sel.position));
    at[sel.position] = &sel;
  }
  if (plan.event_type == DisfluencyTag::kPhraseRepetition && plan.selections.size() > 1) {
    mismatch("phrase repetition takes a single phrase");
  }

  AugmentedUtterance out;
  out.plan = plan;
  out.fluent_tokens = fluent;
  Tokens &v = out.verbatim_tokens;

  const auto add_event = [&](DisfluencyTag tag, std::size_t begin, int repeat_count) {
    out.events.push_back({DisfluencyKind::Of(tag), {begin, v.size()}, repeat_count});
  };

  std::size_t i = 0;
  while (i <= m) {
    const Selection *sel = at[i];
    if (sel && plan.event_type == DisfluencyTag::kInterjection) {
      const std::size_t begin = v.size();
      for (int r = 0; r < sel->repeat_count; ++r) v.push_back(sel->token);
      add_event(DisfluencyTag::kInterjection, begin, sel->repeat_count - 1);
    }
    if (i == m) break;
    if (sel && plan.event_type != DisfluencyTag::kInterjection) {
      const std::size_t begin = v.size();
      for (int r = 0; r < sel->repeat_count; ++r) {
        v.insert(v.end(), fluent.begin() + static_cast<std::ptrdiff_t>(i),
                 fluent.begin() + static_cast<std::ptrdiff_t>(i + sel->length));
      }
      add_event(plan.event_type, begin, sel->repeat_count);
      v.insert(v.end(), fluent.begin() + static_cast<std::ptrdiff_t>(i),
               fluent.begin() + static_cast<std::ptrdiff_t>(i + sel->length));
      i += sel->length;
      continue;
    }
    v.push_back(fluent[i]);
    ++i;
  }
  return out;
}

std::vector<AugmentedUtterance> AugmentCorpusSerial(const Corpus &c, const AugmentRequest &req) {
  CheckRequest(req);
  if (req.n == 0) return {};
  const auto pool = EligiblePool(c);
  if (pool.empty()) throw Error(ErrorKind::kEmptyPool, "no utterance has fluent text to augment");
  const std::uint64_t augment_seed = DeriveSeed(req.seed, "augment");
  std::vector<AugmentedUtterance> out;
  out.reserve(req.n);
  for (std::size_t i = 0; i < req.n; ++i) out.push_back(BuildSample(pool, req, augment_seed, i));
  return out;
}

std::vector<AugmentedUtterance> AugmentCorpus(const Corpus &c, const AugmentRequest &req) {
  CheckRequest(req);
  if (req.n == 0) return {};
  const auto pool = EligiblePool(c);
  if (pool.empty()) throw Error(ErrorKind::kEmptyPool, "no utterance has fluent text to augment");
  const std::uint64_t augment_seed = DeriveSeed(req.seed, "augment");
  std::vector<AugmentedUtterance> out(req.n);
  std::exception_ptr failure;
  const auto n = static_cast<long long>(req.n);
#pragma omp parallel for schedule(dynamic, 64)
  for (long long i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] =
          BuildSample(pool, req, augment_seed, static_cast<std::size_t>(i));
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

long long ComputeP(long long n, long long corpus_size) {
  if (corpus_size <= 0) throw Error(ErrorKind::kInvalidArgument, "corpus_size must be > 0");
  if (n < 0) throw Error(ErrorKind::kInvalidArgument, "n must be >= 0");
  return (200 * n + corpus_size) / (2 * corpus_size);
}

std::string AugmentedToJsonLine(const AugmentedUtterance &a) {
  json j;
  j["id"] = a.id;
  j["source_utterance_id"] = a.plan.source_utterance_id;
  j["event_type"] = KindName(a.plan.event_type);
  j["seed"] = a.plan.seed;
  j["verbatim_text"] = JoinTokens(a.verbatim_tokens);
  j["fluent_text"] = JoinTokens(a.fluent_tokens);
  j["events"] = json::array();
  for (const auto &e : a.events) {
    j["events"].push_back({{"kind", KindName(e.kind.tag)},
                           {"token_span", {e.span.begin, e.span.end}},
                           {"repeat_count", e.repeat_count}});
  }
  json plan;
  plan["requested_type"] = KindName(a.plan.requested_type);
  plan["degraded"] = a.plan.degraded;
  plan["selections"] = json::array();
  for (const auto &s : a.plan.selections) {
    json sel = {{"position", s.position}, {"length", s.length}};
    if (!s.token.empty()) sel["token"] = s.token;
    sel["repeat_count"] = s.repeat_count;
    plan["selections"].push_back(std::move(sel));
  }
  j["plan"] = std::move(plan);
  return j.dump();
}

AugmentedUtterance AugmentedFromJsonLine(std::string_view line) {
  AugmentedUtterance a;
  try {
    const auto j = json::parse(line);
    a.id = j.at("id").get<std::string>();
    a.plan.source_utterance_id = j.at("source_utterance_id").get<std::string>();
    a.plan.event_type = KindFromName(j.at("event_type").get<std::string>());
    a.plan.requested_type = a.plan.event_type;
    a.plan.seed = j.at("seed").get<std::uint64_t>();
    a.verbatim_tokens = SplitSpaces(j.at("verbatim_text").get<std::string>());
    a.fluent_tokens = SplitSpaces(j.at("fluent_text").get<std::string>());
    for (const auto &e : j.at("events")) {
      DisfluencyEvent ev;
      ev.kind = DisfluencyKind::Of(KindFromName(e.at("kind").get<std::string>()));
      ev.span = {e.at("token_span").at(0).get<std::size_t>(),
                 e.at("token_span").at(1).get<std::size_t>()};
      ev.repeat_count = e.at("repeat_count").get<int>();
      if (ev.span.begin > ev.span.end || ev.span.end > a.verbatim_tokens.size()) {
        throw Error(ErrorKind::kFormat, "event span out of bounds in '" + a.id + "'");
      }
      a.events.push_back(ev);
    }
    if (j.contains("plan")) {
      const auto &p = j.at("plan");
      a.plan.requested_type = KindFromName(p.at("requested_type").get<std::string>());
      a.plan.degraded = p.at("degraded").get<bool>();
      for (const auto &s : p.at("selections")) {
        a.plan.selections.push_back({s.at("position").get<std::size_t>(),
                                     s.at("length").get<std::size_t>(), s.value("token", ""),
                                     s.at("repeat_count").get<int>()});
      }
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("bad augmentation record: ") + e.what());
  }
  if (a.id.empty() || a.verbatim_tokens.empty()) {
    throw Error(ErrorKind::kFormat, "augmentation record needs id and verbatim_text");
  }
  return a;
}

void SaveAugmented(const std::vector<AugmentedUtterance> &items,
                   const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto &a : items) out << AugmentedToJsonLine(a) << '\n';
}

std::vector<AugmentedUtterance> LoadAugmented(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::vector<AugmentedUtterance> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(AugmentedFromJsonLine(line));
    } catch (const Error &e) {
      throw ParseError(line_no, path.string() + ": " + e.what());
    }
  }
  return out;
}

}  // namespace stutterkit
