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

#include "stutterkit/synth_jobs.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <atomic>
#include <cstring>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <thread>

#include "stutterkit/endpoint.hpp"
#include "stutterkit/error.hpp"
#include "stutterkit/rng.hpp"

namespace stutterkit {

namespace {

using json = nlohmann::ordered_json;

constexpr const char *kWireFormat = "wav16k_mono_pcm16";

std::uint32_t ReadLe32(std::string_view b, std::size_t at) {
  return static_cast<std::uint32_t>(static_cast<unsigned char>(b[at])) |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 1])) << 8 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 2])) << 16 |
         static_cast<std::uint32_t>(static_cast<unsigned char>(b[at + 3])) << 24;
}

std::uint16_t ReadLe16(std::string_view b, std::size_t at) {
  return static_cast<std::uint16_t>(static_cast<unsigned char>(b[at]) |
                                    static_cast<unsigned char>(b[at + 1]) << 8);
}

void PutLe32(std::string &out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

void PutLe16(std::string &out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

std::size_t PickVoice(std::uint64_t voice_seed, const std::string &key, std::size_t pool_size) {
  Rng rng(DeriveSeed(voice_seed, key));
  return rng.UniformIndex(pool_size);
}

void CheckPool(std::span<const VoiceSpec> pool) {
  if (pool.empty()) throw Error(ErrorKind::kInvalidArgument, "voice pool is empty");
  for (const auto &v : pool) {
    if (v.voice_id.empty()) throw Error(ErrorKind::kInvalidArgument, "voice_id is empty");
  }
}

std::string ReadFile(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::filesystem::path MetaPath(const std::filesystem::path &manifest) {
  auto p = manifest;
  p += ".meta.json";
  return p;
}

struct Attempt {
  bool ok = false;
  bool retryable = false;
  std::string detail;
};

Attempt RunJob(httplib::Client &client, const Endpoint &ep, const TtsJob &job,
               const std::filesystem::path &out_path, std::size_t worker) {
  const json body = {{"text", job.text}, {"voice", job.voice.voice_id}, {"format", kWireFormat}};
  auto res = client.Post(ep.Path("/tts"), body.dump(), "application/json");
  if (!res) return {false, true, "connection: " + httplib::to_string(res.error())};
  if (res->status != 200) {
    std::string detail = fmt::format("http {}", res->status);
    try {
      const auto err = nlohmann::json::parse(res->body);
      detail += fmt::format(" {}: {}", err.value("code", std::string("?")),
                            err.value("message", std::string()));
    } catch (const nlohmann::json::exception &) {
    }
    return {false, res->status >= 500 || res->status == 429, detail};
  }
  const auto violations = ValidateAudioBytes(res->body, job.expected_audio);
  if (!violations.empty()) {
    std::string detail = "invalid audio:";
    for (const auto &v : violations) detail += " " + v;
    return {false, false, detail};
  }
  std::error_code ec;
  std::filesystem::create_directories(out_path.parent_path(), ec);
  auto tmp = out_path;
  tmp += fmt::format(".part{}", worker);
  {
    std::ofstream o(tmp, std::ios::binary | std::ios::trunc);
    if (!o) return {false, false, "cannot write " + tmp.string()};
    o.write(res->body.data(), static_cast<std::streamsize>(res->body.size()));
    if (!o) return {false, false, "short write to " + tmp.string()};
  }
  std::filesystem::rename(tmp, out_path, ec);
  if (ec) return {false, false, "rename failed: " + ec.message()};
  return {true, false, fmt::format("{} bytes", res->body.size())};
}

}  // namespace

std::string_view ProviderName(VoiceProvider p) {
  switch (p) {
    case VoiceProvider::kOpenAiStyle: return "openai";
    case VoiceProvider::kSpeakerVectorStyle: return "speaker_vector";
    case VoiceProvider::kMock: return "mock";
  }
  return "mock";
}

VoiceProvider ProviderFromName(std::string_view name) {
  if (name == "openai") return VoiceProvider::kOpenAiStyle;
  if (name == "speaker_vector") return VoiceProvider::kSpeakerVectorStyle;
  if (name == "mock") return VoiceProvider::kMock;
  throw Error(ErrorKind::kFormat, "unknown voice provider '" + std::string(name) + "'");
}

std::vector<VoiceSpec> DefaultSpeakerVectorPool() {
  std::vector<VoiceSpec> pool;
  for (int i = 0; i < 10; ++i) {
    pool.push_back({VoiceProvider::kSpeakerVectorStyle, fmt::format("speaker-{}", i),
                    "positional speaker vector"});
  }
  return pool;
}

TtsManifest BuildManifest(std::span<const AugmentedUtterance> augmented,
                          std::span<const VoiceSpec> voice_pool, std::uint64_t seed,
                          std::string created_from) {
  CheckPool(voice_pool);
  TtsManifest m;
  m.created_from = std::move(created_from);
  m.seed = seed;
  const std::uint64_t voice_seed = DeriveSeed(seed, "voice");
  for (const auto &a : augmented) {
    TtsJob job;
    job.job_id = a.id;
    job.text = JoinTokens(a.verbatim_tokens);
    job.voice = voice_pool[PickVoice(voice_seed, a.id, voice_pool.size())];
    job.output_path = "audio/" + a.id + ".wav";
    m.jobs.push_back(std::move(job));
  }
  ValidateManifest(m);
  return m;
}

FluentManifest BuildFluentManifest(const Corpus &c, std::span<const VoiceSpec> voice_pool,
                                   std::uint64_t seed, std::string created_from) {
  CheckPool(voice_pool);
  if (c.utterances.empty()) throw Error(ErrorKind::kEmptyCorpus, "corpus has no utterances");
  FluentManifest out;
  out.manifest.created_from = std::move(created_from);
  out.manifest.seed = seed;
  const std::uint64_t voice_seed = DeriveSeed(seed, "voice");
  for (const auto &u : c.utterances) {
    Tokens fluent;
    try {
      fluent = DeriveFluentText(u);
    } catch (const Error &e) {
      if (e.kind() != ErrorKind::kFluentEmpty) throw;
      ++out.skipped_fluent_empty;
      continue;
    }
    TtsJob job;
    job.job_id = u.id;
    job.text = JoinTokens(fluent);
    job.voice = voice_pool[PickVoice(voice_seed, u.id, voice_pool.size())];
    job.output_path = "audio/" + u.id + ".wav";
    out.manifest.jobs.push_back(std::move(job));
  }
  ValidateManifest(out.manifest);
  return out;
}

void ValidateManifest(const TtsManifest &m) {
  std::set<std::string_view> ids, paths;
  for (const auto &job : m.jobs) {
    if (job.job_id.empty()) throw Error(ErrorKind::kFormat, "job with empty id");
    if (job.text.empty()) throw Error(ErrorKind::kFormat, "job '" + job.job_id + "' has no text");
    if (job.voice.voice_id.empty()) {
      throw Error(ErrorKind::kFormat, "job '" + job.job_id + "' has no voice");
    }
    if (std::filesystem::path(job.output_path).is_absolute() || job.output_path.empty()) {
      throw Error(ErrorKind::kFormat, "job '" + job.job_id + "' needs a relative output path");
    }
    if (!ids.insert(job.job_id).second) {
      throw Error(ErrorKind::kDuplicateKey, "duplicate job id '" + job.job_id + "'");
    }
    if (!paths.insert(job.output_path).second) {
      throw Error(ErrorKind::kDuplicateKey, "duplicate output path '" + job.output_path + "'");
    }
  }
}

std::string JobToJsonLine(const TtsJob &job) {
  json j;
  j["job_id"] = job.job_id;
  j["text"] = job.text;
  j["voice"] = {{"provider", ProviderName(job.voice.provider)},
                {"voice_id", job.voice.voice_id},
                {"notes", job.voice.notes}};
  j["output_path"] = job.output_path;
  j["expected_audio"] = {{"sample_rate_hz", job.expected_audio.sample_rate_hz},
                         {"channels", job.expected_audio.channels},
                         {"encoding", job.expected_audio.encoding}};
  return j.dump();
}

TtsJob JobFromJsonLine(std::string_view line) {
  TtsJob job;
  try {
    const auto j = nlohmann::json::parse(line);
    job.job_id = j.at("job_id").get<std::string>();
    job.text = j.at("text").get<std::string>();
    const auto &v = j.at("voice");
    job.voice.provider = ProviderFromName(v.at("provider").get<std::string>());
    job.voice.voice_id = v.at("voice_id").get<std::string>();
    job.voice.notes = v.value("notes", std::string());
    job.output_path = j.at("output_path").get<std::string>();
    if (j.contains("expected_audio")) {
      const auto &a = j["expected_audio"];
      job.expected_audio.sample_rate_hz = a.at("sample_rate_hz").get<int>();
      job.expected_audio.channels = a.at("channels").get<int>();
      job.expected_audio.encoding = a.at("encoding").get<std::string>();
    }
  } catch (const nlohmann::json::exception &e) {
    throw Error(ErrorKind::kFormat, std::string("bad manifest record: ") + e.what());
  }
  return job;
}

void SaveManifest(const TtsManifest &m, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto &job : m.jobs) out << JobToJsonLine(job) << '\n';
  std::ofstream meta(MetaPath(path), std::ios::binary);
  json j = {{"created_from", m.created_from}, {"seed", m.seed}};
  meta << j.dump() << '\n';
}

TtsManifest LoadManifest(const std::filesystem::path &path) {
  std::istringstream in(ReadFile(path));
  TtsManifest m;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      m.jobs.push_back(JobFromJsonLine(line));
    } catch (const Error &e) {
      throw ParseError(line_no, path.string() + ": " + e.what());
    }
  }
  if (std::filesystem::exists(MetaPath(path))) {
    try {
      const auto j = nlohmann::json::parse(ReadFile(MetaPath(path)));
      m.created_from = j.value("created_from", std::string());
      m.seed = j.value("seed", std::uint64_t{0});
    } catch (const nlohmann::json::exception &e) {
      throw Error(ErrorKind::kFormat, std::string("bad manifest meta: ") + e.what());
    }
  }
  ValidateManifest(m);
  return m;
}

std::vector<std::string> ValidateAudioBytes(std::string_view b, const AudioSpec &expected) {
  std::vector<std::string> v;
  if (b.size() < 12 || b.substr(0, 4) != "RIFF" || b.substr(8, 4) != "WAVE") {
    return {"container"};
  }
  bool have_fmt = false, have_data = false;
  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0, data_size = 0;
  std::size_t at = 12;
  while (at + 8 <= b.size()) {
    const auto id = b.substr(at, 4);
    const std::uint32_t size = ReadLe32(b, at + 4);
    const std::size_t body = at + 8;
    if (id == "fmt ") {
      if (size < 16 || body + 16 > b.size()) return {"container"};
      format = ReadLe16(b, body);
      channels = ReadLe16(b, body + 2);
      rate = ReadLe32(b, body + 4);
      bits = ReadLe16(b, body + 14);
      have_fmt = true;
    } else if (id == "data") {
      data_size = static_cast<std::uint32_t>(std::min<std::size_t>(size, b.size() - body));
      have_data = true;
      break;
    }
    at = body + size + (size & 1);
  }
  if (!have_fmt || !have_data) return {"container"};
  if (static_cast<int>(rate) != expected.sample_rate_hz) v.push_back("sample_rate");
  if (static_cast<int>(channels) != expected.channels) v.push_back("channels");
  const bool pcm = format == 1 || format == 0xFFFE;
  if (expected.encoding != "pcm16" || !pcm || bits != 16) v.push_back("encoding");
  if (data_size == 0) v.push_back("empty audio");
  return v;
}

std::vector<std::string> ValidateAudio(const std::filesystem::path &path,
                                       const AudioSpec &expected) {
  return ValidateAudioBytes(ReadFile(path), expected);
}

std::string EncodeWavPcm16(std::span<const std::int16_t> samples, int sample_rate_hz,
                           int channels) {
  const auto data_bytes = static_cast<std::uint32_t>(samples.size() * 2);
  std::string out;
  out.reserve(44 + data_bytes);
  out += "RIFF";
  PutLe32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  PutLe32(out, 16);
  PutLe16(out, 1);
  PutLe16(out, static_cast<std::uint16_t>(channels));
  PutLe32(out, static_cast<std::uint32_t>(sample_rate_hz));
  PutLe32(out, static_cast<std::uint32_t>(sample_rate_hz * channels * 2));
  PutLe16(out, static_cast<std::uint16_t>(channels * 2));
  PutLe16(out, 16);
  out += "data";
  PutLe32(out, data_bytes);
  for (std::int16_t s : samples) PutLe16(out, static_cast<std::uint16_t>(s));
  return out;
}

std::string_view JobStatusName(JobStatus s) {
  switch (s) {
    case JobStatus::kOk: return "ok";
    case JobStatus::kFailed: return "failed";
    case JobStatus::kSkipped: return "skipped";
  }
  return "failed";
}

std::size_t ExecutionReport::Count(JobStatus s) const {
  std::size_t n = 0;
  for (const auto &o : outcomes) n += o.status == s;
  return n;
}

ExecutionReport ExecuteManifest(const TtsManifest &m, const ExecuteOptions &opts) {
  ValidateManifest(m);
  const Endpoint ep = ParseEndpoint(opts.endpoint);
  ExecutionReport report;
  report.outcomes.resize(m.jobs.size());
  if (m.jobs.empty()) return report;

  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(
                                                         std::max(opts.concurrency, 1)),
                                                     m.jobs.size()));
  std::atomic<std::size_t> next{0};

  const auto work = [&](std::size_t worker) {
    httplib::Client client(ep.origin);
    client.set_connection_timeout(5);
    client.set_read_timeout(120);
    for (std::size_t i = next++; i < m.jobs.size(); i = next++) {
      const TtsJob &job = m.jobs[i];
      JobOutcome &outcome = report.outcomes[i];
      outcome.job_id = job.job_id;
      const auto out_path = opts.base_dir / job.output_path;
      std::error_code ec;
      if (std::filesystem::exists(out_path, ec)) {
        try {
          if (ValidateAudio(out_path, job.expected_audio).empty()) {
            outcome.status = JobStatus::kSkipped;
            outcome.detail = "exists";
            continue;
          }
        } catch (const Error &) {
        }
      }
      auto backoff = opts.retry.initial_backoff;
      Attempt attempt;
      for (int a = 1; a <= std::max(opts.retry.max_attempts, 1); ++a) {
        attempt = RunJob(client, ep, job, out_path, worker);
        if (attempt.ok || !attempt.retryable) break;
        if (a < opts.retry.max_attempts) {
          std::this_thread::sleep_for(backoff);
          backoff = std::chrono::milliseconds(
              static_cast<long long>(static_cast<double>(backoff.count()) * opts.retry.multiplier));
        }
      }
      outcome.status = attempt.ok ? JobStatus::kOk : JobStatus::kFailed;
      outcome.detail = attempt.detail;
    }
  };

  std::vector<std::thread> threads;
  for (std::size_t w = 1; w < workers; ++w) threads.emplace_back(work, w);
  work(0);
  for (auto &t : threads) t.join();
  return report;
}

std::string OutcomeToJsonLine(const JobOutcome &o) {
  json j = {{"job_id", o.job_id}, {"status", JobStatusName(o.status)}, {"detail", o.detail}};
  return j.dump();
}

void SaveExecutionReport(const ExecutionReport &r, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  for (const auto &o : r.outcomes) out << OutcomeToJsonLine(o) << '\n';
}

std::string SidecarHealth(const std::string &endpoint) {
  const Endpoint ep = ParseEndpoint(endpoint);
  httplib::Client client(ep.origin);
  client.set_connection_timeout(3);
  auto res = client.Get(ep.Path("/health"));
  if (!res) {
    throw Error(ErrorKind::kSidecarUnavailable,
                "sidecar unreachable at " + ep.origin + ": " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::kSidecarProtocol, fmt::format("/health answered {}", res->status));
  }
  return res->body;
}

}  // namespace stutterkit
