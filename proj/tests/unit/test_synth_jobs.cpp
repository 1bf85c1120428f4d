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

#include <set>

#include "mock_sidecar.hpp"
#include "stutterkit/augmentor.hpp"
#include "stutterkit/error.hpp"
#include "stutterkit/synth_jobs.hpp"
#include "temp_dir.hpp"

using namespace stutterkit;
using testing_support::DataDir;
using testing_support::MockSidecar;
using testing_support::Slurp;
using testing_support::TempDir;

namespace {

Corpus Fluent12() {
  SourceMeta meta;
  meta.video_id = "f12";
  return ParseChat(Slurp(DataDir() / "fluent12.cha"), meta).corpus;
}

std::vector<AugmentedUtterance> SomeAugmented(std::size_t n) {
  AugmentRequest req;
  req.n = n;
  req.seed = 5;
  return AugmentCorpus(Fluent12(), req);
}

TtsManifest FiveJobs() {
  const auto aug = SomeAugmented(5);
  const auto pool = DefaultSpeakerVectorPool();
  return BuildManifest(aug, pool, 5);
}

ExecuteOptions Options(const std::string &endpoint, const std::filesystem::path &dir) {
  ExecuteOptions o;
  o.endpoint = endpoint;
  o.base_dir = dir;
  o.concurrency = 3;
  o.retry.initial_backoff = std::chrono::milliseconds(5);
  return o;
}

}  // namespace

TEST_CASE("fluent manifest skips utterances without fluent text") {
  const auto pool = DefaultSpeakerVectorPool();
  const auto fm = BuildFluentManifest(Fluent12(), pool, 1);
  CHECK(fm.manifest.jobs.size() == 11);
  CHECK(fm.skipped_fluent_empty == 1);
  CHECK(fm.manifest.jobs[0].text == "I want to go home");
  CHECK(fm.manifest.created_from == "corpus");
  ValidateManifest(fm.manifest);
  CHECK_THROWS(BuildFluentManifest(Corpus{}, pool, 1));
}

TEST_CASE("manifest building is deterministic and order independent") {
  const auto aug = SomeAugmented(30);
  const auto pool = DefaultSpeakerVectorPool();
  REQUIRE(pool.size() == 10);
  CHECK(pool[3].voice_id == "speaker-3");
  const auto a = BuildManifest(aug, pool, 77);
  CHECK(a == BuildManifest(aug, pool, 77));
  CHECK(a.jobs[0].output_path == "audio/" + aug[0].id + ".wav");
  CHECK(a.jobs[0].text == JoinTokens(aug[0].verbatim_tokens));
  CHECK(a.jobs[0].expected_audio == AudioSpec{});

  // Reversing the input keeps each job's voice.
  std::vector<AugmentedUtterance> reversed(aug.rbegin(), aug.rend());
  const auto b = BuildManifest(reversed, pool, 77);
  for (std::size_t i = 0; i < a.jobs.size(); ++i) {
    CHECK(a.jobs[i] == b.jobs[a.jobs.size() - 1 - i]);
  }
  std::set<std::string> voices;
  for (const auto &j : a.jobs) voices.insert(j.voice.voice_id);
  CHECK(voices.size() > 3);
  CHECK_THROWS(BuildManifest(aug, std::vector<VoiceSpec>{}, 1));
}

TEST_CASE("manifest validation") {
  auto m = FiveJobs();
  ValidateManifest(m);
  auto dup = m;
  dup.jobs[1].job_id = dup.jobs[0].job_id;
  CHECK_THROWS(ValidateManifest(dup));
  auto same_path = m;
  same_path.jobs[1].output_path = same_path.jobs[0].output_path;
  CHECK_THROWS(ValidateManifest(same_path));
  auto absolute = m;
  absolute.jobs[0].output_path = "/tmp/x.wav";
  CHECK_THROWS(ValidateManifest(absolute));
  auto empty_text = m;
  empty_text.jobs[0].text = "";
  CHECK_THROWS(ValidateManifest(empty_text));
}

TEST_CASE("manifest file round trip") {
  TempDir dir;
  const auto m = FiveJobs();
  SaveManifest(m, dir / "m.jsonl");
  CHECK(LoadManifest(dir / "m.jsonl") == m);
  for (const auto &j : m.jobs) CHECK(JobFromJsonLine(JobToJsonLine(j)) == j);
  CHECK(ProviderFromName(ProviderName(VoiceProvider::kOpenAiStyle)) == VoiceProvider::kOpenAiStyle);
}

TEST_CASE("audio validation") {
  const std::vector<std::int16_t> tone(1600, 100);
  const AudioSpec want;
  CHECK(ValidateAudioBytes(EncodeWavPcm16(tone, 16000, 1), want).empty());
  const auto v = ValidateAudioBytes(EncodeWavPcm16(tone, 22050, 2), want);
  CHECK(v == std::vector<std::string>{"sample_rate", "channels"});
  CHECK(ValidateAudioBytes(EncodeWavPcm16({}, 16000, 1), want) ==
        std::vector<std::string>{"empty audio"});
  CHECK(ValidateAudioBytes("RIFFnope", want) == std::vector<std::string>{"container"});
  CHECK_THROWS_AS(ValidateAudio("/nonexistent/x.wav", want), Error);

  // 0.08 s per token at 16 kHz.
  const auto wav = MockSidecar::Tone("my my name is", "speaker-0");
  CHECK(wav.size() == 44 + 4 * 1280 * 2);
  CHECK(wav == MockSidecar::Tone("my my name is", "speaker-0"));
}

TEST_CASE("execute against the mock sidecar") {
  TempDir dir;
  MockSidecar sidecar;
  const auto m = FiveJobs();
  CHECK(SidecarHealth(sidecar.url()).find("\"mock\"") != std::string::npos);

  const auto first = ExecuteManifest(m, Options(sidecar.url(), dir.path()));
  CHECK(first.Count(JobStatus::kOk) == 5);
  CHECK(first.AllSucceeded());
  for (const auto &j : m.jobs) {
    CHECK(ValidateAudio(dir / j.output_path, j.expected_audio).empty());
    CHECK(std::filesystem::file_size(dir / j.output_path) ==
          MockSidecar::Tone(j.text, j.voice.voice_id).size());
  }
  for (const auto &entry : std::filesystem::recursive_directory_iterator(dir.path())) {
    CHECK(entry.path().string().find(".part") == std::string::npos);
  }

  const int calls = sidecar.tts_calls;
  const auto second = ExecuteManifest(m, Options(sidecar.url(), dir.path()));
  CHECK(second.Count(JobStatus::kSkipped) == 5);
  CHECK(sidecar.tts_calls == calls);

  SaveExecutionReport(second, dir / "report.jsonl");
  CHECK(Slurp(dir / "report.jsonl").find("\"skipped\"") != std::string::npos);
}

TEST_CASE("transient sidecar errors are retried") {
  TempDir dir;
  MockSidecar sidecar;
  sidecar.fail_tts_first_n = 2;
  auto opts = Options(sidecar.url(), dir.path());
  opts.concurrency = 1;
  const auto r = ExecuteManifest(FiveJobs(), opts);
  CHECK(r.Count(JobStatus::kOk) == 5);
  CHECK(sidecar.tts_calls == 7);
}

TEST_CASE("a dead endpoint fails every job without throwing") {
  TempDir dir;
  const auto url = "http://127.0.0.1:" + std::to_string(testing_support::DeadPort());
  auto opts = Options(url, dir.path());
  opts.retry.max_attempts = 2;
  const auto r = ExecuteManifest(FiveJobs(), opts);
  CHECK(r.Count(JobStatus::kFailed) == 5);
  CHECK_FALSE(r.AllSucceeded());
  CHECK(r.outcomes[0].detail.rfind("connection", 0) == 0);
  try {
    SidecarHealth(url);
    FAIL("expected SidecarUnavailable");
  } catch (const Error &e) {
    CHECK(e.kind() == ErrorKind::kSidecarUnavailable);
  }
}
