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

// TTS job manifests for augmented and fluent texts, their execution against a
// sidecar /tts endpoint, and validation of the returned audio.

#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "stutterkit/augmentor.hpp"
#include "stutterkit/chat_corpus.hpp"

namespace stutterkit {

enum class VoiceProvider { kOpenAiStyle, kSpeakerVectorStyle, kMock };

std::string_view ProviderName(VoiceProvider p);
VoiceProvider ProviderFromName(std::string_view name);

struct VoiceSpec {
  VoiceProvider provider = VoiceProvider::kMock;
  std::string voice_id;
  std::string notes;

  bool operator==(const VoiceSpec &) const = default;
};

struct AudioSpec {
  int sample_rate_hz = 16000;
  int channels = 1;
  std::string encoding = "pcm16";

  bool operator==(const AudioSpec &) const = default;
};

struct TtsJob {
  std::string job_id;
  std::string text;
  VoiceSpec voice;
  std::string output_path;  // relative to the execution base directory
  AudioSpec expected_audio;

  bool operator==(const TtsJob &) const = default;
};

struct TtsManifest {
  std::vector<TtsJob> jobs;
  std::string created_from;
  std::uint64_t seed = 0;

  bool operator==(const TtsManifest &) const = default;
};

// "speaker-0" ... "speaker-9", speaker-vector provider.
std::vector<VoiceSpec> DefaultSpeakerVectorPool();

// One job per augmented utterance; the voice is drawn uniformly from the pool
// with a substream keyed by the utterance id.
TtsManifest BuildManifest(std::span<const AugmentedUtterance> augmented,
                          std::span<const VoiceSpec> voice_pool, std::uint64_t seed,
                          std::string created_from = "augmentation");

struct FluentManifest {
  TtsManifest manifest;
  std::size_t skipped_fluent_empty = 0;
};

// One job per utterance with fluent text (disfluency-free rendering).
FluentManifest BuildFluentManifest(const Corpus &c, std::span<const VoiceSpec> voice_pool,
                                   std::uint64_t seed, std::string created_from = "corpus");

void ValidateManifest(const TtsManifest &m);

// JSONL, one TtsJob per line. created_from and seed go to "<path>.meta.json".
std::string JobToJsonLine(const TtsJob &job);
TtsJob JobFromJsonLine(std::string_view line);
void SaveManifest(const TtsManifest &m, const std::filesystem::path &path);
TtsManifest LoadManifest(const std::filesystem::path &path);

// Validation of a WAV file against the expected format. Returns the list of
// violations ("container", "sample_rate", "channels", "encoding",
// "empty audio"); empty means ok. Throws Error(kIo) if unreadable.
std::vector<std::string> ValidateAudio(const std::filesystem::path &path,
                                       const AudioSpec &expected);
std::vector<std::string> ValidateAudioBytes(std::string_view bytes, const AudioSpec &expected);

// Canonical 44-byte-header PCM16 WAV.
std::string EncodeWavPcm16(std::span<const std::int16_t> samples, int sample_rate_hz,
                           int channels = 1);

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
};

enum class JobStatus { kOk, kFailed, kSkipped };

std::string_view JobStatusName(JobStatus s);

struct JobOutcome {
  std::string job_id;
  JobStatus status = JobStatus::kFailed;
  std::string detail;
};

struct ExecutionReport {
  std::vector<JobOutcome> outcomes;  // manifest order

  std::size_t Count(JobStatus s) const;
  bool AllSucceeded() const { return Count(JobStatus::kFailed) == 0; }
};

struct ExecuteOptions {
  std::string endpoint;
  std::filesystem::path base_dir;
  int concurrency = 4;
  RetryPolicy retry;
};

// POSTs each job to {endpoint}/tts; writes audio via temp-then-rename.
// Existing outputs that validate are skipped.
ExecutionReport ExecuteManifest(const TtsManifest &m, const ExecuteOptions &opts);

std::string OutcomeToJsonLine(const JobOutcome &o);
void SaveExecutionReport(const ExecutionReport &r, const std::filesystem::path &path);

// GET {endpoint}/health; throws kSidecarUnavailable on connection failure.
std::string SidecarHealth(const std::string &endpoint);

}  // namespace stutterkit
