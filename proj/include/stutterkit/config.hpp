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

// Run configuration shared by the command-line subcommands. A JSON document
// with nested sections; every key is optional and unknown keys are rejected.
//
//   {
//     "paths":      {"corpus": "...", "out_dir": "..."},
//     "seed":       7,
//     "folds":      {"k": 6, "speakers_per_fold": 2},
//     "augment":    {"n": 500, "profile": "standard", "type_weights": [1, 1, 1]},
//     "tts":        {"endpoint": "http://...", "concurrency": 4,
//                    "voices": [{"provider": "mock", "voice_id": "v0"}]},
//     "embeddings": {"source": "emb.tsv", "baseline_b": 0.0},
//     "report":     {"formats": ["md", "csv", "json"]}
//   }
//
// "profile" is either a name or an inline object with word_rep, phrase_rep
// and interjection sections; omitted ranges keep the standard values.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "stutterkit/augmentor.hpp"
#include "stutterkit/report.hpp"
#include "stutterkit/synth_jobs.hpp"

namespace stutterkit {

struct RunConfig {
  std::string corpus;
  std::string out_dir;
  std::uint64_t seed = 0;
  int k_folds = 6;
  int speakers_per_fold = 2;
  AugmentationProfile profile = AugmentationProfile::Standard();
  std::size_t n_augment = 0;
  TypeWeights type_weights = kUniformTypeWeights;
  std::string tts_endpoint;
  int tts_concurrency = 4;
  std::vector<VoiceSpec> voices;  // empty: DefaultSpeakerVectorPool()
  std::string embeddings;         // table file or sidecar URL
  double baseline_b = 0.0;
  std::vector<ReportFormat> report_formats{ReportFormat::kMarkdown};
};

// Throws Error(kConfig) naming the offending key; JSON syntax errors carry
// "line N".
RunConfig ParseRunConfig(std::string_view text);
RunConfig LoadRunConfig(const std::filesystem::path &path);

AugmentationProfile ProfileFromJson(std::string_view text);
void ValidateTypeWeights(const TypeWeights &w);

}  // namespace stutterkit
