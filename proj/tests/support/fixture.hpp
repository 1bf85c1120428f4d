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

#pragma once

#include "stutterkit/chat_corpus.hpp"
#include "temp_dir.hpp"

namespace testing_support {

// The 12-speaker fixture: one reading video and two interviews, four
// speakers each, with @ID demographics.
inline stutterkit::Corpus FixtureCorpus() {
  using stutterkit::Setting;
  const std::pair<const char *, Setting> videos[] = {
      {"read01", Setting::kReading}, {"intv01", Setting::kInterview}, {"intv02", Setting::kInterview}};
  stutterkit::Corpus c;
  for (const auto &[video, setting] : videos) {
    stutterkit::SourceMeta meta;
    meta.video_id = video;
    meta.setting = setting;
    auto doc = stutterkit::ParseChat(Slurp(DataDir() / "fixture" / (std::string(video) + ".cha")), meta);
    stutterkit::MergeCorpus(c, std::move(doc.corpus));
  }
  return c;
}

}  // namespace testing_support
