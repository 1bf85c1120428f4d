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

#include <sys/wait.h>

#include <cstdio>
#include <string>

#include <nlohmann/json.hpp>

namespace testing_support {

struct CliResult {
  int exit_code = -1;
  std::string out;
  nlohmann::json summary;  // last stdout line
};

inline std::string Quote(const std::string &s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

// Runs the built CLI with a shell-quoted argument string; stderr is dropped.
inline CliResult RunCli(const std::string &args, const std::string &env = "") {
  const std::string cmd =
      (env.empty() ? "" : env + " ") + Quote(STUTTERKIT_CLI) + " " + args + " 2>/dev/null";
  CliResult r;
  FILE *pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = std::fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = ::pclose(pipe);
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  const auto end = r.out.find_last_not_of('\n');
  if (end != std::string::npos) {
    const auto nl = r.out.rfind('\n', end);
    const auto begin = nl == std::string::npos ? 0 : nl + 1;
    r.summary = nlohmann::json::parse(r.out.substr(begin, end + 1 - begin), nullptr, false);
  }
  return r;
}

}  // namespace testing_support
