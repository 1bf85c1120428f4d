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

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stutterkit {

enum class ErrorKind {
  kParse,
  kInvalidArgument,
  kFluentEmpty,
  kEmptyReference,
  kEmptyCorpus,
  kEmptyPool,
  kDuplicateKey,
  kMissingKey,
  kDimensionMismatch,
  kPlanMismatch,
  kIndivisibleSpeakers,
  kIo,
  kFormat,
  kSidecarUnavailable,
  kSidecarProtocol,
  kConfig,
};

const char *ErrorKindName(ErrorKind kind);

// All toolkit failures are reported through this type; `kind()` lets callers
// branch on the condition (e.g. skip FluentEmpty utterances) without parsing
// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string &message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Parse failure with the 1-based line number of the offending input line.
class ParseError : public Error {
 public:
  ParseError(std::size_t line, const std::string &message)
      : Error(ErrorKind::kParse,
              "line " + std::to_string(line) + ": " + message),
        line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace stutterkit
