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

#include "stutterkit/error.hpp"

namespace stutterkit {

const char *ErrorKindName(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "ParseError";
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kFluentEmpty: return "FluentEmpty";
    case ErrorKind::kEmptyReference: return "EmptyReference";
    case ErrorKind::kEmptyCorpus: return "EmptyCorpus";
    case ErrorKind::kEmptyPool: return "EmptyPool";
    case ErrorKind::kDuplicateKey: return "DuplicateKey";
    case ErrorKind::kMissingKey: return "MissingKey";
    case ErrorKind::kDimensionMismatch: return "DimensionMismatch";
    case ErrorKind::kPlanMismatch: return "PlanMismatch";
    case ErrorKind::kIndivisibleSpeakers: return "IndivisibleSpeakers";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kFormat: return "FormatError";
    case ErrorKind::kSidecarUnavailable: return "SidecarUnavailable";
    case ErrorKind::kSidecarProtocol: return "SidecarProtocolError";
    case ErrorKind::kConfig: return "ConfigError";
  }
  return "Error";
}

}  // namespace stutterkit
