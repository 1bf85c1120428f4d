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

#include <string>

namespace stutterkit {

// "http://host:port/prefix" split for cpp-httplib.
struct Endpoint {
  std::string origin;       // "http://host:port"
  std::string path_prefix;  // "" or "/prefix" (no trailing slash)

  std::string Path(const std::string &route) const { return path_prefix + route; }
};

// Throws Error(kInvalidArgument) for anything but http(s)://host[:port][/path].
Endpoint ParseEndpoint(const std::string &url);

}  // namespace stutterkit
