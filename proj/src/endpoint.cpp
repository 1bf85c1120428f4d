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

#include "stutterkit/endpoint.hpp"

#include "stutterkit/error.hpp"

namespace stutterkit {

Endpoint ParseEndpoint(const std::string &url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorKind::kInvalidArgument, "endpoint '" + url + "' lacks a scheme");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw Error(ErrorKind::kInvalidArgument, "unsupported endpoint scheme '" + scheme + "'");
  }
  const auto host_start = scheme_end + 3;
  const auto slash = url.find('/', host_start);
  Endpoint ep;
  ep.origin = url.substr(0, slash);
  if (ep.origin.size() <= host_start) {
    throw Error(ErrorKind::kInvalidArgument, "endpoint '" + url + "' lacks a host");
  }
  if (slash != std::string::npos) {
    ep.path_prefix = url.substr(slash);
    while (!ep.path_prefix.empty() && ep.path_prefix.back() == '/') ep.path_prefix.pop_back();
  }
  return ep;
}

}  // namespace stutterkit
