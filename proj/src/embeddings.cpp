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

#include "stutterkit/embeddings.hpp"

#include <fmt/format.h>
#include <httplib.h>

#include <charconv>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>

#include "stutterkit/error.hpp"
#include "stutterkit/rng.hpp"

namespace stutterkit {

namespace {

using json = nlohmann::json;

Vector Normalized(Vector v) {
  const double norm = std::sqrt(Dot(v, v));
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorKind::kInvalidArgument, "cannot normalize a zero or non-finite vector");
  }
  for (auto &x : v) x /= norm;
  return v;
}

double ParseDouble(std::string_view s, std::size_t line) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(line, "bad float '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string EmbeddingRecordId(std::string_view role, std::string_view utterance_id) {
  return std::string(role) + ":" + std::string(utterance_id);
}

EmbeddingTable::EmbeddingTable(std::size_t dim, std::string model_id)
    : dim_(dim), model_id_(std::move(model_id)) {
  if (dim_ == 0) throw Error(ErrorKind::kInvalidArgument, "embedding dimension must be > 0");
}

void EmbeddingTable::Add(const std::string &record_id, std::size_t token_index, Vector v) {
  if (v.size() != dim_) {
    throw Error(ErrorKind::kDimensionMismatch,
                fmt::format("vector for {}#{} has dimension {}, expected {}", record_id,
                            token_index, v.size(), dim_));
  }
  auto [it, inserted] = entries_.try_emplace({record_id, token_index});
  if (!inserted) {
    throw Error(ErrorKind::kDuplicateKey,
                fmt::format("duplicate embedding key {}#{}", record_id, token_index));
  }
  it->second = Normalized(std::move(v));
}

std::vector<Vector> EmbeddingTable::Lookup(const std::string &record_id,
                                           std::size_t n_tokens) const {
  std::vector<Vector> out;
  out.reserve(n_tokens);
  for (std::size_t i = 0; i < n_tokens; ++i) {
    auto it = entries_.find({record_id, i});
    if (it == entries_.end()) {
      throw Error(ErrorKind::kMissingKey,
                  fmt::format("no embedding for {} token {} (need {} tokens)", record_id, i,
                              n_tokens));
    }
    out.push_back(it->second);
  }
  return out;
}

EmbeddingTable LoadEmbeddings(const std::filesystem::path &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw ParseError(1, path.string() + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  std::size_t dim = 0;
  std::string model;
  {
    std::istringstream header(line);
    std::string field;
    while (header >> field) {
      if (field.rfind("d=", 0) == 0) {
        dim = static_cast<std::size_t>(ParseDouble(field.substr(2), 1));
      } else if (field.rfind("model=", 0) == 0) {
        model = field.substr(6);
      } else {
        throw ParseError(1, "unexpected header field '" + field + "'");
      }
    }
    if (dim == 0 || model.empty()) throw ParseError(1, "header must be 'd=<dim> model=<id>'");
  }

  EmbeddingTable table(dim, model);
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) throw ParseError(line_no, "expected 3 tab-separated fields");
    const std::string record = line.substr(0, tab1);
    const double index = ParseDouble(std::string_view(line).substr(tab1 + 1, tab2 - tab1 - 1),
                                     line_no);
    if (index < 0 || index != std::floor(index)) throw ParseError(line_no, "bad token index");
    Vector v;
    std::string_view rest = std::string_view(line).substr(tab2 + 1);
    while (true) {
      const auto comma = rest.find(',');
      v.push_back(ParseDouble(rest.substr(0, comma), line_no));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    try {
      table.Add(record, static_cast<std::size_t>(index), std::move(v));
    } catch (const Error &e) {
      throw Error(e.kind(), fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return table;
}

void SaveEmbeddings(const EmbeddingTable &table, const std::filesystem::path &path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::kIo, "cannot write " + path.string());
  out << "d=" << table.dim() << " model=" << table.model_id() << '\n';
  for (const auto &[key, v] : table.entries()) {
    out << key.first << '\t' << key.second << '\t';
    for (std::size_t k = 0; k < v.size(); ++k) {
      if (k) out << ',';
      out << fmt::format("{}", v[k]);
    }
    out << '\n';
  }
}

Vector MockTokenVector(std::string_view token, std::size_t position, std::size_t dim) {
  const std::uint64_t base = DeriveSeed(Fnv1a64(token), static_cast<std::uint64_t>(position));
  Rng rng(base);
  Vector v(dim);
  for (auto &x : v) x = rng.UniformUnit() * 2.0 - 1.0;
  return Normalized(std::move(v));
}

SidecarEmbeddingSource::SidecarEmbeddingSource(Endpoint endpoint, std::string model_id,
                                               std::filesystem::path cache_dir)
    : endpoint_(std::move(endpoint)),
      model_id_(std::move(model_id)),
      cache_dir_(std::move(cache_dir)) {}

std::filesystem::path SidecarEmbeddingSource::CachePath(const std::string &text) const {
  std::string key = model_id_;
  key.push_back('\0');
  key += text;
  return cache_dir_ / fmt::format("{:016x}.json", Fnv1a64(key));
}

std::vector<Vector> SidecarEmbeddingSource::Embed(const std::string &record_id,
                                                  const Tokens &tokens) {
  const std::string text = JoinTokens(tokens);
  if (text.empty()) throw Error(ErrorKind::kInvalidArgument, "cannot embed empty text");

  const auto decode = [&](const json &body) {
    const auto dim = body.at("dim").get<std::size_t>();
    const auto &vectors = body.at("vectors");
    if (vectors.size() != tokens.size()) {
      throw Error(ErrorKind::kSidecarProtocol,
                  fmt::format("sidecar returned {} vectors for {} tokens of {}", vectors.size(),
                              tokens.size(), record_id));
    }
    std::vector<Vector> out;
    for (const auto &v : vectors) {
      auto vec = v.get<Vector>();
      if (vec.size() != dim) {
        throw Error(ErrorKind::kDimensionMismatch, "sidecar vector dimension mismatch");
      }
      out.push_back(Normalized(std::move(vec)));
    }
    return out;
  };

  const auto cache_path = CachePath(text);
  if (!cache_dir_.empty() && std::filesystem::exists(cache_path)) {
    std::ifstream in(cache_path, std::ios::binary);
    try {
      const auto cached = json::parse(in);
      if (cached.at("model") == model_id_ && cached.at("text") == text) {
        ++cache_hits_;
        return decode(cached);
      }
    } catch (const json::exception &) {
      // unreadable cache entry: fall through and refetch
    }
  }

  httplib::Client client(endpoint_.origin);
  client.set_connection_timeout(5);
  client.set_read_timeout(60);
  const json request = {{"model", model_id_}, {"text", text}};
  ++requests_;
  auto res = client.Post(endpoint_.Path("/embed"), request.dump(), "application/json");
  if (!res) {
    throw Error(ErrorKind::kSidecarUnavailable,
                "embedding sidecar unreachable at " + endpoint_.origin + ": " +
                    httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorKind::kSidecarProtocol,
                fmt::format("embedding sidecar answered {}: {}", res->status, res->body));
  }
  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kSidecarProtocol, std::string("bad /embed response: ") + e.what());
  }
  std::vector<Vector> out;
  try {
    out = decode(body);
  } catch (const json::exception &e) {
    throw Error(ErrorKind::kSidecarProtocol, std::string("bad /embed response: ") + e.what());
  }

  if (!cache_dir_.empty()) {
    std::lock_guard lock(write_mutex_);
    std::filesystem::create_directories(cache_dir_);
    json entry = body;
    entry["model"] = model_id_;
    entry["text"] = text;
    auto tmp = cache_path;
    tmp += ".tmp";
    {
      std::ofstream o(tmp, std::ios::binary);
      o << entry.dump();
    }
    std::filesystem::rename(tmp, cache_path);
  }
  return out;
}

std::unique_ptr<EmbeddingSource> OpenEmbeddingSource(const std::string &spec,
                                                     const std::string &model_id,
                                                     const std::filesystem::path &cache_dir) {
  if (spec.rfind("http://", 0) == 0 || spec.rfind("https://", 0) == 0) {
    return std::make_unique<SidecarEmbeddingSource>(ParseEndpoint(spec), model_id, cache_dir);
  }
  return std::make_unique<TableEmbeddingSource>(LoadEmbeddings(spec));
}

}  // namespace stutterkit
