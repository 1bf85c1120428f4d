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

// Contextual token embeddings for BERTScore: the on-disk embedding table and
// the sidecar-backed source with its response cache.

#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "stutterkit/chat_corpus.hpp"
#include "stutterkit/endpoint.hpp"
#include "stutterkit/metrics.hpp"

namespace stutterkit {

// Records are keyed by (record id, token index). Evaluation uses
// "ref:<utterance_id>" and "hyp:<utterance_id>" record ids.
std::string EmbeddingRecordId(std::string_view role, std::string_view utterance_id);

class EmbeddingTable {
 public:
  EmbeddingTable(std::size_t dim, std::string model_id);

  std::size_t dim() const { return dim_; }
  const std::string &model_id() const { return model_id_; }
  std::size_t size() const { return entries_.size(); }

  // L2-normalizes `v`. Throws kDuplicateKey, kDimensionMismatch, or
  // kInvalidArgument for a zero vector.
  void Add(const std::string &record_id, std::size_t token_index, Vector v);

  // Vectors for token indices 0..n_tokens-1 of a record; throws kMissingKey
  // when any is absent.
  std::vector<Vector> Lookup(const std::string &record_id, std::size_t n_tokens) const;

  const std::map<std::pair<std::string, std::size_t>, Vector> &entries() const {
    return entries_;
  }

 private:
  std::size_t dim_;
  std::string model_id_;
  std::map<std::pair<std::string, std::size_t>, Vector> entries_;
};

// Header "d=<dim> model=<id>", then "record<TAB>index<TAB>v1,...,vd" lines.
EmbeddingTable LoadEmbeddings(const std::filesystem::path &path);
void SaveEmbeddings(const EmbeddingTable &table, const std::filesystem::path &path);

// Deterministic stand-in for a contextual encoder: a unit vector seeded by
// (token, position).
Vector MockTokenVector(std::string_view token, std::size_t position, std::size_t dim = 16);

class EmbeddingSource {
 public:
  virtual ~EmbeddingSource() = default;
  virtual std::string model_id() const = 0;
  // One unit vector per token.
  virtual std::vector<Vector> Embed(const std::string &record_id, const Tokens &tokens) = 0;
};

class TableEmbeddingSource : public EmbeddingSource {
 public:
  explicit TableEmbeddingSource(EmbeddingTable table) : table_(std::move(table)) {}
  std::string model_id() const override { return table_.model_id(); }
  std::vector<Vector> Embed(const std::string &record_id, const Tokens &tokens) override {
    return table_.Lookup(record_id, tokens.size());
  }

 private:
  EmbeddingTable table_;
};

// MockTokenVector for every token; same vectors the mock sidecar serves.
class MockEmbeddingSource : public EmbeddingSource {
 public:
  std::string model_id() const override { return "mock-embed"; }
  std::vector<Vector> Embed(const std::string &, const Tokens &tokens) override {
    std::vector<Vector> out;
    out.reserve(tokens.size());
    for (std::size_t i = 0; i < tokens.size(); ++i) out.push_back(MockTokenVector(tokens[i], i));
    return out;
  }
};

// POST {endpoint}/embed {"model", "text"} -> {"dim", "tokens", "vectors"}.
// Responses are cached under `cache_dir` keyed by (model, text); a cached
// text is served without contacting the sidecar.
class SidecarEmbeddingSource : public EmbeddingSource {
 public:
  SidecarEmbeddingSource(Endpoint endpoint, std::string model_id,
                         std::filesystem::path cache_dir);

  std::string model_id() const override { return model_id_; }
  std::vector<Vector> Embed(const std::string &record_id, const Tokens &tokens) override;

  std::size_t cache_hits() const { return cache_hits_; }
  std::size_t requests() const { return requests_; }

 private:
  std::filesystem::path CachePath(const std::string &text) const;

  Endpoint endpoint_;
  std::string model_id_;
  std::filesystem::path cache_dir_;
  std::mutex write_mutex_;
  std::size_t cache_hits_ = 0;
  std::size_t requests_ = 0;
};

// "file path" or "http(s)://..." selects the source.
std::unique_ptr<EmbeddingSource> OpenEmbeddingSource(const std::string &spec,
                                                     const std::string &model_id,
                                                     const std::filesystem::path &cache_dir);

}  // namespace stutterkit
