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

// Serial reference against the OpenMP kernels for the two hot loops:
// per-pair scoring and corpus augmentation.

#include <benchmark/benchmark.h>

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "stutterkit/augmentor.hpp"
#include "stutterkit/embeddings.hpp"
#include "stutterkit/report.hpp"

using namespace stutterkit;

namespace {

std::vector<ScoringInput> MakeInputs(std::size_t n) {
  std::mt19937_64 gen(1);
  const std::vector<std::string> vocab{"i", "want", "to", "go", "home", "uh", "um", "the", "dog", "now"};
  std::vector<ScoringInput> inputs(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto &in = inputs[i];
    in.utterance_id = "u" + std::to_string(i);
    in.ref.resize(8 + gen() % 24);
    in.hyp.resize(8 + gen() % 24);
    for (auto &t : in.ref) t = vocab[gen() % vocab.size()];
    for (auto &t : in.hyp) t = vocab[gen() % vocab.size()];
    // 768 wide like a large encoder layer, so the similarity matrix dominates
    for (std::size_t k = 0; k < in.ref.size(); ++k) in.ref_vecs.push_back(MockTokenVector(in.ref[k], k, 768));
    for (std::size_t k = 0; k < in.hyp.size(); ++k) in.hyp_vecs.push_back(MockTokenVector(in.hyp[k], k, 768));
  }
  return inputs;
}

Corpus MakeCorpus(std::size_t n) {
  std::mt19937_64 gen(2);
  const std::vector<std::string> vocab{"she", "loves", "to", "swim", "in", "the", "lake", "every", "day"};
  Corpus c;
  for (std::size_t i = 0; i < n; ++i) {
    Utterance u;
    u.id = "u" + std::to_string(i);
    u.speaker_id = "s" + std::to_string(i % 12);
    u.verbatim_tokens.resize(3 + gen() % 18);
    for (auto &t : u.verbatim_tokens) t = vocab[gen() % vocab.size()];
    c.utterances.push_back(std::move(u));
  }
  return c;
}

template <bool kParallel>
void BM_ScorePairs(benchmark::State &state) {
  const auto inputs = MakeInputs(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    auto scores = kParallel ? ScorePairs(inputs, 0.0) : ScorePairsSerial(inputs, 0.0);
    benchmark::DoNotOptimize(scores.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool kParallel>
void BM_AugmentCorpus(benchmark::State &state) {
  const auto corpus = MakeCorpus(1373);
  AugmentRequest req;
  req.n = static_cast<std::size_t>(state.range(0));
  req.seed = 7;
  for (auto _ : state) {
    auto out = kParallel ? AugmentCorpus(corpus, req) : AugmentCorpusSerial(corpus, req);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_ScorePairs<false>)->Name("ScorePairs/serial")->Arg(256)->Arg(2048)->UseRealTime();
BENCHMARK(BM_ScorePairs<true>)->Name("ScorePairs/openmp")->Arg(256)->Arg(2048)->UseRealTime();
BENCHMARK(BM_AugmentCorpus<false>)->Name("AugmentCorpus/serial")->Arg(1000)->Arg(6000)->UseRealTime();
BENCHMARK(BM_AugmentCorpus<true>)->Name("AugmentCorpus/openmp")->Arg(1000)->Arg(6000)->UseRealTime();

BENCHMARK_MAIN();
