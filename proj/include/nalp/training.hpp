// Copyright 2026 The NaLP Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef NALP_TRAINING_HPP_
#define NALP_TRAINING_HPP_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nalp/data.hpp"
#include "nalp/eval.hpp"
#include "nalp/model.hpp"
#include "nalp/sampling.hpp"

namespace nalp {

struct TrainConfig {
  std::size_t k = 100;
  std::size_t k_type = 10;
  std::size_t n_f = 200;
  std::size_t n_gfcn = 1000;
  std::size_t n_tfcn = 50;
  std::size_t batch_size = 128;
  double learning_rate = 1e-4;
  std::size_t max_epochs = 1000;
  // Validation probe cadence, in epochs; 0 disables probing.
  std::size_t eval_every = 5;
  // Probes without improvement before stopping.
  std::size_t patience = 10;
  // Cap on sampled validation queries per probe; 0 means all.
  std::size_t valid_query_cap = 2000;
  std::size_t workers = 1;
  std::uint64_t seed = 0;
  ModelConfig model;
  NegSamplerConfig sampler;

  void Validate() const;
  ModelDims Dims(const Vocabulary& vocab) const;
};

// M_R, M_V ~ U(-1/sqrt(k), 1/sqrt(k)); conv filters ~ N(0, 0.1) truncated
// at two standard deviations; FCN weights Glorot-uniform; biases zero;
// batchnorm gamma = 1, beta = 0. The type branch mirrors this with k'.
// Model family names: "nalp", "tnalp", and the "+" forms that switch the
// sampler to the mixed mechanism.
void ApplyVariant(std::string_view variant, TrainConfig* config);
std::string VariantName(const TrainConfig& config);

void InitializeParameters(Model& model, Rng& rng);

// Draws from N(mean, stddev) rejecting samples beyond two deviations.
double TruncatedNormal(Rng& rng, double mean, double stddev);

struct EpochLog {
  std::size_t epoch = 0;
  double mean_loss = 0.0;
  double seconds = 0.0;
  std::size_t batches = 0;
  std::optional<MetricBlock> probe;  // filtered value-prediction metrics
};

struct TrainResult {
  Model best;
  std::vector<EpochLog> log;
  std::size_t best_epoch = 0;
  double best_valid_mrr = 0.0;
  bool probed = false;
};

struct TrainHooks {
  // Called after each epoch (and its probe, if any).
  std::function<void(const EpochLog&)> on_epoch;
  // Called before each batch's forward pass.
  std::function<void(const Model&)> on_batch_start;
  // Called before every optimizer step with the model whose gradients have
  // just been populated; used by tests to inspect batch contents.
  std::function<void(const Model&, std::span<const LabeledFact>)> on_batch;
};

// Filtered value-prediction metrics over a seeded random subset of queries.
MetricBlock ProbeValueMrr(const std::vector<Fact>& facts, const Model& model,
                          const DatasetSplits& splits, std::size_t query_cap,
                          std::uint64_t seed, std::size_t workers);

// Grouped, ascending-arity training with one negative per positive and one
// Adam step per batch. The returned model is the best validation probe (the
// final model when no probe ran). Throws NumericalError on a non-finite loss.
TrainResult Train(const DatasetSplits& splits, const Vocabulary& vocab, const TrainConfig& config,
                  const TrainHooks& hooks = {});

// "epoch\tmean_loss\tseconds" plus "\tmrr\thits1\thits3\thits10" on probe epochs.
void WriteEpochLine(std::ostream& out, const EpochLog& log);

}  // namespace nalp

#endif  // NALP_TRAINING_HPP_
