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

#include "nalp/training.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>
#include <string>

#include "nalp/errors.hpp"

namespace nalp {

namespace {

void FillUniform(Matrix& m, double limit, Rng& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (double& v : m.data()) v = dist(rng);
}

void FillGlorot(Matrix& m, Rng& rng) {
  FillUniform(m, std::sqrt(6.0 / static_cast<double>(m.rows() + m.cols())), rng);
}

}  // namespace

void TrainConfig::Validate() const {
  if (k == 0 || n_f == 0 || n_gfcn == 0 || batch_size == 0 || max_epochs == 0) {
    throw ConfigError("k, n_f, n_gFCN, batch size and max epochs must be positive");
  }
  if (model.mode == ModelMode::kTNaLP && (k_type == 0 || n_tfcn == 0)) {
    throw ConfigError("tNaLP needs positive k' and n_tFCN");
  }
  if (model.pair_encoder != PairEncoder::kConv && n_f != k) {
    throw ConfigError("plus and mul pair encoders need n_f equal to k");
  }
  if (!(learning_rate > 0.0)) throw ConfigError("learning rate must be positive");
  sampler.Validate();
}

ModelDims TrainConfig::Dims(const Vocabulary& vocab) const {
  ModelDims d;
  d.num_roles = vocab.num_roles();
  d.num_values = vocab.num_values();
  d.k = k;
  d.n_f = n_f;
  d.n_gfcn = n_gfcn;
  if (model.mode == ModelMode::kTNaLP) {
    d.k_type = k_type;
    d.n_tfcn = n_tfcn;
  }
  return d;
}

void ApplyVariant(std::string_view variant, TrainConfig* config) {
  const bool mixed = !variant.empty() && variant.back() == '+';
  if (mixed) variant.remove_suffix(1);
  if (variant == "nalp") {
    config->model.mode = ModelMode::kNaLP;
  } else if (variant == "tnalp") {
    config->model.mode = ModelMode::kTNaLP;
  } else {
    throw ConfigError("unknown model variant '" + std::string(variant) +
                      "' (expected nalp, tnalp, nalp+ or tnalp+)");
  }
  config->sampler.mechanism = mixed ? NegativeMechanism::kMixed : NegativeMechanism::kConventional;
}

std::string VariantName(const TrainConfig& config) {
  std::string name(ModeName(config.model.mode));
  if (config.sampler.mechanism == NegativeMechanism::kMixed) name += '+';
  return name;
}

double TruncatedNormal(Rng& rng, double mean, double stddev) {
  std::normal_distribution<double> dist(mean, stddev);
  while (true) {
    const double x = dist(rng);
    if (std::abs(x - mean) <= 2.0 * stddev) return x;
  }
}

void InitializeParameters(Model& model, Rng& rng) {
  NaLPParams& p = model.params();
  const double emb_limit = 1.0 / std::sqrt(static_cast<double>(model.dims().k));
  FillUniform(p.role_emb.value, emb_limit, rng);
  FillUniform(p.value_emb.value, emb_limit, rng);
  for (double& v : p.conv.value.data()) v = TruncatedNormal(rng, 0.0, 0.1);
  p.bn.gamma.value.Fill(1.0);
  p.bn.beta.value.Fill(0.0);
  std::fill(p.bn.running_mean.begin(), p.bn.running_mean.end(), 0.0);
  std::fill(p.bn.running_var.begin(), p.bn.running_var.end(), 1.0);
  FillGlorot(p.g_weight.value, rng);
  p.g_bias.value.Fill(0.0);
  FillGlorot(p.f_weight.value, rng);
  p.f_bias.value.Fill(0.0);
  if (model.has_type_branch()) {
    TypeParams& t = model.type_params();
    const double type_limit = 1.0 / std::sqrt(static_cast<double>(model.dims().k_type));
    FillUniform(t.role_type.value, type_limit, rng);
    FillUniform(t.value_type.value, type_limit, rng);
    FillGlorot(t.t_weight.value, rng);
    t.t_bias.value.Fill(0.0);
    FillGlorot(t.y_weight.value, rng);
    t.y_bias.value.Fill(0.0);
  }
}

MetricBlock ProbeValueMrr(const std::vector<Fact>& facts, const Model& model,
                          const DatasetSplits& splits, std::size_t query_cap,
                          std::uint64_t seed, std::size_t workers) {
  const TaskKind tasks[] = {TaskKind::kValue};
  std::vector<RankQuery> queries = BuildQueries(facts, tasks);
  if (query_cap > 0 && queries.size() > query_cap) {
    std::vector<std::size_t> order(queries.size());
    std::iota(order.begin(), order.end(), 0);
    Rng rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    order.resize(query_cap);
    std::sort(order.begin(), order.end());
    std::vector<RankQuery> subset;
    subset.reserve(query_cap);
    for (std::size_t i : order) subset.push_back(std::move(queries[i]));
    queries = std::move(subset);
  }
  const auto ranks = RankQueries(queries, model, splits, TieMode::kOptimistic, workers);
  std::vector<QueryRank> stored;
  for (std::size_t i = 0; i < queries.size(); ++i)
    stored.push_back({TaskKind::kValue, queries[i].fact.arity(), ranks[i]});
  return SummarizeRanks(std::move(stored)).Get(TaskKind::kValue, Category::kOverall);
}

TrainResult Train(const DatasetSplits& splits, const Vocabulary& vocab, const TrainConfig& config,
                  const TrainHooks& hooks) {
  config.Validate();
  if (splits.train.empty()) throw DataError("training split is empty");
  Rng rng(config.seed);
  Model model(config.model, config.Dims(vocab));
  InitializeParameters(model, rng);

  const std::vector<ArityGroup> groups = GroupByArity(splits.train);
  const NegativeSampler sampler(vocab, splits, config.sampler);
  const std::uint64_t probe_seed = config.seed ^ 0x5eed5eed5eedULL;

  TrainResult result{model, {}, 0, 0.0, false};
  std::size_t stale_probes = 0;
  std::vector<LabeledFact> batch;
  for (std::size_t epoch = 1; epoch <= config.max_epochs; ++epoch) {
    const auto start = std::chrono::steady_clock::now();
    double total_loss = 0.0;
    std::size_t scored = 0;
    EpochLog log;
    log.epoch = epoch;
    for (const ArityGroup& group : groups) {
      std::vector<std::size_t> order(group.facts.size());
      std::iota(order.begin(), order.end(), 0);
      std::shuffle(order.begin(), order.end(), rng);
      for (std::size_t begin = 0; begin < order.size(); begin += config.batch_size) {
        const std::size_t end = std::min(order.size(), begin + config.batch_size);
        batch.clear();
        for (std::size_t i = begin; i < end; ++i) batch.push_back({group.facts[order[i]], 1});
        for (std::size_t i = begin; i < end; ++i)
          batch.push_back({sampler.Corrupt(group.facts[order[i]], rng), -1});
        if (hooks.on_batch_start) hooks.on_batch_start(model);
        const double loss = model.LossAndGrads(batch, BnMode::kTrain);
        if (!std::isfinite(loss)) {
          std::ostringstream msg;
          msg << "non-finite loss at epoch " << epoch << ", batch " << log.batches
              << " (arity " << group.arity << ", " << batch.size()
              << " facts), learning rate " << config.learning_rate;
          throw NumericalError(msg.str());
        }
        if (hooks.on_batch) hooks.on_batch(model, batch);
        for (ParamTensor* p : model.Parameters()) AdamStep(*p, config.learning_rate);
        total_loss += loss;
        scored += batch.size();
        ++log.batches;
      }
    }
    log.mean_loss = total_loss / static_cast<double>(scored);
    log.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const bool probe_due = config.eval_every > 0 && !splits.valid.empty() &&
                           (epoch % config.eval_every == 0 || epoch == config.max_epochs);
    bool stop = false;
    if (probe_due) {
      log.probe = ProbeValueMrr(splits.valid, model, splits, config.valid_query_cap, probe_seed,
                                config.workers);
      if (!result.probed || log.probe->mrr > result.best_valid_mrr) {
        result.best = model;
        result.best_valid_mrr = log.probe->mrr;
        result.best_epoch = epoch;
        result.probed = true;
        stale_probes = 0;
      } else if (++stale_probes >= config.patience) {
        stop = true;
      }
    }
    result.log.push_back(log);
    if (hooks.on_epoch) hooks.on_epoch(log);
    if (stop) break;
  }
  if (!result.probed) {
    result.best = model;
    result.best_epoch = result.log.size();
  }
  return result;
}

void WriteEpochLine(std::ostream& out, const EpochLog& log) {
  char buf[160];
  std::snprintf(buf, sizeof(buf), "%zu\t%.6f\t%.3f", log.epoch, log.mean_loss, log.seconds);
  out << buf;
  if (log.probe) {
    std::snprintf(buf, sizeof(buf), "\t%.6f\t%.6f\t%.6f\t%.6f", log.probe->mrr,
                  log.probe->hits1, log.probe->hits3, log.probe->hits10);
    out << buf;
  }
  out << '\n';
}

}  // namespace nalp
