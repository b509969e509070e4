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

#ifndef NALP_MODEL_HPP_
#define NALP_MODEL_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nalp/batchnorm.hpp"
#include "nalp/data.hpp"
#include "nalp/matrix.hpp"

namespace nalp {

enum class ModelMode { kNaLP, kTNaLP };
enum class PairEncoder { kConv, kPlus, kMul };
enum class TypePairing { kDiagonal, kCross };

struct ModelConfig {
  ModelMode mode = ModelMode::kNaLP;
  PairEncoder pair_encoder = PairEncoder::kConv;
  // Reduction over the pairwise relatedness vectors.
  Aggregator aggregator = Aggregator::kMin;
  TypePairing type_pairing = TypePairing::kDiagonal;
};

struct ModelDims {
  std::size_t num_roles = 0;
  std::size_t num_values = 0;
  std::size_t k = 0;       // role / value embedding width
  std::size_t n_f = 0;     // pair feature width (conv filters)
  std::size_t n_gfcn = 0;  // relatedness vector width
  std::size_t k_type = 0;  // type embedding width (tNaLP only)
  std::size_t n_tfcn = 0;  // type compatibility vector width (tNaLP only)
};

std::string_view ModeName(ModelMode m);
std::string_view EncoderName(PairEncoder e);
std::string_view AggregatorName(Aggregator a);
std::string_view PairingName(TypePairing p);
ModelMode ParseModelMode(std::string_view s);
PairEncoder ParsePairEncoder(std::string_view s);
Aggregator ParseAggregator(std::string_view s);
TypePairing ParseTypePairing(std::string_view s);

// Relatedness branch. The conv filters are stored as one 2k x n_f matrix:
// a bank of 1 x 2k filters slid over the m x 2k pair matrix is exactly the
// product (m x 2k) * (2k x n_f). `conv` is empty for the plus / mul encoders.
struct NaLPParams {
  ParamTensor role_emb;   // |R| x k
  ParamTensor value_emb;  // |V| x k
  ParamTensor conv;       // 2k x n_f
  BatchNorm bn;           // n_f channels
  ParamTensor g_weight;   // 2n_f x n_gFCN
  ParamTensor g_bias;     // 1 x n_gFCN
  ParamTensor f_weight;   // n_gFCN x 1
  ParamTensor f_bias;     // 1 x 1
};

// Type compatibility branch.
struct TypeParams {
  ParamTensor role_type;   // |R| x k'
  ParamTensor value_type;  // |V| x k'
  ParamTensor t_weight;    // 2k' x n_tFCN
  ParamTensor t_bias;      // 1 x n_tFCN
  ParamTensor y_weight;    // n_tFCN x 1
  ParamTensor y_bias;      // 1 x 1
};

struct LabeledFact {
  Fact fact;
  int label = 1;  // +1 valid, -1 corrupted
};

struct FactScore {
  double base = 0.0;  // s0
  double type = 0.0;  // s_t, tNaLP only
  double score = 0.0;
};

// log(1 + exp(x)) without overflow.
double Softplus(double x);
// Per-fact loss log(1 + exp(-label * score)).
double FactLoss(double score, int label);

class Model {
 public:
  // Allocates zero-valued parameters (batchnorm gamma = 1). Use
  // InitializeParameters to draw the training initialization.
  Model(const ModelConfig& config, const ModelDims& dims);

  const ModelConfig& config() const { return config_; }
  const ModelDims& dims() const { return dims_; }
  NaLPParams& params() { return params_; }
  const NaLPParams& params() const { return params_; }
  bool has_type_branch() const { return type_.has_value(); }
  TypeParams& type_params();
  const TypeParams& type_params() const;

  // Every learnable tensor, in checkpoint order.
  std::vector<ParamTensor*> Parameters();
  std::vector<const ParamTensor*> Parameters() const;

  // Eval-mode (running batchnorm statistics) forward passes.
  Matrix PairEmbed(const Fact& f) const;
  std::vector<double> Relatedness(const Fact& f) const;
  std::vector<double> TypeCompatibility(const Fact& f) const;
  FactScore ScoreDetail(const Fact& f) const;
  double Score(const Fact& f) const { return ScoreDetail(f).score; }

  // Summed loss over a batch; facts share batchnorm statistics in train
  // mode. Does not touch gradients or running statistics.
  double Loss(std::span<const LabeledFact> batch, BnMode mode) const;

  // Same loss, accumulating gradients into every touched ParamTensor. In
  // train mode the batchnorm running statistics are updated afterwards
  // unless `update_running_stats` is false.
  double LossAndGrads(std::span<const LabeledFact> batch, BnMode mode,
                      bool update_running_stats = true);

  void ZeroGrads();
  bool GradsAreZero() const;
  void CheckFact(const Fact& f) const;

 private:
  ModelConfig config_;
  ModelDims dims_;
  NaLPParams params_;
  std::optional<TypeParams> type_;
};

// Pair feature row of one (role, value) under eval-mode batchnorm: the
// pre-activation is role_emb * conv_top + value_emb * conv_bottom for the
// conv encoder, role (+|*) value otherwise.
std::vector<double> PairFeature(const Model& model, RoleId role, ValueId value);

// Free-function views of the forward pieces (eval-mode batchnorm).
Matrix PairEmbed(const Fact& f, const Model& model);
// Pairwise relatedness reduced over every ordered pair (i, j), i == j included.
std::vector<double> RelatednessVector(const Matrix& pair_embeddings, const NaLPParams& p,
                                      Aggregator aggregator = Aggregator::kMin);
double ScoreBase(std::span<const double> relatedness, const NaLPParams& p);
std::vector<double> TypeCompatVector(const Fact& f, const TypeParams& t, TypePairing pairing);
double TypeScore(std::span<const double> compat, const TypeParams& t);
// emax / emean replacements for the relatedness minimum.
SetAggregate AblationAggregate(const Matrix& vectors, Aggregator variant);

// Scores every substitution at one position of a fact, reusing the pair
// features of the unchanged positions. Bitwise identical to Model::Score on
// each substituted fact. Safe for concurrent use once constructed.
class CandidateScorer {
 public:
  explicit CandidateScorer(const Model& model);

  enum class Target { kRole, kValue };

  const Model& model() const { return model_; }

  // Scores `base` with pair `position` replaced by each candidate id.
  std::vector<double> ScoreSubstitutions(const Fact& base, std::size_t position,
                                         Target target,
                                         std::span<const std::uint32_t> candidates) const;

  // Relatedness vectors for the same substitutions.
  std::vector<std::vector<double>> RelatednessSubstitutions(
      const Fact& base, std::size_t position, Target target,
      std::span<const std::uint32_t> candidates) const;

 private:
  std::vector<double> Feature(RoleId role, ValueId value) const;

  const Model& model_;
  Matrix role_proj_;   // role_emb * conv_top, conv only
  Matrix value_proj_;  // value_emb * conv_bottom, conv only
};

struct ParamFlopReport {
  std::uint64_t parameters = 0;
  std::uint64_t type_parameters = 0;  // included in `parameters`
  // Forward multiply-adds for one fact of the reference arity, counting the
  // relatedness layer over all m^2 concatenated pairs.
  std::uint64_t flops = 0;
};

ParamFlopReport CountParamsFlops(const ModelConfig& config, const ModelDims& dims,
                                 std::size_t reference_arity);

}  // namespace nalp

#endif  // NALP_MODEL_HPP_
