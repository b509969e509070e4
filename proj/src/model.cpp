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

#include "nalp/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nalp/errors.hpp"

namespace nalp {

namespace {

// out = x * w[row_begin : row_begin + x.size(), :], accumulated over x in
// ascending order. Every eval-mode projection goes through this so that
// cached and uncached paths round identically.
void RowTimesBlock(std::span<const double> x, const Matrix& w, std::size_t row_begin,
                   std::span<double> out) {
  std::fill(out.begin(), out.end(), 0.0);
  const std::size_t n = w.cols();
  for (std::size_t p = 0; p < x.size(); ++p) {
    const double xp = x[p];
    if (xp == 0.0) continue;
    const double* w_row = w.row(row_begin + p).data();
    for (std::size_t j = 0; j < n; ++j) out[j] += xp * w_row[j];
  }
}

// x * w[row_begin : row_begin + x.cols(), :]
Matrix MatMulRows(const Matrix& x, const Matrix& w, std::size_t row_begin) {
  Matrix out(x.rows(), w.cols());
  for (std::size_t i = 0; i < x.rows(); ++i) RowTimesBlock(x.row(i), w, row_begin, out.row(i));
  return out;
}

// w_grad[row_begin + p, :] += sum_i x[i, p] * dy[i, :]
void AccumulateTransposeA(const Matrix& x, const Matrix& dy, Matrix& w_grad,
                          std::size_t row_begin) {
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const double* dy_row = dy.row(i).data();
    for (std::size_t p = 0; p < x.cols(); ++p) {
      const double xip = x(i, p);
      if (xip == 0.0) continue;
      double* g_row = w_grad.row(row_begin + p).data();
      for (std::size_t j = 0; j < dy.cols(); ++j) g_row[j] += xip * dy_row[j];
    }
  }
}

// dy * w[row_begin : row_begin + width, :]^T
Matrix MatMulRowsTransposeB(const Matrix& dy, const Matrix& w, std::size_t row_begin,
                            std::size_t width) {
  Matrix out(dy.rows(), width);
  for (std::size_t i = 0; i < dy.rows(); ++i)
    for (std::size_t p = 0; p < width; ++p) {
      const double* w_row = w.row(row_begin + p).data();
      double acc = 0.0;
      for (std::size_t j = 0; j < dy.cols(); ++j) acc += dy(i, j) * w_row[j];
      out(i, p) = acc;
    }
  return out;
}

double Dot(std::span<const double> a, const Matrix& column) {
  double acc = 0.0;
  for (std::size_t t = 0; t < a.size(); ++t) acc += a[t] * column[t];
  return acc;
}

double Sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

// Reduces relu(left[i] + right[j] + bias) over (i, j) in row-major order, or
// over i == j only when `diagonal` is set.
std::vector<double> ReducePairs(const std::vector<std::vector<double>>& left,
                                const std::vector<std::vector<double>>& right,
                                const Matrix& bias, Aggregator kind, bool diagonal) {
  const std::size_t d = bias.cols();
  const std::size_t m = left.size();
  std::vector<double> acc(d, 0.0);
  bool first = true;
  std::size_t count = 0;
  auto visit = [&](std::size_t i, std::size_t j) {
    ++count;
    for (std::size_t t = 0; t < d; ++t) {
      double v = left[i][t] + right[j][t] + bias[t];
      v = v > 0.0 ? v : 0.0;
      if (first) {
        acc[t] = v;
      } else if (kind == Aggregator::kMin) {
        if (v < acc[t]) acc[t] = v;
      } else if (kind == Aggregator::kMax) {
        if (v > acc[t]) acc[t] = v;
      } else {
        acc[t] += v;
      }
    }
    first = false;
  };
  if (diagonal) {
    for (std::size_t i = 0; i < m; ++i) visit(i, i);
  } else {
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) visit(i, j);
  }
  if (kind == Aggregator::kMean) {
    const double inv = 1.0 / static_cast<double>(count);
    for (double& v : acc) v *= inv;
  }
  return acc;
}

void ScatterRows(const Matrix& grads, std::span<const std::uint32_t> ids, ParamTensor& table) {
  for (std::size_t i = 0; i < ids.size(); ++i) {
    auto dst = table.grad.row(ids[i]);
    auto src = grads.row(i);
    for (std::size_t j = 0; j < dst.size(); ++j) dst[j] += src[j];
    table.TouchRow(ids[i]);
  }
}

}  // namespace

std::string_view ModeName(ModelMode m) { return m == ModelMode::kNaLP ? "nalp" : "tnalp"; }

std::string_view EncoderName(PairEncoder e) {
  switch (e) {
    case PairEncoder::kConv: return "conv";
    case PairEncoder::kPlus: return "plus";
    case PairEncoder::kMul: return "mul";
  }
  return "conv";
}

std::string_view AggregatorName(Aggregator a) {
  switch (a) {
    case Aggregator::kMin: return "min";
    case Aggregator::kMax: return "emax";
    case Aggregator::kMean: return "emean";
  }
  return "min";
}

std::string_view PairingName(TypePairing p) {
  return p == TypePairing::kDiagonal ? "diagonal" : "cross";
}

ModelMode ParseModelMode(std::string_view s) {
  if (s == "nalp") return ModelMode::kNaLP;
  if (s == "tnalp") return ModelMode::kTNaLP;
  throw ConfigError("unknown model mode '" + std::string(s) + "'");
}

PairEncoder ParsePairEncoder(std::string_view s) {
  if (s == "conv") return PairEncoder::kConv;
  if (s == "plus") return PairEncoder::kPlus;
  if (s == "mul") return PairEncoder::kMul;
  throw ConfigError("unknown pair encoder '" + std::string(s) + "'");
}

Aggregator ParseAggregator(std::string_view s) {
  if (s == "min") return Aggregator::kMin;
  if (s == "emax") return Aggregator::kMax;
  if (s == "emean") return Aggregator::kMean;
  throw ConfigError("unknown aggregator '" + std::string(s) + "'");
}

TypePairing ParseTypePairing(std::string_view s) {
  if (s == "diagonal") return TypePairing::kDiagonal;
  if (s == "cross") return TypePairing::kCross;
  throw ConfigError("unknown type pairing '" + std::string(s) + "'");
}

double Softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

double FactLoss(double score, int label) {
  return Softplus(-static_cast<double>(label) * score);
}

Model::Model(const ModelConfig& config, const ModelDims& dims) : config_(config), dims_(dims) {
  if (dims.num_roles == 0 || dims.num_values == 0) {
    throw ConfigError("model needs at least one role and one value");
  }
  if (dims.k == 0 || dims.n_f == 0 || dims.n_gfcn == 0) {
    throw ConfigError("k, n_f and n_gFCN must be positive");
  }
  if (config.pair_encoder != PairEncoder::kConv && dims.n_f != dims.k) {
    throw ConfigError("plus/mul pair encoders require n_f == k (got n_f=" +
                      std::to_string(dims.n_f) + ", k=" + std::to_string(dims.k) + ")");
  }
  params_.role_emb = ParamTensor("role_emb", dims.num_roles, dims.k, true);
  params_.value_emb = ParamTensor("value_emb", dims.num_values, dims.k, true);
  if (config.pair_encoder == PairEncoder::kConv) {
    params_.conv = ParamTensor("conv", 2 * dims.k, dims.n_f);
  }
  params_.bn = BatchNorm(dims.n_f);
  params_.g_weight = ParamTensor("g_weight", 2 * dims.n_f, dims.n_gfcn);
  params_.g_bias = ParamTensor("g_bias", 1, dims.n_gfcn);
  params_.f_weight = ParamTensor("f_weight", dims.n_gfcn, 1);
  params_.f_bias = ParamTensor("f_bias", 1, 1);
  if (config.mode == ModelMode::kTNaLP) {
    if (dims.k_type == 0 || dims.n_tfcn == 0) {
      throw ConfigError("tNaLP requires positive k' and n_tFCN");
    }
    TypeParams t;
    t.role_type = ParamTensor("role_type", dims.num_roles, dims.k_type, true);
    t.value_type = ParamTensor("value_type", dims.num_values, dims.k_type, true);
    t.t_weight = ParamTensor("t_weight", 2 * dims.k_type, dims.n_tfcn);
    t.t_bias = ParamTensor("t_bias", 1, dims.n_tfcn);
    t.y_weight = ParamTensor("y_weight", dims.n_tfcn, 1);
    t.y_bias = ParamTensor("y_bias", 1, 1);
    type_ = std::move(t);
  }
}

TypeParams& Model::type_params() {
  if (!type_) throw ConfigError("model has no type branch (NaLP mode)");
  return *type_;
}

const TypeParams& Model::type_params() const {
  if (!type_) throw ConfigError("model has no type branch (NaLP mode)");
  return *type_;
}

std::vector<ParamTensor*> Model::Parameters() {
  std::vector<ParamTensor*> out = {&params_.role_emb, &params_.value_emb};
  if (config_.pair_encoder == PairEncoder::kConv) out.push_back(&params_.conv);
  out.insert(out.end(), {&params_.bn.gamma, &params_.bn.beta, &params_.g_weight,
                         &params_.g_bias, &params_.f_weight, &params_.f_bias});
  if (type_) {
    out.insert(out.end(), {&type_->role_type, &type_->value_type, &type_->t_weight,
                           &type_->t_bias, &type_->y_weight, &type_->y_bias});
  }
  return out;
}

std::vector<const ParamTensor*> Model::Parameters() const {
  auto mutable_params = const_cast<Model*>(this)->Parameters();
  return {mutable_params.begin(), mutable_params.end()};
}

void Model::ZeroGrads() {
  for (ParamTensor* p : Parameters()) p->ZeroGrad();
}

bool Model::GradsAreZero() const {
  for (const ParamTensor* p : Parameters())
    if (!p->GradIsZero()) return false;
  return true;
}

void Model::CheckFact(const Fact& f) const {
  if (f.arity() == 0) throw DataError("fact has no pairs");
  for (const Pair& p : f.pairs) {
    if (p.role >= dims_.num_roles || p.value >= dims_.num_values) {
      throw DataError("pair (" + std::to_string(p.role) + ", " + std::to_string(p.value) +
                      ") outside vocabulary of " + std::to_string(dims_.num_roles) +
                      " roles / " + std::to_string(dims_.num_values) + " values");
    }
  }
}

std::vector<double> PairFeature(const Model& model, RoleId role, ValueId value) {
  const NaLPParams& p = model.params();
  const std::size_t k = model.dims().k;
  std::vector<double> z(model.dims().n_f);
  auto role_row = p.role_emb.value.row(role);
  auto value_row = p.value_emb.value.row(value);
  switch (model.config().pair_encoder) {
    case PairEncoder::kConv: {
      std::vector<double> value_part(z.size());
      RowTimesBlock(role_row, p.conv.value, 0, z);
      RowTimesBlock(value_row, p.conv.value, k, value_part);
      for (std::size_t j = 0; j < z.size(); ++j) z[j] += value_part[j];
      break;
    }
    case PairEncoder::kPlus:
      for (std::size_t j = 0; j < k; ++j) z[j] = role_row[j] + value_row[j];
      break;
    case PairEncoder::kMul:
      for (std::size_t j = 0; j < k; ++j) z[j] = role_row[j] * value_row[j];
      break;
  }
  p.bn.NormalizeRowEval(z);
  for (double& v : z) v = v > 0.0 ? v : 0.0;
  return z;
}

namespace {

struct ProjectedRows {
  std::vector<std::vector<double>> left;
  std::vector<std::vector<double>> right;
};

ProjectedRows ProjectFeatures(const std::vector<std::vector<double>>& features,
                              const NaLPParams& p) {
  const std::size_t n_f = p.bn.channels();
  ProjectedRows out;
  for (const auto& h : features) {
    std::vector<double> a(p.g_weight.value.cols());
    std::vector<double> b(a.size());
    RowTimesBlock(h, p.g_weight.value, 0, a);
    RowTimesBlock(h, p.g_weight.value, n_f, b);
    out.left.push_back(std::move(a));
    out.right.push_back(std::move(b));
  }
  return out;
}

ProjectedRows ProjectTypes(const Fact& f, const TypeParams& t) {
  const std::size_t kt = t.role_type.value.cols();
  ProjectedRows out;
  for (const Pair& pr : f.pairs) {
    std::vector<double> u(t.t_weight.value.cols());
    std::vector<double> w(u.size());
    RowTimesBlock(t.role_type.value.row(pr.role), t.t_weight.value, 0, u);
    RowTimesBlock(t.value_type.value.row(pr.value), t.t_weight.value, kt, w);
    out.left.push_back(std::move(u));
    out.right.push_back(std::move(w));
  }
  return out;
}

FactScore CombineScores(const Model& model, const std::vector<double>& relatedness,
                        const ProjectedRows* types) {
  FactScore s;
  s.base = ScoreBase(relatedness, model.params());
  s.score = s.base;
  if (model.config().mode == ModelMode::kTNaLP) {
    const TypeParams& t = model.type_params();
    const std::vector<double> compat =
        ReducePairs(types->left, types->right, t.t_bias.value, Aggregator::kMin,
                    model.config().type_pairing == TypePairing::kDiagonal);
    s.type = TypeScore(compat, t);
    s.score = s.base <= s.type ? s.base : s.type;
  }
  return s;
}

}  // namespace

Matrix Model::PairEmbed(const Fact& f) const {
  CheckFact(f);
  Matrix out(f.arity(), dims_.n_f);
  for (std::size_t i = 0; i < f.arity(); ++i) {
    auto h = PairFeature(*this, f.pairs[i].role, f.pairs[i].value);
    std::copy(h.begin(), h.end(), out.row(i).begin());
  }
  return out;
}

std::vector<double> Model::Relatedness(const Fact& f) const {
  CheckFact(f);
  std::vector<std::vector<double>> features;
  for (const Pair& p : f.pairs) features.push_back(PairFeature(*this, p.role, p.value));
  ProjectedRows rows = ProjectFeatures(features, params_);
  return ReducePairs(rows.left, rows.right, params_.g_bias.value, config_.aggregator, false);
}

std::vector<double> Model::TypeCompatibility(const Fact& f) const {
  CheckFact(f);
  return TypeCompatVector(f, type_params(), config_.type_pairing);
}

FactScore Model::ScoreDetail(const Fact& f) const {
  const std::vector<double> relatedness = Relatedness(f);
  if (config_.mode == ModelMode::kTNaLP) {
    const ProjectedRows types = ProjectTypes(f, *type_);
    return CombineScores(*this, relatedness, &types);
  }
  return CombineScores(*this, relatedness, nullptr);
}

Matrix PairEmbed(const Fact& f, const Model& model) { return model.PairEmbed(f); }

std::vector<double> RelatednessVector(const Matrix& pair_embeddings, const NaLPParams& p,
                                      Aggregator aggregator) {
  if (pair_embeddings.rows() == 0) throw InvalidInputError("relatedness: no pair rows");
  std::vector<std::vector<double>> features;
  for (std::size_t i = 0; i < pair_embeddings.rows(); ++i) {
    auto r = pair_embeddings.row(i);
    features.emplace_back(r.begin(), r.end());
  }
  ProjectedRows rows = ProjectFeatures(features, p);
  return ReducePairs(rows.left, rows.right, p.g_bias.value, aggregator, false);
}

double ScoreBase(std::span<const double> relatedness, const NaLPParams& p) {
  return Dot(relatedness, p.f_weight.value) + p.f_bias.value[0];
}

std::vector<double> TypeCompatVector(const Fact& f, const TypeParams& t, TypePairing pairing) {
  const ProjectedRows rows = ProjectTypes(f, t);
  return ReducePairs(rows.left, rows.right, t.t_bias.value, Aggregator::kMin,
                     pairing == TypePairing::kDiagonal);
}

double TypeScore(std::span<const double> compat, const TypeParams& t) {
  return Dot(compat, t.y_weight.value) + t.y_bias.value[0];
}

SetAggregate AblationAggregate(const Matrix& vectors, Aggregator variant) {
  if (variant == Aggregator::kMin) {
    throw ConfigError("ablation aggregate expects emax or emean");
  }
  return Aggregate(vectors, variant);
}

// ---------------------------------------------------------------------------
// Batched training forward / backward.

namespace {

struct GradTargets {
  NaLPParams* nalp = nullptr;
  TypeParams* type = nullptr;
};

struct BatchResult {
  double loss = 0.0;
  BatchNorm::Cache bn_cache;
};

BatchResult RunBatchImpl(const Model& model, std::span<const LabeledFact> batch, BnMode mode,
                         const GradTargets* grads) {
  if (batch.empty()) throw InvalidInputError("empty batch");
  const ModelConfig& cfg = model.config();
  const ModelDims& dims = model.dims();
  const NaLPParams& p = model.params();
  const std::size_t k = dims.k;
  const std::size_t n_f = dims.n_f;
  const std::size_t n_g = dims.n_gfcn;

  std::size_t total_rows = 0;
  for (const LabeledFact& lf : batch) {
    model.CheckFact(lf.fact);
    if (lf.label != 1 && lf.label != -1) throw InvalidInputError("labels must be +1 or -1");
    total_rows += lf.fact.arity();
  }

  std::vector<std::uint32_t> role_ids;
  std::vector<std::uint32_t> value_ids;
  role_ids.reserve(total_rows);
  value_ids.reserve(total_rows);
  for (const LabeledFact& lf : batch)
    for (const Pair& pr : lf.fact.pairs) {
      role_ids.push_back(pr.role);
      value_ids.push_back(pr.value);
    }

  Matrix role_rows(total_rows, k);
  Matrix value_rows(total_rows, k);
  for (std::size_t i = 0; i < total_rows; ++i) {
    auto r = p.role_emb.value.row(role_ids[i]);
    auto v = p.value_emb.value.row(value_ids[i]);
    std::copy(r.begin(), r.end(), role_rows.row(i).begin());
    std::copy(v.begin(), v.end(), value_rows.row(i).begin());
  }

  Matrix preact(total_rows, n_f);
  switch (cfg.pair_encoder) {
    case PairEncoder::kConv:
      preact = MatMulRows(role_rows, p.conv.value, 0);
      AddInPlace(preact, MatMulRows(value_rows, p.conv.value, k));
      break;
    case PairEncoder::kPlus:
      preact = role_rows;
      AddInPlace(preact, value_rows);
      break;
    case PairEncoder::kMul:
      for (std::size_t i = 0; i < preact.size(); ++i) preact[i] = role_rows[i] * value_rows[i];
      break;
  }

  BatchResult result;
  const Matrix normalized = p.bn.Forward(preact, mode, &result.bn_cache);
  const Matrix features = Relu(normalized);
  Matrix d_features(total_rows, n_f);

  const bool typed = cfg.mode == ModelMode::kTNaLP;
  const TypeParams* t = typed ? &model.type_params() : nullptr;
  const std::size_t kt = dims.k_type;
  const bool diagonal = cfg.type_pairing == TypePairing::kDiagonal;

  std::size_t offset = 0;
  for (const LabeledFact& lf : batch) {
    const std::size_t m = lf.fact.arity();
    Matrix h(m, n_f);
    for (std::size_t i = 0; i < m; ++i) {
      auto src = features.row(offset + i);
      std::copy(src.begin(), src.end(), h.row(i).begin());
    }
    const Matrix a = MatMulRows(h, p.g_weight.value, 0);
    const Matrix b = MatMulRows(h, p.g_weight.value, n_f);
    Matrix pair_pre(m * m, n_g);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) {
        auto out = pair_pre.row(i * m + j);
        for (std::size_t c = 0; c < n_g; ++c) out[c] = a(i, c) + b(j, c) + p.g_bias.value[c];
      }
    const Matrix pair_act = Relu(pair_pre);
    const SetAggregate relatedness = Aggregate(pair_act, cfg.aggregator);
    const double s0 = ScoreBase(relatedness.value, p);

    double st = 0.0;
    Matrix type_pre;
    SetAggregate compat;
    Matrix role_type_rows;
    Matrix value_type_rows;
    if (typed) {
      role_type_rows = Matrix(m, kt);
      value_type_rows = Matrix(m, kt);
      for (std::size_t i = 0; i < m; ++i) {
        auto r = t->role_type.value.row(lf.fact.pairs[i].role);
        auto v = t->value_type.value.row(lf.fact.pairs[i].value);
        std::copy(r.begin(), r.end(), role_type_rows.row(i).begin());
        std::copy(v.begin(), v.end(), value_type_rows.row(i).begin());
      }
      const Matrix u = MatMulRows(role_type_rows, t->t_weight.value, 0);
      const Matrix w = MatMulRows(value_type_rows, t->t_weight.value, kt);
      const std::size_t n_t = dims.n_tfcn;
      type_pre = Matrix(diagonal ? m : m * m, n_t);
      for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
          if (diagonal && i != j) continue;
          auto out = type_pre.row(diagonal ? i : i * m + j);
          for (std::size_t c = 0; c < n_t; ++c) out[c] = u(i, c) + w(j, c) + t->t_bias.value[c];
        }
      compat = Aggregate(Relu(type_pre), Aggregator::kMin);
      st = TypeScore(compat.value, *t);
    }
    const bool base_wins = !typed || s0 <= st;
    const double s = base_wins ? s0 : st;
    const double y = static_cast<double>(lf.label);
    result.loss += FactLoss(s, lf.label);

    if (grads != nullptr) {
      const double ds = -y * Sigmoid(-y * s);
      NaLPParams& gp = *grads->nalp;
      if (base_wins) {
        const double ds0 = ds;
        std::vector<double> d_rel(n_g);
        for (std::size_t c = 0; c < n_g; ++c) {
          gp.f_weight.grad[c] += relatedness.value[c] * ds0;
          d_rel[c] = p.f_weight.value[c] * ds0;
        }
        gp.f_bias.grad[0] += ds0;
        const Matrix d_pair_act = AggregateBackward(relatedness, cfg.aggregator, m * m, d_rel);
        const Matrix d_pair_pre = ReluBackward(pair_pre, d_pair_act);
        Matrix da(m, n_g);
        Matrix db(m, n_g);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) {
            auto g = d_pair_pre.row(i * m + j);
            for (std::size_t c = 0; c < n_g; ++c) {
              da(i, c) += g[c];
              db(j, c) += g[c];
              gp.g_bias.grad[c] += g[c];
            }
          }
        AccumulateTransposeA(h, da, gp.g_weight.grad, 0);
        AccumulateTransposeA(h, db, gp.g_weight.grad, n_f);
        Matrix dh = MatMulRowsTransposeB(da, p.g_weight.value, 0, n_f);
        AddInPlace(dh, MatMulRowsTransposeB(db, p.g_weight.value, n_f, n_f));
        for (std::size_t i = 0; i < m; ++i) {
          auto dst = d_features.row(offset + i);
          auto src = dh.row(i);
          for (std::size_t c = 0; c < n_f; ++c) dst[c] += src[c];
        }
      } else {
        TypeParams& gt = *grads->type;
        const double dst_score = ds;
        const std::size_t n_t = dims.n_tfcn;
        std::vector<double> d_compat(n_t);
        for (std::size_t c = 0; c < n_t; ++c) {
          gt.y_weight.grad[c] += compat.value[c] * dst_score;
          d_compat[c] = t->y_weight.value[c] * dst_score;
        }
        gt.y_bias.grad[0] += dst_score;
        const Matrix d_type_act =
            AggregateBackward(compat, Aggregator::kMin, type_pre.rows(), d_compat);
        const Matrix d_type_pre = ReluBackward(type_pre, d_type_act);
        Matrix du(m, n_t);
        Matrix dw(m, n_t);
        for (std::size_t i = 0; i < m; ++i)
          for (std::size_t j = 0; j < m; ++j) {
            if (diagonal && i != j) continue;
            auto g = d_type_pre.row(diagonal ? i : i * m + j);
            for (std::size_t c = 0; c < n_t; ++c) {
              du(i, c) += g[c];
              dw(j, c) += g[c];
              gt.t_bias.grad[c] += g[c];
            }
          }
        AccumulateTransposeA(role_type_rows, du, gt.t_weight.grad, 0);
        AccumulateTransposeA(value_type_rows, dw, gt.t_weight.grad, kt);
        std::vector<std::uint32_t> fact_roles;
        std::vector<std::uint32_t> fact_values;
        for (const Pair& pr : lf.fact.pairs) {
          fact_roles.push_back(pr.role);
          fact_values.push_back(pr.value);
        }
        ScatterRows(MatMulRowsTransposeB(du, t->t_weight.value, 0, kt), fact_roles,
                    gt.role_type);
        ScatterRows(MatMulRowsTransposeB(dw, t->t_weight.value, kt, kt), fact_values,
                    gt.value_type);
      }
    }
    offset += m;
  }

  if (grads != nullptr) {
    NaLPParams& gp = *grads->nalp;
    const Matrix d_normalized = ReluBackward(normalized, d_features);
    const Matrix d_preact = gp.bn.Backward(result.bn_cache, d_normalized);
    Matrix d_role(total_rows, k);
    Matrix d_value(total_rows, k);
    switch (cfg.pair_encoder) {
      case PairEncoder::kConv:
        AccumulateTransposeA(role_rows, d_preact, gp.conv.grad, 0);
        AccumulateTransposeA(value_rows, d_preact, gp.conv.grad, k);
        d_role = MatMulRowsTransposeB(d_preact, p.conv.value, 0, k);
        d_value = MatMulRowsTransposeB(d_preact, p.conv.value, k, k);
        break;
      case PairEncoder::kPlus:
        d_role = d_preact;
        d_value = d_preact;
        break;
      case PairEncoder::kMul:
        for (std::size_t i = 0; i < d_preact.size(); ++i) {
          d_role[i] = d_preact[i] * value_rows[i];
          d_value[i] = d_preact[i] * role_rows[i];
        }
        break;
    }
    ScatterRows(d_role, role_ids, gp.role_emb);
    ScatterRows(d_value, value_ids, gp.value_emb);
  }
  return result;
}

}  // namespace

double Model::Loss(std::span<const LabeledFact> batch, BnMode mode) const {
  return RunBatchImpl(*this, batch, mode, nullptr).loss;
}

double Model::LossAndGrads(std::span<const LabeledFact> batch, BnMode mode,
                           bool update_running_stats) {
  GradTargets targets{&params_, type_ ? &*type_ : nullptr};
  BatchResult r = RunBatchImpl(*this, batch, mode, &targets);
  if (update_running_stats && mode == BnMode::kTrain) params_.bn.UpdateRunningStats(r.bn_cache);
  return r.loss;
}

// ---------------------------------------------------------------------------
// Candidate scoring.

CandidateScorer::CandidateScorer(const Model& model) : model_(model) {
  const NaLPParams& p = model.params();
  if (model.config().pair_encoder == PairEncoder::kConv) {
    const std::size_t k = model.dims().k;
    role_proj_ = MatMulRows(p.role_emb.value, p.conv.value, 0);
    value_proj_ = MatMulRows(p.value_emb.value, p.conv.value, k);
  }
}

std::vector<double> CandidateScorer::Feature(RoleId role, ValueId value) const {
  if (model_.config().pair_encoder != PairEncoder::kConv) {
    return PairFeature(model_, role, value);
  }
  std::vector<double> z(role_proj_.row(role).begin(), role_proj_.row(role).end());
  auto v = value_proj_.row(value);
  for (std::size_t j = 0; j < z.size(); ++j) z[j] += v[j];
  model_.params().bn.NormalizeRowEval(z);
  for (double& x : z) x = x > 0.0 ? x : 0.0;
  return z;
}

namespace {

Fact Substitute(const Fact& base, std::size_t position, CandidateScorer::Target target,
                std::uint32_t id) {
  Fact f = base;
  if (target == CandidateScorer::Target::kRole) {
    f.pairs[position].role = id;
  } else {
    f.pairs[position].value = id;
  }
  return f;
}

}  // namespace

std::vector<std::vector<double>> CandidateScorer::RelatednessSubstitutions(
    const Fact& base, std::size_t position, Target target,
    std::span<const std::uint32_t> candidates) const {
  model_.CheckFact(base);
  if (position >= base.arity()) throw InvalidInputError("position outside fact");
  const NaLPParams& p = model_.params();
  std::vector<std::vector<double>> fixed;
  for (const Pair& pr : base.pairs) fixed.push_back(Feature(pr.role, pr.value));
  ProjectedRows rows = ProjectFeatures(fixed, p);
  std::vector<std::vector<double>> out;
  out.reserve(candidates.size());
  for (std::uint32_t id : candidates) {
    const Fact f = Substitute(base, position, target, id);
    model_.CheckFact(f);
    const std::vector<double> h = Feature(f.pairs[position].role, f.pairs[position].value);
    RowTimesBlock(h, p.g_weight.value, 0, rows.left[position]);
    RowTimesBlock(h, p.g_weight.value, model_.dims().n_f, rows.right[position]);
    out.push_back(
        ReducePairs(rows.left, rows.right, p.g_bias.value, model_.config().aggregator, false));
  }
  return out;
}

std::vector<double> CandidateScorer::ScoreSubstitutions(
    const Fact& base, std::size_t position, Target target,
    std::span<const std::uint32_t> candidates) const {
  const auto relatedness = RelatednessSubstitutions(base, position, target, candidates);
  std::vector<double> scores;
  scores.reserve(candidates.size());
  const bool typed = model_.config().mode == ModelMode::kTNaLP;
  ProjectedRows types;
  if (typed) types = ProjectTypes(base, model_.type_params());
  for (std::size_t c = 0; c < candidates.size(); ++c) {
    if (typed) {
      const TypeParams& t = model_.type_params();
      const Fact f = Substitute(base, position, target, candidates[c]);
      const Pair& pr = f.pairs[position];
      RowTimesBlock(t.role_type.value.row(pr.role), t.t_weight.value, 0, types.left[position]);
      RowTimesBlock(t.value_type.value.row(pr.value), t.t_weight.value, model_.dims().k_type,
                    types.right[position]);
      scores.push_back(CombineScores(model_, relatedness[c], &types).score);
    } else {
      scores.push_back(CombineScores(model_, relatedness[c], nullptr).score);
    }
  }
  return scores;
}

// ---------------------------------------------------------------------------

ParamFlopReport CountParamsFlops(const ModelConfig& config, const ModelDims& d,
                                 std::size_t reference_arity) {
  using u64 = std::uint64_t;
  const u64 m = reference_arity;
  const u64 k = d.k, n_f = d.n_f, n_g = d.n_gfcn;
  ParamFlopReport r;
  r.parameters = static_cast<u64>(d.num_roles) * k + static_cast<u64>(d.num_values) * k;
  if (config.pair_encoder == PairEncoder::kConv) r.parameters += 2 * k * n_f;
  r.parameters += 2 * n_f;                // batchnorm gamma, beta
  r.parameters += 2 * n_f * n_g + n_g;    // g-FCN
  r.parameters += n_g + 1;                // f-FCN

  const u64 encode = config.pair_encoder == PairEncoder::kConv ? m * 2 * k * n_f : m * k;
  r.flops = encode + m * n_f + m * m * 2 * n_f * n_g + n_g;
  if (config.mode == ModelMode::kTNaLP) {
    const u64 kt = d.k_type, n_t = d.n_tfcn;
    r.type_parameters = static_cast<u64>(d.num_roles) * kt + static_cast<u64>(d.num_values) * kt +
                        2 * kt * n_t + n_t + n_t + 1;
    r.parameters += r.type_parameters;
    const u64 type_pairs = config.type_pairing == TypePairing::kDiagonal ? m : m * m;
    r.flops += type_pairs * 2 * kt * n_t + n_t;
  }
  return r;
}

}  // namespace nalp
