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

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "doctest.h"
#include "nalp/errors.hpp"
#include "nalp/gradcheck.hpp"
#include "nalp/model.hpp"
#include "test_support.hpp"

namespace nalp {
namespace {

using testing::RandomFact;
using testing::RandomModel;
using testing::SmallDims;
using testing::MixedBatch;
using testing::SmoothBatch;

Fact Permuted(const Fact& f, const std::vector<std::size_t>& order) {
  Fact out;
  for (std::size_t i : order) out.pairs.push_back(f.pairs[i]);
  return out;
}

TEST_CASE("pair embedding shape and conv equivalence") {
  const ModelDims dims = SmallDims(5, 9);
  const Model model = RandomModel({}, dims, 11);
  Rng rng(12);
  for (std::size_t m = 1; m <= 6; ++m) {
    const Fact f = RandomFact(dims, m, rng);
    const Matrix emb = model.PairEmbed(f);
    CHECK(emb.rows() == m);
    CHECK(emb.cols() == dims.n_f);

    // Each filter is a 1 x 2k window over one concatenated pair row.
    const NaLPParams& p = model.params();
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<double> row;
      auto r = p.role_emb.value.row(f.pairs[i].role);
      auto v = p.value_emb.value.row(f.pairs[i].value);
      row.insert(row.end(), r.begin(), r.end());
      row.insert(row.end(), v.begin(), v.end());
      for (std::size_t filter = 0; filter < dims.n_f; ++filter) {
        double z = 0;
        for (std::size_t t = 0; t < 2 * dims.k; ++t) z += row[t] * p.conv.value(t, filter);
        const double inv_std = 1.0 / std::sqrt(p.bn.running_var[filter] + BatchNorm::kEpsilon);
        double y = p.bn.gamma.value[filter] * (z - p.bn.running_mean[filter]) * inv_std +
                   p.bn.beta.value[filter];
        y = std::max(y, 0.0);
        CHECK(std::abs(emb(i, filter) - y) <= 1e-12);
      }
    }
  }
}

TEST_CASE("pair embedding rows follow a permutation of the pairs") {
  const ModelDims dims = SmallDims(5, 9);
  const Model model = RandomModel({}, dims, 13);
  Rng rng(14);
  const Fact f = RandomFact(dims, 5, rng);
  std::vector<std::size_t> order = {3, 0, 4, 1, 2};
  const Matrix original = model.PairEmbed(f);
  const Matrix permuted = model.PairEmbed(Permuted(f, order));
  for (std::size_t i = 0; i < order.size(); ++i)
    for (std::size_t c = 0; c < dims.n_f; ++c) CHECK(permuted(i, c) == original(order[i], c));
}

TEST_CASE("pair embedding rejects out-of-range indices") {
  const Model model = RandomModel({}, SmallDims(3, 4), 1);
  Fact f;
  f.pairs = {{0, 0}, {0, 4}};
  CHECK_THROWS_AS(model.PairEmbed(f), DataError);
}

TEST_CASE("relatedness vector special cases") {
  const ModelDims dims = SmallDims(5, 9);
  const Model model = RandomModel({}, dims, 15);
  const NaLPParams& p = model.params();
  const Matrix one = Matrix::FromRows({{0.3, 1.2, 0.0}});
  const auto single = RelatednessVector(one, p);
  for (std::size_t t = 0; t < dims.n_gfcn; ++t) {
    double pre = p.g_bias.value[t];
    for (std::size_t c = 0; c < 3; ++c)
      pre += one(0, c) * p.g_weight.value(c, t) + one(0, c) * p.g_weight.value(3 + c, t);
    CHECK(single[t] == doctest::Approx(std::max(pre, 0.0)).epsilon(1e-12));
  }
  const Matrix same = Matrix::FromRows({{0.3, 1.2, 0.0}, {0.3, 1.2, 0.0}, {0.3, 1.2, 0.0}});
  CHECK(RelatednessVector(same, p) == single);
}

TEST_CASE("relatedness vector matches exhaustive pair scan") {
  const ModelDims dims = SmallDims(5, 9);
  const Model model = RandomModel({}, dims, 16);
  const NaLPParams& p = model.params();
  Rng rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Matrix rows(3, dims.n_f);
  for (double& v : rows.data()) v = u(rng);
  std::vector<double> oracle(dims.n_gfcn, 1e300);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j) {
      std::vector<double> concat;
      concat.insert(concat.end(), rows.row(i).begin(), rows.row(i).end());
      concat.insert(concat.end(), rows.row(j).begin(), rows.row(j).end());
      for (std::size_t t = 0; t < dims.n_gfcn; ++t) {
        double pre = p.g_bias.value[t];
        for (std::size_t c = 0; c < concat.size(); ++c) pre += concat[c] * p.g_weight.value(c, t);
        oracle[t] = std::min(oracle[t], std::max(pre, 0.0));
      }
    }
  const auto got = RelatednessVector(rows, p);
  for (std::size_t t = 0; t < dims.n_gfcn; ++t) CHECK(std::abs(got[t] - oracle[t]) <= 1e-12);
}

TEST_CASE("score base on a hand-set two-pair fact") {
  ModelDims dims;
  dims.num_roles = 2;
  dims.num_values = 2;
  dims.k = 2;
  dims.n_f = 2;
  dims.n_gfcn = 2;
  Model model({}, dims);
  NaLPParams& p = model.params();
  p.role_emb.value = Matrix::FromRows({{1, 0}, {0, 1}});
  p.value_emb.value = Matrix::FromRows({{0.5, -1}, {2, 0}});
  p.conv.value = Matrix::FromRows({{1, 0}, {0, 1}, {1, 0}, {0, -1}});
  p.g_weight.value = Matrix::FromRows({{1, 0}, {0, 1}, {0, -1}, {1, 0}});
  p.g_bias.value = Matrix::FromRows({{0, 0.5}});
  p.f_weight.value = Matrix::FromRows({{2}, {3}});
  p.f_bias.value[0] = -1;
  Fact f;
  f.pairs = {{0, 0}, {1, 1}};
  // By hand: pair features h1 = c*[1.5, 1], h2 = c*[2, 1] with
  // c = 1/sqrt(1 + 1e-5); the min over the four pairs is [2.5c, 0], so
  // s0 = 2 * 2.5c - 1.
  const double c = 1.0 / std::sqrt(1.0 + 1e-5);
  CHECK(model.ScoreDetail(f).base == doctest::Approx(5.0 * c - 1.0).epsilon(1e-14));
  CHECK(model.Score(f) == model.ScoreDetail(f).base);
}

TEST_CASE("zero f-FCN gives zero score") {
  const ModelDims dims = SmallDims(5, 9);
  Model model = RandomModel({}, dims, 18);
  model.params().f_weight.value.Fill(0.0);
  model.params().f_bias.value.Fill(0.0);
  Rng rng(19);
  for (int i = 0; i < 10; ++i) CHECK(model.Score(RandomFact(dims, 2 + i % 4, rng)) == 0.0);
}

TEST_CASE("scores are invariant to pair order") {
  const ModelDims dims = SmallDims(6, 12);
  Rng rng(20);
  for (ModelMode mode : {ModelMode::kNaLP, ModelMode::kTNaLP})
    for (TypePairing pairing : {TypePairing::kDiagonal, TypePairing::kCross}) {
      ModelConfig cfg;
      cfg.mode = mode;
      cfg.type_pairing = pairing;
      const Model model = RandomModel(cfg, dims, 21);
      for (int trial = 0; trial < 20; ++trial) {
        const Fact f = RandomFact(dims, 2 + trial % 5, rng);
        std::vector<std::size_t> order(f.arity());
        std::iota(order.begin(), order.end(), 0);
        std::shuffle(order.begin(), order.end(), rng);
        CHECK(std::abs(model.Score(f) - model.Score(Permuted(f, order))) < 1e-9);
      }
    }
}

TEST_CASE("one parameter set scores every arity") {
  const ModelDims dims = SmallDims(6, 12);
  ModelConfig cfg;
  cfg.mode = ModelMode::kTNaLP;
  const Model model = RandomModel(cfg, dims, 22);
  Rng rng(23);
  for (std::size_t m = 2; m <= 6; ++m) CHECK(std::isfinite(model.Score(RandomFact(dims, m, rng))));
}

TEST_CASE("type compatibility vector") {
  ModelDims dims;
  dims.num_roles = 2;
  dims.num_values = 2;
  dims.k = dims.n_f = dims.n_gfcn = 1;
  dims.k_type = 1;
  dims.n_tfcn = 1;
  ModelConfig cfg;
  cfg.mode = ModelMode::kTNaLP;
  Model model(cfg, dims);
  TypeParams& t = model.type_params();
  t.role_type.value = Matrix::FromRows({{1}, {0}});
  t.value_type.value = Matrix::FromRows({{0}, {1}});
  t.t_weight.value = Matrix::FromRows({{1}, {1}});
  Fact f;
  f.pairs = {{0, 0}, {1, 1}};
  // Diagonal pairs: 1 + 0 and 0 + 1; cross adds (r0, v1) = 2 and (r1, v0) = 0.
  CHECK(TypeCompatVector(f, t, TypePairing::kDiagonal) == std::vector<double>{1.0});
  CHECK(TypeCompatVector(f, t, TypePairing::kCross) == std::vector<double>{0.0});

  Fact single;
  single.pairs = {{0, 1}};
  CHECK(TypeCompatVector(single, t, TypePairing::kDiagonal) == std::vector<double>{2.0});

  t.role_type.value.Fill(0.25);
  t.value_type.value.Fill(0.25);
  CHECK(TypeCompatVector(f, t, TypePairing::kDiagonal) ==
        TypeCompatVector(f, t, TypePairing::kCross));
}

TEST_CASE("tNaLP score is the minimum of base and type scores") {
  const ModelDims dims = SmallDims(6, 12);
  ModelConfig cfg;
  cfg.mode = ModelMode::kTNaLP;
  Model model = RandomModel(cfg, dims, 24);
  Rng rng(25);
  for (int i = 0; i < 50; ++i) {
    const FactScore s = model.ScoreDetail(RandomFact(dims, 2 + i % 4, rng));
    CHECK(s.score == std::min(s.base, s.type));
    CHECK(s.score <= s.base);
  }
  // Force s0 = 2 and s_t = -1.
  model.params().f_weight.value.Fill(0.0);
  model.params().f_bias.value[0] = 2.0;
  model.type_params().y_weight.value.Fill(0.0);
  model.type_params().y_bias.value[0] = -1.0;
  CHECK(model.Score(RandomFact(dims, 3, rng)) == -1.0);

  const Model plain = RandomModel({}, dims, 24);
  const Fact f = RandomFact(dims, 3, rng);
  CHECK(plain.Score(f) == plain.ScoreDetail(f).base);
  CHECK_THROWS_AS(plain.type_params(), ConfigError);
}

TEST_CASE("fact loss anchors") {
  CHECK(std::abs(FactLoss(0.0, 1) - std::log(2.0)) <= 1e-12);
  CHECK(std::abs(FactLoss(0.0, -1) - std::log(2.0)) <= 1e-12);
  CHECK(FactLoss(-5, 1) > FactLoss(0, 1));
  CHECK(FactLoss(0, 1) > FactLoss(5, 1));
  CHECK(FactLoss(-5, -1) < FactLoss(0, -1));
  CHECK(FactLoss(0, -1) < FactLoss(5, -1));
  CHECK(FactLoss(800, 1) == doctest::Approx(0.0));
  CHECK(FactLoss(800, -1) == doctest::Approx(800.0));
}

TEST_CASE("ablation pair encoders") {
  ModelDims dims = SmallDims(4, 6);
  dims.n_f = dims.k;
  SUBCASE("plus with zero value embedding") {
    ModelConfig cfg;
    cfg.pair_encoder = PairEncoder::kPlus;
    Model model = RandomModel(cfg, dims, 26);
    model.params().value_emb.value.Fill(0.0);
    Fact f;
    f.pairs = {{1, 2}, {3, 0}};
    const Matrix emb = model.PairEmbed(f);
    for (std::size_t i = 0; i < 2; ++i) {
      Matrix z = Matrix::RowVector(model.params().role_emb.value.row(f.pairs[i].role));
      const Matrix want = Relu(model.params().bn.Forward(z, BnMode::kEval));
      for (std::size_t c = 0; c < dims.k; ++c) CHECK(emb(i, c) == doctest::Approx(want[c]));
    }
  }
  SUBCASE("mul with unit value embedding") {
    ModelConfig cfg;
    cfg.pair_encoder = PairEncoder::kMul;
    Model model = RandomModel(cfg, dims, 27);
    model.params().value_emb.value.Fill(1.0);
    Fact f;
    f.pairs = {{0, 5}, {2, 1}};
    const Matrix emb = model.PairEmbed(f);
    for (std::size_t i = 0; i < 2; ++i) {
      Matrix z = Matrix::RowVector(model.params().role_emb.value.row(f.pairs[i].role));
      const Matrix want = Relu(model.params().bn.Forward(z, BnMode::kEval));
      for (std::size_t c = 0; c < dims.k; ++c) CHECK(emb(i, c) == doctest::Approx(want[c]));
    }
  }
  SUBCASE("n_f must equal k") {
    ModelConfig cfg;
    cfg.pair_encoder = PairEncoder::kPlus;
    CHECK_THROWS_AS(Model(cfg, SmallDims(4, 6)), ConfigError);
  }
}

TEST_CASE("ablation aggregate variants") {
  const Matrix v = Matrix::FromRows({{1, 5}, {3, 2}});
  CHECK(AblationAggregate(v, Aggregator::kMax).value == std::vector<double>{3, 5});
  CHECK(AblationAggregate(v, Aggregator::kMean).value == std::vector<double>{2, 3.5});
  CHECK_THROWS_AS(AblationAggregate(v, Aggregator::kMin), ConfigError);
}

TEST_CASE("model gradients match finite differences in every configuration") {
  Rng rng(28);
  for (PairEncoder enc : {PairEncoder::kConv, PairEncoder::kPlus, PairEncoder::kMul})
    for (Aggregator agg : {Aggregator::kMin, Aggregator::kMax, Aggregator::kMean})
      for (ModelMode mode : {ModelMode::kNaLP, ModelMode::kTNaLP})
        for (BnMode bn_mode : {BnMode::kTrain, BnMode::kEval}) {
          ModelDims dims = SmallDims(5, 8);
          if (enc != PairEncoder::kConv) dims.n_f = dims.k;
          ModelConfig cfg;
          cfg.mode = mode;
          cfg.pair_encoder = enc;
          cfg.aggregator = agg;
          Model model = RandomModel(cfg, dims, 29);
          const auto batch = SmoothBatch(model, dims, bn_mode, rng);
          model.ZeroGrads();
          const double loss = model.LossAndGrads(batch, bn_mode, false);
          CHECK(loss == doctest::Approx(model.Loss(batch, bn_mode)).epsilon(1e-14));
          auto params = model.Parameters();
          const GradCheckReport report = FiniteDifferenceCheck(
              [&] { return model.Loss(batch, bn_mode); }, params, 1e-5, 1e-5);
          INFO("encoder=", EncoderName(enc), " aggregator=", AggregatorName(agg),
               " mode=", ModeName(mode), " bn=", std::string(bn_mode == BnMode::kTrain ? "train" : "eval"),
               " max_rel=", report.max_rel_error);
          CHECK(report.passed());
        }
}

TEST_CASE("gradients flow through the cross type pairing") {
  ModelConfig cfg;
  cfg.mode = ModelMode::kTNaLP;
  cfg.type_pairing = TypePairing::kCross;
  const ModelDims dims = SmallDims(5, 8);
  Model model = RandomModel(cfg, dims, 30);
  Rng rng(31);
  const auto batch = SmoothBatch(model, dims, BnMode::kTrain, rng);
  model.LossAndGrads(batch, BnMode::kTrain, false);
  auto params = model.Parameters();
  const GradCheckReport report = FiniteDifferenceCheck(
      [&] { return model.Loss(batch, BnMode::kTrain); }, params, 1e-5, 1e-5);
  CHECK(report.passed());
}

TEST_CASE("train-mode loss updates running statistics only when asked") {
  const ModelDims dims = SmallDims(5, 8);
  Model model = RandomModel({}, dims, 32);
  Rng rng(33);
  const auto batch = MixedBatch(dims, rng);
  const auto before = model.params().bn.running_mean;
  model.LossAndGrads(batch, BnMode::kTrain, false);
  CHECK(model.params().bn.running_mean == before);
  model.LossAndGrads(batch, BnMode::kTrain);
  CHECK(model.params().bn.running_mean != before);
}

TEST_CASE("eval-mode batch loss agrees with per-fact scores") {
  const ModelDims dims = SmallDims(5, 8);
  ModelConfig cfg;
  cfg.mode = ModelMode::kTNaLP;
  const Model model = RandomModel(cfg, dims, 34);
  Rng rng(35);
  const auto batch = MixedBatch(dims, rng);
  double expected = 0;
  for (const LabeledFact& lf : batch) expected += FactLoss(model.Score(lf.fact), lf.label);
  CHECK(model.Loss(batch, BnMode::kEval) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("candidate scorer reproduces single-fact scores bitwise") {
  const ModelDims dims = SmallDims(6, 15);
  Rng rng(36);
  for (PairEncoder enc : {PairEncoder::kConv, PairEncoder::kMul})
    for (ModelMode mode : {ModelMode::kNaLP, ModelMode::kTNaLP})
      for (Aggregator agg : {Aggregator::kMin, Aggregator::kMean}) {
        ModelDims d = dims;
        if (enc != PairEncoder::kConv) d.n_f = d.k;
        ModelConfig cfg;
        cfg.mode = mode;
        cfg.pair_encoder = enc;
        cfg.aggregator = agg;
        cfg.type_pairing = TypePairing::kCross;
        const Model model = RandomModel(cfg, d, 37);
        const CandidateScorer scorer(model);
        const Fact f = RandomFact(d, 4, rng);
        std::vector<std::uint32_t> values(d.num_values);
        std::iota(values.begin(), values.end(), 0);
        std::vector<std::uint32_t> roles(d.num_roles);
        std::iota(roles.begin(), roles.end(), 0);
        const auto by_value =
            scorer.ScoreSubstitutions(f, 2, CandidateScorer::Target::kValue, values);
        const auto by_role = scorer.ScoreSubstitutions(f, 1, CandidateScorer::Target::kRole, roles);
        for (std::uint32_t v : values) {
          Fact g = f;
          g.pairs[2].value = v;
          CHECK(by_value[v] == model.Score(g));
        }
        for (std::uint32_t r : roles) {
          Fact g = f;
          g.pairs[1].role = r;
          CHECK(by_role[r] == model.Score(g));
        }
      }
}

TEST_CASE("parameter and FLOP accounting") {
  ModelDims d;
  d.num_roles = d.num_values = 1;
  d.k = d.n_f = d.n_gfcn = 1;
  CHECK(CountParamsFlops({}, d, 2).parameters == 11);

  ModelDims wide = SmallDims(7, 20);
  const auto base = CountParamsFlops({}, wide, 3);
  ModelDims doubled = wide;
  doubled.n_gfcn *= 2;
  const auto after = CountParamsFlops({}, doubled, 3);
  CHECK(after.parameters - base.parameters == (2 * wide.n_f + 2) * wide.n_gfcn);

  // Allocated tensors agree with the closed form.
  for (ModelMode mode : {ModelMode::kNaLP, ModelMode::kTNaLP}) {
    ModelConfig cfg;
    cfg.mode = mode;
    const Model model(cfg, wide);
    std::uint64_t allocated = 0;
    for (const ParamTensor* p : model.Parameters()) allocated += p->value.size();
    CHECK(allocated == CountParamsFlops(cfg, wide, 3).parameters);
  }

  ModelDims wiki;
  wiki.num_roles = 707;
  wiki.num_values = 47765;
  wiki.k = 100;
  wiki.n_f = 200;
  wiki.n_gfcn = 1200;
  wiki.k_type = 20;
  wiki.n_tfcn = 100;
  CHECK(CountParamsFlops({}, wiki, 3).parameters > 5'000'000);
  ModelConfig typed;
  typed.mode = ModelMode::kTNaLP;
  CHECK(CountParamsFlops(typed, wiki, 3).parameters > 5'000'000);
}

}  // namespace
}  // namespace nalp
