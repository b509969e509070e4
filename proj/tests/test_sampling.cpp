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
#include <set>
#include <vector>

#include "doctest.h"
#include "nalp/errors.hpp"
#include "nalp/sampling.hpp"
#include "test_support.hpp"

namespace nalp {
namespace {

using testing::MakeSyntheticKb;
using testing::SyntheticKb;

// Number of differing role entries and value entries, position by position.
std::pair<int, int> CountChanges(const Fact& a, const Fact& b) {
  int roles = 0;
  int values = 0;
  for (std::size_t i = 0; i < a.arity(); ++i) {
    roles += a.pairs[i].role != b.pairs[i].role;
    values += a.pairs[i].value != b.pairs[i].value;
  }
  return {roles, values};
}

TEST_CASE("sampler configuration") {
  NegSamplerConfig cfg;
  CHECK_NOTHROW(cfg.Validate());
  cfg.branch_prob = 1.5;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  cfg.branch_prob = 0.5;
  cfg.max_retries = 0;
  CHECK_THROWS_AS(cfg.Validate(), ConfigError);
  CHECK(ParseMechanism("mixed") == NegativeMechanism::kMixed);
  CHECK(ParseValueDomain("global") == ValueDomain::kGlobal);
  CHECK(MechanismName(NegativeMechanism::kConventional) == "conventional");
  CHECK_THROWS_AS(ParseMechanism("adversarial"), ConfigError);
}

TEST_CASE("conventional corruption changes exactly one element and avoids the dataset") {
  const SyntheticKb kb = MakeSyntheticKb(5, 20, 40, 10, 10, 2, 5, 41);
  for (ValueDomain domain : {ValueDomain::kRoleSpecific, ValueDomain::kGlobal}) {
    NegSamplerConfig cfg;
    cfg.value_domain = domain;
    const NegativeSampler sampler(kb.vocab, kb.splits, cfg);
    Rng rng(42);
    for (int i = 0; i < 5000; ++i) {
      const Fact& f = kb.splits.train[i % kb.splits.train.size()];
      CorruptionInfo info;
      const Fact neg = sampler.CorruptConventional(f, rng, &info);
      REQUIRE(neg.arity() == f.arity());
      CHECK_FALSE(kb.splits.Contains(neg));
      const auto [roles, values] = CountChanges(f, neg);
      CHECK(roles + values == 1);
      REQUIRE(info.positions.size() == 1);
      const std::size_t pos = info.positions[0];
      if (info.kind == CorruptionInfo::Kind::kValue) {
        CHECK(values == 1);
        CHECK(neg.pairs[pos].value != f.pairs[pos].value);
        const auto& d = kb.vocab.RoleDomain(f.pairs[pos].role);
        if (domain == ValueDomain::kRoleSpecific && d.size() >= 2)
          CHECK(std::binary_search(d.begin(), d.end(), neg.pairs[pos].value));
      } else {
        CHECK(roles == 1);
        CHECK(neg.pairs[pos].role != f.pairs[pos].role);
      }
    }
  }
}

TEST_CASE("value branch frequency follows the vocabulary sizes") {
  const SyntheticKb kb = MakeSyntheticKb(5, 20, 40, 10, 10, 2, 5, 43);
  const NegativeSampler sampler(kb.vocab, kb.splits, {});
  const double p = 20.0 / 25.0;
  CHECK(sampler.value_branch_probability() == doctest::Approx(p));
  Rng rng(44);
  const int n = 100000;
  std::size_t value_draws = 0;
  std::size_t draws = 0;
  for (int i = 0; i < n; ++i) {
    CorruptionInfo info;
    sampler.CorruptConventional(kb.splits.train[i % kb.splits.train.size()], rng, &info);
    draws += info.attempts;
    value_draws += info.value_draws;
  }
  CHECK(draws >= static_cast<std::size_t>(n));
  const double sigma = std::sqrt(p * (1 - p) / static_cast<double>(draws));
  const double freq = static_cast<double>(value_draws) / static_cast<double>(draws);
  INFO("freq=", freq, " draws=", draws);
  CHECK(std::abs(freq - p) <= 3 * sigma);
}

TEST_CASE("mixed corruption replaces between one and m-1 positions from the training pool") {
  const SyntheticKb kb = MakeSyntheticKb(5, 20, 40, 10, 10, 2, 5, 45);
  NegSamplerConfig cfg;
  cfg.mechanism = NegativeMechanism::kMixed;
  const NegativeSampler sampler(kb.vocab, kb.splits, cfg);
  const auto& pool = sampler.train_pairs();
  std::set<Pair> expected_pool;
  for (const Fact& f : kb.splits.train) expected_pool.insert(f.pairs.begin(), f.pairs.end());
  CHECK(std::vector<Pair>(expected_pool.begin(), expected_pool.end()) == pool);

  Rng rng(46);
  int pair_branch = 0;
  for (int i = 0; i < 10000; ++i) {
    const Fact& f = kb.splits.train[i % kb.splits.train.size()];
    CorruptionInfo info;
    const Fact neg = sampler.Corrupt(f, rng, &info);
    REQUIRE(neg.arity() == f.arity());
    CHECK_FALSE(kb.splits.Contains(neg));
    if (info.kind != CorruptionInfo::Kind::kPairs) continue;
    ++pair_branch;
    const std::size_t n = info.positions.size();
    CHECK(n >= 1);
    CHECK(n <= f.arity() - 1);
    CHECK(std::set<std::size_t>(info.positions.begin(), info.positions.end()).size() == n);
    for (std::size_t pos : info.positions)
      CHECK(std::binary_search(pool.begin(), pool.end(), neg.pairs[pos]));
    for (std::size_t i2 = 0; i2 < f.arity(); ++i2)
      if (std::find(info.positions.begin(), info.positions.end(), i2) == info.positions.end())
        CHECK(neg.pairs[i2] == f.pairs[i2]);
  }
  CHECK(pair_branch > 4000);
  CHECK(pair_branch < 6000);
}

TEST_CASE("mixed corruption of binary facts replaces one pair") {
  const SyntheticKb kb = MakeSyntheticKb(5, 20, 40, 0, 0, 2, 2, 47);
  NegSamplerConfig cfg;
  cfg.mechanism = NegativeMechanism::kMixed;
  cfg.branch_prob = 0.0;
  const NegativeSampler sampler(kb.vocab, kb.splits, cfg);
  Rng rng(48);
  for (int i = 0; i < 500; ++i) {
    CorruptionInfo info;
    sampler.Corrupt(kb.splits.train[i % 40], rng, &info);
    CHECK(info.kind == CorruptionInfo::Kind::kPairs);
    CHECK(info.positions.size() == 1);
  }
}

TEST_CASE("sampling is deterministic under a fixed seed") {
  const SyntheticKb kb = MakeSyntheticKb(5, 20, 40, 10, 10, 2, 5, 49);
  NegSamplerConfig cfg;
  cfg.mechanism = NegativeMechanism::kMixed;
  const NegativeSampler sampler(kb.vocab, kb.splits, cfg);
  Rng a(50);
  Rng b(50);
  for (int i = 0; i < 200; ++i) {
    const Fact& f = kb.splits.train[i % 40];
    CHECK(sampler.Corrupt(f, a).pairs == sampler.Corrupt(f, b).pairs);
  }
}

TEST_CASE("exhausted retries raise") {
  // Every corruption of the only fact lands back in the dataset.
  Vocabulary vocab;
  vocab.AddRole("a");
  vocab.AddRole("b");
  vocab.AddValue("x");
  vocab.AddValue("y");
  DatasetSplits splits;
  for (RoleId r0 : {0u, 1u})
    for (ValueId v0 : {0u, 1u})
      for (RoleId r1 : {0u, 1u})
        for (ValueId v1 : {0u, 1u}) {
          Fact f;
          f.pairs = {{r0, v0}, {r1, v1}};
          if (!splits.membership.Contains(f)) {
            splits.train.push_back(f);
            splits.membership.Insert(f);
          }
        }
  vocab.BuildRoleDomains(splits.train);
  NegSamplerConfig cfg;
  cfg.max_retries = 5;
  const NegativeSampler sampler(vocab, splits, cfg);
  Rng rng(51);
  CHECK_THROWS_AS(sampler.CorruptConventional(splits.train[0], rng), SamplingExhaustedError);
}

}  // namespace
}  // namespace nalp
