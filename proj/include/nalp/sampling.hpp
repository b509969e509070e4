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

#ifndef NALP_SAMPLING_HPP_
#define NALP_SAMPLING_HPP_

#include <cstddef>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "nalp/data.hpp"

namespace nalp {

using Rng = std::mt19937_64;

enum class NegativeMechanism { kConventional, kMixed };
enum class ValueDomain { kRoleSpecific, kGlobal };

struct NegSamplerConfig {
  NegativeMechanism mechanism = NegativeMechanism::kConventional;
  // Mixed mode: probability of the single role / value corruption branch.
  double branch_prob = 0.5;
  ValueDomain value_domain = ValueDomain::kRoleSpecific;
  std::size_t max_retries = 100;
  std::uint64_t seed = 0;

  void Validate() const;
};

std::string_view MechanismName(NegativeMechanism m);
std::string_view ValueDomainName(ValueDomain d);
NegativeMechanism ParseMechanism(std::string_view s);
ValueDomain ParseValueDomain(std::string_view s);

// What a corruption changed. `positions` are the replaced pair indices.
struct CorruptionInfo {
  enum class Kind { kValue, kRole, kPairs } kind = Kind::kValue;
  std::vector<std::size_t> positions;
  std::size_t attempts = 0;
  // Attempts, across all retries, that took the value branch.
  std::size_t value_draws = 0;
};

// Draws corrupted facts that are not members of any split.
class NegativeSampler {
 public:
  NegativeSampler(const Vocabulary& vocab, const DatasetSplits& splits,
                  const NegSamplerConfig& config);

  const NegSamplerConfig& config() const { return config_; }

  // Replaces one value with probability |V| / (|V| + |R|), otherwise one
  // role. Throws SamplingExhaustedError after max_retries member hits.
  Fact CorruptConventional(const Fact& f, Rng& rng, CorruptionInfo* info = nullptr) const;

  // With branch_prob delegates to CorruptConventional; otherwise replaces
  // n in {1, ..., m-1} distinct positions with pairs drawn from the pool of
  // training pairs.
  Fact CorruptMixed(const Fact& f, Rng& rng, CorruptionInfo* info = nullptr) const;

  // Dispatches on config().mechanism.
  Fact Corrupt(const Fact& f, Rng& rng, CorruptionInfo* info = nullptr) const;

  // Distinct (role, value) pairs seen in training facts, sorted.
  const std::vector<Pair>& train_pairs() const { return train_pairs_; }
  double value_branch_probability() const { return value_prob_; }

 private:
  bool TryConventional(const Fact& f, Rng& rng, Fact* out, CorruptionInfo* info) const;

  const Vocabulary& vocab_;
  const DatasetSplits& splits_;
  NegSamplerConfig config_;
  std::vector<Pair> train_pairs_;
  double value_prob_ = 0.0;
};

}  // namespace nalp

#endif  // NALP_SAMPLING_HPP_
