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

#include "nalp/sampling.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "nalp/errors.hpp"

namespace nalp {

namespace {

// Uniform draw from [0, n) excluding `skip` (when skip < n). Requires an
// admissible value to exist.
std::uint32_t DrawExcluding(std::size_t n, std::size_t skip, Rng& rng) {
  if (skip >= n) return static_cast<std::uint32_t>(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng));
  std::size_t j = std::uniform_int_distribution<std::size_t>(0, n - 2)(rng);
  if (j >= skip) ++j;
  return static_cast<std::uint32_t>(j);
}

}  // namespace

void NegSamplerConfig::Validate() const {
  if (!(branch_prob >= 0.0 && branch_prob <= 1.0)) {
    throw ConfigError("branch probability must lie in [0, 1]");
  }
  if (max_retries < 1) throw ConfigError("max_retries must be at least 1");
}

std::string_view MechanismName(NegativeMechanism m) {
  return m == NegativeMechanism::kConventional ? "conventional" : "mixed";
}

std::string_view ValueDomainName(ValueDomain d) {
  return d == ValueDomain::kRoleSpecific ? "role-specific" : "global";
}

NegativeMechanism ParseMechanism(std::string_view s) {
  if (s == "conventional") return NegativeMechanism::kConventional;
  if (s == "mixed") return NegativeMechanism::kMixed;
  throw ConfigError("unknown negative sampling mechanism '" + std::string(s) + "'");
}

ValueDomain ParseValueDomain(std::string_view s) {
  if (s == "role-specific") return ValueDomain::kRoleSpecific;
  if (s == "global") return ValueDomain::kGlobal;
  throw ConfigError("unknown value domain '" + std::string(s) + "'");
}

NegativeSampler::NegativeSampler(const Vocabulary& vocab, const DatasetSplits& splits,
                                 const NegSamplerConfig& config)
    : vocab_(vocab), splits_(splits), config_(config) {
  config_.Validate();
  const double nv = static_cast<double>(vocab.num_values());
  const double nr = static_cast<double>(vocab.num_roles());
  value_prob_ = nv / (nv + nr);
  for (const Fact& f : splits.train)
    for (const Pair& p : f.pairs) train_pairs_.push_back(p);
  std::sort(train_pairs_.begin(), train_pairs_.end());
  train_pairs_.erase(std::unique(train_pairs_.begin(), train_pairs_.end()), train_pairs_.end());
}

bool NegativeSampler::TryConventional(const Fact& f, Rng& rng, Fact* out,
                                      CorruptionInfo* info) const {
  *out = f;
  const std::size_t position =
      std::uniform_int_distribution<std::size_t>(0, f.arity() - 1)(rng);
  Pair& target = out->pairs[position];
  const bool replace_value = std::bernoulli_distribution(value_prob_)(rng);
  if (info != nullptr) {
    info->kind = replace_value ? CorruptionInfo::Kind::kValue : CorruptionInfo::Kind::kRole;
    info->positions = {position};
    info->value_draws += replace_value;
  }
  if (replace_value) {
    const std::vector<ValueId>* domain = nullptr;
    if (config_.value_domain == ValueDomain::kRoleSpecific &&
        target.role < vocab_.num_roles()) {
      const auto& d = vocab_.RoleDomain(target.role);
      if (d.size() >= 2) domain = &d;
    }
    if (domain != nullptr) {
      auto it = std::lower_bound(domain->begin(), domain->end(), target.value);
      const std::size_t skip = (it != domain->end() && *it == target.value)
                                   ? static_cast<std::size_t>(it - domain->begin())
                                   : domain->size();
      target.value = (*domain)[DrawExcluding(domain->size(), skip, rng)];
    } else {
      if (vocab_.num_values() < 2) return false;
      target.value = DrawExcluding(vocab_.num_values(), target.value, rng);
    }
  } else {
    if (vocab_.num_roles() < 2) return false;
    target.role = DrawExcluding(vocab_.num_roles(), target.role, rng);
  }
  return !splits_.Contains(*out);
}

Fact NegativeSampler::CorruptConventional(const Fact& f, Rng& rng, CorruptionInfo* info) const {
  Fact out;
  if (info != nullptr) info->value_draws = 0;
  for (std::size_t attempt = 1; attempt <= config_.max_retries; ++attempt) {
    if (TryConventional(f, rng, &out, info)) {
      if (info != nullptr) info->attempts = attempt;
      return out;
    }
  }
  throw SamplingExhaustedError("conventional corruption found no negative outside the dataset in " +
                               std::to_string(config_.max_retries) + " attempts");
}

Fact NegativeSampler::CorruptMixed(const Fact& f, Rng& rng, CorruptionInfo* info) const {
  const std::size_t m = f.arity();
  if (m < 2) throw InvalidInputError("mixed corruption needs arity >= 2");
  if (std::bernoulli_distribution(config_.branch_prob)(rng)) {
    return CorruptConventional(f, rng, info);
  }
  if (train_pairs_.empty()) throw InvalidInputError("mixed corruption needs training pairs");
  std::vector<std::size_t> positions(m);
  for (std::size_t attempt = 1; attempt <= config_.max_retries; ++attempt) {
    const std::size_t n_neg = std::uniform_int_distribution<std::size_t>(1, m - 1)(rng);
    std::iota(positions.begin(), positions.end(), 0);
    // Partial Fisher-Yates: the first n_neg entries are a uniform subset.
    for (std::size_t i = 0; i < n_neg; ++i) {
      const std::size_t j = std::uniform_int_distribution<std::size_t>(i, m - 1)(rng);
      std::swap(positions[i], positions[j]);
    }
    Fact out = f;
    std::uniform_int_distribution<std::size_t> pick(0, train_pairs_.size() - 1);
    for (std::size_t i = 0; i < n_neg; ++i) out.pairs[positions[i]] = train_pairs_[pick(rng)];
    if (!splits_.Contains(out)) {
      if (info != nullptr) {
        info->kind = CorruptionInfo::Kind::kPairs;
        info->positions.assign(positions.begin(), positions.begin() + n_neg);
        info->attempts = attempt;
      }
      return out;
    }
  }
  throw SamplingExhaustedError("mixed corruption found no negative outside the dataset in " +
                               std::to_string(config_.max_retries) + " attempts");
}

Fact NegativeSampler::Corrupt(const Fact& f, Rng& rng, CorruptionInfo* info) const {
  return config_.mechanism == NegativeMechanism::kMixed ? CorruptMixed(f, rng, info)
                                                        : CorruptConventional(f, rng, info);
}

}  // namespace nalp
