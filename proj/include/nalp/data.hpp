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

#ifndef NALP_DATA_HPP_
#define NALP_DATA_HPP_

#include <compare>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

namespace nalp {

using RoleId = std::uint32_t;
using ValueId = std::uint32_t;

// One role:role-value pair of a fact.
struct Pair {
  RoleId role = 0;
  ValueId value = 0;
  friend auto operator<=>(const Pair&, const Pair&) = default;
};

// An n-ary relational fact: a multiset of pairs, kept in file order.
// Roles may repeat. Equality and hashing go through the canonical
// (sorted) form.
struct Fact {
  std::vector<Pair> pairs;

  std::size_t arity() const { return pairs.size(); }
  Fact Canonical() const;
  bool SameAs(const Fact& other) const;  // multiset equality
};

struct CanonicalFactHash {
  std::size_t operator()(const std::vector<Pair>& canonical) const;
};

// Set of facts keyed by canonical form.
class FactSet {
 public:
  void Insert(const Fact& f);
  bool Contains(const Fact& f) const;
  // Checks a pair list that is already sorted.
  bool ContainsCanonical(const std::vector<Pair>& canonical) const {
    return set_.contains(canonical);
  }
  std::size_t size() const { return set_.size(); }

 private:
  std::unordered_set<std::vector<Pair>, CanonicalFactHash> set_;
};

// Bidirectional role and value string tables, plus the values observed with
// each role in the training split.
class Vocabulary {
 public:
  RoleId AddRole(std::string_view name);
  ValueId AddValue(std::string_view name);
  // Returns false when the name is unknown.
  bool FindRole(std::string_view name, RoleId* id) const;
  bool FindValue(std::string_view name, ValueId* id) const;

  const std::string& RoleName(RoleId id) const { return roles_.at(id); }
  const std::string& ValueName(ValueId id) const { return values_.at(id); }
  std::size_t num_roles() const { return roles_.size(); }
  std::size_t num_values() const { return values_.size(); }
  const std::vector<std::string>& roles() const { return roles_; }
  const std::vector<std::string>& values() const { return values_; }

  // Sorted, de-duplicated values seen with `role` in training facts.
  const std::vector<ValueId>& RoleDomain(RoleId role) const { return role_domains_.at(role); }
  void BuildRoleDomains(const std::vector<Fact>& train);

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.roles_ == b.roles_ && a.values_ == b.values_;
  }

 private:
  std::vector<std::string> roles_;
  std::vector<std::string> values_;
  std::unordered_map<std::string, RoleId> role_index_;
  std::unordered_map<std::string, ValueId> value_index_;
  std::vector<std::vector<ValueId>> role_domains_;
};

struct DatasetSplits {
  std::vector<Fact> train;
  std::vector<Fact> valid;
  std::vector<Fact> test;
  // Union of the three splits.
  FactSet membership;

  void RebuildMembership();
  bool Contains(const Fact& f) const { return membership.Contains(f); }
};

enum class DatasetFormat { kJsonlRv, kTsvRv };

DatasetFormat ParseDatasetFormat(std::string_view id);
std::string_view FormatId(DatasetFormat format);
// File extension used for the split files of a format: ".jsonl" or ".tsv".
std::string_view FormatExtension(DatasetFormat format);

struct LoadedDataset {
  Vocabulary vocab;
  DatasetSplits splits;
  std::vector<std::string> warnings;
};

// Reads <dir>/{train,valid,test}<ext>. The vocabulary is the union of the
// splits in order of first appearance; role domains come from train only.
LoadedDataset LoadDataset(const std::filesystem::path& dir, DatasetFormat format);

// Writes splits back out in the given format, one file per split.
void WriteDataset(const std::filesystem::path& dir, DatasetFormat format,
                  const Vocabulary& vocab, const DatasetSplits& splits);

// Parses one line of the given format into (role, value) strings.
std::vector<std::pair<std::string, std::string>> ParseFactLine(std::string_view line,
                                                               DatasetFormat format);
std::string FormatFactLine(const std::vector<std::pair<std::string, std::string>>& pairs,
                           DatasetFormat format);

std::vector<std::pair<std::string, std::string>> DecodeFact(const Fact& f,
                                                            const Vocabulary& vocab);

struct ArityGroup {
  std::size_t arity = 0;
  std::vector<Fact> facts;
};

// Partitions facts by arity, groups in ascending arity order, file order
// preserved inside a group.
std::vector<ArityGroup> GroupByArity(const std::vector<Fact>& facts);

// Keeps every n-ary fact and a seeded uniform keep_pct% of the binary facts
// of each split.
DatasetSplits DeriveBinarySubset(const DatasetSplits& splits, double keep_pct,
                                 std::uint64_t seed);

// Percentage of binary training facts to keep so that the training split's
// binary:n-ary ratio becomes binary_weight:nary_weight (capped at 100).
double BinaryKeepPercentForRatio(const std::vector<Fact>& train, double binary_weight,
                                 double nary_weight);

struct CategoryCounts {
  std::size_t binary = 0;
  std::size_t nary = 0;
};
CategoryCounts CountCategories(const std::vector<Fact>& facts);

}  // namespace nalp

#endif  // NALP_DATA_HPP_
