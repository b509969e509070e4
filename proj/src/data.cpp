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

#include "nalp/data.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <random>
#include <sstream>

#include "json.hpp"
#include "nalp/errors.hpp"

namespace nalp {

namespace {

using ordered_json = nlohmann::ordered_json;
using StringPairs = std::vector<std::pair<std::string, std::string>>;

constexpr const char* kSplitNames[] = {"train", "valid", "test"};

std::vector<Fact>& SplitByIndex(DatasetSplits& s, int i) {
  return i == 0 ? s.train : (i == 1 ? s.valid : s.test);
}

std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    out.emplace_back(line.substr(start, tab == std::string_view::npos ? line.npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

Fact Fact::Canonical() const {
  Fact out = *this;
  std::sort(out.pairs.begin(), out.pairs.end());
  return out;
}

bool Fact::SameAs(const Fact& other) const {
  return Canonical().pairs == other.Canonical().pairs;
}

std::size_t CanonicalFactHash::operator()(const std::vector<Pair>& canonical) const {
  std::uint64_t h = 1469598103934665603ULL;
  for (const Pair& p : canonical) {
    const std::uint64_t x = (static_cast<std::uint64_t>(p.role) << 32) | p.value;
    h ^= x + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

void FactSet::Insert(const Fact& f) { set_.insert(f.Canonical().pairs); }

bool FactSet::Contains(const Fact& f) const { return set_.contains(f.Canonical().pairs); }

RoleId Vocabulary::AddRole(std::string_view name) {
  auto [it, inserted] = role_index_.try_emplace(std::string(name), 0);
  if (inserted) {
    it->second = static_cast<RoleId>(roles_.size());
    roles_.emplace_back(name);
  }
  return it->second;
}

ValueId Vocabulary::AddValue(std::string_view name) {
  auto [it, inserted] = value_index_.try_emplace(std::string(name), 0);
  if (inserted) {
    it->second = static_cast<ValueId>(values_.size());
    values_.emplace_back(name);
  }
  return it->second;
}

bool Vocabulary::FindRole(std::string_view name, RoleId* id) const {
  auto it = role_index_.find(std::string(name));
  if (it == role_index_.end()) return false;
  *id = it->second;
  return true;
}

bool Vocabulary::FindValue(std::string_view name, ValueId* id) const {
  auto it = value_index_.find(std::string(name));
  if (it == value_index_.end()) return false;
  *id = it->second;
  return true;
}

void Vocabulary::BuildRoleDomains(const std::vector<Fact>& train) {
  role_domains_.assign(roles_.size(), {});
  for (const Fact& f : train)
    for (const Pair& p : f.pairs) role_domains_.at(p.role).push_back(p.value);
  for (auto& domain : role_domains_) {
    std::sort(domain.begin(), domain.end());
    domain.erase(std::unique(domain.begin(), domain.end()), domain.end());
  }
}

void DatasetSplits::RebuildMembership() {
  membership = FactSet();
  for (const auto* split : {&train, &valid, &test})
    for (const Fact& f : *split) membership.Insert(f);
}

DatasetFormat ParseDatasetFormat(std::string_view id) {
  if (id == "jsonl-rv") return DatasetFormat::kJsonlRv;
  if (id == "tsv-rv") return DatasetFormat::kTsvRv;
  throw ConfigError("unknown dataset format '" + std::string(id) +
                    "' (expected jsonl-rv or tsv-rv)");
}

std::string_view FormatId(DatasetFormat format) {
  return format == DatasetFormat::kJsonlRv ? "jsonl-rv" : "tsv-rv";
}

std::string_view FormatExtension(DatasetFormat format) {
  return format == DatasetFormat::kJsonlRv ? ".jsonl" : ".tsv";
}

StringPairs ParseFactLine(std::string_view line, DatasetFormat format) {
  StringPairs pairs;
  if (format == DatasetFormat::kTsvRv) {
    std::vector<std::string> tokens = SplitTabs(line);
    if (tokens.size() % 2 != 0) {
      throw DataError("odd number of tab-separated tokens (" + std::to_string(tokens.size()) +
                      ")");
    }
    for (std::size_t i = 0; i < tokens.size(); i += 2) {
      if (tokens[i].empty()) throw DataError("empty role token");
      pairs.emplace_back(std::move(tokens[i]), std::move(tokens[i + 1]));
    }
    return pairs;
  }
  ordered_json obj;
  try {
    obj = ordered_json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw DataError(std::string("invalid JSON: ") + e.what());
  }
  if (!obj.is_object()) throw DataError("fact must be a JSON object");
  for (const auto& [role, values] : obj.items()) {
    if (values.is_string()) {
      pairs.emplace_back(role, values.get<std::string>());
      continue;
    }
    if (!values.is_array()) throw DataError("role '" + role + "' must map to a list of strings");
    for (const auto& v : values) {
      if (!v.is_string()) throw DataError("role '" + role + "' has a non-string value");
      pairs.emplace_back(role, v.get<std::string>());
    }
  }
  return pairs;
}

std::string FormatFactLine(const StringPairs& pairs, DatasetFormat format) {
  if (format == DatasetFormat::kTsvRv) {
    std::string out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      if (i > 0) out += '\t';
      out += pairs[i].first;
      out += '\t';
      out += pairs[i].second;
    }
    return out;
  }
  ordered_json obj = ordered_json::object();
  for (const auto& [role, value] : pairs) obj[role].push_back(value);
  return obj.dump();
}

LoadedDataset LoadDataset(const std::filesystem::path& dir, DatasetFormat format) {
  LoadedDataset out;
  for (int s = 0; s < 3; ++s) {
    const std::filesystem::path path = dir / (std::string(kSplitNames[s]) +
                                              std::string(FormatExtension(format)));
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot read " + path.string());
    std::vector<Fact>& facts = SplitByIndex(out.splits, s);
    FactSet seen;
    std::size_t duplicates = 0;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.find_first_not_of(" \t") == std::string::npos) continue;
      StringPairs parsed;
      try {
        parsed = ParseFactLine(line, format);
      } catch (const DataError& e) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
      }
      if (parsed.size() < 2) {
        throw DataError(path.string() + ":" + std::to_string(line_no) + ": arity " +
                        std::to_string(parsed.size()) + " < 2");
      }
      Fact f;
      f.pairs.reserve(parsed.size());
      for (const auto& [role, value] : parsed)
        f.pairs.push_back({out.vocab.AddRole(role), out.vocab.AddValue(value)});
      if (seen.Contains(f)) {
        ++duplicates;
        continue;
      }
      seen.Insert(f);
      facts.push_back(std::move(f));
    }
    if (duplicates > 0) {
      out.warnings.push_back(path.string() + ": dropped " + std::to_string(duplicates) +
                             " duplicate fact(s)");
    }
    if (facts.empty()) {
      if (s == 0) throw DataError(path.string() + ": empty split");
      out.warnings.push_back(path.string() + ": empty split");
    }
  }
  out.vocab.BuildRoleDomains(out.splits.train);
  out.splits.RebuildMembership();
  return out;
}

void WriteDataset(const std::filesystem::path& dir, DatasetFormat format,
                  const Vocabulary& vocab, const DatasetSplits& splits) {
  std::filesystem::create_directories(dir);
  const std::vector<Fact>* parts[] = {&splits.train, &splits.valid, &splits.test};
  for (int s = 0; s < 3; ++s) {
    const std::filesystem::path path = dir / (std::string(kSplitNames[s]) +
                                              std::string(FormatExtension(format)));
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    for (const Fact& f : *parts[s]) out << FormatFactLine(DecodeFact(f, vocab), format) << '\n';
  }
}

StringPairs DecodeFact(const Fact& f, const Vocabulary& vocab) {
  StringPairs out;
  out.reserve(f.arity());
  for (const Pair& p : f.pairs) {
    if (p.role >= vocab.num_roles() || p.value >= vocab.num_values()) {
      throw DataError("fact index out of vocabulary range");
    }
    out.emplace_back(vocab.RoleName(p.role), vocab.ValueName(p.value));
  }
  return out;
}

std::vector<ArityGroup> GroupByArity(const std::vector<Fact>& facts) {
  std::map<std::size_t, std::vector<Fact>> by_arity;
  for (const Fact& f : facts) by_arity[f.arity()].push_back(f);
  std::vector<ArityGroup> groups;
  groups.reserve(by_arity.size());
  for (auto& [arity, group] : by_arity) groups.push_back({arity, std::move(group)});
  return groups;
}

DatasetSplits DeriveBinarySubset(const DatasetSplits& splits, double keep_pct,
                                 std::uint64_t seed) {
  if (!(keep_pct >= 0.0 && keep_pct <= 100.0)) {
    throw ConfigError("keep percentage must lie in [0, 100]");
  }
  std::mt19937_64 rng(seed);
  DatasetSplits out;
  const std::vector<Fact>* in_parts[] = {&splits.train, &splits.valid, &splits.test};
  for (int s = 0; s < 3; ++s) {
    const std::vector<Fact>& facts = *in_parts[s];
    std::vector<std::size_t> binary;
    for (std::size_t i = 0; i < facts.size(); ++i)
      if (facts[i].arity() == 2) binary.push_back(i);
    const auto keep = static_cast<std::size_t>(
        std::llround(keep_pct / 100.0 * static_cast<double>(binary.size())));
    std::shuffle(binary.begin(), binary.end(), rng);
    std::vector<char> retained(facts.size(), 1);
    for (std::size_t i = keep; i < binary.size(); ++i) retained[binary[i]] = 0;
    std::vector<Fact>& dst = SplitByIndex(out, s);
    for (std::size_t i = 0; i < facts.size(); ++i)
      if (retained[i]) dst.push_back(facts[i]);
  }
  out.RebuildMembership();
  return out;
}

double BinaryKeepPercentForRatio(const std::vector<Fact>& train, double binary_weight,
                                 double nary_weight) {
  if (!(binary_weight >= 0.0 && nary_weight > 0.0)) {
    throw ConfigError("ratio weights must be non-negative with a positive n-ary part");
  }
  const CategoryCounts c = CountCategories(train);
  if (c.binary == 0) return 100.0;
  const double wanted = static_cast<double>(c.nary) * binary_weight / nary_weight;
  return std::min(100.0, 100.0 * wanted / static_cast<double>(c.binary));
}

CategoryCounts CountCategories(const std::vector<Fact>& facts) {
  CategoryCounts c;
  for (const Fact& f : facts) (f.arity() == 2 ? c.binary : c.nary)++;
  return c;
}

}  // namespace nalp
