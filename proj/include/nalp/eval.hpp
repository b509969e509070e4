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

#ifndef NALP_EVAL_HPP_
#define NALP_EVAL_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nalp/data.hpp"
#include "nalp/model.hpp"

namespace nalp {

enum class TaskKind { kRole, kValue };
enum class Category { kBinary, kNary, kOverall };

std::string_view TaskName(TaskKind t);
std::string_view CategoryName(Category c);
TaskKind ParseTask(std::string_view s);

// Remove the role or value at `position` and rank the true fact among all
// substitutions.
struct RankQuery {
  Fact fact;
  std::size_t position = 0;
  TaskKind target = TaskKind::kValue;
};

// kOptimistic: rank = 1 + #(candidates scoring strictly higher).
// kPessimistic: ties with the true fact also count against it.
enum class TieMode { kOptimistic, kPessimistic };

// Filtered rank of the query's fact. Candidates that are themselves members
// of any split are dropped; the true fact is always kept.
std::size_t RankTarget(const RankQuery& q, const CandidateScorer& scorer,
                       const DatasetSplits& splits, TieMode ties = TieMode::kOptimistic);

struct MetricBlock {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::size_t count = 0;
};

struct QueryRank {
  TaskKind task = TaskKind::kValue;
  std::size_t arity = 0;
  std::size_t rank = 0;
};

struct MetricsReport {
  // Indexed [task][category].
  std::array<std::array<MetricBlock, 3>, 2> blocks{};
  // Per task, per arity.
  std::array<std::map<std::size_t, MetricBlock>, 2> by_arity;
  std::vector<QueryRank> ranks;
  std::array<bool, 2> has_task{};

  const MetricBlock& Get(TaskKind t, Category c) const {
    return blocks[static_cast<int>(t)][static_cast<int>(c)];
  }
};

// Builds a report from stored ranks in their given order.
MetricsReport SummarizeRanks(std::vector<QueryRank> ranks);

struct EvalOptions {
  std::vector<TaskKind> tasks = {TaskKind::kRole, TaskKind::kValue};
  TieMode ties = TieMode::kOptimistic;
  std::size_t workers = 1;
};

// Every (fact, position) query for every requested task. Throws when the
// fact list is empty.
std::vector<RankQuery> BuildQueries(const std::vector<Fact>& facts,
                                    std::span<const TaskKind> tasks);

std::vector<std::size_t> RankQueries(std::span<const RankQuery> queries, const Model& model,
                                     const DatasetSplits& splits, TieMode ties,
                                     std::size_t workers);

MetricsReport Evaluate(const std::vector<Fact>& facts, const Model& model,
                       const DatasetSplits& splits, const EvalOptions& options = {});

// Tab-separated: task, category, metric, value, count.
void WriteReportTsv(std::ostream& out, const MetricsReport& report);
std::string FormatReportTable(const MetricsReport& report);

// Signed count: #dims where positive > negative minus #dims where
// negative > positive, over two relatedness vectors.
int Distinguishability(std::span<const double> positive, std::span<const double> negative);
int Distinguishability(const Fact& positive, const Fact& negative, const Model& model);

struct CaseEntry {
  ValueId value = 0;
  std::string token;
  int distinguishability = 0;
  double score = 0.0;
};

// Replaces the value at `position` by every other value and returns the
// `top_n` substitutions with the smallest distinguishability, ascending,
// ties broken by token string.
std::vector<CaseEntry> AnalyzeCase(const Fact& fact, std::size_t position, const Model& model,
                                   const Vocabulary& vocab, std::size_t top_n);

}  // namespace nalp

#endif  // NALP_EVAL_HPP_
