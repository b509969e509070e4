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

#include "nalp/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>
#include <thread>

#include "nalp/errors.hpp"

namespace nalp {

std::string_view TaskName(TaskKind t) { return t == TaskKind::kRole ? "role" : "value"; }

std::string_view CategoryName(Category c) {
  switch (c) {
    case Category::kBinary: return "binary";
    case Category::kNary: return "n-ary";
    case Category::kOverall: return "overall";
  }
  return "overall";
}

TaskKind ParseTask(std::string_view s) {
  if (s == "role") return TaskKind::kRole;
  if (s == "value") return TaskKind::kValue;
  throw ConfigError("unknown task '" + std::string(s) + "' (expected role or value)");
}

std::size_t RankTarget(const RankQuery& q, const CandidateScorer& scorer,
                       const DatasetSplits& splits, TieMode ties) {
  if (q.position >= q.fact.arity()) throw InvalidInputError("query position outside fact");
  const Model& model = scorer.model();
  const bool role_task = q.target == TaskKind::kRole;
  const std::size_t vocab_size = role_task ? model.dims().num_roles : model.dims().num_values;
  const Pair truth = q.fact.pairs[q.position];
  const std::uint32_t true_id = role_task ? truth.role : truth.value;

  std::vector<std::uint32_t> candidates;
  candidates.reserve(vocab_size);
  candidates.push_back(true_id);
  std::vector<Pair> probe = q.fact.pairs;
  for (std::uint32_t id = 0; id < vocab_size; ++id) {
    if (id == true_id) continue;
    probe = q.fact.pairs;
    (role_task ? probe[q.position].role : probe[q.position].value) = id;
    std::sort(probe.begin(), probe.end());
    if (splits.membership.ContainsCanonical(probe)) continue;
    candidates.push_back(id);
  }
  const auto target =
      role_task ? CandidateScorer::Target::kRole : CandidateScorer::Target::kValue;
  const std::vector<double> scores =
      scorer.ScoreSubstitutions(q.fact, q.position, target, candidates);
  const double true_score = scores[0];
  std::size_t rank = 1;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > true_score || (ties == TieMode::kPessimistic && scores[i] == true_score)) {
      ++rank;
    }
  }
  return rank;
}

namespace {

void AddRank(MetricBlock& b, std::size_t rank) {
  b.mrr += 1.0 / static_cast<double>(rank);
  b.hits1 += rank <= 1 ? 1.0 : 0.0;
  b.hits3 += rank <= 3 ? 1.0 : 0.0;
  b.hits10 += rank <= 10 ? 1.0 : 0.0;
  ++b.count;
}

void Finish(MetricBlock& b) {
  if (b.count == 0) return;
  const double n = static_cast<double>(b.count);
  b.mrr /= n;
  b.hits1 /= n;
  b.hits3 /= n;
  b.hits10 /= n;
}

}  // namespace

MetricsReport SummarizeRanks(std::vector<QueryRank> ranks) {
  MetricsReport report;
  for (const QueryRank& r : ranks) {
    const int t = static_cast<int>(r.task);
    report.has_task[t] = true;
    const Category c = r.arity == 2 ? Category::kBinary : Category::kNary;
    AddRank(report.blocks[t][static_cast<int>(c)], r.rank);
    AddRank(report.blocks[t][static_cast<int>(Category::kOverall)], r.rank);
    AddRank(report.by_arity[t][r.arity], r.rank);
  }
  for (auto& per_task : report.blocks)
    for (MetricBlock& b : per_task) Finish(b);
  for (auto& per_task : report.by_arity)
    for (auto& [arity, b] : per_task) Finish(b);
  report.ranks = std::move(ranks);
  return report;
}

std::vector<RankQuery> BuildQueries(const std::vector<Fact>& facts,
                                    std::span<const TaskKind> tasks) {
  if (facts.empty()) throw InvalidInputError("evaluation set is empty");
  std::vector<RankQuery> queries;
  for (TaskKind task : tasks)
    for (const Fact& f : facts)
      for (std::size_t i = 0; i < f.arity(); ++i) queries.push_back({f, i, task});
  return queries;
}

std::vector<std::size_t> RankQueries(std::span<const RankQuery> queries, const Model& model,
                                     const DatasetSplits& splits, TieMode ties,
                                     std::size_t workers) {
  const CandidateScorer scorer(model);
  std::vector<std::size_t> ranks(queries.size(), 0);
  workers = std::max<std::size_t>(1, std::min(workers, queries.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < queries.size(); ++i)
      ranks[i] = RankTarget(queries[i], scorer, splits, ties);
    return ranks;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < queries.size(); i += workers)
          ranks[i] = RankTarget(queries[i], scorer, splits, ties);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return ranks;
}

MetricsReport Evaluate(const std::vector<Fact>& facts, const Model& model,
                       const DatasetSplits& splits, const EvalOptions& options) {
  const std::vector<RankQuery> queries = BuildQueries(facts, options.tasks);
  const std::vector<std::size_t> ranks =
      RankQueries(queries, model, splits, options.ties, options.workers);
  std::vector<QueryRank> stored;
  stored.reserve(queries.size());
  for (std::size_t i = 0; i < queries.size(); ++i)
    stored.push_back({queries[i].target, queries[i].fact.arity(), ranks[i]});
  return SummarizeRanks(std::move(stored));
}

void WriteReportTsv(std::ostream& out, const MetricsReport& report) {
  char buf[64];
  for (TaskKind task : {TaskKind::kRole, TaskKind::kValue}) {
    if (!report.has_task[static_cast<int>(task)]) continue;
    for (Category c : {Category::kBinary, Category::kNary, Category::kOverall}) {
      const MetricBlock& b = report.Get(task, c);
      const std::pair<const char*, double> rows[] = {
          {"mrr", b.mrr}, {"hits@1", b.hits1}, {"hits@3", b.hits3}, {"hits@10", b.hits10}};
      for (const auto& [name, value] : rows) {
        std::snprintf(buf, sizeof(buf), "%.6f", value);
        out << TaskName(task) << '\t' << CategoryName(c) << '\t' << name << '\t' << buf << '\t'
            << b.count << '\n';
      }
    }
  }
}

std::string FormatReportTable(const MetricsReport& report) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof(line), "%-6s %-8s %8s %8s %8s %8s %8s\n", "task", "category",
                "MRR", "Hits@1", "Hits@3", "Hits@10", "queries");
  os << line;
  for (TaskKind task : {TaskKind::kRole, TaskKind::kValue}) {
    if (!report.has_task[static_cast<int>(task)]) continue;
    for (Category c : {Category::kBinary, Category::kNary, Category::kOverall}) {
      const MetricBlock& b = report.Get(task, c);
      std::snprintf(line, sizeof(line), "%-6s %-8s %8.4f %8.4f %8.4f %8.4f %8zu\n",
                    std::string(TaskName(task)).c_str(), std::string(CategoryName(c)).c_str(),
                    b.mrr, b.hits1, b.hits3, b.hits10, b.count);
      os << line;
    }
  }
  return os.str();
}

int Distinguishability(std::span<const double> positive, std::span<const double> negative) {
  if (positive.size() != negative.size()) {
    throw DimensionError("distinguishability: vector lengths differ");
  }
  int d = 0;
  for (std::size_t t = 0; t < positive.size(); ++t) {
    if (positive[t] > negative[t]) ++d;
    if (negative[t] > positive[t]) --d;
  }
  return d;
}

int Distinguishability(const Fact& positive, const Fact& negative, const Model& model) {
  return Distinguishability(model.Relatedness(positive), model.Relatedness(negative));
}

std::vector<CaseEntry> AnalyzeCase(const Fact& fact, std::size_t position, const Model& model,
                                   const Vocabulary& vocab, std::size_t top_n) {
  if (position >= fact.arity()) throw InvalidInputError("position outside fact");
  if (vocab.num_values() != model.dims().num_values) {
    throw DimensionError("vocabulary and model disagree on |V|");
  }
  const std::vector<double> reference = model.Relatedness(fact);
  std::vector<std::uint32_t> candidates;
  for (std::uint32_t v = 0; v < vocab.num_values(); ++v)
    if (v != fact.pairs[position].value) candidates.push_back(v);
  const CandidateScorer scorer(model);
  const auto relatedness = scorer.RelatednessSubstitutions(fact, position,
                                                           CandidateScorer::Target::kValue,
                                                           candidates);
  const auto scores =
      scorer.ScoreSubstitutions(fact, position, CandidateScorer::Target::kValue, candidates);
  std::vector<CaseEntry> entries;
  entries.reserve(candidates.size());
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    entries.push_back({candidates[i], vocab.ValueName(candidates[i]),
                       Distinguishability(reference, relatedness[i]), scores[i]});
  }
  std::sort(entries.begin(), entries.end(), [](const CaseEntry& a, const CaseEntry& b) {
    if (a.distinguishability != b.distinguishability) {
      return a.distinguishability < b.distinguishability;
    }
    return a.token < b.token;
  });
  if (entries.size() > top_n) entries.resize(top_n);
  return entries;
}

}  // namespace nalp
