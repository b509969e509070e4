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

// Command-line front end: train, evaluate, analyze, subset, grad-check and
// flops. Every command echoes its resolved flags to <out>/config.txt, which
// can be fed back with --config; flags given on the command line win.
//
// Exit status: 0 ok, 1 usage or configuration error, 2 data error,
// 3 numerical failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "nalp/checkpoint.hpp"
#include "nalp/data.hpp"
#include "nalp/errors.hpp"
#include "nalp/eval.hpp"
#include "nalp/gradcheck.hpp"
#include "nalp/model.hpp"
#include "nalp/sampling.hpp"
#include "nalp/training.hpp"

namespace nalp {
namespace {

namespace fs = std::filesystem;

std::string ToText(const std::string& v) { return v; }
std::string ToText(bool v) { return v ? "true" : "false"; }
std::string ToText(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}
template <typename T>
std::string ToText(const T& v) {
  return std::to_string(v);
}

// Registers options on a subcommand and remembers how to echo them.
class FlagSet {
 public:
  explicit FlagSet(CLI::App* app) : app_(app) {}

  template <typename T>
  CLI::Option* Add(const std::string& name, T& value, const std::string& help) {
    echo_.emplace_back(name, [&value] { return ToText(value); });
    return app_->add_option("--" + name, value, help)->capture_default_str();
  }

  CLI::Option* Flag(const std::string& name, bool& value, const std::string& help) {
    echo_.emplace_back(name, [&value] { return ToText(value); });
    return app_->add_flag("--" + name, value, help);
  }

  void WriteEcho(const fs::path& out_dir) const {
    fs::create_directories(out_dir);
    std::ofstream out(out_dir / "config.txt");
    out << "# nalp " << app_->get_name() << ", replay with --config\n";
    out << '[' << app_->get_name() << "]\n";
    for (const auto& [name, get] : echo_) out << name << '=' << get() << '\n';
    if (!out) throw DataError("cannot write " + (out_dir / "config.txt").string());
  }

  CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<std::string()>>> echo_;
};

struct ModelFlags {
  std::string variant = "nalp";
  std::string encoder = "conv";
  std::string aggregator = "min";
  std::string type_pairing = "diagonal";

  void Register(FlagSet& f) {
    f.Add("mode", variant, "Model variant: nalp, tnalp, nalp+ or tnalp+");
    f.Add("encoder", encoder, "Pair encoder: conv, plus or mul");
    f.Add("aggregator", aggregator, "Relatedness aggregator: min, emax or emean");
    f.Add("type-pairing", type_pairing, "Type compatibility pairing: diagonal or cross");
  }

  void Apply(TrainConfig* c) const {
    ApplyVariant(variant, c);
    c->model.pair_encoder = ParsePairEncoder(encoder);
    c->model.aggregator = ParseAggregator(aggregator);
    c->model.type_pairing = ParseTypePairing(type_pairing);
  }
};

void RegisterDims(FlagSet& f, TrainConfig& c) {
  f.Add("k", c.k, "Role and value embedding size")->check(CLI::PositiveNumber);
  f.Add("k-type", c.k_type, "Type embedding size (tNaLP)")->check(CLI::PositiveNumber);
  f.Add("nf", c.n_f, "Number of convolution filters")->check(CLI::PositiveNumber);
  f.Add("n-gfcn", c.n_gfcn, "g-FCN width")->check(CLI::PositiveNumber);
  f.Add("n-tfcn", c.n_tfcn, "Type FCN width (tNaLP)")->check(CLI::PositiveNumber);
}

struct DatasetFlags {
  std::string dataset;
  std::string format = "jsonl-rv";

  void Register(FlagSet& f, bool required) {
    auto* opt = f.Add("dataset", dataset, "Directory holding train/valid/test files");
    if (required) opt->required();
    f.Add("format", format, "Dataset format: jsonl-rv or tsv-rv");
  }

  LoadedDataset Load() const {
    LoadedDataset ds = LoadDataset(dataset, ParseDatasetFormat(format));
    for (const std::string& w : ds.warnings) std::cerr << "warning: " << w << '\n';
    return ds;
  }
};

const std::vector<Fact>& SplitNamed(const DatasetSplits& s, const std::string& name) {
  if (name == "train") return s.train;
  if (name == "valid") return s.valid;
  if (name == "test") return s.test;
  throw ConfigError("unknown split '" + name + "' (expected train, valid or test)");
}

std::vector<TaskKind> TasksNamed(const std::string& name) {
  if (name == "both") return {TaskKind::kRole, TaskKind::kValue};
  return {ParseTask(name)};
}

TieMode TiesNamed(const std::string& name) {
  if (name == "optimistic") return TieMode::kOptimistic;
  if (name == "pessimistic") return TieMode::kPessimistic;
  throw ConfigError("unknown tie mode '" + name + "'");
}

void WriteReport(const fs::path& out_dir, const MetricsReport& report) {
  std::ofstream tsv(out_dir / "report.tsv");
  WriteReportTsv(tsv, report);
  std::ofstream txt(out_dir / "report.txt");
  txt << FormatReportTable(report);
  if (!tsv || !txt) throw DataError("cannot write report in " + out_dir.string());
}

// ---------------------------------------------------------------- train

struct TrainCommand {
  TrainConfig config;
  ModelFlags model;
  DatasetFlags data;
  std::string out;
  std::string sampler_domain = "role-specific";
  bool eval_test = false;
  bool quiet = false;
  std::optional<FlagSet> flags;

  void Register(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("train", "Train a model and save the best checkpoint");
    flags.emplace(sub);
    FlagSet& f = *flags;
    data.Register(f, true);
    f.Add("out", out, "Output directory")->required();
    model.Register(f);
    RegisterDims(f, config);
    f.Add("batch-size", config.batch_size, "Positives per batch")->check(CLI::PositiveNumber);
    f.Add("lr", config.learning_rate, "Adam learning rate");
    f.Add("max-epochs", config.max_epochs, "Epoch limit")->check(CLI::PositiveNumber);
    f.Add("eval-every", config.eval_every, "Epochs between validation probes (0 disables)");
    f.Add("patience", config.patience, "Probes without improvement before stopping");
    f.Add("valid-cap", config.valid_query_cap, "Validation queries per probe (0 = all)");
    f.Add("branch-prob", config.sampler.branch_prob,
          "Mixed sampling: probability of single-element corruption");
    f.Add("value-domain", sampler_domain, "Value corruption domain: role-specific or global");
    f.Add("max-retries", config.sampler.max_retries, "Negative sampling retries");
    f.Add("seed", config.seed, "Random seed");
    f.Add("workers", config.workers, "Evaluation threads")->check(CLI::PositiveNumber);
    f.Flag("eval-test", eval_test, "Evaluate the best model on the test split afterwards");
    f.Flag("quiet", quiet, "Do not print epoch lines");
  }

  int Run() {
    model.Apply(&config);
    config.sampler.value_domain = ParseValueDomain(sampler_domain);
    config.Validate();
    const fs::path out_dir(out);
    flags->WriteEcho(out_dir);
    const LoadedDataset ds = data.Load();

    std::ofstream log(out_dir / "train_log.tsv");
    log << "# epoch\tmean_loss\tseconds\t[valid_mrr\thits1\thits3\thits10]\n";
    TrainHooks hooks;
    hooks.on_epoch = [&](const EpochLog& e) {
      WriteEpochLine(log, e);
      log.flush();
      if (!quiet) WriteEpochLine(std::cout, e);
    };
    const TrainResult result = Train(ds.splits, ds.vocab, config, hooks);
    SaveCheckpoint(out_dir / "model.ckpt", result.best, ds.vocab);
    std::cout << "best epoch " << result.best_epoch;
    if (result.probed) std::cout << ", validation MRR " << ToText(result.best_valid_mrr);
    std::cout << "\ncheckpoint written to " << (out_dir / "model.ckpt").string() << '\n';

    if (eval_test) {
      if (ds.splits.test.empty()) throw DataError("--eval-test: test split is empty");
      EvalOptions opts;
      opts.workers = config.workers;
      const MetricsReport report = Evaluate(ds.splits.test, result.best, ds.splits, opts);
      WriteReport(out_dir, report);
      std::cout << FormatReportTable(report);
    }
    return 0;
  }
};

// ---------------------------------------------------------------- evaluate

struct EvaluateCommand {
  std::string checkpoint;
  DatasetFlags data;
  std::string out;
  std::string split = "test";
  std::string task = "both";
  std::string ties = "optimistic";
  std::size_t workers = 1;
  std::optional<FlagSet> flags;

  void Register(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("evaluate", "Filtered ranking metrics for a checkpoint");
    flags.emplace(sub);
    FlagSet& f = *flags;
    f.Add("checkpoint", checkpoint, "Checkpoint file")->required();
    data.Register(f, true);
    f.Add("out", out, "Output directory")->required();
    f.Add("split", split, "Split to rank: train, valid or test");
    f.Add("task", task, "Prediction task: role, value or both");
    f.Add("ties", ties, "Tie handling: optimistic or pessimistic");
    f.Add("workers", workers, "Evaluation threads")->check(CLI::PositiveNumber);
  }

  int Run() {
    EvalOptions opts;
    opts.tasks = TasksNamed(task);
    opts.ties = TiesNamed(ties);
    opts.workers = workers;
    const fs::path out_dir(out);
    flags->WriteEcho(out_dir);
    const Checkpoint ck = LoadCheckpoint(fs::path(checkpoint));
    const LoadedDataset ds = data.Load();
    CheckVocabularyMatches(ck, ds.vocab);
    const MetricsReport report =
        Evaluate(SplitNamed(ds.splits, split), ck.model, ds.splits, opts);
    WriteReport(out_dir, report);
    std::cout << FormatReportTable(report);
    return 0;
  }
};

// ---------------------------------------------------------------- analyze

struct AnalyzeCommand {
  std::string checkpoint;
  DatasetFlags data;
  std::string out;
  std::string split = "test";
  std::string fact_line;
  std::size_t fact_index = 0;
  std::size_t position = 0;
  std::size_t top = 10;
  std::optional<FlagSet> flags;

  void Register(CLI::App& app) {
    CLI::App* sub = app.add_subcommand(
        "analyze", "List the least distinguishable value corruptions of one fact");
    flags.emplace(sub);
    FlagSet& f = *flags;
    f.Add("checkpoint", checkpoint, "Checkpoint file")->required();
    data.Register(f, false);
    f.Add("out", out, "Output directory")->required();
    f.Add("split", split, "Split holding the fact when --fact-index is used");
    f.Add("fact", fact_line, "Fact written as one dataset line (overrides --fact-index)");
    f.Add("fact-index", fact_index, "Index of the fact within --split");
    f.Add("position", position, "Pair position whose value is replaced");
    f.Add("top", top, "Number of corruptions to list")->check(CLI::PositiveNumber);
  }

  Fact ResolveFact(const Checkpoint& ck) const {
    if (!fact_line.empty()) {
      Fact f;
      for (const auto& [role, value] : ParseFactLine(fact_line, ParseDatasetFormat(data.format))) {
        RoleId r = 0;
        ValueId v = 0;
        if (!ck.vocab.FindRole(role, &r)) throw DataError("unknown role '" + role + "'");
        if (!ck.vocab.FindValue(value, &v)) throw DataError("unknown value '" + value + "'");
        f.pairs.push_back({r, v});
      }
      return f;
    }
    if (data.dataset.empty()) throw ConfigError("analyze needs --fact or --dataset");
    const LoadedDataset ds = data.Load();
    CheckVocabularyMatches(ck, ds.vocab);
    const std::vector<Fact>& facts = SplitNamed(ds.splits, split);
    if (fact_index >= facts.size()) {
      throw InvalidInputError("--fact-index " + std::to_string(fact_index) + " outside split of " +
                              std::to_string(facts.size()) + " facts");
    }
    return facts[fact_index];
  }

  int Run() {
    const fs::path out_dir(out);
    flags->WriteEcho(out_dir);
    const Checkpoint ck = LoadCheckpoint(fs::path(checkpoint));
    const Fact fact = ResolveFact(ck);
    const auto entries = AnalyzeCase(fact, position, ck.model, ck.vocab, top);
    std::ofstream tsv(out_dir / "analysis.tsv");
    tsv << "token\tdistinguishability\tscore\n";
    std::cout << "fact:";
    for (const auto& [role, value] : DecodeFact(fact, ck.vocab)) std::cout << ' ' << role << ':' << value;
    std::cout << "\nreplacing position " << position << "\n";
    for (const CaseEntry& e : entries) {
      tsv << e.token << '\t' << e.distinguishability << '\t' << ToText(e.score) << '\n';
      std::printf("%-32s d=%-6d score=%.6f\n", e.token.c_str(), e.distinguishability, e.score);
    }
    return 0;
  }
};

// ---------------------------------------------------------------- subset

struct SubsetCommand {
  DatasetFlags data;
  std::string out;
  double keep_pct = -1.0;
  std::string ratio;
  std::uint64_t seed = 0;
  std::optional<FlagSet> flags;

  void Register(CLI::App& app) {
    CLI::App* sub = app.add_subcommand(
        "subset", "Write a copy of a dataset keeping a share of its binary facts");
    flags.emplace(sub);
    FlagSet& f = *flags;
    data.Register(f, true);
    f.Add("out", out, "Directory for the derived dataset")->required();
    f.Add("keep-pct", keep_pct, "Percentage of binary facts to keep in every split");
    f.Add("ratio", ratio, "Target binary:n-ary ratio in train, e.g. 1:1 (alternative to --keep-pct)");
    f.Add("seed", seed, "Random seed");
  }

  int Run() {
    if ((keep_pct >= 0.0) == !ratio.empty()) {
      throw ConfigError("subset needs exactly one of --keep-pct and --ratio");
    }
    double bw = 0;
    double nw = 0;
    if (!ratio.empty()) {
      const auto colon = ratio.find(':');
      try {
        if (colon == std::string::npos) throw std::invalid_argument("no colon");
        bw = std::stod(ratio.substr(0, colon));
        nw = std::stod(ratio.substr(colon + 1));
      } catch (const std::logic_error&) {
        throw ConfigError("--ratio must look like B:N, got '" + ratio + "'");
      }
    }
    const fs::path out_dir(out);
    flags->WriteEcho(out_dir);
    const LoadedDataset ds = data.Load();
    const double pct = ratio.empty() ? keep_pct : BinaryKeepPercentForRatio(ds.splits.train, bw, nw);
    const DatasetSplits sub = DeriveBinarySubset(ds.splits, pct, seed);
    WriteDataset(out_dir, ParseDatasetFormat(data.format), ds.vocab, sub);
    const char* names[] = {"train", "valid", "test"};
    const std::vector<Fact>* before[] = {&ds.splits.train, &ds.splits.valid, &ds.splits.test};
    const std::vector<Fact>* after[] = {&sub.train, &sub.valid, &sub.test};
    std::printf("keeping %.4f%% of binary facts\n", pct);
    for (int s = 0; s < 3; ++s) {
      const CategoryCounts a = CountCategories(*before[s]);
      const CategoryCounts b = CountCategories(*after[s]);
      std::printf("%-5s binary %zu -> %zu, n-ary %zu -> %zu\n", names[s], a.binary, b.binary,
                  a.nary, b.nary);
    }
    return 0;
  }
};

// ---------------------------------------------------------------- grad-check

struct GradCheckCommand {
  TrainConfig config;
  ModelFlags model;
  std::size_t roles = 5;
  std::size_t values = 8;
  double h = 1e-5;
  double tolerance = 1e-5;
  bool all = false;
  bool eval_bn = false;
  std::string out;
  std::optional<FlagSet> flags;

  void Register(CLI::App& app) {
    CLI::App* sub = app.add_subcommand(
        "grad-check", "Compare analytic gradients with central finite differences");
    flags.emplace(sub);
    FlagSet& f = *flags;
    config.k = 4;
    config.n_f = 3;
    config.n_gfcn = 5;
    config.k_type = 3;
    config.n_tfcn = 4;
    model.Register(f);
    RegisterDims(f, config);
    f.Add("roles", roles, "Synthetic role count")->check(CLI::Range(2, 1000));
    f.Add("values", values, "Synthetic value count")->check(CLI::Range(2, 1000));
    f.Add("step", h, "Finite difference step");
    f.Add("tolerance", tolerance, "Maximum allowed relative error");
    f.Add("seed", config.seed, "Random seed");
    f.Flag("all", all, "Check every encoder x aggregator x mode combination");
    f.Flag("eval-bn", eval_bn, "Use eval-mode batchnorm instead of batch statistics");
    f.Add("out", out, "Optional output directory for the config echo");
  }

  // Checks one configuration; returns the max relative error.
  double CheckOne(TrainConfig c, Rng& rng) const {
    if (c.model.pair_encoder != PairEncoder::kConv) c.n_f = c.k;
    c.Validate();
    ModelDims dims;
    dims.num_roles = roles;
    dims.num_values = values;
    dims.k = c.k;
    dims.n_f = c.n_f;
    dims.n_gfcn = c.n_gfcn;
    if (c.model.mode == ModelMode::kTNaLP) {
      dims.k_type = c.k_type;
      dims.n_tfcn = c.n_tfcn;
    }
    Model m(c.model, dims);
    InitializeParameters(m, rng);
    // Zero biases put relu inputs exactly at 0, where the two one-sided
    // derivatives differ. Draw them off zero like trained parameters.
    std::uniform_real_distribution<double> u(-0.5, 0.5);
    NaLPParams& p = m.params();
    for (double& v : p.g_bias.value.data()) v = u(rng);
    p.f_bias.value[0] = u(rng);
    for (double& v : p.bn.gamma.value.data()) v = 1.0 + u(rng);
    for (double& v : p.bn.beta.value.data()) v = u(rng);
    for (double& v : p.bn.running_mean) v = 0.1 * u(rng);
    for (double& v : p.bn.running_var) v = 0.5 + std::abs(u(rng));
    if (m.has_type_branch()) {
      TypeParams& t = m.type_params();
      for (double& v : t.t_bias.value.data()) v = u(rng);
      t.y_bias.value[0] = u(rng);
    }
    const BnMode bn = eval_bn ? BnMode::kEval : BnMode::kTrain;
    std::uniform_int_distribution<RoleId> role(0, static_cast<RoleId>(roles - 1));
    std::uniform_int_distribution<ValueId> value(0, static_cast<ValueId>(values - 1));
    auto draw = [&](std::size_t arity) {
      Fact f;
      for (std::size_t i = 0; i < arity; ++i) f.pairs.push_back({role(rng), value(rng)});
      return f;
    };
    auto params = m.Parameters();
    // Redraw batches that put a min / relu switch within +-h.
    std::vector<LabeledFact> batch;
    for (int attempt = 0;; ++attempt) {
      if (attempt == 50) throw NumericalError("no differentiable batch found in 50 draws");
      batch.clear();
      for (std::size_t a : {2, 4, 2, 4}) batch.push_back({draw(a), 1});
      for (std::size_t a : {4, 2, 2}) batch.push_back({draw(a), -1});
      if (IsLocallySmooth([&] { return m.Loss(batch, bn); }, params, h)) break;
    }
    m.ZeroGrads();
    m.LossAndGrads(batch, bn, false);
    const GradCheckReport report =
        FiniteDifferenceCheck([&] { return m.Loss(batch, bn); }, params, h, tolerance);
    std::printf("%-6s %-6s %-6s", std::string(VariantName(c)).c_str(),
                std::string(EncoderName(c.model.pair_encoder)).c_str(),
                std::string(AggregatorName(c.model.aggregator)).c_str());
    for (const GradCheckEntry& e : report.params) std::printf("  %s=%.2e", e.name.c_str(), e.max_rel_error);
    std::printf("\n");
    return report.max_rel_error;
  }

  int Run() {
    model.Apply(&config);
    if (!out.empty()) flags->WriteEcho(out);
    Rng rng(config.seed);
    double worst = 0;
    if (all) {
      for (PairEncoder enc : {PairEncoder::kConv, PairEncoder::kPlus, PairEncoder::kMul})
        for (Aggregator agg : {Aggregator::kMin, Aggregator::kMax, Aggregator::kMean})
          for (ModelMode mode : {ModelMode::kNaLP, ModelMode::kTNaLP}) {
            TrainConfig c = config;
            c.model.pair_encoder = enc;
            c.model.aggregator = agg;
            c.model.mode = mode;
            worst = std::max(worst, CheckOne(c, rng));
          }
    } else {
      worst = CheckOne(config, rng);
    }
    std::printf("max relative error %.3e (tolerance %.1e)\n", worst, tolerance);
    if (worst >= tolerance) {
      std::fprintf(stderr, "gradient check failed\n");
      return 3;
    }
    return 0;
  }
};

// ---------------------------------------------------------------- flops

struct FlopsCommand {
  TrainConfig config;
  ModelFlags model;
  DatasetFlags data;
  std::size_t roles = 0;
  std::size_t values = 0;
  std::size_t arity = 3;
  std::string out;
  std::optional<FlagSet> flags;

  void Register(CLI::App& app) {
    CLI::App* sub = app.add_subcommand("flops", "Parameter and per-fact FLOP counts");
    flags.emplace(sub);
    FlagSet& f = *flags;
    model.Register(f);
    RegisterDims(f, config);
    data.Register(f, false);
    f.Add("roles", roles, "Role count (or take it from --dataset)");
    f.Add("values", values, "Value count (or take it from --dataset)");
    f.Add("arity", arity, "Fact arity for the FLOP count")->check(CLI::PositiveNumber);
    f.Add("out", out, "Optional output directory for the config echo");
  }

  int Run() {
    model.Apply(&config);
    config.Validate();
    if (!out.empty()) flags->WriteEcho(out);
    if (!data.dataset.empty()) {
      const LoadedDataset ds = data.Load();
      roles = ds.vocab.num_roles();
      values = ds.vocab.num_values();
    }
    if (roles == 0 || values == 0) throw ConfigError("flops needs --roles and --values or --dataset");
    ModelDims dims;
    dims.num_roles = roles;
    dims.num_values = values;
    dims.k = config.k;
    dims.n_f = config.n_f;
    dims.n_gfcn = config.n_gfcn;
    dims.k_type = config.k_type;
    dims.n_tfcn = config.n_tfcn;
    const ParamFlopReport r = CountParamsFlops(config.model, dims, arity);
    std::printf("parameters\t%llu\n", static_cast<unsigned long long>(r.parameters));
    std::printf("type_parameters\t%llu\n", static_cast<unsigned long long>(r.type_parameters));
    std::printf("flops_per_fact\t%llu\n", static_cast<unsigned long long>(r.flops));
    return 0;
  }
};

int Main(int argc, char** argv) {
  CLI::App app{"NaLP family link prediction for n-ary relational facts"};
  app.require_subcommand(1);
  app.fallthrough();
  app.set_config("--config", "", "Read flags from a config.txt written by an earlier run");
  TrainCommand train;
  EvaluateCommand evaluate;
  AnalyzeCommand analyze;
  SubsetCommand subset;
  GradCheckCommand grad_check;
  FlopsCommand flops;
  train.Register(app);
  evaluate.Register(app);
  analyze.Register(app);
  subset.Register(app);
  grad_check.Register(app);
  flops.Register(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand("train")) return train.Run();
    if (app.got_subcommand("evaluate")) return evaluate.Run();
    if (app.got_subcommand("analyze")) return analyze.Run();
    if (app.got_subcommand("subset")) return subset.Run();
    if (app.got_subcommand("grad-check")) return grad_check.Run();
    if (app.got_subcommand("flops")) return flops.Run();
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}

}  // namespace
}  // namespace nalp

int main(int argc, char** argv) { return nalp::Main(argc, argv); }
