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

// Python bindings. Facts cross the boundary as lists of (role, value) string
// pairs; ids stay on the C++ side.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "nalp/checkpoint.hpp"
#include "nalp/data.hpp"
#include "nalp/errors.hpp"
#include "nalp/eval.hpp"
#include "nalp/model.hpp"
#include "nalp/training.hpp"

namespace py = pybind11;

namespace nalp {
namespace {

using NamedFact = std::vector<std::pair<std::string, std::string>>;

Fact Encode(const NamedFact& named, const Vocabulary& vocab) {
  Fact f;
  for (const auto& [role, value] : named) {
    RoleId r = 0;
    ValueId v = 0;
    if (!vocab.FindRole(role, &r)) throw DataError("unknown role '" + role + "'");
    if (!vocab.FindValue(value, &v)) throw DataError("unknown value '" + value + "'");
    f.pairs.push_back({r, v});
  }
  return f;
}

const std::vector<Fact>& SplitNamed(const DatasetSplits& s, const std::string& name) {
  if (name == "train") return s.train;
  if (name == "valid") return s.valid;
  if (name == "test") return s.test;
  throw ConfigError("unknown split '" + name + "'");
}

struct Dataset {
  LoadedDataset data;

  std::vector<NamedFact> Facts(const std::string& split) const {
    std::vector<NamedFact> out;
    for (const Fact& f : SplitNamed(data.splits, split)) out.push_back(DecodeFact(f, data.vocab));
    return out;
  }
};

// A trained model together with the vocabulary it was trained on.
struct Predictor {
  Model model;
  Vocabulary vocab;

  double Score(const NamedFact& fact) const { return model.Score(Encode(fact, vocab)); }

  py::dict ScoreDetail(const NamedFact& fact) const {
    const FactScore s = model.ScoreDetail(Encode(fact, vocab));
    py::dict d;
    d["base"] = s.base;
    d["type"] = s.type;
    d["score"] = s.score;
    return d;
  }

  std::vector<double> Relatedness(const NamedFact& fact) const {
    return model.Relatedness(Encode(fact, vocab));
  }

  int Distinguish(const NamedFact& pos, const NamedFact& neg) const {
    return Distinguishability(Encode(pos, vocab), Encode(neg, vocab), model);
  }

  py::list Analyze(const NamedFact& fact, std::size_t position, std::size_t top) const {
    py::list out;
    for (const CaseEntry& e : AnalyzeCase(Encode(fact, vocab), position, model, vocab, top)) {
      out.append(py::make_tuple(e.token, e.distinguishability, e.score));
    }
    return out;
  }

  void Save(const std::filesystem::path& path) const { SaveCheckpoint(path, model, vocab); }

  std::string ToBytes() const {
    std::ostringstream out;
    SaveCheckpoint(out, model, vocab);
    return out.str();
  }
};

py::dict BlockDict(const MetricBlock& b) {
  py::dict d;
  d["mrr"] = b.mrr;
  d["hits1"] = b.hits1;
  d["hits3"] = b.hits3;
  d["hits10"] = b.hits10;
  d["count"] = b.count;
  return d;
}

// {task: {category: {mrr, hits1, hits3, hits10, count}}}
py::dict ReportDict(const MetricsReport& r) {
  py::dict out;
  for (TaskKind t : {TaskKind::kRole, TaskKind::kValue}) {
    if (!r.has_task[static_cast<int>(t)]) continue;
    py::dict cats;
    for (Category c : {Category::kBinary, Category::kNary, Category::kOverall}) {
      cats[py::str(std::string(CategoryName(c)))] = BlockDict(r.Get(t, c));
    }
    out[py::str(std::string(TaskName(t)))] = cats;
  }
  return out;
}

py::dict EvaluatePy(const Predictor& p, const Dataset& ds, const std::string& split,
                    const std::vector<std::string>& tasks, const std::string& ties,
                    std::size_t workers) {
  CheckVocabularyMatches(Checkpoint{p.model, p.vocab, {}}, ds.data.vocab);
  EvalOptions opts;
  opts.tasks.clear();
  for (const std::string& t : tasks) opts.tasks.push_back(ParseTask(t));
  if (ties == "optimistic") {
    opts.ties = TieMode::kOptimistic;
  } else if (ties == "pessimistic") {
    opts.ties = TieMode::kPessimistic;
  } else {
    throw ConfigError("unknown tie mode '" + ties + "'");
  }
  opts.workers = workers;
  MetricsReport report;
  {
    py::gil_scoped_release release;
    report = Evaluate(SplitNamed(ds.data.splits, split), p.model, ds.data.splits, opts);
  }
  return ReportDict(report);
}

py::tuple TrainPy(const Dataset& ds, const TrainConfig& config,
                  const std::function<void(py::dict)>& on_epoch) {
  TrainHooks hooks;
  if (on_epoch) {
    hooks.on_epoch = [&](const EpochLog& e) {
      py::gil_scoped_acquire acquire;
      py::dict d;
      d["epoch"] = e.epoch;
      d["mean_loss"] = e.mean_loss;
      d["seconds"] = e.seconds;
      if (e.probe) d["valid"] = BlockDict(*e.probe);
      on_epoch(d);
    };
  }
  std::optional<TrainResult> result;
  {
    py::gil_scoped_release release;
    result.emplace(Train(ds.data.splits, ds.data.vocab, config, hooks));
  }
  py::list log;
  for (const EpochLog& e : result->log) log.append(py::make_tuple(e.epoch, e.mean_loss));
  Predictor p{std::move(result->best), ds.data.vocab};
  return py::make_tuple(std::move(p), result->best_epoch, result->best_valid_mrr, log);
}

Predictor LoadPredictor(const std::filesystem::path& path) {
  Checkpoint ck = LoadCheckpoint(path);
  return Predictor{std::move(ck.model), std::move(ck.vocab)};
}

py::dict CountPy(const TrainConfig& c, std::size_t roles, std::size_t values, std::size_t arity) {
  c.Validate();
  ModelDims dims;
  dims.num_roles = roles;
  dims.num_values = values;
  dims.k = c.k;
  dims.n_f = c.n_f;
  dims.n_gfcn = c.n_gfcn;
  dims.k_type = c.k_type;
  dims.n_tfcn = c.n_tfcn;
  const ParamFlopReport r = CountParamsFlops(c.model, dims, arity);
  py::dict d;
  d["parameters"] = r.parameters;
  d["type_parameters"] = r.type_parameters;
  d["flops"] = r.flops;
  return d;
}

}  // namespace
}  // namespace nalp

PYBIND11_MODULE(_nalp, m) {
  using namespace nalp;
  m.doc() = "NaLP family link prediction for n-ary relational facts";

  auto base = py::register_exception<Error>(m, "NalpError", PyExc_RuntimeError);
  py::register_exception<ConfigError>(m, "ConfigError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());
  py::register_exception<FormatError>(m, "FormatError", base.ptr());
  py::register_exception<DimensionError>(m, "DimensionError", base.ptr());
  py::register_exception<SamplingExhaustedError>(m, "SamplingExhaustedError", base.ptr());
  py::register_exception<NumericalError>(m, "NumericalError", base.ptr());
  py::register_exception<InvalidInputError>(m, "InvalidInputError", base.ptr());

  py::class_<TrainConfig>(m, "TrainConfig")
      .def(py::init<>())
      .def_readwrite("k", &TrainConfig::k)
      .def_readwrite("k_type", &TrainConfig::k_type)
      .def_readwrite("n_f", &TrainConfig::n_f)
      .def_readwrite("n_gfcn", &TrainConfig::n_gfcn)
      .def_readwrite("n_tfcn", &TrainConfig::n_tfcn)
      .def_readwrite("batch_size", &TrainConfig::batch_size)
      .def_readwrite("learning_rate", &TrainConfig::learning_rate)
      .def_readwrite("max_epochs", &TrainConfig::max_epochs)
      .def_readwrite("eval_every", &TrainConfig::eval_every)
      .def_readwrite("patience", &TrainConfig::patience)
      .def_readwrite("valid_query_cap", &TrainConfig::valid_query_cap)
      .def_readwrite("workers", &TrainConfig::workers)
      .def_readwrite("seed", &TrainConfig::seed)
      .def_property(
          "variant", [](const TrainConfig& c) { return VariantName(c); },
          [](TrainConfig& c, const std::string& v) { ApplyVariant(v, &c); })
      .def_property(
          "encoder",
          [](const TrainConfig& c) { return std::string(EncoderName(c.model.pair_encoder)); },
          [](TrainConfig& c, const std::string& v) { c.model.pair_encoder = ParsePairEncoder(v); })
      .def_property(
          "aggregator",
          [](const TrainConfig& c) { return std::string(AggregatorName(c.model.aggregator)); },
          [](TrainConfig& c, const std::string& v) { c.model.aggregator = ParseAggregator(v); })
      .def_property(
          "type_pairing",
          [](const TrainConfig& c) { return std::string(PairingName(c.model.type_pairing)); },
          [](TrainConfig& c, const std::string& v) { c.model.type_pairing = ParseTypePairing(v); })
      .def_property(
          "branch_prob", [](const TrainConfig& c) { return c.sampler.branch_prob; },
          [](TrainConfig& c, double v) { c.sampler.branch_prob = v; })
      .def("validate", &TrainConfig::Validate);

  py::class_<Dataset>(m, "Dataset")
      .def_static(
          "load",
          [](const std::filesystem::path& dir, const std::string& format) {
            return Dataset{LoadDataset(dir, ParseDatasetFormat(format))};
          },
          py::arg("directory"), py::arg("format") = "jsonl-rv")
      .def_property_readonly("roles", [](const Dataset& d) { return d.data.vocab.roles(); })
      .def_property_readonly("values", [](const Dataset& d) { return d.data.vocab.values(); })
      .def_property_readonly("warnings", [](const Dataset& d) { return d.data.warnings; })
      .def("facts", &Dataset::Facts, py::arg("split"))
      .def("contains",
           [](const Dataset& d, const NamedFact& f) {
             return d.data.splits.Contains(Encode(f, d.data.vocab));
           })
      .def(
          "binary_subset",
          [](const Dataset& d, double keep_pct, std::uint64_t seed) {
            return Dataset{{d.data.vocab, DeriveBinarySubset(d.data.splits, keep_pct, seed), {}}};
          },
          py::arg("keep_pct"), py::arg("seed") = 0)
      .def(
          "save",
          [](const Dataset& d, const std::filesystem::path& dir, const std::string& format) {
            WriteDataset(dir, ParseDatasetFormat(format), d.data.vocab, d.data.splits);
          },
          py::arg("directory"), py::arg("format") = "jsonl-rv");

  py::class_<Predictor>(m, "Predictor")
      .def("score", &Predictor::Score, py::arg("fact"))
      .def("score_detail", &Predictor::ScoreDetail, py::arg("fact"))
      .def("relatedness", &Predictor::Relatedness, py::arg("fact"))
      .def("distinguishability", &Predictor::Distinguish, py::arg("positive"), py::arg("negative"))
      .def("analyze", &Predictor::Analyze, py::arg("fact"), py::arg("position"),
           py::arg("top") = 10)
      .def("save", &Predictor::Save, py::arg("path"))
      .def("to_bytes", [](const Predictor& p) { return py::bytes(p.ToBytes()); })
      .def_property_readonly("mode", [](const Predictor& p) {
        return std::string(ModeName(p.model.config().mode));
      });

  m.def("load_checkpoint", &LoadPredictor, py::arg("path"));
  m.def("train", &TrainPy, py::arg("dataset"), py::arg("config"),
        py::arg("on_epoch") = std::function<void(py::dict)>{},
        "Returns (predictor, best_epoch, best_valid_mrr, [(epoch, mean_loss)]).");
  m.def("evaluate", &EvaluatePy, py::arg("predictor"), py::arg("dataset"),
        py::arg("split") = "test", py::arg("tasks") = std::vector<std::string>{"role", "value"},
        py::arg("ties") = "optimistic", py::arg("workers") = 1);
  m.def("count_params_flops", &CountPy, py::arg("config"), py::arg("num_roles"),
        py::arg("num_values"), py::arg("arity") = 3);
  m.def("softplus", &Softplus, py::arg("x"));
}
