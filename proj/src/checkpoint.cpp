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

#include "nalp/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <vector>

#include "nalp/errors.hpp"

namespace nalp {

namespace {

void PutU32(std::ostream& out, std::uint32_t v) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 4);
}

void PutU64(std::ostream& out, std::uint64_t v) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
  out.write(b, 8);
}

void PutString(std::ostream& out, const std::string& s) {
  PutU32(out, static_cast<std::uint32_t>(s.size()));
  out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

void PutArray(std::ostream& out, const std::string& name, const Matrix& m) {
  PutString(out, name);
  PutU64(out, m.rows());
  PutU64(out, m.cols());
  for (double v : m.data()) PutU64(out, std::bit_cast<std::uint64_t>(v));
}

class Reader {
 public:
  explicit Reader(std::istream& in) : in_(in) {}

  void Bytes(char* dst, std::size_t n) {
    in_.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in_.gcount()) != n) throw FormatError("checkpoint truncated");
  }
  std::uint32_t U32() {
    unsigned char b[4];
    Bytes(reinterpret_cast<char*>(b), 4);
    std::uint32_t v = 0;
    for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::uint64_t U64() {
    unsigned char b[8];
    Bytes(reinterpret_cast<char*>(b), 8);
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
  }
  std::string String() {
    const std::uint32_t n = U32();
    std::string s(n, '\0');
    Bytes(s.data(), n);
    return s;
  }

 private:
  std::istream& in_;
};

std::map<std::string, std::string> BuildManifest(const Model& model) {
  const ModelConfig& c = model.config();
  const ModelDims& d = model.dims();
  return {
      {"mode", std::string(ModeName(c.mode))},
      {"pair_encoder", std::string(EncoderName(c.pair_encoder))},
      {"aggregator", std::string(AggregatorName(c.aggregator))},
      {"type_pairing", std::string(PairingName(c.type_pairing))},
      {"k", std::to_string(d.k)},
      {"k_type", std::to_string(d.k_type)},
      {"n_f", std::to_string(d.n_f)},
      {"n_gfcn", std::to_string(d.n_gfcn)},
      {"n_tfcn", std::to_string(d.n_tfcn)},
      {"num_roles", std::to_string(d.num_roles)},
      {"num_values", std::to_string(d.num_values)},
  };
}

std::size_t ManifestCount(const std::map<std::string, std::string>& m, const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) throw FormatError("checkpoint manifest lacks '" + key + "'");
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(it->second, &used);
    if (used != it->second.size()) throw std::invalid_argument(key);
    return static_cast<std::size_t>(v);
  } catch (const std::logic_error&) {
    throw FormatError("checkpoint manifest has a non-numeric '" + key + "'");
  }
}

const std::string& ManifestString(const std::map<std::string, std::string>& m,
                                  const std::string& key) {
  auto it = m.find(key);
  if (it == m.end()) throw FormatError("checkpoint manifest lacks '" + key + "'");
  return it->second;
}

}  // namespace

void SaveCheckpoint(std::ostream& out, const Model& model, const Vocabulary& vocab) {
  if (vocab.num_roles() != model.dims().num_roles ||
      vocab.num_values() != model.dims().num_values) {
    throw DimensionError("vocabulary size does not match model dimensions");
  }
  out.write(kCheckpointMagic, 5);
  std::string manifest;
  for (const auto& [key, value] : BuildManifest(model)) manifest += key + "=" + value + "\n";
  PutString(out, manifest);

  const auto params = model.Parameters();
  const BatchNorm& bn = model.params().bn;
  PutU32(out, static_cast<std::uint32_t>(params.size() + 2));
  for (const ParamTensor* p : params) PutArray(out, p->name, p->value);
  PutArray(out, "bn_running_mean", Matrix::RowVector(bn.running_mean));
  PutArray(out, "bn_running_var", Matrix::RowVector(bn.running_var));

  PutU64(out, vocab.num_roles());
  for (const std::string& s : vocab.roles()) PutString(out, s);
  PutU64(out, vocab.num_values());
  for (const std::string& s : vocab.values()) PutString(out, s);
  if (!out) throw FormatError("failed writing checkpoint");
}

void SaveCheckpoint(const std::filesystem::path& path, const Model& model,
                    const Vocabulary& vocab) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw FormatError("cannot open " + path.string() + " for writing");
  SaveCheckpoint(out, model, vocab);
}

Checkpoint LoadCheckpoint(std::istream& in) {
  Reader reader(in);
  char magic[5];
  reader.Bytes(magic, 5);
  if (std::memcmp(magic, kCheckpointMagic, 5) != 0) {
    throw FormatError("not a checkpoint (bad magic string)");
  }
  std::map<std::string, std::string> manifest;
  {
    std::istringstream lines(reader.String());
    std::string line;
    while (std::getline(lines, line)) {
      const auto eq = line.find('=');
      if (eq == std::string::npos) throw FormatError("malformed manifest line '" + line + "'");
      manifest[line.substr(0, eq)] = line.substr(eq + 1);
    }
  }
  ModelConfig config;
  ModelDims dims;
  try {
    config.mode = ParseModelMode(ManifestString(manifest, "mode"));
    config.pair_encoder = ParsePairEncoder(ManifestString(manifest, "pair_encoder"));
    config.aggregator = ParseAggregator(ManifestString(manifest, "aggregator"));
    config.type_pairing = ParseTypePairing(ManifestString(manifest, "type_pairing"));
  } catch (const ConfigError& e) {
    throw FormatError(std::string("checkpoint manifest: ") + e.what());
  }
  dims.k = ManifestCount(manifest, "k");
  dims.k_type = ManifestCount(manifest, "k_type");
  dims.n_f = ManifestCount(manifest, "n_f");
  dims.n_gfcn = ManifestCount(manifest, "n_gfcn");
  dims.n_tfcn = ManifestCount(manifest, "n_tfcn");
  dims.num_roles = ManifestCount(manifest, "num_roles");
  dims.num_values = ManifestCount(manifest, "num_values");

  Model model(config, dims);
  std::map<std::string, Matrix*> slots;
  for (ParamTensor* p : model.Parameters()) slots[p->name] = &p->value;
  Matrix running_mean(1, dims.n_f);
  Matrix running_var(1, dims.n_f);
  slots["bn_running_mean"] = &running_mean;
  slots["bn_running_var"] = &running_var;

  const std::uint32_t count = reader.U32();
  if (count != slots.size()) {
    throw DimensionError("checkpoint stores " + std::to_string(count) + " arrays, manifest implies " +
                         std::to_string(slots.size()));
  }
  for (std::uint32_t a = 0; a < count; ++a) {
    const std::string name = reader.String();
    const std::uint64_t rows = reader.U64();
    const std::uint64_t cols = reader.U64();
    auto it = slots.find(name);
    if (it == slots.end()) throw FormatError("unexpected array '" + name + "'");
    Matrix& dst = *it->second;
    if (rows != dst.rows() || cols != dst.cols()) {
      throw DimensionError("array '" + name + "' has shape (" + std::to_string(rows) + "x" +
                           std::to_string(cols) + "), manifest implies " + dst.ShapeString());
    }
    for (double& v : dst.data()) v = std::bit_cast<double>(reader.U64());
  }
  model.params().bn.running_mean.assign(running_mean.data().begin(), running_mean.data().end());
  model.params().bn.running_var.assign(running_var.data().begin(), running_var.data().end());

  Vocabulary vocab;
  const std::uint64_t num_roles = reader.U64();
  if (num_roles != dims.num_roles) {
    throw DimensionError("role table has " + std::to_string(num_roles) + " entries, manifest " +
                         std::to_string(dims.num_roles));
  }
  for (std::uint64_t i = 0; i < num_roles; ++i) vocab.AddRole(reader.String());
  const std::uint64_t num_values = reader.U64();
  if (num_values != dims.num_values) {
    throw DimensionError("value table has " + std::to_string(num_values) +
                         " entries, manifest " + std::to_string(dims.num_values));
  }
  for (std::uint64_t i = 0; i < num_values; ++i) vocab.AddValue(reader.String());
  if (vocab.num_roles() != num_roles || vocab.num_values() != num_values) {
    throw FormatError("checkpoint string tables contain duplicates");
  }
  return Checkpoint{std::move(model), std::move(vocab), std::move(manifest)};
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open checkpoint " + path.string());
  return LoadCheckpoint(in);
}

void CheckVocabularyMatches(const Checkpoint& checkpoint, const Vocabulary& vocab) {
  const ModelDims& d = checkpoint.model.dims();
  if (vocab.num_roles() != d.num_roles || vocab.num_values() != d.num_values) {
    throw DimensionError("checkpoint expects |R|=" + std::to_string(d.num_roles) +
                         ", |V|=" + std::to_string(d.num_values) + " but the dataset has |R|=" +
                         std::to_string(vocab.num_roles()) +
                         ", |V|=" + std::to_string(vocab.num_values()));
  }
  if (!(vocab == checkpoint.vocab)) {
    throw DataError("dataset vocabulary differs from the checkpoint's string tables");
  }
}

}  // namespace nalp
