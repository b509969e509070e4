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

#include "nalp/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <utility>

#include "nalp/errors.hpp"

namespace nalp {

namespace {

void RequireSameShape(const Matrix& a, const Matrix& b, const char* op) {
  if (!a.SameShape(b)) {
    throw DimensionError(std::string(op) + ": shape mismatch " + a.ShapeString() +
                         " vs " + b.ShapeString());
  }
}

}  // namespace

Matrix::Matrix(std::size_t rows, std::size_t cols, double fill)
    : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != rows * cols) {
    throw DimensionError("matrix data length " + std::to_string(data_.size()) +
                         " does not match shape " + ShapeString());
  }
}

Matrix Matrix::FromRows(std::initializer_list<std::initializer_list<double>> rows) {
  const std::size_t n = rows.size();
  const std::size_t m = n == 0 ? 0 : rows.begin()->size();
  std::vector<double> data;
  data.reserve(n * m);
  for (const auto& r : rows) {
    if (r.size() != m) throw DimensionError("ragged rows in matrix literal");
    data.insert(data.end(), r.begin(), r.end());
  }
  return Matrix(n, m, std::move(data));
}

Matrix Matrix::Identity(std::size_t n) {
  Matrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) out(i, i) = 1.0;
  return out;
}

Matrix Matrix::RowVector(std::span<const double> values) {
  return Matrix(1, values.size(), std::vector<double>(values.begin(), values.end()));
}

void Matrix::Fill(double value) { std::fill(data_.begin(), data_.end(), value); }

bool Matrix::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

std::string Matrix::ShapeString() const {
  std::ostringstream os;
  os << "(" << rows_ << "x" << cols_ << ")";
  return os.str();
}

Matrix MatMul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) {
    throw DimensionError("matmul: " + a.ShapeString() + " x " + b.ShapeString());
  }
  Matrix out(a.rows(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double* out_row = out.row(i).data();
    for (std::size_t p = 0; p < a.cols(); ++p) {
      const double aip = a(i, p);
      if (aip == 0.0) continue;
      const double* b_row = b.row(p).data();
      for (std::size_t j = 0; j < n; ++j) out_row[j] += aip * b_row[j];
    }
  }
  return out;
}

Matrix MatMulTransposeA(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows()) {
    throw DimensionError("matmul (a^T b): " + a.ShapeString() + "^T x " + b.ShapeString());
  }
  Matrix out(a.cols(), b.cols());
  const std::size_t n = b.cols();
  for (std::size_t p = 0; p < a.rows(); ++p) {
    const double* b_row = b.row(p).data();
    for (std::size_t i = 0; i < a.cols(); ++i) {
      const double api = a(p, i);
      if (api == 0.0) continue;
      double* out_row = out.row(i).data();
      for (std::size_t j = 0; j < n; ++j) out_row[j] += api * b_row[j];
    }
  }
  return out;
}

Matrix MatMulTransposeB(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.cols()) {
    throw DimensionError("matmul (a b^T): " + a.ShapeString() + " x " + b.ShapeString() +
                         "^T");
  }
  Matrix out(a.rows(), b.rows());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    const double* a_row = a.row(i).data();
    for (std::size_t j = 0; j < b.rows(); ++j) {
      const double* b_row = b.row(j).data();
      double acc = 0.0;
      for (std::size_t p = 0; p < a.cols(); ++p) acc += a_row[p] * b_row[p];
      out(i, j) = acc;
    }
  }
  return out;
}

Matrix Transpose(const Matrix& a) {
  Matrix out(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) out(j, i) = a(i, j);
  return out;
}

void AddInPlace(Matrix& dst, const Matrix& src) {
  RequireSameShape(dst, src, "add");
  auto d = dst.data();
  auto s = src.data();
  for (std::size_t i = 0; i < d.size(); ++i) d[i] += s[i];
}

void AddRowBroadcast(Matrix& dst, std::span<const double> bias) {
  if (bias.size() != dst.cols()) {
    throw DimensionError("row broadcast: bias length " + std::to_string(bias.size()) +
                         " vs " + dst.ShapeString());
  }
  for (std::size_t i = 0; i < dst.rows(); ++i) {
    auto r = dst.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] += bias[j];
  }
}

Matrix ColumnSums(const Matrix& a) {
  Matrix out(1, a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    for (std::size_t j = 0; j < r.size(); ++j) out[j] += r[j];
  }
  return out;
}

Matrix Relu(const Matrix& x) {
  Matrix out = x;
  for (double& v : out.data()) v = v > 0.0 ? v : 0.0;
  return out;
}

Matrix ReluBackward(const Matrix& x, const Matrix& upstream) {
  RequireSameShape(x, upstream, "relu backward");
  Matrix out(x.rows(), x.cols());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = x[i] > 0.0 ? upstream[i] : 0.0;
  return out;
}

SetAggregate Aggregate(const Matrix& vectors, Aggregator kind) {
  if (vectors.rows() == 0) throw InvalidInputError("aggregate: empty vector set");
  const std::size_t d = vectors.cols();
  SetAggregate out;
  out.value.assign(vectors.row(0).begin(), vectors.row(0).end());
  if (kind == Aggregator::kMean) {
    for (std::size_t i = 1; i < vectors.rows(); ++i) {
      auto r = vectors.row(i);
      for (std::size_t t = 0; t < d; ++t) out.value[t] += r[t];
    }
    const double inv = 1.0 / static_cast<double>(vectors.rows());
    for (double& v : out.value) v *= inv;
    return out;
  }
  out.source.assign(d, 0);
  for (std::size_t i = 1; i < vectors.rows(); ++i) {
    auto r = vectors.row(i);
    for (std::size_t t = 0; t < d; ++t) {
      // Strict comparison keeps the lowest index on ties.
      const bool better = kind == Aggregator::kMin ? r[t] < out.value[t] : r[t] > out.value[t];
      if (better) {
        out.value[t] = r[t];
        out.source[t] = i;
      }
    }
  }
  return out;
}

SetAggregate SetwiseMin(const Matrix& vectors) { return Aggregate(vectors, Aggregator::kMin); }

Matrix AggregateBackward(const SetAggregate& forward, Aggregator kind,
                         std::size_t num_vectors, std::span<const double> upstream) {
  const std::size_t d = forward.value.size();
  if (upstream.size() != d) {
    throw DimensionError("aggregate backward: upstream length " +
                         std::to_string(upstream.size()) + " vs " + std::to_string(d));
  }
  Matrix out(num_vectors, d);
  if (kind == Aggregator::kMean) {
    const double inv = 1.0 / static_cast<double>(num_vectors);
    for (std::size_t i = 0; i < num_vectors; ++i)
      for (std::size_t t = 0; t < d; ++t) out(i, t) = upstream[t] * inv;
    return out;
  }
  for (std::size_t t = 0; t < d; ++t) out(forward.source[t], t) = upstream[t];
  return out;
}

ParamTensor::ParamTensor(std::string name_in, std::size_t rows, std::size_t cols,
                         bool row_sparse_in)
    : name(std::move(name_in)),
      value(rows, cols),
      grad(rows, cols),
      adam_m(rows, cols),
      adam_v(rows, cols),
      row_sparse(row_sparse_in),
      touched_mask_(row_sparse_in ? rows : 0, 0) {}

void ParamTensor::TouchRow(std::size_t r) {
  if (!row_sparse || touched_mask_[r]) return;
  touched_mask_[r] = 1;
  touched_.push_back(r);
}

void ParamTensor::ZeroGrad() {
  if (!row_sparse) {
    grad.Fill(0.0);
    return;
  }
  for (std::size_t r : touched_) {
    auto g = grad.row(r);
    std::fill(g.begin(), g.end(), 0.0);
    touched_mask_[r] = 0;
  }
  touched_.clear();
}

bool ParamTensor::GradIsZero() const {
  auto g = grad.data();
  return std::all_of(g.begin(), g.end(), [](double v) { return v == 0.0; });
}

void AdamStep(ParamTensor& p, double learning_rate, const AdamOptions& options) {
  if (!(learning_rate > 0.0)) {
    throw ConfigError("adam: learning rate must be positive, got " +
                      std::to_string(learning_rate));
  }
  ++p.step_count;
  const double t = static_cast<double>(p.step_count);
  const double correction1 = 1.0 - std::pow(options.beta1, t);
  const double correction2 = 1.0 - std::pow(options.beta2, t);
  auto update_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const double g = p.grad[i];
      p.adam_m[i] = options.beta1 * p.adam_m[i] + (1.0 - options.beta1) * g;
      p.adam_v[i] = options.beta2 * p.adam_v[i] + (1.0 - options.beta2) * g * g;
      const double m_hat = p.adam_m[i] / correction1;
      const double v_hat = p.adam_v[i] / correction2;
      p.value[i] -= learning_rate * m_hat / (std::sqrt(v_hat) + options.epsilon);
    }
  };
  if (p.row_sparse) {
    const std::size_t cols = p.value.cols();
    for (std::size_t r : p.touched_rows()) update_range(r * cols, (r + 1) * cols);
  } else {
    update_range(0, p.value.size());
  }
  p.ZeroGrad();
}

}  // namespace nalp
