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

#ifndef NALP_MATRIX_HPP_
#define NALP_MATRIX_HPP_

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace nalp {

// Dense row-major matrix of doubles. Vectors are 1 x n matrices.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0);
  Matrix(std::size_t rows, std::size_t cols, std::vector<double> data);

  static Matrix FromRows(std::initializer_list<std::initializer_list<double>> rows);
  static Matrix Identity(std::size_t n);
  static Matrix RowVector(std::span<const double> values);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }
  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  std::span<double> row(std::size_t r) { return {data_.data() + r * cols_, cols_}; }
  std::span<const double> row(std::size_t r) const {
    return {data_.data() + r * cols_, cols_};
  }
  std::span<double> data() { return data_; }
  std::span<const double> data() const { return data_; }

  void Fill(double value);
  bool SameShape(const Matrix& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_;
  }
  bool AllFinite() const;
  std::string ShapeString() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Standard product a * b. Throws DimensionError when a.cols != b.rows.
Matrix MatMul(const Matrix& a, const Matrix& b);
// a^T * b without materializing the transpose.
Matrix MatMulTransposeA(const Matrix& a, const Matrix& b);
// a * b^T without materializing the transpose.
Matrix MatMulTransposeB(const Matrix& a, const Matrix& b);
Matrix Transpose(const Matrix& a);

// dst += src, shapes must match.
void AddInPlace(Matrix& dst, const Matrix& src);
// Adds a 1 x cols row vector to every row.
void AddRowBroadcast(Matrix& dst, std::span<const double> bias);
// Column sums as a 1 x cols matrix.
Matrix ColumnSums(const Matrix& a);

Matrix Relu(const Matrix& x);
// Upstream gradient masked to the entries where the forward input was > 0.
Matrix ReluBackward(const Matrix& x, const Matrix& upstream);

enum class Aggregator { kMin, kMax, kMean };

// Elementwise reduction over the rows of `vectors`. For kMin / kMax the
// `source` entry t holds the first row attaining the extreme in column t;
// it is empty for kMean.
struct SetAggregate {
  std::vector<double> value;
  std::vector<std::size_t> source;
};

SetAggregate Aggregate(const Matrix& vectors, Aggregator kind);
SetAggregate SetwiseMin(const Matrix& vectors);
// Routes `upstream` back to the input rows: to the recorded source row for
// kMin / kMax, uniformly split for kMean.
Matrix AggregateBackward(const SetAggregate& forward, Aggregator kind,
                         std::size_t num_vectors, std::span<const double> upstream);

// Learnable tensor with its gradient and Adam moments. Embedding tables are
// created row-sparse: only rows marked via TouchRow are updated by Adam.
struct ParamTensor {
  ParamTensor() = default;
  ParamTensor(std::string name, std::size_t rows, std::size_t cols,
              bool row_sparse = false);

  std::string name;
  Matrix value;
  Matrix grad;
  Matrix adam_m;
  Matrix adam_v;
  long step_count = 0;
  bool row_sparse = false;

  void TouchRow(std::size_t r);
  void ZeroGrad();
  bool GradIsZero() const;
  std::span<const std::size_t> touched_rows() const { return touched_; }

 private:
  std::vector<std::size_t> touched_;
  std::vector<unsigned char> touched_mask_;
};

struct AdamOptions {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

// One Adam update from p.grad, then zeroes the gradient. Row-sparse tensors
// update only their touched rows (moments of untouched rows stay frozen).
void AdamStep(ParamTensor& p, double learning_rate, const AdamOptions& options = {});

}  // namespace nalp

#endif  // NALP_MATRIX_HPP_
