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

#ifndef NALP_BATCHNORM_HPP_
#define NALP_BATCHNORM_HPP_

#include <cstddef>
#include <span>
#include <vector>

#include "nalp/matrix.hpp"

namespace nalp {

enum class BnMode { kTrain, kEval };

// Per-column batch normalization. Each column of the input is one channel;
// in train mode statistics are pooled over all rows.
class BatchNorm {
 public:
  static constexpr double kEpsilon = 1e-5;
  static constexpr double kMomentum = 0.9;

  BatchNorm() = default;
  explicit BatchNorm(std::size_t channels);

  struct Cache {
    BnMode mode = BnMode::kEval;
    Matrix normalized;
    std::vector<double> batch_mean;
    std::vector<double> batch_var;
    std::vector<double> inv_std;
  };

  std::size_t channels() const { return gamma.value.cols(); }

  // Normalizes x with batch statistics (train) or running statistics (eval).
  Matrix Forward(const Matrix& x, BnMode mode, Cache* cache = nullptr) const;

  // Blends the batch statistics of a train-mode forward into the running
  // statistics with momentum kMomentum (unbiased variance).
  void UpdateRunningStats(const Cache& cache);

  // Eval-mode transform of a single pre-activation row, in place.
  void NormalizeRowEval(std::span<double> row) const;

  // Returns dL/dx and accumulates dL/dgamma, dL/dbeta into the param grads.
  Matrix Backward(const Cache& cache, const Matrix& upstream);

  ParamTensor gamma;
  ParamTensor beta;
  std::vector<double> running_mean;
  std::vector<double> running_var;
};

}  // namespace nalp

#endif  // NALP_BATCHNORM_HPP_
