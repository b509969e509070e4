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

#include "nalp/batchnorm.hpp"

#include <cmath>
#include <string>

#include "nalp/errors.hpp"

namespace nalp {

BatchNorm::BatchNorm(std::size_t channels)
    : gamma("bn_gamma", 1, channels),
      beta("bn_beta", 1, channels),
      running_mean(channels, 0.0),
      running_var(channels, 1.0) {
  gamma.value.Fill(1.0);
}

Matrix BatchNorm::Forward(const Matrix& x, BnMode mode, Cache* cache) const {
  const std::size_t c = channels();
  if (x.cols() != c) {
    throw DimensionError("batchnorm: input " + x.ShapeString() + " with " +
                         std::to_string(c) + " channels");
  }
  const std::size_t n = x.rows();
  std::vector<double> mean(c, 0.0);
  std::vector<double> var(c, 0.0);
  if (mode == BnMode::kTrain) {
    if (n == 0) throw InvalidInputError("batchnorm: empty batch in train mode");
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < c; ++j) mean[j] += x(i, j);
    for (double& m : mean) m /= static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < c; ++j) {
        const double d = x(i, j) - mean[j];
        var[j] += d * d;
      }
    for (double& v : var) v /= static_cast<double>(n);
  } else {
    mean = running_mean;
    var = running_var;
  }

  std::vector<double> inv_std(c);
  for (std::size_t j = 0; j < c; ++j) inv_std[j] = 1.0 / std::sqrt(var[j] + kEpsilon);

  Matrix normalized(n, c);
  Matrix out(n, c);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      const double xhat = (x(i, j) - mean[j]) * inv_std[j];
      normalized(i, j) = xhat;
      out(i, j) = gamma.value[j] * xhat + beta.value[j];
    }
  if (cache != nullptr) {
    cache->mode = mode;
    cache->normalized = std::move(normalized);
    cache->batch_mean = std::move(mean);
    cache->batch_var = std::move(var);
    cache->inv_std = std::move(inv_std);
  }
  return out;
}

void BatchNorm::UpdateRunningStats(const Cache& cache) {
  if (cache.mode != BnMode::kTrain) return;
  const std::size_t n = cache.normalized.rows();
  const double unbias = n > 1 ? static_cast<double>(n) / static_cast<double>(n - 1) : 1.0;
  for (std::size_t j = 0; j < channels(); ++j) {
    running_mean[j] = kMomentum * running_mean[j] + (1.0 - kMomentum) * cache.batch_mean[j];
    running_var[j] =
        kMomentum * running_var[j] + (1.0 - kMomentum) * cache.batch_var[j] * unbias;
  }
}

void BatchNorm::NormalizeRowEval(std::span<double> row) const {
  for (std::size_t j = 0; j < row.size(); ++j) {
    const double inv_std = 1.0 / std::sqrt(running_var[j] + kEpsilon);
    row[j] = gamma.value[j] * ((row[j] - running_mean[j]) * inv_std) + beta.value[j];
  }
}

Matrix BatchNorm::Backward(const Cache& cache, const Matrix& upstream) {
  const Matrix& xhat = cache.normalized;
  if (!xhat.SameShape(upstream)) {
    throw DimensionError("batchnorm backward: " + upstream.ShapeString() + " vs cached " +
                         xhat.ShapeString());
  }
  const std::size_t n = xhat.rows();
  const std::size_t c = xhat.cols();
  std::vector<double> sum_dy(c, 0.0);
  std::vector<double> sum_dy_xhat(c, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      sum_dy[j] += upstream(i, j);
      sum_dy_xhat[j] += upstream(i, j) * xhat(i, j);
    }
  for (std::size_t j = 0; j < c; ++j) {
    gamma.grad[j] += sum_dy_xhat[j];
    beta.grad[j] += sum_dy[j];
  }

  Matrix dx(n, c);
  if (cache.mode == BnMode::kEval) {
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < c; ++j)
        dx(i, j) = upstream(i, j) * gamma.value[j] * cache.inv_std[j];
    return dx;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < c; ++j) {
      dx(i, j) = gamma.value[j] * cache.inv_std[j] *
                 (upstream(i, j) - inv_n * sum_dy[j] - xhat(i, j) * inv_n * sum_dy_xhat[j]);
    }
  return dx;
}

}  // namespace nalp
