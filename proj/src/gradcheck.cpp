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

#include "nalp/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "nalp/errors.hpp"

namespace nalp {

double RelativeError(double analytic, double numeric) {
  const double scale = std::max({std::abs(analytic), std::abs(numeric), 1e-8});
  return std::abs(analytic - numeric) / scale;
}

GradCheckReport FiniteDifferenceCheck(const std::function<double()>& loss_fn,
                                      std::span<ParamTensor* const> params, double h,
                                      double tolerance) {
  if (!(h > 0.0)) throw ConfigError("finite difference step must be positive");
  GradCheckReport report;
  for (ParamTensor* p : params) {
    GradCheckEntry entry;
    entry.name = p->name;
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double original = p->value[i];
      p->value[i] = original + h;
      const double plus = loss_fn();
      p->value[i] = original - h;
      const double minus = loss_fn();
      p->value[i] = original;
      const double numeric = (plus - minus) / (2.0 * h);
      const double err = RelativeError(p->grad[i], numeric);
      entry.max_rel_error = std::max(entry.max_rel_error, err);
      ++entry.checked;
      if (err > tolerance) ++entry.flagged;
    }
    report.max_rel_error = std::max(report.max_rel_error, entry.max_rel_error);
    report.flagged += entry.flagged;
    report.params.push_back(std::move(entry));
  }
  return report;
}

bool IsLocallySmooth(const std::function<double()>& loss_fn,
                     std::span<ParamTensor* const> params, double h) {
  if (!(h > 0.0)) throw ConfigError("finite difference step must be positive");
  for (ParamTensor* p : params) {
    for (std::size_t i = 0; i < p->value.size(); ++i) {
      const double original = p->value[i];
      double estimate[2];
      for (int s = 0; s < 2; ++s) {
        const double step = s == 0 ? h : h / 10.0;
        p->value[i] = original + step;
        const double plus = loss_fn();
        p->value[i] = original - step;
        const double minus = loss_fn();
        estimate[s] = (plus - minus) / (2.0 * step);
      }
      p->value[i] = original;
      if (std::abs(estimate[0] - estimate[1]) > 1e-7 + 1e-6 * std::abs(estimate[1])) return false;
    }
  }
  return true;
}

}  // namespace nalp
