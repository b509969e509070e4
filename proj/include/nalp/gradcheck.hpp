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

#ifndef NALP_GRADCHECK_HPP_
#define NALP_GRADCHECK_HPP_

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "nalp/matrix.hpp"

namespace nalp {

struct GradCheckEntry {
  std::string name;
  double max_rel_error = 0.0;
  std::size_t checked = 0;
  std::size_t flagged = 0;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> params;
  double max_rel_error = 0.0;
  std::size_t flagged = 0;
  bool passed() const { return flagged == 0; }
};

// Relative error |a - n| / max(|a|, |n|, 1e-8).
double RelativeError(double analytic, double numeric);

// Compares each param's stored grad against central differences of
// `loss_fn`, perturbing one entry at a time by +-h. `loss_fn` must be a pure
// function of the parameter values.
GradCheckReport FiniteDifferenceCheck(const std::function<double()>& loss_fn,
                                      std::span<ParamTensor* const> params, double h,
                                      double tolerance);

// True when central differences at h and h / 10 agree for every entry, i.e.
// no min, max or relu switch lies within the probing step.
bool IsLocallySmooth(const std::function<double()>& loss_fn,
                     std::span<ParamTensor* const> params, double h);

}  // namespace nalp

#endif  // NALP_GRADCHECK_HPP_
