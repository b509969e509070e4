# Copyright 2026 The NaLP Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""NaLP family link prediction for n-ary relational facts.

Facts are lists of (role, value) string pairs.
"""

from ._nalp import (
    ConfigError,
    DataError,
    Dataset,
    DimensionError,
    FormatError,
    InvalidInputError,
    NalpError,
    NumericalError,
    Predictor,
    SamplingExhaustedError,
    TrainConfig,
    count_params_flops,
    evaluate,
    load_checkpoint,
    softplus,
    train,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Dataset",
    "DimensionError",
    "FormatError",
    "InvalidInputError",
    "NalpError",
    "NumericalError",
    "Predictor",
    "SamplingExhaustedError",
    "TrainConfig",
    "count_params_flops",
    "evaluate",
    "load_checkpoint",
    "softplus",
    "train",
]
