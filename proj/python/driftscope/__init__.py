# Copyright 2026 The Driftscope Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Drift metrics and performance prediction for NLP models."""

from driftscope._driftscope import (
    DataError,
    Error,
    Model,
    NumericalError,
    Profile,
    __version__,
    build_profile,
    build_profile_from_file,
    cross_val_predict,
    expected_accuracy,
    fit_logistic,
    js_divergence,
    mean_pairwise_cosine,
    merge_profiles,
    rmse_percent,
    roc_auc,
    run_cli,
    score,
)

METRICS = (
    "vocabulary",
    "structural",
    "semantic",
    "token_js_divergence",
    "token_cross_entropy",
    "embedding_cosine_distance",
)

__all__ = [
    "METRICS",
    "DataError",
    "Error",
    "Model",
    "NumericalError",
    "Profile",
    "__version__",
    "build_profile",
    "build_profile_from_file",
    "cross_val_predict",
    "expected_accuracy",
    "fit_logistic",
    "js_divergence",
    "mean_pairwise_cosine",
    "merge_profiles",
    "rmse_percent",
    "roc_auc",
    "run_cli",
    "score",
]
