# Copyright 2026 The Recrisk Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Per-record membership-inference risk estimation."""

from recrisk._recrisk import (
    compare,
    derive_seed,
    dp_tradeoff_lower_bound,
    empirical_rates,
    hoeffding_radius,
    miss_rate,
    neyman_pearson_curve,
    rmsd,
    roc_auc,
    run,
    toy_exact_rates,
)

__all__ = [
    "compare",
    "derive_seed",
    "dp_tradeoff_lower_bound",
    "empirical_rates",
    "hoeffding_radius",
    "miss_rate",
    "neyman_pearson_curve",
    "rmsd",
    "roc_auc",
    "run",
    "toy_exact_rates",
]
