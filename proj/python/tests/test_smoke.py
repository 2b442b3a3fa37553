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
"""Smoke tests for the Python bindings."""

import math
import os
import pathlib

import pytest

import recrisk

CONFIG_DIR = pathlib.Path(
    os.environ.get("RECRISK_CONFIG_DIR",
                   pathlib.Path(__file__).resolve().parents[2] / "configs"))


def test_auc_four_pairs():
  assert recrisk.roc_auc([1, 1, 0, 0], [0.9, 0.4, 0.6, 0.1]) == 0.75


def test_one_sided_transcript_raises():
  with pytest.raises(RuntimeError, match="both classes"):
    recrisk.roc_auc([1, 1], [0.2, 0.3])


def test_rates_and_radius():
  assert recrisk.empirical_rates([0, 0, 1], [0.7, 0.2, 0.6]) == (0.5, 0.0)
  assert recrisk.hoeffding_radius(1000, 0.2) == pytest.approx(
      math.sqrt(math.log(10) / 2000), rel=1e-15)
  with pytest.raises(ValueError):
    recrisk.hoeffding_radius(10, 1.5)


def test_comparison_metrics():
  pairs = [(0.70, 0.85), (0.85, 0.90), (0.60, 0.50)]
  assert recrisk.miss_rate(pairs, 0.8) == 0.5
  assert recrisk.miss_rate([(0.9, 0.5)], 0.8) is None
  assert recrisk.rmsd([(0.5, 0.6), (0.8, 0.6)]) == pytest.approx(0.1581, abs=5e-5)


def test_oracles():
  assert recrisk.dp_tradeoff_lower_bound(math.log(2), 0, 0.25) == pytest.approx(0.5)
  assert recrisk.toy_exact_rates(0.8, 0.2) == pytest.approx((0.2, 0.2))
  curve = recrisk.neyman_pearson_curve([0.5, 0.5], [0.9, 0.1])
  assert curve[0] == (0.0, 1.0)
  assert curve[1] == pytest.approx((0.5, 0.1))
  assert curve[-1] == (1.0, 0.0)


def test_derive_seed_is_deterministic():
  assert recrisk.derive_seed(7, "run", 3) == recrisk.derive_seed(7, "run", 3)
  assert recrisk.derive_seed(7, "run", 3) != recrisk.derive_seed(7, "run", 4)


def test_smoke_config_round_trip():
  out = recrisk.run(str(CONFIG_DIR / "smoke.ini"))
  assert out["failures"] == {}
  results = out["results"]
  assert set(results) == {"traditional", "model_seeded"}
  again = recrisk.run(str(CONFIG_DIR / "smoke.ini"), threads=4)
  assert again["results"] == results
  table = recrisk.compare(results["traditional"], results["model_seeded"])
  assert "# records=5" in table


def test_bad_config_raises():
  with pytest.raises(KeyError):
    recrisk.run(str(CONFIG_DIR / "missing.ini"))
