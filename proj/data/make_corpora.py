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

"""Regenerates the bundled corpora. Output is deterministic for a given seed."""

import argparse
import csv
import pathlib

import numpy as np

REGIONS = ["north", "south", "east", "west"]
OCCUPATIONS = ["clerical", "sales", "trade", "service", "professional",
               "astronaut"]


def correlated(rng, n):
  rows = []
  for _ in range(n):
    region = rng.choice(4, p=[0.4, 0.3, 0.2, 0.1])
    age = int(np.clip(rng.normal(38 + 4 * region, 12), 18, 90))
    edu = int(np.clip(round(1 + (age - 18) / 18 + rng.normal(0, 0.8)), 1, 5))
    occ_p = np.array([3.0, 2.0, 2.0, 2.0, 0.5, 0.0])
    occ_p[4] += 1.5 * (edu - 1)
    occ_p[2] += 1.0 if region == 3 else 0.0
    occ = rng.choice(5, p=occ_p[:5] / occ_p[:5].sum())
    p_high = 0.05 + 0.12 * (edu - 1) + (0.25 if occ == 4 else 0.0)
    income = "high" if rng.random() < p_high else "low"
    rows.append([REGIONS[region], age, edu, OCCUPATIONS[occ], income])
  # Outliers with a rare occupation and unusual combinations.
  for i in range(n // 50):
    rows[i * 50 + 7] = ["west", int(rng.integers(70, 90)), 1, "astronaut",
                        "high"]
  return rows


def copy_pair(rng, n):
  a = rng.choice(5, size=n, p=[0.5, 0.25, 0.15, 0.09, 0.01])
  return [[f"a{v}", f"a{v}"] for v in a]


def independent(rng, n):
  return [[int(rng.integers(4)), int(rng.integers(4))] for _ in range(n)]


def write(path, header, rows):
  with open(path, "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)


def main():
  parser = argparse.ArgumentParser()
  parser.add_argument("--seed", type=int, default=20260501)
  parser.add_argument("--out", default=str(pathlib.Path(__file__).parent))
  args = parser.parse_args()
  out = pathlib.Path(args.out)
  rng = np.random.default_rng(args.seed)
  write(out / "correlated.csv",
        ["region", "age", "education", "occupation", "income"],
        correlated(rng, 500))
  write(out / "copy_pair.csv", ["A", "B"], copy_pair(rng, 1000))
  write(out / "independent.csv", ["A", "B"], independent(rng, 1000))


if __name__ == "__main__":
  main()
