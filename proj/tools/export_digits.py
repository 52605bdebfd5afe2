#!/usr/bin/env python3
# Copyright 2026 The GEP Authors.
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

"""Write the 8x8 digits set bundled with scikit-learn as train/eval/aux CSVs.

The data ships inside the scikit-learn wheel, so nothing is downloaded.
"""

import argparse
import csv
import pathlib

import numpy as np
from sklearn.datasets import load_digits


def write(path, x, y):
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow([f"px{i}" for i in range(x.shape[1])] + ["label"])
        for row, label in zip(x, y):
            w.writerow([f"{v:g}" for v in row] + [int(label)])


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="data/digits", help="output directory")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-aux", type=int, default=200)
    ap.add_argument("--n-eval", type=int, default=400)
    args = ap.parse_args()

    x, y = load_digits(return_X_y=True)
    perm = np.random.default_rng(args.seed).permutation(len(y))
    x, y = x[perm], y[perm]
    aux = slice(0, args.n_aux)
    ev = slice(args.n_aux, args.n_aux + args.n_eval)
    tr = slice(args.n_aux + args.n_eval, None)

    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write(out / "train.csv", x[tr], y[tr])
    write(out / "eval.csv", x[ev], y[ev])
    write(out / "aux.csv", x[aux], y[aux])
    print(f"wrote {out}: train {len(y[tr])}, eval {len(y[ev])}, aux {len(y[aux])}")


if __name__ == "__main__":
    main()
