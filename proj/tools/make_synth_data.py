# Copyright 2026 The zoldsd Authors.
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

"""Generates the bundled synthetic LIBSVM fixture (data/synth_a9a.libsvm).

Shape mimics the a9a adult dataset at desk scale: 123 binary-ish features,
a handful active per row, +-1 labels from a planted linear model. Column
scales decay geometrically so the least-squares Hessian spectrum spans
several orders of magnitude; the top eigenvalue is kept small enough that
the bundled step sizes stay stable.

Run from the repository root:  python3 tools/make_synth_data.py
"""

import pathlib

import numpy as np

N_ROWS = 384
N_FEATURES = 123
NNZ_PER_ROW = 8
# Column scales control the least-squares Hessian: small enough that the
# bundled step sizes stay in the regime where direction learning outpaces the
# parameter updates' rotation of the gradient.
TOP_SCALE = 0.01
SCALE_DECAY = 0.94  # column j carries TOP_SCALE * SCALE_DECAY**j
LABEL_NOISE = 0.3
SEED = 20260810


def main() -> None:
    rng = np.random.default_rng(SEED)
    scales = TOP_SCALE * SCALE_DECAY ** np.arange(N_FEATURES)

    rows = []
    dense = np.zeros((N_ROWS, N_FEATURES))
    for r in range(N_ROWS):
        idx = np.sort(rng.choice(N_FEATURES, size=NNZ_PER_ROW, replace=False))
        vals = scales[idx]
        rows.append(list(zip(idx + 1, vals)))  # 1-based indices
        dense[r, idx] = vals

    planted = rng.standard_normal(N_FEATURES)
    margin = dense @ planted
    margin = margin / np.std(margin)
    labels = np.sign(margin + LABEL_NOISE * rng.standard_normal(N_ROWS))
    labels[labels == 0] = 1.0

    gram = dense.T @ dense / N_ROWS
    eigs = np.linalg.eigvalsh(gram)
    print(f"hessian spectrum: max {eigs[-1]:.4g}, min>0 "
          f"{eigs[eigs > 1e-14].min():.4g}, trace {eigs.sum():.4g}")

    out = pathlib.Path(__file__).resolve().parent.parent / "data" / "synth_a9a.libsvm"
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as fh:
        for label, row in zip(labels, rows):
            features = " ".join(f"{i}:{v:.6g}" for i, v in row)
            fh.write(f"{int(label)} {features}\n")
    print(f"wrote {out} ({N_ROWS} rows, {N_FEATURES} features)")


if __name__ == "__main__":
    main()
