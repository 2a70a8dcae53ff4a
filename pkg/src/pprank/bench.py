"""Mean squared error of ML vs shrinkage estimates of I(T;Y|X) under the null.

Each replicate draws a fresh null law ``p(x) p(t|x) p(y|x)`` (so the true
conditional information is exactly 0), samples ``n`` subjects from it and
estimates I(T;Y|X) with both estimators.  MSE is then the mean squared estimate.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from pprank._io import atomic_write
from pprank.prob_core import (
    ContingencyTable,
    JointDistribution,
    T,
    Y,
    conditional_mutual_information,
    ml_estimate,
    shrinkage_estimate,
)

X = 0
DEFAULT_SIZES = (32, 64, 128, 256, 512, 1024, 2048, 4096)


@dataclass(frozen=True)
class MseBenchConfig:
    cards: tuple[int, int, int] = (2, 2, 25)  # |T|, |Y|, |X|
    sizes: tuple[int, ...] = DEFAULT_SIZES
    replicates: int = 500
    seed: int = 0
    kind: Literal["dirichlet", "uniform"] = "dirichlet"

    def __post_init__(self):
        if len(self.cards) != 3 or any(c < 2 for c in self.cards):
            raise ValueError("need three cardinalities, each >= 2")
        if not self.sizes or any(n < 1 for n in self.sizes) or list(self.sizes) != sorted(set(self.sizes)):
            raise ValueError("sizes must be positive and strictly ascending")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.kind not in ("dirichlet", "uniform"):
            raise ValueError(f"unknown generator kind {self.kind!r}")


@dataclass(frozen=True)
class MseRow:
    n: int
    mse_ml: float
    mse_shrinkage: float
    replicates: int


@dataclass(frozen=True)
class MseBenchResult:
    rows: tuple[MseRow, ...] = field(default_factory=tuple)

    def row(self, n: int) -> MseRow:
        return next(r for r in self.rows if r.n == n)


def _axes(cards):
    ct, cy, cx = cards
    return ((T, ct), (Y, cy), (X, cx))


def sample_null_distribution(cards, rng, kind="dirichlet") -> JointDistribution:
    """A joint law over (T, Y, X) in which T and Y are independent given X.

    ``rng`` is a ``np.random.Generator`` or an integer seed.  ``kind="uniform"``
    returns the uniform law.
    """
    ct, cy, cx = cards
    if kind == "uniform":
        return JointDistribution(_axes(cards), np.full((ct, cy, cx), 1.0 / (ct * cy * cx)))
    rng = np.random.default_rng(rng)
    px = rng.dirichlet(np.ones(cx))
    pt = rng.dirichlet(np.ones(ct), size=cx).T  # (ct, cx): p(t | x)
    py = rng.dirichlet(np.ones(cy), size=cx).T
    probs = pt[:, None, :] * py[None, :, :] * px[None, None, :]
    return JointDistribution(_axes(cards), probs / probs.sum())


def run_mse_bench(config: MseBenchConfig) -> MseBenchResult:
    rows = []
    for n in config.sizes:
        rng = np.random.default_rng([config.seed, n])
        sq_ml, sq_sh = [], []
        for _ in range(config.replicates):
            dist = sample_null_distribution(config.cards, rng, config.kind)
            counts = rng.multinomial(n, dist.probs.ravel()).reshape(dist.probs.shape)
            table = ContingencyTable(dist.axes, counts)
            est_ml = conditional_mutual_information(ml_estimate(table), [T], [Y], [X])
            est_sh = conditional_mutual_information(shrinkage_estimate(table)[0], [T], [Y], [X])
            sq_ml.append(est_ml**2)
            sq_sh.append(est_sh**2)
        reps = config.replicates
        rows.append(MseRow(n, math.fsum(sq_ml) / reps, math.fsum(sq_sh) / reps, reps))
    return MseBenchResult(tuple(rows))


def export_bench_csv(result: MseBenchResult, path) -> None:
    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["n", "mse_ml", "mse_shrinkage", "replicates"])
        for r in result.rows:
            w.writerow([r.n, repr(r.mse_ml), repr(r.mse_shrinkage), r.replicates])

    atomic_write(path, write)


def read_bench_csv(path) -> MseBenchResult:
    with open(path, newline="") as fh:
        rows = [
            MseRow(int(r["n"]), float(r["mse_ml"]), float(r["mse_shrinkage"]), int(r["replicates"]))
            for r in csv.DictReader(fh)
        ]
    return MseBenchResult(tuple(rows))
