"""Synthetic two-arm trials from a logistic outcome model, and equal-width binning.

Random numbers come from numpy's PCG64 generator (``np.random.default_rng``);
replicate ``r`` of a run seeded with ``s`` uses seed ``s + r``.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

_OPS = {">": operator.gt, "<": operator.lt, ">=": operator.ge, "<=": operator.le}


@dataclass(frozen=True)
class Threshold:
    """One condition ``x[feature] <op> value`` of an indicator region."""

    feature: int
    op: str
    value: float

    def __post_init__(self):
        if self.op not in _OPS:
            raise ValueError(f"unknown comparison {self.op!r}")
        if not np.isfinite(self.value):
            raise ValueError("threshold must be finite")

    def holds(self, x: np.ndarray) -> np.ndarray:
        return _OPS[self.op](x[..., self.feature], self.value)


@dataclass(frozen=True)
class LogitModelSpec:
    """Logistic outcome model with prognostic and predictive terms.

    logit P(y=1 | t, x) = intercept + sum beta_i x_i + sum beta_ij x_i x_j + gamma t
                          + t * (sum delta_i x_i + sum delta_ij x_i x_j
                                 + region_boost * 1[all region conditions hold])

    Feature indices are 0-based.
    """

    p: int
    n: int
    intercept: float = 0.0
    beta: dict[int, float] = field(default_factory=dict)
    beta_pairs: dict[tuple[int, int], float] = field(default_factory=dict)
    gamma: float = 0.0
    delta: dict[int, float] = field(default_factory=dict)
    delta_pairs: dict[tuple[int, int], float] = field(default_factory=dict)
    region_boost: float = 0.0
    region: tuple[Threshold, ...] = ()
    allocation: float = 0.5

    def __post_init__(self):
        if self.p < 1 or self.n < 1:
            raise ValueError("p and n must be positive")
        if not 0.0 < self.allocation < 1.0:
            raise ValueError("treatment allocation probability must lie in (0, 1)")
        indices = [*self.beta, *self.delta, *(th.feature for th in self.region)]
        indices += [i for pair in (*self.beta_pairs, *self.delta_pairs) for i in pair]
        if any(not 0 <= i < self.p for i in indices):
            raise ValueError("coefficient index outside [0, p)")

    def logit(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        """Linear predictor for rows ``x`` (shape ``(n, p)``) and treatments ``t``."""
        x = np.asarray(x, dtype=np.float64)
        t = np.asarray(t, dtype=np.float64)
        eta = np.full(x.shape[:-1], self.intercept, dtype=np.float64)
        for i, b in self.beta.items():
            eta += b * x[..., i]
        for (i, j), b in self.beta_pairs.items():
            eta += b * x[..., i] * x[..., j]
        effect = np.full_like(eta, self.gamma)
        for i, d in self.delta.items():
            effect += d * x[..., i]
        for (i, j), d in self.delta_pairs.items():
            effect += d * x[..., i] * x[..., j]
        if self.region:
            inside = np.logical_and.reduce([th.holds(x) for th in self.region])
            effect += self.region_boost * inside
        return eta + t * effect

    def prob(self, x: np.ndarray, t: np.ndarray) -> np.ndarray:
        return expit(self.logit(x, t))


def foster_spec() -> LogitModelSpec:
    """The 15-feature benchmark with an enhanced-effect subgroup.

    Prognostic: x1, x2, x7.  Predictive: x1, x2, x3 (via the region
    x1 > 0, x2 < 0, x3 > 0).  1000 subjects, 1:1 allocation.
    """
    return LogitModelSpec(
        p=15,
        n=1000,
        intercept=-1.0,
        beta={0: 0.5, 1: 0.5, 6: -0.5},
        beta_pairs={(1, 6): 0.5},
        gamma=0.1,
        region_boost=1.5,
        region=(Threshold(0, ">", 0.0), Threshold(1, "<", 0.0), Threshold(2, ">", 0.0)),
        allocation=0.5,
    )


@dataclass(frozen=True)
class ContinuousTrial:
    y: np.ndarray
    t: np.ndarray
    x: np.ndarray


@dataclass(frozen=True)
class TrialDataset:
    """Binary outcome ``y``, binary treatment ``t`` and categorical ``features``.

    ``features`` has shape ``(n, p)`` with column ``j`` coded in
    ``[0, cardinalities[j])``.
    """

    y: np.ndarray
    t: np.ndarray
    features: np.ndarray
    cardinalities: tuple[int, ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        y = np.asarray(self.y).astype(np.int64)
        t = np.asarray(self.t).astype(np.int64)
        features = np.asarray(self.features).astype(np.int64)
        if features.ndim != 2:
            raise ValueError("features must be a 2-d (n, p) array")
        n = len(y)
        if n < 1:
            raise ValueError("dataset is empty")
        if len(t) != n or features.shape[0] != n:
            raise ValueError("y, t and features must have the same length")
        if not (np.isin(y, (0, 1)).all() and np.isin(t, (0, 1)).all()):
            raise ValueError("y and t must be binary 0/1")
        cards = tuple(int(c) for c in self.cardinalities)
        if len(cards) != features.shape[1] or any(c < 1 for c in cards):
            raise ValueError("one cardinality >= 1 is required per feature")
        if features.size and ((features < 0).any() or (features >= np.array(cards)).any()):
            raise ValueError("feature code outside its declared cardinality")
        names = self.names
        if names is None:
            names = tuple(f"x{j + 1}" for j in range(len(cards)))
        elif len(names) != len(cards):
            raise ValueError("one name is required per feature")
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "features", features)
        object.__setattr__(self, "cardinalities", cards)
        object.__setattr__(self, "names", tuple(names))

    @property
    def n(self) -> int:
        return len(self.y)

    @property
    def p(self) -> int:
        return self.features.shape[1]

    def take(self, rows) -> "TrialDataset":
        return TrialDataset(self.y[rows], self.t[rows], self.features[rows], self.cardinalities, self.names)


def simulate(spec: LogitModelSpec, seed: int) -> ContinuousTrial:
    """Draw ``spec.n`` subjects: x ~ N(0, I_p), t ~ Bernoulli(allocation), y ~ Bernoulli(sigmoid(logit))."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((spec.n, spec.p))
    t = (rng.random(spec.n) < spec.allocation).astype(np.int64)
    y = (rng.random(spec.n) < spec.prob(x, t)).astype(np.int64)
    return ContinuousTrial(y=y, t=t, x=x)


def discretize_equal_width(values: np.ndarray, bins: int) -> tuple[np.ndarray, list[np.ndarray]]:
    """Code each column into ``bins`` equal-width intervals over its observed range.

    Returns integer codes of the same shape as ``values`` and, per column, the
    ``bins - 1`` interior edges.  A value equal to an edge goes to the upper
    bin; the column maximum lands in the last bin.
    """
    values = np.asarray(values, dtype=np.float64)
    if bins < 2:
        raise ValueError("bins must be >= 2")
    squeeze = values.ndim == 1
    if squeeze:
        values = values[:, None]
    if not np.all(np.isfinite(values)):
        raise ValueError("values must be finite")
    codes = np.empty(values.shape, dtype=np.int64)
    edges = []
    for j in range(values.shape[1]):
        col = values[:, j]
        lo, hi = col.min(), col.max()
        if not hi > lo:
            raise ValueError(f"column {j} is constant; cannot bin it")
        inner = np.linspace(lo, hi, bins + 1)[1:-1]
        codes[:, j] = np.searchsorted(inner, col, side="right")
        edges.append(inner)
    if squeeze:
        codes = codes[:, 0]
    return codes, edges


def to_dataset(trial: ContinuousTrial, bins: int = 4) -> TrialDataset:
    codes, _ = discretize_equal_width(trial.x, bins)
    return TrialDataset(trial.y, trial.t, codes, (bins,) * trial.x.shape[1])


def foster_replicates(reps: int, seed: int, bins: int = 4, spec: LogitModelSpec | None = None) -> list[TrialDataset]:
    """Discretized replicate datasets with seeds ``seed, seed + 1, ...``."""
    spec = spec or foster_spec()
    return [to_dataset(simulate(spec, seed + r), bins) for r in range(reps)]
