"""Contingency tables, cell-probability estimators and plug-in information measures.

All information quantities are in nats.  Variables are addressed by id:
``"Y"``, ``"T"`` or an integer feature index (0-based column of the dataset).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Hashable, Sequence

import numpy as np

if TYPE_CHECKING:
    from pprank.datagen import TrialDataset

Y = "Y"
T = "T"

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class ContingencyTable:
    """Dense integer cell counts over the cross-product of ``axes``.

    ``axes`` is a tuple of ``(variable_id, cardinality)`` pairs and
    ``counts`` has shape ``tuple(card for _, card in axes)``.
    """

    axes: tuple[tuple[Hashable, int], ...]
    counts: np.ndarray

    def __post_init__(self):
        counts = np.asarray(self.counts)
        shape = tuple(card for _, card in self.axes)
        if any(card < 1 for card in shape):
            raise ValueError("every cardinality must be >= 1")
        if counts.shape != shape:
            raise ValueError(f"counts shape {counts.shape} does not match axes {shape}")
        if counts.size and counts.min() < 0:
            raise ValueError("counts must be nonnegative")
        object.__setattr__(self, "counts", counts.astype(np.int64))

    @property
    def n(self) -> int:
        return int(self.counts.sum())

    @property
    def n_cells(self) -> int:
        return int(self.counts.size)

    @property
    def variables(self) -> tuple:
        return tuple(v for v, _ in self.axes)


@dataclass(frozen=True)
class JointDistribution:
    """Cell probabilities over the cross-product of ``axes``."""

    axes: tuple[tuple[Hashable, int], ...]
    probs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        shape = tuple(card for _, card in self.axes)
        if probs.shape != shape:
            raise ValueError(f"probs shape {probs.shape} does not match axes {shape}")
        if not np.all(np.isfinite(probs)) or probs.min() < 0:
            raise ValueError("cell probabilities must be finite and nonnegative")
        if abs(probs.sum() - 1.0) > _SUM_TOL:
            raise ValueError(f"cell probabilities sum to {probs.sum()!r}, not 1")
        if len({_key(v) for v, _ in self.axes}) != len(self.axes):
            raise ValueError("axis variable ids must be unique")
        object.__setattr__(self, "probs", probs)

    @property
    def variables(self) -> tuple:
        return tuple(v for v, _ in self.axes)

    def marginal(self, variables: Sequence[Hashable]) -> "JointDistribution":
        """Marginalize onto ``variables`` (in the requested order)."""
        positions = [self._position(v) for v in variables]
        if len(set(positions)) != len(positions):
            raise ValueError("duplicate variable in marginal request")
        drop = tuple(i for i in range(len(self.axes)) if i not in positions)
        probs = self.probs.sum(axis=drop) if drop else self.probs
        # remaining axes keep their original relative order; reorder to the request
        kept = [i for i in range(len(self.axes)) if i not in drop]
        probs = np.transpose(probs, [kept.index(p) for p in positions])
        return JointDistribution(tuple(self.axes[p] for p in positions), probs)

    def _position(self, variable: Hashable) -> int:
        for i, (v, _) in enumerate(self.axes):
            if _key(v) == _key(variable):
                return i
        raise KeyError(f"variable {variable!r} is not an axis of this distribution")


@dataclass(frozen=True)
class ShrinkageReport:
    lam: float
    target: float
    n: int


def build_contingency(dataset: "TrialDataset", variables: Sequence[Hashable]) -> ContingencyTable:
    """Count subjects over the joint categories of ``variables``.

    Axis order follows ``variables``.  ``"Y"`` and ``"T"`` are binary; an
    integer selects a feature column with its declared cardinality.
    """
    if dataset.n == 0:
        raise ValueError("dataset is empty")
    if len(set(map(_key, variables))) != len(variables):
        raise ValueError("duplicate variable in contingency request")
    columns = []
    axes = []
    for v in variables:
        col, card = _column(dataset, v)
        if col.size and (col.min() < 0 or col.max() >= card):
            raise ValueError(f"variable {v!r} has codes outside [0, {card})")
        columns.append(col)
        axes.append((v, card))
    shape = tuple(card for _, card in axes)
    if not columns:
        return ContingencyTable((), np.array(dataset.n))
    flat = np.ravel_multi_index(columns, shape)
    counts = np.bincount(flat, minlength=int(np.prod(shape))).reshape(shape)
    return ContingencyTable(tuple(axes), counts)


def _key(v):
    # keeps "1" and 1 apart, and treats numpy integers like ints
    if isinstance(v, np.integer):
        v = int(v)
    return (isinstance(v, str), v)


def _column(dataset: "TrialDataset", v: Hashable) -> tuple[np.ndarray, int]:
    if isinstance(v, str):
        if v == Y:
            return dataset.y, 2
        if v == T:
            return dataset.t, 2
        raise KeyError(f"unknown variable id {v!r}")
    if isinstance(v, (int, np.integer)) and not isinstance(v, bool) and 0 <= v < dataset.p:
        return dataset.features[:, int(v)], int(dataset.cardinalities[int(v)])
    raise KeyError(f"unknown variable id {v!r}")


def ml_estimate(table: ContingencyTable) -> JointDistribution:
    """Maximum-likelihood cell probabilities ``count / n``."""
    n = table.n
    if n < 1:
        raise ValueError("cannot estimate from a zero-total table")
    return JointDistribution(table.axes, table.counts / n)


def shrinkage_estimate(table: ContingencyTable) -> tuple[JointDistribution, ShrinkageReport]:
    """James-Stein shrinkage of cell frequencies toward the uniform target.

    With ML frequencies ``u_k = count_k / n`` and target ``1/K`` the intensity is::

        lam = (1 - sum u_k^2) / ((n - 1) * sum (1/K - u_k)^2)

    clipped to [0, 1].  ``lam = 1`` when ``n == 1`` or the ML estimate already
    equals the target.  Returns the shrunk distribution and a report.
    """
    n = table.n
    if n < 1:
        raise ValueError("cannot estimate from a zero-total table")
    K = table.n_cells
    if K < 2:
        raise ValueError("shrinkage needs at least two cells")
    u = table.counts.ravel() / n
    target = 1.0 / K
    denom = (n - 1) * np.sum((target - u) ** 2)
    if n == 1 or denom == 0.0:
        lam = 1.0
    else:
        lam = float(np.clip((1.0 - np.sum(u * u)) / denom, 0.0, 1.0))
    probs = lam * target + (1.0 - lam) * u
    dist = JointDistribution(table.axes, probs.reshape(table.counts.shape))
    return dist, ShrinkageReport(lam=lam, target=target, n=n)


def entropy(dist: JointDistribution) -> float:
    p = dist.probs.ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log(p)))


def mutual_information(dist: JointDistribution, group_a: Sequence[Hashable], group_b: Sequence[Hashable]) -> float:
    """``I(A;B)`` of the plug-in distribution; other axes are summed out."""
    return conditional_mutual_information(dist, group_a, group_b, ())


def conditional_mutual_information(
    dist: JointDistribution,
    group_a: Sequence[Hashable],
    group_b: Sequence[Hashable],
    group_c: Sequence[Hashable] = (),
) -> float:
    """``I(A;B|C)`` as the stratum-weighted sum over cells of ``C``.

    Cells with zero joint mass contribute nothing, so empty strata never
    produce ``0/0``.  With ``group_c`` empty this is ``I(A;B)``.
    """
    group_a, group_b, group_c = list(group_a), list(group_b), list(group_c)
    if not group_a or not group_b:
        raise ValueError("groups A and B must be nonempty")
    keys = [_key(v) for v in group_a + group_b + group_c]
    if len(set(keys)) != len(keys):
        raise ValueError("variable groups must be pairwise disjoint")
    # I(A;B|C) == I(B;A|C) bit for bit: always evaluate in one canonical order
    if sorted(map(_key, group_b)) < sorted(map(_key, group_a)):
        group_a, group_b = group_b, group_a

    joint = dist.marginal(group_a + group_b + group_c).probs
    na, nb = len(group_a), len(group_b)
    size_a = int(np.prod(joint.shape[:na]))
    size_b = int(np.prod(joint.shape[na:na + nb]))
    size_c = int(np.prod(joint.shape[na + nb:]))
    pabc = joint.reshape(size_a, size_b, size_c)
    pac = pabc.sum(axis=1, keepdims=True)
    pbc = pabc.sum(axis=0, keepdims=True)
    pc = pabc.sum(axis=(0, 1), keepdims=True)

    mask = pabc > 0
    num = (pabc * pc)[mask]
    den = np.broadcast_to(pac * pbc, pabc.shape)[mask]
    return float(np.sum(pabc[mask] * np.log(num / den)))
