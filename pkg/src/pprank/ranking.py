"""Greedy prognostic and predictive feature rankings.

Prognostic criteria score a candidate ``k`` given the already-ranked set ``S``:

* ``first``:  I(X_k; Y)
* ``second``: sum_{j in S} I(X_k; Y | X_j)   (I(X_k; Y) while S is empty)
* ``full``:   I(X_k; Y | X_S)

Predictive criteria replace the information about ``Y`` with the information
``Y`` carries about treatment inside strata of the candidate:

* ``first``:  I(T; Y | X_k)
* ``second``: sum_{j in S} I(T; Y | X_k, X_j)   (I(T; Y | X_k) while S is empty)
* ``full``:   I(T; Y | X_k, X_S)

Every conditional-information term is estimated from the contingency table of
exactly the variables it involves, using either ML or shrinkage cell
probabilities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

import numpy as np

from pprank.datagen import TrialDataset
from pprank.prob_core import (
    T,
    Y,
    build_contingency,
    conditional_mutual_information,
    ml_estimate,
    shrinkage_estimate,
)

Axis = Literal["prognostic", "predictive"]
Order = Literal["first", "second", "full"]
Estimator = Literal["ml", "shrinkage"]

AXES = ("prognostic", "predictive")
ORDERS = ("first", "second", "full")
ESTIMATORS = ("ml", "shrinkage")

DEFAULT_CELL_BUDGET = 10**6
# scores closer than this to the step maximum count as tied (lowest index wins)
TIE_TOL = 1e-12


class CellBudgetExceeded(ValueError):
    pass


@dataclass(frozen=True)
class RankEntry:
    feature: int
    score: float
    step: int


@dataclass(frozen=True)
class RankedList:
    entries: tuple[RankEntry, ...]
    axis: Axis
    order: Order
    estimator: Estimator

    @property
    def features(self) -> list[int]:
        return [e.feature for e in self.entries]

    @property
    def scores(self) -> list[float]:
        return [e.score for e in self.entries]

    def __len__(self):
        return len(self.entries)


class _Scorer:
    """Memoizes conditional-information terms for one dataset and estimator."""

    def __init__(self, dataset: TrialDataset, estimator: Estimator, cell_budget: int):
        if estimator not in ESTIMATORS:
            raise ValueError(f"unknown estimator {estimator!r}")
        self.dataset = dataset
        self.estimator = estimator
        self.cell_budget = cell_budget
        self._cache: dict[tuple, float] = {}

    def cmi(self, a: str | int, b: str, given: Sequence[int]) -> float:
        given = tuple(sorted(given))
        key = (a, b, given)
        if key not in self._cache:
            variables = [a, b, *given]
            cells = math.prod(2 if isinstance(v, str) else self.dataset.cardinalities[v] for v in variables)
            if cells > self.cell_budget:
                raise CellBudgetExceeded(
                    f"table over {len(variables)} variables needs {cells} cells "
                    f"(budget {self.cell_budget})"
                )
            table = build_contingency(self.dataset, variables)
            if self.estimator == "ml":
                dist = ml_estimate(table)
            else:
                dist, _ = shrinkage_estimate(table)
            self._cache[key] = conditional_mutual_information(dist, [a], [b], list(given))
        return self._cache[key]

    def score(self, axis: Axis, order: Order, candidate: int, selected: Sequence[int]) -> float:
        if axis == "prognostic":
            term = lambda given: self.cmi(candidate, Y, given)  # noqa: E731
        elif axis == "predictive":
            term = lambda given: self.cmi(T, Y, (candidate, *given))  # noqa: E731
        else:
            raise ValueError(f"unknown axis {axis!r}")
        if order == "first" or (order == "second" and not selected):
            return term(())
        if order == "second":
            return math.fsum(term((j,)) for j in selected)
        if order == "full":
            return term(tuple(selected))
        raise ValueError(f"unknown criterion order {order!r}")


def _check(dataset: TrialDataset, axis: Axis, candidate: int | None = None, selected: Sequence[int] = ()):
    if dataset.n < 1:
        raise ValueError("dataset is empty")
    if dataset.p < 1:
        raise ValueError("dataset has no features")
    if not np.isin(dataset.y, (0, 1)).all():
        raise ValueError("outcome must be binary")
    if axis == "predictive" and len(np.unique(dataset.t)) < 2:
        raise ValueError("predictive ranking needs both treatment arms")
    if candidate is not None:
        if not 0 <= candidate < dataset.p:
            raise ValueError(f"unknown feature {candidate}")
        if candidate in selected:
            raise ValueError("candidate is already selected")
        if any(not 0 <= j < dataset.p for j in selected) or len(set(selected)) != len(selected):
            raise ValueError("selected features must be distinct known indices")


def score_feature(
    dataset: TrialDataset,
    axis: Axis,
    order: Order,
    estimator: Estimator,
    candidate: int,
    selected: Sequence[int] = (),
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> float:
    """Criterion value of ``candidate`` when ``selected`` are already ranked."""
    _check(dataset, axis, candidate, selected)
    return _Scorer(dataset, estimator, cell_budget).score(axis, order, candidate, list(selected))


def rank_features(
    dataset: TrialDataset,
    axis: Axis,
    order: Order = "second",
    estimator: Estimator = "shrinkage",
    cell_budget: int = DEFAULT_CELL_BUDGET,
) -> RankedList:
    """Greedy forward ranking of all features on one axis.

    At each step every unranked feature is scored and the best one is
    appended; scores within ``TIE_TOL`` of the best go to the lowest index.
    """
    _check(dataset, axis)
    if order not in ORDERS:
        raise ValueError(f"unknown criterion order {order!r}")
    scorer = _Scorer(dataset, estimator, cell_budget)
    remaining = list(range(dataset.p))
    selected: list[int] = []
    entries = []
    for step in range(1, dataset.p + 1):
        scores = [scorer.score(axis, order, k, selected) for k in remaining]
        best = max(scores)
        pick = next(i for i, s in enumerate(scores) if s >= best - TIE_TOL)
        feature = remaining.pop(pick)
        selected.append(feature)
        entries.append(RankEntry(feature=feature, score=scores[pick], step=step))
    return RankedList(tuple(entries), axis, order, estimator)


def rank_prognostic(dataset, order="second", estimator="shrinkage", cell_budget=DEFAULT_CELL_BUDGET):
    return rank_features(dataset, "prognostic", order, estimator, cell_budget)


def rank_predictive(dataset, order="second", estimator="shrinkage", cell_budget=DEFAULT_CELL_BUDGET):
    return rank_features(dataset, "predictive", order, estimator, cell_budget)
