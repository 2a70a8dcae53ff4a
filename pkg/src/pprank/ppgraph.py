"""Predictive-prognostic graphs: averaged normalized ranks with top-k bands."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence
from xml.sax.saxutils import escape

import numpy as np

from pprank._io import atomic_write
from pprank.ranking import RankedList


@dataclass(frozen=True)
class PPPoint:
    feature: int
    name: str
    prog: float
    pred: float


@dataclass(frozen=True)
class PPGraph:
    points: tuple[PPPoint, ...]
    k: int
    label: str = ""

    @property
    def p(self) -> int:
        return len(self.points)

    @property
    def cutoff(self) -> float:
        return float(Fraction(self.p - self.k, self.p))

    def band(self, axis: str) -> list[int]:
        """Features whose averaged score on ``axis`` is strictly above the cutoff."""
        return [pt.feature for pt in self.points if self._score(pt, axis) > self.cutoff]

    def top(self, axis: str, k: int | None = None) -> list[int]:
        """The ``k`` features with the largest averaged score (lowest index on ties)."""
        k = self.k if k is None else k
        ordered = sorted(self.points, key=lambda pt: (-self._score(pt, axis), pt.feature))
        return [pt.feature for pt in ordered[:k]]

    def boundary_ties(self, axis: str) -> list[int]:
        """Features tied at the k-th largest score, if that tie straddles the band edge."""
        scores = sorted((self._score(pt, axis) for pt in self.points), reverse=True)
        kth = scores[self.k - 1]
        tied = [pt.feature for pt in self.points if self._score(pt, axis) == kth]
        inside = sum(s > kth for s in scores)
        return tied if inside + len(tied) > self.k else []

    @staticmethod
    def _score(pt: PPPoint, axis: str) -> float:
        if axis in ("prognostic", "prog"):
            return pt.prog
        if axis in ("predictive", "pred"):
            return pt.pred
        raise ValueError(f"unknown axis {axis!r}")


def normalize_ranks(ranking: RankedList | Sequence[int], p: int) -> dict[int, float]:
    """Map the feature at 1-based rank ``r`` to ``(p - r + 1) / p``."""
    features = ranking.features if isinstance(ranking, RankedList) else list(ranking)
    if sorted(features) != list(range(p)):
        raise ValueError(f"ranking is not a permutation of {p} features")
    return {f: (p - r + 1) / p for r, f in enumerate(features, start=1)}


def build_ppgraph(
    prog_rankings: Sequence[RankedList],
    pred_rankings: Sequence[RankedList],
    k: int,
    names: Sequence[str] | None = None,
    label: str = "",
) -> PPGraph:
    """Average the per-replicate normalized scores of each axis into one graph."""
    if not prog_rankings or len(prog_rankings) != len(pred_rankings):
        raise ValueError("need equally many (>= 1) prognostic and predictive rankings")
    p = len(prog_rankings[0])
    if not 1 <= k <= p:
        raise ValueError(f"k must lie in [1, {p}]")
    prog = np.zeros(p)
    pred = np.zeros(p)
    for acc, rankings in ((prog, prog_rankings), (pred, pred_rankings)):
        for ranking in rankings:
            for f, s in normalize_ranks(ranking, p).items():
                acc[f] += s
        acc /= len(rankings)
    names = list(names) if names is not None else [f"x{j + 1}" for j in range(p)]
    if len(names) != p:
        raise ValueError("one name per feature is required")
    points = tuple(PPPoint(j, names[j], float(prog[j]), float(pred[j])) for j in range(p))
    return PPGraph(points, k, label)


def export_csv(graph: PPGraph, path) -> None:
    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature", "prog_score", "pred_score"])
        for pt in graph.points:
            w.writerow([pt.name, f"{pt.prog:.12g}", f"{pt.pred:.12g}"])

    atomic_write(path, write)


def read_csv(path) -> list[tuple[str, float, float]]:
    with open(path, newline="") as fh:
        return [(r["feature"], float(r["prog_score"]), float(r["pred_score"])) for r in csv.DictReader(fh)]


@dataclass(frozen=True)
class Style:
    prog_fill: str = "#e41a1c"
    pred_fill: str = "#4daf4a"
    both_fill: str = "#ff7f00"
    opacity: float = 0.25
    marker: str = "#1f1f1f"
    size: int = 480
    margin: int = 60


def svg_document(graph: PPGraph, style: Style = Style()) -> str:
    """The graph as an SVG 1.1 document (unit square, prognostic on x)."""
    s, m = style.size, style.margin
    W = s + 2 * m

    def X(v):
        return f"{m + v * s:.3f}"

    def Yc(v):
        return f"{m + (1.0 - v) * s:.3f}"

    c = graph.cutoff
    band = (1.0 - c) * s
    title = escape(graph.label or "PP-graph")
    out = [
        '<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{W}" '
        f'viewBox="0 0 {W} {W}">',
        f"<title>{title}</title>",
        f'<rect x="{m}" y="{m}" width="{s}" height="{s}" fill="white" stroke="black"/>',
        f'<rect class="band-prognostic" x="{X(c)}" y="{m}" width="{band:.3f}" height="{s}" '
        f'fill="{style.prog_fill}" fill-opacity="{style.opacity}"/>',
        f'<rect class="band-predictive" x="{m}" y="{m}" width="{s}" height="{band:.3f}" '
        f'fill="{style.pred_fill}" fill-opacity="{style.opacity}"/>',
        f'<rect class="band-both" x="{X(c)}" y="{m}" width="{band:.3f}" height="{band:.3f}" '
        f'fill="{style.both_fill}" fill-opacity="{min(1.0, 2 * style.opacity)}"/>',
        f'<line class="cutoff" x1="{X(c)}" y1="{m}" x2="{X(c)}" y2="{m + s}" stroke="gray" stroke-dasharray="4,3"/>',
        f'<line class="cutoff" x1="{m}" y1="{Yc(c)}" x2="{m + s}" y2="{Yc(c)}" stroke="gray" stroke-dasharray="4,3"/>',
    ]
    for v in (0.0, 0.2, 0.4, 0.6, 0.8, 1.0):
        out.append(f'<text x="{X(v)}" y="{m + s + 16}" font-size="11" text-anchor="middle">{v:.1f}</text>')
        out.append(f'<text x="{m - 8}" y="{Yc(v)}" font-size="11" text-anchor="end" dy="4">{v:.1f}</text>')
    out.append(
        f'<text x="{m + s / 2}" y="{m + s + 40}" font-size="13" text-anchor="middle">prognostic score</text>'
    )
    out.append(
        f'<text x="{m - 40}" y="{m + s / 2}" font-size="13" text-anchor="middle" '
        f'transform="rotate(-90 {m - 40} {m + s / 2})">predictive score</text>'
    )
    out.append(f'<text x="{m + s / 2}" y="{m - 20}" font-size="14" text-anchor="middle">{title}</text>')
    for pt in graph.points:
        out.append(f'<circle class="marker" cx="{X(pt.prog)}" cy="{Yc(pt.pred)}" r="4" fill="{style.marker}"/>')
        out.append(
            f'<text class="marker-label" x="{float(X(pt.prog)) + 6:.3f}" y="{float(Yc(pt.pred)) - 6:.3f}" '
            f'font-size="11">{escape(pt.name)}</text>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(graph: PPGraph, path, style: Style = Style()) -> None:
    doc = svg_document(graph, style)
    atomic_write(path, lambda fh: fh.write(doc))
