"""Dataset CSV reading/writing and atomic file output."""

from __future__ import annotations

import csv
import os
import tempfile

import numpy as np

from pprank.datagen import TrialDataset, discretize_equal_width


def atomic_write(path, write, mode="w") -> None:
    """Write via a temporary file in the target directory, then rename over ``path``."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode, newline="") as fh:
            write(fh)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


# columns whose values are all integers in [0, MAX_CATEGORIES) are read as categorical codes
MAX_CATEGORIES = 32


class DatasetFormatError(ValueError):
    pass


def write_trial_csv(trial, path, names=None) -> None:
    """Write ``y,t,x1..xp`` rows; reals use the shortest round-tripping repr."""
    p = trial.x.shape[1]
    names = names or [f"x{j + 1}" for j in range(p)]

    def write(fh):
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y", "t", *names])
        for yi, ti, row in zip(trial.y.tolist(), trial.t.tolist(), trial.x.tolist()):
            w.writerow([yi, ti, *map(repr, row)])

    atomic_write(path, write)


def read_dataset(path, bins: int | None = None):
    """Load a dataset CSV into a ``TrialDataset``.

    Integer feature columns in ``[0, 32)`` are taken as category codes;
    any other column is real-valued and is discretized into ``bins``
    equal-width bins, which is then mandatory.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise DatasetFormatError(f"{path}: empty file") from None
        rows = [r for r in reader if r]
    for required in ("y", "t"):
        if required not in header:
            raise DatasetFormatError(f"{path}: missing required column {required!r}")
    if not rows:
        raise DatasetFormatError(f"{path}: no data rows")
    for i, r in enumerate(rows, start=2):
        if len(r) != len(header):
            raise DatasetFormatError(f"{path}:{i}: expected {len(header)} fields, got {len(r)}")
    try:
        values = np.array(rows, dtype=np.float64)
    except ValueError as exc:
        raise DatasetFormatError(f"{path}: non-numeric value ({exc})") from None
    if not np.all(np.isfinite(values)):
        raise DatasetFormatError(f"{path}: non-finite value")

    y = values[:, header.index("y")]
    t = values[:, header.index("t")]
    for name, col in (("y", y), ("t", t)):
        if not np.isin(col, (0.0, 1.0)).all():
            raise DatasetFormatError(f"{path}: column {name!r} must contain only 0/1")
    feature_cols = [j for j, h in enumerate(header) if h not in ("y", "t")]
    if not feature_cols:
        raise DatasetFormatError(f"{path}: no feature columns")

    codes = np.empty((len(rows), len(feature_cols)), dtype=np.int64)
    cards = []
    for out, j in enumerate(feature_cols):
        col = values[:, j]
        if np.all(col == np.round(col)) and col.min() >= 0 and col.max() < MAX_CATEGORIES:
            codes[:, out] = col.astype(np.int64)
            cards.append(int(col.max()) + 1)
            continue
        if bins is None:
            raise DatasetFormatError(f"{path}: column {header[j]!r} is real-valued; pass a bin count")
        try:
            codes[:, out], _ = discretize_equal_width(col, bins)
        except ValueError as exc:
            raise DatasetFormatError(f"{path}: column {header[j]!r}: {exc}") from None
        cards.append(bins)
    return TrialDataset(y, t, codes, tuple(cards), tuple(header[j] for j in feature_cols))
