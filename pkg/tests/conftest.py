import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from pprank.datagen import TrialDataset, foster_replicates  # noqa: E402
from pprank.ppgraph import build_ppgraph  # noqa: E402
from pprank.ranking import rank_features  # noqa: E402

FOSTER_SEED = 0
FOSTER_REPS = 100


def random_dataset(rng, n=200, p=4, max_card=3):
    cards = tuple(int(c) for c in rng.integers(2, max_card + 1, size=p))
    features = np.column_stack([rng.integers(0, c, size=n) for c in cards])
    t = rng.integers(0, 2, size=n)
    # outcome loosely tied to the first feature and treatment so scores are not all noise
    logit = -0.5 + 0.8 * (features[:, 0] == 0) + 0.7 * t * (features[:, -1] > 0)
    y = (rng.random(n) < 1 / (1 + np.exp(-logit))).astype(int)
    return TrialDataset(y, t, features, cards)


@pytest.fixture(scope="session")
def foster_data():
    return foster_replicates(FOSTER_REPS, FOSTER_SEED, bins=4)


def _graph(datasets, order, estimator="shrinkage"):
    prog = [rank_features(d, "prognostic", order, estimator) for d in datasets]
    pred = [rank_features(d, "predictive", order, estimator) for d in datasets]
    return build_ppgraph(prog, pred, k=3, label=f"{order}-order")


@pytest.fixture(scope="session")
def foster_graph_second(foster_data):
    return _graph(foster_data, "second")


@pytest.fixture(scope="session")
def foster_graph_first(foster_data):
    return _graph(foster_data, "first")


ACCEPTANCE_LINES = []


def record(criterion, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
