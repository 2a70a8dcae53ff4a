"""Exit criteria of the package, one test per criterion, each at its pinned tolerance.

Every test calls ``record`` so the terminal summary lists one PASS/FAIL line
per criterion.
"""

import csv
import math
import time
import xml.etree.ElementTree as ET
from dataclasses import replace

import numpy as np
import pytest
from scipy import integrate, stats
from scipy.special import expit

import oracles
from conftest import FOSTER_REPS, random_dataset, record
from pprank._io import write_trial_csv
from pprank.bench import MseBenchConfig, export_bench_csv, read_bench_csv, run_mse_bench
from pprank.datagen import discretize_equal_width, foster_spec, simulate
from pprank.ppgraph import export_csv, read_csv, render_svg
from pprank.prob_core import ContingencyTable, JointDistribution, conditional_mutual_information, mutual_information, shrinkage_estimate
from pprank.ranking import AXES, ESTIMATORS, ORDERS, rank_features

X1, X2, X3, X7 = 0, 1, 2, 6
IRRELEVANT = set(range(15)) - {X1, X2, X3, X7}


def names(features):
    return sorted(f"x{f + 1}" for f in features)


def test_1_chain_rule():
    rng = np.random.default_rng(2024)
    axes = (("X", 4), ("T", 2), ("Y", 2))
    start = time.perf_counter()
    worst = 0.0
    for _ in range(1000):
        probs = rng.dirichlet(np.full(16, 0.7))
        probs[rng.random(16) < 0.15] = 0.0
        probs /= probs.sum()
        d = JointDistribution(axes, probs.reshape(4, 2, 2))
        lhs = mutual_information(d, ["X", "T"], ["Y"])
        rhs = mutual_information(d, ["X"], ["Y"]) + conditional_mutual_information(d, ["T"], ["Y"], ["X"])
        worst = max(worst, abs(lhs - rhs))
    elapsed = time.perf_counter() - start
    ok = worst < 1e-10 and elapsed < 1.0
    record(1, ok, f"max |I(XT;Y) - I(X;Y) - I(T;Y|X)| = {worst:.2e} over 1000 laws in {elapsed:.2f}s")
    assert worst < 1e-10
    assert elapsed < 1.0


def test_2_oracle_equivalence():
    rng = np.random.default_rng(7)
    datasets = [random_dataset(rng, n=200, p=4, max_card=3) for _ in range(100)]
    combos = [(a, o, e) for a in AXES for o in ORDERS for e in ESTIMATORS]
    start = time.perf_counter()
    ours = [[rank_features(d, *c).features for c in combos] for d in datasets]
    elapsed = time.perf_counter() - start
    mismatches = [
        (i, c) for i, d in enumerate(datasets) for c, got in zip(combos, ours[i])
        if got != oracles.greedy_rank(d, *c)
    ]
    ok = not mismatches and elapsed < 30
    record(2, ok, f"{len(datasets) * len(combos)} rankings, {len(mismatches)} mismatches, {elapsed:.1f}s")
    assert not mismatches
    assert elapsed < 30


def test_3_mse_dominance_and_convergence():
    start = time.perf_counter()
    res = run_mse_bench(MseBenchConfig(cards=(2, 2, 25), replicates=500, seed=0))
    elapsed = time.perf_counter() - start
    dominated = all(res.row(n).mse_shrinkage < res.row(n).mse_ml for n in (32, 64, 128, 256, 512, 1024))
    ml_ratio = res.row(4096).mse_ml / res.row(32).mse_ml
    sh_ratio = res.row(4096).mse_shrinkage / res.row(32).mse_shrinkage
    ok = dominated and ml_ratio < 0.1 and sh_ratio < 0.1 and elapsed < 120
    record(3, ok, f"shrinkage < ML for n<=1024: {dominated}; MSE(4096)/MSE(32) ml={ml_ratio:.4f} "
                  f"shrink={sh_ratio:.4f}; {elapsed:.1f}s")
    assert dominated
    assert ml_ratio < 0.1 and sh_ratio < 0.1
    assert elapsed < 120


@pytest.mark.slow
def test_4_second_order_pp_graph(foster_data):
    start = time.perf_counter()
    from conftest import _graph

    g = _graph(foster_data, "second")
    elapsed = time.perf_counter() - start
    pred_top = set(g.top("predictive"))
    prog_top = set(g.top("prognostic"))
    in_bands = IRRELEVANT & (set(g.band("predictive")) | set(g.band("prognostic")))
    ok = pred_top == {X1, X2, X3} and prog_top == {X1, X2, X7} and not in_bands and elapsed < 300
    record(4, ok, f"{len(foster_data)} datasets: predictive top-3 {names(pred_top)}, "
                  f"prognostic top-3 {names(prog_top)}, irrelevant in bands {names(in_bands)}; {elapsed:.1f}s")
    assert len(foster_data) == FOSTER_REPS
    assert pred_top == {X1, X2, X3}
    assert prog_top == {X1, X2, X7}
    assert not in_bands
    assert elapsed < 300


@pytest.mark.slow
def test_5_first_order_false_negative(foster_graph_first):
    g = foster_graph_first
    prog_band, pred_band = set(g.band("prognostic")), set(g.band("predictive"))
    pred = {f: g.points[f].pred for f in (X1, X2, X3)}
    checks = {
        "x1 in prognostic band": X1 in prog_band,
        "x1 not in predictive band": X1 not in pred_band,
        "x2 in predictive band": X2 in pred_band,
        "x3 in predictive band": X3 in pred_band,
    }
    failed = [k for k, v in checks.items() if not v]
    record(5, not failed, f"cutoff {g.cutoff:.2f}; predictive scores x1={pred[X1]:.3f} x2={pred[X2]:.3f} "
                          f"x3={pred[X3]:.3f}; failed: {failed or 'none'}")
    assert not failed, failed


def test_6_shrinkage_spot_check():
    d, rep = shrinkage_estimate(ContingencyTable((("A", 2),), np.array([6, 2])))
    ok = abs(rep.lam - 3 / 7) < 1e-9 and np.allclose(d.probs, [0.642857142857, 0.357142857143], rtol=0, atol=1e-9)
    record(6, ok, f"lambda={rep.lam:.12f}, probs={d.probs.round(9).tolist()}")
    assert rep.lam == pytest.approx(3 / 7, abs=1e-9)
    np.testing.assert_allclose(d.probs, [0.642857142857, 0.357142857143], rtol=0, atol=1e-9)


def _zero_bin_cells(trial):
    codes, edges = discretize_equal_width(trial.x, 4)
    zero_bin = np.array([int(np.searchsorted(e, 0.0, side="right")) for e in edges])
    lo, hi = [], []
    for j, e in enumerate(edges):
        full = np.concatenate([[trial.x[:, j].min()], e, [trial.x[:, j].max()]])
        lo.append(full[zero_bin[j]])
        hi.append(full[zero_bin[j] + 1])
    return codes, zero_bin, np.array(lo), np.array(hi)


def test_7_generator_sanity():
    spec = foster_spec()
    trial = simulate(replace(spec, n=10**6), seed=0)
    codes, zero_bin, lo, hi = _zero_bin_cells(trial)
    control = trial.t == 0

    # all fifteen features in the bin that contains 0, compared with the bin centers
    cell = control & np.all(codes == zero_bin, axis=1)
    k = int(cell.sum())
    p_hat = trial.y[cell].mean()
    centers = (lo + hi) / 2
    p_center = float(spec.prob(centers[None, :], np.zeros(1))[0])
    se_center = math.sqrt(p_center * (1 - p_center) / k)
    z_center = (p_hat - p_center) / se_center

    # same event restricted to the features the control-arm law depends on, with the
    # analytic cell probability obtained by integrating over the truncated normals
    rel = [X1, X2, X7]
    cell3 = control & np.all(codes[:, rel] == zero_bin[rel], axis=1)
    k3 = int(cell3.sum())
    p3_hat = trial.y[cell3].mean()
    f = lambda x7, x2, x1: expit(-1 + 0.5 * x1 + 0.5 * x2 - 0.5 * x7 + 0.5 * x2 * x7) * stats.norm.pdf(  # noqa: E731
        x1) * stats.norm.pdf(x2) * stats.norm.pdf(x7)
    mass = np.prod([stats.norm.cdf(hi[j]) - stats.norm.cdf(lo[j]) for j in rel])
    p3 = integrate.tplquad(f, lo[X1], hi[X1], lo[X2], hi[X2], lo[X7], hi[X7], epsabs=1e-10)[0] / mass
    z3 = (p3_hat - p3) / math.sqrt(p3 * (1 - p3) / k3)

    arms = [simulate(spec, seed).t.mean() for seed in range(50)]
    balanced = all(0.45 <= m <= 0.55 for m in arms)
    ok = abs(z_center) < 3 and abs(z3) < 3 and balanced
    record(7, ok, f"15-bin cell: n={k}, p_hat={p_hat:.4f} vs center {p_center:.4f} (z={z_center:+.2f}); "
                  f"3-bin cell: n={k3}, p_hat={p3_hat:.4f} vs integral {p3:.4f} (z={z3:+.2f}); "
                  f"mean(t) in [{min(arms):.3f}, {max(arms):.3f}]")
    assert abs(z_center) < 3
    assert abs(z3) < 3
    assert balanced


def test_8_output_contracts(foster_data, tmp_path):
    from conftest import _graph

    g = _graph(foster_data[:5], "second")
    render_svg(g, tmp_path / "g.svg")
    root = ET.parse(tmp_path / "g.svg").getroot()
    n_markers = sum(1 for el in root.iter() if el.get("class") == "marker")

    export_csv(g, tmp_path / "g.csv")
    pp_err = max(
        max(abs(prog - pt.prog), abs(pred - pt.pred))
        for (_, prog, pred), pt in zip(read_csv(tmp_path / "g.csv"), g.points)
    )

    res = run_mse_bench(MseBenchConfig(sizes=(32, 64), replicates=20))
    export_bench_csv(res, tmp_path / "m.csv")
    back = read_bench_csv(tmp_path / "m.csv")
    bench_err = max(
        max(abs(a.mse_ml - b.mse_ml), abs(a.mse_shrinkage - b.mse_shrinkage)) for a, b in zip(res.rows, back.rows)
    )

    trial = simulate(replace(foster_spec(), n=200), seed=1)
    write_trial_csv(trial, tmp_path / "d.csv")
    with open(tmp_path / "d.csv", newline="") as fh:
        rows = list(csv.reader(fh))[1:]
    data = np.array(rows, dtype=float)
    data_err = float(np.max(np.abs(data[:, 2:] - trial.x)))
    labels_ok = np.array_equal(data[:, 0], trial.y) and np.array_equal(data[:, 1], trial.t)

    ok = n_markers == g.p and max(pp_err, bench_err, data_err) <= 1e-6 and labels_ok
    record(8, ok, f"SVG markers {n_markers}/{g.p}; CSV round-trip errors pp={pp_err:.1e} "
                  f"bench={bench_err:.1e} dataset={data_err:.1e}")
    assert n_markers == g.p
    assert pp_err <= 1e-6 and bench_err <= 1e-6 and data_err <= 1e-6
    assert labels_ok
