"""Acceptance suite: one test per criterion, each printing a single
pass/fail line.  Gates and sample sizes are pinned here on purpose; the
experiment drivers carry the same defaults but the suite must not drift
with them."""

import sys

import numpy as np
import pytest

from scramblab import experiments
from scramblab.cli import main
from scramblab.haar import moment_mc
from scramblab.rng import stream

SEED = 20260826


def verdict(num, name, ok):
    print(f"criterion {num:02d} [{name}]: {'PASS' if ok else 'FAIL'}",
          file=sys.stderr, flush=True)
    assert ok, f"criterion {num} ({name}) failed"


def test_criterion_01_haar_second_moment():
    patterns = [
        ([((1, 1), False), ((1, 1), True)], 0.125),
        ([((1, 1), False), ((2, 1), True)], 0.0),
        ([((1, 1), False), ((1, 2), True)], 0.0),
        ([((1, 1), False), ((2, 2), True)], 0.0),
    ]
    ok = True
    for t, (pat, exact) in enumerate(patterns):
        est = moment_mc(8, pat, 10 ** 5, stream(SEED, 1, t))
        ok = ok and abs(est.value - exact) <= 5 * est.std_error
    verdict(1, "haar second moment", ok)


def test_criterion_02_haar_fourth_moment():
    ok = True
    for dim in (2, 4):
        rows, summary = experiments.haar_moments(dim, 10 ** 5, SEED + dim)
        fourth = [r for r in rows if r["order"] == "fourth"]
        ok = ok and len(fourth) == 12 and all(r["n_sigma"] <= 5 for r in fourth)
        if dim == 2:
            row = next(r for r in fourth if r["pattern"] == "|U11|^4")
            ok = ok and abs(row["exact"] - 1.0 / 3.0) < 1e-15
    verdict(2, "haar fourth moment", ok)


def test_criterion_03_page_purity():
    rows, summary = experiments.page_purity(2, [3, 8], 10 ** 4, SEED + 3)
    ok = summary["passed"]
    ok = ok and abs(rows[0]["exact_purity"] - 2.0 / 3.0) < 1e-15
    ok = ok and abs(rows[1]["exact_purity"] - (2 + 2 ** 7) / (2 ** 8 + 1)) < 1e-15
    ok = ok and all(r["n_sigma"] <= 3 for r in rows)
    verdict(3, "page purity", ok)


def test_criterion_04_cross_overlap_decay():
    rows, summary = experiments.cross_overlap(2, [4, 6, 8, 10], 2, 50, SEED + 4)
    meds = [r["median_overlap"] for r in rows]
    ratios = [r["ratio_vs_prev"] for r in rows[1:]]
    ok = all(meds[i] < meds[i - 1] for i in range(1, len(meds)))
    ok = ok and all(0.3 <= r <= 0.8 for r in ratios)
    verdict(4, "cross-overlap decay", ok)


def test_criterion_05_gram_orthonormality():
    rows, summary = experiments.components(2, 2, [6, 8, 10], 20, SEED + 5)
    med = {r["N"]: r["median_gram_residual"] for r in rows}
    ok = med[8] <= 5 * 2 ** (-2.5)
    ok = ok and med[10] < med[6]
    verdict(5, "gram orthonormality", ok)


def test_criterion_06_overlap_factorization():
    # 200 seeds: the medians decay like 2^{-N/2}, and adjacent N differ by
    # little enough at the top end that 50 seeds leaves the ordering noisy
    rows, summary = experiments.factorization(2, 2, [5, 6, 7, 8], [0.3, 0.7],
                                              200, SEED + 6)
    meds = [r["median_abs_error"] for r in rows]
    ok = meds[-1] <= 0.1
    ok = ok and all(meds[i] <= meds[i - 1] for i in range(1, len(meds)))
    verdict(6, "overlap factorization", ok)


def test_criterion_07_fisher_two_route():
    rows, summary = experiments.fisher_two_route(50, SEED + 7)
    ok = summary["worst_route_diff"] <= 1e-10
    verdict(7, "fisher two-route identity", ok)


def test_criterion_08_derivative_correctness():
    rows, summary = experiments.fisher_derivative_check(20, SEED + 8, h=1e-5)
    ok = summary["worst_rel_error"] <= 1e-6
    # central differences are O(h^2): a decade in h gives ~100x in error
    ok = ok and all(r["convergence_ratio"] >= 30 for r in rows)
    verdict(8, "derivative correctness", ok)


def test_criterion_09_rotational_isometry():
    rows, summary = experiments.isometry(2, 8, 2, 3, 50, SEED + 9)
    ok = summary["median_anisotropy"] <= 0.2
    ok = ok and summary["median_theta_drift"] <= 0.2
    ok = ok and abs(summary["median_F"] - 1.0) <= 0.2
    ok = ok and summary["worst_chain_rule_residual"] <= 1e-8
    verdict(9, "rotational isometry", ok)


def test_criterion_10_isometry_breaking_low_temperature():
    rows, summary = experiments.isometry_low_temperature(2, 8, 2, 2, 25, SEED + 10)
    ok = summary["d_E"] <= 16
    ok = ok and summary["fraction_shell_larger"] >= 0.8
    verdict(10, "isometry breaking at low temperature", ok)


def test_criterion_11_canonical_typicality():
    _, flat = experiments.typicality(2, 8, 1, 100, SEED + 11)
    ok = flat["d_E"] == 256
    ok = ok and flat["mean_state_error"] <= 5 * max(flat["mean_state_se"], 1e-15)
    ok = ok and flat["hs_variance"] <= 4.0 / 257.0 * (1 + 5 / np.sqrt(100))

    _, shell = experiments.typicality(2, 8, 1, 200, SEED + 11, E_tot=2.0)
    ok = ok and shell["hs_variance"] <= shell["variance_bound"] * (1 + 5 / np.sqrt(200))
    ok = ok and shell["fraction_close_to_gibbs"] >= 0.9
    verdict(11, "canonical typicality", ok)


SMALL_RUNS = [
    ["haar-moments", "--dim", "2", "--samples", "2000"],
    ["page-purity", "--N-list", "3", "4", "--samples", "1000"],
    ["cross-overlap", "--N-list", "4", "6", "--seeds", "5"],
    ["components", "--N-list", "5", "6", "--seeds", "3"],
    ["factorization", "--N-list", "5", "6", "--seeds", "5"],
    ["fisher", "--frames", "5", "--specs", "3"],
    ["isometry", "--seeds", "3", "--grid", "2"],
    ["isometry-lowT", "--pairs", "3", "--grid", "2"],
    ["typicality", "--samples", "50", "--E-tot", "2.0"],
]


def test_criterion_12_determinism(tmp_path):
    ok = True
    for argv in SMALL_RUNS:
        kind = argv[0]
        blobs = []
        for threads, label in ((1, "a"), (3, "b")):
            out = tmp_path / f"{kind}-{label}"
            code = main(argv + ["--seed", str(SEED), "--threads", str(threads),
                                "--out", str(out), "--no-plot"])
            ok = ok and code in (0, 1)
            name = kind.replace("-", "_")
            blobs.append((out / f"{name}.csv").read_bytes())
        ok = ok and blobs[0] == blobs[1]
    verdict(12, "determinism across worker counts", ok)
