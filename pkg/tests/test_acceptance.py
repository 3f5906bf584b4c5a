"""End-to-end acceptance checks, one test per criterion.

Each test prints a single ``criterion N: PASS|FAIL`` line before asserting.
"""

import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from fupstft.bounds import RadialFamily, build_schedule, cantor_fup_table, check_improvement
from fupstft.cantor import CantorSpec, GrowthCondition, RadialCantorSpec, build_iterate
from fupstft.density import check_weak_subadditivity, rho_exact_1d
from fupstft.experiments import ExperimentConfig, run_gabor_fup, run_radial_fup
from fupstft.operators.bargmann import check_hermite_sampling_identity
from fupstft.operators.radial import daubechies_radial_spectrum
from fupstft.operators.subaveraging import check_subaveraging
from fupstft.porosity import certify_cantor_porosity, verify_porosity_1d
from fupstft.special import kappa

from oracles import sliding_window_rho

@pytest.fixture
def report(capsys):
    def emit(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} {detail}"
        with capsys.disabled():
            print("\n" + line)
        return ok

    return emit


def test_criterion_1_measure_identity(report):
    rng = np.random.default_rng(1)
    specs = []
    while len(specs) < 50:
        M = int(rng.integers(2, 6))
        size = int(rng.integers(1, M))
        alphabet = tuple(sorted(rng.choice(M, size, replace=False).tolist()))
        L = Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 20)))
        specs.append((M, alphabet, int(rng.integers(0, 11)), L))
    start = time.perf_counter()
    exact_ok, worst_rel = True, 0.0
    for M, A, n, L in specs:
        want = Fraction(len(A), M) ** n * L
        exact_ok &= build_iterate(CantorSpec(M, A, n, L)).measure == want
        got = build_iterate(CantorSpec(M, A, n, float(L))).measure
        worst_rel = max(worst_rel, abs(got - float(want)) / float(want))
    elapsed = time.perf_counter() - start
    ok = exact_ok and worst_rel <= 1e-12 and elapsed < 1.0
    report(1, ok, f"exact={exact_ok} float_rel={worst_rel:.1e} time={elapsed:.2f}s")
    assert ok


def test_criterion_2_porosity_agreement(report):
    start = time.perf_counter()
    disagreements = []
    for M, A in ((3, (0, 2)), (4, (0, 3))):
        for n in range(1, 7):
            spec = CantorSpec(M, A, n, 1)
            certified = certify_cantor_porosity(spec).verified
            s = build_iterate(spec)
            nu = float(M) ** -2
            scales = np.geomspace(float(M) ** -n, 2.0, 21)
            for lo, hi in zip(scales[:-1], scales[1:]):
                if verify_porosity_1d(s, nu, lo, hi).verified != certified:
                    disagreements.append((M, n, lo))
    elapsed = time.perf_counter() - start
    ok = not disagreements and elapsed < 10
    report(2, ok, f"disagreements={len(disagreements)} time={elapsed:.2f}s")
    assert ok, disagreements[:3]


def test_criterion_3_density_oracles(report):
    worst = 0.0
    for n in range(0, 7):
        s = build_iterate(CantorSpec(3, (0, 2), n, 1.0))
        step = 3.0**-n / 64
        arr = s.as_array()
        for cells in (1, 2, 5, 64 + 7):
            window = cells * step * 7
            worst = max(worst, abs(rho_exact_1d(s, window).value - sliding_window_rho(arr, window, step)))
    rng = np.random.default_rng(3)
    checked, violations = 0, 0
    for A in ((0, 2), (0, 1), (1, 2)):
        for n in range(0, 7):
            spec = CantorSpec(3, A, n, 1.0)
            pts = np.sort(rng.uniform(-0.1, 1.1, (10_000, 2)), axis=1)
            res = check_weak_subadditivity(spec, pts.tolist())
            checked += res.checked
            violations += 0 if res else 1
    ok = worst <= 1e-10 and violations == 0
    report(3, ok, f"rho_max_diff={worst:.1e} pairs={checked} violations={violations}")
    assert ok


def test_criterion_4_subaveraging(report):
    rng = np.random.default_rng(4)
    start = time.perf_counter()
    failures = []
    for d in (1, 2):
        for p in (1.0, 2.0, 4.0):
            for _ in range(100):
                k = tuple(int(v) for v in rng.integers(0, 11, d))
                z = rng.uniform(-2, 2, d) + 1j * rng.uniform(-2, 2, d)
                R = float(rng.uniform(0.1, 2.0))
                res = check_subaveraging(k, z, R, p, d, budget=1e-6)
                if not res.passed:
                    failures.append((d, p, k, R, res.status))
    elapsed = time.perf_counter() - start
    ok = not failures and elapsed < 60
    report(4, ok, f"cases=600 failures={len(failures)} time={elapsed:.1f}s")
    assert ok, failures[:3]


def test_criterion_5_kappa_and_improvement(report):
    near_one = max(abs(kappa(d, 1e-8) - 1) for d in range(1, 5))
    grid = np.geomspace(1e-6, 50, 400)
    increasing = all(
        all(b > a for a, b in zip(vals, vals[1:])) for vals in ([kappa(d, x) for x in grid] for d in range(1, 5))
    )
    radii = np.linspace(10 / 1000, 10, 1000)
    improvement = check_improvement(radii)
    ok = near_one <= 1e-6 and increasing and bool(improvement)
    report(5, ok, f"max|kappa(1e-8)-1|={near_one:.1e} increasing={increasing} improvement={bool(improvement)}")
    assert ok


@pytest.fixture(scope="module")
def radial_run():
    start = time.perf_counter()
    cfg = ExperimentConfig(experiment="radial_fup", n_min=0, n_max=8)
    rows, summary = run_radial_fup(cfg)
    return rows, summary, time.perf_counter() - start


def test_criterion_6_radial_fup(report, radial_run):
    rows, summary, elapsed = radial_run
    family = RadialFamily(1, 3, (0, 2), lambda n: 3 ** (n / 4))
    cond = GrowthCondition("D_M", 1.0, 1.0, 3)
    _, gamma = cantor_fup_table(family, cond, [0.25 * j for j in range(1, 17)], range(9), 2.0, optimized=True)
    _, gamma_plain = cantor_fup_table(family, cond, [0.25 * j for j in range(1, 17)], range(9), 2.0, optimized=False)
    assert gamma == pytest.approx(summary["gamma"])
    below = all(r["norm"] <= gamma * (2 / 3) ** (r["n"] / 2) for r in rows)
    below_plain = all(r["norm"] <= gamma_plain * (2 / 3) ** (r["n"] / 2) for r in rows)
    ratios = [r["norm"] / (2 / 3) ** (r["n"] / 2) for r in rows]
    spread = max(ratios) / min(ratios)
    product = []
    for r in rows:
        h = min(1.0, family.scale(r["n"]))
        product.append(r["norm"] <= build_schedule(1 / 9, h, 1, 2.0).product_bound)
    ok = below and below_plain and spread < 3 and all(product) and elapsed < 30
    report(6, ok, f"gamma={gamma:.3f} ratio_spread={spread:.3f} product_bound={all(product)} time={elapsed:.1f}s")
    assert ok


def test_criterion_7_gabor_fup(report):
    start = time.perf_counter()
    cfg = ExperimentConfig(experiment="gabor_fup", n_min=0, n_max=5)
    rows, summary = run_gabor_fup(cfg)
    elapsed = time.perf_counter() - start
    dominated = all(r["norm"] <= r["product_bound"] for r in rows)
    sizes_ok = all(r["points"] <= 4096 for r in rows)
    norms = [r["norm"] for r in rows if r["n"] >= 1]
    monotone = all(b <= a * (1 + 1e-12) for a, b in zip(norms, norms[1:]))
    slope = summary["slope"]
    rng = np.random.default_rng(7)
    orders = [int(k) for k in rng.integers(0, 7, 50)]
    points = [tuple(p) for p in rng.uniform(-2, 2, (50, 2))]
    identity_err = check_hermite_sampling_identity(orders, points)
    ok = dominated and sizes_ok and monotone and slope > 0 and identity_err <= 1e-7 and elapsed < 120
    report(
        7,
        ok,
        f"product_bound={dominated} monotone={monotone} slope={slope:.3f} identity_err={identity_err:.1e} time={elapsed:.1f}s",
    )
    assert ok


def test_criterion_8_trace_identity(report):
    worst = 0.0
    for n in range(0, 9):
        spec = RadialCantorSpec(1, 3 ** (n / 4), 3, (0, 2), n)
        worst = max(worst, abs(daubechies_radial_spectrum(spec).trace - spec.volume))
    ok = worst <= 1e-10
    report(8, ok, f"max|trace-area|={worst:.1e}")
    assert ok


def test_criterion_9_determinism(report, tmp_path):
    outputs = []
    for experiment, n_max in (("gabor_fup", 4), ("radial_fup", 5)):
        runs = []
        for i in range(2):
            out = tmp_path / f"{experiment}{i}.csv"
            subprocess.run(
                [sys.executable, "-m", "fupstft.cli", "run", experiment, "--set", f"n_max={n_max}", "--seed", "5",
                 "--out", str(out)],
                check=True,
            )
            runs.append(out.read_bytes())
        outputs.append(runs[0] == runs[1] and len(runs[0]) > 0)
    ok = all(outputs)
    report(9, ok, f"byte_identical={outputs}")
    assert ok
