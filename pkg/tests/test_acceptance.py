"""Exit criteria. Each test prints one PASS/FAIL line in the terminal summary."""
import csv
import json
import math
import time

import numpy as np
import pytest

from hiddencoherence import measures as ms
from hiddencoherence import sampler as sp
from hiddencoherence import state as st
from hiddencoherence import theorems as th
from hiddencoherence.cli import main

from conftest import ACCEPTANCE_LINES, SQRT2, mixed_states, pure_states

GRID_101 = [round(i / 100, 12) for i in range(101)]
GRID_11 = [round(i / 10, 12) for i in range(11)]
FAMILIES = ("mnms", "mems", "exc", "werner")


def verdict(number, title, ok, detail=""):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}"
    if detail:
        line += f" -- {detail}"
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def closed_form_curves(family, x):
    """(bmax_upper, bmax_lower, d2_max) written out per family."""
    if family == "mnms":
        return 2 * math.sqrt(1 + x * x), 2 * x, (1 + x * x) / 2
    if family == "mems":
        if x <= 2 / 3:
            d2 = x * x / 4 + (1 / 3 + x / 2) ** 2
            return 2 * SQRT2 * math.sqrt(d2), 2 * abs(x - 1 / 3), d2
        d2 = x * x + (1 - x) ** 2
        return 2 * SQRT2 * math.sqrt(d2), 2 * abs(2 * x - 1), d2
    if family == "exc":
        p = 1 - 1.5 * x + 1.5 * x * x
        return 2 * SQRT2 * math.sqrt(p), 2 * math.sqrt(1 - 3 * x + 3 * x * x), p
    return 2 * SQRT2 * x, 2 * x, x * x


@pytest.fixture(scope="module")
def states():
    return mixed_states(1000, seed=2024)


def test_criterion_1_closed_form_curves(tmp_path):
    worst = 0.0
    start = time.perf_counter()
    paths = {}
    for family in FAMILIES:
        paths[family] = tmp_path / f"{family}.csv"
        assert main(["sweep", "--family", family, "--range", "0:1:0.01", "--out", str(paths[family])]) == 0
    elapsed = time.perf_counter() - start
    for family in FAMILIES:
        rows = list(csv.DictReader(paths[family].open()))
        assert [float(r["param"]) for r in rows] == GRID_101
        for r in rows:
            x = float(r["param"])
            upper, lower, d2 = closed_form_curves(family, x)
            worst = max(
                worst,
                abs(float(r["bmax_upper"]) - upper),
                abs(float(r["bmax_lower"]) - lower),
                abs(float(r["d2_max"]) - d2),
            )
            assert float(r["d_sq_orig"]) <= float(r["d2_max"]) + 1e-9
    verdict(
        1,
        "closed-form curves, 4 families x 101 points",
        worst <= 1e-10 and elapsed < 1.0,
        f"max error {worst:.2e} (tol 1e-10), {elapsed:.2f}s (limit 1s)",
    )


def test_criterion_2_min_coherence(states):
    start = time.perf_counter()
    worst_d = worst_b = 0.0
    for rho in states:
        res = th.min_coherence_transform(rho)
        d_a, d_b, _ = ms.coherence(res.state)
        b = th.bounds(st.spectral(rho).lambdas)
        worst_d = max(worst_d, d_a, d_b)
        worst_b = max(worst_b, abs(ms.bmax(res.state) - b.bmax_upper))
    elapsed = time.perf_counter() - start
    verdict(
        2,
        "min-coherence transform on 1000 states",
        worst_d <= 1e-10 and worst_b <= 1e-10 and elapsed < 10,
        f"max D_A,D_B {worst_d:.1e}, max |Bmax - bound| {worst_b:.1e}, {elapsed:.2f}s",
    )


def test_criterion_3_max_coherence(states):
    worst = {"offdiag": 0.0, "d_sq": 0.0, "bmax": 0.0, "conc": 0.0}
    for rho in states:
        res = th.max_coherence_transform(rho)
        m = res.state.mat
        b = th.bounds(st.spectral(rho).lambdas)
        worst["offdiag"] = max(worst["offdiag"], np.abs(m - np.diag(np.diag(m))).max())
        worst["d_sq"] = max(worst["d_sq"], abs(ms.coherence(res.state)[2] - b.d2_max))
        worst["bmax"] = max(worst["bmax"], abs(ms.bmax(res.state) - b.bmax_lower))
        worst["conc"] = max(worst["conc"], ms.concurrence(res.state))
    ok = worst["offdiag"] <= 1e-10 and worst["d_sq"] <= 1e-10 and worst["bmax"] <= 1e-10 and worst["conc"] <= 1e-8
    verdict(3, "max-coherence transform on 1000 states", ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))


@pytest.mark.slow
def test_criterion_4_region_containment(tmp_path):
    start = time.perf_counter()
    codes = []
    for family in FAMILIES:
        for x in GRID_11:
            out = tmp_path / f"{family}-{x}.json"
            argv = ["verify", "--family", family, "--param", str(x), "--samples", "10000",
                    "--seed", "1", "--measure", "haar", "--out", str(out)]
            codes.append(main(argv))
    gaps = []
    for family in FAMILIES:
        out = tmp_path / f"{family}-mid.json"
        argv = ["verify", "--family", family, "--param", "0.5", "--samples", "100000",
                "--seed", "2", "--out", str(out)]
        codes.append(main(argv))
        doc = json.loads(out.read_text())
        b, obs = doc["bounds"], doc["observed"]
        gaps.append(b["bmax_upper"] - obs["bmax_max"])
        gaps.append(b["d2_max"] - obs["d2_max"])
    elapsed = time.perf_counter() - start
    ok = all(c == 0 for c in codes) and max(gaps) <= 0.05 and elapsed < 60
    verdict(
        4,
        "Monte Carlo region containment",
        ok,
        f"{codes.count(0)}/{len(codes)} runs exit 0, largest gap to extreme {max(gaps):.4f} (tol 0.05), {elapsed:.1f}s",
    )


def test_criterion_5_invariants(states):
    worst_t2 = worst_tb = worst_t1 = worst_sym = 0.0
    for rho in states:
        d_a, d_b, _ = ms.coherence(rho)
        t, p = ms.tcal(rho), ms.purity(rho)
        worst_t2 = max(worst_t2, abs((d_a**2 + d_b**2) / 4 + t - p))
        l1, l2, l3, l4 = st.spectral(rho).lambdas
        lower = ((l1 + l4) ** 2 + (l2 + l3) ** 2) / 2
        worst_tb = max(worst_tb, lower - t, t - p)
    for rho in pure_states(1000, seed=2024):
        d_a, d_b, _ = ms.coherence(rho)
        d_sq = (d_a**2 + d_b**2) / 2
        worst_t1 = max(worst_t1, abs(d_sq / 2 + (ms.bmax(rho) / (2 * SQRT2)) ** 2 - 1))
        worst_sym = max(worst_sym, abs(d_a - d_b))
    ok = worst_t2 <= 1e-10 and worst_tb <= 1e-10 and worst_t1 <= 1e-10 and worst_sym <= 1e-10
    verdict(
        5,
        "coherence/correlation identities",
        ok,
        f"mixed identity {worst_t2:.1e}, T-bounds excess {worst_tb:.1e}, pure identity {worst_t1:.1e}, |D_A-D_B| {worst_sym:.1e}",
    )


def test_criterion_6_generalized_werner():
    worst_b = worst_t = worst_s = 0.0
    for p in np.linspace(0, 1, 21):
        for k1 in np.linspace(0, 1, 21):
            k2sq = 1 - k1 * k1
            rho = st.gen_werner(p, k1)
            worst_b = max(worst_b, abs(ms.bmax(rho) - 2 * p * math.sqrt(1 + 4 * k1 * k1 * k2sq)))
            worst_t = max(worst_t, abs(ms.tcal(rho) - (1 + p * p + 8 * p * p * k1 * k1 * k2sq) / 4))
            d_sq = ms.coherence(rho)[2]
            worst_s = max(worst_s, abs(d_sq / 2 + (ms.bmax(rho) / (2 * SQRT2)) ** 2 - p * p))
    ok = max(worst_b, worst_t, worst_s) <= 1e-10
    verdict(6, "generalized Werner closed forms on 21x21 grid", ok,
            f"Bmax {worst_b:.1e}, T {worst_t:.1e}, S {worst_s:.1e}")


def test_criterion_7_concurrence_hierarchy():
    b = th.family_bounds("mnms", 0.5)
    exact = b.c_bd == 0.5 and b.c_max == 0.75
    rng = np.random.Generator(np.random.PCG64(2024))
    worst = 0.0
    for _ in range(1000):
        lam = np.sort(rng.dirichlet(np.ones(4)))[::-1]
        worst = max(worst, abs(ms.concurrence(th.bell_diagonal(lam)) - max(0.0, 2 * lam[0] - 1)))
    verdict(7, "concurrence hierarchy", exact and worst <= 1e-10,
            f"MNMS(0.5) C_BD={b.c_bd}, C_max={b.c_max}; Bell-diagonal max error {worst:.1e}")


@pytest.mark.slow
def test_criterion_8_s_bounds():
    worst = 0.0
    for family in FAMILIES:
        for x in GRID_11:
            rho = st.family_state(family, x)
            b = th.bounds(st.spectral(rho).lambdas)
            res = sp.explore(rho, 10_000, seed=8)
            worst = max(worst, b.s_min - res.s_comb.min(), res.s_comb.max() - b.s_max)
    werner_gap = werner_spread = 0.0
    for x in GRID_11:
        b = th.family_bounds("werner", x)
        werner_gap = max(werner_gap, abs(b.s_max - b.s_min))
        res = sp.explore(st.werner(x), 10_000, seed=9)
        werner_spread = max(werner_spread, np.abs(res.s_comb - x * x).max())
    ok = worst <= 1e-9 and werner_gap <= 1e-12 and werner_spread <= 1e-9
    verdict(8, "S-parameter bounds", ok,
            f"excess {worst:.1e}, Werner |Smax-Smin| {werner_gap:.1e}, Werner S spread {werner_spread:.1e}")


@pytest.mark.slow
def test_criterion_9_stationarity():
    rng = np.random.Generator(np.random.PCG64(99))
    worst = -np.inf
    for i in range(100):
        lam = np.sort(rng.dirichlet(np.ones(4)))[::-1]
        rho = st.validate(np.diag(lam))
        d2_max = th.bounds(lam).d2_max
        worst = max(worst, sp.stationarity_check(rho, delta=1e-3, n=10_000, seed=i) - d2_max)
    verdict(9, "stationarity of the diagonal state", worst <= 1e-5,
            f"max excess over D2_max {worst:.1e} (tol 1e-5)")
