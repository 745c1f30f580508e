"""Acceptance criteria for the 2x3 benchmark instance.

Each criterion prints one ``[PASS]``/``[FAIL]`` line; the lines are repeated
in the pytest terminal summary.  Run directly with
``python tests/test_acceptance.py`` for the lines alone.

Set ``QGP_ACCEPTANCE_JOINT=1`` to also print (not gate) the serial control
under the joint H11 + H12 training objective.
"""

from __future__ import annotations

import functools
import itertools
import os
import random
import sys
import tempfile
import time
from fractions import Fraction

import numpy as np
import pytest

from qgridpath.energy import aux_vars, local_energies, path_energy, total_connectivity_energy
from qgridpath.errors import AllFiltered
from qgridpath.experiments import ExperimentSpec, read_summary, run_sweep
from qgridpath.grid import build_grid, grid_edges, paper_grid, uniform_grid
from qgridpath.hamiltonian import QubitLayout, lower
from qgridpath.optimizer import value_and_gradient
from qgridpath.oracle import optimal_path, shortest_path_crosscheck
from qgridpath.pipeline import apply_filter, compile_problem, merge, normalize, rank_of, solve_parallel, solve_serial
from qgridpath.polynomial import SpinPolynomial as P, x
from qgridpath.qaoa import apply_cost_layer, apply_mixer_layer, initial_state, sample

TARGET = "001111"
SEEDS = range(10)
GATE_HEADLINE = 8  # criterion 3: argmax hits out of 10
GATE_FILTER = 8  # criterion 4: seeds where the filter improves the target rank
GATE_SERIAL = 7  # criterion 5: seeds per p where the target is NOT the argmax
SERIAL_PS = (1, 10)
THETA = 0.05
RANDOM_GRIDS = 25
UNITARITY_TOL = 1e-10
COMMUTE_TOL = 1e-12
GRADIENT_TOL = 1e-5
SIGMAS = 6
SHOTS = 200_000
BUDGET = {1: 1.0, 2: 10.0, 3: 120.0, 5: 180.0, 6: 60.0}

RESULTS: dict[int, str] = {}


def record(n: int, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {detail}"
    RESULTS[n] = line
    print(line)


def _coeff_poly(terms: dict) -> P:
    out = {}
    for key, c in terms.items():
        out[tuple(x(int(v)) for v in key.split("*")) if key else ()] = c
    return P(out)


# printed coefficient lists from the worked 2x3 example
PAPER_H11 = _coeff_poly({"1": 1, "2": 3, "3": 1, "4": 1, "5": 3, "6": 1, "1*2": -1, "1*5": 2, "2*6": 2, "5*6": -1})
PAPER_H11_CONSTANT = 8
PAPER_H12 = _coeff_poly(
    {"1": -2, "2": -6, "3": -5, "4": -2, "5": -3, "6": -2,
     "1*2": 1, "1*4": 1, "2*3": 4, "2*5": 1, "3*6": 1, "4*5": 1, "5*6": 1}
)


# ---------------------------------------------------------------------------


def criterion_1() -> bool:
    t0 = time.perf_counter()
    grid = paper_grid()
    layout = QubitLayout.for_variables(6, aux_vars(grid))
    h11 = lower(total_connectivity_energy(grid), layout, 100)
    h12 = lower(path_energy(grid), QubitLayout.for_variables(6), 100, normalize_common_factor=True)
    p11 = lower(PAPER_H11, QubitLayout.for_variables(6), 100)
    p12 = lower(PAPER_H12, QubitLayout.for_variables(6), 100)
    ours_zero = {b for b in range(64) if h11.eigenvalue_exact(b) + 100 * h11.dropped_constant == 0}
    paper_zero = {b for b in range(64) if p11.eigenvalue_exact(b) + 100 * PAPER_H11_CONSTANT == 0}
    table_ok = all(h12.eigenvalue_exact(b) == p12.eigenvalue_exact(b) for b in range(64))
    elapsed = time.perf_counter() - t0
    ok = ours_zero == paper_zero and table_ok and elapsed < BUDGET[1]
    record(1, ok, f"H11 zero set {len(ours_zero)} states {'==' if ours_zero == paper_zero else '!='} paper; "
                  f"H12 table {'matches' if table_ok else 'differs'} (exact); {elapsed:.3f}s < {BUDGET[1]}s")
    return ok


def _random_grid(rng: random.Random):
    shapes = [(r, c) for r in range(2, 7) for c in range(2, 7) if r * c <= 12]
    rows, cols = rng.choice(shapes)
    costs = {e: rng.randint(1, 5) for e in grid_edges(rows, cols)}
    start = rng.choice([r * cols + 1 for r in range(rows)])
    target = rng.choice([r * cols + cols for r in range(rows)])
    return build_grid(rows, cols, start, target, costs)


def criterion_2() -> bool:
    t0 = time.perf_counter()
    res = optimal_path(paper_grid())
    paper_ok = res.optimal_ket == TARGET and res.optimal_cost == 3
    rng = random.Random(0)
    agree = 0
    for _ in range(RANDOM_GRIDS):
        grid = _random_grid(rng)
        agree += optimal_path(grid).optimal_cost == shortest_path_crosscheck(grid)[1]
    elapsed = time.perf_counter() - t0
    ok = paper_ok and agree == RANDOM_GRIDS and elapsed < BUDGET[2]
    record(2, ok, f"2x3 optimum {res.optimal_ket} cost {res.optimal_cost}; oracle == shortest path on "
                  f"{agree}/{RANDOM_GRIDS} random grids (tolerance 0); {elapsed:.2f}s < {BUDGET[2]}s")
    return ok


@functools.lru_cache(maxsize=None)
def parallel_runs():
    """(filtered, unfiltered) exact-probability reports for every seed, plus wall time."""
    grid = paper_grid()
    problem = compile_problem(grid)
    t0 = time.perf_counter()
    runs = []
    for seed in SEEDS:
        on = solve_parallel(grid, 1, THETA, None, seed, problem=problem)
        off = solve_parallel(grid, 1, 0.0, None, seed, problem=problem)
        runs.append((on, off))
    return runs, time.perf_counter() - t0


def criterion_3() -> bool:
    runs, elapsed = parallel_runs()
    hits = sum(on.argmax_ket == TARGET for on, _ in runs)
    ok = hits >= GATE_HEADLINE and elapsed < BUDGET[3]
    kets = " ".join(on.argmax_ket for on, _ in runs)
    record(3, ok, f"parallel p=1 theta={THETA} exact, best of 20 restarts: argmax {TARGET} in {hits}/10 seeds "
                  f"(gate >= {GATE_HEADLINE}) [{kets}]; {elapsed:.1f}s (with #4) < {BUDGET[3]}s")
    return ok


def criterion_4() -> bool:
    runs, _ = parallel_runs()
    target = int(TARGET, 2)
    ranks = [(rank_of(on.distribution, target), rank_of(off.distribution, target)) for on, off in runs]
    worse = sum(off > on for on, off in ranks)
    ok = worse >= GATE_FILTER
    pairs = " ".join(f"{on}/{off}" for on, off in ranks)
    record(4, ok, f"target rank with/without filter [{pairs}]; worse without filter in {worse}/10 "
                  f"(gate >= {GATE_FILTER})")
    return ok


def _serial_argmaxes(p: int, objective: str) -> list[str]:
    grid = paper_grid()
    problem = compile_problem(grid)
    out = []
    for seed in SEEDS:
        try:
            out.append(solve_serial(grid, p, THETA, None, seed, problem=problem, objective=objective).argmax_ket)
        except AllFiltered:
            out.append("filtered-out")
    return out


def criterion_5() -> bool:
    t0 = time.perf_counter()
    parts, ok = [], True
    for p in SERIAL_PS:
        kets = _serial_argmaxes(p, "blockwise")
        misses = sum(k != TARGET for k in kets)
        ok &= misses >= GATE_SERIAL
        filtered = kets.count("filtered-out")
        parts.append(f"p={p}: not argmax in {misses}/10" + (f" ({filtered} fully filtered)" if filtered else ""))
    elapsed = time.perf_counter() - t0
    ok &= elapsed < BUDGET[5]
    record(5, ok, f"serial control, blockwise training, theta={THETA} exact: {'; '.join(parts)} "
                  f"(gate >= {GATE_SERIAL} each); {elapsed:.1f}s < {BUDGET[5]}s")
    if os.environ.get("QGP_ACCEPTANCE_JOINT"):
        info = []
        for p in SERIAL_PS:
            kets = _serial_argmaxes(p, "joint")
            info.append(f"p={p}: not argmax in {sum(k != TARGET for k in kets)}/10")
        print(f"[INFO] criterion 5 under joint H11+H12 training (not gated): {'; '.join(info)}")
    return ok


# property suites -------------------------------------------------------------


def _unitarity() -> bool:
    rng = np.random.default_rng(0)
    h = compile_problem(paper_grid()).h_connectivity
    worst = 0.0
    for _ in range(100):
        state = initial_state(6)
        for _ in range(int(rng.integers(1, 6))):
            state = apply_cost_layer(state, h, rng.uniform(-1, 1))
            worst = max(worst, abs(np.linalg.norm(state) - 1))
            state = apply_mixer_layer(state, rng.uniform(-np.pi, np.pi))
            worst = max(worst, abs(np.linalg.norm(state) - 1))
    return worst < UNITARITY_TOL


def _commutation() -> bool:
    rng = random.Random(1)
    probes = 0
    while probes < 1000:
        grid = _random_grid(rng)
        layout = QubitLayout.for_variables(grid.size, aux_vars(grid))
        poly = total_connectivity_energy(grid) + path_energy(grid)
        lam = Fraction(rng.randint(1, 300), rng.randint(1, 7))
        h = lower(poly, layout, lam, drop_constant=False)
        table = h.eigenvalue_table()
        n = layout.num_qubits
        for _ in range(100):
            b = rng.randrange(1 << n)
            a = {v: -1 if (b >> (n - 1 - i)) & 1 else 1 for i, v in enumerate(layout.variables)}
            exact = float(lam * poly.evaluate(a))
            if abs(table[b] - exact) > COMMUTE_TOL * max(1.0, abs(exact)):
                return False
            probes += 1
    return True


def _filter_rules() -> bool:
    rng = np.random.default_rng(2)
    for _ in range(500):
        p = rng.dirichlet(np.full(int(rng.integers(2, 65)), rng.uniform(0.1, 2)))
        if not np.array_equal(apply_filter(p, 0.0), p):
            return False
        theta = rng.uniform(0, p.max() * 1.2)
        if not (p > theta).any():
            try:
                apply_filter(p, theta)
                return False
            except AllFiltered:
                continue
        if set(np.flatnonzero(apply_filter(p, theta))) != set(np.flatnonzero(p > theta)):
            return False
    return True


def _merge_dominance() -> bool:
    rng = np.random.default_rng(3)
    for _ in range(1000):
        n = int(rng.integers(2, 65))
        p1, p2 = rng.dirichlet(np.ones(n)), rng.dirichlet(np.ones(n))
        i = int(rng.integers(n))
        p1[i] = p1.max() + rng.uniform(1e-6, 0.5)
        p2[i] = p2.max() + rng.uniform(1e-6, 0.5)
        out = normalize(merge(p1 / p1.sum(), p2 / p2.sum()))
        if np.argmax(out) != i or np.sum(out == out[i]) != 1:
            return False
    return True


def _gradient_check() -> bool:
    rng = np.random.default_rng(4)
    grids = [paper_grid(), uniform_grid(2, 2, 3, 2), uniform_grid(3, 2, 3, 4, c3_5=2)]
    hams = []
    for grid in grids:
        problem = compile_problem(grid, 1, 1)
        hams += [problem.h_connectivity, problem.h_path]
    for i in range(50):
        h = hams[i % len(hams)]
        p = int(rng.integers(1, 4))
        g, b = rng.uniform(0, 2 * np.pi, p), rng.uniform(0, 2 * np.pi, p)
        _, dg, db = value_and_gradient([h] * p, h, g, b)
        _, fg, fb = value_and_gradient([h] * p, h, g, b, "finite_difference", fd_step=1e-5)
        if max(np.max(np.abs(dg - fg)), np.max(np.abs(db - fb))) >= GRADIENT_TOL:
            return False
    return True


def _sampling() -> bool:
    res = sample(initial_state(6), SHOTS, seed=5)
    p = 1 / 64
    sigma = np.sqrt(p * (1 - p) / SHOTS)
    return bool(np.all(np.abs(res.probabilities - p) <= SIGMAS * sigma))


def _local_nonnegative() -> bool:
    shapes = [(r, c) for r in range(2, 7) for c in range(2, 7) if r * c <= 12]
    for rows, cols in shapes:
        starts = [r * cols + 1 for r in range(rows)]
        targets = [r * cols + cols for r in range(rows)]
        for s, t in itertools.product(starts, targets):
            for _, e in local_energies(uniform_grid(rows, cols, s, t)):
                vals, _ = e.spin_table(e.variables)
                if (vals < 0).any():
                    return False
    return True


SUITES = {
    "unitarity": _unitarity,
    "lowering commutation x1000": _commutation,
    "filter identity+support": _filter_rules,
    "merge dominance x1000": _merge_dominance,
    "gradient vs FD x50": _gradient_check,
    "sampling 6 sigma": _sampling,
    "local energies >= 0": _local_nonnegative,
}


def criterion_6() -> bool:
    t0 = time.perf_counter()
    failed = [name for name, check in SUITES.items() if not check()]
    elapsed = time.perf_counter() - t0
    ok = not failed and elapsed < BUDGET[6]
    detail = f"{len(SUITES) - len(failed)}/{len(SUITES)} property suites pass"
    if failed:
        detail += f" (failed: {', '.join(failed)})"
    record(6, ok, f"{detail}; {elapsed:.1f}s < {BUDGET[6]}s")
    return ok


def criterion_7() -> bool:
    with tempfile.TemporaryDirectory() as tmp:
        spec = ExperimentSpec(grid="paper", thetas=(0.0, THETA), ps=(1,), shots=(5000,), rounds=1,
                              out=os.path.join(tmp, "sweep"), restarts=2, max_iters=30)
        out = run_sweep(spec)
        rows = len(read_summary(out / "summary.csv"))
        hists = len(list((out / "histograms").iterdir()))
    ok = rows == 2 and hists == 2
    record(7, ok, "absolute Figure 6/7 heights and the 1.46e10-measurement campaign are not reproduced (by design); "
                  f"substituted by criteria 3-5 and the sweep harness (smoke sweep: {rows} rows, {hists} histograms)")
    return ok


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 8)])
def test_acceptance(criterion):
    assert criterion(), RESULTS.get(CRITERIA.index(criterion) + 1)


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    sys.exit(0 if all(results) else 1)
