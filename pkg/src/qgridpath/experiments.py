"""Seeded experiment sweeps over (theta, p, shots) cells.

Every (cell, round) run is persisted as its own JSON file as soon as it
finishes, so an interrupted sweep resumes where it stopped.  The summary CSV
and the per-cell histograms are always rebuilt from those files in canonical
order, which makes them byte-identical for the same spec and base seed.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Union

import numpy as np

from .errors import QGPError, TooLarge
from .grid import GridMap, grid_from_dict, load_grid, paper_grid
from .hamiltonian import ket
from .optimizer import OptimizerConfig
from .oracle import OracleResult, optimal_path
from .pipeline import SolveReport, solve_parallel, solve_serial

DEFAULT_THETAS = (0.0, 0.01, 0.05, 0.1, 0.2, 0.3)
DEFAULT_ROUNDS = 20

PRESETS = {
    "theta-sweep": {"mode": "parallel", "thetas": list(DEFAULT_THETAS), "ps": [10], "shots": [200_000], "rounds": 10},
    "p-sweep": {
        "mode": "parallel",
        "thetas": [0.0, 0.05],
        "ps": [1, 4, 7, 10],
        "shots": [5_000, 10_000, 50_000, 100_000, 200_000],
        "rounds": DEFAULT_ROUNDS,
    },
    "serial": {"mode": "serial", "thetas": [0.05], "ps": [1, 4, 7, 10], "shots": [200_000], "rounds": 10},
}

CSV_COLUMNS = [
    "cell",
    "theta",
    "p",
    "shots",
    "round",
    "seed",
    "status",
    "argmax_ket",
    "target_ket",
    "target_probability",
    "target_rank",
    "oracle_match",
]


@dataclass(frozen=True)
class ExperimentSpec:
    grid: Union[str, dict] = "paper"
    mode: str = "parallel"
    thetas: tuple[float, ...] = DEFAULT_THETAS
    ps: tuple[int, ...] = (10,)
    shots: tuple[Optional[int], ...] = (200_000,)
    rounds: int = DEFAULT_ROUNDS
    base_seed: int = 0
    out: str = "sweep_out"
    restarts: int = 20
    max_iters: int = 500
    serial_objective: str = "blockwise"

    def __post_init__(self):
        for name in ("thetas", "ps", "shots"):
            value = tuple(getattr(self, name))
            if not value:
                raise ValueError(f"{name} must be a nonempty list")
            object.__setattr__(self, name, value)
        if self.rounds < 1:
            raise ValueError("rounds must be at least 1")
        if self.mode not in ("parallel", "serial"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if any(not 0.0 <= t <= 1.0 for t in self.thetas):
            raise ValueError("every theta must lie in [0, 1]")
        if any(p < 1 for p in self.ps):
            raise ValueError("every p must be at least 1")
        if any(s is not None and s < 1 for s in self.shots):
            raise ValueError("shots must be positive (or null for exact probabilities)")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentSpec":
        known = {f for f in cls.__dataclass_fields__}
        extra = set(data) - known
        if extra:
            raise ValueError(f"unknown spec keys: {sorted(extra)}")
        return cls(**data)

    def cells(self) -> list[tuple[float, int, Optional[int]]]:
        return list(itertools.product(self.thetas, self.ps, self.shots))

    def optimizer(self) -> OptimizerConfig:
        return OptimizerConfig(restarts=self.restarts, max_iters=self.max_iters)

    def to_dict(self) -> dict:
        out = asdict(self)
        for name in ("thetas", "ps", "shots"):
            out[name] = list(out[name])
        return out


def load_spec(path: Union[str, Path]) -> ExperimentSpec:
    return ExperimentSpec.from_dict(json.loads(Path(path).read_text()))


def resolve_grid(source: Union[str, dict, GridMap]) -> GridMap:
    """A grid from a file path, an inline dict, or the name ``paper``."""
    if isinstance(source, GridMap):
        return source
    if isinstance(source, dict):
        return grid_from_dict(source)
    if source == "paper":
        return paper_grid()
    return load_grid(source)


def run_seed(base_seed: int, cell: int, round_: int) -> int:
    """Independent 64-bit seed for one (cell, round) run."""
    return int(np.random.SeedSequence([base_seed, cell, round_]).generate_state(1, np.uint64)[0])


def oracle_block(report: SolveReport, oracle: Optional[OracleResult]) -> Optional[dict]:
    """What the oracle says about a report: optimal kets, cost and whether the argmax matches."""
    if oracle is None:
        return None
    optimal = [ket(i, oracle.grid.size) for i in oracle.ties]
    cost = oracle.optimal_cost
    return {
        "optimal_ket": oracle.optimal_ket,
        "optimal_kets": optimal,
        "optimal_cost": int(cost) if cost.denominator == 1 else float(cost),
        "match": report.argmax_ket in optimal,
    }


@dataclass
class _Job:
    grid: GridMap
    mode: str
    theta: float
    p: int
    shots: Optional[int]
    seed: int
    optimizer: OptimizerConfig
    serial_objective: str
    oracle: Optional[OracleResult] = field(default=None)


def _run(job: _Job) -> dict:
    try:
        if job.mode == "parallel":
            report = solve_parallel(job.grid, job.p, job.theta, job.shots, job.seed, job.optimizer)
        else:
            report = solve_serial(
                job.grid, job.p, job.theta, job.shots, job.seed, job.optimizer, objective=job.serial_objective
            )
    except QGPError as exc:
        return {"status": type(exc).__name__, "error": str(exc), "seeds": {"base": job.seed}}
    report.oracle = oracle_block(report, job.oracle)
    out = report.to_dict()
    out["status"] = "ok"
    return out


def _run_file(out: Path, cell: int, round_: int) -> Path:
    return out / "runs" / f"cell{cell:03d}_round{round_:04d}.json"


def _write_atomic(path: Path, text: str) -> None:
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def run_sweep(spec: ExperimentSpec, workers: int = 1, progress=None) -> Path:
    """Run (or resume) every cell and round, then write ``summary.csv`` and histograms."""
    grid = resolve_grid(spec.grid)
    out = Path(spec.out)
    (out / "runs").mkdir(parents=True, exist_ok=True)
    (out / "histograms").mkdir(exist_ok=True)
    spec_text = json.dumps(spec.to_dict(), indent=2, sort_keys=True) + "\n"
    spec_path = out / "spec.json"
    if spec_path.exists() and spec_path.read_text() != spec_text:
        raise ValueError(f"{out} holds results of a different sweep; choose another output directory")
    _write_atomic(spec_path, spec_text)
    try:
        oracle = optimal_path(grid)
    except TooLarge:
        oracle = None

    pending = []
    for c, (theta, p, shots) in enumerate(spec.cells()):
        for r in range(spec.rounds):
            if _run_file(out, c, r).exists():
                continue
            job = _Job(grid, spec.mode, theta, p, shots, run_seed(spec.base_seed, c, r), spec.optimizer(),
                       spec.serial_objective, oracle)
            pending.append(((c, r), job))

    def finish(key, record):
        c, r = key
        record["cell"], record["round"] = c, r
        _write_atomic(_run_file(out, c, r), json.dumps(record, sort_keys=True) + "\n")
        if progress:
            progress(c, r, record)

    if workers <= 1:
        for key, job in pending:
            finish(key, _run(job))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for (key, _), record in zip(pending, pool.map(_run, [j for _, j in pending])):
                finish(key, record)

    write_outputs(spec, grid, oracle)
    return out


def _load_runs(spec: ExperimentSpec) -> dict[tuple[int, int], dict]:
    out = Path(spec.out)
    runs = {}
    for c in range(len(spec.cells())):
        for r in range(spec.rounds):
            path = _run_file(out, c, r)
            if path.exists():
                runs[c, r] = json.loads(path.read_text())
    return runs


def csv_row(cell: int, params: tuple, round_: int, seed: int, record: dict, target: Optional[str]) -> list:
    theta, p, shots = params
    row = [cell, repr(float(theta)), p, "exact" if shots is None else shots, round_, seed, record["status"]]
    if record["status"] != "ok":
        return row + ["", target or "", "", "", "false"]
    probs = np.asarray(record["distribution"])
    if target is None:
        return row + [record["argmax_ket"], "", "", "", ""]
    index = int(target, 2)
    rank = 1 + int(np.sum(probs > probs[index]))
    match = "true" if (record.get("oracle") or {}).get("match") else "false"
    return row + [record["argmax_ket"], target, repr(float(probs[index])), rank, match]


def write_outputs(spec: ExperimentSpec, grid: GridMap, oracle: Optional[OracleResult]) -> None:
    out = Path(spec.out)
    runs = _load_runs(spec)
    target = oracle.optimal_ket if oracle is not None else None
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    n = grid.size
    for c, params in enumerate(spec.cells()):
        dists = []
        for r in range(spec.rounds):
            record = runs.get((c, r))
            if record is None:
                continue
            writer.writerow(csv_row(c, params, r, run_seed(spec.base_seed, c, r), record, target))
            if record["status"] == "ok":
                dists.append(record["distribution"])
        _write_histogram(out / "histograms" / f"cell{c:03d}.csv", params, dists, n)
    _write_atomic(out / "summary.csv", buf.getvalue())


def _write_histogram(path: Path, params: tuple, dists: list, width: int) -> None:
    theta, p, shots = params
    mean = np.mean(dists, axis=0) if dists else np.zeros(1 << width)
    label = f"{float(theta)!r},{p},{'exact' if shots is None else shots},{len(dists)}"
    lines = ["theta,p,shots,rounds_ok,index,ket,mean_probability"]
    lines += [f"{label},{i},{ket(i, width)},{float(v)!r}" for i, v in enumerate(mean)]
    _write_atomic(path, "\n".join(lines) + "\n")


def sweep_summary(rows: Iterable[list]) -> dict:
    """Per-cell count of rounds whose argmax matched the oracle."""
    counts: dict[int, list[int]] = {}
    for row in rows:
        cell, match = int(row[0]), row[-1] == "true"
        hit, total = counts.get(cell, [0, 0])
        counts[cell] = [hit + match, total + 1]
    return {c: tuple(v) for c, v in counts.items()}


def read_summary(path: Union[str, Path]) -> list[list[str]]:
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    return rows[1:]


def with_overrides(spec: ExperimentSpec, **changes) -> ExperimentSpec:
    return replace(spec, **{k: v for k, v in changes.items() if v is not None})
