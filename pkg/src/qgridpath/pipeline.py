"""Parallel and serial QAOA path planning, from grid to decoded path.

Parallel mode runs one circuit on the connectivity Hamiltonian and one on the
path-cost Hamiltonian, filters the first distribution, multiplies the two
elementwise and renormalizes.  Serial mode stacks both sets of layers on one
register and filters the single resulting distribution.
"""

from __future__ import annotations

import dataclasses
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal, Optional, Union

import numpy as np

from .energy import aux_vars, min_over_aux, assignment_from_bits, path_energy, total_connectivity_energy
from .errors import AllFiltered, AllZero, LayoutMismatch, LengthMismatch, MalformedKet
from .grid import GridMap, neighbors
from .hamiltonian import DEFAULT_SCALE, DiagonalHamiltonian, QubitLayout, ket, lower
from .optimizer import OptimizationTrace, OptimizerConfig, optimize, optimize_layers
from .polynomial import SpinPolynomial
from .qaoa import QaoaParams, evolve, exact_probabilities, sample

PATH = "path"
NON_SIMPLE = "non_simple_feasible_set"
INFEASIBLE = "infeasible"


# ---------------------------------------------------------------------------
# distribution operations


def apply_filter(probs: np.ndarray, theta: float) -> np.ndarray:
    """Zero every entry at or below ``theta``, shift the rest down by ``theta``, renormalize."""
    if not 0.0 <= theta <= 1.0:
        raise ValueError(f"theta must lie in [0, 1], got {theta}")
    probs = np.asarray(probs, dtype=np.float64)
    if theta == 0.0:
        return probs.copy()
    kept = np.maximum(probs - theta, 0.0)
    total = kept.sum()
    if total <= 0.0:
        raise AllFiltered(f"no probability exceeds theta={theta} (max {probs.max():.4g}); lower the threshold")
    return kept / total


def merge(p1: np.ndarray, p2: np.ndarray) -> np.ndarray:
    """Elementwise product of two distributions (not renormalized)."""
    p1 = np.asarray(p1, dtype=np.float64)
    p2 = np.asarray(p2, dtype=np.float64)
    if p1.shape != p2.shape:
        raise LengthMismatch(f"cannot merge distributions of shapes {p1.shape} and {p2.shape}")
    out = p1 * p2
    if not out.any():
        raise AllZero("the two distributions have disjoint supports")
    return out


def normalize(probs: np.ndarray) -> np.ndarray:
    probs = np.asarray(probs, dtype=np.float64)
    total = probs.sum()
    if total <= 0.0:
        raise AllZero("cannot normalize a vector that sums to zero")
    return probs / total


def marginalize_aux(probs: np.ndarray, node_qubits: int) -> np.ndarray:
    """Sum out trailing auxiliary qubits, leaving a distribution over node bits."""
    probs = np.asarray(probs, dtype=np.float64)
    total_qubits = probs.shape[-1].bit_length() - 1
    if 1 << total_qubits != probs.shape[-1] or total_qubits < node_qubits:
        raise LayoutMismatch(f"{probs.shape[-1]} entries cannot hold {node_qubits} node qubits")
    return probs.reshape(probs.shape[:-1] + (1 << node_qubits, -1)).sum(axis=-1)


def rank_of(probs: np.ndarray, index: int) -> int:
    """1 + number of entries strictly more probable than ``index``."""
    return 1 + int(np.sum(probs > probs[index]))


# ---------------------------------------------------------------------------
# compilation


@dataclass(frozen=True)
class CompiledProblem:
    grid: GridMap
    connectivity: SpinPolynomial
    path: SpinPolynomial
    layout: QubitLayout
    h_connectivity: DiagonalHamiltonian
    h_path: DiagonalHamiltonian

    @property
    def node_qubits(self) -> int:
        return self.grid.size


def compile_problem(
    grid: GridMap,
    connectivity_scale: Union[int, Fraction] = DEFAULT_SCALE,
    path_scale: Union[int, Fraction] = DEFAULT_SCALE,
) -> CompiledProblem:
    """Both Hamiltonians for ``grid`` with constants dropped.

    The connectivity circuit carries the auxiliary qubits; the path circuit
    acts on node qubits only.
    """
    conn = total_connectivity_energy(grid)
    cost = path_energy(grid)
    layout = QubitLayout.for_variables(grid.size, aux_vars(grid))
    h11 = lower(conn, layout, connectivity_scale)
    h12 = lower(cost, QubitLayout.for_variables(grid.size), path_scale)
    return CompiledProblem(grid, conn, cost, layout, h11, h12)


# ---------------------------------------------------------------------------
# decoding


@dataclass(frozen=True)
class DecodedPath:
    status: str
    nodes: tuple[int, ...] = ()
    cost: Optional[Fraction] = None

    @property
    def is_path(self) -> bool:
        return self.status == PATH

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "nodes": list(self.nodes),
            "cost": None if self.cost is None else _num(self.cost),
        }


def _num(value: Fraction):
    return int(value) if value.denominator == 1 else float(value)


def _ket_of(value: Union[int, str], width: int) -> str:
    if isinstance(value, str):
        if len(value) != width or set(value) - {"0", "1"}:
            raise MalformedKet(f"expected {width} binary digits, got {value!r}")
        return value
    if not 0 <= int(value) < (1 << width):
        raise MalformedKet(f"basis index {value} outside [0, {1 << width})")
    return ket(int(value), width)


def decode(value: Union[int, str], grid: GridMap, connectivity: Optional[SpinPolynomial] = None) -> DecodedPath:
    """Read a node-bit pattern back as a route from start to target.

    A pattern decodes to a path only when the walk from the start never has
    a choice, ends at the target, visits every active node and the active
    nodes induce no extra edges.
    """
    bits = _ket_of(value, grid.size)
    poly = connectivity if connectivity is not None else total_connectivity_energy(grid)
    if min_over_aux(poly, assignment_from_bits(grid, bits)) != 0:
        return DecodedPath(INFEASIBLE)
    active = {k for k, ch in zip(grid.nodes, bits) if ch == "1"}
    walk = [grid.start]
    seen = {grid.start}
    while walk[-1] != grid.target:
        nxt = [k for k in neighbors(grid, walk[-1]) if k in active and k not in seen]
        if len(nxt) != 1:
            return DecodedPath(NON_SIMPLE)
        walk.append(nxt[0])
        seen.add(nxt[0])
    induced = sum(1 for a, b in grid.edges() if a in active and b in active)
    if seen != active or induced != len(walk) - 1:
        return DecodedPath(NON_SIMPLE)
    cost = sum((grid.cost(a, b) for a, b in zip(walk, walk[1:])), Fraction(0))
    return DecodedPath(PATH, tuple(walk), cost)


# ---------------------------------------------------------------------------
# solving


@dataclass
class SolveReport:
    grid: GridMap
    mode: str
    theta: float
    p: int
    shots: Optional[int]
    seeds: dict
    params: dict
    expectations: dict
    distribution: np.ndarray
    argmax_index: int
    ties: list[str]
    decoded: DecodedPath
    oracle: Optional[dict] = None
    extras: dict = field(default_factory=dict)

    @property
    def argmax_ket(self) -> str:
        return ket(self.argmax_index, self.grid.size)

    def rank(self, value: Union[int, str]) -> int:
        index = int(_ket_of(value, self.grid.size), 2)
        return rank_of(self.distribution, index)

    def to_dict(self, include_distribution: bool = True) -> dict:
        out = {
            "grid": self.grid.to_dict(),
            "mode": self.mode,
            "theta": self.theta,
            "p": self.p,
            "shots": self.shots,
            "exact": self.shots is None,
            "seeds": self.seeds,
            "params": self.params,
            "expectations": self.expectations,
            "argmax_index": self.argmax_index,
            "argmax_ket": self.argmax_ket,
            "argmax_probability": float(self.distribution[self.argmax_index]),
            "ties": self.ties,
            "decoded": self.decoded.to_dict(),
            "oracle": self.oracle,
        }
        if include_distribution:
            out["distribution"] = [float(v) for v in self.distribution]
        return out

    def distribution_csv(self) -> str:
        lines = ["index,ket,probability"]
        n = self.grid.size
        for i, v in enumerate(self.distribution):
            lines.append(f"{i},{ket(i, n)},{float(v)!r}")
        return "\n".join(lines) + "\n"


def derive_seeds(seed: Optional[int]) -> dict:
    """Independent 64-bit seeds for both optimizers and both samplers."""
    if seed is None:
        ss = np.random.SeedSequence()
        base = None
    else:
        ss = np.random.SeedSequence(int(seed))
        base = int(seed)
    words = ss.generate_state(4, np.uint64)
    return {
        "base": base,
        "optimizer_1": int(words[0]),
        "optimizer_2": int(words[1]),
        "sampler_1": int(words[2]),
        "sampler_2": int(words[3]),
    }


def _measure(state: np.ndarray, shots: Optional[int], seed: int) -> np.ndarray:
    if shots is None:
        return exact_probabilities(state)
    return sample(state, shots, seed).probabilities


def _argmax(probs: np.ndarray, width: int) -> tuple[int, list[str]]:
    best = int(np.argmax(probs))
    ties = np.flatnonzero(probs == probs[best])
    return best, [ket(int(i), width) for i in ties]


def _run_block(h: DiagonalHamiltonian, p: int, config: OptimizerConfig, seed: int) -> tuple[OptimizationTrace, np.ndarray]:
    trace = optimize(h, p, dataclasses.replace(config, seed=seed))
    params = trace.best_params
    state = evolve([h.eigenvalue_table()] * p, params.gammas, params.betas)
    return trace, state


def solve_parallel(
    grid: GridMap,
    p: int = 1,
    theta: float = 0.05,
    shots: Optional[int] = 200_000,
    seed: Optional[int] = None,
    optimizer: OptimizerConfig = OptimizerConfig(),
    problem: Optional[CompiledProblem] = None,
) -> SolveReport:
    """Two independent circuits, filter on the connectivity side, Hadamard merge.

    ``shots=None`` uses exact probabilities instead of sampling.
    """
    problem = problem or compile_problem(grid)
    seeds = derive_seeds(seed)
    with ThreadPoolExecutor(max_workers=2) as pool:
        f1 = pool.submit(_run_block, problem.h_connectivity, p, optimizer, seeds["optimizer_1"])
        f2 = pool.submit(_run_block, problem.h_path, p, optimizer, seeds["optimizer_2"])
        (trace1, state1), (trace2, state2) = f1.result(), f2.result()

    raw1 = marginalize_aux(_measure(state1, shots, seeds["sampler_1"]), grid.size)
    p2 = marginalize_aux(_measure(state2, shots, seeds["sampler_2"]), grid.size)
    try:
        p1 = apply_filter(raw1, theta)
    except AllFiltered as exc:
        raise AllFiltered(f"connectivity circuit: {exc}") from None
    try:
        final = normalize(merge(p1, p2))
    except AllZero as exc:
        raise AllZero(f"merge of filtered connectivity and path distributions: {exc}") from None
    best, ties = _argmax(final, grid.size)
    report = SolveReport(
        grid=grid,
        mode="parallel",
        theta=theta,
        p=p,
        shots=shots,
        seeds=seeds,
        params={"connectivity": trace1.best_params.to_dict(), "path": trace2.best_params.to_dict()},
        expectations={"connectivity": trace1.best_expectation, "path": trace2.best_expectation},
        distribution=final,
        argmax_index=best,
        ties=ties,
        decoded=decode(best, grid, problem.connectivity),
    )
    report.extras.update(connectivity_raw=raw1, connectivity_filtered=p1, path_raw=p2, traces=(trace1, trace2))
    return report


def serial_hamiltonians(problem: CompiledProblem) -> tuple[DiagonalHamiltonian, DiagonalHamiltonian]:
    """Both Hamiltonians on the connectivity layout (node qubits plus auxiliaries)."""
    h11 = problem.h_connectivity
    h12 = lower(problem.path, problem.layout, problem.h_path.scale)
    return h11, h12


def serial_layers(h11: DiagonalHamiltonian, h12: DiagonalHamiltonian, p: int) -> list[DiagonalHamiltonian]:
    return [h11] * p + [h12] * p


SerialObjective = Literal["blockwise", "joint"]


def solve_serial(
    grid: GridMap,
    p: int = 1,
    theta: float = 0.05,
    shots: Optional[int] = 200_000,
    seed: Optional[int] = None,
    optimizer: OptimizerConfig = OptimizerConfig(),
    problem: Optional[CompiledProblem] = None,
    objective: SerialObjective = "blockwise",
) -> SolveReport:
    """One register: p connectivity layers followed by p path layers.

    ``objective="blockwise"`` trains each block on its own Hamiltonian exactly
    as the parallel circuits would be trained, then chains the two blocks.
    ``objective="joint"`` trains all 2p layers together on ``H11 + H12``.
    """
    if objective not in ("blockwise", "joint"):
        raise ValueError(f"unknown serial objective {objective!r}")
    problem = problem or compile_problem(grid)
    seeds = derive_seeds(seed)
    h11, h12 = serial_hamiltonians(problem)
    layers = serial_layers(h11, h12, p)
    if objective == "joint":
        trace = optimize_layers(layers, h11 + h12, dataclasses.replace(optimizer, seed=seeds["optimizer_1"]))
        traces = (trace,)
        params = trace.best_params
        expectations = {"joint": trace.best_expectation}
    else:
        # the path block ignores the auxiliaries, so it is trained on node qubits alone
        trace1 = optimize(h11, p, dataclasses.replace(optimizer, seed=seeds["optimizer_1"]))
        trace2 = optimize(problem.h_path, p, dataclasses.replace(optimizer, seed=seeds["optimizer_2"]))
        traces = (trace1, trace2)
        second = trace2.best_params
        if not problem.h_path.terms:
            # a constant path Hamiltonian contributes no circuit: run its block as identities
            second = QaoaParams([0.0] * p, [0.0] * p)
        params = QaoaParams(
            trace1.best_params.betas + second.betas,
            trace1.best_params.gammas + second.gammas,
        )
        expectations = {"connectivity": trace1.best_expectation, "path": trace2.best_expectation}
    state = evolve([h.eigenvalue_table() for h in layers], params.gammas, params.betas)
    raw = marginalize_aux(_measure(state, shots, seeds["sampler_1"]), grid.size)
    try:
        final = apply_filter(raw, theta)
    except AllFiltered as exc:
        raise AllFiltered(f"serial circuit: {exc}") from None
    best, ties = _argmax(final, grid.size)
    block = {
        "connectivity": QaoaParams(params.betas[:p], params.gammas[:p]).to_dict(),
        "path": QaoaParams(params.betas[p:], params.gammas[p:]).to_dict(),
        "objective": objective,
    }
    report = SolveReport(
        grid=grid,
        mode="serial",
        theta=theta,
        p=p,
        shots=shots,
        seeds=seeds,
        params=block,
        expectations=expectations,
        distribution=final,
        argmax_index=best,
        ties=ties,
        decoded=decode(best, grid, problem.connectivity),
    )
    report.extras.update(raw=raw, traces=traces)
    return report
