"""Multi-restart gradient descent over QAOA angles.

The descent runs on a rescaled problem: each gamma is measured in units of
the spectral standard deviation of its cost table, and the objective is
divided by its own standard deviation.  This keeps a fixed learning rate
meaningful for
Hamiltonians multiplied by large factors such as 100; reported angles and
expectations are always in the original units.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from typing import Literal, Optional, Sequence

import numpy as np

from .hamiltonian import DiagonalHamiltonian
from .qaoa import QaoaParams, _rotate, adjoint_gradient, evolve, exact_probabilities, initial_state, make_rng

GradientMethod = Literal["adjoint", "finite_difference", "parameter_shift"]


@dataclass(frozen=True)
class OptimizerConfig:
    learning_rate: float = 0.05
    max_iters: int = 500
    gradient_method: GradientMethod = "adjoint"
    fd_step: float = 1e-3
    restarts: int = 20
    convergence_tol: float = 1e-6
    seed: Optional[int] = None

    def __post_init__(self):
        if self.learning_rate <= 0 or self.fd_step <= 0 or self.convergence_tol <= 0:
            raise ValueError("learning_rate, fd_step and convergence_tol must be positive")
        if self.max_iters < 1 or self.restarts < 1:
            raise ValueError("max_iters and restarts must be positive")
        if self.gradient_method not in ("adjoint", "finite_difference", "parameter_shift"):
            raise ValueError(f"unknown gradient method {self.gradient_method!r}")


@dataclass
class OptimizationTrace:
    histories: list[list[float]]
    best_params: QaoaParams
    best_expectation: float
    best_restart: int
    seed: int
    layer_count: int = field(default=0)

    @property
    def history(self) -> list[float]:
        """Expectation per iteration of the winning restart."""
        return self.histories[self.best_restart]

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["restart", "iteration", "expectation"])
        for r, hist in enumerate(self.histories):
            for i, value in enumerate(hist):
                writer.writerow([r, i, repr(float(value))])
        return buf.getvalue()


def _tables(layers: Sequence[DiagonalHamiltonian]) -> list[np.ndarray]:
    return [h.eigenvalue_table() for h in layers]


def _scale(table: np.ndarray) -> float:
    s = float(np.std(table)) if table.size else 0.0
    return s if s > 0 else 1.0


def circuit_value(layers: Sequence[DiagonalHamiltonian], objective: DiagonalHamiltonian, gammas, betas) -> np.ndarray:
    state = evolve(_tables(layers), gammas, betas)
    return exact_probabilities(state) @ objective.eigenvalue_table()


def _finite_difference(tables, objective, gammas, betas, step):
    L = gammas.shape[-1]
    eye = np.eye(L) * step
    g = gammas[..., None, :]
    b = betas[..., None, :]
    zero = np.zeros_like(eye)
    # batch + (4L, L): +gamma, -gamma, +beta, -beta
    gs = np.concatenate(np.broadcast_arrays(g + eye, g - eye, g + zero, g + zero), axis=-2)
    bs = np.concatenate(np.broadcast_arrays(b + zero, b + zero, b + eye, b - eye), axis=-2)
    vals = exact_probabilities(evolve(tables, gs, bs)) @ objective
    vals = vals.reshape(vals.shape[:-1] + (4, L))
    d_gamma = (vals[..., 0, :] - vals[..., 1, :]) / (2 * step)
    d_beta = (vals[..., 2, :] - vals[..., 3, :]) / (2 * step)
    value = exact_probabilities(evolve(tables, gammas, betas)) @ objective
    return value, d_gamma, d_beta


def _evolve_shifted(tables, gammas, betas, layer, phase=None, qubit_shift=None):
    """Single-circuit evolution with one extra phase or one per-qubit mixer shift."""
    l = len(tables[0]).bit_length() - 1
    state = initial_state(l)
    for k, table in enumerate(tables):
        angle = gammas[k] * table
        if k == layer and phase is not None:
            angle = angle + phase
        state = state * np.exp(-1j * angle)
        mix = np.full(l, betas[k])
        if k == layer and qubit_shift is not None:
            q, delta = qubit_shift
            mix[q] += delta
        state = _rotate(state, mix)
    return state


def _parameter_shift(layers, objective, gammas, betas):
    """Exact gradient from +/- pi/4 shifts of every Z-product term and every X_k."""
    tables = _tables(layers)
    l = layers[0].num_qubits
    basis = np.arange(1 << l)
    flat_g = gammas.reshape(-1, gammas.shape[-1])
    flat_b = betas.reshape(-1, betas.shape[-1])
    d_gamma = np.zeros_like(flat_g)
    d_beta = np.zeros_like(flat_b)
    value = np.empty(flat_g.shape[0])

    def f(state):
        return float(exact_probabilities(state) @ objective)

    for r in range(flat_g.shape[0]):
        g, b = flat_g[r], flat_b[r]
        value[r] = f(evolve(tables, g, b))
        for k, h in enumerate(layers):
            for qubits, c in h.scaled_terms():
                z = np.ones(1 << l)
                for q in qubits:
                    z *= 1 - 2 * ((basis >> (l - q)) & 1)
                plus = f(_evolve_shifted(tables, g, b, k, phase=np.pi / 4 * z))
                minus = f(_evolve_shifted(tables, g, b, k, phase=-np.pi / 4 * z))
                d_gamma[r, k] += float(c) * (plus - minus)
            for q in range(l):
                plus = f(_evolve_shifted(tables, g, b, k, qubit_shift=(q, np.pi / 4)))
                minus = f(_evolve_shifted(tables, g, b, k, qubit_shift=(q, -np.pi / 4)))
                d_beta[r, k] += plus - minus
    shape = gammas.shape
    return value.reshape(shape[:-1]), d_gamma.reshape(shape), d_beta.reshape(shape)


def value_and_gradient(
    layers: Sequence[DiagonalHamiltonian],
    objective: DiagonalHamiltonian,
    gammas,
    betas,
    method: GradientMethod = "adjoint",
    fd_step: float = 1e-3,
):
    """``(<objective>, d/dgammas, d/dbetas)`` for one or a batch of angle sets."""
    gammas = np.asarray(gammas, dtype=np.float64)
    betas = np.asarray(betas, dtype=np.float64)
    obj = objective.eigenvalue_table()
    if method == "adjoint":
        return adjoint_gradient(_tables(layers), obj, gammas, betas)
    if method == "finite_difference":
        return _finite_difference(_tables(layers), obj, gammas, betas, fd_step)
    if method == "parameter_shift":
        return _parameter_shift(list(layers), obj, gammas, betas)
    raise ValueError(f"unknown gradient method {method!r}")


def gradient(h: DiagonalHamiltonian, params: QaoaParams, method: GradientMethod = "adjoint", fd_step: float = 1e-3) -> np.ndarray:
    """d<H>/d(angles) for a standard p-layer circuit, ordered betas then gammas."""
    _, dg, db = value_and_gradient([h] * params.p, h, params.gammas, params.betas, method, fd_step)
    return np.concatenate([db, dg])


def optimize_layers(
    layers: Sequence[DiagonalHamiltonian],
    objective: DiagonalHamiltonian,
    config: OptimizerConfig = OptimizerConfig(),
) -> OptimizationTrace:
    """Minimise <objective> over the angles of a circuit with the given cost layers.

    All restarts advance in lockstep as one batch; a restart stops moving
    once its (rescaled) objective changes by less than ``convergence_tol``.
    """
    rng, seed = make_rng(config.seed)
    L = len(layers)
    R = config.restarts
    layer_scale = np.array([_scale(h.eigenvalue_table()) for h in layers])
    obj_scale = _scale(objective.eigenvalue_table())
    # descent variable u = gamma * layer_scale; initial u and beta uniform on [0, 2pi)
    u = rng.uniform(0.0, 2 * np.pi, size=(R, L))
    betas = rng.uniform(0.0, 2 * np.pi, size=(R, L))

    histories: list[list[float]] = [[] for _ in range(R)]
    best_val = np.full(R, np.inf)
    best_u = u.copy()
    best_b = betas.copy()
    active = np.ones(R, dtype=bool)
    previous = np.full(R, np.inf)

    for _ in range(config.max_iters + 1):
        value, dg, db = value_and_gradient(
            layers, objective, u / layer_scale, betas, config.gradient_method, config.fd_step
        )
        for r in np.flatnonzero(active):
            histories[r].append(float(value[r]))
        improved = active & (value < best_val)
        best_val[improved] = value[improved]
        best_u[improved] = u[improved]
        best_b[improved] = betas[improved]

        scaled = value / obj_scale
        active &= ~(np.abs(scaled - previous) < config.convergence_tol)
        previous = scaled
        if not active.any():
            break
        step_u = dg / layer_scale / obj_scale
        step_b = db / obj_scale
        u = np.where(active[:, None], u - config.learning_rate * step_u, u)
        betas = np.where(active[:, None], betas - config.learning_rate * step_b, betas)

    winner = int(np.argmin(best_val))
    params = QaoaParams(betas=best_b[winner], gammas=best_u[winner] / layer_scale)
    return OptimizationTrace(histories, params, float(best_val[winner]), winner, seed, L)


def optimize(h: DiagonalHamiltonian, p: int, config: OptimizerConfig = OptimizerConfig()) -> OptimizationTrace:
    """Best-of-restarts angles for the standard p-layer circuit on ``h``."""
    if p < 1:
        raise ValueError("p must be at least 1")
    return optimize_layers([h] * p, h, config)
