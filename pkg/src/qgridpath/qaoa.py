"""Statevector simulation of QAOA circuits with diagonal cost layers.

States are complex128 arrays whose last axis has length 2**l; any leading
axes are batch axes (used to run many parameter sets at once).  Layers
implement ``exp(-i gamma H)`` and ``exp(-i beta sum_k X_k)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from .errors import LayoutMismatch
from .hamiltonian import DiagonalHamiltonian, check_qubits

Table = Union[DiagonalHamiltonian, np.ndarray]


@dataclass(frozen=True)
class QaoaParams:
    betas: tuple[float, ...]
    gammas: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "betas", tuple(float(b) for b in self.betas))
        object.__setattr__(self, "gammas", tuple(float(g) for g in self.gammas))
        if len(self.betas) != len(self.gammas):
            raise ValueError("betas and gammas must have the same length")
        if not self.betas:
            raise ValueError("QAOA needs at least one layer (p >= 1)")

    @property
    def p(self) -> int:
        return len(self.betas)

    def to_dict(self) -> dict:
        return {"p": self.p, "betas": list(self.betas), "gammas": list(self.gammas)}


@dataclass(frozen=True)
class SampleResult:
    shots: int
    counts: np.ndarray
    seed: int

    @property
    def probabilities(self) -> np.ndarray:
        return self.counts / self.shots


def _table(h: Table) -> np.ndarray:
    if isinstance(h, DiagonalHamiltonian):
        return h.eigenvalue_table()
    return np.asarray(h, dtype=np.float64)


def num_qubits_of(state: np.ndarray) -> int:
    n = state.shape[-1].bit_length() - 1
    if 1 << n != state.shape[-1]:
        raise LayoutMismatch(f"state length {state.shape[-1]} is not a power of two")
    return n


def initial_state(l: int, batch: tuple[int, ...] = ()) -> np.ndarray:
    """|+>^l, optionally replicated over ``batch`` leading axes."""
    if l < 1:
        raise ValueError("need at least one qubit")
    check_qubits(l)
    return np.full(batch + (1 << l,), 2.0 ** (-l / 2), dtype=np.complex128)


def apply_cost_layer(state: np.ndarray, h: Table, gamma) -> np.ndarray:
    table = _table(h)
    if table.shape[-1] != state.shape[-1]:
        raise LayoutMismatch(f"Hamiltonian has {table.shape[-1]} entries, state has {state.shape[-1]}")
    gamma = np.asarray(gamma, dtype=np.float64)[..., None]
    return state * np.exp(-1j * gamma * table)


def _rotate(state: np.ndarray, angles: np.ndarray) -> np.ndarray:
    """exp(-i angles[..., k] X_k) on every qubit k; ``angles`` has shape batch + (l,)."""
    l = num_qubits_of(state)
    batch = state.shape[:-1]
    out = state
    for k in range(l):
        view = out.reshape(batch + (1 << k, 2, 1 << (l - k - 1)))
        theta = angles[..., k].reshape(batch + (1, 1))
        c, s = np.cos(theta), -1j * np.sin(theta)
        a, b = view[..., 0, :], view[..., 1, :]
        out = np.stack((c * a + s * b, s * a + c * b), axis=-2).reshape(state.shape)
    return out


def apply_mixer_layer(state: np.ndarray, beta) -> np.ndarray:
    l = num_qubits_of(state)
    beta = np.asarray(beta, dtype=np.float64)
    angles = np.broadcast_to(beta[..., None], np.broadcast_shapes(beta.shape, state.shape[:-1]) + (l,))
    return _rotate(state, angles)


def apply_x_sum(state: np.ndarray) -> np.ndarray:
    """sum_k X_k |state> (not unitary; used for gradients)."""
    l = num_qubits_of(state)
    batch = state.shape[:-1]
    out = np.zeros_like(state)
    for k in range(l):
        view = state.reshape(batch + (1 << k, 2, 1 << (l - k - 1)))
        out += view[..., ::-1, :].reshape(state.shape)
    return out


def evolve(tables: Sequence[np.ndarray], gammas, betas) -> np.ndarray:
    """Run ``len(tables)`` (cost, mixer) layers from |+>^l.

    ``gammas`` and ``betas`` have shape ``batch + (len(tables),)``.
    """
    gammas = np.asarray(gammas, dtype=np.float64)
    betas = np.asarray(betas, dtype=np.float64)
    if gammas.shape[-1] != len(tables) or betas.shape != gammas.shape:
        raise ValueError("angle arrays must have one entry per layer")
    l = len(tables[0]).bit_length() - 1
    state = initial_state(l, gammas.shape[:-1])
    for k, table in enumerate(tables):
        state = apply_cost_layer(state, table, gammas[..., k])
        state = apply_mixer_layer(state, betas[..., k])
    return state


def run_circuit(h: Table, params: QaoaParams) -> np.ndarray:
    return evolve([_table(h)] * params.p, params.gammas, params.betas)


def exact_probabilities(state: np.ndarray) -> np.ndarray:
    return np.abs(state) ** 2


def expectation(state: np.ndarray, h: Table) -> np.ndarray:
    """<state|H|state>; a float for a single state, an array for a batch."""
    table = _table(h)
    if table.shape[-1] != state.shape[-1]:
        raise LayoutMismatch("state and Hamiltonian sizes differ")
    return exact_probabilities(state) @ table


def adjoint_gradient(tables: Sequence[np.ndarray], objective: np.ndarray, gammas, betas):
    """Value and exact gradient of <H_objective> by reverse-mode sweeps.

    Returns ``(value, d/dgammas, d/dbetas)`` with the batch shape of the
    inputs preserved.
    """
    gammas = np.asarray(gammas, dtype=np.float64)
    betas = np.asarray(betas, dtype=np.float64)
    psi = evolve(tables, gammas, betas)
    lam = objective * psi
    value = np.real(np.sum(np.conj(psi) * lam, axis=-1))
    d_gamma = np.empty_like(gammas)
    d_beta = np.empty_like(betas)
    for k in reversed(range(len(tables))):
        d_beta[..., k] = 2 * np.imag(np.sum(np.conj(lam) * apply_x_sum(psi), axis=-1))
        psi = apply_mixer_layer(psi, -betas[..., k])
        lam = apply_mixer_layer(lam, -betas[..., k])
        d_gamma[..., k] = 2 * np.imag(np.sum(np.conj(lam) * tables[k] * psi, axis=-1))
        psi = apply_cost_layer(psi, tables[k], -gammas[..., k])
        lam = apply_cost_layer(lam, tables[k], -gammas[..., k])
    return value, d_gamma, d_beta


def make_rng(seed: Optional[int]) -> tuple[np.random.Generator, int]:
    """Counter-based Philox generator; a fresh 64-bit seed is drawn when none is given."""
    if seed is None:
        seed = int(np.random.SeedSequence().generate_state(1, np.uint64)[0])
    seed = int(seed) & 0xFFFFFFFFFFFFFFFF
    return np.random.Generator(np.random.Philox(seed)), seed


def sample(state: np.ndarray, shots: int, seed: Optional[int] = None) -> SampleResult:
    """Draw ``shots`` computational-basis outcomes from ``state``."""
    if shots < 1:
        raise ValueError("shots must be positive")
    probs = exact_probabilities(state)
    probs = probs / probs.sum()
    rng, seed = make_rng(seed)
    counts = rng.multinomial(shots, probs)
    return SampleResult(shots, counts, seed)
