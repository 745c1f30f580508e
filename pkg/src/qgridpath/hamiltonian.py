"""Lowering spin polynomials to diagonal Pauli-Z Hamiltonians.

Each spin variable becomes one qubit and every monomial becomes the product
of sigma_z on its qubits.  Qubit ``k`` (1-based) is the ``k``-th character of
the ket string, i.e. bit ``l - k`` of the basis index, and sigma_z reads
|0> as +1 and |1> as -1.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Sequence, Union

import numpy as np

from .errors import BasisOutOfRange, LayoutMismatch, TooManyQubits, UnmappedVariable
from .polynomial import SpinPolynomial, SpinVar, x

DEFAULT_MAX_QUBITS = 24
DEFAULT_SCALE = 100


def max_qubits() -> int:
    """Qubit cap, overridable through ``QGP_MAX_QUBITS``."""
    return int(os.environ.get("QGP_MAX_QUBITS", DEFAULT_MAX_QUBITS))


def check_qubits(n: int) -> None:
    cap = max_qubits()
    if n > cap:
        raise TooManyQubits(f"{n} qubits exceeds the cap of {cap} (set QGP_MAX_QUBITS to raise it)")


@dataclass(frozen=True)
class QubitLayout:
    variables: tuple[SpinVar, ...]

    @classmethod
    def for_variables(cls, node_count: int, aux: Sequence[SpinVar] = ()) -> "QubitLayout":
        return cls(tuple(x(k) for k in range(1, node_count + 1)) + tuple(sorted(aux)))

    @property
    def num_qubits(self) -> int:
        return len(self.variables)

    @property
    def num_aux(self) -> int:
        return sum(v.is_aux for v in self.variables)

    @cached_property
    def _index(self) -> dict[SpinVar, int]:
        return {v: i + 1 for i, v in enumerate(self.variables)}

    def qubit(self, var: SpinVar) -> int:
        try:
            return self._index[var]
        except KeyError:
            raise UnmappedVariable(f"{var} has no qubit in this layout") from None


@dataclass(frozen=True, eq=False)
class DiagonalHamiltonian:
    """``scale * sum(coeff * prod sigma_z)`` over ``layout``.

    ``terms`` hold exact coefficients before scaling; ``dropped_constant`` is
    the (unscaled) constant removed at lowering time, if any.
    """

    layout: QubitLayout
    terms: tuple[tuple[tuple[int, ...], Fraction], ...]
    scale: Fraction = Fraction(DEFAULT_SCALE)
    dropped_constant: Fraction = Fraction(0)
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def num_qubits(self) -> int:
        return self.layout.num_qubits

    def scaled_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        return [(q, self.scale * c) for q, c in self.terms]

    def eigenvalue_exact(self, basis: int) -> Fraction:
        n = self.num_qubits
        if not 0 <= basis < (1 << n):
            raise BasisOutOfRange(f"basis {basis} outside [0, {1 << n})")
        total = Fraction(0)
        for qubits, c in self.terms:
            sign = 1
            for k in qubits:
                if (basis >> (n - k)) & 1:
                    sign = -sign
            total += sign * c
        return self.scale * total

    def eigenvalue(self, basis: int) -> float:
        return float(self.eigenvalue_exact(basis))

    def eigenvalue_table(self) -> np.ndarray:
        """All 2**l eigenvalues as float64; cached, read-only."""
        table = self._cache.get("table")
        if table is None:
            table = _table(self.num_qubits, self.scaled_terms())
            table.setflags(write=False)
            self._cache["table"] = table
        return table

    def dump(self) -> str:
        """``coeff [q1 q2 ...]`` per term, sorted by qubit tuple, scale applied."""
        rows = sorted(self.scaled_terms(), key=lambda t: (len(t[0]), t[0]))
        return "\n".join(f"{c} [{' '.join(map(str, q))}]" for q, c in rows)

    def __add__(self, other: "DiagonalHamiltonian") -> "DiagonalHamiltonian":
        """Sum on a shared layout; the result carries scale 1."""
        if other.layout != self.layout:
            raise LayoutMismatch("cannot add Hamiltonians on different layouts")
        acc: dict[tuple[int, ...], Fraction] = {}
        for q, c in self.scaled_terms() + other.scaled_terms():
            acc[q] = acc.get(q, Fraction(0)) + c
        return DiagonalHamiltonian(
            self.layout,
            tuple((q, c) for q, c in sorted(acc.items()) if c != 0),
            Fraction(1),
            self.scale * self.dropped_constant + other.scale * other.dropped_constant,
        )


def _table(n: int, terms) -> np.ndarray:
    check_qubits(n)
    basis = np.arange(1 << n, dtype=np.int64)
    z = [None] + [(1 - 2 * ((basis >> (n - k)) & 1)).astype(np.float64) for k in range(1, n + 1)]
    out = np.zeros(1 << n, dtype=np.float64)
    for qubits, c in terms:
        term = np.full(1 << n, float(c))
        for k in qubits:
            term *= z[k]
        out += term
    return out


def lower(
    poly: SpinPolynomial,
    layout: QubitLayout,
    scale: Union[int, Fraction] = DEFAULT_SCALE,
    drop_constant: bool = True,
    normalize_common_factor: bool = False,
) -> DiagonalHamiltonian:
    """Map every monomial onto a sigma_z product over ``layout``.

    With ``normalize_common_factor`` the non-constant coefficients are first
    divided by their largest common rational factor; the spectrum's argmin
    is unaffected.
    """
    scale = Fraction(scale)
    if scale <= 0:
        raise ValueError("scale must be positive")
    if normalize_common_factor:
        poly = poly * SpinPolynomial.constant(1 / poly.common_factor())
    terms = []
    constant = Fraction(0)
    for mono, c in poly.terms.items():
        if not mono:
            constant = c
            if drop_constant:
                continue
        qubits = tuple(sorted(layout.qubit(v) for v in mono))
        terms.append((qubits, c))
    terms.sort(key=lambda t: (len(t[0]), t[0]))
    return DiagonalHamiltonian(layout, tuple(terms), scale, constant if drop_constant else Fraction(0))


def eigenvalue(h: DiagonalHamiltonian, basis: int) -> float:
    return h.eigenvalue(basis)


def eigenvalue_table(h: DiagonalHamiltonian) -> np.ndarray:
    return h.eigenvalue_table()


def ket(basis: int, width: int) -> str:
    return format(basis, f"0{width}b")
