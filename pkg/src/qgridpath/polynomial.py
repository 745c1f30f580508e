"""Exact multilinear polynomials over +/-1 spin variables.

Every variable squares to one, so a monomial is just a set of distinct
variables and multiplication is symmetric difference of those sets.
Coefficients are :class:`fractions.Fraction` throughout.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Union

import numpy as np

from .errors import IncompleteAssignment

# sort groups: node spins, cross auxiliaries, start auxiliary, target auxiliary
_NODE, _YCROSS, _YSTART, _YTARGET = 0, 1, 2, 3


@dataclass(frozen=True, order=True)
class SpinVar:
    group: int
    node: int = 0

    @property
    def is_aux(self) -> bool:
        return self.group != _NODE

    def __str__(self) -> str:
        if self.group == _NODE:
            return f"x{self.node}"
        if self.group == _YCROSS:
            return f"y{self.node}"
        return "yS" if self.group == _YSTART else "yT"

    __repr__ = __str__


def x(node: int) -> SpinVar:
    return SpinVar(_NODE, node)


def y_cross(node: int) -> SpinVar:
    return SpinVar(_YCROSS, node)


Y_START = SpinVar(_YSTART)
Y_TARGET = SpinVar(_YTARGET)

Monomial = tuple[SpinVar, ...]
Scalar = Union[int, Fraction]


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    return tuple(sorted(set(a).symmetric_difference(b)))


class SpinPolynomial:
    """Canonical sum of monomials; zero coefficients are never stored."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, Scalar] | None = None):
        clean: dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            key = tuple(sorted(set(mono)))
            if len(key) != len(mono):
                raise ValueError(f"repeated variable in monomial {mono}")
            clean[key] = clean.get(key, Fraction(0)) + Fraction(coeff)
        self._terms = {k: v for k, v in sorted(clean.items()) if v != 0}

    @classmethod
    def constant(cls, value: Scalar) -> "SpinPolynomial":
        return cls({(): value})

    @classmethod
    def variable(cls, var: SpinVar) -> "SpinPolynomial":
        return cls({(var,): 1})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    @property
    def constant_term(self) -> Fraction:
        return self._terms.get((), Fraction(0))

    @property
    def variables(self) -> list[SpinVar]:
        return sorted({v for mono in self._terms for v in mono})

    @property
    def degree(self) -> int:
        return max((len(m) for m in self._terms), default=0)

    def is_zero(self) -> bool:
        return not self._terms

    # arithmetic -----------------------------------------------------------

    @staticmethod
    def _lift(other) -> "SpinPolynomial":
        if isinstance(other, SpinPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return SpinPolynomial.constant(other)
        if isinstance(other, SpinVar):
            return SpinPolynomial.variable(other)
        return NotImplemented

    def __add__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out = dict(self._terms)
        for mono, c in other._terms.items():
            out[mono] = out.get(mono, Fraction(0)) + c
        return SpinPolynomial(out)

    __radd__ = __add__

    def __neg__(self):
        return SpinPolynomial({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        if other is NotImplemented:
            return other
        out: dict[Monomial, Fraction] = {}
        for ma, ca in self._terms.items():
            for mb, cb in other._terms.items():
                mono = _mono_mul(ma, mb)
                out[mono] = out.get(mono, Fraction(0)) + ca * cb
        return SpinPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers are not supported")
        out = SpinPolynomial.constant(1)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        other = self._lift(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __repr__(self) -> str:
        return f"SpinPolynomial({self.dump()!r})"

    # evaluation -----------------------------------------------------------

    def substitute(self, values: Mapping[SpinVar, int]) -> "SpinPolynomial":
        """Fix some variables to +/-1 and return the reduced polynomial."""
        out: dict[Monomial, Fraction] = {}
        for mono, c in self._terms.items():
            sign = 1
            rest = []
            for v in mono:
                if v in values:
                    sign *= values[v]
                else:
                    rest.append(v)
            key = tuple(rest)
            out[key] = out.get(key, Fraction(0)) + sign * c
        return SpinPolynomial(out)

    def evaluate(self, assignment: Mapping[SpinVar, int]) -> Fraction:
        missing = [v for v in self.variables if v not in assignment]
        if missing:
            raise IncompleteAssignment(f"no value for {', '.join(map(str, missing))}")
        total = Fraction(0)
        for mono, c in self._terms.items():
            sign = 1
            for v in mono:
                s = assignment[v]
                if s not in (1, -1):
                    raise ValueError(f"spin {v} must be +1 or -1, got {s}")
                sign *= s
            total += sign * c
        return total

    def integer_form(self) -> tuple[dict[Monomial, int], int]:
        """Integer coefficients and common denominator: ``self == ints / den``."""
        den = 1
        for c in self._terms.values():
            den = lcm(den, c.denominator)
        return {m: int(c * den) for m, c in self._terms.items()}, den

    def spin_table(self, order: list[SpinVar]) -> tuple[np.ndarray, int]:
        """Exact values over all 2**len(order) assignments.

        Row ``b`` corresponds to reading ``b`` as a bit string with
        ``order[0]`` as the most significant bit, where bit 0 means spin +1
        and bit 1 means spin -1.  Returns integer numerators and a common
        denominator.
        """
        index = {v: i for i, v in enumerate(order)}
        missing = [v for v in self.variables if v not in index]
        if missing:
            raise IncompleteAssignment(f"order lacks {', '.join(map(str, missing))}")
        n = len(order)
        basis = np.arange(1 << n, dtype=np.int64)
        spins = [1 - 2 * ((basis >> (n - 1 - i)) & 1) for i in range(n)]
        ints, den = self.integer_form()
        big = max((abs(c) for c in ints.values()), default=0) * max(len(ints), 1)
        dtype = np.int64 if big < 2**62 else object
        out = np.zeros(1 << n, dtype=dtype)
        for mono, c in ints.items():
            term = np.full(1 << n, c, dtype=dtype)
            for v in mono:
                term = term * spins[index[v]]
            out = out + term
        return out, den

    def common_factor(self, include_constant: bool = False) -> Fraction:
        """Largest positive rational dividing every (non-constant) coefficient."""
        coeffs = [c for m, c in self._terms.items() if m or include_constant]
        if not coeffs:
            return Fraction(1)
        num, den = 0, 1
        for c in coeffs:
            num = gcd(num, c.numerator)
            den = lcm(den, c.denominator)
        return Fraction(num, den)

    def dump(self) -> str:
        """One ``coeff * x1*x2`` line per term, constant first."""
        lines = []
        for mono, c in self._terms.items():
            lines.append(f"{c} * {'*'.join(map(str, mono))}" if mono else f"{c}")
        return "\n".join(lines)


def spin_sum(items: Iterable) -> SpinPolynomial:
    total = SpinPolynomial()
    for item in items:
        total = total + item
    return total


def evaluate(poly: SpinPolynomial, assignment: Mapping[SpinVar, int]) -> Fraction:
    return poly.evaluate(assignment)
