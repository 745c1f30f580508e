"""Connectivity and path-cost energies of a grid as spin polynomials.

A node spin of -1 means the agent visits the node.  The connectivity
energy is a sum of non-negative local penalties that all vanish exactly when
every visited node has an admissible number of visited neighbours; the path
energy equals the summed cost of edges whose two ends are both visited.

Wherever the start or target node appears as the *neighbour* of a corner,
edge or cross node it is replaced by the constant -1: the endpoint
activation term pins both endpoints to -1 at every zero-energy point, so the
substitution leaves the zero set unchanged while shrinking the polynomial.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np

from .errors import WrongStructureClass
from .grid import GridMap, StructureClass, classify, geometric_class, neighbors
from .polynomial import Y_START, Y_TARGET, SpinPolynomial, SpinVar, spin_sum, x, y_cross

P = SpinPolynomial
ONE = P.constant(1)


def _neighbour_sum(grid: GridMap, node: int, pin_endpoints: bool = True) -> SpinPolynomial:
    total = P()
    for k in neighbors(grid, node):
        if pin_endpoints and k in grid.endpoints:
            total = total + P.constant(-1)
        else:
            total = total + P.variable(x(k))
    return total


def _require(grid: GridMap, node: int, expected: StructureClass) -> None:
    got = classify(grid, node)
    if got is not expected:
        raise WrongStructureClass(f"node {node} is {got.value}, expected {expected.value}")


def corner_energy(grid: GridMap, node: int) -> SpinPolynomial:
    """(1 - x)(x_a + x_b + 2): a visited corner needs both neighbours."""
    _require(grid, node, StructureClass.CORNER)
    xi = P.variable(x(node))
    return (ONE - xi) * (_neighbour_sum(grid, node) + 2)


def edge_energy(grid: GridMap, node: int) -> SpinPolynomial:
    """(1 - x)[(x_a + x_b + x_c + 2)^2 - 1]: two or three visited neighbours."""
    _require(grid, node, StructureClass.EDGE)
    xi = P.variable(x(node))
    return (ONE - xi) * ((_neighbour_sum(grid, node) + 2) ** 2 - 1)


def cross_energy(grid: GridMap, node: int) -> SpinPolynomial:
    """Two, three or four visited neighbours, with an auxiliary selector spin.

    The ``y = -1`` branch vanishes on two or three visited neighbours, the
    ``y = +1`` branch on four.
    """
    _require(grid, node, StructureClass.CROSS)
    xi = P.variable(x(node))
    yi = P.variable(y_cross(node))
    s = _neighbour_sum(grid, node)
    return (ONE - xi) * ((ONE - yi) * ((s + 1) ** 2 - 1) + (ONE + yi) * (s + 4))


def _endpoint_energy(grid: GridMap, node: int, aux: SpinVar) -> SpinPolynomial:
    s = _neighbour_sum(grid, node, pin_endpoints=False)
    if geometric_class(grid, node) is StructureClass.CORNER:
        return (s + 1) ** 2 - 1
    y = P.variable(aux)
    return (ONE - y) * (s**2 - 1) + (ONE + y) * (s + 3)


def start_energy(grid: GridMap) -> SpinPolynomial:
    """At least one visited neighbour of the start (aux spin only on an edge start)."""
    return _endpoint_energy(grid, grid.start, Y_START)


def target_energy(grid: GridMap) -> SpinPolynomial:
    return _endpoint_energy(grid, grid.target, Y_TARGET)


def endpoint_activation_energy(grid: GridMap) -> SpinPolynomial:
    return P.variable(x(grid.start)) + P.variable(x(grid.target)) + 2


_LOCAL = {
    StructureClass.CORNER: corner_energy,
    StructureClass.EDGE: edge_energy,
    StructureClass.CROSS: cross_energy,
}


def local_energies(grid: GridMap) -> list[tuple[str, SpinPolynomial]]:
    """Every local penalty term, labelled, in node order then start/target/activation."""
    out = []
    for node in grid.nodes:
        cls = classify(grid, node)
        if cls in _LOCAL:
            out.append((f"{cls.value}:{node}", _LOCAL[cls](grid, node)))
    out.append(("start", start_energy(grid)))
    out.append(("target", target_energy(grid)))
    out.append(("activation", endpoint_activation_energy(grid)))
    return out


def total_connectivity_energy(grid: GridMap) -> SpinPolynomial:
    return spin_sum(poly for _, poly in local_energies(grid))


def path_energy(grid: GridMap) -> SpinPolynomial:
    """(1/8) sum over edges of c_ij [(x_i + x_j - 1)^2 - 1].

    Each bracket is 8 when both ends are -1 and 0 otherwise, so the value is
    the exact summed cost of visited edges.
    """
    terms = []
    for (a, b), c in grid.costs:
        pair = P.variable(x(a)) + P.variable(x(b)) - 1
        terms.append(P.constant(c) * (pair**2 - 1))
    return spin_sum(terms) * P.constant(Fraction(1, 8))


def node_vars(grid: GridMap) -> list[SpinVar]:
    return [x(k) for k in grid.nodes]


def aux_vars(grid: GridMap) -> list[SpinVar]:
    """Auxiliary spins of the compiled connectivity energy, in qubit order."""
    return [v for v in total_connectivity_energy(grid).variables if v.is_aux]


def min_over_aux_table(poly: SpinPolynomial, nodes: list[SpinVar], aux: list[SpinVar]) -> np.ndarray:
    """Exact ``min_y poly(x, y)`` for every node assignment, as Fractions.

    Rows follow the node-bit ordering of :meth:`SpinPolynomial.spin_table`.
    """
    ints, den = poly.spin_table(nodes + aux)
    ints = ints.reshape(1 << len(nodes), 1 << len(aux)).min(axis=1)
    return np.array([Fraction(int(v), den) for v in ints], dtype=object)


def feasible_mask(grid: GridMap) -> np.ndarray:
    """Boolean mask over node assignments whose connectivity energy can reach 0."""
    poly = total_connectivity_energy(grid)
    table = min_over_aux_table(poly, node_vars(grid), aux_vars(grid))
    return np.array([v == 0 for v in table], dtype=bool)


def assignment_from_bits(grid: GridMap, bits: str, aux: dict | None = None) -> dict[SpinVar, int]:
    """Spin assignment for a ket string (leftmost character is node 1)."""
    out = {x(k): (-1 if ch == "1" else 1) for k, ch in zip(grid.nodes, bits)}
    out.update(aux or {})
    return out


def min_over_aux(poly: SpinPolynomial, assignment: dict[SpinVar, int]):
    """Smallest value of ``poly`` over all completions of the auxiliary spins."""
    aux = [v for v in poly.variables if v.is_aux and v not in assignment]
    best = None
    for values in product((1, -1), repeat=len(aux)):
        full = dict(assignment)
        full.update(zip(aux, values))
        val = poly.evaluate(full)
        best = val if best is None or val < best else best
    return best
