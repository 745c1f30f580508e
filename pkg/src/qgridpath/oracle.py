"""Brute-force ground truth for small grids.

Every node assignment is enumerated; the connectivity energy is minimized
over the auxiliary spins exhaustively, and the cheapest zero-energy pattern
is the optimum.  A Dijkstra run on the plain grid graph gives an independent
check of the optimal cost.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import networkx as nx
import numpy as np

from .energy import aux_vars, node_vars, path_energy, total_connectivity_energy
from .errors import NoFeasiblePath, TooLarge
from .grid import GridMap
from .hamiltonian import ket
from .pipeline import DecodedPath, decode

MAX_ORACLE_NODES = 20


@dataclass(frozen=True)
class OracleResult:
    grid: GridMap
    feasible: tuple[int, ...]
    optimal_index: int
    optimal_cost: Fraction
    decoded: DecodedPath
    ties: tuple[int, ...] = ()

    @property
    def optimal_ket(self) -> str:
        return ket(self.optimal_index, self.grid.size)

    def to_dict(self) -> dict:
        cost = self.optimal_cost
        return {
            "grid": self.grid.to_dict(),
            "feasible": [ket(i, self.grid.size) for i in self.feasible],
            "optimal_index": self.optimal_index,
            "optimal_ket": self.optimal_ket,
            "optimal_cost": int(cost) if cost.denominator == 1 else float(cost),
            "optimal_cost_exact": str(cost),
            "ties": [ket(i, self.grid.size) for i in self.ties],
            "decoded": self.decoded.to_dict(),
        }


def _check_size(grid: GridMap) -> None:
    if grid.size > MAX_ORACLE_NODES:
        raise TooLarge(f"{grid.size} nodes exceeds the exhaustive bound of {MAX_ORACLE_NODES}")


def _connectivity_min(grid: GridMap) -> np.ndarray:
    poly = total_connectivity_energy(grid)
    nodes, aux = node_vars(grid), aux_vars(grid)
    ints, _ = poly.spin_table(nodes + aux)
    return ints.reshape(1 << len(nodes), 1 << len(aux)).min(axis=1)


def enumerate_feasible(grid: GridMap) -> list[int]:
    """Basis indices (node bits only) whose connectivity energy can be driven to 0."""
    _check_size(grid)
    return [int(i) for i in np.flatnonzero(_connectivity_min(grid) == 0)]


def path_costs(grid: GridMap, indices) -> list[Fraction]:
    ints, den = path_energy(grid).spin_table(node_vars(grid))
    return [Fraction(int(ints[i]), den) for i in indices]


def optimal_path(grid: GridMap) -> OracleResult:
    feasible = enumerate_feasible(grid)
    if not feasible:
        raise NoFeasiblePath("no assignment reaches zero connectivity energy")
    costs = path_costs(grid, feasible)
    best = min(costs)
    winners = tuple(i for i, c in zip(feasible, costs) if c == best)
    index = winners[0]
    return OracleResult(grid, tuple(feasible), index, best, decode(index, grid), winners)


def grid_graph(grid: GridMap) -> nx.Graph:
    g = nx.Graph()
    g.add_nodes_from(grid.nodes)
    for (a, b), c in grid.costs:
        g.add_edge(a, b, weight=c)
    return g


def shortest_path_crosscheck(grid: GridMap) -> tuple[list[int], Fraction]:
    """Dijkstra route and cost from start to target on the weighted grid graph."""
    g = grid_graph(grid)
    route = nx.dijkstra_path(g, grid.start, grid.target, weight="weight")
    cost = sum((grid.cost(a, b) for a, b in zip(route, route[1:])), Fraction(0))
    return route, cost
