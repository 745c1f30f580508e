"""n x m grid maps: nodes, adjacency, edge costs and structural classes.

Nodes are numbered 1..n*m in row-major order, so on a 2 x 3 grid the top
row holds nodes 1, 2, 3 and the bottom row holds 4, 5, 6.  Node ``k`` is
encoded on qubit ``k``.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Iterator, Mapping, Union

from .errors import (
    DimensionTooSmall,
    EndpointMisplaced,
    InvalidGrid,
    MissingCost,
    NodeOutOfRange,
    NonPositiveCost,
)

Number = Union[int, float, Fraction, str]
Edge = tuple[int, int]


class StructureClass(enum.Enum):
    CORNER = "corner"
    EDGE = "edge"
    CROSS = "cross"
    START = "start"
    TARGET = "target"


_BY_DEGREE = {2: StructureClass.CORNER, 3: StructureClass.EDGE, 4: StructureClass.CROSS}


def as_fraction(value: Number) -> Fraction:
    """Exact rational for a cost value; floats go through their shortest repr."""
    if isinstance(value, bool):
        raise TypeError("cost must be a number, not bool")
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


def edge_key(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


@dataclass(frozen=True)
class GridMap:
    """Validated, immutable grid instance. Build it with :func:`build_grid`."""

    rows: int
    cols: int
    start: int
    target: int
    costs: tuple[tuple[Edge, Fraction], ...]

    @property
    def size(self) -> int:
        return self.rows * self.cols

    @property
    def nodes(self) -> range:
        return range(1, self.size + 1)

    @property
    def endpoints(self) -> tuple[int, int]:
        return (self.start, self.target)

    def position(self, node: int) -> tuple[int, int]:
        """1-based (row, col) of ``node``."""
        _check_node(self, node)
        return (node - 1) // self.cols + 1, (node - 1) % self.cols + 1

    def cost(self, a: int, b: int) -> Fraction:
        key = edge_key(a, b)
        for edge, c in self.costs:
            if edge == key:
                return c
        raise InvalidGrid(f"nodes {a} and {b} are not adjacent")

    def cost_map(self) -> dict[Edge, Fraction]:
        return dict(self.costs)

    def edges(self) -> Iterator[Edge]:
        return (edge for edge, _ in self.costs)

    def to_dict(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "start": self.start,
            "target": self.target,
            "costs": [{"a": a, "b": b, "c": _json_number(c)} for (a, b), c in self.costs],
        }


def _json_number(c: Fraction) -> Union[int, float]:
    if c.denominator == 1:
        return int(c)
    return float(c)


def grid_edges(rows: int, cols: int) -> list[Edge]:
    """All horizontally/vertically adjacent pairs, sorted."""
    out = []
    for r in range(rows):
        for c in range(cols):
            k = r * cols + c + 1
            if c + 1 < cols:
                out.append((k, k + 1))
            if r + 1 < rows:
                out.append((k, k + cols))
    return sorted(out)


def build_grid(
    rows: int,
    cols: int,
    start: int,
    target: int,
    costs: Union[Mapping[Edge, Number], Iterable[tuple[int, int, Number]]],
) -> GridMap:
    """Validate and freeze a grid definition.

    ``costs`` is either a mapping ``{(a, b): c}`` or an iterable of
    ``(a, b, c)`` triples; pairs are undirected and each adjacent pair must
    appear exactly once.
    """
    if rows < 2 or cols < 2:
        raise DimensionTooSmall(f"grid must be at least 2 x 2, got {rows} x {cols}")
    size = rows * cols
    for name, node in (("start", start), ("target", target)):
        if not 1 <= node <= size:
            raise NodeOutOfRange(f"{name} node {node} outside 1..{size}")
    if (start - 1) % cols != 0:
        raise EndpointMisplaced(f"start node {start} is not in the first column")
    if (target - 1) % cols != cols - 1:
        raise EndpointMisplaced(f"target node {target} is not in the last column")
    if start == target:
        raise EndpointMisplaced("start and target coincide")

    triples = costs.items() if isinstance(costs, Mapping) else costs
    adjacent = set(grid_edges(rows, cols))
    table: dict[Edge, Fraction] = {}
    for item in triples:
        if isinstance(costs, Mapping):
            (a, b), c = item
        else:
            a, b, c = item
        key = edge_key(int(a), int(b))
        if key not in adjacent:
            raise InvalidGrid(f"cost given for non-adjacent pair {key}")
        if key in table:
            raise InvalidGrid(f"duplicate cost entry for {key}")
        value = as_fraction(c)
        if value <= 0:
            raise NonPositiveCost(f"cost of edge {key} must be positive, got {c}")
        table[key] = value
    missing = sorted(adjacent - table.keys())
    if missing:
        raise MissingCost(f"no cost for adjacent pairs {missing}")
    return GridMap(rows, cols, start, target, tuple(sorted(table.items())))


def uniform_grid(rows: int, cols: int, start: int, target: int, cost: Number = 1, **overrides: Number) -> GridMap:
    """Grid with every edge at ``cost``; override edges as ``c2_3=4``."""
    table: dict[Edge, Number] = {e: cost for e in grid_edges(rows, cols)}
    for name, value in overrides.items():
        a, b = name.removeprefix("c").split("_")
        table[edge_key(int(a), int(b))] = value
    return build_grid(rows, cols, start, target, table)


def paper_grid() -> GridMap:
    """The 2 x 3 benchmark instance: start 4, target 3, edge (2, 3) costs 4."""
    return uniform_grid(2, 3, start=4, target=3, c2_3=4)


def _check_node(grid: GridMap, node: int) -> None:
    if not 1 <= node <= grid.size:
        raise NodeOutOfRange(f"node {node} outside 1..{grid.size}")


def neighbors(grid: GridMap, node: int) -> list[int]:
    """Horizontal and vertical neighbours of ``node``, ascending."""
    _check_node(grid, node)
    r, c = divmod(node - 1, grid.cols)
    out = []
    if r > 0:
        out.append(node - grid.cols)
    if c > 0:
        out.append(node - 1)
    if c + 1 < grid.cols:
        out.append(node + 1)
    if r + 1 < grid.rows:
        out.append(node + grid.cols)
    return out


def classify(grid: GridMap, node: int) -> StructureClass:
    if node == grid.start:
        _check_node(grid, node)
        return StructureClass.START
    if node == grid.target:
        _check_node(grid, node)
        return StructureClass.TARGET
    return _BY_DEGREE[len(neighbors(grid, node))]


def geometric_class(grid: GridMap, node: int) -> StructureClass:
    """Corner/edge/cross by neighbour count, ignoring endpoint status."""
    return _BY_DEGREE[len(neighbors(grid, node))]


def grid_from_dict(data: Mapping) -> GridMap:
    try:
        entries = [(e["a"], e["b"], e["c"]) for e in data["costs"]]
        return build_grid(int(data["rows"]), int(data["cols"]), int(data["start"]), int(data["target"]), entries)
    except (KeyError, TypeError) as exc:
        raise InvalidGrid(f"malformed grid definition: {exc}") from exc


def load_grid(path: Union[str, Path]) -> GridMap:
    with open(path, encoding="utf-8") as fh:
        return grid_from_dict(json.load(fh))


def dump_grid(grid: GridMap, path: Union[str, Path]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(grid.to_dict(), fh, indent=2)
        fh.write("\n")
