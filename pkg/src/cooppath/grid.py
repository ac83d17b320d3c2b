"""Grid graphs embedded in a rectangular metric workspace.

Vertices sit at regular intersections spanning the workspace boundary
inclusive, so the pitch between adjacent columns is world_width /
(width_cells - 1) and likewise for rows. Graphs are immutable after
construction and safe to share between concurrent planners.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, NamedTuple


class GridError(ValueError):
    """Invalid grid specification or out-of-range query."""


class Vertex(NamedTuple):
    col: int
    row: int


class Position(NamedTuple):
    x: float
    y: float

    def distance_to(self, other: "Position") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


CONNECTIVITIES = ("four", "eight")

_OFFSETS = {
    "four": ((1, 0), (-1, 0), (0, 1), (0, -1)),
    "eight": (
        (1, 0), (-1, 0), (0, 1), (0, -1),
        (1, 1), (1, -1), (-1, 1), (-1, -1),
    ),
}


@dataclass(frozen=True)
class GridSpec:
    width_cells: int
    height_cells: int
    world_width: float
    world_height: float
    connectivity: str = "four"

    def __post_init__(self) -> None:
        if self.width_cells < 2 or self.height_cells < 2:
            raise GridError("grid needs at least 2x2 vertices")
        if not (self.world_width > 0 and self.world_height > 0):
            raise GridError("workspace dimensions must be positive")
        if self.connectivity not in CONNECTIVITIES:
            raise GridError(f"unknown connectivity {self.connectivity!r}")

    @property
    def pitch_x(self) -> float:
        return self.world_width / (self.width_cells - 1)

    @property
    def pitch_y(self) -> float:
        return self.world_height / (self.height_cells - 1)

    def to_json_dict(self) -> dict:
        return {
            "width_cells": self.width_cells,
            "height_cells": self.height_cells,
            "world_width": self.world_width,
            "world_height": self.world_height,
            "connectivity": self.connectivity,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "GridSpec":
        return cls(
            width_cells=int(data["width_cells"]),
            height_cells=int(data["height_cells"]),
            world_width=float(data["world_width"]),
            world_height=float(data["world_height"]),
            connectivity=str(data["connectivity"]),
        )


class GridGraph:
    """Immutable 4- or 8-connected grid with a Euclidean embedding."""

    def __init__(self, spec: GridSpec):
        self.spec = spec
        w, h = spec.width_cells, spec.height_cells
        px, py = spec.pitch_x, spec.pitch_y
        self.n_vertices = w * h
        xs = [0.0] * self.n_vertices
        ys = [0.0] * self.n_vertices
        for row in range(h):
            for col in range(w):
                vi = row * w + col
                xs[vi] = col * px
                ys[vi] = row * py
        self._xs = xs
        self._ys = ys

        offsets = _OFFSETS[spec.connectivity]
        neighbors: list[tuple[tuple[Vertex, float], ...]] = []
        neighbor_idx: list[tuple[tuple[int, float], ...]] = []
        for row in range(h):
            for col in range(w):
                found = []
                for dc, dr in offsets:
                    c2, r2 = col + dc, row + dr
                    if 0 <= c2 < w and 0 <= r2 < h:
                        length = math.hypot(dc * px, dr * py)
                        found.append((Vertex(c2, r2), length))
                found.sort(key=lambda item: (item[0].row, item[0].col))
                neighbors.append(tuple(found))
                neighbor_idx.append(tuple((v.row * w + v.col, ln) for v, ln in found))
        self._neighbors = neighbors
        self.neighbor_indices = neighbor_idx
        self.max_edge_length = max(
            ln for nbrs in neighbor_idx for _, ln in nbrs
        )

    # -- indexing ----------------------------------------------------------

    def contains(self, v: Vertex) -> bool:
        return 0 <= v.col < self.spec.width_cells and 0 <= v.row < self.spec.height_cells

    def _check(self, v: Vertex) -> None:
        if not self.contains(v):
            raise GridError(f"vertex {v} outside {self.spec.width_cells}x{self.spec.height_cells} grid")

    def vertex_index(self, v: Vertex) -> int:
        self._check(v)
        return v.row * self.spec.width_cells + v.col

    def vertex_at(self, vi: int) -> Vertex:
        w = self.spec.width_cells
        return Vertex(vi % w, vi // w)

    def position(self, v: Vertex) -> Position:
        vi = self.vertex_index(v)
        return Position(self._xs[vi], self._ys[vi])

    def position_of_index(self, vi: int) -> Position:
        return Position(self._xs[vi], self._ys[vi])

    @property
    def xs(self) -> list[float]:
        return self._xs

    @property
    def ys(self) -> list[float]:
        return self._ys

    # -- queries -----------------------------------------------------------

    def neighbors(self, v: Vertex) -> list[tuple[Vertex, float]]:
        """Adjacent vertices with edge lengths, sorted by (row, col)."""
        return list(self._neighbors[self.vertex_index(v)])

    def edges(self) -> Iterator[tuple[Vertex, Vertex, float]]:
        """Each undirected edge once, canonical endpoint first."""
        for vi in range(self.n_vertices):
            u = self.vertex_at(vi)
            for v, length in self._neighbors[vi]:
                if (u.row, u.col) < (v.row, v.col):
                    yield u, v, length

    def nearest_vertex(self, p: Position) -> Vertex:
        """Closest vertex to p; ties break toward the smaller (row, col)."""
        x, y = p
        if not (0.0 <= x <= self.spec.world_width and 0.0 <= y <= self.spec.world_height):
            raise GridError(f"position {p} outside workspace")
        px, py = self.spec.pitch_x, self.spec.pitch_y
        cols = {min(max(int(math.floor(x / px)), 0), self.spec.width_cells - 1),
                min(max(int(math.ceil(x / px)), 0), self.spec.width_cells - 1)}
        rows = {min(max(int(math.floor(y / py)), 0), self.spec.height_cells - 1),
                min(max(int(math.ceil(y / py)), 0), self.spec.height_cells - 1)}
        best = None
        for row in sorted(rows):
            for col in sorted(cols):
                d2 = (col * px - x) ** 2 + (row * py - y) ** 2
                key = (d2, row, col)
                if best is None or key < best[0]:
                    best = (key, Vertex(col, row))
        assert best is not None
        return best[1]


def build_grid(spec: GridSpec) -> GridGraph:
    """Construct the grid graph for a validated spec."""
    return GridGraph(spec)
