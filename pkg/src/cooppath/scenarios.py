"""Benchmark scenario generators and the scenario file format.

All generators are pure functions of their parameters and seed. Agent list
order defines priorities: the first agent has priority 1, the highest.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .grid import GridGraph, GridSpec, Position, Vertex, build_grid

RNG_ALGORITHM = "pcg64"
SCHEMA_VERSION = 1

_REJECTION_BUDGET = 10_000


class ScenarioError(ValueError):
    """Generator parameters cannot produce a valid scenario."""


@dataclass(frozen=True)
class Scenario:
    grid: GridSpec
    agents: tuple[tuple[Vertex, Vertex], ...]
    v_max: float = 1.0
    wait_duration: float = 0.5
    separation: float = 0.8
    label: str = ""
    seed: int | None = None

    def __post_init__(self) -> None:
        starts = [a[0] for a in self.agents]
        dests = [a[1] for a in self.agents]
        if len(set(starts)) != len(starts):
            raise ScenarioError("two agents share a start vertex")
        if len(set(dests)) != len(dests):
            raise ScenarioError("two agents share a destination vertex")
        graph_cols = self.grid.width_cells
        graph_rows = self.grid.height_cells
        for v in (*starts, *dests):
            if not (0 <= v.col < graph_cols and 0 <= v.row < graph_rows):
                raise ScenarioError(f"vertex {v} outside the grid")

    @property
    def n_agents(self) -> int:
        return len(self.agents)

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "label": self.label,
            "grid": self.grid.to_json_dict(),
            "vmax": self.v_max,
            "wait": self.wait_duration,
            "separation": self.separation,
            "seed": self.seed,
            "rng": RNG_ALGORITHM,
            "agents": [
                {"start": [s.col, s.row], "dest": [d.col, d.row]}
                for s, d in self.agents
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2) + "\n"

    @classmethod
    def from_json_dict(cls, data: dict) -> "Scenario":
        return cls(
            grid=GridSpec.from_json_dict(data["grid"]),
            agents=tuple(
                (Vertex(*a["start"]), Vertex(*a["dest"])) for a in data["agents"]
            ),
            v_max=float(data["vmax"]),
            wait_duration=float(data["wait"]),
            separation=float(data["separation"]),
            label=str(data.get("label", "")),
            seed=data.get("seed"),
        )

    @classmethod
    def from_json(cls, text: str) -> "Scenario":
        return cls.from_json_dict(json.loads(text))


def default_grid_8(width_cells: int = 60) -> GridSpec:
    return GridSpec(width_cells, width_cells, 20.0, 20.0, "eight")


def default_grid_4(width_cells: int = 20) -> GridSpec:
    return GridSpec(width_cells, width_cells, 20.0, 20.0, "four")


def _min_pairwise(points: list[Position]) -> float:
    best = math.inf
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            best = min(best, points[i].distance_to(points[j]))
    return best


def _snap_circle(
    graph: GridGraph,
    center: Position,
    radius: float,
    n_agents: int,
    phase: float,
    min_clearance: float = 0.0,
) -> list[tuple[Vertex, Vertex]]:
    agents = []
    for k in range(n_agents):
        angle = phase + 2.0 * math.pi * k / n_agents
        sx = center.x + radius * math.cos(angle)
        sy = center.y + radius * math.sin(angle)
        dx = center.x - radius * math.cos(angle)
        dy = center.y - radius * math.sin(angle)
        agents.append(
            (graph.nearest_vertex(Position(sx, sy)), graph.nearest_vertex(Position(dx, dy)))
        )
    starts = [a[0] for a in agents]
    dests = [a[1] for a in agents]
    if len(set(starts)) != len(starts) or len(set(dests)) != len(dests):
        raise ScenarioError(
            "circle endpoints snapped onto a shared vertex; use a finer grid or larger radius"
        )
    if min_clearance > 0.0:
        pts = [graph.position(s) for s in starts]
        if _min_pairwise(pts) < min_clearance:
            raise ScenarioError(
                "snapped circle start positions violate the separation clearance"
            )
        pts = [graph.position(d) for d in dests]
        if _min_pairwise(pts) < min_clearance:
            raise ScenarioError(
                "snapped circle goal positions violate the separation clearance"
            )
    return agents


def _snap_circle_jittered(
    graph: GridGraph,
    center: Position,
    radius: float,
    n_agents: int,
    seed: int | None,
    salt: int,
    min_clearance: float,
    tries: int = 64,
) -> list[tuple[Vertex, Vertex]]:
    """Snap a rotated circle, retrying the rotation until the snapped
    endpoints keep the required clearance."""
    phase, rng = _jitter(seed, salt)
    if rng is None:
        return _snap_circle(graph, center, radius, n_agents, phase, min_clearance)
    last: ScenarioError | None = None
    for _ in range(tries):
        try:
            placed = _snap_circle(graph, center, radius, n_agents, phase, min_clearance)
        except ScenarioError as exc:
            last = exc
            phase = float(rng.uniform(0.0, 2.0 * math.pi))
            continue
        return _permuted(placed, rng)
    raise ScenarioError(f"no feasible rotation found after {tries} tries: {last}")


def _jitter(seed: int | None, salt: int = 0) -> tuple[float, np.random.Generator | None]:
    """Seeded phase rotation plus an order-permuting generator.

    Rotating the circle varies how endpoints snap onto the grid, and the
    permutation varies the priority assignment; both average out grid and
    tie-break artifacts across repetitions.
    """
    if seed is None:
        return 0.0, None
    rng = np.random.default_rng(seed * 1000 + salt)
    return float(rng.uniform(0.0, 2.0 * math.pi)), rng


def _permuted(agents: list, rng: np.random.Generator | None) -> list:
    if rng is None:
        return agents
    order = rng.permutation(len(agents))
    return [agents[i] for i in order]


def gen_superconflict(
    center: Position,
    radius: float,
    n_agents: int,
    grid: GridSpec,
    seed: int | None = None,
) -> Scenario:
    """Agents evenly spaced on a circle, goals diametrically opposite.

    Every nominal trajectory crosses the circle center, so all agents of one
    circle are mutually in conflict. A seed permutes the priority order
    around the circle.
    """
    graph = build_grid(grid)
    if (
        center.x - radius < 0
        or center.y - radius < 0
        or center.x + radius > grid.world_width
        or center.y + radius > grid.world_height
    ):
        raise ScenarioError("superconflict circle does not fit in the workspace")
    agents = _snap_circle_jittered(graph, center, radius, n_agents, seed, 0, 0.8)
    return Scenario(
        grid=grid,
        agents=tuple(agents),
        label=f"superconflict-n{n_agents}-r{radius:g}",
        seed=seed,
    )


def _cluster_centers(grid: GridSpec) -> list[Position]:
    """Quadrant centers: a quarter workspace off the middle (5 m on the
    standard 20 m square)."""
    cx, cy = grid.world_width / 2.0, grid.world_height / 2.0
    offset = min(grid.world_width, grid.world_height) / 4.0
    return [
        Position(cx - offset, cy - offset),
        Position(cx + offset, cy - offset),
        Position(cx - offset, cy + offset),
        Position(cx + offset, cy + offset),
    ]


def _check_cluster_clearance(centers: list[Position], radii: list[float], separation: float) -> None:
    for i in range(len(centers)):
        for j in range(i + 1, len(centers)):
            gap = centers[i].distance_to(centers[j]) - radii[i] - radii[j]
            if gap <= separation:
                raise ScenarioError("superconflict circles overlap beyond the separation clearance")


def gen_four_homogeneous(grid: GridSpec | None = None, seed: int | None = None) -> Scenario:
    """Four independent eight-agent superconflicts at the quadrant centers."""
    grid = grid or default_grid_8()
    centers = _cluster_centers(grid)
    radii = [2.0] * 4
    _check_cluster_clearance(centers, radii, 0.8)
    graph = build_grid(grid)
    agents: list[tuple[Vertex, Vertex]] = []
    for idx, (c, r) in enumerate(zip(centers, radii)):
        agents.extend(_snap_circle_jittered(graph, c, r, 8, seed, idx, 0.8))
    return Scenario(grid=grid, agents=tuple(agents), label="four-homogeneous", seed=seed)


def gen_four_heterogeneous(grid: GridSpec | None = None, seed: int | None = None) -> Scenario:
    """Two four-agent wide circles plus two eight-agent narrow circles.

    The wide circles produce longer best-response planning times than the
    narrow ones, which penalizes synchronized execution.
    """
    grid = grid or default_grid_8()
    centers = _cluster_centers(grid)
    # narrow circles hold 1.6 m radius: at 1.0 m, eight evenly spaced starts
    # sit 0.77 m apart, inside the 0.8 m separation, which no plan can fix,
    # and below 1.6 m the snapped starts land on adjacent vertices
    sizes = [(4, 2.0), (8, 1.6), (8, 1.6), (4, 2.0)]
    _check_cluster_clearance(centers, [r for _, r in sizes], 0.8)
    graph = build_grid(grid)
    agents: list[tuple[Vertex, Vertex]] = []
    for idx, (c, (n, r)) in enumerate(zip(centers, sizes)):
        agents.extend(_snap_circle_jittered(graph, c, r, n, seed, idx, 0.8))
    return Scenario(grid=grid, agents=tuple(agents), label="four-heterogeneous", seed=seed)


def gen_spiral(
    grid: GridSpec | None = None,
    n_agents: int = 8,
    r_min: float = 2.0,
    r_max: float = 6.0,
    seed: int | None = None,
) -> Scenario:
    """One superconflict whose start radius grows with the agent index.

    Priority 1 is the innermost agent, so the higher priorities tend to
    finish planning first and repeatedly invalidate the in-flight planning
    of the outer agents. A seed rotates the whole pattern, preserving the
    inner-to-outer priority order.
    """
    grid = grid or default_grid_8()
    graph = build_grid(grid)
    center = Position(grid.world_width / 2.0, grid.world_height / 2.0)
    if r_max >= min(grid.world_width, grid.world_height) / 2.0:
        raise ScenarioError("spiral radius does not fit in the workspace")
    rng = np.random.default_rng(seed) if seed is not None else None
    phase = float(rng.uniform(0.0, 2.0 * math.pi)) if rng is not None else 0.0
    last: ScenarioError | None = None
    for _ in range(64):
        agents = []
        for k in range(n_agents):
            radius = r_min + k * (r_max - r_min) / (n_agents - 1)
            angle = phase + 2.0 * math.pi * k / n_agents
            sx = center.x + radius * math.cos(angle)
            sy = center.y + radius * math.sin(angle)
            dx = center.x - radius * math.cos(angle)
            dy = center.y - radius * math.sin(angle)
            agents.append(
                (graph.nearest_vertex(Position(sx, sy)), graph.nearest_vertex(Position(dx, dy)))
            )
        starts = [a[0] for a in agents]
        dests = [a[1] for a in agents]
        try:
            if len(set(starts)) != len(starts) or len(set(dests)) != len(dests):
                raise ScenarioError("spiral endpoints snapped onto a shared vertex")
            if _min_pairwise([graph.position(s) for s in starts]) < 0.8:
                raise ScenarioError("snapped spiral starts violate the separation clearance")
            if _min_pairwise([graph.position(d) for d in dests]) < 0.8:
                raise ScenarioError("snapped spiral goals violate the separation clearance")
        except ScenarioError as exc:
            last = exc
            if rng is None:
                raise
            phase = float(rng.uniform(0.0, 2.0 * math.pi))
            continue
        return Scenario(grid=grid, agents=tuple(agents), label=f"spiral-n{n_agents}", seed=seed)
    raise ScenarioError(f"no feasible spiral rotation found: {last}")


def gen_random(
    grid: GridSpec | None = None,
    n_agents: int = 10,
    seed: int = 0,
    min_distance: float = 5.0,
    max_distance: float = 10.0,
) -> Scenario:
    """Random starts and goals with start-goal distance in (min, max) meters.

    Starts and goals are drawn without replacement from the grid vertices;
    goal candidates are rejection-sampled until the Euclidean distance falls
    strictly inside the interval.
    """
    grid = grid or default_grid_4()
    graph = build_grid(grid)
    n_vertices = graph.n_vertices
    if n_agents > n_vertices:
        raise ScenarioError("more agents than grid vertices")
    rng = np.random.default_rng(seed)
    free_starts = list(range(n_vertices))
    free_dests = list(range(n_vertices))
    agents: list[tuple[Vertex, Vertex]] = []
    for _ in range(n_agents):
        si = free_starts.pop(int(rng.integers(len(free_starts))))
        sp = graph.position_of_index(si)
        dest_idx = None
        for _ in range(_REJECTION_BUDGET):
            cand_pos = int(rng.integers(len(free_dests)))
            di = free_dests[cand_pos]
            dp = graph.position_of_index(di)
            if min_distance < sp.distance_to(dp) < max_distance:
                dest_idx = cand_pos
                break
        if dest_idx is None:
            raise ScenarioError(
                f"could not draw a goal within ({min_distance}, {max_distance}) m "
                f"after {_REJECTION_BUDGET} tries"
            )
        di = free_dests.pop(dest_idx)
        agents.append((graph.vertex_at(si), graph.vertex_at(di)))
    return Scenario(
        grid=grid,
        agents=tuple(agents),
        label=f"random-n{n_agents}-s{seed}",
        seed=seed,
    )


def gen_corridor(order: str = "agent1_first", width: str = "narrow") -> Scenario:
    """Two agents in a tight strip; the classic corridor stress cases.

    narrow: a strip only one agent wide with head-on agents, so prioritized
    planning fails whichever agent goes first. wide: a strip with enough
    lateral room to duck aside, but the second agent's parked destination
    walls the strip; planning succeeds only when the through-going agent has
    the higher priority.
    """
    if order not in ("agent1_first", "agent2_first"):
        raise ScenarioError(f"unknown order {order!r}")
    if width == "narrow":
        grid = GridSpec(5, 2, 4.0, 0.5, "four")
        through = (Vertex(0, 0), Vertex(4, 0))
        opposing = (Vertex(3, 0), Vertex(0, 0))
        pair = (through, opposing)
    elif width == "wide":
        grid = GridSpec(11, 3, 5.0, 1.0, "eight")
        through = (Vertex(0, 0), Vertex(10, 0))
        opposing = (Vertex(4, 2), Vertex(2, 1))
        pair = (through, opposing)
    else:
        raise ScenarioError(f"unknown width {width!r}")
    agents = pair if order == "agent1_first" else (pair[1], pair[0])
    return Scenario(
        grid=grid,
        agents=agents,
        label=f"corridor-{width}-{order}",
    )
