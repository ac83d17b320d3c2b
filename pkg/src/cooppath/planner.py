"""Time-optimal space-time planning on a grid among moving obstacles.

Search states are (vertex, arrival time) pairs; the cost of a state is the
elapsed time. From a state the agent may traverse any incident edge at
maximum speed or wait in place for a fixed interval, and every candidate
segment is checked analytically against each obstacle trajectory over the
segment's time window. Only exact duplicate states are pruned: under moving
obstacles an earlier arrival does not dominate a later one.

Once every obstacle has parked the world is static, so a state reached after
that moment is completed with a shortest static path around the parked
obstacles. This keeps failing searches decidable without stepping wait
actions out to the horizon, and it is exact: nothing changes after the last
obstacle parks, so waiting can never beat the static optimum.
"""

from __future__ import annotations

import heapq
import itertools
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable

from .grid import GridGraph, Vertex
from .trajectory import SpaceTimeTrajectory

_TIME_KEY_SCALE = 1_000_000  # closed-set buckets of 1e-6 s
_HASH_TAU = 1.0              # broad-phase time bucket, seconds
_HASH_CELL = 2.0             # broad-phase space cell, meters


class PlannerError(ValueError):
    """Malformed planning query."""


@dataclass(frozen=True)
class PlanningQuery:
    graph: GridGraph
    start: Vertex
    dest: Vertex
    avoids: tuple[SpaceTimeTrajectory, ...] = ()
    v_max: float = 1.0
    wait_duration: float = 0.5
    separation: float = 0.8
    horizon: float | None = None

    def __post_init__(self) -> None:
        if not self.v_max > 0:
            raise PlannerError("v_max must be positive")
        if not self.wait_duration > 0:
            raise PlannerError("wait_duration must be positive")
        if self.separation < 0:
            raise PlannerError("separation must be non-negative")
        if self.horizon is not None and not self.horizon > 0:
            raise PlannerError("horizon must be positive")
        self.graph.vertex_index(self.start)
        self.graph.vertex_index(self.dest)


@dataclass(frozen=True)
class PlanResult:
    trajectory: SpaceTimeTrajectory | None
    expansions: int
    interrupted: bool
    horizon: float

    @property
    def failed(self) -> bool:
        return self.trajectory is None and not self.interrupted


def heuristic(graph: GridGraph, v: Vertex, dest: Vertex, v_max: float) -> float:
    """Admissible time bound: straight-line distance at maximum speed."""
    return graph.position(v).distance_to(graph.position(dest)) / v_max


def default_horizon(graph: GridGraph, avoids: tuple[SpaceTimeTrajectory, ...], v_max: float) -> float:
    """Search cutoff: four workspace diagonals plus the last obstacle arrival."""
    diag = math.hypot(graph.spec.world_width, graph.spec.world_height)
    t_dyn = max((a.dest_time for a in avoids), default=0.0)
    return 4.0 * diag / v_max + t_dyn


class _ObstacleField:
    """Compiled obstacle set with a coarse space-time hash for broad-phase."""

    def __init__(self, avoids: tuple[SpaceTimeTrajectory, ...], separation: float, pad: float):
        self.separation = separation
        self.t_dyn = max((a.dest_time for a in avoids), default=0.0)
        self.t_cap = self.t_dyn + pad
        self.ts: list[list[float]] = []
        self.xs: list[list[float]] = []
        self.ys: list[list[float]] = []
        self.bbox: list[tuple[float, float, float, float]] = []
        self.parked: list[tuple[float, float]] = []
        buckets: dict[tuple[int, int, int], set[int]] = {}
        for k, traj in enumerate(avoids):
            ts = list(traj.times)
            xs = list(traj.xs)
            ys = list(traj.ys)
            if ts[-1] < self.t_cap:
                ts.append(self.t_cap)
                xs.append(xs[-1])
                ys.append(ys[-1])
            self.ts.append(ts)
            self.xs.append(xs)
            self.ys.append(ys)
            self.bbox.append((min(xs), min(ys), max(xs), max(ys)))
            self.parked.append((traj.xs[-1], traj.ys[-1]))
            for i in range(len(ts) - 1):
                lo_t = int(ts[i] / _HASH_TAU)
                hi_t = int(ts[i + 1] / _HASH_TAU)
                lo_x = int((min(xs[i], xs[i + 1]) - separation) / _HASH_CELL)
                hi_x = int((max(xs[i], xs[i + 1]) + separation) / _HASH_CELL)
                lo_y = int((min(ys[i], ys[i + 1]) - separation) / _HASH_CELL)
                hi_y = int((max(ys[i], ys[i + 1]) + separation) / _HASH_CELL)
                for bt in range(lo_t, hi_t + 1):
                    for bx in range(lo_x, hi_x + 1):
                        for by in range(lo_y, hi_y + 1):
                            buckets.setdefault((bt, bx, by), set()).add(k)
        self.buckets = buckets

    def candidates(self, t0: float, t1: float, x0: float, y0: float, x1: float, y1: float) -> set[int]:
        found: set[int] = set()
        buckets = self.buckets
        for bt in range(int(t0 / _HASH_TAU), int(t1 / _HASH_TAU) + 1):
            for bx in range(int(min(x0, x1) / _HASH_CELL), int(max(x0, x1) / _HASH_CELL) + 1):
                for by in range(int(min(y0, y1) / _HASH_CELL), int(max(y0, y1) / _HASH_CELL) + 1):
                    got = buckets.get((bt, bx, by))
                    if got:
                        found |= got
        return found

    def _segment_vs_obstacle(
        self, k: int,
        t0: float, t1: float,
        x0: float, y0: float, x1: float, y1: float,
    ) -> bool:
        """True when the query segment keeps the separation from obstacle k."""
        ts = self.ts[k]
        xs = self.xs[k]
        ys = self.ys[k]
        sep = self.separation
        inv = 1.0 / (t1 - t0) if t1 > t0 else 0.0
        i = bisect_right(ts, t0) - 1
        if i < 0:
            i = 0
        last = len(ts) - 1
        while i < last and ts[i] < t1:
            u0 = ts[i] if ts[i] > t0 else t0
            u1 = ts[i + 1] if ts[i + 1] < t1 else t1
            if u1 < u0:
                i += 1
                continue
            span = ts[i + 1] - ts[i]
            a0 = (u0 - ts[i]) / span
            a1 = (u1 - ts[i]) / span
            ox0 = xs[i] + a0 * (xs[i + 1] - xs[i])
            oy0 = ys[i] + a0 * (ys[i + 1] - ys[i])
            ox1 = xs[i] + a1 * (xs[i + 1] - xs[i])
            oy1 = ys[i] + a1 * (ys[i + 1] - ys[i])
            b0 = (u0 - t0) * inv
            b1 = (u1 - t0) * inv
            qx0 = x0 + b0 * (x1 - x0)
            qy0 = y0 + b0 * (y1 - y0)
            qx1 = x0 + b1 * (x1 - x0)
            qy1 = y0 + b1 * (y1 - y0)
            wx0 = qx0 - ox0
            wy0 = qy0 - oy0
            wx1 = qx1 - ox1
            wy1 = qy1 - oy1
            dx = wx1 - wx0
            dy = wy1 - wy0
            l2 = dx * dx + dy * dy
            if l2 > 0.0:
                s = -(wx0 * dx + wy0 * dy) / l2
                if s < 0.0:
                    s = 0.0
                elif s > 1.0:
                    s = 1.0
                px = wx0 + s * dx
                py = wy0 + s * dy
            else:
                px, py = wx0, wy0
            if px * px + py * py < sep * sep:
                return False
            i += 1
        return True

    def segment_clear(self, t0: float, t1: float, x0: float, y0: float, x1: float, y1: float) -> bool:
        for k in self.candidates(t0, t1, x0, y0, x1, y1):
            if not self._segment_vs_obstacle(k, t0, t1, x0, y0, x1, y1):
                return False
        return True

    def parking_clear(self, x: float, y: float, t_from: float) -> bool:
        """True when sitting at (x, y) from t_from onward keeps the separation."""
        sep = self.separation
        t1 = max(self.t_cap, t_from + 1.0)
        for k in range(len(self.ts)):
            bx0, by0, bx1, by1 = self.bbox[k]
            if x < bx0 - sep or x > bx1 + sep or y < by0 - sep or y > by1 + sep:
                continue
            if not self._segment_vs_obstacle(k, t_from, t1, x, y, x, y):
                return False
        return True


def _point_segment_distance(px: float, py: float, x0: float, y0: float, x1: float, y1: float) -> float:
    dx = x1 - x0
    dy = y1 - y0
    l2 = dx * dx + dy * dy
    if l2 <= 0.0:
        return math.hypot(px - x0, py - y0)
    s = ((px - x0) * dx + (py - y0) * dy) / l2
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    return math.hypot(px - (x0 + s * dx), py - (y0 + s * dy))


class _StaticWorld:
    """Shortest static paths to the destination around parked obstacles.

    The field grows lazily: querying a vertex settles only as much of the
    graph as needed, so the work (counted in settled, part of the planner's
    expansion total) stays proportional to the searched region.
    """

    def __init__(self, graph: GridGraph, dest_vi: int, parked: list[tuple[float, float]], separation: float):
        self.graph = graph
        self._blocked_v, self._blocked_e = self._blocked(graph, parked, separation)
        n = graph.n_vertices
        self._dist = [math.inf] * n
        self._next = [-1] * n
        self._done = [False] * n
        self._w = graph.spec.width_cells
        self._heap: list = []
        self.settled = 0
        if dest_vi not in self._blocked_v:
            self._dist[dest_vi] = 0.0
            self._heap = [(0.0, dest_vi // self._w, dest_vi % self._w, dest_vi)]

    def query(self, vi: int) -> float:
        """Shortest static distance in meters from vi to the destination."""
        if self._done[vi]:
            return self._dist[vi]
        graph = self.graph
        heap = self._heap
        dist = self._dist
        done = self._done
        nxt = self._next
        while heap:
            d, _, _, u = heapq.heappop(heap)
            if done[u]:
                continue
            done[u] = True
            self.settled += 1
            for v, length in graph.neighbor_indices[u]:
                if done[v] or v in self._blocked_v:
                    continue
                key = (u, v) if u < v else (v, u)
                if key in self._blocked_e:
                    continue
                nd = d + length
                if nd < dist[v]:
                    dist[v] = nd
                    nxt[v] = u
                    heapq.heappush(heap, (nd, v // self._w, v % self._w, v))
            if u == vi:
                return dist[vi]
        return math.inf if not self._done[vi] else self._dist[vi]

    def hop_toward_dest(self, vi: int) -> int:
        return self._next[vi]

    @staticmethod
    def _blocked(graph: GridGraph, parked: list[tuple[float, float]], sep: float):
        blocked_v: set[int] = set()
        blocked_e: set[tuple[int, int]] = set()
        if not parked:
            return blocked_v, blocked_e
        spec = graph.spec
        xs, ys = graph.xs, graph.ys
        reach = sep + graph.max_edge_length
        for px, py in parked:
            c_lo = max(0, int((px - reach) / spec.pitch_x) - 1)
            c_hi = min(spec.width_cells - 1, int(math.ceil((px + reach) / spec.pitch_x)) + 1)
            r_lo = max(0, int((py - reach) / spec.pitch_y) - 1)
            r_hi = min(spec.height_cells - 1, int(math.ceil((py + reach) / spec.pitch_y)) + 1)
            for row in range(r_lo, r_hi + 1):
                base = row * spec.width_cells
                for col in range(c_lo, c_hi + 1):
                    vi = base + col
                    x0, y0 = xs[vi], ys[vi]
                    if math.hypot(px - x0, py - y0) < sep:
                        blocked_v.add(vi)
                    for vj, _ in graph.neighbor_indices[vi]:
                        if vj < vi:
                            continue
                        if _point_segment_distance(px, py, x0, y0, xs[vj], ys[vj]) < sep:
                            blocked_e.add((vi, vj))
        return blocked_v, blocked_e


def _static_best_path(
    query: PlanningQuery,
    interrupt: Callable[[], bool] | None,
    horizon: float,
) -> PlanResult:
    """Plain A* for worlds where every obstacle is parked from the start.

    Nothing ever moves, so waiting cannot help and the time dimension
    collapses; the expansion count grows with the searched area like any
    grid A* run.
    """
    graph = query.graph
    v_max = query.v_max
    start_vi = graph.vertex_index(query.start)
    dest_vi = graph.vertex_index(query.dest)
    parked = [(a.xs[-1], a.ys[-1]) for a in query.avoids]
    blocked_v, blocked_e = _StaticWorld._blocked(graph, parked, query.separation)
    w = graph.spec.width_cells
    xs, ys = graph.xs, graph.ys
    dest_x, dest_y = xs[dest_vi], ys[dest_vi]
    inv_v = 1.0 / v_max
    h = [math.hypot(xs[vi] - dest_x, ys[vi] - dest_y) * inv_v for vi in range(graph.n_vertices)]

    expansions = 0
    if start_vi in blocked_v or dest_vi in blocked_v:
        return PlanResult(None, max(expansions, 1), False, horizon)
    counter = itertools.count()
    parent: dict[int, int] = {start_vi: -1}
    g_best = {start_vi: 0.0}
    heap = [(h[start_vi], -0.0, start_vi // w, start_vi % w, next(counter), start_vi)]
    closed: set[int] = set()
    while heap:
        _, neg_g, _, _, _, vi = heapq.heappop(heap)
        if vi in closed:
            continue
        closed.add(vi)
        expansions += 1
        if interrupt is not None and interrupt():
            return PlanResult(None, expansions, True, horizon)
        g = -neg_g
        if vi == dest_vi:
            chain = []
            node = vi
            while node != -1:
                chain.append(node)
                node = parent[node]
            chain.reverse()
            # breakpoint times are the search's own arrival values, so equal
            # routes elsewhere in the package sum to bit-identical durations
            bps = [(g_best[node], xs[node], ys[node]) for node in chain]
            return PlanResult(SpaceTimeTrajectory.from_breakpoints(bps), expansions, False, horizon)
        for vj, length in graph.neighbor_indices[vi]:
            if vj in closed or vj in blocked_v:
                continue
            key = (vi, vj) if vi < vj else (vj, vi)
            if key in blocked_e:
                continue
            g2 = g + length * inv_v
            if g2 > horizon or g2 >= g_best.get(vj, math.inf):
                continue
            g_best[vj] = g2
            parent[vj] = vi
            heapq.heappush(heap, (g2 + h[vj], -g2, vj // w, vj % w, next(counter), vj))
    return PlanResult(None, expansions, False, horizon)


def best_path(query: PlanningQuery, interrupt: Callable[[], bool] | None = None) -> PlanResult:
    """Minimum-arrival-time trajectory from start to dest avoiding all obstacles.

    Returns a failed result when no goal state is reachable within the
    horizon, and an interrupted result (no trajectory) as soon as the
    interruption probe fires; the probe is polled once per expansion.
    """
    graph = query.graph
    v_max = query.v_max
    horizon = query.horizon if query.horizon is not None else default_horizon(graph, query.avoids, v_max)
    pad = graph.max_edge_length / v_max + query.wait_duration + 1.0
    field = _ObstacleField(query.avoids, query.separation, pad)
    t_dyn = field.t_dyn
    if t_dyn == 0.0:
        return _static_best_path(query, interrupt, horizon)

    start_vi = graph.vertex_index(query.start)
    dest_vi = graph.vertex_index(query.dest)
    w = graph.spec.width_cells
    xs, ys = graph.xs, graph.ys
    dest_x, dest_y = xs[dest_vi], ys[dest_vi]
    inv_v = 1.0 / v_max

    h = [math.hypot(xs[vi] - dest_x, ys[vi] - dest_y) * inv_v for vi in range(graph.n_vertices)]
    neighbor_indices = graph.neighbor_indices
    wait = query.wait_duration

    static: _StaticWorld | None = None

    def static_world() -> _StaticWorld:
        nonlocal static
        if static is None:
            static = _StaticWorld(graph, dest_vi, field.parked, query.separation)
        return static

    def total_work(expansions: int) -> int:
        return expansions + (static.settled if static is not None else 0)

    # nodes: (vertex index, time, parent node index)
    nodes: list[tuple[int, float, int]] = [(start_vi, 0.0, -1)]
    counter = itertools.count()
    # heap entries: (f, -g, row, col, t, seq, node, static completion flag)
    heap = [(h[start_vi], -0.0, start_vi // w, start_vi % w, 0.0, next(counter), 0, False)]
    closed: set[int] = set()
    static_converted: set[int] = set()
    expansions = 0

    def build_trajectory(node_idx: int, static_tail_from: int | None) -> SpaceTimeTrajectory:
        chain: list[tuple[float, float, float]] = []
        idx = node_idx
        while idx >= 0:
            vi, t, parent = nodes[idx]
            chain.append((t, xs[vi], ys[vi]))
            idx = parent
        chain.reverse()
        if static_tail_from is not None:
            sw = static_world()
            vi = static_tail_from
            t = chain[-1][0]
            while vi != dest_vi:
                vj = sw.hop_toward_dest(vi)
                edge = next(ln for vk, ln in neighbor_indices[vi] if vk == vj)
                t += edge * inv_v
                chain.append((t, xs[vj], ys[vj]))
                vi = vj
        return SpaceTimeTrajectory.from_breakpoints(chain)

    while heap:
        f, neg_g, row, col, t, _, node_idx, is_static = heapq.heappop(heap)
        if is_static:
            vi, _, _ = nodes[node_idx]
            return PlanResult(build_trajectory(node_idx, vi), total_work(expansions), False, horizon)
        vi, t, parent = nodes[node_idx]
        key = vi * 4_000_000_000_000 + int(round(t * _TIME_KEY_SCALE))
        if key in closed:
            continue
        closed.add(key)
        expansions += 1
        if interrupt is not None and interrupt():
            return PlanResult(None, total_work(expansions), True, horizon)

        x0, y0 = xs[vi], ys[vi]

        if vi == dest_vi:
            if t >= t_dyn:
                if static_world().query(dest_vi) == 0.0:
                    return PlanResult(build_trajectory(node_idx, None), total_work(expansions), False, horizon)
                continue  # destination statically blocked; nothing can finish here
            if field.parking_clear(x0, y0, t):
                return PlanResult(build_trajectory(node_idx, None), total_work(expansions), False, horizon)

        if t >= t_dyn:
            # all obstacles are parked: complete over the static world
            if vi in static_converted:
                continue
            static_converted.add(vi)
            sd = static_world().query(vi)
            if not math.isfinite(sd):
                continue
            total = t + sd * inv_v
            if total > horizon:
                continue
            heapq.heappush(heap, (total, -total, dest_vi // w, dest_vi % w, total, next(counter), node_idx, True))
            continue

        for vj, length in neighbor_indices[vi]:
            t2 = t + length * inv_v
            if t2 > horizon:
                continue
            key2 = vj * 4_000_000_000_000 + int(round(t2 * _TIME_KEY_SCALE))
            if key2 in closed:
                continue
            x1, y1 = xs[vj], ys[vj]
            if field.segment_clear(t, t2, x0, y0, x1, y1):
                nodes.append((vj, t2, node_idx))
                heapq.heappush(
                    heap,
                    (t2 + h[vj], -t2, vj // w, vj % w, t2, next(counter), len(nodes) - 1, False),
                )
        t2 = t + wait
        if t2 <= horizon:
            key2 = vi * 4_000_000_000_000 + int(round(t2 * _TIME_KEY_SCALE))
            if key2 not in closed and field.segment_clear(t, t2, x0, y0, x0, y0):
                nodes.append((vi, t2, node_idx))
                heapq.heappush(
                    heap,
                    (t2 + h[vi], -t2, row, col, t2, next(counter), len(nodes) - 1, False),
                )

    return PlanResult(None, total_work(expansions), False, horizon)
