"""Space-time trajectories, the pairwise separation relation and solution metrics.

A trajectory is a piecewise-linear map from time to the plane. Queries past
the last breakpoint return the destination: the agent parks there and still
counts for separation checks. The conflict test is analytic: on every
interval where both trajectories are linear the relative displacement traces
a straight segment, so the minimum distance is the distance from the origin
to that segment.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .grid import Position


class TrajectoryError(ValueError):
    """Malformed trajectory or invalid query."""


@dataclass(frozen=True)
class SpaceTimeTrajectory:
    times: tuple[float, ...]
    xs: tuple[float, ...]
    ys: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.times:
            raise TrajectoryError("trajectory needs at least one breakpoint")
        if len(self.times) != len(self.xs) or len(self.times) != len(self.ys):
            raise TrajectoryError("breakpoint arrays disagree in length")
        if self.times[0] != 0.0:
            raise TrajectoryError("first breakpoint must be at t=0")
        for a, b in zip(self.times, self.times[1:]):
            if not b > a:
                raise TrajectoryError("breakpoint times must strictly increase")
        for seq in (self.times, self.xs, self.ys):
            if any(not math.isfinite(v) for v in seq):
                raise TrajectoryError("breakpoints must be finite")

    @classmethod
    def from_breakpoints(cls, breakpoints: Iterable[tuple[float, float, float]]) -> "SpaceTimeTrajectory":
        pts = list(breakpoints)
        return cls(
            times=tuple(float(t) for t, _, _ in pts),
            xs=tuple(float(x) for _, x, _ in pts),
            ys=tuple(float(y) for _, _, y in pts),
        )

    @property
    def dest_time(self) -> float:
        return self.times[-1]

    @property
    def destination(self) -> Position:
        return Position(self.xs[-1], self.ys[-1])

    @property
    def start(self) -> Position:
        return Position(self.xs[0], self.ys[0])

    def position_at(self, t: float) -> Position:
        if t < 0.0:
            raise TrajectoryError(f"query time {t} is negative")
        times = self.times
        if t >= times[-1]:
            return Position(self.xs[-1], self.ys[-1])
        i = bisect.bisect_right(times, t) - 1
        t0, t1 = times[i], times[i + 1]
        a = (t - t0) / (t1 - t0)
        return Position(
            self.xs[i] + a * (self.xs[i + 1] - self.xs[i]),
            self.ys[i] + a * (self.ys[i + 1] - self.ys[i]),
        )

    def breakpoints(self) -> list[tuple[float, float, float]]:
        return list(zip(self.times, self.xs, self.ys))

    def sample(self, ts: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Positions at the given times; np.interp applies the parking rule."""
        times = np.asarray(self.times)
        return (
            np.interp(ts, times, np.asarray(self.xs)),
            np.interp(ts, times, np.asarray(self.ys)),
        )

    def to_json_dict(self) -> dict:
        return {"breakpoints": [[t, x, y] for t, x, y in self.breakpoints()]}

    @classmethod
    def from_json_dict(cls, data: dict) -> "SpaceTimeTrajectory":
        return cls.from_breakpoints((b[0], b[1], b[2]) for b in data["breakpoints"])


@dataclass(frozen=True)
class CollisionParams:
    separation: float
    check_resolution: float = 1e-3

    def __post_init__(self) -> None:
        if self.separation < 0:
            raise TrajectoryError("separation must be non-negative")
        if not self.check_resolution > 0:
            raise TrajectoryError("check_resolution must be positive")


def _segment_origin_distance(x0: float, y0: float, x1: float, y1: float) -> float:
    """Distance from the origin to the 2-D segment (x0,y0)-(x1,y1)."""
    dx = x1 - x0
    dy = y1 - y0
    l2 = dx * dx + dy * dy
    if l2 <= 0.0:
        return math.hypot(x0, y0)
    s = -(x0 * dx + y0 * dy) / l2
    if s < 0.0:
        s = 0.0
    elif s > 1.0:
        s = 1.0
    return math.hypot(x0 + s * dx, y0 + s * dy)


def min_separation(a: SpaceTimeTrajectory, b: SpaceTimeTrajectory, t_from: float = 0.0) -> float:
    """Exact minimum distance between two trajectories over [t_from, infinity)."""
    if t_from < 0.0:
        raise TrajectoryError("t_from must be non-negative")
    horizon = max(a.dest_time, b.dest_time)
    if t_from >= horizon:
        pa, pb = a.position_at(t_from), b.position_at(t_from)
        return math.hypot(pa.x - pb.x, pa.y - pb.y)
    cuts = {t_from, horizon}
    cuts.update(t for t in a.times if t_from < t < horizon)
    cuts.update(t for t in b.times if t_from < t < horizon)
    ordered = sorted(cuts)
    best = math.inf
    pa = a.position_at(ordered[0])
    pb = b.position_at(ordered[0])
    wx0, wy0 = pa.x - pb.x, pa.y - pb.y
    for t in ordered[1:]:
        pa = a.position_at(t)
        pb = b.position_at(t)
        wx1, wy1 = pa.x - pb.x, pa.y - pb.y
        d = _segment_origin_distance(wx0, wy0, wx1, wy1)
        if d < best:
            best = d
        wx0, wy0 = wx1, wy1
    return best


def sampled_min_separation(
    a: SpaceTimeTrajectory,
    b: SpaceTimeTrajectory,
    dt: float,
    t_max: float | None = None,
) -> float:
    """Dense-sampling check used to validate the analytic relation."""
    if t_max is None:
        t_max = max(a.dest_time, b.dest_time)
    ts = np.arange(0.0, t_max + dt, dt)
    ax, ay = a.sample(ts)
    bx, by = b.sample(ts)
    return float(np.min(np.hypot(ax - bx, ay - by)))


def in_conflict(a: SpaceTimeTrajectory, b: SpaceTimeTrajectory, params: CollisionParams) -> bool:
    """True iff the trajectories ever come strictly closer than the separation."""
    return min_separation(a, b) < params.separation


@dataclass
class SolutionSet:
    """Per-agent trajectory-or-failure entries indexed by priority 1..N."""

    entries: dict[int, SpaceTimeTrajectory | None]

    def __post_init__(self) -> None:
        n = len(self.entries)
        if sorted(self.entries) != list(range(1, n + 1)):
            raise TrajectoryError("solution entries must cover priorities 1..N exactly once")

    @property
    def n_agents(self) -> int:
        return len(self.entries)

    @property
    def failed_priorities(self) -> list[int]:
        return [i for i, p in sorted(self.entries.items()) if p is None]

    @property
    def is_complete(self) -> bool:
        return not self.failed_priorities

    def __getitem__(self, priority: int) -> SpaceTimeTrajectory | None:
        return self.entries[priority]

    def items(self) -> list[tuple[int, SpaceTimeTrajectory | None]]:
        return sorted(self.entries.items())

    def trajectories(self) -> list[tuple[int, SpaceTimeTrajectory]]:
        return [(i, p) for i, p in self.items() if p is not None]


def dur(solution: SolutionSet) -> float:
    """Cumulative navigation time: the sum of per-agent arrival times."""
    if not solution.is_complete:
        raise TrajectoryError(f"solution has failed agents: {solution.failed_priorities}")
    return sum(p.dest_time for _, p in solution.items() if p is not None)


def cost(solution: SolutionSet, ideal: SolutionSet) -> float:
    """Relative prolongation of the solution versus the collision-ignoring optima."""
    ideal_dur = dur(ideal)
    if ideal_dur == 0.0:
        raise TrajectoryError("ideal duration is zero; cost is undefined")
    return (dur(solution) - ideal_dur) / ideal_dur
