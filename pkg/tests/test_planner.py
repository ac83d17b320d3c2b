import math

import numpy as np
import pytest

from cooppath.grid import GridSpec, Vertex, build_grid
from cooppath.planner import (
    PlannerError,
    PlanningQuery,
    best_path,
    default_horizon,
    heuristic,
)
from cooppath.trajectory import CollisionParams, SpaceTimeTrajectory, in_conflict

from spacetime_oracle import brute_force_best_time, random_walk_obstacle

GRID4 = build_grid(GridSpec(5, 5, 4.0, 4.0, "four"))  # unit pitch


def traj(*breakpoints):
    return SpaceTimeTrajectory.from_breakpoints(breakpoints)


def query(start, dest, avoids=(), graph=GRID4, **kw):
    return PlanningQuery(graph, Vertex(*start), Vertex(*dest), avoids=tuple(avoids), **kw)


def test_heuristic_values():
    g = GRID4
    assert heuristic(g, Vertex(2, 2), Vertex(2, 2), 1.0) == 0.0
    assert heuristic(g, Vertex(0, 0), Vertex(1, 0), 1.0) == pytest.approx(1.0)
    assert heuristic(g, Vertex(0, 0), Vertex(1, 1), 1.0) == pytest.approx(math.sqrt(2.0))


def test_straight_line_no_obstacles():
    res = best_path(query((0, 0), (3, 0)))
    assert not res.failed
    assert res.trajectory.dest_time == pytest.approx(3.0)
    assert res.expansions >= 1


def test_optimality_matches_shortest_path_when_free():
    g8 = build_grid(GridSpec(6, 6, 5.0, 5.0, "eight"))
    for a, b in (((0, 0), (5, 5)), ((1, 0), (3, 4)), ((0, 2), (5, 2))):
        res = best_path(PlanningQuery(g8, Vertex(*a), Vertex(*b)))
        cols = abs(a[0] - b[0])
        rows = abs(a[1] - b[1])
        octile = math.sqrt(2.0) * min(cols, rows) + abs(cols - rows)
        assert res.trajectory.dest_time == pytest.approx(octile)


def test_fully_blocked_start_fails():
    blocker = traj((0, 0, 0))  # parked on the start forever
    res = best_path(query((0, 0), (3, 0), avoids=(blocker,)))
    assert res.failed and res.trajectory is None


def test_corridor_head_on_dodge_is_suboptimal_but_clear():
    # head-on in a strip with one clear side row: the second agent must
    # yield, arriving strictly later than its unconstrained optimum
    g = build_grid(GridSpec(5, 3, 4.0, 2.0, "four"))
    first = best_path(PlanningQuery(g, Vertex(0, 1), Vertex(4, 1))).trajectory
    free = best_path(PlanningQuery(g, Vertex(4, 1), Vertex(0, 1)))
    res = best_path(PlanningQuery(g, Vertex(4, 1), Vertex(0, 1), avoids=(first,)))
    assert not res.failed
    assert res.trajectory.dest_time > free.trajectory.dest_time
    assert not in_conflict(res.trajectory, first, CollisionParams(0.8))


def test_single_lane_head_on_fails():
    g = build_grid(GridSpec(5, 2, 4.0, 0.5, "four"))
    first = best_path(PlanningQuery(g, Vertex(0, 0), Vertex(4, 0))).trajectory
    res = best_path(PlanningQuery(g, Vertex(3, 0), Vertex(0, 0), avoids=(first,)))
    assert res.failed


def test_result_respects_own_constraints():
    rng = np.random.default_rng(11)
    params = CollisionParams(0.8)
    for _ in range(25):
        avoids = tuple(random_walk_obstacle(GRID4, rng) for _ in range(2))
        start = Vertex(int(rng.integers(5)), int(rng.integers(5)))
        dest = Vertex(int(rng.integers(5)), int(rng.integers(5)))
        res = best_path(query((start.col, start.row), (dest.col, dest.row), avoids=avoids))
        if res.trajectory is None:
            continue
        for obstacle in avoids:
            assert not in_conflict(res.trajectory, obstacle, params)


def test_monotone_non_improvement():
    rng = np.random.default_rng(23)
    for _ in range(20):
        start = Vertex(0, int(rng.integers(5)))
        dest = Vertex(4, int(rng.integers(5)))
        obstacles = [random_walk_obstacle(GRID4, rng) for _ in range(3)]
        prev = None
        for k in range(len(obstacles) + 1):
            res = best_path(query((start.col, start.row), (dest.col, dest.row),
                                  avoids=tuple(obstacles[:k])))
            if res.trajectory is None:
                prev = math.inf
                continue
            if prev is not None and prev is not math.inf:
                assert res.trajectory.dest_time >= prev - 1e-12
            if prev is not math.inf:
                prev = res.trajectory.dest_time


def test_interruption_is_prompt_and_pure():
    # a crossing obstacle that forces real search without trapping the agent
    mover = traj((0, 4, 2), (2, 2, 2), (4, 0, 2), (5, 0, 3))
    q = query((0, 0), (4, 4), avoids=(mover,))
    baseline = best_path(q)
    assert baseline.trajectory is not None
    for limit in (1, 2, 5):
        calls = 0

        def probe():
            nonlocal calls
            calls += 1
            return calls >= limit

        res = best_path(q, interrupt=probe)
        assert res.interrupted and res.trajectory is None
        assert res.expansions <= baseline.expansions
    # interrupted attempts leave no state behind: rerun matches baseline
    again = best_path(q)
    assert again.trajectory.breakpoints() == baseline.trajectory.breakpoints()
    assert again.expansions == baseline.expansions


def test_brute_force_oracle_on_random_instances():
    rng = np.random.default_rng(99)
    checked = 0
    for _ in range(50):
        n_obs = int(rng.integers(0, 3))
        avoids = tuple(random_walk_obstacle(GRID4, rng) for _ in range(n_obs))
        start = Vertex(int(rng.integers(5)), int(rng.integers(5)))
        dest = Vertex(int(rng.integers(5)), int(rng.integers(5)))
        res = best_path(query((start.col, start.row), (dest.col, dest.row),
                              avoids=avoids, horizon=30.0))
        expected = brute_force_best_time(GRID4, start, dest, avoids, horizon=30.0)
        if expected is None:
            assert res.trajectory is None
        else:
            assert res.trajectory is not None, (start, dest)
            assert round(res.trajectory.dest_time * 2) == round(expected * 2)
            assert res.trajectory.dest_time == pytest.approx(expected, abs=1e-9)
        checked += 1
    assert checked == 50


def test_invalid_queries_rejected():
    with pytest.raises(PlannerError):
        query((0, 0), (1, 0), v_max=0.0)
    with pytest.raises(PlannerError):
        query((0, 0), (1, 0), wait_duration=0.0)


def test_default_horizon_covers_obstacles():
    slowpoke = traj((0, 0, 0), (100, 4, 4))
    h = default_horizon(GRID4, (slowpoke,), 1.0)
    assert h >= 100.0
