"""Deterministic discrete-event execution of the decentralized protocols.

The simulator emulates one processor per agent with zero communication
delay. A consistency-check cycle occupies its agent for the handler cost
plus, when replanning is needed, the planning duration given by the cost
model; the resulting broadcast is emitted at completion time. SDPP inserts a
barrier after each round of cycles, ADPP re-checks immediately after a
completion whose window saw an inform, and IADPP cancels the in-flight cycle
and starts over at delivery time, wasting the partial work.

Events are totally ordered by (time, agent, sequence), which makes runs with
identical inputs byte-identical. The run ends when the lowest-priority
agent's final mark flips; at that point the queue is drained and anything
left must be same-instant mark propagation, otherwise the run errors out.
"""

from __future__ import annotations

import hashlib
import heapq
import itertools
import json
import math
import time as _time
from dataclasses import dataclass, field

from . import protocol
from .grid import build_grid
from .planner import PlanningQuery, best_path, default_horizon
from .protocol import AgentState, InformMessage
from .trajectory import (
    CollisionParams,
    SolutionSet,
    SpaceTimeTrajectory,
    cost as solution_cost,
    dur as solution_dur,
    in_conflict,
)

SCHEMA_VERSION = 1

COST_MODES = ("deterministic", "measured")


class SimulationError(RuntimeError):
    """The event loop hit its guard or broke an execution invariant."""


@dataclass(frozen=True)
class CostModel:
    mode: str = "deterministic"
    t_expand: float = 1e-5
    t_handler: float = 1e-6
    fixed_plan_costs: dict[int, float] | None = None

    def __post_init__(self) -> None:
        if self.mode not in COST_MODES:
            raise ValueError(f"unknown cost model mode {self.mode!r}")
        if not self.t_expand > 0:
            raise ValueError("t_expand must be positive")
        if self.t_handler < 0:
            raise ValueError("t_handler must be non-negative")

    def plan_seconds(self, priority: int, expansions: int, measured: float) -> float:
        if self.mode == "measured":
            return measured
        if self.fixed_plan_costs is not None and priority in self.fixed_plan_costs:
            return self.fixed_plan_costs[priority]
        return expansions * self.t_expand

    def to_json_dict(self) -> dict:
        return {
            "mode": self.mode,
            "t_expand": self.t_expand,
            "t_handler": self.t_handler,
            "fixed_plan_costs": self.fixed_plan_costs,
        }


@dataclass(frozen=True)
class ScheduleEntry:
    agent: int
    start: float
    end: float
    label: str  # "plan", "plan-cancelled", "check"

    def to_json_dict(self) -> dict:
        return {"agent": self.agent, "start": self.start, "end": self.end, "label": self.label}


@dataclass(frozen=True)
class TraceRecord:
    sim_time: float
    sender: int
    recipient: int
    final: bool
    payload_hash: str

    def to_json_dict(self) -> dict:
        return {
            "sim_time": self.sim_time,
            "sender": self.sender,
            "recipient": self.recipient,
            "final": self.final,
            "payload_hash": self.payload_hash,
        }


@dataclass
class RunReport:
    algorithm: str
    wall_clock: float
    messages: int
    dur: float | None
    cost: float | None
    failed: bool
    expansions: dict[int, int]
    iterations: int | None
    restarts: int | None
    config: dict
    schedule: list[ScheduleEntry] = field(default_factory=list)
    trace: list[TraceRecord] = field(default_factory=list)
    solution: SolutionSet | None = None

    def to_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "algorithm": self.algorithm,
            "wall_clock": self.wall_clock,
            "messages": self.messages,
            "dur": self.dur,
            "cost": self.cost,
            "failed": self.failed,
            "expansions": {str(k): v for k, v in sorted(self.expansions.items())},
            "iterations": self.iterations,
            "restarts": self.restarts,
            "config": self.config,
        }

    def schedule_json_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "algorithm": self.algorithm,
            "wall_clock": self.wall_clock,
            "entries": [e.to_json_dict() for e in self.schedule],
        }

    def trace_json_lines(self) -> str:
        return "".join(json.dumps(r.to_json_dict()) + "\n" for r in self.trace)


def payload_hash(payload: object | None) -> str:
    if payload is None:
        return "failure"
    if isinstance(payload, SpaceTimeTrajectory):
        blob = repr(payload.breakpoints()).encode()
    else:
        blob = repr(payload).encode()
    return hashlib.sha1(blob).hexdigest()[:12]


# -- synthetic workloads ----------------------------------------------------


@dataclass(frozen=True)
class ScriptedPath:
    """Stand-in payload for schedule studies: identity plus planning basis."""

    agent: int
    version: int
    basis: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class SyntheticPattern:
    """Hand-set workload: per-agent plan durations and conflict clusters.

    Within a cluster, a lower-priority agent's path conflicts with a
    higher-priority path unless the lower path was planned against exactly
    that version of it (the worst case for prioritized planning). Paths in
    different clusters never conflict.
    """

    plan_costs: dict[int, float]
    clusters: tuple[frozenset[int], ...]

    @property
    def n_agents(self) -> int:
        return len(self.plan_costs)

    def cluster_of(self, agent: int) -> frozenset[int] | None:
        for c in self.clusters:
            if agent in c:
                return c
        return None

    def conflict(self, a: ScriptedPath, b: ScriptedPath) -> bool:
        lower, higher = (a, b) if a.agent > b.agent else (b, a)
        cluster = self.cluster_of(lower.agent)
        if cluster is None or higher.agent not in cluster:
            return False
        return dict(lower.basis).get(higher.agent) != higher.version

    def planner(self, versions: dict[int, int]):
        def plan(priority, start, dest, avoids):
            versions[priority] = versions.get(priority, 0) + 1
            basis = tuple(sorted((p.agent, p.version) for p in avoids))
            return ScriptedPath(priority, versions[priority], basis), 1, False, 0.0
        return plan


# -- the simulator -----------------------------------------------------------


_IDLE = "idle"
_BUSY = "busy"
_AT_BARRIER = "at_barrier"
_DONE = "done"


@dataclass
class _Runtime:
    status: str = _IDLE
    busy_from: float = 0.0
    busy_label: str = ""
    pending: tuple | None = None  # (payload, snapshot_version, expansions) when planning
    completion: list | None = None  # cancellable event record
    pending_start: list | None = None  # queued cycle_start, coalesces same-instant informs


class Simulator:
    """Single-threaded deterministic executor for sdpp/adpp/iadpp."""

    def __init__(
        self,
        algorithm: str,
        n_agents: int,
        states: dict[int, AgentState],
        planner,
        conflict_fn,
        cost_model: CostModel,
        max_events: int = 1_000_000,
    ):
        if algorithm not in protocol.ALGORITHMS:
            raise ValueError(f"unknown algorithm {algorithm!r}")
        self.algorithm = algorithm
        self.n = n_agents
        self.states = states
        self.planner = planner
        self.conflict_fn = conflict_fn
        self.cost_model = cost_model
        self.max_events = max_events
        self._seq = itertools.count()
        self._heap: list = []
        self.runtimes = {i: _Runtime() for i in range(1, n_agents + 1)}
        self.schedule: list[ScheduleEntry] = []
        self.trace: list[TraceRecord] = []
        self.expansions: dict[int, int] = {i: 0 for i in range(1, n_agents + 1)}
        self.restarts = 0
        self.iterations = 0
        self._barrier_waiting: set[int] = set()
        self._barrier_time = 0.0
        self.termination_time: float | None = None
        self.quiescent = True

    # event records are mutable lists so cancellations stay cheap:
    # [time, agent, seq, kind, data, cancelled]
    def _post(self, when: float, agent: int, kind: str, data=None) -> list:
        ev = [when, agent, next(self._seq), kind, data, False]
        heapq.heappush(self._heap, ev)
        return ev

    def run(self) -> None:
        if self.algorithm == "sdpp":
            self._start_round(0.0)
        else:
            for i in range(1, self.n + 1):
                self._post(0.0, i, "cycle_start")
        processed = 0
        while self._heap:
            when, agent, _, kind, data, cancelled = heapq.heappop(self._heap)
            if cancelled:
                continue
            processed += 1
            if processed > self.max_events:
                busy = [i for i, rt in self.runtimes.items() if rt.status == _BUSY]
                raise SimulationError(
                    f"event guard tripped after {self.max_events} events; busy agents: {busy}"
                )
            if self.termination_time is not None:
                # only same-instant mark propagation may remain
                if when > self.termination_time or kind not in ("inform_delivery", "final_propagation"):
                    self.quiescent = False
                    raise SimulationError(
                        f"substantive event {kind} for agent {agent} at {when} after termination"
                    )
            if kind == "cycle_start":
                self._begin_cycle(agent, when)
            elif kind == "cycle_completion":
                self._complete_cycle(agent, when, data)
            elif kind == "inform_delivery":
                self._deliver(agent, when, data, propagation=False)
            elif kind == "final_propagation":
                self._deliver(agent, when, data, propagation=True)
            else:  # pragma: no cover - defensive
                raise SimulationError(f"unknown event kind {kind!r}")
        if self.termination_time is None:
            raise SimulationError("event queue drained before global termination")

    # -- SDPP rounds --------------------------------------------------------

    def _start_round(self, now: float) -> None:
        participants = [i for i in range(1, self.n + 1) if not self.states[i].final_mark]
        if not participants:
            return
        self.iterations += 1
        self._barrier_waiting = set(participants)
        self._barrier_time = now
        for i in participants:
            self._post(now, i, "cycle_start")

    def _arrive_barrier(self, agent: int, now: float) -> None:
        self.runtimes[agent].status = _AT_BARRIER
        self._barrier_waiting.discard(agent)
        if now > self._barrier_time:
            self._barrier_time = now
        if not self._barrier_waiting and self.termination_time is None:
            self._start_round(self._barrier_time)

    # -- cycles -------------------------------------------------------------

    def _queue_cycle(self, agent: int, now: float) -> None:
        """Schedule a consistency check; a queued one coalesces later informs
        arriving at the same instant."""
        rt = self.runtimes[agent]
        if rt.pending_start is None:
            rt.pending_start = self._post(now, agent, "cycle_start")

    def _begin_cycle(self, agent: int, now: float) -> None:
        state = self.states[agent]
        rt = self.runtimes[agent]
        rt.pending_start = None
        state.check_flag = False
        duration = self.cost_model.t_handler
        if protocol.needs_replan(state, self.conflict_fn):
            avoids, version = protocol.snapshot_avoids(state)
            t0 = _time.perf_counter()
            payload, exp, interrupted, measured = self.planner(
                agent, state.start, state.dest, avoids
            )
            if self.cost_model.mode == "measured" and measured == 0.0:
                measured = _time.perf_counter() - t0
            if interrupted:
                raise SimulationError("simulated planners must run to completion")
            rt.pending = (payload, version, exp)
            duration += self.cost_model.plan_seconds(agent, exp, measured)
            rt.busy_label = "plan"
        else:
            rt.pending = None
            rt.busy_label = "check"
        rt.status = _BUSY
        rt.busy_from = now
        rt.completion = self._post(now + duration, agent, "cycle_completion", rt.pending)

    def _complete_cycle(self, agent: int, now: float, pending) -> None:
        state = self.states[agent]
        rt = self.runtimes[agent]
        if now > rt.busy_from or rt.busy_label == "plan":
            self.schedule.append(ScheduleEntry(agent, rt.busy_from, now, rt.busy_label))
        rt.status = _IDLE
        rt.completion = None
        rt.pending = None
        planned = False
        if pending is not None:
            payload, version, exp = pending
            protocol.commit_plan(state, payload, version)
            self.expansions[agent] += exp
            planned = True
        flipped = protocol.update_final_mark(state, self.conflict_fn)
        if planned or flipped:
            # a broadcast that only flips the final flag leaves the path
            # unchanged; it propagates termination and must not cancel work
            kind = "inform_delivery" if planned else "final_propagation"
            msg = protocol.build_inform(state)
            state.broadcasts += 1
            digest = payload_hash(msg.payload)
            for j in protocol.recipients_of(state):
                self.trace.append(TraceRecord(now, agent, j, msg.final, digest))
                self._post(now, j, kind, msg)
        if flipped and agent == self.n:
            self.termination_time = now
            return
        if state.final_mark:
            rt.status = _DONE
            if self.algorithm == "sdpp":
                self._barrier_waiting.discard(agent)
                if now > self._barrier_time:
                    self._barrier_time = now
                if not self._barrier_waiting and self.termination_time is None:
                    self._start_round(self._barrier_time)
            return
        if self.algorithm == "sdpp":
            self._arrive_barrier(agent, now)
        else:
            # adpp rechecks informs that arrived during the cycle; iadpp does
            # the same for informs its relevance gate chose not to kill for
            if state.check_flag:
                self._queue_cycle(agent, now)

    # -- deliveries ---------------------------------------------------------

    def _restart_relevant(self, state: AgentState, msg: InformMessage) -> bool:
        """Should an in-flight plan die for this inform?

        Killing is worth it only when the new path actually bears on the
        agent's situation: an unset or failed commitment always restarts,
        and a committed path restarts when the announced path conflicts
        with it. Anything else is deferred to the completion re-check, so a
        missed kill costs at most one ADPP-style stale completion.
        """
        if msg.payload is None:
            return False
        committed = state.path_or_none
        if not state.has_path or committed is None:
            return True
        return self.conflict_fn(committed, msg.payload)

    def _deliver(self, agent: int, now: float, msg: InformMessage, propagation: bool) -> None:
        state = self.states[agent]
        rt = self.runtimes[agent]
        directive = protocol.handle_inform(state, msg, self.algorithm)
        if state.final_mark or rt.status == _DONE:
            return
        if directive == "restart":
            # a mark-only rebroadcast leaves the sender's path unchanged and
            # never invalidates in-flight work
            if propagation or (rt.status == _BUSY and not self._restart_relevant(state, msg)):
                state.check_flag = True
                directive = "check"
        if directive == "check":
            if rt.status == _IDLE:
                self._queue_cycle(agent, now)
            # during a cycle the flag makes the agent re-check on completion
        elif directive == "restart":
            if rt.status == _BUSY:
                assert rt.completion is not None
                rt.completion[5] = True  # cancel pending completion
                if now > rt.busy_from or rt.busy_label == "plan":
                    self.schedule.append(
                        ScheduleEntry(agent, rt.busy_from, now, rt.busy_label + "-cancelled")
                    )
                self.restarts += 1
                rt.status = _IDLE
                rt.pending = None
                rt.completion = None
            self._queue_cycle(agent, now)


# -- public entry points ------------------------------------------------------


def _make_states(scenario) -> dict[int, AgentState]:
    n = len(scenario.agents)
    return {
        i: AgentState(priority=i, n_agents=n, start=start, dest=dest)
        for i, (start, dest) in enumerate(scenario.agents, start=1)
    }


def scenario_planner(scenario, graph=None, horizon: float | None = None):
    """Best-response planner adapter for a scenario's grid and motion limits."""
    if graph is None:
        graph = build_grid(scenario.grid)

    def plan(priority, start, dest, avoids, interrupt=None):
        query = PlanningQuery(
            graph=graph,
            start=start,
            dest=dest,
            avoids=tuple(avoids),
            v_max=scenario.v_max,
            wait_duration=scenario.wait_duration,
            separation=scenario.separation,
            horizon=horizon,
        )
        t0 = _time.perf_counter()
        result = best_path(query, interrupt)
        elapsed = _time.perf_counter() - t0
        return result.trajectory, result.expansions, result.interrupted, elapsed

    return plan


def scenario_conflict_fn(scenario):
    params = CollisionParams(separation=scenario.separation)

    def conflict(a, b) -> bool:
        return in_conflict(a, b, params)

    return conflict


def ideal_solution(scenario, planner=None) -> SolutionSet:
    """Per-agent optima with collisions ignored (empty avoid sets)."""
    if planner is None:
        planner = scenario_planner(scenario)
    entries = {}
    for i, (start, dest) in enumerate(scenario.agents, start=1):
        payload, _, _, _ = planner(i, start, dest, ())
        entries[i] = payload
    return SolutionSet(entries)


def _finish_report(report: RunReport, solution: SolutionSet, ideal: SolutionSet | None) -> None:
    report.solution = solution
    report.failed = not solution.is_complete
    if report.failed or ideal is None or not ideal.is_complete:
        return
    report.dur = solution_dur(solution)
    report.cost = solution_cost(solution, ideal)


def run(
    algorithm: str,
    scenario,
    cost_model: CostModel | None = None,
    seed: int | None = None,
    max_events: int = 1_000_000,
    ideal: SolutionSet | None = None,
) -> RunReport:
    """Simulate one decentralized algorithm on a scenario."""
    cost_model = cost_model or CostModel()
    graph = build_grid(scenario.grid)
    planner = scenario_planner(scenario, graph)
    conflict_fn = scenario_conflict_fn(scenario)
    states = _make_states(scenario)
    sim = Simulator(
        algorithm, len(scenario.agents), states, planner, conflict_fn, cost_model, max_events
    )
    sim.run()
    solution = SolutionSet({i: states[i].path_or_none for i in states})
    if ideal is None:
        ideal = ideal_solution(scenario, planner)
    report = RunReport(
        algorithm=algorithm,
        wall_clock=sim.termination_time if sim.termination_time is not None else math.nan,
        messages=len(sim.trace),
        dur=None,
        cost=None,
        failed=True,
        expansions=sim.expansions,
        iterations=sim.iterations if algorithm == "sdpp" else None,
        restarts=sim.restarts if algorithm == "iadpp" else None,
        config={
            "seed": seed if seed is not None else scenario.seed,
            "cost_model": cost_model.to_json_dict(),
            "horizon": default_horizon(graph, (), scenario.v_max),
            "scenario": scenario.label,
            "n_agents": len(scenario.agents),
        },
        schedule=sim.schedule,
        trace=sim.trace,
    )
    _finish_report(report, solution, ideal)
    return report


def run_ca_analytic(
    scenario,
    cost_model: CostModel | None = None,
    seed: int | None = None,
    ideal: SolutionSet | None = None,
) -> RunReport:
    """Centralized baseline: sequential planning, communication cost 2n.

    The wall clock is the sum of the per-agent planning durations; the
    message count models each agent sending its objective to the solver and
    receiving its path back.
    """
    cost_model = cost_model or CostModel()
    graph = build_grid(scenario.grid)
    planner = scenario_planner(scenario, graph)
    n = len(scenario.agents)
    paths, expansions = protocol.ca_solve(list(scenario.agents), planner)
    wall = 0.0
    for i in range(1, n + 1):
        wall += cost_model.plan_seconds(i, expansions[i], 0.0)
    solution = SolutionSet(paths)
    if ideal is None:
        ideal = ideal_solution(scenario, planner)
    report = RunReport(
        algorithm="ca",
        wall_clock=wall,
        messages=2 * n,
        dur=None,
        cost=None,
        failed=True,
        expansions=expansions,
        iterations=None,
        restarts=None,
        config={
            "seed": seed if seed is not None else scenario.seed,
            "cost_model": cost_model.to_json_dict(),
            "horizon": default_horizon(graph, (), scenario.v_max),
            "scenario": scenario.label,
            "n_agents": n,
        },
    )
    _finish_report(report, solution, ideal)
    return report


def run_pattern(algorithm: str, pattern: SyntheticPattern, t_handler: float = 0.0) -> RunReport:
    """Execute a hand-set workload pattern instead of a grid scenario.

    Used for schedule studies: plan durations come from the pattern and the
    conflict structure is scripted, so the resulting makespans isolate the
    coordination behaviour of the algorithms.
    """
    n = pattern.n_agents
    cost_model = CostModel(t_expand=1.0, t_handler=t_handler, fixed_plan_costs=dict(pattern.plan_costs))
    states = {
        i: AgentState(priority=i, n_agents=n, start=None, dest=None)
        for i in range(1, n + 1)
    }
    versions: dict[int, int] = {}
    sim = Simulator(
        algorithm, n, states, pattern.planner(versions), pattern.conflict, cost_model
    )
    sim.run()
    return RunReport(
        algorithm=algorithm,
        wall_clock=sim.termination_time if sim.termination_time is not None else math.nan,
        messages=len(sim.trace),
        dur=None,
        cost=None,
        failed=False,
        expansions=sim.expansions,
        iterations=sim.iterations if algorithm == "sdpp" else None,
        restarts=sim.restarts if algorithm == "iadpp" else None,
        config={"pattern": True, "cost_model": cost_model.to_json_dict()},
        schedule=sim.schedule,
        trace=sim.trace,
    )
