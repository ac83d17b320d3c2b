"""Real-thread execution of the decentralized protocols (validation mode).

One worker thread per agent, in-memory FIFO queues as channels, and the same
protocol state machines as the simulator. Timing is wall-clock and therefore
nondeterministic; the value of this mode is that the correctness invariants
must survive genuine concurrency. The interruptible variant polls its inbox
through the planner's interruption probe, so an inform arriving mid-search
kills and restarts the planning just like on real hardware.
"""

from __future__ import annotations

import queue
import threading
import time
from dataclasses import dataclass, field

from . import protocol
from .des import (
    RunReport,
    TraceRecord,
    _finish_report,
    ideal_solution,
    payload_hash,
    scenario_conflict_fn,
    scenario_planner,
)
from .grid import build_grid
from .protocol import AgentState
from .trajectory import SolutionSet


class DeadlockError(RuntimeError):
    """A threaded run failed to terminate within the watchdog budget."""


@dataclass
class _Shared:
    channels: dict[int, "queue.Queue"]
    termination: threading.Event
    started: float
    lock: threading.Lock = field(default_factory=threading.Lock)
    trace: list[TraceRecord] = field(default_factory=list)
    errors: list[BaseException] = field(default_factory=list)
    restarts: int = 0


def _broadcast(shared: _Shared, state: AgentState, msg) -> None:
    digest = payload_hash(msg.payload)
    now = time.monotonic() - shared.started
    for j in protocol.recipients_of(state):
        with shared.lock:
            shared.trace.append(TraceRecord(now, state.priority, j, msg.final, digest))
        shared.channels[j].put(msg)


def _drain(shared: _Shared, state: AgentState, mode: str) -> bool:
    """Apply all queued informs; returns True when anything arrived."""
    got = False
    inbox = shared.channels[state.priority]
    while True:
        try:
            msg = inbox.get_nowait()
        except queue.Empty:
            return got
        protocol.handle_inform(state, msg, mode)
        got = True


def _cycle_and_send(shared: _Shared, state: AgentState, planner, conflict_fn):
    effect = protocol.check_consistency_and_plan(state, planner, conflict_fn)
    if effect.message is not None:
        _broadcast(shared, state, effect.message)
    if state.final_mark and state.priority == state.n_agents:
        shared.termination.set()
    return effect


def _with_probe(planner, probe):
    def plan(priority, start, dest, avoids):
        return planner(priority, start, dest, avoids, interrupt=probe)

    return plan


def _sdpp_main(state, shared, planner, conflict_fn, barrier):
    # two rendezvous per round: the first ends the cycle phase, the second
    # brackets the stop decision so no straggler can observe a termination
    # flag raised by a faster thread's next round
    while True:
        _drain(shared, state, "sdpp")
        if not state.final_mark:
            _cycle_and_send(shared, state, planner, conflict_fn)
        barrier.wait()
        stop = shared.termination.is_set()
        barrier.wait()
        if stop:
            return


def _adpp_main(state, shared, planner, conflict_fn):
    inbox = shared.channels[state.priority]
    _cycle_and_send(shared, state, planner, conflict_fn)
    while not shared.termination.is_set():
        if state.check_flag or _drain(shared, state, "adpp"):
            _cycle_and_send(shared, state, planner, conflict_fn)
            continue
        try:
            msg = inbox.get(timeout=0.02)
        except queue.Empty:
            continue
        protocol.handle_inform(state, msg, "adpp")


def _iadpp_main(state, shared, planner, conflict_fn):
    inbox = shared.channels[state.priority]
    probe = lambda: not inbox.empty() or shared.termination.is_set()
    interruptible = _with_probe(planner, probe)
    while True:
        _drain(shared, state, "iadpp")
        effect = _cycle_and_send(shared, state, interruptible, conflict_fn)
        if effect.kind == "interrupted":
            if shared.termination.is_set():
                return
            with shared.lock:
                shared.restarts += 1
            continue
        got_inform = False
        while not shared.termination.is_set():
            try:
                msg = inbox.get(timeout=0.02)
            except queue.Empty:
                continue
            protocol.handle_inform(state, msg, "iadpp")
            got_inform = True
            break
        if not got_inform:
            return


def _agent_main(algorithm, state, shared, planner, conflict_fn, barrier):
    try:
        if algorithm == "sdpp":
            _sdpp_main(state, shared, planner, conflict_fn, barrier)
        elif algorithm == "adpp":
            _adpp_main(state, shared, planner, conflict_fn)
        else:
            _iadpp_main(state, shared, planner, conflict_fn)
    except BaseException as exc:
        shared.errors.append(exc)
        shared.termination.set()
        if barrier is not None:
            barrier.abort()


def run_threaded(algorithm: str, scenario, watchdog_seconds: float = 120.0) -> RunReport:
    """Run a decentralized algorithm on real threads and report the solution.

    Raises DeadlockError with a dump of the agent states when the watchdog
    expires. The report's wall clock is host time and only informational.
    """
    if algorithm not in protocol.ALGORITHMS:
        raise ValueError(f"unknown algorithm {algorithm!r}")
    n = len(scenario.agents)
    graph = build_grid(scenario.grid)
    planner = scenario_planner(scenario, graph)
    conflict_fn = scenario_conflict_fn(scenario)
    states = {
        i: AgentState(priority=i, n_agents=n, start=start, dest=dest)
        for i, (start, dest) in enumerate(scenario.agents, start=1)
    }
    started = time.monotonic()
    shared = _Shared(
        channels={i: queue.Queue() for i in range(1, n + 1)},
        termination=threading.Event(),
        started=started,
    )
    barrier = threading.Barrier(n) if algorithm == "sdpp" else None
    threads = [
        threading.Thread(
            target=_agent_main,
            args=(algorithm, states[i], shared, planner, conflict_fn, barrier),
            name=f"agent-{i}",
            daemon=True,
        )
        for i in range(1, n + 1)
    ]
    for t in threads:
        t.start()
    deadline = started + watchdog_seconds
    for t in threads:
        t.join(timeout=max(0.0, deadline - time.monotonic()))
    alive = [t.name for t in threads if t.is_alive()]
    if alive:
        dump = {
            i: {
                "final": s.final_mark,
                "has_path": s.has_path,
                "check_flag": s.check_flag,
                "view": sorted(s.agentview),
            }
            for i, s in states.items()
        }
        shared.termination.set()
        if barrier is not None:
            barrier.abort()
        raise DeadlockError(f"threads still alive: {alive}; agent states: {dump}")
    if shared.errors:
        raise shared.errors[0]
    elapsed = time.monotonic() - started

    solution = SolutionSet({i: states[i].path_or_none for i in states})
    report = RunReport(
        algorithm=f"{algorithm}-threaded",
        wall_clock=elapsed,
        messages=len(shared.trace),
        dur=None,
        cost=None,
        failed=True,
        expansions={i: 0 for i in states},
        iterations=None,
        restarts=shared.restarts if algorithm == "iadpp" else None,
        config={"mode": "threaded", "scenario": scenario.label, "n_agents": n},
        trace=shared.trace,
    )
    _finish_report(report, solution, ideal_solution(scenario, planner))
    return report
