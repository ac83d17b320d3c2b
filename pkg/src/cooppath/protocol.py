"""Agent-local state machines for prioritized planning protocols.

The same state transitions drive the centralized solver, the discrete-event
simulator and the threaded runner. An agent holds its latest committed path,
an agentview mapping each higher priority to that agent's most recently
announced path (or failure), a check flag set by inform receipt, and a final
mark used for termination detection.

A failed path stays inconsistent until the agentview changes again, so an
agent that temporarily gave up reconsiders as soon as any higher-priority
agent announces something new. The final mark flips once every higher
priority is present and final in the agentview and the agent's own path is
settled against it; agent 1 is final after its first plan. Global
termination is the final mark of the lowest-priority agent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .grid import Vertex

ALGORITHMS = ("sdpp", "adpp", "iadpp")

_UNSET = object()


class ProtocolViolation(RuntimeError):
    """Message flow broke the priority ordering rules."""


@dataclass(frozen=True)
class InformMessage:
    sender: int
    payload: object | None  # trajectory, or None for a failed plan
    final: bool


@dataclass
class ViewEntry:
    payload: object | None
    final: bool


@dataclass(frozen=True)
class ProtocolEffect:
    kind: str  # "no_op" | "planned" | "broadcast" | "interrupted"
    message: InformMessage | None = None
    recipients: tuple[int, ...] = ()
    plan_expansions: int = 0


@dataclass
class AgentState:
    priority: int
    n_agents: int
    start: Vertex
    dest: Vertex
    path: object = _UNSET
    agentview: dict[int, ViewEntry] = field(default_factory=dict)
    check_flag: bool = False
    final_mark: bool = False
    view_version: int = 0
    planned_view_version: int = -1
    plans: int = 0
    broadcasts: int = 0

    @property
    def has_path(self) -> bool:
        return self.path is not _UNSET

    @property
    def path_or_none(self) -> object | None:
        return None if self.path is _UNSET else self.path


# A conflict predicate takes two non-failure payloads and reports whether
# they violate the separation requirement.
ConflictFn = Callable[[object, object], bool]

# A planner takes (priority, start, dest, avoids) and returns
# (payload-or-None, expansions, interrupted, measured_seconds).
PlannerFn = Callable[[int, Vertex, Vertex, tuple], tuple]


def recipients_of(state: AgentState) -> tuple[int, ...]:
    return tuple(range(state.priority + 1, state.n_agents + 1))


def snapshot_avoids(state: AgentState) -> tuple[tuple, int]:
    """Copy of the current higher-priority paths plus the view version."""
    avoids = tuple(
        entry.payload
        for _, entry in sorted(state.agentview.items())
        if entry.payload is not None
    )
    return avoids, state.view_version


def is_settled(state: AgentState, conflict_fn: ConflictFn) -> bool:
    """A settled agent would not replan against its current agentview."""
    if not state.has_path:
        return False
    if state.path is None:
        return state.planned_view_version == state.view_version
    for _, entry in sorted(state.agentview.items()):
        if entry.payload is not None and conflict_fn(state.path, entry.payload):
            return False
    return True


def needs_replan(state: AgentState, conflict_fn: ConflictFn) -> bool:
    return not is_settled(state, conflict_fn)


def commit_plan(state: AgentState, payload: object | None, snapshot_version: int) -> None:
    if state.final_mark:
        raise ProtocolViolation(f"agent {state.priority} replanned after going final")
    state.path = payload
    state.planned_view_version = snapshot_version
    state.plans += 1


def update_final_mark(state: AgentState, conflict_fn: ConflictFn) -> bool:
    """Flip the final mark when the whole higher-priority chain is final.

    Requires every priority below the agent's own to be present and final in
    the agentview and the agent's own path to be settled against it. Returns
    True only on the transition, which is what triggers the one final-flagged
    broadcast.
    """
    if state.final_mark:
        return False
    if not state.has_path:
        return False
    for j in range(1, state.priority):
        entry = state.agentview.get(j)
        if entry is None or not entry.final:
            return False
    if not is_settled(state, conflict_fn):
        return False
    state.final_mark = True
    return True


def build_inform(state: AgentState) -> InformMessage:
    return InformMessage(state.priority, state.path_or_none, state.final_mark)


def handle_inform(state: AgentState, msg: InformMessage, mode: str) -> str:
    """Apply an inform to the agentview; returns the executor directive.

    SDPP ignores the message until its next iteration ("none"), ADPP wakes
    the main loop ("check"), IADPP kills and relaunches any in-flight
    planning ("restart").
    """
    if mode not in ALGORITHMS:
        raise ValueError(f"unknown algorithm {mode!r}")
    if msg.sender >= state.priority:
        raise ProtocolViolation(
            f"agent {state.priority} received inform from {msg.sender}; informs flow only downward"
        )
    state.agentview[msg.sender] = ViewEntry(msg.payload, msg.final)
    state.view_version += 1
    if mode == "sdpp":
        return "none"
    if mode == "adpp":
        state.check_flag = True
        return "check"
    return "restart"


def check_consistency_and_plan(
    state: AgentState,
    planner: PlannerFn,
    conflict_fn: ConflictFn,
) -> ProtocolEffect:
    """One synchronous consistency-check cycle.

    Replans when the current path is unset, failed-and-stale, or collides
    with the agentview; planning runs against a snapshot of the view. The
    returned effect carries the broadcast when the agent replanned or its
    final mark flipped; a consistent path with no mark change is silent.
    """
    state.check_flag = False
    planned = False
    expansions = 0
    if needs_replan(state, conflict_fn):
        avoids, version = snapshot_avoids(state)
        payload, expansions, interrupted, _ = planner(state.priority, state.start, state.dest, avoids)
        if interrupted:
            return ProtocolEffect("interrupted", plan_expansions=expansions)
        commit_plan(state, payload, version)
        planned = True
    flipped = update_final_mark(state, conflict_fn)
    if planned or flipped:
        msg = build_inform(state)
        targets = recipients_of(state)
        state.broadcasts += 1
        kind = "broadcast" if targets else "planned"
        return ProtocolEffect(kind, message=msg, recipients=targets, plan_expansions=expansions)
    return ProtocolEffect("no_op")


def ca_solve(agents: list[tuple[Vertex, Vertex]], planner: PlannerFn) -> tuple[dict[int, object | None], dict[int, int]]:
    """Centralized prioritized planning: plan agents in priority order.

    Each agent's best response avoids every trajectory already fixed by the
    higher priorities; failed plans contribute nothing to the avoid set.
    Returns the per-priority payloads and expansion counts.
    """
    avoids: list = []
    paths: dict[int, object | None] = {}
    expansions: dict[int, int] = {}
    for i, (start, dest) in enumerate(agents, start=1):
        payload, exp, interrupted, _ = planner(i, start, dest, tuple(avoids))
        if interrupted:
            raise ProtocolViolation("centralized planning cannot be interrupted")
        paths[i] = payload
        expansions[i] = exp
        if payload is not None:
            avoids.append(payload)
    return paths, expansions
