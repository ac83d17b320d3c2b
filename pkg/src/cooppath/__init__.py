"""Cooperative grid pathfinding with prioritized planners.

Centralized cooperative planning plus three decentralized variants
(synchronized, asynchronous and interruptible-asynchronous), executed on a
deterministic discrete-event simulation of one processor per agent.
"""

from .grid import GridError, GridGraph, GridSpec, Position, Vertex, build_grid
from .planner import PlanningQuery, PlanResult, best_path, default_horizon, heuristic
from .protocol import (
    AgentState,
    InformMessage,
    ProtocolEffect,
    ProtocolViolation,
    ca_solve,
    check_consistency_and_plan,
    handle_inform,
    update_final_mark,
)
from .des import (
    CostModel,
    RunReport,
    ScheduleEntry,
    SimulationError,
    Simulator,
    SyntheticPattern,
    run,
    run_ca_analytic,
    run_pattern,
)
from .threaded import DeadlockError, run_threaded
from .scenarios import (
    Scenario,
    ScenarioError,
    gen_corridor,
    gen_four_heterogeneous,
    gen_four_homogeneous,
    gen_random,
    gen_spiral,
    gen_superconflict,
)
from .trajectory import (
    CollisionParams,
    SolutionSet,
    SpaceTimeTrajectory,
    TrajectoryError,
    cost,
    dur,
    in_conflict,
    min_separation,
    sampled_min_separation,
)

__all__ = [
    "AgentState",
    "CollisionParams",
    "CostModel",
    "DeadlockError",
    "GridError",
    "GridGraph",
    "GridSpec",
    "InformMessage",
    "PlanningQuery",
    "PlanResult",
    "Position",
    "ProtocolEffect",
    "ProtocolViolation",
    "RunReport",
    "Scenario",
    "ScenarioError",
    "ScheduleEntry",
    "SimulationError",
    "Simulator",
    "SolutionSet",
    "SpaceTimeTrajectory",
    "SyntheticPattern",
    "TrajectoryError",
    "Vertex",
    "best_path",
    "build_grid",
    "ca_solve",
    "check_consistency_and_plan",
    "cost",
    "default_horizon",
    "dur",
    "gen_corridor",
    "gen_four_heterogeneous",
    "gen_four_homogeneous",
    "gen_random",
    "gen_spiral",
    "gen_superconflict",
    "handle_inform",
    "heuristic",
    "in_conflict",
    "min_separation",
    "run",
    "run_ca_analytic",
    "run_pattern",
    "run_threaded",
    "sampled_min_separation",
    "update_final_mark",
]

__version__ = "0.1.0"
