"""Experiment batch runner, metric aggregation and artifact emission.

Per-run JSON reports plus an aggregate CSV with one row per
(agent count, algorithm). Mean wall clock, messages and cost are computed
only over instances that every compared algorithm solved; the failure ratio
counts an algorithm's own failures over all instances. Everything is
deterministic for a fixed seed list, and every emitted solution is
re-verified pairwise before it is written.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import des
from .des import CostModel, RunReport
from .scenarios import (
    Scenario,
    gen_corridor,
    gen_four_heterogeneous,
    gen_four_homogeneous,
    gen_random,
    gen_spiral,
    gen_superconflict,
)
from .grid import GridSpec, Position
from .trajectory import SolutionSet, min_separation

ALL_ALGORITHMS = ("ca", "sdpp", "adpp", "iadpp")

CSV_COLUMNS = ("n_agents", "algorithm", "wallclock_s", "messages", "cost", "failure_ratio")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INCOMPLETE = 2

_VERIFY_SLACK = 1e-9


class VerificationError(RuntimeError):
    """A solution about to be emitted violates the separation requirement."""


def verify_solution(solution: SolutionSet, separation: float) -> None:
    """Pairwise analytic separation check over the whole run, parking included."""
    trajs = solution.trajectories()
    for a in range(len(trajs)):
        for b in range(a + 1, len(trajs)):
            i, pa = trajs[a]
            j, pb = trajs[b]
            sep = min_separation(pa, pb)
            if sep < separation - _VERIFY_SLACK:
                raise VerificationError(
                    f"agents {i} and {j} come within {sep:.6f} m; required {separation} m"
                )


def count_messages(trace) -> int:
    """Point-to-point inform deliveries; a broadcast to k receivers counts k."""
    return len(trace)


def run_algorithm(
    algorithm: str,
    scenario: Scenario,
    cost_model: CostModel | None = None,
    seed: int | None = None,
    ideal: SolutionSet | None = None,
    max_events: int = 1_000_000,
) -> RunReport:
    if algorithm == "ca":
        return des.run_ca_analytic(scenario, cost_model, seed=seed, ideal=ideal)
    return des.run(algorithm, scenario, cost_model, seed=seed, ideal=ideal, max_events=max_events)


# -- single solve with artifacts ---------------------------------------------


def solution_json_dict(report: RunReport) -> dict:
    agents = []
    assert report.solution is not None
    for i, payload in report.solution.items():
        agents.append(
            {
                "priority": i,
                "status": "ok" if payload is not None else "failed",
                "trajectory": payload.to_json_dict() if payload is not None else None,
            }
        )
    return {"schema_version": des.SCHEMA_VERSION, "algorithm": report.algorithm, "agents": agents}


def solve_to_dir(
    scenario: Scenario,
    algorithm: str,
    out_dir: str | Path,
    cost_model: CostModel | None = None,
    seed: int | None = None,
    max_events: int = 1_000_000,
) -> tuple[RunReport, int]:
    """Solve and write solution, report, message trace and schedule files."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    report = run_algorithm(algorithm, scenario, cost_model, seed=seed, max_events=max_events)
    assert report.solution is not None
    verify_solution(report.solution, scenario.separation)
    (out / "solution.json").write_text(json.dumps(solution_json_dict(report), indent=2) + "\n")
    (out / "report.json").write_text(json.dumps(report.to_json_dict(), indent=2) + "\n")
    (out / "trace.jsonl").write_text(report.trace_json_lines())
    (out / "schedule.json").write_text(json.dumps(report.schedule_json_dict(), indent=2) + "\n")
    return report, (EXIT_INCOMPLETE if report.failed else EXIT_OK)


# -- batch experiments --------------------------------------------------------


@dataclass(frozen=True)
class ExperimentSpec:
    """A sweep over scenario sizes and seeds for a fixed algorithm list."""

    generator: str  # "random" | "superconflict" | "four_homogeneous" | ...
    agent_counts: tuple[int, ...]
    seeds: tuple[int, ...]
    algorithms: tuple[str, ...] = ALL_ALGORITHMS
    cost_model: CostModel = field(default_factory=CostModel)
    grid: GridSpec | None = None

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ValueError("at least one seed is required")
        for a in self.algorithms:
            if a not in ALL_ALGORITHMS:
                raise ValueError(f"unknown algorithm {a!r}")


def build_scenario(spec: ExperimentSpec, n_agents: int, seed: int) -> Scenario:
    if spec.generator == "random":
        return gen_random(spec.grid, n_agents=n_agents, seed=seed)
    if spec.generator == "superconflict":
        grid = spec.grid or GridSpec(60, 60, 20.0, 20.0, "eight")
        center = Position(grid.world_width / 2, grid.world_height / 2)
        return gen_superconflict(center, 2.0, n_agents, grid, seed=seed)
    if spec.generator == "four_homogeneous":
        return gen_four_homogeneous(spec.grid, seed=seed)
    if spec.generator == "four_heterogeneous":
        return gen_four_heterogeneous(spec.grid, seed=seed)
    if spec.generator == "spiral":
        return gen_spiral(spec.grid, seed=seed)
    if spec.generator == "corridor_narrow":
        return gen_corridor("agent1_first", "narrow")
    if spec.generator == "corridor_wide":
        return gen_corridor("agent1_first", "wide")
    raise ValueError(f"unknown generator {spec.generator!r}")


@dataclass
class RunRecord:
    n_agents: int
    seed: int
    algorithm: str
    report: RunReport

    def row(self) -> dict:
        return {
            "n_agents": self.n_agents,
            "seed": self.seed,
            "algorithm": self.algorithm,
            "wallclock_s": self.report.wall_clock,
            "messages": self.report.messages,
            "cost": self.report.cost,
            "failed": self.report.failed,
        }


@dataclass(frozen=True)
class AggregateRow:
    n_agents: int
    algorithm: str
    wallclock_s: float
    messages: float
    cost: float
    failure_ratio: float
    samples: int


def run_experiment_records(spec: ExperimentSpec) -> list[RunRecord]:
    records: list[RunRecord] = []
    for n_agents in spec.agent_counts:
        for seed in spec.seeds:
            scenario = build_scenario(spec, n_agents, seed)
            ideal = des.ideal_solution(scenario)
            for algorithm in spec.algorithms:
                report = run_algorithm(algorithm, scenario, spec.cost_model, seed=seed, ideal=ideal)
                assert report.solution is not None
                if not report.failed:
                    verify_solution(report.solution, scenario.separation)
                records.append(RunRecord(n_agents, seed, algorithm, report))
    return records


def aggregate(records: list[RunRecord], algorithms: tuple[str, ...]) -> list[AggregateRow]:
    """Mean metrics per (n_agents, algorithm) over commonly-solved instances."""
    by_instance: dict[tuple[int, int], dict[str, RunRecord]] = {}
    for r in records:
        by_instance.setdefault((r.n_agents, r.seed), {})[r.algorithm] = r
    counts = sorted({r.n_agents for r in records})
    rows: list[AggregateRow] = []
    for n_agents in counts:
        instances = sorted(k for k in by_instance if k[0] == n_agents)
        solved = [
            k
            for k in instances
            if all(not by_instance[k][a].report.failed for a in algorithms if a in by_instance[k])
        ]
        for algorithm in algorithms:
            runs_all = [by_instance[k][algorithm] for k in instances if algorithm in by_instance[k]]
            runs_ok = [by_instance[k][algorithm] for k in solved if algorithm in by_instance[k]]
            if not runs_all:
                continue
            failure_ratio = sum(1 for r in runs_all if r.report.failed) / len(runs_all)
            if runs_ok:
                wall = sum(r.report.wall_clock for r in runs_ok) / len(runs_ok)
                msgs = sum(r.report.messages for r in runs_ok) / len(runs_ok)
                cst = sum(r.report.cost for r in runs_ok) / len(runs_ok)
            else:
                wall = msgs = cst = math.nan
            rows.append(
                AggregateRow(n_agents, algorithm, wall, msgs, cst, failure_ratio, len(runs_ok))
            )
    return rows


def aggregate_csv(rows: list[AggregateRow]) -> str:
    """Aggregate CSV; '#' lines carry the metadata, then the fixed header."""
    lines = [
        f"# schema_version={des.SCHEMA_VERSION}",
        "# means over instances solved by every compared algorithm;"
        " failure_ratio over all instances",
        ",".join(CSV_COLUMNS),
    ]
    for row in rows:
        lines.append(
            f"{row.n_agents},{row.algorithm},{row.wallclock_s!r},{row.messages!r},"
            f"{row.cost!r},{row.failure_ratio!r}"
        )
    return "\n".join(lines) + "\n"


def run_experiment(spec: ExperimentSpec, out_dir: str | Path) -> list[AggregateRow]:
    """Run the sweep, write per-run JSON and the aggregate CSV."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    records = run_experiment_records(spec)
    for r in records:
        name = f"run-n{r.n_agents}-s{r.seed}-{r.algorithm}.json"
        payload = r.report.to_json_dict()
        (out / name).write_text(json.dumps(payload, indent=2) + "\n")
        trace_name = f"trace-n{r.n_agents}-s{r.seed}-{r.algorithm}.jsonl"
        (out / trace_name).write_text(r.report.trace_json_lines())
    rows = aggregate(records, spec.algorithms)
    (out / "aggregate.csv").write_text(aggregate_csv(rows))
    return rows


# -- canned sweeps -----------------------------------------------------------


def random_sweep_spec(full: bool = False, seeds: int = 10) -> ExperimentSpec:
    counts = (30, 40, 50, 60, 70, 80, 90, 100) if full else (10, 20, 30, 40)
    return ExperimentSpec(
        generator="random",
        agent_counts=counts,
        seeds=tuple(range(seeds)),
    )


def desk_grid_8(width: int = 30) -> GridSpec:
    return GridSpec(width, width, 20.0, 20.0, "eight")


def table1_rows(
    seeds: tuple[int, ...] = tuple(range(10)),
    grid: GridSpec | None = None,
    cost_model: CostModel | None = None,
) -> tuple[list[RunRecord], list[tuple[str, dict[str, float]]]]:
    """Mean wall clock per algorithm for the four superconflict families."""
    grid = grid or desk_grid_8()
    cost_model = cost_model or CostModel()
    center = Position(grid.world_width / 2, grid.world_height / 2)
    families = [
        ("single-superconflict", lambda seed: gen_superconflict(center, 2.0, 8, grid, seed=seed)),
        ("four-homogeneous", lambda seed: gen_four_homogeneous(grid, seed=seed)),
        ("four-heterogeneous", lambda seed: gen_four_heterogeneous(grid, seed=seed)),
        ("spiral", lambda seed: gen_spiral(grid, seed=seed)),
    ]
    records: list[RunRecord] = []
    table: list[tuple[str, dict[str, float]]] = []
    for label, make in families:
        sums = {a: 0.0 for a in ALL_ALGORITHMS}
        for seed in seeds:
            scenario = make(seed)
            ideal = des.ideal_solution(scenario)
            for algorithm in ALL_ALGORITHMS:
                report = run_algorithm(algorithm, scenario, cost_model, seed=seed, ideal=ideal)
                records.append(RunRecord(scenario.n_agents, seed, algorithm, report))
                sums[algorithm] += report.wall_clock
        table.append((label, {a: sums[a] / len(seeds) for a in ALL_ALGORITHMS}))
    return records, table


def table1_csv(table: list[tuple[str, dict[str, float]]]) -> str:
    lines = ["scenario," + ",".join(ALL_ALGORITHMS)]
    for label, means in table:
        lines.append(label + "," + ",".join(repr(means[a]) for a in ALL_ALGORITHMS))
    return "\n".join(lines) + "\n"
