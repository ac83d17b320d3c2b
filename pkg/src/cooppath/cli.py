"""Command line entry points.

Exit codes for solve: 0 on a complete solution, 2 when some agent ends with
a failed path, 1 on tool errors (bad input, unknown algorithm, internal
failures).
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import des, harness
from .des import CostModel
from .grid import GridSpec, Position, build_grid
from .planner import PlanningQuery, best_path
from .scenarios import (
    Scenario,
    gen_corridor,
    gen_four_heterogeneous,
    gen_four_homogeneous,
    gen_random,
    gen_spiral,
    gen_superconflict,
)
from .trajectory import SpaceTimeTrajectory


def _cost_model_from(args) -> CostModel:
    return CostModel(
        mode=args.cost_model,
        t_expand=args.t_expand,
        t_handler=args.t_handler,
    )


def _load_scenario(path: str) -> Scenario:
    return Scenario.from_json(Path(path).read_text())


def _grid_from(args) -> GridSpec:
    return GridSpec(args.grid_cells, args.grid_cells, 20.0, 20.0, args.connectivity)


def _cmd_gen(args) -> int:
    if args.family == "random":
        scenario = gen_random(
            _grid_from(args) if args.grid_cells else None,
            n_agents=args.agents,
            seed=args.seed,
        )
    elif args.family == "superconflict":
        grid = _grid_from(args) if args.grid_cells else GridSpec(60, 60, 20.0, 20.0, "eight")
        center = Position(grid.world_width / 2, grid.world_height / 2)
        scenario = gen_superconflict(center, args.radius, args.agents, grid, seed=args.seed)
    elif args.family == "four-homogeneous":
        grid = _grid_from(args) if args.grid_cells else None
        scenario = gen_four_homogeneous(grid, seed=args.seed)
    elif args.family == "four-heterogeneous":
        grid = _grid_from(args) if args.grid_cells else None
        scenario = gen_four_heterogeneous(grid, seed=args.seed)
    elif args.family == "spiral":
        grid = _grid_from(args) if args.grid_cells else None
        scenario = gen_spiral(grid, seed=args.seed)
    elif args.family == "corridor":
        scenario = gen_corridor(args.order, args.corridor_width)
    else:
        raise ValueError(f"unknown family {args.family!r}")
    text = scenario.to_json()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_solve(args) -> int:
    scenario = _load_scenario(args.scenario)
    report, code = harness.solve_to_dir(
        scenario,
        args.algorithm,
        args.out,
        cost_model=_cost_model_from(args),
        seed=args.seed,
        max_events=args.max_events,
    )
    print(
        f"{args.algorithm}: wall={report.wall_clock!r}s messages={report.messages} "
        f"failed={report.failed}"
    )
    return code


def _cmd_solve_single(args) -> int:
    scenario = _load_scenario(args.scenario)
    graph = build_grid(scenario.grid)
    avoids: list[SpaceTimeTrajectory] = []
    if args.avoids:
        data = json.loads(Path(args.avoids).read_text())
        for entry in data["agents"]:
            if entry["trajectory"] is not None and entry["priority"] != args.priority:
                avoids.append(SpaceTimeTrajectory.from_json_dict(entry["trajectory"]))
    start, dest = scenario.agents[args.priority - 1]
    query = PlanningQuery(
        graph,
        start,
        dest,
        avoids=tuple(avoids),
        v_max=scenario.v_max,
        wait_duration=scenario.wait_duration,
        separation=scenario.separation,
    )
    result = best_path(query)
    payload = {
        "schema_version": des.SCHEMA_VERSION,
        "priority": args.priority,
        "expansions": result.expansions,
        "failed": result.failed,
        "trajectory": result.trajectory.to_json_dict() if result.trajectory else None,
    }
    text = json.dumps(payload, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if result.trajectory is not None else 2


def _cmd_experiment(args) -> int:
    spec_data = json.loads(Path(args.spec).read_text())
    spec = harness.ExperimentSpec(
        generator=spec_data["generator"],
        agent_counts=tuple(spec_data["agent_counts"]),
        seeds=tuple(spec_data["seeds"]),
        algorithms=tuple(spec_data.get("algorithms", harness.ALL_ALGORITHMS)),
        cost_model=CostModel(**spec_data.get("cost_model", {})),
    )
    rows = harness.run_experiment(spec, args.out)
    print(f"wrote {len(rows)} aggregate rows to {args.out}/aggregate.csv")
    return 0


def _cmd_random_sweep(args) -> int:
    spec = harness.random_sweep_spec(full=args.full, seeds=args.repetitions)
    rows = harness.run_experiment(spec, args.out)
    print(f"wrote {len(rows)} aggregate rows to {args.out}/aggregate.csv")
    return 0


def _cmd_table1(args) -> int:
    records, table = harness.table1_rows(seeds=tuple(range(args.repetitions)))
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "table1.csv").write_text(harness.table1_csv(table))
    for label, means in table:
        pretty = " ".join(f"{a}={means[a]:.4f}s" for a in harness.ALL_ALGORITHMS)
        print(f"{label}: {pretty}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cooppath", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a scenario file")
    p_gen.add_argument("family", choices=[
        "random", "superconflict", "four-homogeneous", "four-heterogeneous", "spiral", "corridor",
    ])
    p_gen.add_argument("--agents", type=int, default=8)
    p_gen.add_argument("--seed", type=int, default=None)
    p_gen.add_argument("--radius", type=float, default=2.0)
    p_gen.add_argument("--grid-cells", type=int, default=0)
    p_gen.add_argument("--connectivity", choices=["four", "eight"], default="eight")
    p_gen.add_argument("--order", choices=["agent1_first", "agent2_first"], default="agent1_first")
    p_gen.add_argument("--corridor-width", choices=["narrow", "wide"], default="narrow")
    p_gen.add_argument("--out", default=None)
    p_gen.set_defaults(func=_cmd_gen)

    def add_run_flags(p):
        p.add_argument("--cost-model", choices=list(des.COST_MODES), default="deterministic")
        p.add_argument("--t-expand", type=float, default=1e-5)
        p.add_argument("--t-handler", type=float, default=1e-6)
        p.add_argument("--max-events", type=int, default=1_000_000)
        p.add_argument("--seed", type=int, default=None)

    p_solve = sub.add_parser("solve", help="run one algorithm on a scenario file")
    p_solve.add_argument("--scenario", required=True)
    p_solve.add_argument("--algorithm", choices=list(harness.ALL_ALGORITHMS), required=True)
    p_solve.add_argument("--out", required=True)
    add_run_flags(p_solve)
    p_solve.set_defaults(func=_cmd_solve)

    p_single = sub.add_parser("solve-single", help="plan one agent's best response")
    p_single.add_argument("--scenario", required=True)
    p_single.add_argument("--priority", type=int, required=True)
    p_single.add_argument("--avoids", default=None, help="solution.json with trajectories to avoid")
    p_single.add_argument("--out", default=None)
    p_single.set_defaults(func=_cmd_solve_single)

    p_exp = sub.add_parser("experiment", help="run an experiment spec file")
    p_exp.add_argument("--spec", required=True)
    p_exp.add_argument("--out", required=True)
    p_exp.set_defaults(func=_cmd_experiment)

    p_sweep = sub.add_parser("random-sweep", help="random-scenario sweep")
    p_sweep.add_argument("--out", required=True)
    p_sweep.add_argument("--full", action="store_true", help="paper-scale 30..100 agents")
    p_sweep.add_argument("--repetitions", type=int, default=10)
    p_sweep.set_defaults(func=_cmd_random_sweep)

    p_t1 = sub.add_parser("table1", help="superconflict family wall-clock table")
    p_t1.add_argument("--out", required=True)
    p_t1.add_argument("--repetitions", type=int, default=10)
    p_t1.set_defaults(func=_cmd_table1)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; 2 is reserved for incomplete
        # solutions, so usage problems report as tool errors
        return 0 if exc.code in (0, None) else harness.EXIT_ERROR
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return harness.EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
