import sys
from dataclasses import dataclass
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from cooppath import des
from cooppath.grid import Position
from cooppath.harness import ALL_ALGORITHMS, desk_grid_8, run_algorithm
from cooppath.scenarios import (
    Scenario,
    gen_corridor,
    gen_four_heterogeneous,
    gen_four_homogeneous,
    gen_random,
    gen_spiral,
    gen_superconflict,
)
from cooppath.trajectory import SolutionSet


@dataclass
class SuiteRun:
    family: str
    label: str
    n_agents: int
    seed: int | None
    algorithm: str
    scenario: Scenario
    ideal: SolutionSet
    report: des.RunReport


def _run_block(family, scenarios):
    runs = []
    for scenario in scenarios:
        ideal = des.ideal_solution(scenario)
        for algorithm in ALL_ALGORITHMS:
            report = run_algorithm(algorithm, scenario, ideal=ideal)
            runs.append(
                SuiteRun(
                    family=family,
                    label=scenario.label,
                    n_agents=scenario.n_agents,
                    seed=scenario.seed,
                    algorithm=algorithm,
                    scenario=scenario,
                    ideal=ideal,
                    report=report,
                )
            )
    return runs


@pytest.fixture(scope="session")
def sweep_runs():
    """Random-scenario sweep: n in {10,20,30,40}, ten seeds, all algorithms."""
    scenarios = [
        gen_random(n_agents=n, seed=seed)
        for n in (10, 20, 30, 40)
        for seed in range(10)
    ]
    return _run_block("random", scenarios)


@pytest.fixture(scope="session")
def superconflict_runs():
    """Desk-scale superconflict families, ten jitter seeds each."""
    grid = desk_grid_8()
    center = Position(10.0, 10.0)
    runs = []
    runs += _run_block(
        "single", [gen_superconflict(center, 2.0, 8, grid, seed=s) for s in range(10)]
    )
    runs += _run_block(
        "four_homogeneous", [gen_four_homogeneous(grid, seed=s) for s in range(10)]
    )
    runs += _run_block(
        "four_heterogeneous", [gen_four_heterogeneous(grid, seed=s) for s in range(10)]
    )
    runs += _run_block("spiral", [gen_spiral(grid, seed=s) for s in range(10)])
    return runs


@pytest.fixture(scope="session")
def corridor_runs():
    scenarios = [
        gen_corridor(order, width)
        for width in ("narrow", "wide")
        for order in ("agent1_first", "agent2_first")
    ]
    return _run_block("corridor", scenarios)


@pytest.fixture(scope="session")
def all_runs(sweep_runs, superconflict_runs, corridor_runs):
    return sweep_runs + superconflict_runs + corridor_runs
