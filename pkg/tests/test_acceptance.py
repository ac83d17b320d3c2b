"""Acceptance criteria, one test per criterion (5 is split per family).

Run with -s to see one summary line per criterion. The suite-level fixtures
in conftest.py execute every benchmark family once and share the reports.
"""

import itertools
import json

import numpy as np
import pytest

from cooppath import des
from cooppath.grid import GridSpec, Position, Vertex, build_grid
from cooppath.harness import ExperimentSpec, run_experiment
from cooppath.planner import PlanningQuery, best_path
from cooppath.scenarios import gen_superconflict
from cooppath.des import SyntheticPattern, run_pattern
from cooppath.threaded import run_threaded
from cooppath.trajectory import min_separation

from spacetime_oracle import brute_force_best_time, random_walk_obstacle

SEPARATION = 0.8
ANALYTIC_SLACK = 1e-9
SAMPLED_SLACK = 1e-6


def _sampled_pair_min(a, b, dt=0.05, pad=10.0):
    t_max = max(a.dest_time, b.dest_time) + pad
    ts = np.arange(0.0, t_max + dt, dt)
    ax, ay = a.sample(ts)
    bx, by = b.sample(ts)
    return float(np.min(np.hypot(ax - bx, ay - by)))


def _solution_separations(solution):
    worst_analytic = np.inf
    worst_sampled = np.inf
    trajs = solution.trajectories()
    for (_, a), (_, b) in itertools.combinations(trajs, 2):
        worst_analytic = min(worst_analytic, min_separation(a, b))
        worst_sampled = min(worst_sampled, _sampled_pair_min(a, b))
    return worst_analytic, worst_sampled


def test_c01_collision_freedom(all_runs):
    successful = 0
    for run in all_runs:
        if run.report.failed:
            continue
        successful += 1
        analytic, sampled = _solution_separations(run.report.solution)
        assert analytic >= SEPARATION - ANALYTIC_SLACK, (run.label, run.algorithm, analytic)
        assert sampled >= SEPARATION - SAMPLED_SLACK, (run.label, run.algorithm, sampled)
    assert len(all_runs) >= 100
    print(f"\n[criterion 1] PASS: {successful} successful solutions separation-clean "
          f"({len(all_runs)} runs checked)")


def test_c02_planner_oracle_equivalence():
    grid = build_grid(GridSpec(5, 5, 4.0, 4.0, "four"))
    rng = np.random.default_rng(20240817)
    agree = 0
    for _ in range(50):
        avoids = tuple(random_walk_obstacle(grid, rng) for _ in range(int(rng.integers(0, 3))))
        start = Vertex(int(rng.integers(5)), int(rng.integers(5)))
        dest = Vertex(int(rng.integers(5)), int(rng.integers(5)))
        result = best_path(
            PlanningQuery(grid, start, dest, avoids=avoids, horizon=30.0)
        )
        expected = brute_force_best_time(grid, start, dest, avoids, horizon=30.0)
        if expected is None:
            assert result.trajectory is None, (start, dest)
        else:
            assert result.trajectory is not None, (start, dest)
            assert round(result.trajectory.dest_time * 2) == round(expected * 2)
        agree += 1
    print(f"\n[criterion 2] PASS: planner matches the brute-force optimum on {agree}/50 instances")


def test_c03_priority_one_optimality_and_sdpp_bound(all_runs):
    checked = 0
    for run in all_runs:
        solution = run.report.solution
        assert solution is not None
        first = solution[1]
        ideal_first = run.ideal[1]
        if first is not None and ideal_first is not None:
            assert first.dest_time == ideal_first.dest_time, (run.label, run.algorithm)
        if run.algorithm != "ca" and run.n_agents > 1:
            from_one = [t for t in run.report.trace if t.sender == 1]
            assert len(from_one) == run.n_agents - 1, (run.label, run.algorithm)
            assert len({t.sim_time for t in from_one}) == 1
        if run.algorithm == "sdpp":
            assert run.report.iterations <= run.n_agents, (run.label, run.seed)
        checked += 1
    print(f"\n[criterion 3] PASS: priority-1 optimal, single broadcast, SDPP bound on {checked} runs")


def test_c04_schedule_pattern_reproduction():
    uniform = {1: 1.0, 2: 1.0, 3: 1.0}
    non_conflicting = SyntheticPattern(uniform, ())
    for algorithm in ("sdpp", "adpp", "iadpp"):
        assert run_pattern(algorithm, non_conflicting).wall_clock == 1.0
    coupled = SyntheticPattern(uniform, (frozenset({1, 2, 3}),))
    assert run_pattern("adpp", coupled).wall_clock == 3.0
    two_clusters = SyntheticPattern(
        {1: 2.0, 2: 2.0, 3: 1.0, 4: 1.0, 5: 1.0},
        (frozenset({1, 2}), frozenset({3, 4, 5})),
    )
    assert run_pattern("sdpp", two_clusters).wall_clock == 5.0
    assert run_pattern("adpp", two_clusters).wall_clock == 4.0
    interrupt_gain = SyntheticPattern({1: 1.5, 2: 2.5}, (frozenset({1, 2}),))
    walls = {a: run_pattern(a, interrupt_gain).wall_clock for a in ("sdpp", "adpp", "iadpp")}
    assert walls == {"sdpp": 5.0, "adpp": 5.0, "iadpp": 4.0}
    print("\n[criterion 4] PASS: schedule patterns 1 / 3 / 5-vs-4 / 5-5-4 reproduced exactly")


def _family_means(runs, family):
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for run in runs:
        if run.family != family:
            continue
        sums[run.algorithm] = sums.get(run.algorithm, 0.0) + run.report.wall_clock
        counts[run.algorithm] = counts.get(run.algorithm, 0) + 1
    return {a: sums[a] / counts[a] for a in sums}


def test_c05a_four_homogeneous_trends(superconflict_runs):
    single = _family_means(superconflict_runs, "single")
    homog = _family_means(superconflict_runs, "four_homogeneous")
    ca_ratio = homog["ca"] / single["ca"]
    adpp_ratio = homog["adpp"] / single["adpp"]
    iadpp_ratio = homog["iadpp"] / single["iadpp"]
    assert ca_ratio >= 3.0, ca_ratio
    assert adpp_ratio <= 1.5, adpp_ratio
    assert iadpp_ratio <= 1.5, iadpp_ratio
    print(f"\n[criterion 5a] PASS: CA x{ca_ratio:.2f} (>=3), "
          f"ADPP x{adpp_ratio:.2f}, IADPP x{iadpp_ratio:.2f} (<=1.5)")


def test_c05b_heterogeneous_trends(superconflict_runs):
    heter = _family_means(superconflict_runs, "four_heterogeneous")
    adpp = heter["adpp"] / heter["sdpp"]
    iadpp = heter["iadpp"] / heter["sdpp"]
    assert adpp < 1.0 and adpp <= 0.7, adpp
    assert iadpp < 1.0 and iadpp <= 0.7, iadpp
    print(f"\n[criterion 5b] PASS: heterogeneous ADPP/SDPP={adpp:.2f}, "
          f"IADPP/SDPP={iadpp:.2f} (<=0.7)")


def test_c05c_spiral_trend(superconflict_runs):
    spiral = _family_means(superconflict_runs, "spiral")
    ratio = spiral["iadpp"] / spiral["adpp"]
    print(f"\n[criterion 5c] spiral IADPP/ADPP = {ratio:.2f} (required <= 0.5)")
    assert spiral["iadpp"] < spiral["adpp"], ratio
    assert ratio <= 0.5, (
        f"spiral IADPP/ADPP = {ratio:.2f} > 0.5: with search-effort-proportional "
        "plan durations the stale ADPP completions usually stay consistent, so "
        "ADPP loses no full replans here; see the decisions ledger"
    )


def test_c06_adpp_never_slower_than_sdpp(all_runs):
    paired: dict[tuple, dict[str, float]] = {}
    for run in all_runs:
        if run.algorithm in ("sdpp", "adpp"):
            paired.setdefault((run.family, run.label, run.seed), {})[run.algorithm] = (
                run.report.wall_clock
            )
    violations = [
        (key, walls["adpp"] / walls["sdpp"])
        for key, walls in sorted(paired.items())
        if walls["adpp"] > walls["sdpp"] + 1e-12
    ]
    print(f"\n[criterion 6] {len(paired) - len(violations)}/{len(paired)} runs have "
          f"ADPP <= SDPP; violations: {[(k[0], k[1], round(r, 2)) for k, r in violations[:6]]}")
    assert not violations, (
        f"ADPP exceeded SDPP on {len(violations)}/{len(paired)} runs (worst "
        f"x{max(r for _, r in violations):.2f}): the premise that asynchrony only "
        "removes waiting fails once plan durations depend on the view content; "
        "see the decisions ledger"
    )


def test_c07_communication_trends(sweep_runs):
    msgs = {"adpp": [], "iadpp": []}
    for run in sweep_runs:
        if run.algorithm == "ca":
            assert run.report.messages == 2 * run.n_agents
        elif run.algorithm in msgs:
            msgs[run.algorithm].append(run.report.messages)
    mean_adpp = sum(msgs["adpp"]) / len(msgs["adpp"])
    mean_iadpp = sum(msgs["iadpp"]) / len(msgs["iadpp"])
    assert mean_iadpp <= mean_adpp, (mean_iadpp, mean_adpp)
    print(f"\n[criterion 7] PASS: mean messages IADPP {mean_iadpp:.1f} <= ADPP {mean_adpp:.1f}; CA = 2n")


def test_c08_cost_trends(sweep_runs):
    by_instance: dict[tuple, dict[str, des.RunReport]] = {}
    for run in sweep_runs:
        by_instance.setdefault((run.n_agents, run.seed), {})[run.algorithm] = run.report
    solved = [
        reports for reports in by_instance.values()
        if all(not reports[a].failed for a in ("ca", "sdpp", "adpp", "iadpp"))
    ]
    assert solved
    means = {}
    for algorithm in ("ca", "sdpp", "adpp", "iadpp"):
        costs = [reports[algorithm].cost for reports in solved]
        assert all(c >= 0.0 for c in costs), algorithm
        means[algorithm] = sum(costs) / len(costs)
    for algorithm in ("sdpp", "adpp", "iadpp"):
        assert means[algorithm] >= means["ca"] - 1e-9, (algorithm, means)
        assert means[algorithm] <= means["ca"] + 0.15, (algorithm, means)
    pretty = " ".join(f"{a}={means[a]:.4f}" for a in means)
    print(f"\n[criterion 8] PASS: mean costs {pretty} (decentralized within +0.15 of CA)")


def test_c09_corridor_reproduction(corridor_runs):
    outcomes = {}
    for run in corridor_runs:
        outcomes.setdefault(run.label, {})[run.algorithm] = run.report.failed
    for algorithm in ("ca", "sdpp", "adpp", "iadpp"):
        assert outcomes["corridor-wide-agent1_first"][algorithm] is False
        assert outcomes["corridor-wide-agent2_first"][algorithm] is True
        assert outcomes["corridor-narrow-agent1_first"][algorithm] is True
        assert outcomes["corridor-narrow-agent2_first"][algorithm] is True
    print("\n[criterion 9] PASS: wide corridor is priority-order dependent; narrow always fails")


def test_c10_experiment_determinism(tmp_path):
    spec = ExperimentSpec(
        generator="random",
        agent_counts=(10,),
        seeds=(0, 1, 2),
    )
    run_experiment(spec, tmp_path / "a")
    run_experiment(spec, tmp_path / "b")
    a_csv = (tmp_path / "a" / "aggregate.csv").read_bytes()
    b_csv = (tmp_path / "b" / "aggregate.csv").read_bytes()
    assert a_csv == b_csv
    a_traces = sorted((tmp_path / "a").glob("trace-*.jsonl"))
    assert a_traces
    for path in a_traces:
        assert path.read_bytes() == (tmp_path / "b" / path.name).read_bytes()
    print(f"\n[criterion 10] PASS: {len(a_traces)} traces and the aggregate CSV byte-identical on rerun")


def test_c11_termination_detection_and_threads(all_runs):
    for run in all_runs:
        if run.algorithm == "ca":
            continue
        report = run.report
        # the simulator errors out if any substantive event survives the
        # final mark of the last agent; re-assert the visible consequences
        if report.schedule:
            assert max(e.end for e in report.schedule) <= report.wall_clock + 1e-12
        if report.trace:
            assert max(t.sim_time for t in report.trace) <= report.wall_clock + 1e-12

    grid = GridSpec(30, 30, 20.0, 20.0, "eight")
    scenario = gen_superconflict(Position(10.0, 10.0), 2.0, 8, grid, seed=0)
    ideal = des.ideal_solution(scenario)
    repeats = ["adpp"] * 8 + ["iadpp"] * 6 + ["sdpp"] * 6
    for algorithm in repeats:
        report = run_threaded(algorithm, scenario, watchdog_seconds=120.0)
        assert not report.failed, algorithm
        analytic, _ = _solution_separations(report.solution)
        assert analytic >= SEPARATION - ANALYTIC_SLACK
        assert report.solution[1].dest_time == ideal[1].dest_time
        from_one = [t for t in report.trace if t.sender == 1]
        assert len(from_one) == scenario.n_agents - 1
    print(f"\n[criterion 11] PASS: marking matches quiescence on every run; "
          f"{len(repeats)} threaded superconflict repeats clean")


def test_c12_plots_pointer():
    pytest.skip(
        "criterion 12 is the secondary component; run `npm test` in frontend/ "
        "(see frontend/README.md), which renders the four sweep figures and "
        "the two-cluster schedule diagrams from checked-in harness artifacts"
    )
