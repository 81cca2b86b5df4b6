"""Sweep command implementation."""

import itertools
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from ..config import Defaults, ScenarioConfig, load_scenario
from ..errors import ConfigError, FactorizationError
from ..pipeline import run_scenario
from ..storage import ArtifactStore
from ..utils import colorize, print_json, GREEN, RED, YELLOW


def expand_sweep(sweep: dict[str, list]) -> list[dict]:
    """Cartesian product of the sweep table, in key order."""
    keys = list(sweep)
    return [dict(zip(keys, values)) for values in itertools.product(*(sweep[key] for key in keys))]


def run_point(index: int, overrides: dict, config: ScenarioConfig, out_dir: Path) -> dict:
    """Run one sweep point and write its artifacts; factorization errors are reported, not raised."""
    summary = {"index": index, "overrides": overrides, "out_dir": str(out_dir)}
    try:
        result = run_scenario(config)
    except FactorizationError as e:
        return {**summary, "passed": False, "branch": None, "error": str(e)}
    store = ArtifactStore(out_dir)
    store.write_trajectory(result.trajectory)
    store.write_factorization(result.record)
    store.write_propagator(result.series)
    store.write_report(result.to_report())
    return {**summary, "passed": result.passed, "branch": result.branch, "error": None}


def sweep_command(args) -> int:
    """Run every point of the scenario's [sweep] table, one output directory per point."""
    config = load_scenario(args.config, args.preset, Defaults.load())
    if not config.sweep:
        raise ConfigError(f"Scenario {config.name} has no [sweep] table")
    base_out = config.resolve_out_dir(args.out)

    jobs = []
    for index, overrides in enumerate(expand_sweep(config.sweep)):
        point = config.with_overrides({**overrides, "name": f"{config.name}-{index:03d}"})
        jobs.append((index, overrides, point, base_out / f"point-{index:03d}"))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as executor:
            summaries = list(executor.map(run_point, *zip(*jobs)))
    else:
        summaries = [run_point(*job) for job in jobs]

    passed = all(summary["passed"] for summary in summaries)
    ArtifactStore(base_out).write_json("sweep.json", {"name": config.name, "passed": passed, "points": summaries})

    if args.json:
        print_json({"name": config.name, "out_dir": str(base_out), "passed": passed, "points": summaries})
    elif not args.quiet:
        for summary in summaries:
            if summary["error"]:
                mark = colorize("!", YELLOW)
                detail = summary["error"]
            else:
                mark = colorize("✓", GREEN) if summary["passed"] else colorize("✗", RED)
                detail = summary["branch"]
            print(f"  {mark} point-{summary['index']:03d} {summary['overrides']} {detail}")
        ok = sum(summary["passed"] for summary in summaries)
        print(colorize(f"{ok}/{len(summaries)} point(s) passed; artifacts in {base_out}", GREEN if passed else RED))
    return 0 if passed else 1
