"""Run command implementation."""

from ..config import Defaults, load_scenario
from ..pipeline import run_scenario
from ..storage import ArtifactStore
from ..utils import colorize, format_checks, print_json, GREEN, RED


def run_command(args) -> int:
    """Run one scenario and write its trajectory, factorization, propagator and report.

    The report is written even when a tolerance check fails; the exit status
    is then 1.
    """
    config = load_scenario(args.config, args.preset, Defaults.load())
    out_dir = config.resolve_out_dir(args.out)
    result = run_scenario(config)

    store = ArtifactStore(out_dir)
    store.write_trajectory(result.trajectory)
    store.write_factorization(result.record)
    store.write_propagator(result.series)
    store.write_report(result.to_report())

    if args.json:
        print_json({
            "name": config.name,
            "out_dir": str(out_dir),
            "branch": result.branch,
            "passed": result.passed,
            "comparison": result.report.to_dict(),
        })
    elif not args.quiet:
        format_checks(f"{config.name} ({config.algebra.value}, {result.branch})", result.checks)
        if result.passed:
            print(colorize(f"Wrote artifacts to {out_dir}", GREEN))
        else:
            failed = ", ".join(check.name for check in result.failed_checks())
            print(colorize(f"Tolerance check(s) failed: {failed}; artifacts in {out_dir}", RED))
    return 0 if result.passed else 1
