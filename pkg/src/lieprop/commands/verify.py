"""Verify command implementation."""

from ..config import Defaults, ScenarioConfig, load_scenario
from ..pipeline import run_scenario
from ..presets import preset_names
from ..utils import colorize, format_checks, print_json, GREEN, RED


def verify_command(args) -> int:
    """Run the checks of one scenario, or of every preset, without writing files."""
    defaults = Defaults.load()
    if args.config is None and args.preset is None:
        configs = [ScenarioConfig.from_dict({"preset": name}, defaults=defaults) for name in preset_names()]
    else:
        configs = [load_scenario(args.config, args.preset, defaults)]

    results = [run_scenario(config) for config in configs]
    passed = all(result.passed for result in results)

    if args.json:
        print_json({
            "passed": passed,
            "scenarios": [
                {
                    "name": result.config.name,
                    "branch": result.branch,
                    "passed": result.passed,
                    "checks": [check.to_dict() for check in result.checks],
                }
                for result in results
            ],
        })
    elif not args.quiet:
        for result in results:
            format_checks(f"{result.config.name} ({result.config.algebra.value}, {result.branch})", result.checks)
        total = len(results)
        ok = sum(result.passed for result in results)
        color = GREEN if passed else RED
        print(colorize(f"{ok}/{total} scenario(s) passed", color))
    return 0 if passed else 1
