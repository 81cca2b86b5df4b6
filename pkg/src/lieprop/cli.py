"""Command-line interface for lieprop."""

import argparse
import logging
import sys

from .commands.init import init_config
from .commands.presets import list_presets
from .commands.run import run_command
from .commands.sweep import sweep_command
from .commands.verify import verify_command
from .commands.version import show_version
from .errors import ConfigError, FactorizationError
from .utils import print_error

# Exit statuses
EXIT_OK = 0
EXIT_FAILED = 1
EXIT_CONFIG = 2
EXIT_FACTORIZATION = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Exact SU(2) and SU(1,1) propagators from time-dependent invariants",
        prog="lieprop"
    )
    parser.add_argument("--version", action="store_true", help="Show version number")
    parser.add_argument("-j", "--json", action="store_true", help="Output as JSON")

    # Options shared by the scenario commands
    scenario = argparse.ArgumentParser(add_help=False)
    scenario.add_argument("-c", "--config", help="Scenario TOML file")
    scenario.add_argument("-p", "--preset", help="Named preset scenario (see 'lieprop presets')")
    scenario.add_argument("-o", "--out", help="Output directory (overrides $LIEPROP_OUT and the config)")
    scenario.add_argument("-q", "--quiet", action="store_true", help="Only print errors")
    scenario.add_argument("-v", "--verbose", action="store_true", help="Log debug messages")
    scenario.add_argument("-j", "--json", action="store_true", help="Output as JSON")

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    subparsers.add_parser("run", parents=[scenario],
                          help="Run a scenario and write CSV series and a JSON report")
    subparsers.add_parser("verify", parents=[scenario],
                          help="Check a scenario (or every preset) without writing files")
    sweep_parser = subparsers.add_parser("sweep", parents=[scenario],
                                         help="Run the cartesian product of the [sweep] table")
    sweep_parser.add_argument("--jobs", type=int, default=1, help="Worker processes (default: 1)")

    presets_parser = subparsers.add_parser("presets", help="List preset scenarios")
    presets_parser.add_argument("-j", "--json", action="store_true", help="Output as JSON")

    init_parser = subparsers.add_parser("init", help="Initialize .lieprop.toml project defaults")
    init_parser.add_argument("--force", action="store_true", help="Overwrite existing configuration file")
    init_parser.add_argument("-j", "--json", action="store_true", help="Output as JSON")

    version_parser = subparsers.add_parser("version", help="Show version number")
    version_parser.add_argument("-j", "--json", action="store_true", help="Output as JSON")
    return parser


COMMANDS = {
    "run": run_command,
    "verify": verify_command,
    "sweep": sweep_command,
    "presets": list_presets,
    "init": init_config,
    "version": show_version,
}


def main(argv=None):
    """Main CLI entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    # Handle --version flag
    if args.version:
        show_version(argparse.Namespace(json=args.json))
        sys.exit(EXIT_OK)

    if not args.command:
        parser.print_help()
        sys.exit(EXIT_FAILED)

    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    if getattr(args, "quiet", False):
        level = logging.ERROR
    elif getattr(args, "verbose", False):
        level = logging.DEBUG
    else:
        level = logging.WARNING
    logging.getLogger("lieprop").setLevel(level)

    try:
        code = COMMANDS[args.command](args)
    except ConfigError as e:
        print_error(str(e))
        code = EXIT_CONFIG
    except FactorizationError as e:
        print_error(str(e))
        code = EXIT_FACTORIZATION
    except Exception as e:
        print_error(str(e))
        code = EXIT_FAILED
    sys.exit(code)


if __name__ == "__main__":
    main()
