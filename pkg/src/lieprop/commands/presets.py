"""Presets command implementation."""

from ..presets import PRESETS
from ..utils import colorize, dim, print_json, BRIGHT_BLUE


def list_presets(args) -> int:
    """List the named scenarios accepted by --preset."""
    if args.json:
        print_json([
            {"name": name, "algebra": data["algebra"], "description": data["description"]}
            for name, data in PRESETS.items()
        ])
        return 0
    width = max(len(name) for name in PRESETS)
    for name, data in PRESETS.items():
        print(f"{colorize(f'{name:<{width}}', BRIGHT_BLUE)} {dim('[' + data['algebra'] + ']')} {data['description']}")
    return 0
