"""Version command for lieprop."""

import json

from lieprop import __version__


def show_version(args) -> int:
    """Display the current version of lieprop."""
    if args.json:
        print(json.dumps({"version": __version__}))
    else:
        print(f"lieprop {__version__}")
    return 0
