"""Command-line entry point for the experiment harness.

Five subcommands: ``convergence``, ``radius-sweep``, ``vehicle-sweep``,
``pool-compare`` (sweep CSVs) and ``simulate`` (one full JSON report).
Failures print a machine-readable error record and exit nonzero.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import List, Optional

from .harness import (
    HarnessConfig,
    cmd_convergence,
    cmd_pool_compare,
    cmd_radius_sweep,
    cmd_simulate,
    cmd_vehicle_sweep,
    load_config,
)
from .types import MscetError

_COMMANDS = {
    "convergence": cmd_convergence,
    "radius-sweep": cmd_radius_sweep,
    "vehicle-sweep": cmd_vehicle_sweep,
    "pool-compare": cmd_pool_compare,
    "simulate": cmd_simulate,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mscet",
        description="Task-offloading experiments for cloud-edge-terminal "
        "vehicular networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in _COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0] if fn.__doc__ else None)
        p.add_argument("--config", type=str, default=None,
                       help="JSON config file (scenario/solver/experiment sections)")
        p.add_argument("--seed", type=int, default=None,
                       help="base seed (default 0)")
        p.add_argument("--out", type=str, default=None,
                       help="output path (default: stdout)")
        p.add_argument("--workers", type=int, default=None,
                       help="parallel worker processes (default 1)")
        p.add_argument("--seeds-per-point", type=int, default=None,
                       help="seeds averaged per sweep point (default 10)")
    return parser


def _load(args: argparse.Namespace) -> HarnessConfig:
    raw = None
    if args.config is not None:
        with open(args.config, "r", encoding="utf-8") as fh:
            raw = json.load(fh)
    return load_config(
        raw,
        seed=args.seed,
        workers=args.workers,
        seeds_per_point=args.seeds_per_point,
    )


def main(argv: Optional[List[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _load(args)
        output = _COMMANDS[args.command](config)
    except (MscetError, ValueError, TypeError, OSError, json.JSONDecodeError) as exc:
        record = {
            "error": {
                "command": args.command,
                "type": type(exc).__name__,
                "message": str(exc),
            }
        }
        print(json.dumps(record, sort_keys=True), file=sys.stderr)
        return 1
    if args.out is None:
        sys.stdout.write(output)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(output)
    return 0


if __name__ == "__main__":
    sys.exit(main())
