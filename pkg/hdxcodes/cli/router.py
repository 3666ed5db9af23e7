"""
Command Router

Registry of subcommand handlers and the argparse front-end that turns argv into a
validated RunConfig. Handlers register with the `command` decorator.
"""

import argparse
import json
import logging
import sys
from dataclasses import dataclass
from typing import Callable, Dict, List, Sequence

from pydantic import ValidationError

from hdxcodes.models.schemas import Report, RunConfig
from hdxcodes.services.algebra import BudgetExceededError
from hdxcodes.services.verification import VerificationError
from hdxcodes.storage.repository import StoreError

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3

Handler = Callable[[RunConfig], Report]


class UsageError(Exception):
    """Custom exception for invalid command-line input."""
    pass


@dataclass
class CommandSpec:
    name: str
    help: str
    handler: Handler


def _int_list(text: str) -> List[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from e


def _degrees(text: str) -> List[int]:
    values = _int_list(text)
    if len(values) == 1:
        return values * 3
    if len(values) != 3:
        raise argparse.ArgumentTypeError(f"--d takes one value or a triple, got {text!r}")
    return values


def _phi(text: str) -> object:
    return "auto" if text.strip().lower() == "auto" else _int_list(text)


class CommandRouter:
    """Maps subcommand names to handlers and runs them with the exit-code contract."""

    def __init__(self, name: str):
        self.name = name
        self.commands: Dict[str, CommandSpec] = {}

    def command(self, name: str, help: str = "") -> Callable[[Handler], Handler]:
        """Register a handler for `name`."""

        def decorator(func: Handler) -> Handler:
            if name in self.commands:
                raise ValueError(f"Command {name!r} registered twice")
            self.commands[name] = CommandSpec(name, help or (func.__doc__ or "").strip(), func)
            return func

        return decorator

    def build_parser(self) -> argparse.ArgumentParser:
        parser = argparse.ArgumentParser(
            prog=self.name,
            description="Coset-complex codes: build instances, run checks and experiments.",
        )
        sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
        for spec in self.commands.values():
            p = sub.add_parser(spec.name, help=spec.help.splitlines()[0] if spec.help else None)
            p.add_argument("--q", type=int, default=3, help="Field size (prime)")
            p.add_argument("--n", type=int, default=1, help="Degree of the modulus phi")
            p.add_argument("--phi", type=_phi, default="auto",
                           help='Modulus coefficients low-to-high, or "auto"')
            p.add_argument("--d", type=_degrees, default=[1, 1, 1], help="Degrees d1,d2,d3")
            p.add_argument("--seed", type=int, default=None)
            p.add_argument("--trials", type=int, default=10)
            p.add_argument("--corrupt", type=int, default=1)
            p.add_argument("--budget-group", type=int, default=None)
            p.add_argument("--budget-rank", type=int, default=None)
            p.add_argument("--budget-enum", type=int, default=None)
            p.add_argument("--in", dest="inputs", action="append", default=[],
                           help="Input file (repeatable for report)")
            p.add_argument("--out", default=None, help="Output path")
            p.add_argument("--mode", choices=("restrict", "nearest"), default="nearest")
            p.add_argument("--p", type=int, default=None, help="Prime for local-code commands")
            p.add_argument("--dmax", type=int, default=None)
        return parser

    def parse(self, argv: Sequence[str]) -> RunConfig:
        """
        Parse and validate argv.

        Raises:
            UsageError: On unknown flags or an invalid configuration
        """
        parser = self.build_parser()
        try:
            args = parser.parse_args(list(argv))
        except SystemExit as e:
            raise UsageError(f"invalid arguments (exit {e.code})") from e
        try:
            return RunConfig(
                command=args.command,
                q=args.q,
                n=args.n,
                phi=args.phi,
                degrees=tuple(args.d),
                seed=args.seed,
                trials=args.trials,
                corrupt=args.corrupt,
                budget_group=args.budget_group,
                budget_rank=args.budget_rank,
                budget_enum=args.budget_enum,
                in_path=args.inputs[0] if args.inputs else None,
                out_path=args.out,
                mode=args.mode,
                p=args.p,
                dmax=args.dmax,
                inputs=args.inputs,
            )
        except ValidationError as e:
            parser.print_usage(sys.stderr)
            print(f"{self.name}: error: {e}", file=sys.stderr)
            raise UsageError(str(e)) from e

    def run(self, argv: Sequence[str], stdout=None) -> int:  # type: ignore[no-untyped-def]
        """Run one command; returns 0 ok, 1 failed check, 2 usage, 3 budget."""
        out = stdout or sys.stdout
        try:
            config = self.parse(argv)
        except UsageError:
            return EXIT_USAGE
        spec = self.commands[config.command]
        logger.info(f"Running '{config.command}'")
        try:
            report = spec.handler(config)
        except BudgetExceededError as e:
            logger.warning(f"Budget exceeded in '{config.command}': {e}")
            payload = {"error": "budget_exceeded", "message": str(e), "size_report": e.size_report}
            print(json.dumps(payload, indent=2, sort_keys=True, default=str), file=out)
            return EXIT_BUDGET
        except (UsageError, StoreError, VerificationError) as e:
            logger.error(f"Invalid input for '{config.command}': {e}")
            return EXIT_USAGE
        print(report.full_dump(), file=out)
        code = report.exit_code()
        for record in report.failed():
            logger.error(f"Check failed: {record.name} ({record.anchor})")
        return code
