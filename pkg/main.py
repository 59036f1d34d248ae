#!/usr/bin/env python3
"""
Informed Graph NCDE - Entry Point

Simulates advection on directed graphs and trains graph neural controlled
differential equations whose vector fields are informed by the topology.
Run with: python main.py <subcommand> [flags]

Example:
    python main.py grid --graph graphs/g4.json --preset desk --seeds 0,1,2
"""

from __future__ import annotations

import argparse
import difflib
import logging
import re
import sys

from rich.console import Console
from rich.logging import RichHandler

from commands import COMMANDS, Command
from display import Display
from errors import GNCDEError, UsageError

logger = logging.getLogger(__name__)

EPILOG = """
Examples:
    python main.py inspect    --graph graphs/g4.json
    python main.py simulate   --graph graphs/g4.json --series 200 --seed 42 --out data.bin
    python main.py train      --data data.bin --graph graphs/g4.json --inner identity --outer informed --out run/
    python main.py eval       --data data.bin --checkpoint run/checkpoint.bin
    python main.py grid       --graph graphs/g10.json --preset desk --seeds 0-4 --out grid/
"""


def _known_words(parser: argparse.ArgumentParser) -> list[str]:
    """Every option string and subcommand name reachable from `parser`."""
    words = []
    for action in parser._actions:
        words.extend(action.option_strings)
        if isinstance(action, argparse._SubParsersAction):
            for name, sub in action.choices.items():
                words.append(name)
                words.extend(_known_words(sub))
    return words


class ArgumentParser(argparse.ArgumentParser):
    """Raises UsageError instead of exiting, with a close-match suggestion."""

    def error(self, message: str):
        match = re.search(r"invalid choice: '([^']+)'|unrecognized arguments: (\S+)", message)
        if match:
            word = match.group(1) or match.group(2)
            close = difflib.get_close_matches(word, _known_words(self), n=1)
            if close:
                message += f"; did you mean '{close[0]}'?"
        raise UsageError(f"{message}\n\n{self.format_usage()}")


def build_parser(commands: list[Command] = COMMANDS) -> ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file with simulation/model/training sections")
    common.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE",
                        help="Override one config field (repeatable)")
    verbosity = common.add_mutually_exclusive_group()
    verbosity.add_argument("--verbose", "-v", action="store_true", help="Debug logging")
    verbosity.add_argument("--quiet", "-q", action="store_true", help="Warnings and errors only")

    parser = ArgumentParser(
        prog="main.py",
        description="Topology-informed graph neural CDEs on simulated advection",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=EPILOG,
    )
    subparsers = parser.add_subparsers(dest="command", metavar="subcommand")
    for command in commands:
        sub = subparsers.add_parser(command.name, help=command.description, description=command.description,
                                    parents=[common])
        command.add_arguments(sub)
        sub.set_defaults(handler=command)
    return parser


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
    root.addHandler(RichHandler(console=Console(stderr=True), show_path=False))
    root.setLevel(level)


def dispatch(argv: list[str], display: Display | None = None) -> int:
    """Run one command line and return its exit code."""
    display = display or Display()
    parser = build_parser()
    if not argv:
        display.console.print(parser.format_usage())
        return UsageError.exit_code

    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        display.show_error(str(e))
        return e.exit_code
    except SystemExit as e:  # --help
        return e.code if isinstance(e.code, int) else 0
    if args.command is None:
        display.console.print(parser.format_usage())
        return UsageError.exit_code

    configure_logging(args.verbose, args.quiet)
    try:
        return args.handler.execute(args, display)
    except GNCDEError as e:
        logger.debug("command failed", exc_info=True)
        display.show_error(str(e))
        return e.exit_code
    except KeyboardInterrupt:
        display.show_error("interrupted")
        return 130
    finally:
        display.hide_working()


def main():
    sys.exit(dispatch(sys.argv[1:]))


if __name__ == "__main__":
    main()
