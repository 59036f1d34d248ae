"""
Base class for subcommands.

Subcommands are the actions the command line exposes.
Each one has a name, a description, its own flags, and runs against a Display.
"""

from __future__ import annotations

import argparse
from abc import ABC, abstractmethod

from display import Display


class Command(ABC):
    """
    Abstract base class for all subcommands.

    To create a new subcommand:
    1. Inherit from this class
    2. Set the 'name' and 'description' class attributes
    3. Implement add_arguments() to declare the flags
    4. Implement execute() to perform the action
    """

    name: str  # Subcommand as typed on the command line (e.g., "simulate")
    description: str  # One-line help text

    @abstractmethod
    def add_arguments(self, parser: argparse.ArgumentParser) -> None:
        """
        Declare this subcommand's flags on its subparser.

        The common flags (--config, --set, --verbose, --quiet) are already present.
        """
        pass

    @abstractmethod
    def execute(self, args: argparse.Namespace, display: Display) -> int:
        """
        Run the subcommand.

        Args:
            args: Parsed command line
            display: Where all user-facing output goes

        Returns:
            The process exit code (0 on success)

        Raises:
            GNCDEError: main.py maps these to exit codes
        """
        pass
