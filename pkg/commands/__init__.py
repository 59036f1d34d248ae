from .base import Command
from .dataset import DatasetCommand
from .eval import EvalCommand
from .export_csv import ExportCsvCommand
from .grid import GridCommand
from .inspect import InspectCommand
from .simulate import SimulateCommand
from .train import TrainCommand

COMMANDS: list[Command] = [
    InspectCommand(),
    SimulateCommand(),
    DatasetCommand(),
    ExportCsvCommand(),
    TrainCommand(),
    EvalCommand(),
    GridCommand(),
]

__all__ = [
    "COMMANDS",
    "Command",
    "DatasetCommand",
    "EvalCommand",
    "ExportCsvCommand",
    "GridCommand",
    "InspectCommand",
    "SimulateCommand",
    "TrainCommand",
]
