"""Command-line application for graphhyper."""
import logging
from typing import Optional, Sequence

from graphhyper.commands.analyze_commands import AnalyzeCommands
from graphhyper.commands.dataset_commands import DatasetCommands
from graphhyper.commands.train_commands import TrainCommands
from graphhyper.commands.workflow_commands import WorkflowCommands
from graphhyper.core.command_registry import CommandRegistry, CommandResult
from graphhyper.utils.config_manager import ConfigManager


class GraphHyperApp:
    """
    Main application object.

    Wires the configuration, the command registry and the command modules:
    - DatasetCommands: architecture and task datasets
    - AnalyzeCommands: counting, scaling and graph inspection
    - TrainCommands: hypernetwork training and fine-tuning
    - WorkflowCommands: prediction, transfer, diversity and recipes
    """

    def __init__(self, config: ConfigManager):
        """
        Initialize the application.

        Args:
            config: Configuration manager
        """
        self.logger = logging.getLogger("graphhyper.app")
        self.config = config

        self.command_registry = CommandRegistry(
            prog="graphhyper",
            description="Graph hypernetworks that predict transformer parameters"
        )
        self._init_command_modules()
        self._register_commands()
        self.logger.debug("GraphHyperApp initialized successfully")

    def _init_command_modules(self) -> None:
        """Initialize command modules."""
        self.dataset_commands = DatasetCommands(self.config)
        self.analyze_commands = AnalyzeCommands(self.config)
        self.train_commands = TrainCommands(self.config)
        self.workflow_commands = WorkflowCommands(self.config)

    def _register_commands(self) -> None:
        """Register all commands with the registry."""
        self.dataset_commands.register_commands(self.command_registry)
        self.analyze_commands.register_commands(self.command_registry)
        self.train_commands.register_commands(self.command_registry)
        self.workflow_commands.register_commands(self.command_registry)
        self.logger.debug(f"Registered {len(self.command_registry.command_names)} commands")

    def run(self, argv: Optional[Sequence[str]] = None) -> CommandResult:
        """
        Parse arguments and run the selected command.

        Args:
            argv: Command line without the program name

        Returns:
            The command's ``(success, result, error)``
        """
        return self.command_registry.run(argv)
