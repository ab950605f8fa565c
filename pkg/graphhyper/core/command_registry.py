"""Command registry system for graphhyper."""
import argparse
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

# Every command returns (success, result, error message)
CommandResult = Tuple[bool, Any, Optional[str]]
CommandCallback = Callable[[argparse.Namespace], CommandResult]
ArgumentConfigurer = Callable[[argparse.ArgumentParser], None]


@dataclass
class CommandInfo:
    """Information about a registered command."""
    name: str
    callback: CommandCallback
    description: str
    configure: Optional[ArgumentConfigurer] = None
    usage_examples: Optional[List[str]] = None
    help_text: Optional[str] = None


@dataclass
class CommandGroup:
    """A command with sub-commands (``analyze count``)."""
    name: str
    description: str
    commands: List[CommandInfo] = field(default_factory=list)


class CommandRegistry:
    """
    Registry for CLI commands.

    Provides a centralized way to register commands, builds the argparse
    parser from them and runs callbacks with consistent error handling.
    """

    def __init__(self, prog: str = "graphhyper", description: Optional[str] = None):
        """
        Initialize the command registry.

        Args:
            prog: Program name shown in usage
            description: Top-level help text
        """
        self.logger = logging.getLogger("graphhyper.command_registry")
        self.prog = prog
        self.description = description
        self._commands: Dict[str, CommandInfo] = {}
        self._command_groups: Dict[str, CommandGroup] = {}

    def register_command(
        self,
        name: str,
        callback: CommandCallback,
        description: str,
        configure: Optional[ArgumentConfigurer] = None,
        usage_examples: Optional[List[str]] = None,
        help_text: Optional[str] = None
    ) -> None:
        """
        Register a top-level command.

        Args:
            name: Command name
            callback: Handler taking the parsed arguments
            description: One-line description
            configure: Adds the command's arguments to its sub-parser
            usage_examples: Shown in ``--help``
            help_text: Additional help text
        """
        if name in self._commands or name in self._command_groups:
            raise ValueError(f"Command '{name}' is already registered")
        self._commands[name] = CommandInfo(name, callback, description, configure, usage_examples, help_text)
        self.logger.debug(f"Registered command: {name}")

    def register_command_group(self, name: str, description: str) -> CommandGroup:
        """
        Register a command group.

        Args:
            name: Group name
            description: Group description

        Returns:
            The group, to pass to ``register_group_command``
        """
        if name in self._commands or name in self._command_groups:
            raise ValueError(f"Command '{name}' is already registered")
        group = CommandGroup(name, description)
        self._command_groups[name] = group
        self.logger.debug(f"Registered command group: {name}")
        return group

    def register_group_command(
        self,
        group: CommandGroup,
        name: str,
        callback: CommandCallback,
        description: str,
        configure: Optional[ArgumentConfigurer] = None,
        usage_examples: Optional[List[str]] = None
    ) -> None:
        """
        Register a command within a group.

        Args:
            group: Parent group
            name: Sub-command name
            callback: Handler taking the parsed arguments
            description: One-line description
            configure: Adds the command's arguments to its sub-parser
            usage_examples: Shown in ``--help``
        """
        group.commands.append(CommandInfo(f"{group.name}.{name}", callback, description, configure, usage_examples))
        self.logger.debug(f"Registered group command: {group.name}.{name}")

    @property
    def command_names(self) -> List[str]:
        """Registered command names, groups as ``group.command``."""
        names = list(self._commands)
        for group in self._command_groups.values():
            names.extend(info.name for info in group.commands)
        return names

    def _add_command_parser(self, subparsers, name: str, info: CommandInfo) -> None:
        epilog = None
        if info.usage_examples:
            epilog = "examples:\n" + "\n".join(f"  {example}" for example in info.usage_examples)
        if info.help_text:
            epilog = f"{info.help_text}\n\n{epilog}" if epilog else info.help_text
        parser = subparsers.add_parser(name, help=info.description, description=info.description, epilog=epilog,
                                       formatter_class=argparse.RawDescriptionHelpFormatter)
        if info.configure:
            info.configure(parser)
        parser.set_defaults(_command=info)

    def build_parser(self) -> argparse.ArgumentParser:
        """Build the argparse parser for every registered command."""
        parser = argparse.ArgumentParser(prog=self.prog, description=self.description)
        parser.add_argument("--config", default="config/config.yaml", help="Configuration file")
        parser.add_argument("--log-level", default=None, help="Override the configured log level")
        subparsers = parser.add_subparsers(dest="command", metavar="COMMAND")
        subparsers.required = True

        for name, info in self._commands.items():
            self._add_command_parser(subparsers, name, info)
        for name, group in self._command_groups.items():
            group_parser = subparsers.add_parser(name, help=group.description, description=group.description)
            group_subparsers = group_parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")
            group_subparsers.required = True
            for info in group.commands:
                self._add_command_parser(group_subparsers, info.name.split(".", 1)[1], info)
        return parser

    def dispatch(self, args: argparse.Namespace) -> CommandResult:
        """
        Run the command selected by parsed arguments.

        Exceptions are logged and turned into a failed result.

        Args:
            args: Output of ``build_parser().parse_args``

        Returns:
            The command's ``(success, result, error)``
        """
        info: CommandInfo = getattr(args, "_command", None)
        if info is None:
            return False, None, "No command given"
        self.logger.debug(f"Running command: {info.name}")
        try:
            return info.callback(args)
        except Exception as e:
            self.logger.error(f"Error in command {info.name}: {e}", exc_info=True)
            return False, None, str(e)

    def run(self, argv: Optional[Sequence[str]] = None) -> CommandResult:
        """Parse ``argv`` and dispatch."""
        return self.dispatch(self.build_parser().parse_args(argv))
