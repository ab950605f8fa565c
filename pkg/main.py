#!/usr/bin/env python3
"""
graphhyper - graph hypernetworks that predict transformer parameters.

Main entry point for the graphhyper command line. Handles configuration
loading, logging setup and command dispatch with proper error handling.
"""
import argparse
import logging
import sys
from typing import Optional, Sequence

from graphhyper import __version__
from graphhyper.app import GraphHyperApp
from graphhyper.utils.config_manager import ConfigManager
from graphhyper.utils.logger import log_banner, setup_logger


def main(argv: Optional[Sequence[str]] = None) -> int:
    """
    Main entry point for the graphhyper CLI.

    Handles the complete lifecycle of a command:
    - Configuration loading
    - Logging setup
    - Command dispatch

    Returns:
        int: Exit code (0 for success, 1 for error)
    """
    argv = list(sys.argv[1:] if argv is None else argv)

    # Global options are needed before the full parser exists
    pre = argparse.ArgumentParser(add_help=False)
    pre.add_argument("--config", default="config/config.yaml")
    pre.add_argument("--log-level", default=None)
    known, _ = pre.parse_known_args(argv)

    try:
        config = ConfigManager(known.config)
    except (ValueError, FileNotFoundError) as e:
        print(f"Configuration error: {e}", file=sys.stderr)
        return 1

    setup_logger(
        log_level=known.log_level or config.get_log_level(),
        log_file=config.get_log_file(),
        max_size=config.get_log_max_size(),
        backup_count=config.get_log_backup_count()
    )
    logger = logging.getLogger("graphhyper")

    log_banner(logger, f"graphhyper {__version__}")
    logger.debug(f"Logging configured - Level: {config.get_log_level()}, File: {config.get_log_file()}")
    _log_configuration(logger, config)

    try:
        app = GraphHyperApp(config)
        success, _, error = app.run(argv)
    except KeyboardInterrupt:
        logger.info("🛑 Stopped by user (Ctrl+C)")
        return 1

    if not success:
        logger.error(f"❌ {error}")
        return 1
    return 0


def _log_configuration(logger: logging.Logger, config: ConfigManager) -> None:
    """
    Log a configuration summary at debug level.

    Args:
        logger: Logger instance
        config: Configuration manager
    """
    logger.debug("📋 Configuration Summary:")
    logger.debug(f"   Config file: {config.config_path}")
    logger.debug(f"   GHN variant: {config.get_ghn_variant()} {config.get_ghn_options()}")
    logger.debug(f"   Training: {config.get_training_defaults()}")
    logger.debug(f"   Fine-tuning: {config.get_finetune_defaults()}")
    logger.debug(f"   Output dir: {config.get_output_dir()}")


if __name__ == "__main__":
    sys.exit(main())
