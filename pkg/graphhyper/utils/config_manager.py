"""Configuration manager for graphhyper."""
import copy
import logging
import os
from typing import Any, Dict, Optional

import yaml
from dotenv import load_dotenv

# Built-in defaults; a config file only needs to carry overrides
DEFAULT_CONFIG: Dict[str, Any] = {
    'logging': {
        'level': 'INFO',
        'file': None,
        'max_size': 10485760,
        'backup_count': 5,
    },
    'dataset': {
        'vit_cap': 10_000_000,
        'gpt2_cap': 30_000_000,
        'seed': 42,
        'workers': 1,
        'max_attempts': 1000,
    },
    'ghn': {
        'variant': 'tiny',
        'max_distance': 8,
        'max_degree': 32,
        'chunk_size': 64,
        'allow_fallback': True,
    },
    'training': {
        'base_lr': 3e-4,
        'weight_decay': 1e-2,
        'gamma': 3e-5,
        'optimizer': 'adamw',
        'meta_batch': 1,
        'mini_batch': 64,
        'epochs': 1,
        'checkpoint_every': 0,
        'amp': False,
        'seed': 0,
    },
    'finetune': {
        'optimizer': 'sgd',
        'lr': 0.1,
        'weight_decay': 1e-2,
        'steps': 100,
        'batch_size': 64,
    },
    'output': {
        'dir': './runs',
    },
}


class ConfigManager:
    """
    Configuration manager for graphhyper.

    Handles loading and accessing configuration values from the config file,
    layered over built-in defaults.
    """

    def __init__(self, config_path: str = "config/config.yaml", required: bool = False):
        """
        Initialize the ConfigManager.

        Args:
            config_path: Path to the configuration file
            required: Raise if the file is missing instead of using defaults

        Raises:
            FileNotFoundError: If the file is required and does not exist
            yaml.YAMLError: If the configuration file is not valid YAML
        """
        self.logger = logging.getLogger("graphhyper.config")
        self.config_path = config_path
        self.required = required
        self.config: Dict[str, Any] = copy.deepcopy(DEFAULT_CONFIG)

        # Load environment variables from .env file
        load_dotenv()

        self._load_config()

    def _load_config(self) -> None:
        """
        Load the configuration file and merge it over the defaults.

        Raises:
            FileNotFoundError: If the file is required and does not exist
            yaml.YAMLError: If the configuration file is not valid YAML
        """
        if not os.path.exists(self.config_path):
            example_path = f"{self.config_path}.example"
            if self.required:
                self.logger.error(f"Configuration file {self.config_path} not found.")
                raise FileNotFoundError(f"Configuration file {self.config_path} not found")
            if os.path.exists(example_path):
                self.logger.warning(
                    f"Configuration file {self.config_path} not found, using built-in defaults. "
                    f"Copy {example_path} to {self.config_path} to customize."
                )
            else:
                self.logger.warning(f"Configuration file {self.config_path} not found, using built-in defaults")
            return

        try:
            with open(self.config_path, 'r', encoding='utf-8') as config_file:
                loaded = yaml.safe_load(config_file) or {}
        except yaml.YAMLError as e:
            self.logger.error(f"Error parsing configuration file: {e}")
            raise

        if not isinstance(loaded, dict):
            raise ValueError(f"Configuration file {self.config_path} must contain a mapping")

        self._merge(self.config, loaded)
        self.logger.debug(f"Loaded configuration from {self.config_path}")

    @staticmethod
    def _merge(base: Dict[str, Any], override: Dict[str, Any]) -> None:
        for key, value in override.items():
            if isinstance(value, dict) and isinstance(base.get(key), dict):
                ConfigManager._merge(base[key], value)
            else:
                base[key] = value

    def get(self, key: str, default: Any = None) -> Any:
        """
        Get a configuration value.

        Args:
            key: The configuration key (dot notation for nested keys)
            default: Default value to return if the key is not found

        Returns:
            The configuration value or the default value if not found
        """
        value = self.config
        for k in key.split('.'):
            if isinstance(value, dict) and k in value:
                value = value[k]
            else:
                self.logger.debug(f"Configuration key '{key}' not found, using default: {default}")
                return default
        return value

    def get_env(self, key: str, default: Any = None) -> Any:
        """
        Get an environment variable value.

        Args:
            key: Environment variable name
            default: Default value if not found

        Returns:
            Environment variable value or default
        """
        return os.getenv(key, default)

    # Logging

    def get_log_level(self) -> str:
        """
        Get the logging level. ``GRAPHHYPER_LOG_LEVEL`` wins over the file.

        Returns:
            The logging level
        """
        return self.get_env('GRAPHHYPER_LOG_LEVEL') or self.get('logging.level', 'INFO')

    def get_log_file(self) -> Optional[str]:
        """
        Get the log file path.

        Returns:
            The log file path or None if not set
        """
        return self.get_env('GRAPHHYPER_LOG_FILE') or self.get('logging.file', None)

    def get_log_max_size(self) -> int:
        """Get the maximum log file size in bytes."""
        return int(self.get('logging.max_size', 10485760))

    def get_log_backup_count(self) -> int:
        """Get the number of backup log files to keep."""
        return int(self.get('logging.backup_count', 5))

    # Architecture datasets

    def get_dataset_cap(self, kind: str) -> int:
        """
        Get the parameter-count cap for a dataset kind.

        Args:
            kind: ``vit`` or ``gpt2``

        Returns:
            The cap in learnable scalars
        """
        default = 10_000_000 if kind.startswith('vit') else 30_000_000
        return int(self.get(f'dataset.{kind.split("-")[0]}_cap', default))

    def get_dataset_seed(self) -> int:
        """Get the default dataset generation seed."""
        return int(self.get('dataset.seed', 42))

    def get_dataset_workers(self) -> int:
        """Get the number of dataset generation workers."""
        return int(self.get('dataset.workers', 1))

    def get_dataset_max_attempts(self) -> int:
        """Get the rejection-resampling retry bound per record."""
        return int(self.get('dataset.max_attempts', 1000))

    # Hypernetwork

    def get_ghn_variant(self) -> str:
        """Get the default hypernetwork variant name."""
        return self.get('ghn.variant', 'tiny')

    def get_ghn_options(self) -> Dict[str, Any]:
        """
        Get hypernetwork construction options.

        Returns:
            Dictionary with max_distance, max_degree, chunk_size and allow_fallback
        """
        return {
            'max_distance': int(self.get('ghn.max_distance', 8)),
            'max_degree': int(self.get('ghn.max_degree', 32)),
            'chunk_size': int(self.get('ghn.chunk_size', 64)),
            'allow_fallback': bool(self.get('ghn.allow_fallback', True)),
        }

    # Training

    def get_training_defaults(self) -> Dict[str, Any]:
        """
        Get hypernetwork training defaults.

        Returns:
            Dictionary of training settings
        """
        return dict(self.get('training', DEFAULT_CONFIG['training']))

    def get_finetune_defaults(self) -> Dict[str, Any]:
        """
        Get fine-tuning defaults.

        Returns:
            Dictionary of fine-tuning settings
        """
        return dict(self.get('finetune', DEFAULT_CONFIG['finetune']))

    def get_output_dir(self) -> str:
        """Get the default directory for run artifacts."""
        return self.get_env('GRAPHHYPER_OUTPUT_DIR') or self.get('output.dir', './runs')
