"""Tests for the configuration manager."""
import os
import sys
import tempfile
import unittest
from unittest.mock import patch

import yaml

# Add the project root to the path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from graphhyper.trainer.config import FinetuneConfig, TrainConfig
from graphhyper.utils.config_manager import DEFAULT_CONFIG, ConfigManager

CLEAN_ENV = {k: v for k, v in os.environ.items() if not k.startswith("GRAPHHYPER_")}


@patch.dict(os.environ, CLEAN_ENV, clear=True)
class TestConfigManager(unittest.TestCase):
    """Test configuration loading and access."""

    def setUp(self):
        """Set up a temporary directory for config files."""
        self.temp_dir = tempfile.TemporaryDirectory()

    def tearDown(self):
        """Clean up test fixtures."""
        self.temp_dir.cleanup()

    def write_config(self, data) -> str:
        path = os.path.join(self.temp_dir.name, "config.yaml")
        with open(path, "w", encoding="utf-8") as f:
            yaml.safe_dump(data, f)
        return path

    def test_missing_file_uses_defaults(self):
        """Test that a missing optional file falls back to the defaults."""
        config = ConfigManager(os.path.join(self.temp_dir.name, "nope.yaml"))
        self.assertEqual(config.get_log_level(), "INFO")
        self.assertIsNone(config.get_log_file())
        self.assertEqual(config.get_ghn_variant(), "tiny")
        self.assertEqual(config.get_training_defaults(), DEFAULT_CONFIG["training"])

    def test_missing_required_file(self):
        """Test that a required file must exist."""
        with self.assertRaises(FileNotFoundError):
            ConfigManager(os.path.join(self.temp_dir.name, "nope.yaml"), required=True)

    def test_overrides_merge_over_defaults(self):
        """Test that nested keys merge instead of replacing whole sections."""
        config = ConfigManager(self.write_config({
            "logging": {"level": "DEBUG"},
            "training": {"epochs": 7},
            "ghn": {"max_distance": 4},
        }))
        self.assertEqual(config.get_log_level(), "DEBUG")
        self.assertEqual(config.get_log_backup_count(), 5)
        training = config.get_training_defaults()
        self.assertEqual(training["epochs"], 7)
        self.assertEqual(training["mini_batch"], 64)
        self.assertEqual(config.get_ghn_options()["max_distance"], 4)
        self.assertEqual(config.get_ghn_options()["chunk_size"], 64)

    def test_dot_notation(self):
        """Test nested lookups and defaults for missing keys."""
        config = ConfigManager(self.write_config({"dataset": {"seed": 7}}))
        self.assertEqual(config.get("dataset.seed"), 7)
        self.assertEqual(config.get("dataset.unknown", "x"), "x")
        self.assertEqual(config.get("dataset.seed.deeper", 3), 3)

    def test_dataset_caps(self):
        """Test per-family caps, including search-space names."""
        config = ConfigManager(self.write_config({"dataset": {"gpt2_cap": 5}}))
        self.assertEqual(config.get_dataset_cap("vit"), 10_000_000)
        self.assertEqual(config.get_dataset_cap("gpt2"), 5)
        self.assertEqual(config.get_dataset_cap("gpt2-tiny"), 5)

    def test_environment_overrides(self):
        """Test that environment variables win over the file."""
        config = ConfigManager(self.write_config({"logging": {"level": "DEBUG"}}))
        with patch.dict(os.environ, {"GRAPHHYPER_LOG_LEVEL": "ERROR", "GRAPHHYPER_OUTPUT_DIR": "/tmp/out"}):
            self.assertEqual(config.get_log_level(), "ERROR")
            self.assertEqual(config.get_output_dir(), "/tmp/out")

    def test_invalid_files(self):
        """Test malformed YAML and non-mapping documents."""
        path = os.path.join(self.temp_dir.name, "bad.yaml")
        with open(path, "w", encoding="utf-8") as f:
            f.write("logging: [unclosed\n")
        with self.assertRaises(yaml.YAMLError):
            ConfigManager(path)
        with self.assertRaises(ValueError):
            ConfigManager(self.write_config([1, 2, 3]))

    def test_defaults_feed_run_configs(self):
        """Test that the configured sections build valid run configs."""
        config = ConfigManager(os.path.join(self.temp_dir.name, "nope.yaml"))
        train_cfg = TrainConfig.from_dict(config.get_training_defaults())
        self.assertEqual(train_cfg.base_lr, 3e-4)
        finetune_cfg = FinetuneConfig.from_dict(config.get_finetune_defaults())
        self.assertEqual(finetune_cfg.optimizer, "sgd")

    def test_example_file_parses(self):
        """Test that the shipped example config loads and matches the defaults."""
        root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
        config = ConfigManager(os.path.join(root, "config", "config.yaml.example"))
        self.assertEqual(config.get_dataset_cap("vit"), DEFAULT_CONFIG["dataset"]["vit_cap"])
        self.assertEqual(config.get_ghn_options()["max_degree"], 32)


if __name__ == '__main__':
    unittest.main()
