"""Tests for architecture specs, sampling and dataset generation."""
import os
import sys
import tempfile
import unittest

import numpy as np
import pandas as pd
import pytest

# Add the project root to the path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from graphhyper.archspace.counting import spec_param_count
from graphhyper.archspace.dataset import ArchDataset, generate_dataset, record_seed
from graphhyper.archspace.sampler import (
    GPT_SPACE, VIT_SPACE, VIT_TINY_SPACE, get_search_space, gpt_head_count, sample_gpt_spec,
    sample_vit_spec, vit_head_choices, width_range
)
from graphhyper.archspace.specs import GPTSpec, LinearSpec, ViTSpec, get_preset, spec_from_dict
from graphhyper.errors import ContractViolation, DatasetGenerationError, SpecValidationError
from graphhyper.progress.base import ProgressStatus


class TestSpecs(unittest.TestCase):
    """Test spec validation and presets."""

    def test_reference_sizes(self):
        """Test preset parameter counts against the published model sizes."""
        self.assertAlmostEqual(spec_param_count(get_preset("vit-s")) / 22e6, 1.0, delta=0.05)
        self.assertAlmostEqual(spec_param_count(get_preset("vit-b")) / 86e6, 1.0, delta=0.05)
        self.assertAlmostEqual(spec_param_count(get_preset("gpt2-s")) / 124e6, 1.0, delta=0.05)
        self.assertAlmostEqual(spec_param_count(get_preset("gpt2-l")) / 774e6, 1.0, delta=0.05)

    def test_linear_count(self):
        """Test the smallest family's count."""
        self.assertEqual(spec_param_count(LinearSpec(4, 4)), 20)
        self.assertEqual(spec_param_count(LinearSpec(4, 4, bias=False)), 16)

    def test_validation(self):
        """Test architecture spec invariants."""
        with self.assertRaises(SpecValidationError):
            ViTSpec(num_layers=2, num_heads=5, hidden_dim=64, mlp_dim=256).validate()
        with self.assertRaises(SpecValidationError):
            ViTSpec(num_layers=2, num_heads=4, hidden_dim=64, mlp_dim=128).validate()
        with self.assertRaises(SpecValidationError):
            ViTSpec(num_layers=2, num_heads=4, hidden_dim=64, mlp_dim=256, patch_size=3, image_size=32).validate()
        with self.assertRaises(SpecValidationError):
            GPTSpec(num_layers=0, num_heads=2, embed_dim=16).validate()
        with self.assertRaises(SpecValidationError):
            LinearSpec(0, 3).validate()

    def test_presets(self):
        """Test preset lookup and overrides."""
        spec = get_preset("ViT-S", num_classes=100)
        self.assertEqual(spec.num_classes, 100)
        self.assertEqual(spec.hidden_dim, 384)
        with self.assertRaises(SpecValidationError):
            get_preset("resnet-50")
        with self.assertRaises(SpecValidationError):
            get_preset("vit-s", depth=3)

    def test_spec_from_dict(self):
        """Test rebuilding specs from kind and config."""
        spec = GPTSpec(num_layers=2, num_heads=2, embed_dim=16, vocab_size=64, context_length=32)
        self.assertEqual(spec_from_dict("gpt2", spec.to_dict()), spec)
        with self.assertRaises(SpecValidationError):
            spec_from_dict("mlp", {})
        with self.assertRaises(SpecValidationError):
            spec_from_dict("linear", {"in_features": 3, "out_features": 2, "extra": 1})
        with self.assertRaises(SpecValidationError):
            spec_from_dict("linear", {"in_features": 3})


class TestSampler(unittest.TestCase):
    """Test sampling of training architectures."""

    def test_vit_ranges(self):
        """Test that sampled ViTs respect the depth-conditioned width ranges."""
        rng = np.random.default_rng(0)
        for _ in range(200):
            spec = sample_vit_spec(rng)
            self.assertGreaterEqual(spec.num_layers, VIT_SPACE.min_layers)
            self.assertLessEqual(spec.num_layers, VIT_SPACE.max_layers)
            self.assertIn(spec.hidden_dim, width_range(VIT_SPACE, spec.num_layers))
            self.assertIn(spec.num_heads, vit_head_choices(spec.hidden_dim))
            self.assertEqual(spec.hidden_dim % spec.num_heads, 0)
            self.assertEqual(spec.mlp_dim, 4 * spec.hidden_dim)

    def test_gpt_ranges(self):
        """Test sampled GPT specs, including untied embeddings."""
        rng = np.random.default_rng(1)
        for _ in range(200):
            spec = sample_gpt_spec(rng)
            self.assertIn(spec.embed_dim, width_range(GPT_SPACE, spec.num_layers))
            self.assertEqual(spec.embed_dim % spec.num_heads, 0)
            self.assertFalse(spec.tie_word_embeddings)

    def test_width_branches(self):
        """Test the depth thresholds of the width branches."""
        self.assertEqual(width_range(VIT_SPACE, 9)[0], 128)
        self.assertEqual(width_range(VIT_SPACE, 6)[-1], 256)
        self.assertEqual(width_range(VIT_SPACE, 5)[0], 256)
        self.assertEqual(width_range(VIT_SPACE, 3)[-1], 512)

    def test_head_rules(self):
        """Test head-count selection rules."""
        self.assertEqual(vit_head_choices(384), (3, 6, 12))
        self.assertEqual(vit_head_choices(160), (4, 8))
        self.assertEqual(gpt_head_count(176), 8)
        self.assertEqual(gpt_head_count(132), 6)
        with self.assertRaises(SpecValidationError):
            gpt_head_count(7)

    def test_determinism(self):
        """Test that equal generator seeds produce equal specs."""
        a = [sample_vit_spec(np.random.default_rng(5)) for _ in range(3)]
        b = [sample_vit_spec(np.random.default_rng(5)) for _ in range(3)]
        self.assertEqual(a, b)

    def test_unknown_space(self):
        """Test that unknown search spaces are rejected."""
        self.assertIs(get_search_space("vit-tiny"), VIT_TINY_SPACE)
        with self.assertRaises(SpecValidationError):
            get_search_space("resnet")


class TestDatasetGeneration(unittest.TestCase):
    """Test architecture dataset generation."""

    def test_small_dataset(self):
        """Test a small capped dataset and its ordering."""
        dataset = generate_dataset("vit", 20, seed=3, cap=10_000_000)
        self.assertEqual(len(dataset), 20)
        self.assertLessEqual(dataset.max_param_count(), 10_000_000)
        self.assertEqual([r.id for r in dataset], [f"vit-{i:05d}" for i in range(20)])
        for record in dataset:
            self.assertEqual(record.param_count, spec_param_count(record.spec))

    def test_seed_reproducibility(self):
        """Test that output depends only on seed, not on worker count."""
        serial = generate_dataset("gpt2", 12, seed=9, cap=30_000_000, workers=1)
        threaded = generate_dataset("gpt2", 12, seed=9, cap=30_000_000, workers=4)
        self.assertEqual(serial.records, threaded.records)
        other = generate_dataset("gpt2", 12, seed=10, cap=30_000_000)
        self.assertNotEqual(serial.specs, other.specs)

    def test_record_seeds_distinct(self):
        """Test that record seeds differ across indices."""
        seeds = {record_seed(0, i) for i in range(100)}
        self.assertEqual(len(seeds), 100)

    def test_contracts(self):
        """Test invalid sizes, caps and space mismatches."""
        with self.assertRaises(ContractViolation):
            generate_dataset("vit", 0, seed=0, cap=10)
        with self.assertRaises(ContractViolation):
            generate_dataset("vit", 1, seed=0, cap=0)
        with self.assertRaises(ContractViolation):
            generate_dataset("gpt2", 1, seed=0, cap=10, space="vit-tiny")

    def test_cap_too_small(self):
        """Test that an unsatisfiable cap fails after bounded retries."""
        with self.assertRaises(DatasetGenerationError):
            generate_dataset("vit", 2, seed=0, cap=1000, max_attempts=5)

    def test_progress_callbacks(self):
        """Test that progress reaches completion."""
        updates = []
        generate_dataset("vit", 4, seed=0, cap=1_000_000, space="vit-tiny", progress_callback=updates.append)
        self.assertEqual(updates[0].status, ProgressStatus.STARTING)
        self.assertEqual(updates[-1].status, ProgressStatus.COMPLETED)
        self.assertEqual(updates[-1].percentage, 100.0)

    def test_threaded_progress_updates(self):
        """Test that threaded generation reports every record."""
        updates = []
        generate_dataset("vit", 6, seed=0, cap=1_000_000, space="vit-tiny", workers=3,
                         progress_callback=updates.append)
        steps = [u.step for u in updates if u.status == ProgressStatus.IN_PROGRESS]
        self.assertEqual(steps, [1, 2, 3, 4, 5, 6])
        self.assertEqual(updates[-1].status, ProgressStatus.COMPLETED)

    def test_histogram(self):
        """Test that histogram buckets cover every record."""
        dataset = generate_dataset("vit", 30, seed=1, cap=10_000_000)
        buckets = dataset.histogram()
        self.assertEqual(sum(b.count for b in buckets), 30)
        for a, b in zip(buckets, buckets[1:]):
            self.assertEqual(a.hi, b.lo)
        self.assertLessEqual(buckets[0].lo, min(r.param_count for r in dataset))
        self.assertGreater(buckets[-1].hi, dataset.max_param_count())

    def test_save_and_load(self):
        """Test the JSON-lines file and histogram sidecar."""
        dataset = generate_dataset("gpt2", 5, seed=2, cap=1_000_000, space="gpt2-tiny")
        with tempfile.TemporaryDirectory() as tmp:
            path = os.path.join(tmp, "data", "gpt.jsonl")
            histogram_path = dataset.save(path)
            self.assertTrue(os.path.exists(histogram_path))
            frame = pd.read_csv(histogram_path)
            self.assertEqual(list(frame.columns), ["bucket_lo", "bucket_hi", "count"])
            self.assertEqual(int(frame["count"].sum()), 5)

            loaded = ArchDataset.load(path, cap=1_000_000)
            self.assertEqual(loaded.records, dataset.records)
            self.assertEqual(loaded.kind, "gpt2")
            self.assertEqual(loaded.cap, 1_000_000)

    def test_load_rejects_bad_files(self):
        """Test empty files and malformed lines."""
        with tempfile.TemporaryDirectory() as tmp:
            empty = os.path.join(tmp, "empty.jsonl")
            open(empty, "w").close()
            with self.assertRaises(DatasetGenerationError):
                ArchDataset.load(empty)
            bad = os.path.join(tmp, "bad.jsonl")
            with open(bad, "w") as f:
                f.write('{"kind": "vit"}\n')
            with self.assertRaises(DatasetGenerationError):
                ArchDataset.load(bad)


@pytest.mark.slow
class TestFullDatasets(unittest.TestCase):
    """Test the 1K-architecture datasets."""

    def assert_histogram_dense(self, dataset):
        """Every bucket between the smallest and largest record is populated."""
        buckets = dataset.histogram()
        self.assertGreater(len(buckets), 3)
        self.assertEqual(sum(b.count for b in buckets), len(dataset))
        self.assertTrue(all(b.count > 0 for b in buckets), [b.count for b in buckets])

    def test_vit_1k(self):
        """Test 1000 ViT records under the 10M cap."""
        dataset = generate_dataset("vit", 1000, seed=42, cap=10_000_000, workers=4)
        self.assertEqual(len(dataset), 1000)
        self.assertLessEqual(dataset.max_param_count(), 10_000_000)
        for record in dataset:
            spec = record.spec
            self.assertTrue(VIT_SPACE.min_layers <= spec.num_layers <= VIT_SPACE.max_layers)
            self.assertIn(spec.hidden_dim, width_range(VIT_SPACE, spec.num_layers))
            self.assertEqual(spec.hidden_dim % spec.num_heads, 0)
            self.assertEqual(spec.mlp_dim, 4 * spec.hidden_dim)
        self.assert_histogram_dense(dataset)

    def test_gpt2_1k(self):
        """Test 1000 GPT-2 records under the 30M cap."""
        dataset = generate_dataset("gpt2", 1000, seed=42, cap=30_000_000, workers=4)
        self.assertEqual(len(dataset), 1000)
        self.assertLessEqual(dataset.max_param_count(), 30_000_000)
        for record in dataset:
            spec = record.spec
            self.assertTrue(GPT_SPACE.min_layers <= spec.num_layers <= GPT_SPACE.max_layers)
            self.assertIn(spec.embed_dim, width_range(GPT_SPACE, spec.num_layers))
            self.assertEqual(spec.embed_dim % spec.num_heads, 0)
            self.assertFalse(spec.tie_word_embeddings)
        self.assert_histogram_dense(dataset)


if __name__ == '__main__':
    unittest.main()
