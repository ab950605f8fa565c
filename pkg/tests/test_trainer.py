"""Tests for hypernetwork training, checkpoints and fine-tuning."""
import os
import shutil
import sys
import tempfile
import unittest

import pandas as pd
import pytest
import torch

# Add the project root to the path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from graphhyper.archspace.dataset import generate_dataset
from graphhyper.archspace.sampler import VIT_TINY_SPACE
from graphhyper.archspace.specs import GPTSpec, LinearSpec, ViTSpec
from graphhyper.errors import CheckpointError, ConfigError, InitializationError
from graphhyper.graphir.builder import build_graph
from graphhyper.graphir.graph import CompGraph, GraphNode
from graphhyper.graphir.optypes import OpType
from graphhyper.hypernet.network import GraphHyperNetwork
from graphhyper.hypernet.variants import get_variant
from graphhyper.nets.registry import random_init
from graphhyper.progress.base import ProgressStatus
from graphhyper.trainer.checkpoint import Checkpoint
from graphhyper.trainer.config import FinetuneConfig, TrainConfig
from graphhyper.trainer.finetune import ACCURACY, PERPLEXITY, evaluate, finetune
from graphhyper.trainer.loop import LOG_COLUMNS, meta_batch_loss, squared_norm, train
from graphhyper.trainer.schedule import cosine_lr, step_lr
from graphhyper.trainer.tasks import (
    ImageTaskDataset, TokenTaskDataset, load_task, make_synthetic_images, make_synthetic_tokens
)
from graphhyper.workflows.initialize import compare_initializations


def tiny_ghn(seed: int = 0, **overrides) -> GraphHyperNetwork:
    torch.manual_seed(seed)
    config = dict(d=8, num_layers=1, num_heads=2, r=2, K=256)
    config.update(overrides)
    return GraphHyperNetwork(get_variant("custom", **config))


def same_state(a: GraphHyperNetwork, b: GraphHyperNetwork, atol: float = 0.0) -> bool:
    sa, sb = a.state_dict(), b.state_dict()
    return sa.keys() == sb.keys() and all(torch.allclose(sa[k], sb[k], rtol=0, atol=atol) for k in sa)


class TestSchedule(unittest.TestCase):
    """Test the cosine learning-rate schedule."""

    def test_endpoints(self):
        """Test the schedule at its start, middle, end and beyond."""
        self.assertEqual(cosine_lr(0.1, 0, 10), 0.1)
        self.assertAlmostEqual(cosine_lr(0.1, 5, 10), 0.05)
        self.assertAlmostEqual(cosine_lr(0.1, 10, 10), 0.0)
        self.assertAlmostEqual(cosine_lr(0.1, 12, 10), 0.0)
        self.assertEqual(cosine_lr(0.1, 3, 0), 0.1)

    def test_step_lr(self):
        """Test that the first step uses the base rate and the last uses zero."""
        self.assertEqual(step_lr(1e-3, 0, 5), 1e-3)
        self.assertAlmostEqual(step_lr(1e-3, 4, 5), 0.0)
        self.assertEqual(step_lr(1e-3, 0, 1), 1e-3)


class TestConfigs(unittest.TestCase):
    """Test training configuration validation."""

    def test_train_config(self):
        """Test invalid training settings."""
        with self.assertRaises(ConfigError):
            TrainConfig(meta_batch=0).validate()
        with self.assertRaises(ConfigError):
            TrainConfig(optimizer="lamb").validate()
        with self.assertRaises(ConfigError):
            TrainConfig(gamma=-1.0).validate()
        cfg = TrainConfig.from_dict({"epochs": 3, "unused": True})
        self.assertEqual(cfg.epochs, 3)

    def test_finetune_config(self):
        """Test learning-rate sweeps parsed from dictionaries."""
        cfg = FinetuneConfig.from_dict({"lrs": ["0.1", 0.01], "steps": 5})
        self.assertEqual(cfg.lrs, (0.1, 0.01))
        with self.assertRaises(ConfigError):
            FinetuneConfig(batch_size=0).validate()


class TestLoss(unittest.TestCase):
    """Test the meta-batch objective and its gradients."""

    def setUp(self):
        """Set up a two-node graph and a double-precision hypernetwork."""
        self.graph = CompGraph(
            nodes=(GraphNode(0, OpType.CLASSIFICATION_HEAD, (3, 4, 1, 1), "head.weight", (3, 4)),
                   GraphNode(1, OpType.BIAS, (3, 1, 1, 1), "head.bias", (3,))),
            edges=((0, 1),),
            arch=LinearSpec(4, 3),
            id="two-node",
        )
        torch.manual_seed(0)
        config = get_variant("custom", d=4, num_layers=1, num_heads=1, r=1, K=4,
                             max_distance=2, max_degree=3, num_classes=3)
        self.ghn = GraphHyperNetwork(config).double()
        generator = torch.Generator().manual_seed(1)
        self.batch = (torch.randn(6, 4, generator=generator, dtype=torch.float64),
                      torch.tensor([0, 1, 2, 0, 1, 2]))

    def test_parameter_count(self):
        """Test the size of the gradient-check network."""
        self.assertEqual(self.ghn.parameter_breakdown(),
                         {"embedding": 68, "encoder": 264, "decoder": 644, "total": 976})

    def test_gamma_decomposition(self):
        """Test that the total is task plus gamma times the squared norm."""
        total, task, reg = meta_batch_loss(self.ghn, [self.graph], self.batch, gamma=0.25)
        self.assertAlmostEqual(float(total), float(task) + 0.25 * float(reg), places=12)
        self.assertAlmostEqual(float(reg), float(squared_norm(self.ghn(self.graph))), places=12)

        no_penalty, task0, _ = meta_batch_loss(self.ghn, [self.graph], self.batch, gamma=0.0)
        self.assertAlmostEqual(float(no_penalty), float(task0), places=12)

    def test_gradient_check(self):
        """Test analytic gradients against central finite differences."""
        total, _, _ = meta_batch_loss(self.ghn, [self.graph], self.batch, gamma=0.1)
        self.ghn.zero_grad()
        total.backward()
        eps = 1e-6
        checked = 0
        for name, param in self.ghn.named_parameters():
            flat = param.data.view(-1)
            grad = param.grad.view(-1) if param.grad is not None else torch.zeros_like(flat)
            for i in range(0, flat.numel(), max(1, flat.numel() // 4)):
                original = flat[i].item()
                with torch.no_grad():
                    flat[i] = original + eps
                    plus = float(meta_batch_loss(self.ghn, [self.graph], self.batch, 0.1)[0])
                    flat[i] = original - eps
                    minus = float(meta_batch_loss(self.ghn, [self.graph], self.batch, 0.1)[0])
                    flat[i] = original
                fd = (plus - minus) / (2 * eps)
                an = grad[i].item()
                self.assertLessEqual(abs(fd - an), 1e-3 * max(abs(fd), abs(an)) + 1e-8, f"{name}[{i}]")
                checked += 1
        self.assertGreater(checked, 20)

    def test_squared_norm_skips_fallback(self):
        """Test that fallback tensors carry no penalty."""
        ghn = tiny_ghn(K=4)
        params = ghn(build_graph(LinearSpec(8, 3)))
        self.assertEqual(params.fallback_report, ["head.weight"])
        expected = (params["head.bias"] ** 2).sum()
        self.assertAlmostEqual(float(squared_norm(params)), float(expected), places=6)


class TestTraining(unittest.TestCase):
    """Test the training loop, checkpoints and resume."""

    def setUp(self):
        """Set up a tiny architecture dataset, task and output directory."""
        self.arch = generate_dataset("vit", 3, seed=0, cap=1_000_000, space=VIT_TINY_SPACE)
        self.task = make_synthetic_images(n=64, num_classes=10, image_size=8, seed=0)
        self.cfg = TrainConfig(meta_batch=1, mini_batch=8, epochs=2, base_lr=1e-3, seed=5, checkpoint_every=3)
        self.tmp = tempfile.mkdtemp()

    def tearDown(self):
        """Clean up test fixtures."""
        shutil.rmtree(self.tmp, ignore_errors=True)

    def test_zero_epochs_returns_initial_state(self):
        """Test that no steps leave the hypernetwork untouched."""
        ghn = tiny_ghn()
        initial = tiny_ghn()
        checkpoint = train(ghn, self.arch, self.task, TrainConfig(epochs=0))
        self.assertEqual(checkpoint.step, 0)
        self.assertTrue(same_state(ghn, initial))
        self.assertTrue(same_state(checkpoint.build_ghn(), initial))

    def test_training_is_deterministic(self):
        """Test that equal seeds give equal weights and logs."""
        a, b = tiny_ghn(), tiny_ghn()
        log_a, log_b = os.path.join(self.tmp, "a.csv"), os.path.join(self.tmp, "b.csv")
        train(a, self.arch, self.task, self.cfg, log_path=log_a)
        train(b, self.arch, self.task, self.cfg, log_path=log_b)
        self.assertTrue(same_state(a, b))
        self.assertFalse(same_state(a, tiny_ghn()))
        frame_a, frame_b = pd.read_csv(log_a), pd.read_csv(log_b)
        self.assertEqual(list(frame_a.columns), LOG_COLUMNS)
        self.assertEqual(len(frame_a), 6)
        pd.testing.assert_frame_equal(frame_a, frame_b)
        self.assertAlmostEqual(float(frame_a["lr"].iloc[-1]), 0.0)

    def test_progress_metrics(self):
        """Test that progress updates carry epoch, rate and loss terms."""
        updates = []
        train(tiny_ghn(), self.arch, self.task, self.cfg, progress_callback=updates.append)
        steps = [u for u in updates if u.status == ProgressStatus.IN_PROGRESS]
        self.assertEqual([u.step for u in steps], [1, 2, 3, 4, 5, 6])
        self.assertEqual(steps[3].metrics["epoch"], 1)
        self.assertIn("task_loss", steps[0].metrics)
        self.assertEqual(updates[-1].status, ProgressStatus.COMPLETED)

    def test_max_steps(self):
        """Test early stopping after max_steps."""
        cfg = TrainConfig(meta_batch=2, mini_batch=8, epochs=5, max_steps=3, seed=1)
        self.assertEqual(train(tiny_ghn(), self.arch, self.task, cfg).step, 3)

    def test_checkpoint_round_trip(self):
        """Test saving and loading a checkpoint."""
        path = os.path.join(self.tmp, "ghn.pt")
        ghn = tiny_ghn()
        checkpoint = train(ghn, self.arch, self.task, self.cfg, out_path=path)
        loaded = Checkpoint.load(path)
        self.assertEqual(loaded.step, 6)
        self.assertEqual(loaded.kind, "vit")
        self.assertEqual(loaded.ghn_config, ghn.config)
        self.assertEqual(loaded.train_config["seed"], 5)
        self.assertTrue(same_state(loaded.build_ghn(), ghn))
        self.assertEqual(checkpoint.step, loaded.step)

    def test_resume_matches_uninterrupted(self):
        """Test that resuming from a mid-run checkpoint reproduces the full run."""
        path = os.path.join(self.tmp, "run.pt")
        mid = os.path.join(self.tmp, "mid.pt")

        def keep_mid(progress):
            # The step-3 snapshot is on disk by the time step 4 is reported
            if progress.status == ProgressStatus.IN_PROGRESS and progress.step == 4:
                shutil.copy(path, mid)

        full = tiny_ghn()
        train(full, self.arch, self.task, self.cfg, out_path=path, progress_callback=keep_mid)
        self.assertEqual(Checkpoint.load(mid).step, 3)

        resumed = tiny_ghn(seed=99)
        checkpoint = train(resumed, self.arch, self.task, self.cfg, resume=mid)
        self.assertEqual(checkpoint.step, 6)
        self.assertTrue(same_state(full, resumed, atol=1e-6))

    def test_resume_continues_log(self):
        """Test that a resumed run keeps the log rows written before the checkpoint."""
        path = os.path.join(self.tmp, "half.pt")
        log = os.path.join(self.tmp, "train.csv")
        half = TrainConfig(meta_batch=1, mini_batch=8, epochs=2, base_lr=1e-3, seed=5, max_steps=3)
        train(tiny_ghn(), self.arch, self.task, half, out_path=path, log_path=log)
        self.assertEqual(list(pd.read_csv(log)["step"]), [1, 2, 3])

        train(tiny_ghn(), self.arch, self.task, self.cfg, log_path=log, resume=path)
        frame = pd.read_csv(log)
        self.assertEqual(list(frame["step"]), [1, 2, 3, 4, 5, 6])
        self.assertEqual(list(frame.columns), LOG_COLUMNS)

    def test_resume_drops_rows_past_checkpoint(self):
        """Test that log rows after the resumed step are replaced, not duplicated."""
        path = os.path.join(self.tmp, "run.pt")
        mid = os.path.join(self.tmp, "mid.pt")
        log = os.path.join(self.tmp, "train.csv")

        def keep_mid(progress):
            if progress.status == ProgressStatus.IN_PROGRESS and progress.step == 4:
                shutil.copy(path, mid)

        train(tiny_ghn(), self.arch, self.task, self.cfg, out_path=path, log_path=log, progress_callback=keep_mid)
        train(tiny_ghn(), self.arch, self.task, self.cfg, log_path=log, resume=mid)
        self.assertEqual(list(pd.read_csv(log)["step"]), [1, 2, 3, 4, 5, 6])

    def test_resume_kind_mismatch(self):
        """Test that a checkpoint from another family cannot be resumed."""
        path = os.path.join(self.tmp, "gpt.pt")
        Checkpoint.from_model(tiny_ghn(), kind="gpt2").save(path)
        with self.assertRaises(ConfigError):
            train(tiny_ghn(), self.arch, self.task, self.cfg, resume=path)

    def test_bad_checkpoints(self):
        """Test missing and foreign checkpoint files."""
        with self.assertRaises(CheckpointError):
            Checkpoint.load(os.path.join(self.tmp, "missing.pt"))
        foreign = os.path.join(self.tmp, "foreign.pt")
        torch.save({"weights": torch.zeros(2)}, foreign)
        with self.assertRaises(CheckpointError):
            Checkpoint.load(foreign)

    def test_incompatible_task(self):
        """Test that a token task cannot train ViT graphs."""
        with self.assertRaises(ConfigError):
            train(tiny_ghn(), self.arch, make_synthetic_tokens(n=8, seq_len=9), self.cfg)


class TestTasks(unittest.TestCase):
    """Test task datasets."""

    def test_split_and_persist(self):
        """Test holdout splits and saving to disk."""
        task = make_synthetic_images(n=40, num_classes=4, image_size=4, seed=1)
        train_part, held = task.split(0.25)
        self.assertEqual((len(train_part), len(held)), (30, 10))
        with self.assertRaises(ConfigError):
            task.split(1.5)
        with tempfile.TemporaryDirectory() as tmp:
            task.save(tmp)
            loaded = load_task("images", tmp)
        self.assertTrue(torch.equal(loaded.images, task.images))
        with self.assertRaises(ConfigError):
            load_task("audio", "/nonexistent")

    def test_token_task(self):
        """Test the Markov token corpus."""
        task = make_synthetic_tokens(n=10, seq_len=9, vocab_size=16, branching=2, seed=0)
        self.assertEqual(task.sequence_length, 9)
        self.assertLess(int(task.tokens.max()), 16)
        (batch,) = task.batch(4, torch.Generator().manual_seed(0))
        self.assertEqual(tuple(batch.shape), (4, 9))
        with self.assertRaises(ConfigError):
            TokenTaskDataset(torch.zeros(3, 1, dtype=torch.long))
        with self.assertRaises(ConfigError):
            ImageTaskDataset(torch.zeros(3, 4), torch.zeros(3, dtype=torch.long))


class TestFinetune(unittest.TestCase):
    """Test fine-tuning and evaluation."""

    def setUp(self):
        """Set up a linear classifier on synthetic images."""
        self.spec = LinearSpec(3 * 8 * 8, 10)
        self.task = make_synthetic_images(n=200, num_classes=10, image_size=8, seed=2)

    def test_zero_steps(self):
        """Test that no steps return the initialization and one evaluation."""
        params = random_init(self.spec, seed=0)
        result = finetune(params, self.spec, self.task, FinetuneConfig(steps=0))
        self.assertEqual(len(result.curve), 1)
        self.assertEqual(result.final.step, 0)
        for name, value in params.items():
            self.assertTrue(torch.equal(result.params[name], value))

    def test_loss_decreases(self):
        """Test that SGD fine-tuning lowers the loss and records the curve."""
        cfg = FinetuneConfig(lr=0.05, steps=40, batch_size=32, eval_every=10)
        result = finetune(random_init(self.spec, seed=0), self.spec, self.task, cfg)
        self.assertEqual([e.step for e in result.curve], [0, 10, 20, 30, 40])
        self.assertLess(result.final.loss, result.curve[0].loss)
        self.assertEqual(result.final.metric_name, ACCURACY)

    def test_lr_sweep_picks_best(self):
        """Test that the sweep keeps the rate with the best final metric."""
        cfg = FinetuneConfig(lr=0.05, steps=30, batch_size=32, lrs=(0.0, 0.05))
        result = finetune(random_init(self.spec, seed=0), self.spec, self.task, cfg)
        self.assertEqual(result.lr, 0.05)

    def test_missing_tensor(self):
        """Test that incomplete parameters are rejected by name."""
        params = random_init(self.spec, seed=0)
        del params["head.bias"]
        with self.assertRaises(InitializationError) as ctx:
            finetune(params, self.spec, self.task, FinetuneConfig(steps=1))
        self.assertEqual(ctx.exception.tensor, "head.bias")

    def test_uniform_perplexity(self):
        """Test that a zero LM head scores perplexity equal to the vocabulary size."""
        spec = GPTSpec(num_layers=1, num_heads=2, embed_dim=16, vocab_size=64, context_length=32)
        params = random_init(spec, seed=0)
        params["lm_head.weight"] = torch.zeros_like(params["lm_head.weight"])
        task = make_synthetic_tokens(n=20, seq_len=17, vocab_size=64, seed=0)
        result = evaluate(params, spec, task)
        self.assertEqual(result.metric_name, PERPLEXITY)
        self.assertAlmostEqual(result.metric, 64.0, places=3)


@pytest.mark.slow
class TestDeskScaleTraining(unittest.TestCase):
    """Test that a small hypernetwork learns useful initializations."""

    def test_training_reduces_loss_and_beats_random(self):
        """Test loss reduction over 200 steps and predicted-vs-random init quality."""
        arch = generate_dataset("vit", 20, seed=0, cap=1_000_000, space=VIT_TINY_SPACE)
        task = make_synthetic_images(n=512, num_classes=10, image_size=8, seed=0)
        ghn = tiny_ghn(d=16, num_layers=2, num_heads=2, r=8, K=512)
        cfg = TrainConfig(meta_batch=1, mini_batch=64, epochs=10, base_lr=1e-3, seed=0)
        updates = []
        checkpoint = train(ghn, arch, task, cfg, progress_callback=updates.append)
        losses = [u.metrics["task_loss"] for u in updates if u.status == ProgressStatus.IN_PROGRESS]
        self.assertEqual(len(losses), 200)
        first, last = sum(losses[:20]) / 20, sum(losses[-20:]) / 20
        self.assertLessEqual(last, 0.7 * first)

        spec = ViTSpec(num_layers=2, num_heads=4, hidden_dim=32, mlp_dim=128,
                       patch_size=2, image_size=8, num_classes=10)
        rows = compare_initializations(spec, checkpoint, task)
        self.assertGreaterEqual(sum(row.predicted_wins for row in rows), 4)


if __name__ == '__main__':
    unittest.main()
