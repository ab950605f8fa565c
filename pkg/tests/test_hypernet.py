"""Tests for the assembled graph hypernetwork and its variants."""
import os
import sys
import unittest

import torch

# Add the project root to the path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from graphhyper.archspace.specs import GPTSpec, LinearSpec, ViTSpec
from graphhyper.decoder.predict import FALLBACK, PREDICTED
from graphhyper.errors import ConfigError, OversizeError
from graphhyper.graphir.builder import build_graph
from graphhyper.hypernet.network import GraphHyperNetwork, count_ghn_parameters
from graphhyper.hypernet.variants import VARIANTS, GHNConfig, get_variant
from graphhyper.nets.registry import forward, parameter_shapes


def small_ghn(**overrides) -> GraphHyperNetwork:
    torch.manual_seed(0)
    config = dict(d=16, num_layers=1, num_heads=2, r=4, K=128)
    config.update(overrides)
    return GraphHyperNetwork(get_variant("custom", **config))


class TestVariants(unittest.TestCase):
    """Test variant lookup and validation."""

    def test_lookup_and_overrides(self):
        """Test named variants and field replacement."""
        self.assertEqual(get_variant("tiny"), VARIANTS["tiny"])
        cfg = get_variant("TINY", K=4096, r=None)
        self.assertEqual(cfg.K, 4096)
        self.assertEqual(cfg.r, 32)

    def test_invalid(self):
        """Test unknown names, unknown fields and invalid values."""
        with self.assertRaises(ConfigError):
            get_variant("huge")
        with self.assertRaises(ConfigError):
            get_variant("tiny", width=3)
        with self.assertRaises(ConfigError):
            get_variant("tiny", num_heads=5)
        with self.assertRaises(ConfigError):
            get_variant("tiny", decoder="dense")

    def test_dict_round_trip(self):
        """Test from_dict with unknown keys rejected."""
        cfg = get_variant("small")
        self.assertEqual(GHNConfig.from_dict(cfg.to_dict()), cfg)
        with self.assertRaises(ConfigError):
            GHNConfig.from_dict({"depth": 3})

    def test_breakdown_matches_instance(self):
        """Test the meta-device count against a real instance."""
        ghn = small_ghn()
        self.assertEqual(ghn.parameter_breakdown(), count_ghn_parameters(ghn.config))


class TestForward(unittest.TestCase):
    """Test parameter prediction end to end."""

    def test_vit_prediction(self):
        """Test that a ViT gets every tensor in its natural shape and runs."""
        spec = ViTSpec(num_layers=2, num_heads=2, hidden_dim=16, mlp_dim=64,
                       patch_size=2, image_size=8, num_classes=10)
        ghn = small_ghn()
        params = ghn(build_graph(spec))
        shapes = parameter_shapes(spec)
        self.assertEqual(list(params.tensors), list(shapes))
        for name, shape in shapes.items():
            self.assertEqual(tuple(params[name].shape), shape)
            self.assertEqual(params.sources[name], PREDICTED)
        self.assertEqual(params.num_parameters(), sum(t.numel() for t in params.tensors.values()))

        logits = forward(params.tensors, torch.randn(3, 3, 8, 8), spec)
        self.assertEqual(tuple(logits.shape), (3, 10))
        self.assertTrue(torch.isfinite(logits).all())

    def test_gradients_reach_hypernetwork(self):
        """Test that a loss on predicted tensors back-propagates into the GHN."""
        ghn = small_ghn()
        params = ghn(build_graph(LinearSpec(6, 3)))
        params["head.weight"].sum().backward()
        grads = [p.grad for p in ghn.parameters() if p.grad is not None]
        self.assertTrue(grads)
        self.assertTrue(any(float(g.abs().sum()) > 0 for g in grads))

    def test_fallback_policy(self):
        """Test the config default, the per-call override and strict mode."""
        spec = GPTSpec(num_layers=1, num_heads=2, embed_dim=16, vocab_size=200,
                       context_length=32, tie_word_embeddings=True)
        graph = build_graph(spec)
        ghn = small_ghn(K=128)

        params = ghn(graph)
        self.assertEqual(params.fallback_report, ["transformer.wte.weight"])
        self.assertEqual(params.sources["transformer.wte.weight"], FALLBACK)
        self.assertEqual(tuple(params["transformer.wte.weight"].shape), (200, 16))
        self.assertIn("lm_head.weight", params.non_predicted)
        self.assertNotIn("lm_head.weight", params)

        with self.assertRaises(OversizeError) as ctx:
            ghn(graph, allow_fallback=False)
        self.assertEqual(ctx.exception.name, "transformer.wte.weight")

        strict = small_ghn(K=128, allow_fallback=False)
        with self.assertRaises(OversizeError):
            strict(graph)
        self.assertEqual(strict(graph, allow_fallback=True).fallback_report, ["transformer.wte.weight"])

    def test_deterministic(self):
        """Test that equal weights give equal predictions."""
        graph = build_graph(LinearSpec(5, 2))
        a, b = small_ghn(), small_ghn()
        self.assertTrue(torch.equal(a(graph)["head.weight"], b(graph)["head.weight"]))

    def test_tiled_variant(self):
        """Test the tiled decoder inside the full network."""
        spec = GPTSpec(num_layers=1, num_heads=2, embed_dim=16, vocab_size=64, context_length=32)
        ghn = small_ghn(decoder="tiled", num_classes=10)
        params = ghn(build_graph(spec))
        self.assertEqual(params.fallback_report, [])
        self.assertEqual(tuple(params["lm_head.weight"].shape), (64, 16))

    def test_detach_and_numpy(self):
        """Test gradient-free copies."""
        params = small_ghn()(build_graph(LinearSpec(4, 2)))
        detached = params.detach()
        self.assertFalse(detached["head.weight"].requires_grad)
        self.assertEqual(detached.to_numpy()["head.bias"].shape, (2,))


if __name__ == '__main__':
    unittest.main()
