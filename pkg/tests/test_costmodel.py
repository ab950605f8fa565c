"""Tests for closed-form decoder counts and the scaling table."""
import os
import sys
import tempfile
import unittest

import numpy as np
import pandas as pd

# Add the project root to the path
sys.path.insert(0, os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from graphhyper.costmodel.counting import (
    count_report, delta1, lowrank_decoder_params, param_delta, tiled_decoder_params
)
from graphhyper.costmodel.scaling import (
    growth_exponent, parse_lowrank, parse_widths, scaling_frame, scaling_table, write_scaling_csv
)
from graphhyper.decoder.lowrank import LowRankDecoder, decoder_param_count
from graphhyper.decoder.tiled import TiledDecoder, tiled_param_count
from graphhyper.errors import ContractViolation
from graphhyper.hypernet.network import count_ghn_parameters
from graphhyper.hypernet.variants import REFERENCE_TOTALS, get_variant


class TestDecoderCounts(unittest.TestCase):
    """Test the decoder count formulas against known values."""

    def test_tiled_golden_values(self):
        """Test tiled counts for the two reference widths."""
        self.assertEqual(tiled_decoder_params(64, 100), 6_428_928)
        self.assertEqual(tiled_decoder_params(128, 100), 34_091_520)

    def test_lowrank_golden_values(self):
        """Test low-rank counts for the two reference configurations."""
        self.assertEqual(lowrank_decoder_params(64, 32, 32768), 2_244_608)
        self.assertEqual(lowrank_decoder_params(128, 90, 32768), 20_127_744)

    def test_rank_zero_degenerate(self):
        """Test that r = 0 leaves only the MLP terms."""
        self.assertEqual(lowrank_decoder_params(64, 0, 32768), 36 * 64 * 64)

    def test_counts_strictly_increasing(self):
        """Test that every count grows with each of its arguments."""
        for d in (1, 8, 64, 500):
            self.assertLess(tiled_decoder_params(d, 100), tiled_decoder_params(d + 1, 100))
            self.assertLess(tiled_decoder_params(d, 100), tiled_decoder_params(d, 101))
            for r in (1, 4, 32):
                for K in (1, 256, 32768):
                    base = lowrank_decoder_params(d, r, K)
                    self.assertLess(base, lowrank_decoder_params(d + 1, r, K))
                    self.assertLess(base, lowrank_decoder_params(d, r + 1, K))
                    self.assertLess(base, lowrank_decoder_params(d, r, K + 1))

    def test_counts_match_modules(self):
        """Test that formulas match the instantiated module sizes."""
        for d, r, K in [(8, 2, 64), (16, 4, 256), (12, 3, 100)]:
            module = LowRankDecoder(d, r, K)
            actual = sum(p.numel() for p in module.parameters())
            self.assertEqual(actual, lowrank_decoder_params(d, r, K))
            self.assertEqual(actual, decoder_param_count(d, r, K))
        for d, classes in [(4, 10), (8, 0)]:
            module = TiledDecoder(d, classes)
            actual = sum(p.numel() for p in module.parameters())
            self.assertEqual(actual, tiled_decoder_params(d, classes))
            self.assertEqual(actual, tiled_param_count(d, classes))

    def test_delta_identity_random(self):
        """Test that tiled minus low-rank equals the delta expression for random inputs."""
        rng = np.random.default_rng(7)
        for _ in range(100):
            d = int(rng.integers(1, 1025))
            r = int(rng.integers(0, 257))
            c_out = int(rng.integers(1, 4097))
            h = int(rng.integers(1, 8))
            classes = int(rng.integers(0, 1001))
            K = c_out * h
            expected = tiled_decoder_params(d, classes) - lowrank_decoder_params(d, r, K)
            self.assertEqual(param_delta(d, r, K, classes, c_out, h), expected)

    def test_delta_rejects_inconsistent_K(self):
        """Test that a K other than c_out * h is rejected."""
        with self.assertRaises(ContractViolation):
            param_delta(64, 32, 1000, 100, 64, 16)

    def test_delta1(self):
        """Test the leading-order gap at its zero and a positive width."""
        self.assertEqual(delta1(16), 0)
        self.assertEqual(delta1(64), 3_145_728)
        self.assertLess(delta1(8), 0)

    def test_negative_inputs_rejected(self):
        """Test that invalid widths and ranks are contract violations."""
        with self.assertRaises(ContractViolation):
            lowrank_decoder_params(0, 4, 16)
        with self.assertRaises(ContractViolation):
            lowrank_decoder_params(4, -1, 16)
        with self.assertRaises(ContractViolation):
            tiled_decoder_params(0, 10)

    def test_count_report(self):
        """Test the report for both methods and an unknown one."""
        report = count_report("lowrank", 64, r=32, K=32768)
        self.assertEqual(report.decoder_params, 2_244_608)
        self.assertEqual(sum(report.notes.values()), report.decoder_params)

        tiled = count_report("tiled", 64, num_classes=100, encoder_layers=3, encoder_heads=8)
        self.assertEqual(tiled.decoder_params, 6_428_928)
        self.assertGreater(tiled.encoder_params, 0)
        self.assertEqual(tiled.to_dict()["method"], "tiled")

        with self.assertRaises(ContractViolation):
            count_report("lowrank", 64)
        with self.assertRaises(ContractViolation):
            count_report("dense", 64)


class TestScaling(unittest.TestCase):
    """Test the tiled decoder's growth against target width."""

    def setUp(self):
        """Set up the scaling table used by most tests."""
        self.rows = scaling_table(parse_widths("256..4096"), (64, 32, 32768))

    def test_full_range_slope(self):
        """Test the fitted slope over 256..4096."""
        slope = growth_exponent(self.rows)
        self.assertGreaterEqual(slope, 2.8)
        self.assertLessEqual(slope, 3.0)

    def test_asymptotic_slope(self):
        """Test that the upper octaves give an exponent close to 3."""
        slope = growth_exponent(self.rows, min_width=1024)
        self.assertAlmostEqual(slope, 3.0, delta=0.1)

    def test_extrapolation_at_2048(self):
        """Test the tiled extrapolation at width 2048."""
        row = next(r for r in self.rows if r.width == 2048)
        self.assertEqual(row.tiled_params, 73_148_866_560)
        self.assertGreaterEqual(row.tiled_params, 7e10)
        self.assertTrue(row.lowrank_supported)
        self.assertEqual(row.lowrank_params, 2_244_608)

    def test_unsupported_widths(self):
        """Test that widths whose folded size exceeds K have no low-rank count."""
        row = next(r for r in self.rows if r.width == 4096)
        self.assertFalse(row.lowrank_supported)
        self.assertIsNone(row.lowrank_params)

    def test_widths_must_ascend(self):
        """Test that non-ascending widths are rejected."""
        with self.assertRaises(ContractViolation):
            scaling_table([256, 128], (64, 32, 32768))
        with self.assertRaises(ContractViolation):
            growth_exponent(self.rows[:1])

    def test_parse_widths(self):
        """Test range and list width syntax."""
        self.assertEqual(parse_widths("64..512"), [64, 128, 256, 512])
        self.assertEqual(parse_widths("64, 96,128"), [64, 96, 128])
        with self.assertRaises(ContractViolation):
            parse_widths("abc")

    def test_parse_lowrank(self):
        """Test d,r,K triples."""
        self.assertEqual(parse_lowrank("64,32,32768"), (64, 32, 32768))
        for text in ("64,32", "64,32,32768,1", "a,b,c", "64,-1,32768"):
            with self.assertRaises(ContractViolation):
                parse_lowrank(text)

    def test_csv_output(self):
        """Test that the CSV leaves unsupported low-rank cells empty."""
        with tempfile.TemporaryDirectory() as tmp:
            path = write_scaling_csv(self.rows, os.path.join(tmp, "out", "scaling.csv"))
            frame = pd.read_csv(path)
        self.assertEqual(list(frame.columns), ["width", "tiled_params", "lowrank_params", "lowrank_supported"])
        self.assertEqual(len(frame), len(self.rows))
        self.assertTrue(pd.isna(frame.loc[frame.width == 4096, "lowrank_params"]).all())

    def test_encoder_column(self):
        """Test that the encoder estimate column appears only when requested."""
        rows = scaling_table([256, 512], (64, 32, 32768), encoder_layers=2, encoder_heads=16)
        self.assertIn("tiled_encoder_params", scaling_frame(rows).columns)
        self.assertNotIn("tiled_encoder_params", scaling_frame(self.rows).columns)


class TestVariantTotals(unittest.TestCase):
    """Test constructed variant sizes against the reference totals."""

    def test_totals_within_tolerance(self):
        """Test every reference variant within 15 percent."""
        for name, reference in REFERENCE_TOTALS.items():
            total = count_ghn_parameters(get_variant(name))["total"]
            self.assertLessEqual(abs(total - reference) / reference, 0.15, f"{name}: {total}")

    def test_breakdown_sums(self):
        """Test that the breakdown parts add up to the total."""
        parts = count_ghn_parameters(get_variant("tiny"))
        self.assertEqual(parts["embedding"] + parts["encoder"] + parts["decoder"], parts["total"])
        self.assertEqual(parts["decoder"], 2_244_608)


if __name__ == '__main__':
    unittest.main()
