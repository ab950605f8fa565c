"""Cost-model and graph inspection commands."""
import argparse
import json
import logging

from graphhyper.archspace.counting import spec_param_count
from graphhyper.archspace.specs import get_preset
from graphhyper.costmodel.counting import count_report
from graphhyper.costmodel.scaling import (
    growth_exponent, parse_lowrank, parse_widths, scaling_table, write_scaling_csv
)
from graphhyper.core.command_registry import CommandRegistry, CommandResult
from graphhyper.graphir.builder import build_graph
from graphhyper.graphir.codec import write_graphs
from graphhyper.graphir.graph import graph_summary
from graphhyper.hypernet.network import count_ghn_parameters
from graphhyper.hypernet.variants import REFERENCE_TOTALS, VARIANTS, get_variant
from graphhyper.utils.config_manager import ConfigManager


class AnalyzeCommands:
    """
    Analysis command handlers.

    Parameter counting, decoder scaling tables and graph dumps; nothing
    here trains or allocates full-size models.
    """

    def __init__(self, config: ConfigManager):
        """
        Initialize analysis commands.

        Args:
            config: Configuration manager
        """
        self.logger = logging.getLogger("graphhyper.commands.analyze")
        self.config = config

    def register_commands(self, registry: CommandRegistry) -> None:
        """
        Register the ``analyze`` group with the command registry.

        Args:
            registry: Command registry instance
        """
        group = registry.register_command_group("analyze", "Parameter counts, scaling tables and graphs")

        registry.register_group_command(
            group, "count", self.count_command,
            "Decoder parameter count with its term breakdown",
            configure=self._configure_count,
            usage_examples=[
                "graphhyper analyze count --method lowrank --d 64 --r 32 --K 32768",
                "graphhyper analyze count --method tiled --d 64 --num-classes 100",
            ]
        )
        registry.register_group_command(
            group, "scaling", self.scaling_command,
            "Tiled vs low-rank decoder size over target widths (CSV)",
            configure=self._configure_scaling,
            usage_examples=["graphhyper analyze scaling --widths 64..4096 --variant tiny --out scaling.csv",
                            "graphhyper analyze scaling --widths 256..4096 --lowrank 64,32,32768 --out scaling.csv"]
        )
        registry.register_group_command(
            group, "variants", self.variants_command,
            "Total parameter counts of the named hypernetwork variants"
        )
        registry.register_group_command(
            group, "graph", self.graph_command,
            "Build a preset's computational graph and optionally write it as JSON lines",
            configure=self._configure_graph,
            usage_examples=["graphhyper analyze graph --preset vit-s --out graphs/vit-s.jsonl"]
        )

        self.logger.debug("Analyze commands registered")

    def _configure_count(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--method", required=True, choices=["tiled", "lowrank"])
        parser.add_argument("--d", type=int, required=True)
        parser.add_argument("--r", type=int, default=None)
        parser.add_argument("--K", type=int, default=None)
        parser.add_argument("--num-classes", type=int, default=100)
        parser.add_argument("--encoder-layers", type=int, default=None,
                            help="Also count node embedding and encoder")
        parser.add_argument("--encoder-heads", type=int, default=8)

    def _configure_scaling(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--widths", default="64..4096", help="'64..4096' (powers of two) or '64,128,...'")
        parser.add_argument("--variant", default="tiny", help="Low-rank variant supplying (d, r, K)")
        parser.add_argument("--lowrank", default=None, metavar="d,r,K", help="Custom low-rank triple; overrides --variant")
        parser.add_argument("--num-classes", type=int, default=100)
        parser.add_argument("--out", default=None)

    def _configure_graph(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--preset", required=True)
        parser.add_argument("--out", default=None)

    def count_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Report one decoder's parameter count.

        Returns:
            Tuple of (success, CountReport, error message)
        """
        report = count_report(args.method, args.d, args.r, args.K, args.num_classes,
                              args.encoder_layers, args.encoder_heads)
        self.logger.info(f"{args.method} decoder at d={args.d}: {report.decoder_params:,} parameters")
        for term, value in report.notes.items():
            self.logger.info(f"   {term}: {value:,}")
        if report.encoder_params is not None:
            self.logger.info(f"   embedding + encoder: {report.encoder_params:,}")
        print(json.dumps(report.to_dict(), indent=2))
        return True, report, None

    def scaling_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Build the scaling table and its fitted growth exponent.

        Returns:
            Tuple of (success, rows, error message)
        """
        if args.lowrank:
            lowrank = parse_lowrank(args.lowrank)
        else:
            variant = get_variant(args.variant)
            lowrank = (variant.d, variant.r, variant.K)
        self.logger.info(f"Low-rank decoder d={lowrank[0]}, r={lowrank[1]}, K={lowrank[2]}")
        rows = scaling_table(parse_widths(args.widths), lowrank, args.num_classes)
        for row in rows:
            cell = f"{row.lowrank_params:,}" if row.lowrank_supported else "unsupported"
            self.logger.info(f"   width {row.width:>6}: tiled {row.tiled_params:>18,}  lowrank {cell}")
        if len(rows) >= 2:
            self.logger.info(f"Tiled log-log slope: {growth_exponent(rows):.3f}")
        if args.out:
            write_scaling_csv(rows, args.out)
        return True, rows, None

    def variants_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Count every named variant on the meta device.

        Returns:
            Tuple of (success, name-to-breakdown mapping, error message)
        """
        counts = {}
        for name, config in VARIANTS.items():
            counts[name] = count_ghn_parameters(config)
            reference = REFERENCE_TOTALS.get(name)
            note = f" (reference {reference / 1e6:.1f}M)" if reference else ""
            self.logger.info(f"   {name:>13}: {counts[name]['total'] / 1e6:8.2f}M{note}")
        return True, counts, None

    def graph_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Build and summarize a preset's graph.

        Returns:
            Tuple of (success, summary, error message)
        """
        spec = get_preset(args.preset)
        graph = build_graph(spec, graph_id=args.preset)
        summary = graph_summary(graph)
        summary["spec_params"] = spec_param_count(spec)
        self.logger.info(f"{args.preset}: {summary}")
        if args.out:
            write_graphs(args.out, [graph])
        return True, summary, None
