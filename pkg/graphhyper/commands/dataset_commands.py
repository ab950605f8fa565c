"""Architecture dataset and task dataset commands."""
import argparse
import logging

from graphhyper.archspace.dataset import generate_dataset
from graphhyper.core.command_registry import CommandRegistry, CommandResult
from graphhyper.progress.base import logging_callback
from graphhyper.trainer.tasks import make_synthetic_images, make_synthetic_tokens
from graphhyper.utils.config_manager import ConfigManager


class DatasetCommands:
    """
    Dataset command handlers.

    Generates capped architecture datasets and synthetic task datasets.
    """

    def __init__(self, config: ConfigManager):
        """
        Initialize dataset commands.

        Args:
            config: Configuration manager
        """
        self.logger = logging.getLogger("graphhyper.commands.dataset")
        self.config = config

    def register_commands(self, registry: CommandRegistry) -> None:
        """
        Register dataset commands with the command registry.

        Args:
            registry: Command registry instance
        """
        registry.register_command(
            name="gen-dataset",
            callback=self.gen_dataset_command,
            description="Sample a capped dataset of ViT or GPT-2 architectures",
            configure=self._configure_gen_dataset,
            usage_examples=[
                "graphhyper gen-dataset --kind vit --count 1000 --seed 42 --out data/vits.jsonl",
                "graphhyper gen-dataset --kind gpt2 --count 1000 --cap 30000000 --out data/gpts.jsonl",
                "graphhyper gen-dataset --kind vit --space vit-tiny --count 20 --out data/tiny.jsonl",
            ],
            help_text="Writes one JSON record per line plus a <stem>.hist.csv parameter-count histogram."
        )

        registry.register_command(
            name="make-task",
            callback=self.make_task_command,
            description="Write a synthetic image or token task dataset",
            configure=self._configure_make_task,
            usage_examples=[
                "graphhyper make-task --kind images --n 512 --num-classes 10 --image-size 8 --out data/images",
                "graphhyper make-task --kind tokens --n 256 --seq-len 33 --vocab-size 64 --out data/tokens",
            ]
        )

        self.logger.debug("Dataset commands registered")

    def _configure_gen_dataset(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--kind", required=True, choices=["vit", "gpt2"])
        parser.add_argument("--count", type=int, default=1000)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--cap", type=int, default=None, help="Parameter budget per architecture")
        parser.add_argument("--space", default=None, help="Search space (vit, gpt2, vit-tiny, gpt2-tiny)")
        parser.add_argument("--workers", type=int, default=None)
        parser.add_argument("--out", required=True)

    def _configure_make_task(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--kind", required=True, choices=["images", "tokens"])
        parser.add_argument("--n", type=int, default=512)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--num-classes", type=int, default=10)
        parser.add_argument("--image-size", type=int, default=8)
        parser.add_argument("--channels", type=int, default=3)
        parser.add_argument("--noise", type=float, default=0.5)
        parser.add_argument("--seq-len", type=int, default=33)
        parser.add_argument("--vocab-size", type=int, default=64)
        parser.add_argument("--out", required=True)

    def gen_dataset_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Generate and save an architecture dataset.

        Args:
            args: Parsed arguments

        Returns:
            Tuple of (success, dataset path, error message)
        """
        seed = args.seed if args.seed is not None else self.config.get_dataset_seed()
        cap = args.cap if args.cap is not None else self.config.get_dataset_cap(args.kind)
        workers = args.workers if args.workers is not None else self.config.get_dataset_workers()
        dataset = generate_dataset(
            args.kind, args.count, seed, cap,
            space=args.space,
            workers=workers,
            max_attempts=self.config.get_dataset_max_attempts(),
            progress_callback=logging_callback(self.logger, every=max(1, args.count // 10)),
        )
        histogram = dataset.save(args.out)
        self.logger.info(f"✅ {len(dataset)} {args.kind} architectures written to {args.out} "
                         f"(largest {dataset.max_param_count():,} params, histogram {histogram})")
        return True, args.out, None

    def make_task_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Generate and save a synthetic task.

        Args:
            args: Parsed arguments

        Returns:
            Tuple of (success, task directory, error message)
        """
        if args.kind == "images":
            task = make_synthetic_images(args.n, args.num_classes, args.image_size, args.channels,
                                         args.noise, args.seed)
        else:
            task = make_synthetic_tokens(args.n, args.seq_len, args.vocab_size, seed=args.seed)
        task.save(args.out)
        self.logger.info(f"✅ {len(task)} {args.kind} samples written to {args.out}")
        return True, args.out, None
