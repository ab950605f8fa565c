"""Hypernetwork training and fine-tuning commands."""
import argparse
import logging
import os

import pandas as pd

from graphhyper.archspace.dataset import ArchDataset
from graphhyper.archspace.specs import get_preset
from graphhyper.core.command_registry import CommandRegistry, CommandResult
from graphhyper.nets.registry import orth_init, random_init
from graphhyper.progress.base import logging_callback
from graphhyper.trainer.config import FinetuneConfig, TrainConfig
from graphhyper.trainer.finetune import finetune
from graphhyper.trainer.loop import train
from graphhyper.trainer.tasks import load_task
from graphhyper.utils.config_manager import ConfigManager
from graphhyper.workflows.archive import load_archive
from graphhyper.workflows.recipe import build_ghn


class TrainCommands:
    """
    Training command handlers.

    ``train-ghn`` fits a hypernetwork on an architecture dataset;
    ``finetune`` trains one target network from a given initialization.
    """

    def __init__(self, config: ConfigManager):
        """
        Initialize training commands.

        Args:
            config: Configuration manager
        """
        self.logger = logging.getLogger("graphhyper.commands.train")
        self.config = config

    def register_commands(self, registry: CommandRegistry) -> None:
        """
        Register training commands with the command registry.

        Args:
            registry: Command registry instance
        """
        registry.register_command(
            name="train-ghn",
            callback=self.train_ghn_command,
            description="Train a graph hypernetwork on an architecture dataset",
            configure=self._configure_train,
            usage_examples=[
                "graphhyper train-ghn --arch-dataset data/vits.jsonl --task images --task-path data/cifar "
                "--variant tiny --m 8 --epochs 300 --seed 0 --out runs/ghn.pt",
                "graphhyper train-ghn --arch-dataset data/tiny.jsonl --task images --task-path data/images "
                "--variant custom --d 16 --layers 2 --heads 2 --r 8 --K 512 --epochs 10 --out runs/tiny.pt",
            ],
            help_text="Defaults come from the 'training' and 'ghn' sections of the configuration file."
        )

        registry.register_command(
            name="finetune",
            callback=self.finetune_command,
            description="Fine-tune a target network from a predicted or random initialization",
            configure=self._configure_finetune,
            usage_examples=[
                "graphhyper finetune --params runs/vit-pred --task images --task-path data/images --steps 100",
                "graphhyper finetune --preset vit-s --init orth --task images --task-path data/imagenet",
            ]
        )

        self.logger.debug("Train commands registered")

    def _configure_train(self, parser: argparse.ArgumentParser) -> None:
        parser.add_argument("--arch-dataset", required=True)
        parser.add_argument("--task", required=True, choices=["images", "tokens"])
        parser.add_argument("--task-path", required=True)
        parser.add_argument("--variant", default=None, help="tiny, small, base, large, tiled-*, or custom")
        parser.add_argument("--d", type=int, default=None)
        parser.add_argument("--layers", type=int, default=None)
        parser.add_argument("--heads", type=int, default=None)
        parser.add_argument("--r", type=int, default=None)
        parser.add_argument("--K", type=int, default=None)
        parser.add_argument("--m", type=int, default=None, help="Meta-batch size")
        parser.add_argument("--n", type=int, default=None, help="Task samples per step")
        parser.add_argument("--epochs", type=int, default=None)
        parser.add_argument("--lr", type=float, default=None)
        parser.add_argument("--gamma", type=float, default=None)
        parser.add_argument("--optimizer", choices=["adamw", "sgd"], default=None)
        parser.add_argument("--seed", type=int, default=None)
        parser.add_argument("--checkpoint-every", type=int, default=None)
        parser.add_argument("--max-steps", type=int, default=None)
        parser.add_argument("--amp", action="store_true")
        parser.add_argument("--resume", default=None)
        parser.add_argument("--out", required=True)
        parser.add_argument("--log", default=None, help="Training log CSV (defaults to <out>.log.csv)")

    def _configure_finetune(self, parser: argparse.ArgumentParser) -> None:
        source = parser.add_mutually_exclusive_group(required=True)
        source.add_argument("--params", help="Parameter archive directory")
        source.add_argument("--preset", help="Preset architecture with a random initialization")
        parser.add_argument("--init", choices=["random", "orth"], default="random")
        parser.add_argument("--task", required=True, choices=["images", "tokens"])
        parser.add_argument("--task-path", required=True)
        parser.add_argument("--holdout", type=float, default=None, help="Fraction reserved for evaluation")
        parser.add_argument("--optimizer", choices=["adamw", "sgd"], default=None)
        parser.add_argument("--lr", type=float, default=None)
        parser.add_argument("--lrs", type=float, nargs="+", default=None, help="Try several rates, keep the best")
        parser.add_argument("--steps", type=int, default=None)
        parser.add_argument("--batch-size", type=int, default=None)
        parser.add_argument("--eval-every", type=int, default=0)
        parser.add_argument("--seed", type=int, default=0)
        parser.add_argument("--out", default=None, help="Metric curve CSV")

    def train_ghn_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Train a hypernetwork and write its checkpoint.

        Returns:
            Tuple of (success, Checkpoint, error message)
        """
        settings = self.config.get_training_defaults()
        overrides = {
            "meta_batch": args.m, "mini_batch": args.n, "epochs": args.epochs, "base_lr": args.lr,
            "gamma": args.gamma, "optimizer": args.optimizer, "seed": args.seed,
            "checkpoint_every": args.checkpoint_every, "max_steps": args.max_steps,
        }
        settings.update({k: v for k, v in overrides.items() if v is not None})
        if args.amp:
            settings["amp"] = True
        cfg = TrainConfig.from_dict(settings)

        ghn_options = self.config.get_ghn_options()
        ghn_options.update(d=args.d, num_layers=args.layers, num_heads=args.heads, r=args.r, K=args.K)
        ghn = build_ghn(args.variant or self.config.get_ghn_variant(), ghn_options, seed=cfg.seed)
        self.logger.info(f"Hypernetwork: {ghn.config.decoder} decoder, {ghn.parameter_breakdown()['total']:,} parameters")

        arch_dataset = ArchDataset.load(args.arch_dataset)
        task = load_task(args.task, args.task_path)
        log_path = args.log or f"{os.path.splitext(args.out)[0]}.log.csv"
        checkpoint = train(ghn, arch_dataset, task, cfg, out_path=args.out, log_path=log_path, resume=args.resume,
                           progress_callback=logging_callback(self.logger, every=50))
        self.logger.info(f"✅ Checkpoint written to {args.out} after {checkpoint.step} steps (log: {log_path})")
        return True, checkpoint, None

    def finetune_command(self, args: argparse.Namespace) -> CommandResult:
        """
        Fine-tune a target network and report its metric curve.

        Returns:
            Tuple of (success, FinetuneResult, error message)
        """
        if args.params:
            archive = load_archive(args.params)
            spec, params = archive.arch, archive.tensors
        else:
            spec = get_preset(args.preset)
            params = (orth_init if args.init == "orth" else random_init)(spec, args.seed)

        settings = self.config.get_finetune_defaults()
        overrides = {"optimizer": args.optimizer, "lr": args.lr, "steps": args.steps,
                     "batch_size": args.batch_size, "lrs": args.lrs}
        settings.update({k: v for k, v in overrides.items() if v is not None})
        settings.update(eval_every=args.eval_every, seed=args.seed)
        cfg = FinetuneConfig.from_dict(settings)

        task = load_task(args.task, args.task_path)
        eval_task = None
        if args.holdout:
            task, eval_task = task.split(args.holdout)
        result = finetune(params, spec, task, cfg, eval_task=eval_task)
        self.logger.info(f"✅ Fine-tuned at lr={result.lr:g}: {result.final.to_dict()}")
        if args.out:
            pd.DataFrame([e.to_dict() for e in result.curve]).to_csv(args.out, index=False)
        return True, result, None
