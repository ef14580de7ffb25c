"""Batch command line: ``nomacsk <subcommand> --config cfg.yaml ...``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

import numpy as np

from . import nn, sim
from .config import ExperimentConfig, load_config
from .dataset import TrainingSet, generate_dataset
from .demodulator import DemodulatorModel, build_model
from .metrics import complexity_estimate, energy_efficiency, spectral_efficiency
from .rng import seed_stream

log = logging.getLogger("nomacsk")


def _config(args) -> ExperimentConfig:
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    if args.seed is not None:
        cfg = cfg.replace(master_seed=args.seed)
    return cfg


def _out_dir(args, cfg) -> Path:
    out = Path(args.out or cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _model(args, cfg) -> DemodulatorModel:
    if not args.model:
        raise SystemExit("--model is required")
    return DemodulatorModel.load(args.model)


def save_dataset(path, ds: TrainingSet) -> None:
    nn.save_tensors(path, {"features": ds.features, "labels": ds.labels,
                           "stages": ds.stages, "snr_db": ds.snr_db})


def load_dataset(path) -> TrainingSet:
    t = nn.load_tensors(path)
    return TrainingSet(t["features"], t["labels"].astype(np.int8),
                       t["stages"].astype(np.int64), t["snr_db"].astype(np.float64))


def cmd_dataset_gen(args) -> int:
    cfg = _config(args)
    ds = generate_dataset(cfg, seed_stream(cfg.master_seed, ("dataset",)))
    path = _out_dir(args, cfg) / "dataset.dncw"
    save_dataset(path, ds)
    print(f"wrote {len(ds)} samples to {path}")
    return 0


def cmd_train(args) -> int:
    cfg = _config(args)
    if not args.model:
        raise SystemExit("--model is required (output path)")
    ds = load_dataset(args.dataset) if args.dataset else None
    model, hist = sim.train_model(cfg, ds)
    Path(args.model).parent.mkdir(parents=True, exist_ok=True)
    model.save(args.model)
    rows = [[str(e + 1), sim._fmt(a), sim._fmt(b), sim._fmt(c), sim._fmt(d)]
            for e, (a, b, c, d) in enumerate(zip(hist.train_loss, hist.val_loss, hist.val_accuracy, hist.lr))]
    sim.write_csv(_out_dir(args, cfg) / "history.csv",
                  ["epoch", "train_loss", "val_loss", "val_accuracy", "lr"], rows)
    print(f"saved model to {args.model} (best epoch {hist.best_epoch + 1})")
    return 0


def cmd_ber(args) -> int:
    cfg = _config(args)
    recs = sim.run_ber_sweep(cfg, _model(args, cfg), threads=args.threads)
    sys.stdout.write(sim.write_csv(_out_dir(args, cfg) / "ber.csv", sim.BER_HEADER, sim.ber_rows(recs)))
    return 0


def cmd_security(args) -> int:
    cfg = _config(args)
    pts = sim.run_security_eval(cfg, _model(args, cfg), threads=args.threads)
    sys.stdout.write(sim.write_csv(_out_dir(args, cfg) / "security.csv", sim.SECURITY_HEADER,
                                   sim.security_rows(pts)))
    return 0


def cmd_robustness(args) -> int:
    cfg = _config(args)
    sweeps = sim.run_robustness_sweep(cfg, _model(args, cfg), threads=args.threads)
    sys.stdout.write(sim.write_csv(_out_dir(args, cfg) / "robustness.csv", sim.ROBUSTNESS_HEADER,
                                   sim.robustness_rows(sweeps)))
    return 0


def cmd_info(args) -> int:
    cfg = _config(args)
    model = build_model(cfg.beta, cfg.model)
    print(f"vehicles={cfg.n_vehicles} beta={cfg.beta} scenario={cfg.scenario.value}")
    print("layer output shapes and learnable parameters:")
    counts = model.param_counts()
    for name, shape in model.output_shapes().items():
        print(f"  {name:8s} {'x'.join(map(str, shape)):>10s} {counts.get(name, 0):>8d}")
    print(f"  total parameters {sum(counts.values())}")
    c = complexity_estimate(cfg.beta, cfg.model.n_filters, cfg.model.heads, cfg.model.head_dim,
                            cfg.model.kernel_size)
    print(f"complexity per symbol: total={c.total:.0f} dominant(n*beta^2)={c.dominant:.0f}")
    print(f"energy efficiency={energy_efficiency(0.0, 1.0):g} "
          f"spectral efficiency={spectral_efficiency(cfg.n_vehicles, cfg.beta):g} bit/chip")
    return 0


COMMANDS = {
    "dataset-gen": cmd_dataset_gen,
    "train": cmd_train,
    "ber": cmd_ber,
    "security": cmd_security,
    "robustness": cmd_robustness,
    "info": cmd_info,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="nomacsk", description="Chaotic NOMA uplink simulator.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        s.add_argument("--config", help="YAML experiment config")
        s.add_argument("--model", help="weight file (DNCW) with a .json sidecar")
        s.add_argument("--out", help="output directory (default: config output_dir)")
        s.add_argument("--seed", type=int, help="override master_seed")
        s.add_argument("--threads", type=int, default=1)
        if name == "train":
            s.add_argument("--dataset", help="dataset written by dataset-gen")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    if args.seed is not None and not 0 <= args.seed < 2 ** 64:
        raise SystemExit("--seed must be an unsigned 64-bit integer")
    if args.threads < 1:
        raise SystemExit("--threads must be >= 1")
    return COMMANDS[args.command](args)


if __name__ == "__main__":
    sys.exit(main())
