"""Monte Carlo experiments: BER, eavesdropper security and CSI robustness.

Every trial chunk draws from its own :func:`~nomacsk.rng.seed_stream`, keyed
by experiment, SNR and chunk index, so results do not depend on how many
worker threads run or in which order chunks finish.
"""

from __future__ import annotations

import csv
import io
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Iterable, Optional

import numpy as np

from .adversary import eve_train_and_score
from .config import ExperimentConfig
from .dataset import TrainingSet, generate_dataset
from .demodulator import DemodulatorModel, TrainConfig, TrainHistory, build_model, train
from .features import build_feature
from .link import TxBlock, draw_channels, receive, transmit_block
from .metrics import BerRecord, SecurityReport
from .rng import seed_stream
from .sic import sic_receive_batch

log = logging.getLogger(__name__)

BER_HEADER = ["snr_db", "vehicle", "bits", "errors", "ber", "ci_low", "ci_high"]
SECURITY_HEADER = BER_HEADER + ["eve_ber", "leakage", "secrecy"]
ROBUSTNESS_HEADER = ["rho"] + BER_HEADER


def _fmt(x) -> str:
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return format(float(x), ".10g")


def _chunks(total: int, size: int) -> list[int]:
    return [min(size, total - s) for s in range(0, total, size)]


def _map(fn: Callable, items: list, threads: int) -> list:
    if threads <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _check_model(config: ExperimentConfig, model: DemodulatorModel) -> None:
    if model.beta != config.beta:
        raise ValueError(f"model was built for beta={model.beta}, config has beta={config.beta}")


def count_errors(config: ExperimentConfig, model: DemodulatorModel, snr_db: float,
                 csi_rho: float = 1.0, threads: int = 1, tag: str = "ber") -> np.ndarray:
    """Per-vehicle error counts over ``config.bits_per_point`` trials."""
    sizes = _chunks(config.bits_per_point, config.chunk_size)

    def one(c: int) -> np.ndarray:
        rng = seed_stream(config.master_seed, (tag, float(snr_db), c))
        block = transmit_block(config, rng, sizes[c], snr_db)
        bits, _ = sic_receive_batch(block.received, block.alloc, block.channels, csi_rho, model, rng)
        return np.count_nonzero(bits != block.bits, axis=0)

    # fixed-order reduction over chunks
    parts = _map(one, list(range(len(sizes))), threads)
    return np.sum(parts, axis=0)


def run_ber_sweep(config: ExperimentConfig, model: DemodulatorModel, threads: int = 1,
                  csi_rho: Optional[float] = None) -> list[BerRecord]:
    _check_model(config, model)
    rho = config.csi_rho if csi_rho is None else csi_rho
    records = []
    for snr in config.snr_db:
        errs = count_errors(config, model, snr, rho, threads)
        for i, e in enumerate(errs):
            records.append(BerRecord(snr, i + 1, config.bits_per_point, int(e)))
        log.info("snr=%.1f dB ber=%s", snr, [round(int(e) / config.bits_per_point, 5) for e in errs])
    return records


def ber_rows(records: Iterable[BerRecord]) -> list[list[str]]:
    rows = []
    for r in records:
        lo, hi = r.wilson()
        rows.append([_fmt(r.snr_db), _fmt(r.vehicle), _fmt(r.bits), _fmt(r.errors),
                     _fmt(r.ber), _fmt(lo), _fmt(hi)])
    return rows


def write_csv(path, header: list[str], rows: list[list[str]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    text = buf.getvalue()
    if path is not None:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)
    return text


def train_model(config: ExperimentConfig, dataset: Optional[TrainingSet] = None
                ) -> tuple[DemodulatorModel, TrainHistory]:
    """Build and train the shared demodulator described by ``config``.

    Without ``dataset``, a stage-mixed set is drawn from the ``("dataset",)``
    stream of the master seed.
    """
    if dataset is None:
        dataset = generate_dataset(config, seed_stream(config.master_seed, ("dataset",)))
    model = build_model(config.beta, config.model)
    t = config.training
    hist = train(model, dataset.features, dataset.labels,
                 TrainConfig(epochs=t.epochs, batch_size=t.batch_size, lr=t.lr,
                             val_fraction=t.val_fraction, shuffle_seed=config.master_seed))
    return model, hist


# --------------------------------------------------------------------------
# eavesdropper

def eve_observation(config: ExperimentConfig, rng: np.random.Generator, size: int,
                    snr_db: float) -> tuple[np.ndarray, TxBlock]:
    """Legitimate uplink plus Eve's view of the same chips through her own channels.

    Eve has no CSI, so her time row is the raw real part (unit phase reference).
    """
    block = transmit_block(config, rng, size, snr_db)
    eve_channels = draw_channels(config, rng, size)
    r_eve = receive(block.chips, block.alloc, eve_channels, block.n0, rng)
    return build_feature(r_eve, np.ones(size)), block


@dataclass
class SecurityPoint:
    report: SecurityReport
    legit: list[BerRecord]
    eve_errors: list[int]
    eve_bits: int


def run_security_eval(config: ExperimentConfig, model: DemodulatorModel, eve_settings=None,
                      threads: int = 1) -> list[SecurityPoint]:
    _check_model(config, model)
    eve_settings = config.eve if eve_settings is None else eve_settings
    legit = run_ber_sweep(config, model, threads)
    points = []
    n = config.n_vehicles
    for j, snr in enumerate(config.snr_db):
        rng = seed_stream(config.master_seed, ("eve-train", float(snr)))
        train_feats, train_block = eve_observation(config, rng, eve_settings.intercept_count, snr)
        test_parts = [eve_observation(config, seed_stream(config.master_seed, ("eve-test", float(snr), c)), s, snr)
                      for c, s in enumerate(_chunks(config.bits_per_point, config.chunk_size))]
        test_feats = np.concatenate([p[0] for p in test_parts])
        test_bits = np.concatenate([p[1].bits for p in test_parts])
        eve = eve_train_and_score(eve_settings, train_feats, test_feats, test_bits, config.beta,
                                  config.model, seed=config.master_seed + j,
                                  train_bits=train_block.bits if eve_settings.labels == "truth" else None)
        recs = legit[j * n:(j + 1) * n]
        report = SecurityReport(snr, [r.ber for r in recs], eve.ber)
        log.info("snr=%.1f legit=%s eve=%s leakage=%.4f secrecy=%.4f", snr,
                 [round(b, 4) for b in report.legit_ber], [round(b, 4) for b in eve.ber],
                 report.leakage, report.secrecy)
        points.append(SecurityPoint(report, recs, eve.errors, eve.bits))
    return points


def security_rows(points: list[SecurityPoint]) -> list[list[str]]:
    rows = []
    for p in points:
        base = ber_rows(p.legit)
        for row, eb in zip(base, p.report.eve_ber):
            rows.append(row + [_fmt(eb), _fmt(p.report.leakage), _fmt(p.report.secrecy)])
    return rows


# --------------------------------------------------------------------------
# robustness

def run_robustness_sweep(config: ExperimentConfig, model: DemodulatorModel,
                         rho_list: Optional[list[float]] = None,
                         threads: int = 1) -> dict[float, list[BerRecord]]:
    _check_model(config, model)
    rho_list = config.rho_list if rho_list is None else rho_list
    out = {}
    for rho in rho_list:
        if not 0.0 <= rho <= 1.0:
            raise ValueError(f"rho {rho} outside [0, 1]")
        out[float(rho)] = run_ber_sweep(config, model, threads, csi_rho=float(rho))
    return out


def robustness_rows(sweeps: dict[float, list[BerRecord]]) -> list[list[str]]:
    rows = []
    for rho, recs in sweeps.items():
        rows.extend([_fmt(rho)] + row for row in ber_rows(recs))
    return rows
