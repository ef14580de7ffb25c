"""Experiment configuration, loaded from YAML.

Top-level keys mirror :class:`ExperimentConfig`; ``model``, ``training`` and
``eve`` are nested sections. Unknown keys are rejected so typos fail loudly.
See ``configs/`` for worked examples.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

import yaml

from .channels import Scenario
from .demodulator import ModelConfig


@dataclass
class TrainingSettings:
    epochs: int = 20
    samples: int = 100_000
    batch_size: int = 64
    lr: float = 1e-3
    snr_range_db: tuple[float, float] = (24.0, 28.0)
    val_fraction: float = 0.1

    def __post_init__(self):
        self.snr_range_db = tuple(float(v) for v in self.snr_range_db)
        lo, hi = self.snr_range_db
        if len(self.snr_range_db) != 2 or lo > hi:
            raise ValueError(f"invalid training SNR range {self.snr_range_db}")
        if self.batch_size < 2:
            raise ValueError("batch_size must be >= 2")


@dataclass
class EveSettings:
    intercept_count: int = 8192
    epochs: int = 5
    batch_size: int = 64
    lr: float = 1e-3
    kmeans_iters: int = 50
    # control arms: "pseudo" (2-means), "truth" (labels leak), "shuffled" (random)
    labels: str = "pseudo"

    def __post_init__(self):
        if self.intercept_count < self.batch_size:
            raise ValueError("intercept_count must be at least one batch")
        if self.labels not in ("pseudo", "truth", "shuffled"):
            raise ValueError(f"unknown eve label mode {self.labels!r}")


@dataclass
class ExperimentConfig:
    n_vehicles: int = 4
    beta: int = 64
    scenario: Scenario = Scenario.RAYLEIGH
    rayleigh_profiles: Optional[list[str]] = None
    snr_db: list[float] = field(default_factory=lambda: [0.0, 6.0, 12.0, 18.0, 24.0, 30.0])
    csi_rho: float = 1.0
    rho_list: list[float] = field(default_factory=lambda: [1.0, 0.95, 0.85])
    bits_per_point: int = 10_000
    chunk_size: int = 2_000
    master_seed: int = 0
    reference_power: float = 1.0
    output_dir: str = "out"
    model: ModelConfig = field(default_factory=ModelConfig)
    training: TrainingSettings = field(default_factory=TrainingSettings)
    eve: EveSettings = field(default_factory=EveSettings)

    def __post_init__(self):
        self.scenario = Scenario(self.scenario)
        self.snr_db = [float(s) for s in self.snr_db]
        if not self.snr_db:
            raise ValueError("snr grid must be nonempty")
        if self.snr_db != sorted(self.snr_db):
            raise ValueError("snr grid must be sorted ascending")
        if self.bits_per_point < 1000:
            raise ValueError("bits_per_point must be >= 1000")
        if self.beta < 8:
            raise ValueError("beta must be >= 8")
        if self.n_vehicles < 1:
            raise ValueError("n_vehicles must be >= 1")
        if not 0.0 <= self.csi_rho <= 1.0:
            raise ValueError("csi_rho must lie in [0, 1]")
        for r in self.rho_list:
            if not 0.0 <= r <= 1.0:
                raise ValueError(f"rho {r} outside [0, 1]")
        if self.chunk_size < 1:
            raise ValueError("chunk_size must be positive")

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        data = dict(data or {})
        _reject_unknown(cls, data, "experiment")
        for key, sub in (("model", ModelConfig), ("training", TrainingSettings), ("eve", EveSettings)):
            if key in data and not isinstance(data[key], sub):
                section = dict(data[key] or {})
                _reject_unknown(sub, section, key)
                data[key] = sub(**section)
        return cls(**data)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["scenario"] = self.scenario.value
        d["training"]["snr_range_db"] = list(self.training.snr_range_db)
        return d

    def replace(self, **changes) -> "ExperimentConfig":
        d = self.to_dict()
        d.update(changes)
        return ExperimentConfig.from_dict(d)


def _reject_unknown(cls, data: dict, where: str) -> None:
    known = {f.name for f in fields(cls)}
    extra = set(data) - known
    if extra:
        raise ValueError(f"unknown key(s) in {where} section: {sorted(extra)}")


def load_config(path) -> ExperimentConfig:
    with open(Path(path)) as fh:
        return ExperimentConfig.from_dict(yaml.safe_load(fh))


def dump_config(cfg: ExperimentConfig, path) -> None:
    with open(Path(path), "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=False)
