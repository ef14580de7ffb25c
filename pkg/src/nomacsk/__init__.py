"""Chip-level simulator for a chaotic-shift-keying NOMA vehicular uplink
with a learned demodulator inside successive interference cancellation."""

from .chaos import MapId, generate_cubic, generate_logistic, modulate
from .channels import Scenario, apply_channel, degrade_csi, draw_rayleigh, draw_v2i
from .config import ExperimentConfig, load_config
from .demodulator import DemodulatorModel, build_model, demodulate, train
from .features import build_feature, psd
from .metrics import leakage, mutual_information, secrecy_capacity
from .noma import power_coefficients, superpose
from .rng import seed_stream
from .sic import sic_receive

__all__ = [
    "MapId", "generate_cubic", "generate_logistic", "modulate",
    "Scenario", "apply_channel", "degrade_csi", "draw_rayleigh", "draw_v2i",
    "ExperimentConfig", "load_config",
    "DemodulatorModel", "build_model", "demodulate", "train",
    "build_feature", "psd",
    "leakage", "mutual_information", "secrecy_capacity",
    "power_coefficients", "superpose",
    "seed_stream", "sic_receive",
]
