"""Error rates, efficiency figures, complexity counts and secrecy metrics."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Reported rows for the comparison systems, kept verbatim as text only.
COMPARISON_TABLE = {
    "MU-OFDM-DCSK": {"complexity": "O((K+1-N)N*beta)", "ee": "(K-N)/K", "se": "(K-N)N/(beta*K)"},
    "SCS-MC-DCSK": {"complexity": "O(M^N)", "ee": "(N/K(K-1))/(N/K(K-1)+1)", "se": "N/K(K-1)log2(M)/(beta*K)"},
    "DL-SCMA-DCSK": {"complexity": "O(n*d_f*K+(1+K)beta)", "ee": "N/(N+1)", "se": "N*log2(M)/(beta*K)"},
    "DL-NOMA-CSK": {"complexity": "O(beta^2+beta*log2(beta))", "ee": "1", "se": "N/beta"},
}


@dataclass
class BerRecord:
    snr_db: float
    vehicle: int
    bits: int
    errors: int

    @property
    def ber(self) -> float:
        return self.errors / self.bits if self.bits else float("nan")

    def wilson(self, z: float = 1.959963984540054) -> tuple[float, float]:
        return wilson_interval(self.errors, self.bits, z)


@dataclass
class SecurityReport:
    snr_db: float
    legit_ber: list[float]
    eve_ber: list[float]
    leakage: float = field(init=False)
    secrecy: float = field(init=False)

    def __post_init__(self):
        self.leakage = leakage(self.eve_ber)
        self.secrecy = secrecy_capacity(self.legit_ber, self.eve_ber)


def ber(tx_bits, rx_bits) -> float:
    tx = np.asarray(tx_bits)
    rx = np.asarray(rx_bits)
    if tx.shape != rx.shape or tx.size == 0:
        raise ValueError("bit arrays must be nonempty and of equal length")
    return float(np.count_nonzero(tx != rx)) / tx.size


def wilson_interval(errors: int, n: int, z: float = 1.959963984540054) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion."""
    if n <= 0:
        return (0.0, 1.0)
    p = errors / n
    denom = 1 + z * z / n
    centre = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    lo = 0.0 if errors == 0 else max(0.0, centre - half)
    hi = 1.0 if errors == n else min(1.0, centre + half)
    return (lo, hi)


def energy_efficiency(e_ref: float, e_info: float) -> float:
    """Fraction of the bit energy that carries information."""
    if e_ref < 0 or e_info < 0 or e_ref + e_info <= 0:
        raise ValueError("energies must be nonnegative with a positive sum")
    return e_info / (e_ref + e_info)


def spectral_efficiency(n_vehicles: int, beta: int) -> float:
    if n_vehicles < 1 or beta < 1:
        raise ValueError("n_vehicles and beta must be >= 1")
    return n_vehicles / beta


def _xlog2x(p):
    p = np.asarray(p, dtype=float)
    return np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)


def mutual_information(err_rate):
    """Binary-symmetric-channel mutual information ``1 - H2(err_rate)``, with 0 log 0 = 0."""
    p = np.asarray(err_rate, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("error rate must lie in [0, 1]")
    mi = 1.0 + _xlog2x(p) + _xlog2x(1.0 - p)
    return float(mi) if mi.ndim == 0 else mi


def leakage(eve_ber) -> float:
    eve = np.asarray(eve_ber, dtype=float)
    if eve.size == 0:
        raise ValueError("need at least one vehicle")
    return float(np.mean(mutual_information(eve)))


def secrecy_capacity(legit_ber, eve_ber) -> float:
    legit = np.asarray(legit_ber, dtype=float)
    eve = np.asarray(eve_ber, dtype=float)
    if legit.shape != eve.shape:
        raise ValueError("legitimate and eavesdropper lists must have equal length")
    return float(np.mean(mutual_information(legit))) - leakage(eve)


@dataclass(frozen=True)
class Complexity:
    psd: float
    conv: float
    attention_proj: float
    attention_map: float
    pooling_fc: float
    output: float

    @property
    def total(self) -> float:
        return self.psd + self.conv + self.attention_proj + self.attention_map + self.pooling_fc + self.output

    @property
    def dominant(self) -> float:
        """The ``n * beta^2`` attention-map term behind the ~0.52M ops figure at beta=128."""
        return self.attention_map


def complexity_estimate(beta: int, n: int = 32, h: int = 8, d_h: int = 64, k_size: int = 3) -> Complexity:
    """Per-symbol operation count broken down by term."""
    if min(beta, n, h, d_h, k_size) < 1:
        raise ValueError("all arguments must be positive")
    return Complexity(
        psd=beta * math.log2(beta),
        conv=n * k_size * beta,
        attention_proj=n * h * d_h * beta,
        attention_map=n * beta ** 2,
        pooling_fc=n * beta,
        output=n,
    )
