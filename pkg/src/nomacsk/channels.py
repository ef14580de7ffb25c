"""Block-fading multipath channels at chip resolution.

A realization is stored densely by chip delay: ``gains[d]`` is the complex
gain of the (merged) path arriving ``d`` chips late and ``active[d]`` says
whether a path exists there. Batches carry a leading trial axis so a whole
Monte Carlo block is drawn and applied with a handful of array operations.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np


class Scenario(str, enum.Enum):
    AWGN = "awgn"
    RAYLEIGH = "rayleigh"
    V2I_PRIMARY = "v2i_primary"
    V2I_AUXILIARY = "v2i_auxiliary"


@dataclass(frozen=True)
class ChannelProfile:
    name: str
    n_paths: tuple[int, int]
    power_gains: Optional[tuple[float, ...]] = None
    delays: Optional[tuple[int, ...]] = None
    pdp_decay_ns: Optional[float] = None
    rms_delay_spread_ns: Optional[float] = None
    k_factor_db: Optional[tuple[float, float]] = None
    doppler_rms_hz: float = 0.0
    sample_rate_hz: float = 100e6
    angular_spread_deg: Optional[float] = None
    speed_kmh: Optional[float] = None
    center_freq_hz: Optional[float] = None

    def __post_init__(self):
        if self.power_gains is not None:
            if self.delays is None or len(self.delays) != len(self.power_gains):
                raise ValueError(f"{self.name}: power_gains and delays must have equal length")
            if abs(sum(self.power_gains) - 1.0) > 1e-9:
                raise ValueError(f"{self.name}: power gains sum to {sum(self.power_gains)}, not 1")
            if list(self.delays) != sorted(set(self.delays)) or self.delays[0] != 0:
                raise ValueError(f"{self.name}: delays must start at 0 and strictly increase")

    @property
    def explicit(self) -> bool:
        return self.power_gains is not None


def _rayleigh(name, gains, delays):
    return ChannelProfile(name=name, n_paths=(len(gains), len(gains)),
                          power_gains=tuple(gains), delays=tuple(delays))


RAYLEIGH_PROFILES: dict[str, ChannelProfile] = {
    "V1": _rayleigh("V1", [1 / 2, 1 / 2], [0, 2]),
    "V2": _rayleigh("V2", [4 / 7, 2 / 7, 1 / 7], [0, 2, 4]),
    "V3": _rayleigh("V3", [4 / 9, 2 / 9, 2 / 9, 1 / 9], [0, 2, 3, 5]),
    # printed as [7/12, 2/12, 1/12, 1/12], which sums to 11/12; ratios kept
    "V4": _rayleigh("V4", [7 / 11, 2 / 11, 1 / 11, 1 / 11], [0, 2, 4, 6]),
}

V2I_PROFILES: dict[Scenario, ChannelProfile] = {
    Scenario.V2I_PRIMARY: ChannelProfile(
        name="primary", n_paths=(5, 8), pdp_decay_ns=60.0, rms_delay_spread_ns=76.1,
        k_factor_db=(9.56, 4.58), doppler_rms_hz=33.3, angular_spread_deg=20.8,
        speed_kmh=95.0, center_freq_hz=3.35e9),
    Scenario.V2I_AUXILIARY: ChannelProfile(
        name="auxiliary", n_paths=(10, 16), pdp_decay_ns=190.0, rms_delay_spread_ns=238.8,
        k_factor_db=(4.22, 4.96), doppler_rms_hz=35.4, angular_spread_deg=36.5,
        speed_kmh=50.0, center_freq_hz=3.35e9),
}


@dataclass
class ChannelRealization:
    """One vehicle's taps for one bit."""

    gains: np.ndarray
    delays: np.ndarray
    doppler_hz: np.ndarray
    scenario: Scenario = Scenario.RAYLEIGH
    sample_rate_hz: float = 100e6

    @property
    def taps(self) -> list[tuple[complex, int, float]]:
        return [(complex(g), int(d), float(f)) for g, d, f in zip(self.gains, self.delays, self.doppler_hz)]

    @classmethod
    def from_taps(cls, taps, scenario=Scenario.RAYLEIGH, sample_rate_hz=100e6) -> "ChannelRealization":
        taps = [t if len(t) == 3 else (t[0], t[1], 0.0) for t in taps]
        g, d, f = zip(*taps)
        return cls(np.array(g, dtype=complex), np.array(d, dtype=int), np.array(f, dtype=float),
                   scenario, sample_rate_hz)


@dataclass
class ChannelBatch:
    """``M`` realizations stored densely over chip delay ``0..D-1``."""

    gains: np.ndarray          # (M, D) complex
    doppler_hz: np.ndarray     # (M, D)
    active: np.ndarray         # (M, D) bool
    scenario: Scenario = Scenario.RAYLEIGH
    sample_rate_hz: float = 100e6

    def __len__(self) -> int:
        return self.gains.shape[0]

    @property
    def max_delay(self) -> int:
        return self.gains.shape[1] - 1

    def __getitem__(self, m: int) -> ChannelRealization:
        d = np.flatnonzero(self.active[m])
        return ChannelRealization(self.gains[m, d].copy(), d, self.doppler_hz[m, d].copy(),
                                  self.scenario, self.sample_rate_hz)

    def take(self, idx) -> "ChannelBatch":
        return ChannelBatch(self.gains[idx], self.doppler_hz[idx], self.active[idx],
                            self.scenario, self.sample_rate_hz)

    def with_gains(self, gains: np.ndarray) -> "ChannelBatch":
        return ChannelBatch(np.where(self.active, gains, 0), self.doppler_hz, self.active,
                            self.scenario, self.sample_rate_hz)

    @classmethod
    def from_realizations(cls, reals: list[ChannelRealization]) -> "ChannelBatch":
        if not reals:
            raise ValueError("empty realization list")
        depth = max(int(r.delays.max()) for r in reals) + 1
        m = len(reals)
        gains = np.zeros((m, depth), dtype=complex)
        dop = np.zeros((m, depth))
        act = np.zeros((m, depth), dtype=bool)
        for i, r in enumerate(reals):
            d = np.asarray(r.delays, dtype=int)
            if np.any(np.diff(d) <= 0) or d[0] != 0:
                raise ValueError("delays must start at 0 and strictly increase")
            gains[i, d] = r.gains
            dop[i, d] = r.doppler_hz
            act[i, d] = True
        return cls(gains, dop, act, reals[0].scenario, reals[0].sample_rate_hz)


def _complex_normal(rng: np.random.Generator, shape) -> np.ndarray:
    """Unit-power circular complex Gaussian."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2.0)


def awgn_batch(size: int) -> ChannelBatch:
    return ChannelBatch(np.ones((size, 1), dtype=complex), np.zeros((size, 1)),
                        np.ones((size, 1), dtype=bool), Scenario.AWGN)


def draw_rayleigh_batch(profile: ChannelProfile, rng: np.random.Generator, size: int) -> ChannelBatch:
    if not profile.explicit:
        raise ValueError(f"{profile.name}: Rayleigh draws need explicit power gains and delays")
    p = np.asarray(profile.power_gains)
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError("power gains must sum to 1")
    d = np.asarray(profile.delays)
    depth = int(d.max()) + 1
    gains = np.zeros((size, depth), dtype=complex)
    gains[:, d] = np.sqrt(p) * _complex_normal(rng, (size, len(p)))
    act = np.zeros((size, depth), dtype=bool)
    act[:, d] = True
    return ChannelBatch(gains, np.zeros((size, depth)), act, Scenario.RAYLEIGH, profile.sample_rate_hz)


def draw_rayleigh(profile: ChannelProfile, rng: np.random.Generator) -> ChannelRealization:
    return draw_rayleigh_batch(profile, rng, 1)[0]


def draw_v2i_batch(scenario, rng: np.random.Generator, size: int, max_delay: Optional[int] = None,
                   profile: Optional[ChannelProfile] = None) -> ChannelBatch:
    """Urban V2I draws: Rician paths on an exponential power-delay profile.

    Path delays after the first are exponential with the profile's decay
    constant and are rounded to whole chips. Paths landing on the same chip
    are merged by complex addition and rescaled to keep unit mean power.
    Paths at ``>= max_delay`` chips would fall entirely outside a
    ``max_delay``-chip bit and are discarded before power normalization.
    """
    scenario = Scenario(scenario)
    if profile is None:
        if scenario not in V2I_PROFILES:
            raise ValueError(f"unknown V2I scenario {scenario!r}")
        profile = V2I_PROFILES[scenario]
    lo, hi = profile.n_paths
    chip_ns = 1e9 / profile.sample_rate_hz
    decay = profile.pdp_decay_ns

    n_paths = rng.integers(lo, hi + 1, size)
    path_idx = np.arange(hi)[None, :]
    exists = path_idx < n_paths[:, None]
    tau = rng.exponential(decay, (size, hi))
    tau[:, 0] = 0.0
    d = np.rint(tau / chip_ns).astype(int)
    keep = exists.copy()
    if max_delay is not None:
        keep &= d < max_delay
    power = np.where(keep, np.exp(-tau / decay), 0.0)
    power /= power.sum(axis=1, keepdims=True)

    k_mean, k_std = profile.k_factor_db
    k_lin = 10.0 ** (rng.normal(k_mean, k_std, size) / 10.0)[:, None]
    los = np.sqrt(k_lin / (k_lin + 1.0))
    scat = np.sqrt(1.0 / (k_lin + 1.0)) * _complex_normal(rng, (size, hi))
    path_gain = np.sqrt(power) * (los + scat)
    path_dop = rng.normal(0.0, profile.doppler_rms_hz, (size, hi))

    d = np.where(keep, d, 0)
    depth = int(d.max()) + 1
    rows = np.broadcast_to(np.arange(size)[:, None], d.shape)
    gains = np.zeros((size, depth), dtype=complex)
    wsum = np.zeros((size, depth))
    amp_sum = np.zeros((size, depth))
    fsum = np.zeros((size, depth))
    idx = (rows[keep], d[keep])
    np.add.at(gains, idx, path_gain[keep])
    np.add.at(wsum, idx, power[keep])
    np.add.at(amp_sum, idx, np.sqrt(power)[keep])
    np.add.at(fsum, idx, (power * path_dop)[keep])
    act = wsum > 0
    # Line-of-sight parts of merged paths add coherently; rescale so each
    # merged tap keeps the expected power of the paths it absorbed.
    expected = los ** 2 * amp_sum ** 2 + wsum / (k_lin + 1.0)
    gains *= np.sqrt(np.divide(wsum, expected, out=np.zeros_like(wsum), where=act))
    dop = np.divide(fsum, wsum, out=np.zeros_like(fsum), where=act)
    return ChannelBatch(gains, dop, act, scenario, profile.sample_rate_hz)


def draw_v2i(scenario, rng: np.random.Generator, max_delay: Optional[int] = None,
             profile: Optional[ChannelProfile] = None) -> ChannelRealization:
    return draw_v2i_batch(scenario, rng, 1, max_delay, profile)[0]


def apply_channel_batch(signals: np.ndarray, channel: ChannelBatch, t0: float = 0.0) -> np.ndarray:
    """Per-bit truncated convolution with Doppler phase rotation.

    ``out[k] = sum_d g_d exp(-j 2 pi f_d (t0 + k Tc)) s[k - d]``, terms with
    ``k - d < 0`` dropped.
    """
    signals = np.asarray(signals)
    if signals.ndim != 2 or signals.shape[0] != len(channel):
        raise ValueError(f"signals {signals.shape} do not match {len(channel)} realizations")
    beta = signals.shape[1]
    used = np.flatnonzero(channel.active.any(axis=0))
    if used.size and used.max() >= beta:
        raise ValueError(f"channel delay {used.max()} >= bit length {beta}")
    out = np.zeros(signals.shape, dtype=complex)
    t = t0 + np.arange(beta) / channel.sample_rate_hz
    has_doppler = np.any(channel.doppler_hz != 0)
    for d in used:
        g = channel.gains[:, d, None]
        if has_doppler:
            g = g * np.exp(-2j * np.pi * channel.doppler_hz[:, d, None] * t[None, :])
            out[:, d:] += g[:, d:] * signals[:, :beta - d]
        else:
            out[:, d:] += g * signals[:, :beta - d]
    return out


def apply_channel(signal, ch: ChannelRealization, t0: float = 0.0) -> np.ndarray:
    signal = np.asarray(signal)
    if np.any(np.asarray(ch.delays) >= len(signal)):
        raise ValueError(f"channel delay {max(ch.delays)} >= bit length {len(signal)}")
    batch = ChannelBatch.from_realizations([ch])
    return apply_channel_batch(signal[None, :], batch, t0)[0]


def add_awgn(signal, n0, rng: np.random.Generator) -> np.ndarray:
    """Add circular complex noise of variance ``n0`` per sample.

    ``n0`` may be a scalar or broadcast against the leading axes of ``signal``.
    """
    n0 = np.asarray(n0, dtype=float)
    if np.any(n0 < 0):
        raise ValueError("noise variance must be nonnegative")
    signal = np.asarray(signal)
    sigma = np.sqrt(n0 / 2.0)
    if sigma.ndim:
        sigma = sigma.reshape(sigma.shape + (1,) * (signal.ndim - sigma.ndim))
    noise = rng.standard_normal(signal.shape) + 1j * rng.standard_normal(signal.shape)
    return signal + sigma * noise


def degrade_csi(h, rho: float, rng: np.random.Generator):
    """Correlation-model channel estimate ``rho*h + sqrt(1-rho^2)*xi``."""
    if not 0.0 <= rho <= 1.0:
        raise ValueError(f"rho must lie in [0, 1], got {rho}")
    h = np.asarray(h, dtype=complex)
    if rho == 1.0:
        return h.copy() if h.ndim else complex(h)
    est = rho * h + np.sqrt(1.0 - rho ** 2) * _complex_normal(rng, h.shape)
    return est if est.ndim else complex(est)


def degrade_batch(channel: ChannelBatch, rho: float, rng: np.random.Generator) -> ChannelBatch:
    """Receiver view of ``channel`` with each active tap degraded by ``rho``."""
    if rho == 1.0:
        return channel
    return channel.with_gains(degrade_csi(channel.gains, rho, rng))


def dominant_taps(channel: ChannelBatch, t_ref: float = 0.0) -> np.ndarray:
    """Gain of the strongest active tap per realization, rotated to ``t_ref``."""
    mag = np.where(channel.active, np.abs(channel.gains), -1.0)
    idx = mag.argmax(axis=1)
    rows = np.arange(len(channel))
    g = channel.gains[rows, idx]
    f = channel.doppler_hz[rows, idx]
    return g * np.exp(-2j * np.pi * f * t_ref)


def draw_batch(scenario, rng: np.random.Generator, size: int, vehicle: int = 1,
               beta: Optional[int] = None, rayleigh_profiles: Optional[list[str]] = None) -> ChannelBatch:
    """Draw ``size`` realizations for vehicle ``vehicle`` (1-based) of a scenario.

    Rayleigh vehicles cycle through ``rayleigh_profiles`` (default V1..V4).
    """
    scenario = Scenario(scenario)
    if scenario is Scenario.AWGN:
        return awgn_batch(size)
    if scenario is Scenario.RAYLEIGH:
        names = rayleigh_profiles or list(RAYLEIGH_PROFILES)
        return draw_rayleigh_batch(RAYLEIGH_PROFILES[names[(vehicle - 1) % len(names)]], rng, size)
    return draw_v2i_batch(scenario, rng, size, max_delay=beta)
