import numpy as np
import pytest
from hypothesis import given, strategies as st

from nomacsk import channels as chn
from nomacsk.channels import ChannelBatch, ChannelProfile, ChannelRealization, Scenario


def test_rayleigh_table():
    v1 = chn.RAYLEIGH_PROFILES["V1"]
    assert v1.power_gains == (0.5, 0.5) and v1.delays == (0, 2)
    assert chn.RAYLEIGH_PROFILES["V2"].delays == (0, 2, 4)
    assert chn.RAYLEIGH_PROFILES["V3"].delays == (0, 2, 3, 5)
    for p in chn.RAYLEIGH_PROFILES.values():
        assert sum(p.power_gains) == pytest.approx(1.0, abs=1e-12)


def test_profile_validation():
    with pytest.raises(ValueError):
        ChannelProfile("bad", (2, 2), power_gains=(0.5, 0.4), delays=(0, 1))
    with pytest.raises(ValueError):
        ChannelProfile("bad", (2, 2), power_gains=(0.5, 0.5), delays=(1, 2))


@pytest.mark.parametrize("name", ["V1", "V2", "V3", "V4"])
def test_rayleigh_tap_powers(name):
    prof = chn.RAYLEIGH_PROFILES[name]
    n = 100_000
    b = chn.draw_rayleigh_batch(prof, np.random.default_rng(7), n)
    d = np.asarray(prof.delays)
    pw = np.abs(b.gains[:, d]) ** 2
    # |CN(0, p)|^2 is exponential with mean p and std p
    p = np.asarray(prof.power_gains)
    assert np.all(np.abs(pw.mean(axis=0) - p) < 3 * p / np.sqrt(n))


def test_rayleigh_single_path_unit():
    prof = ChannelProfile("one", (1, 1), power_gains=(1.0,), delays=(0,))
    r = chn.draw_rayleigh(prof, np.random.default_rng(0))
    assert list(r.delays) == [0] and r.gains.shape == (1,)


def test_v2i_profiles():
    p = chn.V2I_PROFILES[Scenario.V2I_PRIMARY]
    assert p.k_factor_db == (9.56, 4.58) and p.n_paths == (5, 8) and p.pdp_decay_ns == 60.0
    a = chn.V2I_PROFILES[Scenario.V2I_AUXILIARY]
    assert a.pdp_decay_ns == 190.0 and a.doppler_rms_hz == 35.4


@pytest.mark.parametrize("scen", [Scenario.V2I_PRIMARY, Scenario.V2I_AUXILIARY])
def test_v2i_structure(scen):
    b = chn.draw_v2i_batch(scen, np.random.default_rng(3), 20_000, max_delay=32)
    assert b.max_delay < 32
    assert b.active[:, 0].all()
    power = np.sum(np.abs(b.gains) ** 2, axis=1)
    # unit average power over realizations
    assert power.mean() == pytest.approx(1.0, abs=0.02)
    r = b[5]
    assert r.delays[0] == 0 and np.all(np.diff(r.delays) > 0)


def test_v2i_forced_line_of_sight():
    prof = ChannelProfile("los", (1, 1), pdp_decay_ns=60.0, k_factor_db=(400.0, 0.0))
    r = chn.draw_v2i(Scenario.V2I_PRIMARY, np.random.default_rng(1), profile=prof)
    np.testing.assert_allclose(r.gains, [1.0], atol=1e-12)


def test_apply_channel_examples():
    s = np.array([1.0, 0, 0], dtype=complex)
    ident = ChannelRealization.from_taps([(1, 0, 0.0)])
    np.testing.assert_allclose(chn.apply_channel(s, ident), s)
    two = ChannelRealization.from_taps([(1, 0), (0.5, 1)])
    np.testing.assert_allclose(chn.apply_channel(s, two), [1, 0.5, 0])
    with pytest.raises(ValueError):
        chn.apply_channel(s, ChannelRealization.from_taps([(1, 0), (1, 3)]))


@given(st.integers(0, 2 ** 31))
def test_apply_channel_conjugate_gains(seed):
    rng = np.random.default_rng(seed)
    s = rng.normal(size=16)
    g = rng.normal(size=3) + 1j * rng.normal(size=3)
    a = ChannelRealization.from_taps([(g[0], 0), (g[1], 2), (g[2], 5)])
    b = ChannelRealization.from_taps([(np.conj(g[0]), 0), (np.conj(g[1]), 2), (np.conj(g[2]), 5)])
    np.testing.assert_allclose(chn.apply_channel(s, b), np.conj(chn.apply_channel(s, a)), atol=1e-12)


@given(st.integers(0, 2 ** 31), st.floats(0, 1e-3))
def test_apply_channel_matches_direct_sum(seed, t0):
    rng = np.random.default_rng(seed)
    beta = 12
    s = rng.normal(size=beta) + 1j * rng.normal(size=beta)
    taps = [(complex(rng.normal(), rng.normal()), d, float(rng.normal(0, 500))) for d in (0, 1, 4)]
    ch = ChannelRealization.from_taps(taps, sample_rate_hz=1e6)
    expect = np.zeros(beta, complex)
    for k in range(beta):
        for g, d, f in taps:
            if k - d >= 0:
                expect[k] += g * np.exp(-2j * np.pi * f * (t0 + k / 1e6)) * s[k - d]
    np.testing.assert_allclose(chn.apply_channel(s, ch, t0), expect, atol=1e-10)


def test_awgn():
    rng = np.random.default_rng(11)
    x = np.ones(8, complex)
    np.testing.assert_array_equal(chn.add_awgn(x, 0.0, rng), x)
    n0 = 0.7
    n = 1_000_000
    noise = chn.add_awgn(np.zeros(n, complex), n0, rng)
    p = np.abs(noise) ** 2
    # |CN(0, n0)|^2 is exponential, std n0
    assert abs(p.mean() - n0) < 3 * n0 / np.sqrt(n)
    lag1 = np.mean(noise[1:] * np.conj(noise[:-1])) / n0
    assert abs(lag1) < 3 / np.sqrt(n)
    with pytest.raises(ValueError):
        chn.add_awgn(x, -1.0, rng)


def test_awgn_per_row():
    rng = np.random.default_rng(0)
    out = chn.add_awgn(np.zeros((2, 200_000), complex), np.array([0.0, 2.0]), rng)
    assert np.all(out[0] == 0)
    assert np.mean(np.abs(out[1]) ** 2) == pytest.approx(2.0, rel=0.02)


def test_degrade_csi():
    rng = np.random.default_rng(4)
    h = (rng.normal(size=200_000) + 1j * rng.normal(size=200_000)) / np.sqrt(2)
    state = rng.bit_generator.state
    assert np.array_equal(chn.degrade_csi(h, 1.0, rng), h)
    assert rng.bit_generator.state == state
    est0 = chn.degrade_csi(h, 0.0, rng)
    corr = np.abs(np.mean(est0 * np.conj(h)))
    assert corr < 3 / np.sqrt(len(h))
    est = chn.degrade_csi(h, 0.85, rng)
    assert np.mean(np.abs(est) ** 2) == pytest.approx(1.0, abs=0.01)
    assert isinstance(chn.degrade_csi(1 + 1j, 0.5, rng), complex)
    with pytest.raises(ValueError):
        chn.degrade_csi(h, 1.2, rng)


def test_dominant_taps():
    b = ChannelBatch.from_realizations([
        ChannelRealization.from_taps([(0.1, 0), (2j, 2)]),
        ChannelRealization.from_taps([(-3, 0)]),
    ])
    np.testing.assert_allclose(chn.dominant_taps(b), [2j, -3])


def test_draw_batch_cycles_profiles():
    rng = np.random.default_rng(0)
    b5 = chn.draw_batch("rayleigh", rng, 4, vehicle=5)
    assert b5.max_delay == 2  # wraps to V1
    assert chn.draw_batch("awgn", rng, 3).gains.shape == (3, 1)
    b = chn.draw_batch("rayleigh", rng, 4, vehicle=1, rayleigh_profiles=["V3"])
    assert b.max_delay == 5
