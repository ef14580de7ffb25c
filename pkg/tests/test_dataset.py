import numpy as np
import pytest

from nomacsk.config import ExperimentConfig, TrainingSettings
from nomacsk.dataset import generate_dataset


def cfg(**kw):
    base = dict(n_vehicles=4, beta=16, scenario="rayleigh")
    base.update(kw)
    return ExperimentConfig(**base)


def test_labels_balanced_and_stages_uniform():
    ds = generate_dataset(cfg(), np.random.default_rng(0), size=100_000, chunk_size=25_000)
    assert ds.features.shape == (100_000, 2, 16) and ds.features.dtype == np.float32
    assert 0.49 <= ds.labels.mean() <= 0.51
    counts = np.bincount(ds.stages, minlength=5)[1:]
    expect = len(ds) / 4
    sigma = np.sqrt(len(ds) * 0.25 * 0.75)
    assert np.all(np.abs(counts - expect) < 3 * sigma)
    assert np.all((ds.snr_db >= 24) & (ds.snr_db <= 28))


def test_single_user_awgn_features():
    c = cfg(n_vehicles=1, scenario="awgn")
    ds = generate_dataset(c, np.random.default_rng(1), size=200)
    assert np.all(ds.stages == 1)
    assert np.all(ds.features[:, 1] >= 0)
    # PSD row is the spectrum of signal + noise, whose real part is row 0
    assert np.all(np.abs(ds.features[:, 0]).max(axis=1) > 0)


def test_teacher_forced_stage_two_residual():
    # noiseless AWGN: stage 1 feature PSD is that of the raw mixture
    c = cfg(n_vehicles=2, scenario="awgn")
    ds = generate_dataset(c, np.random.default_rng(2), size=50, snr_range_db=(300, 300), stage=1)
    assert np.all(ds.stages == 1)
    np.testing.assert_allclose(ds.features[:, 1].sum(axis=1),
                               16 * (ds.features[:, 0] ** 2).sum(axis=1), rtol=1e-3)


def test_deterministic_given_rng():
    a = generate_dataset(cfg(), np.random.default_rng(5), size=300)
    b = generate_dataset(cfg(), np.random.default_rng(5), size=300)
    assert np.array_equal(a.features, b.features) and np.array_equal(a.labels, b.labels)
    f, y, s, snr = next(iter(a))
    assert f.shape == (2, 16) and y in (0, 1) and 1 <= s <= 4


def test_errors():
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        generate_dataset(cfg(), rng, size=10, snr_range_db=(30, 20))
    with pytest.raises(ValueError):
        generate_dataset(cfg(), rng, size=10, stage=5)
    with pytest.raises(ValueError):
        TrainingSettings(snr_range_db=(5, 1))
