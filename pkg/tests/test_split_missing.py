import numpy as np
import pytest

from reldiff.dataset import (
    Adjacency,
    TimeSeriesDataset,
    inject_missing,
    split_dataset,
    with_split_order,
)
from reldiff.errors import InvalidConfigError


def _dataset(n=700, k=5, length=20):
    rng = np.random.default_rng(0)
    samples = rng.standard_normal((n, k, length)).astype(np.float32)
    return TimeSeriesDataset(
        samples=samples,
        observed_mask=np.ones_like(samples, dtype=np.uint8),
        adjacency=Adjacency(k, np.zeros((k, k), dtype=np.uint8)),
    )


def test_split_sizes_match_paper_protocol():
    ds = _dataset(700)
    train, val, test = split_dataset(ds, (500 / 700, 100 / 700, 100 / 700), seed=0)
    assert (train.n_samples, val.n_samples, test.n_samples) == (500, 100, 100)
    assert train.split == "train" and test.split == "test"


def test_all_in_train():
    ds = _dataset(40)
    train, val, test = split_dataset(ds, (1.0, 0.0, 0.0), seed=1)
    assert train.n_samples == 40 and val.n_samples == 0 and test.n_samples == 0


def test_split_is_deterministic_and_disjoint():
    ds = _dataset(60)
    a = split_dataset(ds, (0.5, 0.25, 0.25), seed=9)
    b = split_dataset(ds, (0.5, 0.25, 0.25), seed=9)
    for x, y in zip(a, b):
        assert np.array_equal(x.samples, y.samples)
    stacked = np.concatenate([part.samples for part in a])
    assert stacked.shape[0] == 60
    # cover check: every original sample appears exactly once
    orig = {arr.tobytes() for arr in ds.samples}
    seen = {arr.tobytes() for arr in stacked}
    assert orig == seen


def test_bad_fractions_rejected():
    ds = _dataset(10)
    with pytest.raises(InvalidConfigError):
        split_dataset(ds, (0.5, 0.2, 0.2), seed=0)


def test_with_split_order_blocks_round_trip():
    ds = _dataset(20)
    merged = with_split_order(ds, (0.5, 0.25, 0.25), seed=3)
    assert merged.split_sizes == (10, 5, 5)
    assert merged.subset("val").n_samples == 5
    direct_train, _, _ = split_dataset(ds, (0.5, 0.25, 0.25), seed=3)
    assert np.array_equal(merged.subset("train").samples, direct_train.samples)


def test_inject_missing_zero_ratio_is_identity():
    ds = _dataset(5)
    out = inject_missing(ds, 0.0, seed=0)
    assert np.array_equal(out.samples, ds.samples)
    assert out.observed_mask.all()


def test_inject_missing_exact_count_per_sample():
    ds = _dataset(6, k=5, length=100)
    out = inject_missing(ds, 0.5, seed=4)
    counts = out.observed_mask.reshape(6, -1).sum(axis=1)
    assert (counts == 250).all()
    # values zeroed at missing positions
    assert (out.samples[out.observed_mask == 0] == 0).all()


def test_inject_missing_rng_replay():
    ds = _dataset(3, k=2, length=8)
    out = inject_missing(ds, 0.25, seed=11)
    rng = np.random.default_rng(11)
    cells = 16
    n_keep = int(np.floor(0.75 * cells + 0.5))
    for i in range(3):
        keep = np.zeros(cells, dtype=np.uint8)
        keep[rng.permutation(cells)[:n_keep]] = 1
        np.testing.assert_array_equal(out.observed_mask[i].reshape(-1), keep)


def test_inject_missing_never_unmasks():
    ds = _dataset(4, k=3, length=30)
    first = inject_missing(ds, 0.3, seed=1)
    second = inject_missing(first, 0.3, seed=2)
    assert (second.observed_mask <= first.observed_mask).all()


def test_inject_missing_ratio_bounds():
    ds = _dataset(2)
    with pytest.raises(InvalidConfigError):
        inject_missing(ds, 1.0, seed=0)
