import struct

import numpy as np
import pytest

from reldiff import container
from reldiff.dataset import Adjacency, TimeSeriesDataset
from reldiff.errors import CorruptContainerError, UnsupportedVersionError
from reldiff.simulate import SimulationConfig, sample_graph, simulate_kuramoto


def _dataset(seed=0):
    adj = sample_graph(4, 0.5, seed=seed)
    cfg = SimulationConfig(system="kuramoto", n_nodes=4, n_samples=6, seed=seed)
    ds = simulate_kuramoto(adj, cfg)
    ds.split_sizes = (4, 1, 1)
    return ds


def test_round_trip_is_bit_exact(tmp_path):
    ds = _dataset()
    path = tmp_path / "d.dri"
    container.save(ds, path)
    loaded = container.load(path)
    assert np.array_equal(loaded.samples, ds.samples)
    assert loaded.samples.dtype == np.float32
    assert np.array_equal(loaded.observed_mask, ds.observed_mask)
    assert np.array_equal(loaded.adjacency.edges, ds.adjacency.edges)
    assert loaded.split_sizes == ds.split_sizes
    assert loaded.system == ds.system and loaded.seed == ds.seed
    # saving the loaded dataset reproduces the same bytes
    path2 = tmp_path / "d2.dri"
    container.save(loaded, path2)
    assert path.read_bytes() == path2.read_bytes()


def test_header_payload_size_mismatch_is_corrupt(tmp_path):
    ds = _dataset()
    path = tmp_path / "d.dri"
    container.save(ds, path)
    data = bytearray(path.read_bytes())
    truncated = tmp_path / "t.dri"
    truncated.write_bytes(bytes(data[:-20]))
    with pytest.raises(CorruptContainerError):
        container.load(truncated)


def test_version_bump_is_unsupported(tmp_path):
    ds = _dataset()
    path = tmp_path / "d.dri"
    container.save(ds, path)
    raw = path.read_bytes()
    (header_len,) = struct.unpack("<I", raw[4:8])
    header = raw[8 : 8 + header_len].replace(b'"schema_version": 1', b'"schema_version": 9')
    assert len(header) == header_len
    (tmp_path / "v.dri").write_bytes(raw[:8] + header + raw[8 + header_len :])
    with pytest.raises(UnsupportedVersionError):
        container.load(tmp_path / "v.dri")


def test_bad_magic_is_corrupt(tmp_path):
    path = tmp_path / "x.dri"
    path.write_bytes(b"NOPE" + b"\x00" * 64)
    with pytest.raises(CorruptContainerError):
        container.load(path)


def test_missing_file_raises_not_found(tmp_path):
    with pytest.raises(FileNotFoundError):
        container.load(tmp_path / "absent.dri")


def test_trailing_garbage_is_corrupt(tmp_path):
    ds = _dataset()
    path = tmp_path / "d.dri"
    container.save(ds, path)
    with path.open("ab") as fh:
        fh.write(b"\x01")
    with pytest.raises(CorruptContainerError):
        container.load(path)


def test_spring_layout_survives_round_trip(tmp_path):
    from reldiff.simulate import simulate_spring

    adj = sample_graph(3, 0.8, seed=1)
    cfg = SimulationConfig(system="spring", n_nodes=3, n_samples=2, seed=1)
    ds = simulate_spring(adj, cfg)
    container.save(ds, tmp_path / "s.dri")
    loaded = container.load(tmp_path / "s.dri")
    assert loaded.rows_per_entity == 2
    assert loaded.model_samples.shape == ds.model_samples.shape
