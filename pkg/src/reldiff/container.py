"""Single-file dataset container.

Layout (bit-exact, little-endian):

    magic            4 bytes, b"DRI1"
    header length    uint32
    header           UTF-8 JSON, exactly `header length` bytes
    payload          float32, N*R*L values, row-major (N, R, L)
    mask payload     uint8, N*R*L values
    adjacency        uint8, K*K values

The header records schema_version, shape, dtype tag, system name, seed,
graph metadata and split boundaries.  ``load(save(d))`` reproduces the
dataset bit-exactly.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Any

import numpy as np

from .dataset import Adjacency, TimeSeriesDataset
from .errors import CorruptContainerError, UnsupportedVersionError

MAGIC = b"DRI1"
SCHEMA_VERSION = 1
_DTYPE_TAG = "<f4"


def save(dataset: TimeSeriesDataset, path: str | Path) -> None:
    """Write the dataset to ``path`` in the container format."""
    path = Path(path)
    n, rows, length = dataset.samples.shape
    header: dict[str, Any] = {
        "schema_version": SCHEMA_VERSION,
        "shape": [n, rows, length],
        "dtype": _DTYPE_TAG,
        "system": dataset.system,
        "seed": dataset.seed,
        "n_nodes": dataset.adjacency.n_nodes,
        "directed": dataset.adjacency.directed,
        "rows_per_entity": dataset.rows_per_entity,
        "split": dataset.split,
        "split_sizes": list(dataset.split_sizes) if dataset.split_sizes else None,
        "meta": dataset.meta,
    }
    header_bytes = json.dumps(header, sort_keys=True).encode("utf-8")
    with path.open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<I", len(header_bytes)))
        fh.write(header_bytes)
        fh.write(np.ascontiguousarray(dataset.samples, dtype="<f4").tobytes())
        fh.write(np.ascontiguousarray(dataset.observed_mask, dtype=np.uint8).tobytes())
        fh.write(np.ascontiguousarray(dataset.adjacency.edges, dtype=np.uint8).tobytes())


def _read_exact(fh, n_bytes: int, what: str) -> bytes:
    data = fh.read(n_bytes)
    if len(data) != n_bytes:
        raise CorruptContainerError(
            f"truncated container: expected {n_bytes} bytes for {what}, got {len(data)}"
        )
    return data


def load(path: str | Path) -> TimeSeriesDataset:
    """Read a dataset container; validates magic, version and payload sizes."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no container at {path}")
    with path.open("rb") as fh:
        magic = fh.read(4)
        if magic != MAGIC:
            raise CorruptContainerError(f"bad magic {magic!r}, expected {MAGIC!r}")
        (header_len,) = struct.unpack("<I", _read_exact(fh, 4, "header length"))
        header_bytes = _read_exact(fh, header_len, "header")
        try:
            header = json.loads(header_bytes.decode("utf-8"))
        except (UnicodeDecodeError, json.JSONDecodeError) as exc:
            raise CorruptContainerError(f"unreadable header: {exc}") from exc
        version = header.get("schema_version")
        if version != SCHEMA_VERSION:
            raise UnsupportedVersionError(
                f"container schema_version {version!r} not supported "
                f"(this build reads version {SCHEMA_VERSION})"
            )
        try:
            n, rows, length = (int(v) for v in header["shape"])
            n_nodes = int(header["n_nodes"])
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptContainerError(f"malformed header fields: {exc}") from exc
        if header.get("dtype") != _DTYPE_TAG:
            raise CorruptContainerError(f"unknown dtype tag {header.get('dtype')!r}")
        n_cells = n * rows * length
        payload = _read_exact(fh, n_cells * 4, "payload")
        mask_payload = _read_exact(fh, n_cells, "mask payload")
        adj_payload = _read_exact(fh, n_nodes * n_nodes, "adjacency payload")
        trailing = fh.read(1)
        if trailing:
            raise CorruptContainerError("trailing bytes after adjacency payload")
    samples = np.frombuffer(payload, dtype="<f4").reshape(n, rows, length)
    mask = np.frombuffer(mask_payload, dtype=np.uint8).reshape(n, rows, length)
    edges = np.frombuffer(adj_payload, dtype=np.uint8).reshape(n_nodes, n_nodes)
    adjacency = Adjacency(n_nodes, edges, directed=bool(header.get("directed", False)))
    split_sizes = header.get("split_sizes")
    return TimeSeriesDataset(
        samples=samples.copy(),
        observed_mask=mask.copy(),
        adjacency=adjacency,
        system=header.get("system", "unknown"),
        seed=header.get("seed"),
        rows_per_entity=int(header.get("rows_per_entity", 1)),
        split=header.get("split"),
        split_sizes=tuple(split_sizes) if split_sizes else None,
        meta=header.get("meta", {}),
    )
