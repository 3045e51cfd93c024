"""Portable on-disk formats for feature matrices and run manifests.

The binary feature format is a fixed 24-byte header followed by the
row-major float64 payload, everything little-endian:

    bytes 0..3    magic "RFPF"
    bytes 4..7    format version, u32 (currently 1)
    bytes 8..15   n (rows), u64
    bytes 16..23  d (columns), u64
    bytes 24..    n * d IEEE-754 doubles, row-major

CSV output carries a "node,c0,c1,..." header and uses shortest
round-trip decimal formatting, so reading it back is lossless. All
writers go through a temp file and an atomic rename.
"""

from __future__ import annotations

import hashlib
import os
import struct
import tempfile

import numpy as np

MAGIC = b"RFPF"
VERSION = 1
_HEADER = struct.Struct("<4sIQQ")


def _atomic_write(path, data: bytes) -> None:
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".rfprop-", suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_features_rfpf(path, x: np.ndarray) -> None:
    """Write a feature matrix in the binary format described above."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"features must be two-dimensional, got ndim = {x.ndim}")
    n, d = x.shape
    header = _HEADER.pack(MAGIC, VERSION, n, d)
    payload = x.astype("<f8", copy=False).tobytes(order="C")
    _atomic_write(path, header + payload)


def read_features_rfpf(path) -> np.ndarray:
    """Read a binary feature file back into an (n, d) float64 array."""
    with open(os.fspath(path), "rb") as fh:
        blob = fh.read()
    if len(blob) < _HEADER.size:
        raise ValueError(f"file too short for a feature header: {len(blob)} bytes")
    magic, version, n, d = _HEADER.unpack_from(blob)
    if magic != MAGIC:
        raise ValueError(f"bad magic {magic!r}; not a feature file")
    if version != VERSION:
        raise ValueError(f"unsupported feature format version {version}")
    expected = _HEADER.size + 8 * n * d
    if len(blob) != expected:
        raise ValueError(
            f"file length {len(blob)} does not match header "
            f"(n = {n}, d = {d} needs {expected})"
        )
    flat = np.frombuffer(blob, dtype="<f8", offset=_HEADER.size)
    return flat.astype(np.float64).reshape(n, d)


def write_features_csv(path, x: np.ndarray) -> None:
    """Write features as CSV with header ``node,c0,c1,...``."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"features must be two-dimensional, got ndim = {x.ndim}")
    lines = ["node," + ",".join(f"c{j}" for j in range(x.shape[1]))]
    for i, row in enumerate(x):
        lines.append(f"{i}," + ",".join(repr(float(v)) for v in row))
    _atomic_write(path, ("\n".join(lines) + "\n").encode("ascii"))


def read_features_csv(path) -> np.ndarray:
    """Read a CSV feature file written by write_features_csv."""
    with open(os.fspath(path), "r", encoding="ascii") as fh:
        header = fh.readline().strip()
        if not header.startswith("node,"):
            raise ValueError("feature CSV must start with a 'node,c0,...' header")
        rows = []
        for lineno, line in enumerate(fh, start=2):
            line = line.strip()
            if not line:
                continue
            cells = line.split(",")
            if int(cells[0]) != len(rows):
                raise ValueError(
                    f"line {lineno}: node index {cells[0]} out of order"
                )
            rows.append([float(c) for c in cells[1:]])
    if not rows:
        raise ValueError("feature CSV has no data rows")
    return np.array(rows, dtype=np.float64)


def read_features_any(path) -> np.ndarray:
    """Read a feature file in either format, sniffing the binary magic."""
    with open(os.fspath(path), "rb") as fh:
        head = fh.read(4)
    if head == MAGIC:
        return read_features_rfpf(path)
    return read_features_csv(path)


def sha256_file(path) -> str:
    digest = hashlib.sha256()
    with open(os.fspath(path), "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(path, entries: dict) -> None:
    """Write a flat key=value manifest, one entry per line."""
    lines = []
    for key, value in entries.items():
        text = str(value)
        if "\n" in text or "=" in str(key):
            raise ValueError(f"manifest entry {key!r} is not flat")
        lines.append(f"{key}={text}")
    _atomic_write(path, ("\n".join(lines) + "\n").encode("utf-8"))


def read_manifest(path) -> dict:
    entries = {}
    with open(os.fspath(path), "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            key, _, value = line.partition("=")
            entries[key] = value
    return entries
