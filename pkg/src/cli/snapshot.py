"""
Binary field snapshots.

Layout (little-endian): magic b"KGZ1", version u32, n_points u32, length f64,
t f64, then n_points f64 each of Re u, Im u, Re rho, Im rho, v, n.
Total size 28 + 48 n_points bytes.
"""

import logging
import struct
from pathlib import Path
from typing import Union

import numpy as np

from ..exceptions import SnapshotError
from ..solitons import FieldState
from ..spectral import make_grid

logger = logging.getLogger(__name__)

MAGIC = b"KGZ1"
VERSION = 1
HEADER = struct.Struct("<4sIIdd")
FLOAT = np.dtype("<f8")


def snapshot_size(n_points: int) -> int:
    return HEADER.size + 6 * FLOAT.itemsize * n_points


def snapshot_bytes(state: FieldState) -> bytes:
    grid = state.grid
    header = HEADER.pack(MAGIC, VERSION, grid.n_points, grid.length, state.t)
    arrays = (np.real(state.u), np.imag(state.u), np.real(state.rho), np.imag(state.rho),
              np.asarray(state.v), np.asarray(state.n))
    return header + b"".join(np.ascontiguousarray(a, dtype=FLOAT).tobytes() for a in arrays)


def snapshot_write(state: FieldState, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(snapshot_bytes(state))
    logger.debug("wrote snapshot %s (t=%.6g)", path, state.t)
    return path


def snapshot_from_bytes(data: bytes) -> FieldState:
    if len(data) < HEADER.size:
        raise SnapshotError(f"snapshot truncated: {len(data)} bytes, header needs {HEADER.size}")
    magic, version, n_points, length, t = HEADER.unpack_from(data)
    if magic != MAGIC:
        raise SnapshotError(f"wrong magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotError(f"unknown snapshot version {version}")
    expected = snapshot_size(n_points)
    if len(data) != expected:
        raise SnapshotError(f"snapshot truncated or oversized: {len(data)} bytes, expected {expected}")

    body = np.frombuffer(data, dtype=FLOAT, offset=HEADER.size).reshape(6, n_points)
    u = np.empty(n_points, dtype=complex)
    u.real, u.imag = body[0], body[1]
    rho = np.empty(n_points, dtype=complex)
    rho.real, rho.imag = body[2], body[3]
    grid = make_grid(n_points, length)
    return FieldState(u=u, rho=rho, v=body[4].astype(float), n=body[5].astype(float), grid=grid, t=t)


def snapshot_read(path: Union[str, Path]) -> FieldState:
    path = Path(path)
    if not path.exists():
        raise SnapshotError(f"snapshot '{path}' not found")
    return snapshot_from_bytes(path.read_bytes())
