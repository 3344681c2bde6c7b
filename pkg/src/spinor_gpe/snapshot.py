"""Binary checkpoint format for five-component fields.

Layout (all little-endian, 48-byte header)::

    bytes 0..3    magic  b"SP2B"
    bytes 4..7    u32    format version (currently 1)
    bytes 8..11   u32    dim (2 or 3)
    bytes 12..15  u32    N  (grid points per axis)
    bytes 16..23  f64    L  (half box length)
    bytes 24..31  f64    t  (field time)
    bytes 32..39  f64    omega (frame angular velocity)
    bytes 40..47  f64    gamma_soc (derivative-coupling strength)
    bytes 48..    payload

The payload holds the five components in level order 2, 1, 0, -1, -2,
each as a C-ordered N^dim block of complex128 (f64 real, f64 imaginary)
values: exactly ``5 * N**dim * 16`` bytes.  Reads validate the magic,
version, header plausibility, and exact payload length, raising
:class:`~spinor_gpe.errors.SnapshotFormatError`; writes followed by reads
round-trip bit-exactly.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import SnapshotFormatError
from .grid import SpectralGrid, build_grid
from .state import SpinorField

__all__ = ["MAGIC", "VERSION", "HEADER_SIZE", "Snapshot",
           "write_snapshot", "read_snapshot"]

MAGIC = b"SP2B"
VERSION = 1
_HEADER = struct.Struct("<4sIII4d")
HEADER_SIZE = _HEADER.size  # 48


@dataclass(frozen=True)
class Snapshot:
    """A loaded checkpoint: the field plus its stored metadata."""

    grid: SpectralGrid
    data: np.ndarray
    t: float
    omega: float
    gamma_soc: float

    @property
    def field(self) -> SpinorField:
        return SpinorField(self.grid, self.data)


def write_snapshot(path, psi: SpinorField, t: float = 0.0, *,
                   omega: float = 0.0, gamma_soc: float = 0.0) -> None:
    """Serialize a field (with its time and frame metadata) to ``path``."""
    grid = psi.grid
    header = _HEADER.pack(MAGIC, VERSION, grid.dim, grid.N,
                          grid.L, float(t), float(omega), float(gamma_soc))
    payload = np.ascontiguousarray(psi.data, dtype=np.dtype("<c16"))
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(payload.tobytes())


def read_snapshot(path) -> Snapshot:
    """Load and validate a checkpoint written by :func:`write_snapshot`."""
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER_SIZE:
        raise SnapshotFormatError(
            f"{path}: truncated header ({len(raw)} bytes, need {HEADER_SIZE})")
    magic, version, dim, n, box, t, omega, gamma_soc = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise SnapshotFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise SnapshotFormatError(
            f"{path}: unsupported format version {version}; "
            f"this reader supports version {VERSION}")
    if dim not in (2, 3):
        raise SnapshotFormatError(f"{path}: invalid dim {dim}")
    if n < 4 or n % 2 != 0:
        raise SnapshotFormatError(f"{path}: invalid N {n}")
    if not (np.isfinite(box) and box > 0):
        raise SnapshotFormatError(f"{path}: invalid box length {box!r}")

    expected = 5 * n ** dim * 16
    got = len(raw) - HEADER_SIZE
    if got != expected:
        raise SnapshotFormatError(
            f"{path}: payload is {got} bytes, expected {expected} "
            f"(5 * {n}^{dim} complex values)")

    grid = build_grid(dim, box, n)
    data = np.frombuffer(raw, dtype=np.dtype("<c16"), offset=HEADER_SIZE)
    data = data.reshape((5,) + grid.shape).astype(np.complex128)
    return Snapshot(grid=grid, data=data, t=t, omega=omega, gamma_soc=gamma_soc)
