"""Five-component spinor fields, spin-2 matrices, pointwise observables,
and the catalog of initial states.

Component storage order is m = 2 - l for spin projection l, i.e.
``data[0] = psi_{+2}, data[1] = psi_{+1}, data[2] = psi_0,
data[3] = psi_{-1}, data[4] = psi_{-2}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError
from .grid import SpectralGrid

_R6 = np.sqrt(6.0) / 2.0

#: Spin-2 angular momentum matrices in the m = 2 - l storage basis.
FX = np.array(
    [
        [0, 1, 0, 0, 0],
        [1, 0, _R6, 0, 0],
        [0, _R6, 0, _R6, 0],
        [0, 0, _R6, 0, 1],
        [0, 0, 0, 1, 0],
    ],
    dtype=np.complex128,
)

FY = 1j * np.array(
    [
        [0, -1, 0, 0, 0],
        [1, 0, -_R6, 0, 0],
        [0, _R6, 0, -_R6, 0],
        [0, 0, _R6, 0, -1],
        [0, 0, 0, 1, 0],
    ],
    dtype=np.complex128,
)

FZ = np.diag([2.0, 1.0, 0.0, -1.0, -2.0]).astype(np.complex128)

#: Spin-singlet pairing matrix: antidiagonal (1,-1,1,-1,1)/sqrt(5).
A_SINGLET = np.zeros((5, 5), dtype=np.complex128)
for _i in range(5):
    A_SINGLET[_i, 4 - _i] = (-1.0) ** _i / np.sqrt(5.0)
del _i

#: Spin projection quantum number per storage slot.
SPIN_LEVELS = np.array([2.0, 1.0, 0.0, -1.0, -2.0])


@dataclass
class SpinorField:
    """A five-component complex field on a SpectralGrid.

    ``data`` has shape (5,) + grid.shape, complex128.
    """

    grid: SpectralGrid
    data: np.ndarray

    def __post_init__(self):
        self.data = np.ascontiguousarray(self.data, dtype=np.complex128)
        expected = (5,) + self.grid.shape
        if self.data.shape != expected:
            raise ValueError(
                f"spinor data shape {self.data.shape} != expected {expected}")

    @classmethod
    def zeros(cls, grid: SpectralGrid) -> "SpinorField":
        return cls(grid, np.zeros((5,) + grid.shape, dtype=np.complex128))

    def copy(self) -> "SpinorField":
        return SpinorField(self.grid, self.data.copy())

    def component(self, level: int) -> np.ndarray:
        """Component psi_l for spin projection l in {2,1,0,-1,-2}."""
        if level not in (2, 1, 0, -1, -2):
            raise ValueError(f"no spin level {level}")
        return self.data[2 - level]


@dataclass
class PointObservables:
    """Pointwise densities entering the interaction terms.

    rho: total density; f_z: longitudinal spin density; f_plus: transverse
    spin density F_x + i F_y; f_norm: |F|; a00: spin-singlet pair amplitude.
    """

    rho: np.ndarray
    f_z: np.ndarray
    f_plus: np.ndarray
    f_norm: np.ndarray
    a00: np.ndarray


def density(psi) -> np.ndarray:
    """Total density rho = sum_l |psi_l|^2 (accepts SpinorField or array)."""
    data = psi.data if isinstance(psi, SpinorField) else np.asarray(psi)
    return (data.real ** 2 + data.imag ** 2).sum(axis=0)


def spin_observables(psi) -> PointObservables:
    """Pointwise rho, F_z, F_+, |F| and A00 of a spinor field."""
    data = psi.data if isinstance(psi, SpinorField) else np.asarray(psi)
    p2, p1, p0, pm1, pm2 = data
    mags = data.real ** 2 + data.imag ** 2
    rho = mags.sum(axis=0)
    f_z = 2.0 * (mags[0] - mags[4]) + (mags[1] - mags[3])
    f_plus = (2.0 * (np.conj(p2) * p1 + np.conj(pm1) * pm2)
              + np.sqrt(6.0) * (np.conj(p1) * p0 + np.conj(p0) * pm1))
    f_norm = np.sqrt(f_z * f_z + f_plus.real ** 2 + f_plus.imag ** 2)
    a00 = (2.0 * p2 * pm2 - 2.0 * p1 * pm1 + p0 * p0) / np.sqrt(5.0)
    return PointObservables(rho=rho, f_z=f_z, f_plus=f_plus,
                            f_norm=f_norm, a00=a00)


def singlet_conjugate(data: np.ndarray) -> np.ndarray:
    """A @ conj(psi) exploiting the antidiagonal structure of A."""
    out = np.conj(data[::-1]).copy()
    out[1] = -out[1]
    out[3] = -out[3]
    out /= np.sqrt(5.0)
    return out


INITIAL_KINDS = ("gaussian_ini1", "gaussian_wide", "gaussian_vortex",
                 "random_smooth", "from_file")


def make_initial(kind: str, grid: SpectralGrid, *, path: str | None = None,
                 seed: int = 0, normalize: bool = False) -> SpinorField:
    """Build one of the cataloged initial states.

    gaussian_ini1   (2D/3D): psi_{+-2} = psi_{+-1} = phi, psi_0 = 2 phi,
                    phi = exp(-|x|^2/2) / (sqrt(8) pi^(d/4)); unit mass.
    gaussian_wide   (2D): psi_{+-2} = psi_{+-1} = phi, psi_0 = 6 sqrt(7) phi,
                    phi = exp(-|x|^2/8) / (32 sqrt(pi)); unit mass.
    gaussian_vortex (2D): psi_{+-2} = phi (x+iy), psi_{+-1} = phi,
                    psi_0 = 6 sqrt(7) phi (x+iy),
                    phi = exp(-|x|^2/2) / (16 sqrt(pi)); unit mass.
    random_smooth   (2D/3D): seeded band-limited random field with a
                    Gaussian decay envelope, rescaled to unit mass.
    from_file       loads a snapshot (see snapshot module); the stored grid
                    must match `grid`.

    States are not renormalized unless ``normalize=True``.
    """
    if kind == "from_file":
        from .snapshot import read_snapshot
        if path is None:
            raise ConfigError("init kind from_file requires a path")
        snap = read_snapshot(path)
        if (snap.grid.dim != grid.dim or snap.grid.N != grid.N
                or abs(snap.grid.L - grid.L) > 1e-12):
            raise ConfigError(
                f"snapshot grid {snap.grid!r} does not match run grid {grid!r}")
        psi = SpinorField(grid, snap.data)
    elif kind == "gaussian_ini1":
        phi = (np.exp(-grid.rsq() / 2.0)
               / (np.sqrt(8.0) * np.pi ** (grid.dim / 4.0)))
        data = np.stack([phi, phi, 2.0 * phi, phi, phi]).astype(np.complex128)
        psi = SpinorField(grid, data)
    elif kind == "gaussian_wide":
        _require_2d(kind, grid)
        phi = np.exp(-grid.rsq() / 8.0) / (32.0 * np.sqrt(np.pi))
        data = np.stack([phi, phi, 6.0 * np.sqrt(7.0) * phi, phi, phi])
        psi = SpinorField(grid, data.astype(np.complex128))
    elif kind == "gaussian_vortex":
        _require_2d(kind, grid)
        x, y = grid.mesh()
        w = x + 1j * y
        phi = np.exp(-grid.rsq() / 2.0) / (16.0 * np.sqrt(np.pi))
        data = np.stack([phi * w, phi + 0j, 6.0 * np.sqrt(7.0) * phi * w,
                         phi + 0j, phi * w])
        psi = SpinorField(grid, data)
    elif kind == "random_smooth":
        rng = np.random.default_rng(seed)
        n = grid.N
        coeffs = (rng.standard_normal((5,) + grid.shape)
                  + 1j * rng.standard_normal((5,) + grid.shape))
        k2 = np.zeros(grid.shape)
        for ax in range(grid.dim):
            idx = grid.axis_modes(ax) * grid.L / np.pi  # integer mode index
            k2 = k2 + idx ** 2
        coeffs *= np.exp(-k2 / (2.0 * (n / 16.0) ** 2))
        field = grid.inverse(coeffs)
        field *= np.exp(-grid.rsq() / (2.0 * (grid.L / 3.0) ** 2))
        psi = SpinorField(grid, field)
        normalize = True
    else:
        raise ConfigError(f"unknown initial kind {kind!r}; "
                          f"choose from {INITIAL_KINDS}")

    if normalize:
        from .diagnostics import mass
        m = mass(psi)
        if m <= 0:
            raise ConfigError("cannot normalize a zero state")
        psi.data /= np.sqrt(m)
    return psi


def _require_2d(kind: str, grid: SpectralGrid):
    if grid.dim != 2:
        raise ConfigError(f"initial kind {kind!r} is defined for dim=2 only")
