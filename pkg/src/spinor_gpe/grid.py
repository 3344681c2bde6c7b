"""Uniform periodic grid and counted 1D FFT primitives.

Conventions, fixed package-wide:

* Fields are C-ordered numpy arrays whose trailing ``dim`` axes are the
  spatial axes in (x, y) order for dim=2 and (x, y, z) for dim=3, so x is
  the slowest-varying spatial index.  Spinor-valued fields carry one extra
  leading axis of length 5.
* Nodes along each axis: ``x_j = -L + j*h`` with ``h = 2L/N``,
  ``j = 0..N-1``; the node set covers ``[-L, L)`` and is symmetric under
  the wrap map ``j -> (N - j) mod N``.
* Wavenumbers ``nu_p = pi*p/L`` stored in FFT-natural order
  ``p = 0, 1, .., N/2-1, -N/2, .., -1``.  The Nyquist mode ``p = -N/2`` is
  kept and propagated like every other mode (never zeroed).
* ``forward`` carries the 1/N normalization per axis, ``inverse`` carries
  none, so ``inverse(forward(f)) == f`` to roundoff.

All one-dimensional transforms funnel through :func:`fft1` / :func:`ifft1`
so that the package-level counter sees every line transform.  A transform
of an array along one axis counts as ``size/len(axis)`` one-dimensional
transforms (one per line).  SPINOR_THREADS caps the FFT worker count.
"""

from __future__ import annotations

import os

import numpy as np
import scipy.fft as _sfft


def _workers() -> int:
    try:
        w = int(os.environ.get("SPINOR_THREADS", "1"))
    except ValueError:
        w = 1
    return max(1, w)


class FFTCounter:
    """Tallies one-dimensional FFT/iFFT line transforms.

    ``pairs`` is the number of forward/inverse pairs, the unit used in the
    operation-count audit of the linear step.
    """

    def __init__(self):
        self.fft_lines = 0
        self.ifft_lines = 0

    def reset(self):
        self.fft_lines = 0
        self.ifft_lines = 0

    @property
    def pairs(self) -> int:
        return (self.fft_lines + self.ifft_lines) // 2

    def __repr__(self):
        return (f"FFTCounter(fft_lines={self.fft_lines}, "
                f"ifft_lines={self.ifft_lines}, pairs={self.pairs})")


#: Package-level transform counter. Reset it, run a step, read ``pairs``.
fft_counter = FFTCounter()


def fft1(arr: np.ndarray, axis: int) -> np.ndarray:
    """Unnormalized FFT along one axis, counted per line."""
    fft_counter.fft_lines += arr.size // arr.shape[axis]
    return _sfft.fft(arr, axis=axis, workers=_workers())


def ifft1(arr: np.ndarray, axis: int) -> np.ndarray:
    """Inverse FFT along one axis (1/N normalization), counted per line."""
    fft_counter.ifft_lines += arr.size // arr.shape[axis]
    return _sfft.ifft(arr, axis=axis, workers=_workers())


class SpectralGrid:
    """Square/cubic periodic grid on [-L, L)^dim with N nodes per axis.

    Parameters
    ----------
    dim : int
        Spatial dimension, 2 or 3.
    L : float
        Half-width of the domain.
    N : int
        Nodes per axis; must be even so the wrap map j -> (N - j) mod N
        fixes the node x_0 = -L and pairs the rest symmetrically.
    """

    def __init__(self, dim: int, L: float, N: int):
        if dim not in (2, 3):
            raise ValueError(f"dim must be 2 or 3, got {dim}")
        if L <= 0:
            raise ValueError(f"L must be positive, got {L}")
        if N < 4 or N % 2 != 0:
            raise ValueError(f"N must be even and >= 4, got {N}")
        self.dim = int(dim)
        self.L = float(L)
        self.N = int(N)
        self.h = 2.0 * self.L / self.N
        self.x = -self.L + self.h * np.arange(self.N)
        self.nu = (np.pi / self.L) * _sfft.fftfreq(self.N, d=1.0 / self.N)
        self.shape = (self.N,) * self.dim

    def __repr__(self):
        return f"SpectralGrid(dim={self.dim}, L={self.L}, N={self.N})"

    def __eq__(self, other):
        return (isinstance(other, SpectralGrid)
                and self.dim == other.dim
                and self.L == other.L
                and self.N == other.N)

    def axis_coords(self, axis: int, ndim: int | None = None) -> np.ndarray:
        """Node coordinates shaped to broadcast along spatial axis `axis`.

        `axis` counts spatial axes (0 = x); `ndim` is the total rank of the
        array the result should broadcast against (defaults to dim).
        """
        if ndim is None:
            ndim = self.dim
        shape = [1] * ndim
        shape[ndim - self.dim + axis] = self.N
        return self.x.reshape(shape)

    def axis_modes(self, axis: int, ndim: int | None = None) -> np.ndarray:
        """Wavenumbers nu_p shaped to broadcast along spatial axis `axis`."""
        if ndim is None:
            ndim = self.dim
        shape = [1] * ndim
        shape[ndim - self.dim + axis] = self.N
        return self.nu.reshape(shape)

    def mesh(self) -> tuple[np.ndarray, ...]:
        """Sparse coordinate mesh (x, y[, z]) for pointwise field evaluation."""
        return tuple(self.axis_coords(a) for a in range(self.dim))

    def rsq(self) -> np.ndarray:
        """|x|^2 on the grid."""
        out = np.zeros(self.shape)
        for c in self.mesh():
            out = out + c * c
        return out

    # -- full-grid transforms (documented 1/N-per-axis forward convention) --

    def forward(self, f: np.ndarray) -> np.ndarray:
        """Forward transform over the trailing dim axes, 1/N per axis."""
        out = np.asarray(f, dtype=np.complex128)
        for ax in range(out.ndim - self.dim, out.ndim):
            out = fft1(out, axis=ax)
        return out / self.N ** self.dim

    def inverse(self, c: np.ndarray) -> np.ndarray:
        """Inverse transform over the trailing dim axes, no normalization."""
        out = np.asarray(c, dtype=np.complex128)
        for ax in range(out.ndim - self.dim, out.ndim):
            out = ifft1(out, axis=ax)
        return out * self.N ** self.dim

    def spectral_derivative(self, f: np.ndarray, axis: int) -> np.ndarray:
        """d/dx_axis via multiplication by i*nu in Fourier space.

        `axis` counts spatial axes (0 = x, 1 = y, 2 = z) regardless of any
        leading component axes on `f`.
        """
        arr = np.asarray(f, dtype=np.complex128)
        ax = arr.ndim - self.dim + axis
        coeffs = fft1(arr, axis=ax)
        coeffs *= 1j * self.axis_modes(axis, arr.ndim)
        return ifft1(coeffs, axis=ax)


def build_grid(dim: int, L: float, N: int) -> SpectralGrid:
    """Construct a SpectralGrid (thin functional wrapper)."""
    return SpectralGrid(dim, L, N)
