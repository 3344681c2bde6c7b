"""Rotating-frame coordinate maps realized by FFT shears.

A planar rotation by theta is factored as three axis shears,

    f(R(theta) x) = S_a T_b S_a f,   a = tan(theta/2), b = -sin(theta),

where ``(S_a f)(x, y) = f(x + a y, y)`` and ``(T_b f)(x, y) = f(x, y + b x)``;
rotation acts in the x-y plane (R(theta) = [[cos, sin], [-sin, cos]]).
Each shear is exact on the trigonometric interpolant: transform the lines
of one axis, multiply mode p of line k by a unit-modulus ramp
``exp(i nu_p * shift_k)``, transform back.  All factors are unitary, so the
maps preserve the discrete norm to roundoff.

tan(theta/2) blows up near theta = pi, so the angle is first reduced to

    theta = k*(pi/2) + theta',   theta' in (-pi/4, pi/4],

and the k quarter turns are applied as exact index permutations of the
wrap-symmetric grid (j -> (N - j) mod N); the shears only ever see the
residual, bounding |a| <= tan(pi/8) and |b| <= sin(pi/4).

The forward map applies the permutation first and then the residual
shears; the backward map applies the sign-mirrored shears first and then
the inverse permutation, so backward(theta) is the exact operator inverse
of forward(theta), not merely a spectral approximation.

On spinor fields the forward map at time t additionally multiplies
component l by exp(-i l Omega t) (and the backward map by the conjugate),
which turns the rotating-frame system into one with time-independent
coefficients.
"""

from __future__ import annotations

import numpy as np

from .grid import SpectralGrid, fft1, ifft1
from .state import SPIN_LEVELS, SpinorField

QUARTER = np.pi / 2.0


def reduce_rotation(theta: float) -> tuple[int, float]:
    """Split an angle as theta = k*(pi/2) + residual (mod 2*pi).

    Returns (k, residual) with k in {0,1,2,3} and residual in
    (-pi/4, pi/4].
    """
    q = int(round(theta / QUARTER))
    residual = theta - q * QUARTER
    if residual <= -np.pi / 4.0:
        q -= 1
        residual += QUARTER
    return q % 4, residual


def _spatial_axes(arr: np.ndarray, grid: SpectralGrid) -> tuple[int, int]:
    """Indices of the x and y axes of `arr` (trailing-axes convention)."""
    off = arr.ndim - grid.dim
    return off, off + 1


_WRAP_IDX_CACHE: dict[int, np.ndarray] = {}


def _wrap_indices(n: int) -> np.ndarray:
    # j -> (N - j) mod N
    idx = _WRAP_IDX_CACHE.get(n)
    if idx is None:
        idx = (-np.arange(n)) % n
        _WRAP_IDX_CACHE[n] = idx
    return idx


def quarter_turn(f: np.ndarray, k: int, grid: SpectralGrid) -> np.ndarray:
    """Rotate a field by k*(pi/2) in the x-y plane by index permutation.

    One positive turn maps out[j, k] = f[k, (N - j) mod N], the grid
    realization of f(x, y) -> f(y, -x).
    """
    ax, ay = _spatial_axes(np.asarray(f), grid)
    out = np.asarray(f)
    idx = _wrap_indices(grid.N)
    for _ in range(k % 4):
        out = np.take(out.swapaxes(ax, ay), idx, axis=ax)
    return np.ascontiguousarray(out) if (k % 4) else out.copy()


def shear_phase(grid: SpectralGrid, a: float, mode_axis: int,
                coord_axis: int, ndim: int) -> np.ndarray:
    """Unit-modulus ramp exp(i a nu_p c_k) broadcastable over `ndim` axes."""
    nu = grid.axis_modes(mode_axis, ndim)
    c = grid.axis_coords(coord_axis, ndim)
    return np.exp(1j * a * nu * c)


def shear_x(f: np.ndarray, a: float, grid: SpectralGrid) -> np.ndarray:
    """f(x, y) -> f(x + a*y, y) via an FFT phase ramp along x."""
    arr = np.asarray(f, dtype=np.complex128)
    ax, _ = _spatial_axes(arr, grid)
    coeffs = fft1(arr, axis=ax)
    coeffs *= shear_phase(grid, a, 0, 1, arr.ndim)
    return ifft1(coeffs, axis=ax)


def shear_y(f: np.ndarray, b: float, grid: SpectralGrid) -> np.ndarray:
    """f(x, y) -> f(x, y + b*x) via an FFT phase ramp along y."""
    arr = np.asarray(f, dtype=np.complex128)
    _, ay = _spatial_axes(arr, grid)
    coeffs = fft1(arr, axis=ay)
    coeffs *= shear_phase(grid, b, 1, 0, arr.ndim)
    return ifft1(coeffs, axis=ay)


def rotate_field_forward(f: np.ndarray, angle: float,
                         grid: SpectralGrid) -> np.ndarray:
    """Sample f at rotated points: out(x) = f(R(angle) x)."""
    k, res = reduce_rotation(angle)
    a = np.tan(res / 2.0)
    b = -np.sin(res)
    out = quarter_turn(f, k, grid)
    out = shear_x(out, a, grid)
    out = shear_y(out, b, grid)
    return shear_x(out, a, grid)


def rotate_field_backward(f: np.ndarray, angle: float,
                          grid: SpectralGrid) -> np.ndarray:
    """Exact inverse of rotate_field_forward at the same angle."""
    k, res = reduce_rotation(angle)
    a = np.tan(res / 2.0)
    b = -np.sin(res)
    out = shear_x(f, -a, grid)
    out = shear_y(out, -b, grid)
    out = shear_x(out, -a, grid)
    return quarter_turn(out, (-k) % 4, grid)


def _level_phases(omega: float, t: float, sign: float,
                  ndim: int) -> np.ndarray:
    ph = np.exp(sign * 1j * SPIN_LEVELS * omega * t)
    return ph.reshape((5,) + (1,) * (ndim - 1))


def rotate_forward(psi: SpinorField, omega: float, t: float) -> SpinorField:
    """Map to the co-rotating representation at time t.

    Component l becomes exp(-i l Omega t) * psi_l(R(Omega t) x).
    """
    if omega == 0.0:
        return psi.copy()
    out = rotate_field_forward(psi.data, omega * t, psi.grid)
    out *= _level_phases(omega, t, -1.0, out.ndim)
    return SpinorField(psi.grid, out)


def rotate_backward(phi: SpinorField, omega: float, t: float) -> SpinorField:
    """Inverse of rotate_forward at the same (omega, t)."""
    if omega == 0.0:
        return phi.copy()
    data = phi.data * _level_phases(omega, t, +1.0, phi.data.ndim)
    out = rotate_field_backward(data, omega * t, phi.grid)
    return SpinorField(phi.grid, out)
