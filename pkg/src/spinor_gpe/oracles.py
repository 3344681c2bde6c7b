"""Independent reference computations for cross-checking the fast solvers.

Everything here deliberately avoids the production code paths:

* matrices are assembled literally from the spin-2 operator definitions,
  not imported from :mod:`spinor_gpe.state`;
* matrix exponentials use :func:`scipy.linalg.expm` (scaling and squaring)
  instead of the closed-form trigonometric coefficients;
* initial-value problems are integrated by an adaptive high-order
  Runge-Kutta method (DOP853) with tight tolerances instead of the exact
  split sub-flows.

The unit tests and the ``verify`` CLI command compare the production
implementations against these references.  Agreement bounds here are set
by the reference integrator, not by the closed forms: the split sub-flows
are exact, while DOP853 at rtol=1e-13 accumulates error roughly in
proportion to the total phase swept, so comparisons keep amplitudes at
physical scale (densities of order one).
"""

from __future__ import annotations

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from .grid import SpectralGrid
from .params import ModelParams

__all__ = [
    "spin_matrices",
    "singlet_matrix",
    "soc_symbol_matrix",
    "dense_mode_matrix",
    "expm_mode_propagator",
    "expm_spin_rotation",
    "solve_node_ode",
    "solve_linear_mol",
    "solve_full_mol",
]

_R = np.sqrt(6.0) / 2.0

_FX = np.array([
    [0, 1, 0, 0, 0],
    [1, 0, _R, 0, 0],
    [0, _R, 0, _R, 0],
    [0, 0, _R, 0, 1],
    [0, 0, 0, 1, 0],
], dtype=complex)

_FY = 1j * np.array([
    [0, -1, 0, 0, 0],
    [1, 0, -_R, 0, 0],
    [0, _R, 0, -_R, 0],
    [0, 0, _R, 0, -1],
    [0, 0, 0, 1, 0],
], dtype=complex)

_FZ = np.diag([2.0, 1.0, 0.0, -1.0, -2.0]).astype(complex)

# A_ij = (-1)^(i-1) delta_{i+j,6} / sqrt(5), 1-based indices.
_A = np.zeros((5, 5), dtype=complex)
for _i in range(5):
    _A[_i, 4 - _i] = (-1.0) ** _i / np.sqrt(5.0)


def spin_matrices() -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """The spin-2 operator triple (f_x, f_y, f_z) as dense 5x5 arrays."""
    return _FX.copy(), _FY.copy(), _FZ.copy()


def singlet_matrix() -> np.ndarray:
    """The antidiagonal singlet-pairing matrix A."""
    return _A.copy()


def soc_symbol_matrix(a: complex) -> np.ndarray:
    """Fourier symbol of the derivative-coupling matrix operator.

    The operator couples neighboring components through i*d_y - d_x on the
    upper diagonal and i*d_y + d_x on the lower one; with d_alpha -> i nu_alpha
    those become a = -nu_y - i nu_x and conj(a) respectively.
    """
    ab = np.conj(a)
    return np.array([
        [0, a, 0, 0, 0],
        [ab, 0, _R * a, 0, 0],
        [0, _R * ab, 0, _R * a, 0],
        [0, 0, _R * ab, 0, a],
        [0, 0, 0, ab, 0],
    ], dtype=complex)


def dense_mode_matrix(omega: float, gamma: float, nu_p: float, nu_q: float) -> np.ndarray:
    """The Hermitian per-mode generator: gamma * symbol(a) - omega * f_z."""
    a = -nu_q - 1j * nu_p
    return gamma * soc_symbol_matrix(a) - omega * _FZ


def expm_mode_propagator(omega: float, gamma: float, nu_p: float,
                         nu_q: float, tau: float) -> np.ndarray:
    """Reference per-mode unitary via scaling-and-squaring."""
    return expm(1j * tau * dense_mode_matrix(omega, gamma, nu_p, nu_q))


def expm_spin_rotation(f_plus: complex, f_z: float, c1: float,
                       tau: float) -> np.ndarray:
    """Reference exp(-i c1 tau F.f) via scaling-and-squaring."""
    fdotf = f_plus.real * _FX + f_plus.imag * _FY + f_z * _FZ
    return expm(-1j * c1 * tau * fdotf)


def _pack(data: np.ndarray) -> np.ndarray:
    flat = np.ascontiguousarray(data).ravel()
    return np.concatenate([flat.real, flat.imag])


def _unpack(y: np.ndarray, shape) -> np.ndarray:
    half = y.size // 2
    return (y[:half] + 1j * y[half:]).reshape(shape)


def solve_node_ode(psi: np.ndarray, v: float, params: ModelParams,
                   tau: float, *, rtol: float = 1e-13,
                   atol: float = 1e-15) -> np.ndarray:
    """Integrate the zero-dimensional interaction system at a single node.

    i psi' = [(v + c0 rho) I + c1 F.f] psi + c2 A00 A conj(psi), with rho,
    F and A00 recomputed from the evolving psi (they are invariants of the
    flow; recomputing them keeps the oracle independent of that fact).
    """
    psi = np.asarray(psi, dtype=complex).reshape(5)

    def rhs(t, y):
        p = _unpack(y, 5)
        mags = p.real ** 2 + p.imag ** 2
        rho = mags.sum()
        f_z = 2.0 * (mags[0] - mags[4]) + mags[1] - mags[3]
        f_plus = (2.0 * (np.conj(p[0]) * p[1] + np.conj(p[3]) * p[4])
                  + np.sqrt(6.0) * (np.conj(p[1]) * p[2] + np.conj(p[2]) * p[3]))
        fdotf = f_plus.real * _FX + f_plus.imag * _FY + f_z * _FZ
        a00 = (2.0 * p[0] * p[4] - 2.0 * p[1] * p[3] + p[2] ** 2) / np.sqrt(5.0)
        dp = -1j * (((v + params.c0 * rho) * np.eye(5) + params.c1 * fdotf) @ p
                    + params.c2 * a00 * (_A @ np.conj(p)))
        return _pack(dp)

    sol = solve_ivp(rhs, (0.0, tau), _pack(psi), method="DOP853",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"node ODE reference failed: {sol.message}")
    return _unpack(sol.y[:, -1], 5)


def _spectral_derivative(f: np.ndarray, grid: SpectralGrid, axis: int) -> np.ndarray:
    import scipy.fft as sfft
    nu = grid.axis_modes(axis, f.ndim)
    return sfft.ifft(1j * nu * sfft.fft(f, axis=axis), axis=axis)


def _linear_apply(data: np.ndarray, grid: SpectralGrid,
                  params: ModelParams) -> np.ndarray:
    """Fixed-frame generator of the derivative subproblem applied to data.

    Returns H(data) with i d_t psi = H psi, where H collects the half
    Laplacian, the frame-rotation generator -Omega * (-i)(x d_y - y d_x),
    and the derivative coupling between neighboring components.
    """
    import scipy.fft as sfft
    axes = tuple(range(1, data.ndim))
    ksq = sum(grid.axis_modes(ax, data.ndim - 1) ** 2 for ax in range(grid.dim))
    hat = sfft.fftn(data, axes=axes)
    out = sfft.ifftn(0.5 * ksq * hat, axes=axes)

    if params.omega != 0.0:
        x = grid.axis_coords(0, grid.dim)
        y = grid.axis_coords(1, grid.dim)
        for m in range(5):
            lz = -1j * (x * _spectral_derivative(data[m], grid, 1)
                        - y * _spectral_derivative(data[m], grid, 0))
            out[m] -= params.omega * lz

    if params.gamma_soc != 0.0:
        dx = np.empty_like(data)
        dy = np.empty_like(data)
        for m in range(5):
            dx[m] = _spectral_derivative(data[m], grid, 0)
            dy[m] = _spectral_derivative(data[m], grid, 1)
        lp = 1j * dy + dx
        lm = 1j * dy - dx
        g = params.gamma_soc
        out[0] -= g * lm[1]
        out[1] -= g * (lp[0] + _R * lm[2])
        out[2] -= g * _R * (lp[1] + lm[3])
        out[3] -= g * (lm[4] + _R * lp[2])
        out[4] -= g * lp[3]
    return out


def solve_linear_mol(data: np.ndarray, grid: SpectralGrid,
                     params: ModelParams, tau: float, *,
                     rtol: float = 1e-12, atol: float = 1e-14) -> np.ndarray:
    """Method-of-lines reference for the derivative (linear) subproblem.

    Spatially discretized with spectral derivatives on the given grid and
    integrated in the fixed frame by DOP853.
    """
    shape = data.shape

    def rhs(t, y):
        psi = _unpack(y, shape)
        return _pack(-1j * _linear_apply(psi, grid, params))

    sol = solve_ivp(rhs, (0.0, tau), _pack(data), method="DOP853",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"linear MOL reference failed: {sol.message}")
    return _unpack(sol.y[:, -1], shape)


def solve_full_mol(data: np.ndarray, grid: SpectralGrid,
                   params: ModelParams, tau: float, *,
                   rtol: float = 1e-12, atol: float = 1e-14) -> np.ndarray:
    """Method-of-lines reference for the complete coupled system."""
    shape = data.shape
    v = params.trap_potential(grid)

    def rhs(t, y):
        p = _unpack(y, shape)
        out = _linear_apply(p, grid, params)
        mags = p.real ** 2 + p.imag ** 2
        rho = mags.sum(axis=0)
        f_z = 2.0 * (mags[0] - mags[4]) + mags[1] - mags[3]
        f_plus = (2.0 * (np.conj(p[0]) * p[1] + np.conj(p[3]) * p[4])
                  + np.sqrt(6.0) * (np.conj(p[1]) * p[2] + np.conj(p[2]) * p[3]))
        f_minus = np.conj(f_plus)
        a00 = (2.0 * p[0] * p[4] - 2.0 * p[1] * p[3] + p[2] ** 2) / np.sqrt(5.0)
        scalar = v + params.c0 * rho
        c1 = params.c1
        out[0] += scalar * p[0] + c1 * (2.0 * f_z * p[0] + f_minus * p[1])
        out[1] += scalar * p[1] + c1 * (f_plus * p[0] + f_z * p[1]
                                        + _R * f_minus * p[2])
        out[2] += scalar * p[2] + c1 * _R * (f_plus * p[1] + f_minus * p[3])
        out[3] += scalar * p[3] + c1 * (_R * f_plus * p[2] - f_z * p[3]
                                        + f_minus * p[4])
        out[4] += scalar * p[4] + c1 * (f_plus * p[3] - 2.0 * f_z * p[4])
        if params.c2 != 0.0:
            conj = np.conj(p[::-1]).copy()
            conj[1] = -conj[1]
            conj[3] = -conj[3]
            out += params.c2 * a00 * conj / np.sqrt(5.0)
        return _pack(-1j * out)

    sol = solve_ivp(rhs, (0.0, tau), _pack(data), method="DOP853",
                    rtol=rtol, atol=atol)
    if not sol.success:
        raise RuntimeError(f"full MOL reference failed: {sol.message}")
    return _unpack(sol.y[:, -1], shape)
