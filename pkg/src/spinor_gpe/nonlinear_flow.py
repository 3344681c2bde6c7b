"""Exact solver for the pointwise nonlinear sub-flow.

The sub-problem couples the five components only through pointwise
quantities: i dPsi/dt = [(V + c0 rho) I + c1 F.f] Psi + c2 A00 A conj(Psi).
During it rho and F are constants of motion and A00 merely rotates its
phase, so the flow has a closed-form solution: with S defined by
S^2 = (rho/5)^2 - |A00|^2/5 >= 0 (Cauchy-Schwarz),

    b      = cos(c2 S dt) Psi + (i/S) sin(c2 S dt) [(rho/5) Psi - A00 A conj(Psi)]
    Psi(dt)= exp(-i dt (V + (c0 + c2/5) rho)) * exp(-i c1 dt F.f) * b.

exp(-i c1 dt F.f) is evaluated with the exact degree-4 polynomial in
F.f/|F| (F.f has spin-2 eigenvalues {0, +-1, +-2}|F|, so degree 4
suffices).  Two removable singularities are guarded:

* sin(c2 S dt)/S uses the series c2 dt (1 - (c2 S dt)^2/6) when
  |c2 S dt| < 1e-6;
* the polynomial divides by |F|; when |kappa| = |c1 dt| |F| < 1e-8 the
  coefficients collapse to the 4th-order Taylor expansion of exp(-i M)
  in the unnormalized M = c1 dt F.f.

The per-node S radicand is clamped at zero when roundoff drives it
negative (it cannot be negative in exact arithmetic).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .params import ModelParams
from .state import (FX, FY, FZ, PointObservables, SpinorField,
                    singlet_conjugate, spin_observables)

SINC_THRESHOLD = 1e-6
SPIN_TAYLOR_THRESHOLD = 1e-8
_R6 = np.sqrt(6.0) / 2.0


@dataclass
class NonlinearInvariants:
    """Pointwise constants of the nonlinear sub-flow (plus S)."""

    rho: np.ndarray
    f_z: np.ndarray
    f_plus: np.ndarray
    f_norm: np.ndarray
    a00: np.ndarray
    s: np.ndarray


def nonlinear_invariants(psi) -> NonlinearInvariants:
    """rho, F, |F|, A00 and S = sqrt((rho/5)^2 - |A00|^2/5) of a state."""
    obs: PointObservables = spin_observables(psi)
    radicand = (obs.rho / 5.0) ** 2 - (obs.a00.real ** 2
                                       + obs.a00.imag ** 2) / 5.0
    s = np.sqrt(np.maximum(radicand, 0.0))
    return NonlinearInvariants(rho=obs.rho, f_z=obs.f_z, f_plus=obs.f_plus,
                               f_norm=obs.f_norm, a00=obs.a00, s=s)


def _spin_matvec(f_plus: np.ndarray, f_z: np.ndarray,
                 v: np.ndarray) -> np.ndarray:
    """(F.f) v exploiting the tridiagonal structure of F.f."""
    f_minus = np.conj(f_plus)
    out = np.empty_like(v)
    out[0] = 2.0 * f_z * v[0] + f_minus * v[1]
    out[1] = f_plus * v[0] + f_z * v[1] + _R6 * f_minus * v[2]
    out[2] = _R6 * (f_plus * v[1] + f_minus * v[3])
    out[3] = _R6 * f_plus * v[2] - f_z * v[3] + f_minus * v[4]
    out[4] = f_plus * v[3] - 2.0 * f_z * v[4]
    return out


def _poly_coeffs(kappa: np.ndarray):
    """Coefficients beta_k of I + i b1 M + b2 M^2 + i b3 M^3 + b4 M^4 where
    M = c1 dt F.f (unnormalized); beta_k = alpha_k(kappa)/kappa^k with the
    exact-polynomial alphas, series values (-1, -1/2, 1/6, 1/24) below the
    Taylor threshold."""
    kappa = np.asarray(kappa, dtype=np.float64)
    s1 = np.sin(kappa)
    s2 = np.sin(2.0 * kappa)
    co1 = np.cos(kappa)
    co2 = np.cos(2.0 * kappa)
    a1 = s2 / 6.0 - 4.0 * s1 / 3.0
    a2 = 4.0 * co1 / 3.0 - co2 / 12.0 - 5.0 / 4.0
    a3 = s1 / 3.0 - s2 / 6.0
    a4 = co2 / 12.0 - co1 / 3.0 + 0.25
    small = np.abs(kappa) < SPIN_TAYLOR_THRESHOLD
    k_safe = np.where(small, 1.0, kappa)
    b1 = np.where(small, -1.0, a1 / k_safe)
    b2 = np.where(small, -0.5, a2 / k_safe ** 2)
    b3 = np.where(small, 1.0 / 6.0, a3 / k_safe ** 3)
    b4 = np.where(small, 1.0 / 24.0, a4 / k_safe ** 4)
    return b1, b2, b3, b4


def _apply_spin_rotation(v: np.ndarray, f_plus: np.ndarray, f_z: np.ndarray,
                         f_norm: np.ndarray, c1: float,
                         tau: float) -> np.ndarray:
    """exp(-i c1 tau F.f) v without materializing the 5x5 matrix field."""
    kappa = c1 * tau * f_norm
    b1, b2, b3, b4 = _poly_coeffs(kappa)
    w = c1 * tau
    m1 = w * _spin_matvec(f_plus, f_z, v)
    m2 = w * _spin_matvec(f_plus, f_z, m1)
    m3 = w * _spin_matvec(f_plus, f_z, m2)
    m4 = w * _spin_matvec(f_plus, f_z, m3)
    return v + 1j * b1 * m1 + b2 * m2 + 1j * b3 * m3 + b4 * m4


def spin_rotation(f_plus, f_z, f_norm, c1: float, tau: float) -> np.ndarray:
    """The 5x5 unitary exp(-i c1 tau F.f) (scalar or field arguments).

    Returns shape (5, 5) for scalar inputs, (5, 5) + field shape otherwise.
    """
    f_plus = np.atleast_1d(np.asarray(f_plus, dtype=np.complex128))
    f_z = np.atleast_1d(np.asarray(f_z, dtype=np.float64))
    f_norm = np.atleast_1d(np.asarray(f_norm, dtype=np.float64))
    shape = np.broadcast_shapes(f_plus.shape, f_z.shape, f_norm.shape)
    f_minus = np.conj(f_plus)
    z = np.zeros(shape, dtype=np.complex128)
    fdotf = np.array([
        [2.0 * f_z + z, f_minus + z, z, z, z],
        [f_plus + z, f_z + z, _R6 * f_minus + z, z, z],
        [z, _R6 * f_plus + z, z, _R6 * f_minus + z, z],
        [z, z, _R6 * f_plus + z, -f_z + z, f_minus + z],
        [z, z, z, f_plus + z, -2.0 * f_z + z],
    ])
    m = (c1 * tau) * fdotf
    b1, b2, b3, b4 = _poly_coeffs(c1 * tau * f_norm)
    m2 = np.einsum('ij...,jk...->ik...', m, m)
    m3 = np.einsum('ij...,jk...->ik...', m2, m)
    m4 = np.einsum('ij...,jk...->ik...', m2, m2)
    eye = np.eye(5, dtype=np.complex128).reshape((5, 5) + (1,) * len(shape))
    out = eye + 1j * b1 * m + b2 * m2 + 1j * b3 * m3 + b4 * m4
    if shape == (1,):
        return out.reshape(5, 5)
    return out


def a00_evolution(a00: np.ndarray, v: np.ndarray, rho: np.ndarray,
                  params: ModelParams, dt: float) -> np.ndarray:
    """A00 after time dt of the nonlinear sub-flow (pure phase rotation)."""
    return a00 * np.exp(-2j * dt * (v + (params.c0 + params.c2 / 5.0) * rho))


def nonlinear_step_data(data: np.ndarray, v: np.ndarray,
                        params: ModelParams, tau: float) -> np.ndarray:
    """Exact nonlinear sub-step on a raw (5, ...) array."""
    inv = nonlinear_invariants(data)
    theta = params.c2 * inv.s * tau
    small = np.abs(theta) < SINC_THRESHOLD
    s_safe = np.where(small, 1.0, inv.s)
    sinc_term = np.where(small,
                         params.c2 * tau * (1.0 - theta * theta / 6.0),
                         np.sin(theta) / s_safe)
    b = (np.cos(theta) * data
         + 1j * sinc_term * ((inv.rho / 5.0) * data
                             - inv.a00 * singlet_conjugate(data)))
    out = _apply_spin_rotation(b, inv.f_plus, inv.f_z, inv.f_norm,
                               params.c1, tau)
    out *= np.exp(-1j * tau * (v + (params.c0 + params.c2 / 5.0) * inv.rho))
    return out


def nonlinear_step(psi: SpinorField, v: np.ndarray, params: ModelParams,
                   tau: float) -> SpinorField:
    """Exact nonlinear sub-step on a SpinorField."""
    return SpinorField(psi.grid,
                       nonlinear_step_data(psi.data, v, params, tau))
