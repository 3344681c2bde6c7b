"""Exact linear sub-flow: per-mode propagator, merged pipeline, audits."""

import numpy as np
import pytest

from spinor_gpe import oracles
from spinor_gpe.grid import build_grid, fft_counter
from spinor_gpe.linear_flow import (LinearFlow, apply_linear_fourier,
                                    linear_step, mode_propagator, soc_symbol)
from spinor_gpe.params import ModelParams
from spinor_gpe.state import SpinorField, make_initial

from conftest import random_spinor, rel_l2


def draw_mode_args(rng):
    omega = rng.uniform(-2.0, 2.0)
    gamma = rng.uniform(-1.5, 1.5)
    nu_p, nu_q = rng.uniform(-20.0, 20.0, 2)
    tau = rng.uniform(1e-4, 0.3)
    return omega, gamma, nu_p, nu_q, tau


# ---------------------------------------------------------------------------
# per-mode propagator against the dense matrix exponential

def test_mode_propagator_matches_expm_on_random_draws():
    rng = np.random.default_rng(2024)
    worst = 0.0
    for _ in range(300):
        omega, gamma, nu_p, nu_q, tau = draw_mode_args(rng)
        got = mode_propagator(omega, gamma, nu_p, nu_q, tau)
        ref = oracles.expm_mode_propagator(omega, gamma, nu_p, nu_q, tau)
        worst = max(worst, np.abs(got - ref).max())
    assert worst < 1e-12


def test_mode_propagator_is_unitary():
    rng = np.random.default_rng(7)
    for _ in range(100):
        omega, gamma, nu_p, nu_q, tau = draw_mode_args(rng)
        u = mode_propagator(omega, gamma, nu_p, nu_q, tau)
        assert np.abs(u @ u.conj().T - np.eye(5)).max() < 1e-13


def test_mode_propagator_without_coupling_is_diagonal_phase():
    u = mode_propagator(0.7, 0.0, 3.0, -2.0, 0.05)
    levels = np.array([2, 1, 0, -1, -2])
    expected = np.diag(np.exp(-1j * levels * 0.7 * 0.05))
    assert np.abs(u - expected).max() < 1e-14


def test_mode_propagator_small_eigenvalue_branch():
    # drive |lambda*tau| under the series switchover and compare to expm
    for tau in (1e-7, 1e-9):
        got = mode_propagator(0.3, 1e-3, 1e-4, -2e-4, tau)
        ref = oracles.expm_mode_propagator(0.3, 1e-3, 1e-4, -2e-4, tau)
        assert np.abs(got - ref).max() < 1e-14
        assert np.abs(got @ got.conj().T - np.eye(5)).max() < 1e-14


def test_mode_propagator_group_property():
    rng = np.random.default_rng(9)
    for _ in range(50):
        omega, gamma, nu_p, nu_q, _ = draw_mode_args(rng)
        t1, t2 = rng.uniform(1e-3, 0.2, 2)
        u1 = mode_propagator(omega, gamma, nu_p, nu_q, t1)
        u2 = mode_propagator(omega, gamma, nu_p, nu_q, t2)
        u12 = mode_propagator(omega, gamma, nu_p, nu_q, t1 + t2)
        assert np.abs(u1 @ u2 - u12).max() < 1e-13


def test_soc_symbol_combines_axis_modes():
    g = build_grid(2, 4.0, 8)
    a = soc_symbol(g)
    nu_p = g.axis_modes(0)
    nu_q = g.axis_modes(1)
    assert rel_l2(a, -(nu_q + 1j * nu_p) * np.ones(g.shape)) < 1e-15


# ---------------------------------------------------------------------------
# grid-level flow

def test_apply_fourier_equals_per_mode_matmul():
    g = build_grid(2, 4.0, 8)
    psi = random_spinor(g, seed=1)
    pars = ModelParams(omega=0.4, gamma_soc=0.6)
    tau = 0.07
    out = LinearFlow(g, pars).apply_fourier(psi.data, tau)
    coeffs = g.forward(psi.data)
    expected_hat = np.empty_like(coeffs)
    for p in range(g.N):
        for q in range(g.N):
            u = mode_propagator(pars.omega, pars.gamma_soc,
                                g.nu[p], g.nu[q], tau)
            ksq = g.nu[p] ** 2 + g.nu[q] ** 2
            expected_hat[:, p, q] = (np.exp(-0.5j * ksq * tau)
                                     * (u @ coeffs[:, p, q]))
    assert rel_l2(out, g.inverse(expected_hat)) < 1e-12


def test_step_matches_method_of_lines_without_rotation():
    # With the frame rotation off the two codes discretize the identical
    # operator, so a broadband random state agrees to roundoff.
    g = build_grid(2, 7.0, 32)
    psi = random_spinor(g, seed=2)
    pars = ModelParams(omega=0.0, gamma_soc=0.1)
    got = LinearFlow(g, pars).step(psi.data.copy(), 0.0, 1e-3)
    ref = oracles.solve_linear_mol(psi.data, g, pars, 1e-3)
    assert rel_l2(got, ref) < 1e-12


def test_step_matches_method_of_lines_with_rotation():
    # The reference represents the angular-momentum generator as pointwise
    # coordinates times spectral derivatives, which differs from the exact
    # interpolant rotation at the state's above-band content, so this
    # comparison needs a tail-controlled (Gaussian) state.
    g = build_grid(2, 7.0, 32)
    psi = make_initial("gaussian_ini1", g)
    worst = 0.0
    for om, gam, tau in [(0.2, 0.1, 1e-3), (-0.9, 1.2, 1e-3),
                         (0.8, 0.9, 0.1), (0.5, 0.0, 0.05)]:
        pars = ModelParams(omega=om, gamma_soc=gam)
        got = LinearFlow(g, pars).step(psi.data.copy(), 0.0, tau)
        ref = oracles.solve_linear_mol(psi.data, g, pars, tau)
        worst = max(worst, rel_l2(got, ref))
    assert worst < 1e-9


def test_step_without_rotation_reduces_to_fourier_multiply():
    g = build_grid(2, 8.0, 32)
    psi = random_spinor(g, seed=3)
    pars = ModelParams(omega=0.0, gamma_soc=0.5)
    flow = LinearFlow(g, pars)
    a = flow.step(psi.data.copy(), 0.3, 0.01)
    b = flow.apply_fourier(psi.data, 0.01)
    assert rel_l2(a, b) < 1e-15


def test_two_half_steps_compose_into_one():
    g = build_grid(2, 8.0, 48)
    psi = random_spinor(g, seed=4)
    pars = ModelParams(omega=0.25, gamma_soc=0.4)
    flow = LinearFlow(g, pars)
    tau = 0.02
    once = flow.step(psi.data.copy(), 0.1, tau)
    half = flow.step(psi.data.copy(), 0.1, tau / 2)
    twice = flow.step(half, 0.1 + tau / 2, tau / 2)
    assert rel_l2(twice, once) < 1e-13


def test_step_preserves_mass():
    g = build_grid(2, 8.0, 48)
    psi = random_spinor(g, seed=5)
    pars = ModelParams(omega=0.3, gamma_soc=0.7)
    out = LinearFlow(g, pars).step(psi.data.copy(), 0.0, 0.05)
    assert np.linalg.norm(out) == pytest.approx(np.linalg.norm(psi.data),
                                                rel=1e-13)


def test_free_gaussian_dispersion_closed_form():
    # Single-component free packet: variance grows as sigma^2 + i t.
    g = build_grid(2, 10.0, 64)
    x, y = g.mesh()
    rsq = x * x + y * y
    sigma2 = 1.0
    data = np.zeros((5,) + g.shape, dtype=complex)
    data[2] = np.exp(-rsq / (2 * sigma2))
    pars = ModelParams()
    t = 0.4
    out = LinearFlow(g, pars).step(data.copy(), 0.0, t)
    s = sigma2 + 1j * t
    expected = (sigma2 / s) * np.exp(-rsq / (2 * s))
    assert rel_l2(out[2], expected) < 1e-12


def test_propagator_cache_changes_nothing():
    g = build_grid(2, 8.0, 32)
    psi = random_spinor(g, seed=6)
    pars = ModelParams(omega=0.2, gamma_soc=0.3)
    plain = LinearFlow(g, pars, cache=False).step(psi.data.copy(), 0.2, 1e-3)
    cached_flow = LinearFlow(g, pars, cache=True)
    warm = cached_flow.step(psi.data.copy(), 0.2, 1e-3)
    again = cached_flow.step(psi.data.copy(), 0.2, 1e-3)
    assert rel_l2(warm, plain) < 1e-14
    assert np.array_equal(warm, again)


def test_field_level_wrappers_match_data_level():
    g = build_grid(2, 8.0, 32)
    psi = random_spinor(g, seed=7)
    pars = ModelParams(omega=0.15, gamma_soc=0.2)
    via_field = linear_step(psi, pars, 0.05, 1e-2)
    via_data = LinearFlow(g, pars).step(psi.data.copy(), 0.05, 1e-2)
    assert rel_l2(via_field.data, via_data) < 1e-15
    spectral = apply_linear_fourier(psi, pars, 1e-2)
    assert spectral.data.shape == psi.data.shape


# ---------------------------------------------------------------------------
# operation-count audit

def test_rotating_2d_step_uses_exactly_30n_transform_pairs():
    g = build_grid(2, 8.0, 48)
    psi = random_spinor(g, seed=8)
    pars = ModelParams(omega=0.2, gamma_soc=0.3)
    flow = LinearFlow(g, pars)
    fft_counter.reset()
    flow.step(psi.data, 0.37, 1e-3)
    assert fft_counter.pairs == 30 * g.N
    assert fft_counter.fft_lines == fft_counter.ifft_lines


def test_rotating_3d_step_uses_exactly_35nsq_transform_pairs():
    g = build_grid(3, 6.0, 12)
    psi = random_spinor(g, seed=9)
    pars = ModelParams(omega=0.2, gamma_soc=0.1)
    flow = LinearFlow(g, pars)
    fft_counter.reset()
    flow.step(psi.data, 0.11, 1e-3)
    assert fft_counter.pairs == 35 * g.N ** 2
