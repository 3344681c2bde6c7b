"""Exact nonlinear sub-flow: invariants, phase laws, node-ODE conformance."""

import numpy as np
import pytest

from spinor_gpe import oracles
from spinor_gpe.grid import build_grid
from spinor_gpe.nonlinear_flow import (a00_evolution, nonlinear_invariants,
                                       nonlinear_step, nonlinear_step_data,
                                       spin_rotation)
from spinor_gpe.params import ModelParams
from spinor_gpe.state import SpinorField, spin_observables

from conftest import random_spinor, rel_l2

PARAMS = ModelParams(c0=100.0, c1=-1.0, c2=1.0, gamma_x=1.0, gamma_y=1.2)


def random_nodes(rng, count, scale=0.4):
    """Batch of single-node spinors with physically moderate densities."""
    vals = scale * (rng.standard_normal((count, 5))
                    + 1j * rng.standard_normal((count, 5)))
    return vals


# ---------------------------------------------------------------------------
# pointwise invariants of the exact sub-flow

def test_step_preserves_density_spin_and_singlet_modulus():
    g = build_grid(2, 8.0, 32)
    psi = random_spinor(g, seed=1)
    before = nonlinear_invariants(psi)
    v = PARAMS.trap_potential(g)
    out = nonlinear_step_data(psi.data.copy(), v, PARAMS, tau=0.05)
    after = nonlinear_invariants(SpinorField(g, out))
    assert rel_l2(after.rho, before.rho) < 1e-12
    assert rel_l2(after.f_z, before.f_z) < 1e-11
    assert rel_l2(after.f_plus, before.f_plus) < 1e-11
    assert rel_l2(np.abs(after.a00), np.abs(before.a00)) < 1e-11
    assert rel_l2(after.s, before.s) < 1e-11


def test_singlet_amplitude_rotates_by_the_scalar_phase_law():
    g = build_grid(2, 8.0, 32)
    psi = random_spinor(g, seed=2)
    obs = spin_observables(psi)
    v = PARAMS.trap_potential(g)
    tau = 0.03
    out = nonlinear_step_data(psi.data.copy(), v, PARAMS, tau=tau)
    after = spin_observables(SpinorField(g, out))
    phase = np.exp(-2j * tau * (v + (PARAMS.c0 + PARAMS.c2 / 5.0) * obs.rho))
    assert rel_l2(after.a00, phase * obs.a00) < 1e-11


def test_a00_evolution_closed_form():
    rng = np.random.default_rng(3)
    a00 = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    v = rng.standard_normal(7)
    rho = rng.uniform(0.0, 2.0, 7)
    dt = 0.17
    got = a00_evolution(a00, v, rho, PARAMS, dt)
    expected = a00 * np.exp(-2j * dt * (v + (PARAMS.c0 + PARAMS.c2 / 5.0) * rho))
    assert rel_l2(got, expected) < 1e-14


# ---------------------------------------------------------------------------
# spin rotation factor against the dense exponential

def test_spin_rotation_matches_expm_on_random_draws():
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(200):
        node = random_nodes(rng, 1, scale=0.8)[0]
        obs = spin_observables(node.reshape(5, 1, 1))
        f_plus = complex(obs.f_plus.ravel()[0])
        f_z = float(obs.f_z.ravel()[0])
        f_norm = float(obs.f_norm.ravel()[0])
        c1 = rng.uniform(-3.0, 3.0)
        tau = rng.uniform(1e-3, 0.4)
        got = spin_rotation(f_plus, f_z, f_norm, c1, tau)
        ref = oracles.expm_spin_rotation(f_plus, f_z, c1, tau)
        worst = max(worst, np.abs(got - ref).max())
    assert worst < 1e-12


def test_spin_rotation_small_angle_series_branch():
    # |c1| * |F| * tau far below the switchover still matches expm
    f_plus, f_z = 0.3 + 0.1j, -0.2
    f_norm = float(np.sqrt(f_z ** 2 + abs(f_plus) ** 2))
    got = spin_rotation(f_plus, f_z, f_norm, c1=1.0, tau=1e-11)
    ref = oracles.expm_spin_rotation(f_plus, f_z, 1.0, 1e-11)
    assert np.abs(got - ref).max() < 1e-14


def test_spin_rotation_handles_vanishing_spin_vector():
    got = spin_rotation(0.0j, 0.0, 0.0, c1=2.0, tau=0.3)
    assert np.abs(got - np.eye(5)).max() < 1e-14


# ---------------------------------------------------------------------------
# node-level conformance with the adaptive ODE reference

def test_step_matches_node_ode_reference():
    rng = np.random.default_rng(5)
    g = build_grid(2, 1.0, 4)  # container grid; dynamics is pointwise
    worst = 0.0
    for trial in range(40):
        node = random_nodes(rng, 1)[0]
        v = float(rng.uniform(0.0, 3.0))
        tau = 0.2
        data = np.tile(node.reshape(5, 1, 1), (1, 4, 4)).astype(complex)
        out = nonlinear_step_data(data.copy(), np.full((4, 4), v),
                                  PARAMS, tau=tau)
        ref = oracles.solve_node_ode(node, v, PARAMS, tau)
        worst = max(worst, np.abs(out[:, 0, 0] - ref).max())
    assert worst < 1e-10


def test_exact_flow_composes_over_substeps():
    g = build_grid(2, 8.0, 32)
    psi = random_spinor(g, seed=6)
    v = PARAMS.trap_potential(g)
    tau = 0.08
    once = nonlinear_step_data(psi.data.copy(), v, PARAMS, tau)
    half = nonlinear_step_data(psi.data.copy(), v, PARAMS, tau / 2)
    twice = nonlinear_step_data(half, v, PARAMS, tau / 2)
    assert rel_l2(twice, once) < 1e-11


def test_zero_couplings_leave_only_trap_phase():
    g = build_grid(2, 8.0, 32)
    psi = random_spinor(g, seed=7)
    pars = ModelParams(gamma_x=1.0, gamma_y=1.0)
    v = pars.trap_potential(g)
    out = nonlinear_step_data(psi.data.copy(), v, pars, tau=0.11)
    expected = np.exp(-1j * 0.11 * v) * psi.data
    assert rel_l2(out, expected) < 1e-13


def test_pure_middle_component_node_is_degenerate_but_finite():
    # rho^2/25 == |a00|^2/5 exactly here; the clamped radicand must not NaN
    node = np.array([0.0, 0.0, 0.7 - 0.2j, 0.0, 0.0], dtype=complex)
    data = np.tile(node.reshape(5, 1, 1), (1, 4, 4))
    out = nonlinear_step_data(data.copy(), np.zeros((4, 4)), PARAMS, tau=0.25)
    assert np.all(np.isfinite(out))
    ref = oracles.solve_node_ode(node, 0.0, PARAMS, 0.25)
    assert np.abs(out[:, 0, 0] - ref).max() < 1e-10


def test_field_level_wrapper_matches_data_level():
    g = build_grid(2, 8.0, 32)
    psi = random_spinor(g, seed=8)
    v = PARAMS.trap_potential(g)
    via_field = nonlinear_step(psi, v, PARAMS, 0.02)
    via_data = nonlinear_step_data(psi.data.copy(), v, PARAMS, 0.02)
    assert rel_l2(via_field.data, via_data) < 1e-15
