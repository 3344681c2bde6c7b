"""Spinor container, pointwise observables, and catalogued initial states."""

import numpy as np
import pytest

from spinor_gpe import oracles
from spinor_gpe.errors import ConfigError
from spinor_gpe.grid import build_grid
from spinor_gpe.snapshot import write_snapshot
from spinor_gpe.state import (INITIAL_KINDS, SPIN_LEVELS, SpinorField,
                              density, make_initial, singlet_conjugate,
                              spin_observables)

from conftest import random_spinor, rel_l2


def quadrature_mass(psi: SpinorField) -> float:
    return psi.grid.h ** psi.grid.dim * float(np.sum(density(psi)))


# ---------------------------------------------------------------------------
# container semantics

def test_levels_run_from_plus_two_to_minus_two():
    assert SPIN_LEVELS.tolist() == [2, 1, 0, -1, -2]


def test_component_indexes_by_level(grid2d):
    psi = SpinorField.zeros(grid2d)
    psi.data[3] = 7.0
    assert np.all(psi.component(-1) == 7.0)
    assert np.all(psi.component(2) == 0.0)


def test_copy_is_independent(grid2d):
    psi = random_spinor(grid2d, seed=1)
    other = psi.copy()
    other.data[0] += 1.0
    assert not np.allclose(psi.data[0], other.data[0])


def test_rejects_wrong_shape(grid2d):
    with pytest.raises((ValueError, ConfigError)):
        SpinorField(grid2d, np.zeros((4,) + grid2d.shape, dtype=complex))


# ---------------------------------------------------------------------------
# pointwise observables against dense-matrix quadratic forms

def test_density_is_sum_of_component_magnitudes(grid2d):
    psi = random_spinor(grid2d, seed=2)
    assert rel_l2(density(psi), np.abs(psi.data).__pow__(2).sum(0)) < 1e-14


def test_spin_observables_match_dense_quadratic_forms(grid2d):
    psi = random_spinor(grid2d, seed=3)
    obs = spin_observables(psi)
    fx, fy, fz = oracles.spin_matrices()
    d = psi.data
    form = lambda m: np.einsum("i...,ij,j...->...", np.conj(d), m, d)
    assert rel_l2(obs.f_z, form(fz).real) < 1e-13
    f_plus_dense = form(fx) + 1j * form(fy)
    assert rel_l2(obs.f_plus, f_plus_dense) < 1e-13
    norm_dense = np.sqrt(form(fz).real ** 2 + np.abs(f_plus_dense) ** 2)
    assert rel_l2(obs.f_norm, norm_dense) < 1e-13


def test_singlet_amplitude_matches_dense_bilinear_form(grid2d):
    psi = random_spinor(grid2d, seed=4)
    a = oracles.singlet_matrix()
    dense = np.einsum("i...,ij,j...->...", psi.data, a, psi.data)
    assert rel_l2(spin_observables(psi).a00, dense) < 1e-13


def test_singlet_conjugate_matches_dense_product(grid2d):
    psi = random_spinor(grid2d, seed=5)
    dense = np.einsum("ij,j...->i...", oracles.singlet_matrix(),
                      np.conj(psi.data))
    assert rel_l2(singlet_conjugate(psi.data), dense) < 1e-13


def test_f_norm_is_euclidean_length_of_spin_vector(grid2d):
    psi = random_spinor(grid2d, seed=6)
    obs = spin_observables(psi)
    assert rel_l2(obs.f_norm ** 2,
                  obs.f_z ** 2 + np.abs(obs.f_plus) ** 2) < 1e-12


# ---------------------------------------------------------------------------
# catalogued initial states

def test_initial_kind_catalog_is_stable():
    assert INITIAL_KINDS == ("gaussian_ini1", "gaussian_wide",
                             "gaussian_vortex", "random_smooth", "from_file")


@pytest.mark.parametrize("kind", ["gaussian_ini1", "gaussian_wide",
                                  "gaussian_vortex"])
def test_gaussian_states_have_unit_mass(kind):
    g = build_grid(2, 12.0, 128)
    psi = make_initial(kind, g)
    assert quadrature_mass(psi) == pytest.approx(1.0, abs=1e-12)


def test_ini1_state_structure():
    g = build_grid(2, 8.0, 64)
    psi = make_initial("gaussian_ini1", g)
    # psi_0 carries twice the amplitude of the other four equal components
    assert rel_l2(psi.data[2], 2.0 * psi.data[0]) < 1e-14
    assert rel_l2(psi.data[1], psi.data[0]) < 1e-14
    assert np.abs(psi.data.imag).max() == 0.0


def test_wide_state_center_ratio():
    g = build_grid(2, 12.0, 96)
    psi = make_initial("gaussian_wide", g)
    assert rel_l2(psi.data[2], 6.0 * np.sqrt(7.0) * psi.data[0]) < 1e-14


def test_ini1_works_in_3d():
    g = build_grid(3, 6.0, 24)
    psi = make_initial("gaussian_ini1", g)
    assert quadrature_mass(psi) == pytest.approx(1.0, abs=1e-10)


@pytest.mark.parametrize("kind", ["gaussian_wide", "gaussian_vortex"])
def test_planar_states_reject_3d(kind):
    g = build_grid(3, 6.0, 12)
    with pytest.raises(ConfigError):
        make_initial(kind, g)


def test_vortex_state_structure_and_winding():
    from spinor_gpe.diagnostics import angular_momentum, mass
    g = build_grid(2, 8.0, 96)
    psi = make_initial("gaussian_vortex", g)
    x, y = g.mesh()
    # levels +-1 are plain Gaussians; the other three carry the x+iy factor
    assert rel_l2(psi.data[0], (x + 1j * y) * psi.data[1]) < 1e-14
    assert rel_l2(psi.data[4], psi.data[0]) < 1e-14
    assert rel_l2(psi.data[2], 6.0 * np.sqrt(7.0) * psi.data[0]) < 1e-14
    # each plain component holds mass 1/256 and no angular momentum
    assert angular_momentum(psi) / mass(psi) == pytest.approx(127.0 / 128.0,
                                                              abs=1e-12)


def test_random_smooth_is_seed_deterministic(grid2d):
    a = make_initial("random_smooth", grid2d, seed=42)
    b = make_initial("random_smooth", grid2d, seed=42)
    c = make_initial("random_smooth", grid2d, seed=43)
    assert np.array_equal(a.data, b.data)
    assert not np.allclose(a.data, c.data)
    assert quadrature_mass(a) == pytest.approx(1.0, abs=1e-12)


def test_random_smooth_respects_dimension(grid3d):
    psi = make_initial("random_smooth", grid3d, seed=0)
    assert psi.data.shape == (5,) + grid3d.shape


def test_from_file_requires_path(grid2d):
    with pytest.raises(ConfigError):
        make_initial("from_file", grid2d)


def test_from_file_round_trips_and_checks_grid(tmp_path, grid2d):
    psi = random_spinor(grid2d, seed=9)
    path = tmp_path / "state.sp2b"
    write_snapshot(path, psi, t=0.25)
    again = make_initial("from_file", grid2d, path=str(path))
    assert np.array_equal(again.data, psi.data)
    other = build_grid(2, 8.0, 64)
    with pytest.raises(ConfigError):
        make_initial("from_file", other, path=str(path))


def test_unknown_kind_raises(grid2d):
    with pytest.raises(ConfigError):
        make_initial("plane_wave", grid2d)


def test_normalize_flag_rescales_to_unit_mass(tmp_path, grid2d):
    psi = make_initial("gaussian_ini1", grid2d)
    psi.data *= 3.0
    path = tmp_path / "scaled.sp2b"
    write_snapshot(path, psi)
    renorm = make_initial("from_file", grid2d, path=str(path),
                          normalize=True)
    assert quadrature_mass(renorm) == pytest.approx(1.0, abs=1e-12)
