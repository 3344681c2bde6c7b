"""Grid construction, FFT conventions, and the transform counter."""

import numpy as np
import pytest

from spinor_gpe.grid import SpectralGrid, build_grid, fft1, fft_counter, ifft1

from conftest import rel_l2


# ---------------------------------------------------------------------------
# construction and node layout

@pytest.mark.parametrize("dim,L,N", [(1, 8.0, 32), (4, 8.0, 32),
                                     (2, 0.0, 32), (2, -2.0, 32),
                                     (2, 8.0, 31), (2, 8.0, 2)])
def test_rejects_invalid_construction(dim, L, N):
    with pytest.raises(ValueError):
        build_grid(dim, L, N)


def test_nodes_cover_half_open_box():
    g = build_grid(2, 8.0, 32)
    assert g.h == pytest.approx(0.5)
    assert g.x[0] == -8.0
    assert g.x[-1] == 8.0 - g.h
    assert np.allclose(np.diff(g.x), g.h)


def test_node_set_symmetric_under_wrap_map():
    g = build_grid(2, 5.0, 16)
    wrapped = g.x[(-np.arange(g.N)) % g.N]
    # x_0 = -L is its own image on the periodic torus (identified with +L).
    assert wrapped[0] == -5.0
    assert np.allclose(wrapped[1:], -g.x[1:])


def test_wavenumbers_in_fft_natural_order_with_nyquist():
    g = build_grid(2, 4.0, 8)
    base = np.pi / 4.0
    expected = base * np.array([0, 1, 2, 3, -4, -3, -2, -1])
    assert np.allclose(g.nu, expected)
    # Nyquist mode is present, not zeroed.
    assert g.nu[4] == pytest.approx(-np.pi)


def test_axis_coords_and_modes_broadcast_shapes():
    g = build_grid(3, 6.0, 12)
    assert g.axis_coords(0).shape == (12, 1, 1)
    assert g.axis_coords(2).shape == (1, 1, 12)
    # With a leading component axis the spatial block shifts right.
    assert g.axis_modes(1, ndim=4).shape == (1, 1, 12, 1)
    x, y, z = g.mesh()
    assert (x + y + z).shape == g.shape


def test_rsq_matches_mesh():
    g = build_grid(2, 3.0, 10)
    x, y = g.mesh()
    assert np.allclose(g.rsq(), x * x + y * y)


# ---------------------------------------------------------------------------
# transform conventions

def test_forward_inverse_round_trip():
    g = build_grid(2, 8.0, 32)
    rng = np.random.default_rng(11)
    f = rng.standard_normal((5, 32, 32)) + 1j * rng.standard_normal((5, 32, 32))
    assert rel_l2(g.inverse(g.forward(f)), f) < 1e-14


def test_forward_of_plane_wave_is_single_coefficient():
    g = build_grid(2, 4.0, 16)
    x, y = g.mesh()
    p, q = 3, 14  # q indexes a negative wavenumber
    f = np.exp(1j * (g.nu[p] * x + g.nu[q] * y))
    c = g.forward(f)
    # nodes start at -L, so bin (p, q) carries the anchor phase
    # exp(-i (nu_p + nu_q) L) = (-1)^(p+q); diagonal mode multipliers
    # are insensitive to it and the inverse transform undoes it.
    expected = np.exp(-1j * (g.nu[p] + g.nu[q]) * g.L)
    assert abs(c[p, q] - expected) < 1e-13
    c[p, q] = 0.0
    assert np.abs(c).max() < 1e-13


def test_parseval_with_quadrature_weights():
    g = build_grid(2, 8.0, 48)
    rng = np.random.default_rng(5)
    f = rng.standard_normal(g.shape) + 1j * rng.standard_normal(g.shape)
    c = g.forward(f)
    lhs = g.h ** 2 * np.sum(np.abs(f) ** 2)
    rhs = (2 * g.L) ** 2 * np.sum(np.abs(c) ** 2)
    assert lhs == pytest.approx(rhs, rel=1e-13)


def test_spectral_derivative_of_trig_mode_is_exact():
    g = build_grid(2, 4.0, 16)
    x, y = g.mesh()
    k = g.nu[5]
    f = np.sin(k * x) * np.cos(g.nu[2] * y)
    df = g.spectral_derivative(f, 0)
    assert rel_l2(df, k * np.cos(k * x) * np.cos(g.nu[2] * y)) < 1e-13


def test_spectral_derivative_of_gaussian_matches_calculus():
    g = build_grid(2, 8.0, 64)
    x, y = g.mesh()
    f = np.exp(-(x ** 2 + y ** 2) / 2.0)
    for axis, coord in ((0, x), (1, y)):
        df = g.spectral_derivative(f, axis)
        assert rel_l2(df, -coord * f) < 1e-12


def test_spectral_derivative_respects_leading_component_axis():
    g = build_grid(2, 8.0, 32)
    rng = np.random.default_rng(3)
    f = rng.standard_normal((5,) + g.shape)
    stacked = g.spectral_derivative(f, 1)
    single = np.stack([g.spectral_derivative(f[i], 1) for i in range(5)])
    assert rel_l2(stacked, single) < 1e-14


# ---------------------------------------------------------------------------
# the line-transform counter

def test_counter_counts_lines_not_calls():
    g = build_grid(2, 8.0, 16)
    arr = np.zeros((5, 16, 16), dtype=complex)
    fft_counter.reset()
    fft1(arr, axis=1)
    assert fft_counter.fft_lines == 5 * 16
    ifft1(arr, axis=2)
    assert fft_counter.ifft_lines == 5 * 16
    assert fft_counter.pairs == 5 * 16


def test_counter_reset_and_repr():
    fft_counter.reset()
    assert fft_counter.pairs == 0
    assert "pairs=0" in repr(fft_counter)


def test_full_grid_transform_line_tally():
    g = build_grid(2, 8.0, 16)
    f = np.zeros(g.shape, dtype=complex)
    fft_counter.reset()
    g.forward(f)
    # one pass per axis, N lines each
    assert fft_counter.fft_lines == 2 * 16
    g.inverse(f)
    assert fft_counter.ifft_lines == 2 * 16


def test_bad_thread_env_falls_back_to_serial(monkeypatch):
    monkeypatch.setenv("SPINOR_THREADS", "not-a-number")
    arr = np.ones(8, dtype=complex)
    out = ifft1(fft1(arr, 0), 0)
    assert np.allclose(out, arr)
