"""Shared helpers for the test suite.

All randomized tests draw from seeded generators so every run is
reproducible; tolerances are asserted against fixed bounds.
"""

import numpy as np
import pytest

from spinor_gpe.grid import SpectralGrid, build_grid
from spinor_gpe.state import SpinorField, make_initial


def random_spinor(grid: SpectralGrid, seed: int = 0,
                  scale: float = 1.0) -> SpinorField:
    """Seeded band-limited random spinor with unit mass times `scale`.

    Thin wrapper over the catalogued ``random_smooth`` state so property
    tests share one source of smooth-but-generic fields.
    """
    psi = make_initial("random_smooth", grid, seed=seed)
    psi.data *= scale
    return psi


def rel_l2(a: np.ndarray, b: np.ndarray) -> float:
    """Relative l2 distance, absolute when the reference is zero."""
    ref = np.linalg.norm(b)
    return np.linalg.norm(a - b) / (ref if ref > 0 else 1.0)


@pytest.fixture
def grid2d() -> SpectralGrid:
    return build_grid(2, 8.0, 32)


@pytest.fixture
def grid3d() -> SpectralGrid:
    return build_grid(3, 6.0, 12)
