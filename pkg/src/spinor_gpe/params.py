"""Physical model parameters."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .grid import SpectralGrid


@dataclass(frozen=True)
class ModelParams:
    """Couplings and trap for the five-component condensate model.

    c0, c1, c2 : density, spin-exchange and spin-singlet interaction
    strengths; omega : rotation frequency; gamma_soc : Rashba-type
    spin-orbit coupling strength (acts in the x-y plane); gamma_x/y/z :
    harmonic trap frequencies.
    """

    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    omega: float = 0.0
    gamma_soc: float = 0.0
    gamma_x: float = 1.0
    gamma_y: float = 1.0
    gamma_z: float = 1.0

    def trap_potential(self, grid: SpectralGrid) -> np.ndarray:
        """Harmonic potential V(x) = (gx^2 x^2 + gy^2 y^2 [+ gz^2 z^2]) / 2."""
        mesh = grid.mesh()
        freqs = (self.gamma_x, self.gamma_y, self.gamma_z)[: grid.dim]
        v = np.zeros(grid.shape)
        for g, c in zip(freqs, mesh):
            v = v + 0.5 * (g * g) * (c * c)
        return v
