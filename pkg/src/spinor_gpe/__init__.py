"""Spectral split-step solver for rotating, spin-orbit-coupled
five-component condensate dynamics.

The public surface:

* grids and transforms -- :class:`SpectralGrid`, :func:`build_grid`
* model definition -- :class:`ModelParams`
* fields and initial states -- :class:`SpinorField`, :func:`make_initial`
* exact sub-flows -- :func:`linear_step`, :func:`nonlinear_step`
* composition and driving -- :func:`make_scheme`, :class:`Stepper`,
  :func:`evolve`
* observables -- :func:`mass`, :func:`energy`, :func:`magnetization`,
  :func:`angular_momentum`, :func:`condensate_widths`,
  :func:`width_law_reference`
* persistence -- :func:`read_snapshot`, :func:`write_snapshot`,
  :func:`parse_config`
"""

from .errors import ConfigError, NumericalConsistencyError, SnapshotFormatError
from .grid import SpectralGrid, build_grid, fft_counter
from .params import ModelParams
from .state import SpinorField, make_initial, density, spin_observables
from .linear_flow import LinearFlow, linear_step, apply_linear_fourier, mode_propagator
from .nonlinear_flow import nonlinear_step, spin_rotation, a00_evolution
from .integrator import (SplitScheme, ClockedState, make_scheme, Stepper,
                         step, evolve)
from .diagnostics import (DiagnosticsRecord, mass, energy, magnetization,
                          angular_momentum, condensate_widths,
                          width_law_reference, compute_record)
from .config import RunConfig, parse_config, parse_config_text
from .snapshot import Snapshot, read_snapshot, write_snapshot

__version__ = "0.1.0"

__all__ = [
    "ConfigError", "NumericalConsistencyError", "SnapshotFormatError",
    "SpectralGrid", "build_grid", "fft_counter",
    "ModelParams",
    "SpinorField", "make_initial", "density", "spin_observables",
    "LinearFlow", "linear_step", "apply_linear_fourier", "mode_propagator",
    "nonlinear_step", "spin_rotation", "a00_evolution",
    "SplitScheme", "ClockedState", "make_scheme", "Stepper", "step", "evolve",
    "DiagnosticsRecord", "mass", "energy", "magnetization",
    "angular_momentum", "condensate_widths", "width_law_reference",
    "compute_record",
    "RunConfig", "parse_config", "parse_config_text",
    "Snapshot", "read_snapshot", "write_snapshot",
    "__version__",
]
