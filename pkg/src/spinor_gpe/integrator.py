"""Operator-splitting time integration built from the two exact sub-flows.

A scheme is an ordered list of (operator tag, coefficient) factors applied
left to right to the state.  Both shipped schemes are palindromic:

* ``ts2``  --  nonlinear(tau/2) . linear(tau) . nonlinear(tau/2), second
  order.
* ``ts4``  --  the classic fourth-order triple-jump composition
  linear(a1) . nonlinear(b1) . linear(a2) . nonlinear(b2) . linear(a2)
  . nonlinear(b1) . linear(a1) with s = 2 - 2**(1/3), a1 = 1/(2s),
  a2 = (1 - 2**(1/3))/(2s), b1 = 1/s, b2 = -2**(1/3)/s.  Linear and
  nonlinear coefficients each sum to 1.

Only the linear factor sees the wall clock (its frame rotation is applied
at the current time).  Within a composite step starting at ``t_n``, the
k-th linear factor starts at ``t_n + (sum of preceding linear
coefficients) * tau``; nonlinear factors are autonomous and do not advance
that clock.  Across the trajectory, time is always computed as
``t0 + n * tau`` from the step index, never accumulated by repeated
addition, so long runs carry no clock roundoff.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .diagnostics import DiagnosticsRecord, compute_record
from .errors import ConfigError
from .grid import SpectralGrid
from .linear_flow import LinearFlow
from .nonlinear_flow import nonlinear_step_data
from .params import ModelParams
from .state import SpinorField

__all__ = [
    "LINEAR",
    "NONLINEAR",
    "SplitScheme",
    "ClockedState",
    "make_scheme",
    "Stepper",
    "step",
    "evolve",
]

LINEAR = "linear"
NONLINEAR = "nonlinear"

_CBRT2 = 2.0 ** (1.0 / 3.0)
_TRIPLE_JUMP = 2.0 - _CBRT2


@dataclass(frozen=True)
class SplitScheme:
    """Named palindromic factor sequence with its formal order."""

    name: str
    factors: tuple[tuple[str, float], ...]
    order: int

    def __post_init__(self):
        for tag, _ in self.factors:
            if tag not in (LINEAR, NONLINEAR):
                raise ValueError(f"unknown factor tag {tag!r}")
        for tag in (LINEAR, NONLINEAR):
            total = sum(c for k, c in self.factors if k == tag)
            if abs(total - 1.0) > 1e-14:
                raise ValueError(
                    f"{self.name}: {tag} coefficients sum to {total!r}, not 1")

    def linear_offsets(self) -> tuple[float, ...]:
        """Clock offset (in units of tau) at which each factor starts.

        Only preceding *linear* coefficients advance the offset.
        """
        offsets = []
        acc = 0.0
        for tag, coeff in self.factors:
            offsets.append(acc)
            if tag == LINEAR:
                acc += coeff
        return tuple(offsets)


@dataclass(frozen=True)
class ClockedState:
    """Trajectory point: field, wall-clock time, and step index."""

    psi: SpinorField
    t: float
    n: int


def make_scheme(name: str) -> SplitScheme:
    """Build one of the shipped compositions: ``"ts2"`` or ``"ts4"``."""
    key = name.lower()
    if key == "ts2":
        return SplitScheme("ts2", ((NONLINEAR, 0.5), (LINEAR, 1.0),
                                   (NONLINEAR, 0.5)), order=2)
    if key == "ts4":
        a1 = 1.0 / (2.0 * _TRIPLE_JUMP)
        a2 = (1.0 - _CBRT2) / (2.0 * _TRIPLE_JUMP)
        b1 = 1.0 / _TRIPLE_JUMP
        b2 = -_CBRT2 / _TRIPLE_JUMP
        return SplitScheme("ts4", ((LINEAR, a1), (NONLINEAR, b1),
                                   (LINEAR, a2), (NONLINEAR, b2),
                                   (LINEAR, a2), (NONLINEAR, b1),
                                   (LINEAR, a1)), order=4)
    raise ValueError(f"unknown scheme {name!r}; expected 'ts2' or 'ts4'")


class Stepper:
    """Reusable single-step engine for a fixed (grid, params, scheme, tau).

    ``propagator_cache=True`` precomputes and reuses the per-mode unitaries
    for every distinct linear sub-step length the scheme uses (two tables
    for ``ts4``).  ``cache_potential=True`` evaluates the trap once and
    reuses the table; by default the potential is re-evaluated analytically
    at the nodes for each nonlinear factor.
    """

    def __init__(self, grid: SpectralGrid, params: ModelParams,
                 scheme: SplitScheme, tau: float, *,
                 propagator_cache: bool = False,
                 cache_potential: bool = False):
        self.grid = grid
        self.params = params
        self.scheme = scheme
        self.tau = float(tau)
        self._flow = LinearFlow(grid, params, cache=propagator_cache)
        self._offsets = scheme.linear_offsets()
        self._v_table = params.trap_potential(grid) if cache_potential else None

    def _potential(self) -> np.ndarray:
        if self._v_table is not None:
            return self._v_table
        return self.params.trap_potential(self.grid)

    def advance(self, data: np.ndarray, t_n: float) -> np.ndarray:
        """Apply one composite step to raw component data starting at t_n."""
        tau = self.tau
        for (tag, coeff), off in zip(self.scheme.factors, self._offsets):
            if tag == LINEAR:
                data = self._flow.step(data, t_n + off * tau, coeff * tau)
            else:
                data = nonlinear_step_data(data, self._potential(),
                                           self.params, coeff * tau)
        return data

    def step_state(self, state: ClockedState) -> ClockedState:
        data = self.advance(np.array(state.psi.data, copy=True), state.t)
        return ClockedState(SpinorField(self.grid, data),
                            state.t + self.tau, state.n + 1)


def step(state: ClockedState, tau: float, scheme: SplitScheme,
         params: ModelParams) -> ClockedState:
    """One composite step of an arbitrary state (builds a transient engine).

    For trajectories, construct a :class:`Stepper` once instead.
    """
    return Stepper(state.psi.grid, params, scheme, tau).step_state(state)


Observer = Callable[[int, float, SpinorField], None]


def evolve(psi0: SpinorField, params: ModelParams, tau: float, t_final: float,
           scheme: SplitScheme | str = "ts2", *, t0: float = 0.0,
           diag_every: int = 0, observers: Iterable[Observer] = (),
           propagator_cache: bool = False,
           cache_potential: bool = False,
           ) -> tuple[SpinorField, list[DiagnosticsRecord]]:
    """Drive the trajectory from t0 to t_final in uniform steps of tau.

    The span must be an integer number of steps (relative slack 1e-12).
    Diagnostics are sampled at step 0, every ``diag_every`` steps, and at
    the final step when ``diag_every > 0``; observers are called at every
    step (including step 0) with ``(step index, time, field)`` and must
    treat the field as read-only.

    Returns the final field and the sampled diagnostics rows.
    """
    if isinstance(scheme, str):
        scheme = make_scheme(scheme)
    if tau == 0.0:
        raise ConfigError("tau must be nonzero")
    span = t_final - t0
    n_steps = int(round(span / tau))
    if n_steps < 0 or abs(n_steps * tau - span) > 1e-12 * max(1.0, abs(t_final), abs(t0)):
        raise ConfigError(
            f"t_final - t0 = {span!r} is not an integer multiple of tau = {tau!r}")

    stepper = Stepper(psi0.grid, params, scheme, tau,
                      propagator_cache=propagator_cache,
                      cache_potential=cache_potential)
    observers = tuple(observers)
    records: list[DiagnosticsRecord] = []

    def visit(n: int, data: np.ndarray) -> None:
        t = t0 + n * tau
        if diag_every > 0 and (n % diag_every == 0 or n == n_steps):
            field = SpinorField(psi0.grid, data)
            records.append(compute_record(field, params, t))
        if observers:
            field = SpinorField(psi0.grid, data)
            for obs in observers:
                obs(n, t, field)

    data = np.array(psi0.data, copy=True)
    visit(0, data)
    for n in range(1, n_steps + 1):
        data = stepper.advance(data, t0 + (n - 1) * tau)
        visit(n, data)
    return SpinorField(psi0.grid, data), records
