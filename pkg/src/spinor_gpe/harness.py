"""Experiment harnesses: trajectory runs, convergence ladders, benchmarks,
and the oracle conformance battery behind ``spinor-gpe verify``.

Everything here is deterministic given its inputs: randomized fields are
seeded, node sums use a fixed reduction tree, and CSV cells are written
with ``repr`` (shortest round-trip form), so rerunning a config produces
byte-identical outputs.
"""

from __future__ import annotations

import math
import os
import tempfile
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .config import RunConfig
from .diagnostics import (DiagnosticsRecord, angular_momentum, compute_record,
                          condensate_widths, energy, mass)
from .errors import ConfigError
from .grid import SpectralGrid, build_grid, fft_counter
from .integrator import Stepper, evolve, make_scheme
from .linear_flow import LinearFlow, mode_propagator
from .nonlinear_flow import a00_evolution, nonlinear_step_data, spin_rotation
from .params import ModelParams
from .rotation import rotate_field_backward, rotate_field_forward, shear_x
from .state import SpinorField, make_initial
from . import oracles
from .snapshot import read_snapshot, write_snapshot

__all__ = [
    "RunResult", "run_simulation",
    "LadderPoint", "LadderReport", "temporal_ladder", "spatial_ladder",
    "BenchPoint", "BenchReport", "bench", "scheme_time_ratio",
    "CheckResult", "verify_suite",
]

CSV_NAME = "diagnostics.csv"


# ---------------------------------------------------------------------------
# run

@dataclass(frozen=True)
class RunResult:
    final: SpinorField
    records: list[DiagnosticsRecord]
    csv_path: Path
    snapshot_paths: list[Path]


def _csv_text(records: list[DiagnosticsRecord], dim: int) -> str:
    header = "t,mass,energy,magnetization,lz,delta_x,delta_y"
    if dim == 3:
        header += ",delta_z"
    lines = [header]
    for rec in records:
        lines.append(",".join(repr(v) for v in rec.as_row()))
    return "\n".join(lines) + "\n"


def run_simulation(config: RunConfig) -> RunResult:
    """Execute one configured trajectory, writing the CSV and snapshots.

    Diagnostics rows are sampled at step 0, at the final step, and at every
    ``diag_every``-th step in between (when ``diag_every > 0``); snapshots
    are written at every positive multiple of ``snapshot_every``.
    """
    grid = config.grid()
    params = config.model_params()
    psi0 = make_initial(config.init, grid, path=config.init_path,
                        seed=config.seed)
    outdir = Path(config.outdir)
    outdir.mkdir(parents=True, exist_ok=True)

    n_steps = config.n_steps()
    records: list[DiagnosticsRecord] = []
    snapshot_paths: list[Path] = []

    def observer(n: int, t: float, field: SpinorField) -> None:
        if n == 0 or n == n_steps or (config.diag_every > 0
                                      and n % config.diag_every == 0):
            records.append(compute_record(field, params, t))
        if (config.snapshot_every > 0 and n > 0
                and n % config.snapshot_every == 0):
            path = outdir / f"snapshot_{n:08d}.sp2b"
            write_snapshot(path, field, t, omega=params.omega,
                           gamma_soc=params.gamma_soc)
            snapshot_paths.append(path)

    final, _ = evolve(psi0, params, config.tau, config.t_final,
                      config.scheme, observers=(observer,),
                      propagator_cache=config.propagator_cache)

    csv_path = outdir / CSV_NAME
    csv_path.write_text(_csv_text(records, grid.dim), encoding="ascii")
    return RunResult(final=final, records=records, csv_path=csv_path,
                     snapshot_paths=snapshot_paths)


# ---------------------------------------------------------------------------
# convergence ladders

@dataclass(frozen=True)
class LadderPoint:
    """One resolution of a convergence ladder."""

    label: float                  # tau (temporal) or h (spatial)
    errors: tuple[float, ...]     # relative l2 error per component, level 2..-2
    max_error: float


@dataclass(frozen=True)
class LadderReport:
    mode: str
    points: tuple[LadderPoint, ...]
    rates: tuple[tuple[float, ...], ...]   # per-component rates between rungs
    max_rates: tuple[float, ...]

    def format(self) -> str:
        head = {"temporal": "tau", "spatial": "h"}[self.mode]
        cols = [f"err(l={lv})" for lv in (2, 1, 0, -1, -2)]
        lines = [f"{head:>12} " + " ".join(f"{c:>11}" for c in cols) + f" {'max':>11}"]
        for k, pt in enumerate(self.points):
            row = f"{pt.label:>12.6g} " + " ".join(
                f"{e:>11.4e}" for e in pt.errors) + f" {pt.max_error:>11.4e}"
            lines.append(row)
            if k < len(self.rates):
                rates = self.rates[k]
                lines.append(f"{'rate':>12} " + " ".join(
                    f"{r:>11.3f}" for r in rates) + f" {self.max_rates[k]:>11.3f}")
        return "\n".join(lines)


def _component_errors(data: np.ndarray, ref: np.ndarray) -> tuple[float, ...]:
    """Relative discrete l2 error per component (absolute where ref is 0)."""
    errs = []
    for m in range(5):
        diff = np.linalg.norm(data[m] - ref[m])
        norm = np.linalg.norm(ref[m])
        errs.append(float(diff / norm) if norm > 0 else float(diff))
    return tuple(errs)


def _ladder_rates(points: list[LadderPoint]):
    rates = []
    max_rates = []
    for a, b in zip(points, points[1:]):
        shrink = np.log(a.label / b.label)
        rates.append(tuple(
            float(np.log(ea / eb) / shrink) if ea > 0 and eb > 0 else float("nan")
            for ea, eb in zip(a.errors, b.errors)))
        max_rates.append(float(np.log(a.max_error / b.max_error) / shrink))
    return tuple(rates), tuple(max_rates)


def temporal_ladder(config: RunConfig, taus, scheme: str | None = None, *,
                    ref_tau: float | None = None,
                    reference: SpinorField | None = None) -> LadderReport:
    """Error vs step size against a fine high-order reference trajectory.

    The reference uses the fourth-order composition at ``ref_tau``
    (default: a sixteenth of the smallest ladder step).  A precomputed
    ``reference`` field at ``config.t_final`` may be passed instead to
    share one reference across several ladders.
    """
    taus = [float(t) for t in taus]
    if not taus:
        raise ConfigError("temporal ladder needs at least one tau")
    scheme = scheme or config.scheme
    span = config.t_final
    for tau in taus:
        steps = round(span / tau)
        if steps <= 0 or abs(steps * tau - span) > 1e-12 * max(1.0, span):
            raise ConfigError(
                f"ladder tau {tau!r} does not divide t_final {span!r}")
    if ref_tau is None:
        ref_tau = min(taus) / 16.0

    grid = config.grid()
    params = config.model_params()
    psi0 = make_initial(config.init, grid, path=config.init_path,
                        seed=config.seed)
    if reference is None:
        reference, _ = evolve(psi0, params, ref_tau, span, "ts4",
                              propagator_cache=config.propagator_cache)
    elif reference.data.shape != (5,) + grid.shape:
        raise ConfigError(
            f"reference field shape {reference.data.shape} does not match "
            f"the config grid {(5,) + grid.shape}")

    points = []
    for tau in sorted(taus, reverse=True):
        out, _ = evolve(psi0, params, tau, span, scheme,
                        propagator_cache=config.propagator_cache)
        errors = _component_errors(out.data, reference.data)
        points.append(LadderPoint(tau, errors, max(errors)))
    rates, max_rates = _ladder_rates(points)
    return LadderReport("temporal", tuple(points), rates, max_rates)


def _grid_points_for(h: float, box: float, where: str) -> int:
    n_exact = 2.0 * box / h
    n = round(n_exact)
    if abs(n - n_exact) > 1e-9 or n < 4 or n % 2:
        raise ConfigError(
            f"{where}: spacing h = {h!r} does not give an even node count "
            f"for box length {box!r} (2L/h = {n_exact!r})")
    return n


def spatial_ladder(config: RunConfig, hs, *,
                   ref_h: float | None = None) -> LadderReport:
    """Error vs grid spacing against a finer nested reference grid.

    Every ladder grid must be a restriction of the reference grid (node
    sets nested), so fields are compared pointwise on coarse nodes.  All
    runs use the configured scheme and tau, chosen small enough that the
    time error sits below the spatial floor of interest.
    """
    hs = [float(h) for h in hs]
    if not hs:
        raise ConfigError("spatial ladder needs at least one h")
    if ref_h is None:
        ref_h = min(hs) / 2.0
    n_ref = _grid_points_for(ref_h, config.L, "reference")
    sizes = [_grid_points_for(h, config.L, "ladder") for h in hs]
    for h, n in zip(hs, sizes):
        if n_ref % n != 0:
            raise ConfigError(
                f"ladder h = {h!r} (N = {n}) is not a restriction of the "
                f"reference grid (N = {n_ref}); choose nested spacings")

    params = config.model_params()
    ref_grid = build_grid(config.dim, config.L, n_ref)
    ref0 = make_initial(config.init, ref_grid, path=config.init_path,
                        seed=config.seed)
    reference, _ = evolve(ref0, params, config.tau, config.t_final,
                          config.scheme,
                          propagator_cache=config.propagator_cache)

    points = []
    for h, n in sorted(zip(hs, sizes), key=lambda p: -p[0]):
        grid = build_grid(config.dim, config.L, n)
        psi0 = make_initial(config.init, grid, path=config.init_path,
                            seed=config.seed)
        out, _ = evolve(psi0, params, config.tau, config.t_final,
                        config.scheme,
                        propagator_cache=config.propagator_cache)
        stride = n_ref // n
        restrict = reference.data[(slice(None),)
                                  + (slice(None, None, stride),) * config.dim]
        errors = _component_errors(out.data, restrict)
        points.append(LadderPoint(h, errors, max(errors)))
    rates, max_rates = _ladder_rates(points)
    return LadderReport("spatial", tuple(points), rates, max_rates)


# ---------------------------------------------------------------------------
# benchmark

@dataclass(frozen=True)
class BenchPoint:
    n: int
    nodes: int
    seconds_per_step: float
    fft_pairs_per_linear_step: int


@dataclass(frozen=True)
class BenchReport:
    dim: int
    scheme: str
    steps: int
    points: tuple[BenchPoint, ...]
    slope: float

    def format(self) -> str:
        lines = [f"{'N':>6} {'nodes':>10} {'s/step':>12} {'fft pairs':>10}"]
        for pt in self.points:
            lines.append(f"{pt.n:>6} {pt.nodes:>10} "
                         f"{pt.seconds_per_step:>12.6f} "
                         f"{pt.fft_pairs_per_linear_step:>10}")
        lines.append(f"log-log slope of time vs nodes: {self.slope:.3f}")
        return "\n".join(lines)


_BENCH_PARAMS = ModelParams(c0=100.0, c1=-1.0, c2=1.0,
                            omega=0.2, gamma_soc=0.3)


def _bench_state(dim: int, n: int, seed: int) -> SpinorField:
    grid = build_grid(dim, 8.0, n)
    return make_initial("random_smooth", grid, seed=seed)


def bench(dim: int = 2, sizes=(64, 128, 192, 256), scheme: str = "ts2", *,
          steps: int = 20, warmup: int = 3, repeats: int = 3,
          tau: float = 1e-4, seed: int = 0) -> BenchReport:
    """Time steady-state steps per grid size and fit the scaling exponent.

    Initialization and I/O are excluded: the fixed-step-size tables
    (per-mode propagator, trap) are cached and the engine is warmed up
    before timing starts, so the loop measures pure stepping work.  Each
    size is timed ``repeats`` times and the fastest loop is kept, which
    suppresses scheduler noise the same way ``timeit`` does.
    """
    points = []
    for n in sizes:
        psi = _bench_state(dim, n, seed)
        stepper = Stepper(psi.grid, _BENCH_PARAMS, make_scheme(scheme), tau,
                          propagator_cache=True, cache_potential=True)
        data = np.array(psi.data, copy=True)
        for k in range(warmup):
            data = stepper.advance(data, k * tau)
        fft_counter.reset()
        stepper._flow.step(np.array(data, copy=True), 0.0, tau)
        pairs = fft_counter.pairs
        best = math.inf
        clock = warmup
        for _ in range(max(repeats, 1)):
            start = time.perf_counter()
            for k in range(steps):
                data = stepper.advance(data, (clock + k) * tau)
            best = min(best, time.perf_counter() - start)
            clock += steps
        points.append(BenchPoint(n=n, nodes=n ** dim,
                                 seconds_per_step=best / steps,
                                 fft_pairs_per_linear_step=pairs))
    lx = np.log([p.nodes for p in points])
    ly = np.log([p.seconds_per_step for p in points])
    spread = float(np.sum((lx - lx.mean()) ** 2))
    slope = (float(np.sum((lx - lx.mean()) * (ly - ly.mean())) / spread)
             if spread > 0 else math.nan)   # one size: no slope to fit
    return BenchReport(dim=dim, scheme=scheme, steps=steps,
                       points=tuple(points), slope=slope)


def scheme_time_ratio(dim: int = 2, n: int = 128, *, steps: int = 20,
                      warmup: int = 3, repeats: int = 3, tau: float = 1e-4,
                      seed: int = 0) -> float:
    """Wall-time ratio of the fourth-order to the second-order scheme.

    Each scheme is timed ``repeats`` times (fastest loop kept) so one
    scheduler hiccup cannot skew the ratio.
    """
    times = {}
    for scheme in ("ts2", "ts4"):
        psi = _bench_state(dim, n, seed)
        stepper = Stepper(psi.grid, _BENCH_PARAMS, make_scheme(scheme), tau,
                          propagator_cache=True, cache_potential=True)
        data = np.array(psi.data, copy=True)
        for k in range(warmup):
            data = stepper.advance(data, k * tau)
        best = math.inf
        clock = warmup
        for _ in range(max(repeats, 1)):
            start = time.perf_counter()
            for k in range(steps):
                data = stepper.advance(data, (clock + k) * tau)
            best = min(best, time.perf_counter() - start)
            clock += steps
        times[scheme] = best
    return times["ts4"] / times["ts2"]


# ---------------------------------------------------------------------------
# verification battery

@dataclass(frozen=True)
class CheckResult:
    name: str
    worst: float
    bound: float

    @property
    def passed(self) -> bool:
        return self.worst <= self.bound

    def format(self) -> str:
        flag = "PASS" if self.passed else "FAIL"
        return f"[{flag}] {self.name}: worst {self.worst:.3e} (bound {self.bound:.1e})"


def _check_mode_propagator(rng, draws: int) -> CheckResult:
    worst = 0.0
    for _ in range(draws):
        omega = rng.uniform(-1.0, 1.0)
        gamma = rng.uniform(0.0, 1.5)
        nu_p, nu_q = rng.uniform(-20.0, 20.0, size=2)
        tau = rng.choice([1e-8, 1e-3, 0.05, 0.3]) * rng.choice([-1.0, 1.0])
        u = mode_propagator(omega, gamma, nu_p, nu_q, tau)
        ref = oracles.expm_mode_propagator(omega, gamma, nu_p, nu_q, tau)
        worst = max(worst, float(np.max(np.abs(u - ref))))
    return CheckResult("mode propagator vs dense exponential", worst, 1e-12)


def _check_propagator_unitarity(rng, draws: int) -> CheckResult:
    eye = np.eye(5)
    worst = 0.0
    for _ in range(draws):
        u = mode_propagator(rng.uniform(-1, 1), rng.uniform(0, 1.5),
                            rng.uniform(-20, 20), rng.uniform(-20, 20),
                            rng.uniform(-0.5, 0.5))
        worst = max(worst, float(np.max(np.abs(u.conj().T @ u - eye))))
    return CheckResult("mode propagator unitarity", worst, 1e-12)


def _check_spin_rotation(rng, draws: int) -> CheckResult:
    worst = 0.0
    for _ in range(draws):
        f_plus = rng.standard_normal() + 1j * rng.standard_normal()
        f_z = rng.standard_normal()
        c1 = rng.uniform(-2.0, 2.0)
        tau = rng.uniform(0.0, 0.4)
        f_norm = np.hypot(abs(f_plus), f_z)
        u = spin_rotation(f_plus, f_z, f_norm, c1, tau)
        ref = oracles.expm_spin_rotation(f_plus, f_z, c1, tau)
        worst = max(worst, float(np.max(np.abs(u - ref))))
    return CheckResult("spin rotation vs dense exponential", worst, 1e-12)


def _check_node_ode(rng, draws: int) -> CheckResult:
    params = ModelParams(c0=100.0, c1=-1.0, c2=1.0)
    worst = 0.0
    for trial in range(draws):
        psi = 0.4 * (rng.standard_normal(5) + 1j * rng.standard_normal(5))
        if trial % 10 == 0:
            psi *= 1e-4          # exercise the small-angle branches
        v = rng.uniform(0.0, 2.0)
        out = nonlinear_step_data(psi.reshape(5, 1, 1),
                                  np.full((1, 1), v), params, 0.2)
        ref = oracles.solve_node_ode(psi, v, params, 0.2)
        worst = max(worst, float(np.max(np.abs(out.ravel() - ref))))
    return CheckResult("nonlinear step vs single-node ODE", worst, 1e-10)


def _check_a00(rng, draws: int) -> CheckResult:
    params = ModelParams(c0=100.0, c1=-1.0, c2=1.0)
    worst = 0.0
    for _ in range(draws):
        a0 = rng.standard_normal() + 1j * rng.standard_normal()
        v = rng.uniform(0.0, 2.0)
        rho = rng.uniform(0.0, 3.0)
        dt = rng.uniform(0.0, 0.3)
        got = a00_evolution(a0, v, rho, params, dt)
        ref = a0 * np.exp(-2j * dt * (v + (params.c0 + params.c2 / 5.0) * rho))
        worst = max(worst, abs(got - ref))
    return CheckResult("singlet amplitude phase law", worst, 1e-12)


def _check_linear_mol() -> CheckResult:
    grid = build_grid(2, 7.0, 32)
    x, y = grid.mesh()
    rng = np.random.default_rng(5)
    envelope = np.exp(-(x ** 2 + y ** 2) / 2.0)
    data = np.empty((5,) + grid.shape, np.complex128)
    for m in range(5):
        c = rng.standard_normal(4)
        data[m] = (c[0] + c[1] * x + c[2] * y + 1j * c[3] * x * y / 3) * envelope
    params = ModelParams(c0=0, c1=0, c2=0, omega=0.2, gamma_soc=0.1)
    flow = LinearFlow(grid, params)
    out = flow.step(data.copy(), 0.0, 1e-3)
    ref = oracles.solve_linear_mol(data, grid, params, 1e-3)
    worst = float(np.max(np.abs(out - ref)))
    return CheckResult("linear step vs method-of-lines (N=32)", worst, 1e-9)


def _check_rotation_roundtrip(rng) -> CheckResult:
    grid = build_grid(2, 8.0, 64)
    worst = 0.0
    for _ in range(20):
        f = rng.standard_normal(grid.shape) + 1j * rng.standard_normal(grid.shape)
        theta = rng.uniform(-7.0, 7.0)
        back = rotate_field_backward(rotate_field_forward(f, theta, grid),
                                     theta, grid)
        worst = max(worst, float(np.max(np.abs(back - f))))
    return CheckResult("rotation map round trip", worst, 1e-12)


def _check_shear_analytic() -> CheckResult:
    grid = build_grid(2, 8.0, 64)
    x, y = grid.mesh()
    f = np.exp(-(x ** 2 / 1.8 + y ** 2 / 0.9)).astype(np.complex128)
    a = 0.37
    sheared = shear_x(f.copy(), a, grid)
    analytic = np.exp(-((x + a * y) ** 2 / 1.8 + y ** 2 / 0.9))
    worst = float(np.max(np.abs(sheared - analytic)))
    return CheckResult("x-shear vs analytic Gaussian", worst, 1e-12)


def _check_rotation_analytic() -> CheckResult:
    grid = build_grid(2, 8.0, 64)
    x, y = grid.mesh()
    f = np.exp(-(x ** 2 / 1.8 + y ** 2 / 0.9)).astype(np.complex128)
    worst = 0.0
    for theta in (0.3, -1.2, 2.0, 4.5):
        rot = rotate_field_forward(f.copy(), theta, grid)
        c, s = np.cos(theta), np.sin(theta)
        xr, yr = c * x + s * y, -s * x + c * y
        analytic = np.exp(-(xr ** 2 / 1.8 + yr ** 2 / 0.9))
        worst = max(worst, float(np.max(np.abs(rot - analytic))))
    return CheckResult("rotation map vs analytic Gaussian", worst, 1e-11)


def _check_fft_audit() -> CheckResult:
    grid = build_grid(2, 8.0, 64)
    params = ModelParams(c0=0, c1=0, c2=0, omega=0.2, gamma_soc=0.3)
    flow = LinearFlow(grid, params)
    rng = np.random.default_rng(2)
    data = rng.standard_normal((5,) + grid.shape) * (1 + 0j)
    fft_counter.reset()
    flow.step(data, 0.1, 1e-3)
    pairs = fft_counter.pairs
    return CheckResult("fft pairs per 2D linear step (want 30N)",
                       abs(pairs - 30 * grid.N), 0.0)


def _check_snapshot_roundtrip(rng) -> CheckResult:
    grid = build_grid(2, 6.0, 16)
    data = rng.standard_normal((5,) + grid.shape) \
        + 1j * rng.standard_normal((5,) + grid.shape)
    psi = SpinorField(grid, np.ascontiguousarray(data))
    with tempfile.TemporaryDirectory() as tmp:
        path = os.path.join(tmp, "state.sp2b")
        write_snapshot(path, psi, 1.25, omega=0.2, gamma_soc=0.3)
        first = Path(path).read_bytes()
        snap = read_snapshot(path)
        write_snapshot(path, snap.field, snap.t, omega=snap.omega,
                       gamma_soc=snap.gamma_soc)
        second = Path(path).read_bytes()
    exact = float(not (np.array_equal(snap.data, psi.data) and first == second))
    return CheckResult("snapshot round trip bit-exact", exact, 0.0)


def _check_energy_closed_form() -> CheckResult:
    grid = build_grid(2, 8.0, 128)
    x, y = grid.mesh()
    psi = SpinorField.zeros(grid)
    psi.data[2] = np.exp(-(x ** 2 + y ** 2) / 2.0) / np.sqrt(np.pi)
    params = ModelParams(c0=0, c1=0, c2=0, omega=0, gamma_soc=0)
    worst = abs(energy(psi, params) - 1.0)
    worst = max(worst, abs(mass(psi) - 1.0))
    worst = max(worst, abs(angular_momentum(psi)))
    dx, dy = condensate_widths(psi)
    worst = max(worst, abs(dx - 0.5), abs(dy - 0.5))
    return CheckResult("diagnostics on unit Gaussian (closed forms)",
                       float(worst), 1e-12)


def verify_suite(draws: int = 400, seed: int = 2024) -> list[CheckResult]:
    """Run the full conformance battery; each check is oracle-backed."""
    rng = np.random.default_rng(seed)
    return [
        _check_mode_propagator(rng, draws),
        _check_propagator_unitarity(rng, draws),
        _check_spin_rotation(rng, draws),
        _check_node_ode(rng, max(draws // 8, 25)),
        _check_a00(rng, draws),
        _check_linear_mol(),
        _check_rotation_roundtrip(rng),
        _check_shear_analytic(),
        _check_rotation_analytic(),
        _check_fft_audit(),
        _check_snapshot_roundtrip(rng),
        _check_energy_closed_form(),
    ]
