"""Run configuration: flat ``key = value`` text files.

The format is deliberately minimal so configs stay diff-friendly and
parseable from anything: one assignment per line, ``#`` starts a comment
(full-line or trailing), blank lines ignored, no sections or nesting.
Unknown keys, duplicate keys, and malformed values are reported with the
file name and line number.

Example::

    # breathing-mode check
    dim = 2
    L = 8
    N = 128
    tau = 1e-3
    t_final = 0.5
    scheme = ts2
    c0 = 100
    c1 = -1
    c2 = 1
    omega = 0.2
    gamma_soc = 0.3
    init = gaussian_ini1
    diag_every = 50
    outdir = out/run1
"""

from __future__ import annotations

from dataclasses import dataclass, fields

from .errors import ConfigError
from .grid import SpectralGrid, build_grid
from .params import ModelParams
from .state import INITIAL_KINDS

__all__ = ["RunConfig", "parse_config", "parse_config_text"]

_SCHEMES = ("ts2", "ts4")


@dataclass(frozen=True)
class RunConfig:
    """Validated parameters of one simulation run."""

    dim: int
    L: float
    N: int
    tau: float
    t_final: float
    scheme: str = "ts2"
    c0: float = 0.0
    c1: float = 0.0
    c2: float = 0.0
    omega: float = 0.0
    gamma_soc: float = 0.0
    gamma_x: float = 1.0
    gamma_y: float = 1.0
    gamma_z: float = 1.0
    init: str = "gaussian_ini1"
    init_path: str | None = None
    snapshot_every: int = 0
    diag_every: int = 0
    propagator_cache: bool = False
    seed: int = 0
    outdir: str = "."

    def grid(self) -> SpectralGrid:
        return build_grid(self.dim, self.L, self.N)

    def model_params(self) -> ModelParams:
        return ModelParams(c0=self.c0, c1=self.c1, c2=self.c2,
                           omega=self.omega, gamma_soc=self.gamma_soc,
                           gamma_x=self.gamma_x, gamma_y=self.gamma_y,
                           gamma_z=self.gamma_z)

    def n_steps(self) -> int:
        return int(round(self.t_final / self.tau))


_REQUIRED = ("dim", "L", "N", "tau", "t_final")
_FIELD_TYPES = {f.name: f.type for f in fields(RunConfig)}

_TRUE_WORDS = {"true", "1", "yes", "on"}
_FALSE_WORDS = {"false", "0", "no", "off"}


def _convert(key: str, text: str, where: str):
    kind = _FIELD_TYPES[key]
    try:
        if kind == "int":
            value = int(text, 0)
        elif kind == "float":
            value = float(text)
        elif kind == "bool":
            low = text.lower()
            if low in _TRUE_WORDS:
                value = True
            elif low in _FALSE_WORDS:
                value = False
            else:
                raise ValueError(f"not a boolean: {text!r}")
        else:
            value = text
    except ValueError as exc:
        raise ConfigError(f"{where}: invalid value for {key}: {exc}") from None
    return value


def parse_config_text(text: str, source: str = "<config>") -> RunConfig:
    """Parse configuration text; ``source`` labels error messages."""
    values: dict = {}
    seen_lines: dict[str, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        where = f"{source}:{lineno}"
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{where}: expected 'key = value', got {raw.strip()!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        val = val.strip()
        if key not in _FIELD_TYPES:
            raise ConfigError(f"{where}: unknown key {key!r}")
        if key in values:
            raise ConfigError(
                f"{where}: duplicate key {key!r} (first set on line {seen_lines[key]})")
        if not val:
            raise ConfigError(f"{where}: empty value for {key}")
        values[key] = _convert(key, val, where)
        seen_lines[key] = lineno

    missing = [k for k in _REQUIRED if k not in values]
    if missing:
        raise ConfigError(f"{source}: missing required keys: {', '.join(missing)}")

    config = RunConfig(**values)
    _validate(config, source)
    return config


def parse_config(path) -> RunConfig:
    """Parse a configuration file from disk."""
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config_text(fh.read(), source=str(path))


def _validate(cfg: RunConfig, source: str) -> None:
    def fail(msg: str):
        raise ConfigError(f"{source}: {msg}")

    if cfg.dim not in (2, 3):
        fail(f"dim must be 2 or 3, got {cfg.dim}")
    if not cfg.L > 0:
        fail(f"L must be positive, got {cfg.L}")
    if cfg.N < 4 or cfg.N % 2 != 0:
        fail(f"N must be an even integer >= 4, got {cfg.N}")
    if not cfg.tau > 0:
        fail(f"tau must be positive, got {cfg.tau}")
    if cfg.t_final < 0:
        fail(f"t_final must be >= 0, got {cfg.t_final}")
    steps = round(cfg.t_final / cfg.tau)
    if abs(steps * cfg.tau - cfg.t_final) > 1e-12 * max(1.0, abs(cfg.t_final)):
        fail(f"t_final = {cfg.t_final!r} is not an integer multiple of tau = {cfg.tau!r}")
    if cfg.scheme not in _SCHEMES:
        fail(f"scheme must be one of {_SCHEMES}, got {cfg.scheme!r}")
    if cfg.init not in INITIAL_KINDS:
        fail(f"init must be one of {INITIAL_KINDS}, got {cfg.init!r}")
    if cfg.init == "from_file" and not cfg.init_path:
        fail("init = from_file requires init_path")
    if cfg.snapshot_every < 0:
        fail(f"snapshot_every must be >= 0, got {cfg.snapshot_every}")
    if cfg.diag_every < 0:
        fail(f"diag_every must be >= 0, got {cfg.diag_every}")
