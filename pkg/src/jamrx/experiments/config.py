"""INI-style experiment configuration.

Example::

    [system]
    M = 100
    tau = 3
    T = 200
    p_t_db = 5
    p_d_db = 5
    q_t_db = 5
    q_d_db = 5
    beta_u = 1
    beta_j = 1

    [sweep]
    variable = M
    start = 50
    stop = 400
    points = 8
    scale = linear

    [monte_carlo]
    inner_samples = 10000
    outer_samples = 100
    seed = 20170305
    workers = 1

    [output]
    path = results.csv
    format = csv
    filters = mrc, mmse, zf
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from ..filters import FilterKind
from ..model import InvalidParameterError, SystemParams
from ..rate import DEFAULT_SEED, McConfig

SEED_ENV_VAR = "JAMRX_SEED"

# powers are configured in dB, fadings in linear scale
POWER_KEYS = ("p_t", "p_d", "q_t", "q_d")
SWEEP_VARIABLES = ("M", "q", "p", "p_t", "p_d", "q_t", "q_d", "beta_u", "beta_j")


class ConfigError(ValueError):
    """Invalid experiment configuration; the message names the offending field."""


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    return 10.0 * math.log10(x)


@dataclass(frozen=True)
class SweepAxis:
    """Grid definition. ``variable = "q"`` locks ``q_t = q_d``; ``"p"`` locks ``p_t = p_d``."""

    variable: str = "M"
    start: float = 50
    stop: float = 400
    points: int = 8
    scale: str = "linear"

    def __post_init__(self):
        if self.variable not in SWEEP_VARIABLES:
            raise ConfigError(f"sweep.variable: unknown variable {self.variable!r}; "
                              f"expected one of {', '.join(SWEEP_VARIABLES)}")
        if self.scale not in ("linear", "dB"):
            raise ConfigError(f"sweep.scale: expected 'linear' or 'dB', got {self.scale!r}")
        if not (math.isfinite(self.start) and math.isfinite(self.stop)):
            raise ConfigError("sweep.start/stop: bounds must be finite")
        if self.points < 2:
            raise ConfigError(f"sweep.points: need at least 2 points, got {self.points}")
        if self.variable == "M" and self.scale != "linear":
            raise ConfigError("sweep.scale: the antenna axis must be linear")

    def grid(self) -> list:
        vals = np.linspace(self.start, self.stop, self.points)
        if self.variable == "M":
            return [int(round(v)) for v in vals]
        return [float(v) for v in vals]

    @classmethod
    def parse(cls, text: str, variable: str, scale: str) -> "SweepAxis":
        """Parse ``start:stop:points[:scale]`` as given on the command line."""
        parts = text.split(":")
        if len(parts) not in (3, 4):
            raise ConfigError(f"--sweep: expected start:stop:points[:scale], got {text!r}")
        try:
            start, stop, points = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise ConfigError(f"--sweep: {exc}") from None
        return cls(variable, start, stop, points, parts[3] if len(parts) == 4 else scale)


def default_params() -> SystemParams:
    p = db_to_linear(5.0)
    return SystemParams(M=100, tau=3, T=200, p_t=p, p_d=p, q_t=p, q_d=p, beta_u=1.0, beta_j=1.0)


@dataclass(frozen=True)
class ExperimentConfig:
    params: SystemParams = field(default_factory=default_params)
    axis: SweepAxis = field(default_factory=SweepAxis)
    filters: tuple = (FilterKind.MRC, FilterKind.MMSE_TYPE, FilterKind.ZF_TYPE)
    mc: McConfig = field(default_factory=McConfig)
    out: str | None = None
    fmt: str = "csv"

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    def params_at(self, value) -> SystemParams:
        """System parameters at one grid value of the sweep axis."""
        var, p = self.axis.variable, self.params
        if var == "M":
            return p.with_(M=int(value))
        lin = db_to_linear(value) if self.axis.scale == "dB" else float(value)
        if var == "q":
            return p.with_(q_t=lin, q_d=lin)
        if var == "p":
            return p.with_(p_t=lin, p_d=lin)
        return p.with_(**{var: lin})


def antenna_sweep_config(**overrides) -> ExperimentConfig:
    return ExperimentConfig(axis=SweepAxis("M", 50, 400, 8, "linear"), **overrides)


def jamming_sweep_config(**overrides) -> ExperimentConfig:
    return ExperimentConfig(axis=SweepAxis("q", -20, 40, 7, "dB"), **overrides)


def parse_filters(text: str) -> tuple:
    try:
        return tuple(FilterKind.parse(t) for t in text.split(",") if t.strip())
    except ValueError as exc:
        raise ConfigError(f"filters: {exc}") from None


def _get(section, key, conv, fallback, where):
    if key not in section:
        return fallback
    raw = section[key]
    try:
        return conv(raw)
    except ValueError:
        raise ConfigError(f"{where}: [{section.name}] {key} = {raw!r} is not a valid "
                          f"{conv.__name__}") from None


def load_config(path: str, base: ExperimentConfig | None = None) -> ExperimentConfig:
    """Read an INI file on top of ``base`` (defaults when omitted)."""
    base = base or ExperimentConfig()
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    cp.optionxform = str
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config ({exc.strerror})") from None
    except configparser.Error as exc:
        raise ConfigError(f"{path}: {exc}") from None

    known = {"system", "sweep", "monte_carlo", "output"}
    for name in cp.sections():
        if name not in known:
            raise ConfigError(f"{path}: unknown section [{name}]")

    p = base.params
    sysd = {}
    if cp.has_section("system"):
        s = cp["system"]
        allowed = {"M", "tau", "T", "beta_u", "beta_j"} | {f"{k}_db" for k in POWER_KEYS} | set(POWER_KEYS)
        for key in s:
            if key not in allowed:
                raise ConfigError(f"{path}: [system] unknown key {key!r}")
        for key in ("M", "tau", "T"):
            sysd[key] = _get(s, key, int, getattr(p, key), path)
        for key in ("beta_u", "beta_j"):
            sysd[key] = _get(s, key, float, getattr(p, key), path)
        for key in POWER_KEYS:
            if f"{key}_db" in s and key in s:
                raise ConfigError(f"{path}: [system] give either {key} or {key}_db, not both")
            if f"{key}_db" in s:
                sysd[key] = db_to_linear(_get(s, f"{key}_db", float, 0.0, path))
            else:
                sysd[key] = _get(s, key, float, getattr(p, key), path)
        try:
            p = p.with_(**sysd)
        except InvalidParameterError as exc:
            raise ConfigError(f"{path}: [system] {exc}") from None

    axis = base.axis
    if cp.has_section("sweep"):
        s = cp["sweep"]
        axis = SweepAxis(
            variable=s.get("variable", axis.variable).strip(),
            start=_get(s, "start", float, axis.start, path),
            stop=_get(s, "stop", float, axis.stop, path),
            points=_get(s, "points", int, axis.points, path),
            scale=s.get("scale", axis.scale).strip(),
        )

    mc = base.mc
    if cp.has_section("monte_carlo"):
        s = cp["monte_carlo"]
        try:
            mc = McConfig(
                inner_samples=_get(s, "inner_samples", int, mc.inner_samples, path),
                outer_samples=_get(s, "outer_samples", int, mc.outer_samples, path),
                master_seed=_get(s, "seed", int, mc.master_seed, path),
                workers=_get(s, "workers", int, mc.workers, path),
            )
        except InvalidParameterError as exc:
            raise ConfigError(f"{path}: [monte_carlo] {exc}") from None

    out, fmt, filters = base.out, base.fmt, base.filters
    if cp.has_section("output"):
        s = cp["output"]
        out = s.get("path", out)
        fmt = s.get("format", fmt).strip().lower()
        if "filters" in s:
            filters = parse_filters(s["filters"])
    if fmt not in ("csv", "json"):
        raise ConfigError(f"{path}: [output] format must be csv or json, got {fmt!r}")

    return ExperimentConfig(p, axis, filters, mc, out, fmt)


def env_seed(default: int = DEFAULT_SEED) -> int:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{SEED_ENV_VAR}={raw!r} is not an integer") from None
