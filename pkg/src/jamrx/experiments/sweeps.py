"""Antenna-count and jamming-power sweeps."""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

from .. import __version__
from ..closed_form import rate_from_closed_form
from ..filters import FilterKind
from ..rate import achievable_rates, jamming_correlations_for
from .config import ConfigError, ExperimentConfig

CSV_COLUMNS = ("axis_name", "axis_value", "filter", "rate_sim_bits_per_symbol",
               "rate_sim_stderr", "rate_closed_form_bits_per_symbol")


@dataclass
class SweepRow:
    axis_name: str
    axis_value: float
    filter: str
    rate_sim: float
    rate_sim_stderr: float
    rate_closed_form: float | None = None

    def as_tuple(self) -> tuple:
        return (self.axis_name, self.axis_value, self.filter, self.rate_sim,
                self.rate_sim_stderr, self.rate_closed_form)


@dataclass
class SweepResult:
    rows: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict)
    # per-point, per-filter log2(1 + rho) over the outer draws; used for paired comparisons
    log_terms: dict = field(default_factory=dict, repr=False)

    def select(self, filter_kind) -> list:
        name = FilterKind.parse(filter_kind).value
        return [r for r in self.rows if r.filter == name]

    def rate(self, filter_kind, axis_value) -> SweepRow:
        for r in self.select(filter_kind):
            if r.axis_value == axis_value:
                return r
        raise KeyError((filter_kind, axis_value))


def _point_task(args):
    params, filters, mc, value = args
    rates = achievable_rates(params, filters, mc)
    corrs = [jamming_correlations_for(params, mc.master_seed, o) for o in range(mc.outer_samples)]
    out = []
    for k in filters:
        cf = None if k is FilterKind.MRC else rate_from_closed_form(params, k, correlations=corrs)
        out.append((k, rates[k], cf))
    return value, out


def run_sweep(cfg: ExperimentConfig) -> SweepResult:
    """Simulated and closed-form rates for every grid point and filter.

    Grid points are distributed over ``cfg.mc.workers`` processes; each point
    uses the same jamming and channel draws, so neighbouring points are
    directly comparable.
    """
    if not cfg.filters:
        raise ConfigError("filters: at least one filter kind is required")
    t0 = time.perf_counter()
    grid = cfg.axis.grid()
    inner_mc = replace(cfg.mc, workers=1)
    tasks = [(cfg.params_at(v), tuple(cfg.filters), inner_mc, v) for v in grid]
    if cfg.mc.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.mc.workers) as pool:
            results = list(pool.map(_point_task, tasks))
    else:
        results = [_point_task(t) for t in tasks]

    res = SweepResult()
    for value, per_filter in results:
        for kind, est, cf in per_filter:
            res.rows.append(SweepRow(cfg.axis.variable, value, kind.value, est.rate, est.stderr, cf))
            res.log_terms[(value, kind.value)] = est.log_terms
    p = cfg.params
    res.metadata = {
        "master_seed": cfg.mc.master_seed,
        "inner_samples": cfg.mc.inner_samples,
        "outer_samples": cfg.mc.outer_samples,
        "version": f"jamrx {__version__}",
        "axis": {"variable": cfg.axis.variable, "start": cfg.axis.start, "stop": cfg.axis.stop,
                 "points": cfg.axis.points, "scale": cfg.axis.scale},
        "params": {"M": p.M, "tau": p.tau, "T": p.T, "p_t": p.p_t, "p_d": p.p_d,
                   "q_t": p.q_t, "q_d": p.q_d, "beta_u": p.beta_u, "beta_j": p.beta_j},
        "filters": [k.value for k in cfg.filters],
        "wall_time_s": time.perf_counter() - t0,
    }
    return res


def run_sweep_antennas(cfg: ExperimentConfig) -> SweepResult:
    if cfg.axis.variable != "M":
        raise ConfigError(f"sweep.variable: the antenna sweep needs variable = M, got {cfg.axis.variable!r}")
    return run_sweep(cfg)


def run_sweep_jamming(cfg: ExperimentConfig) -> SweepResult:
    if cfg.axis.variable != "q" or cfg.axis.scale != "dB":
        raise ConfigError("sweep.variable/scale: the jamming sweep needs variable = q on a dB scale")
    return run_sweep(cfg)
