"""Monte-Carlo evaluation of the effective SINR and the achievable rate.

The SINR is conditioned on the jamming sequence, so the simulation is
nested: an outer loop draws jamming sequences and, for each one, an inner
loop draws channels and pilot noise to estimate the four conditional
moments (desired gain, gain variance, jamming power, noise power).

Seeding: every inner chunk and every outer draw has its own generator
derived from ``(master_seed, stream, outer_index[, chunk])``. The chunk
layout depends only on ``inner_samples``, so results never depend on the
number of workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .estimation import (compute_sigma, despread, effective_coefficients,
                         jamming_correlations, lmmse_scale)
from .filters import FilterKind, ReceiveFilter, build_filter
from .model import (InvalidParameterError, PilotCodebook, SystemParams, build_codebook,
                    complex_normal, derive_rng, pilot_rx, sample_channels,
                    sample_jamming_sequence)

STREAM_JAMMING = 1
STREAM_INNER = 2

DEFAULT_SEED = 20170305
_MIN_CHUNKS = 10
_MAX_CHUNK = 1000
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class McConfig:
    inner_samples: int = 10_000
    outer_samples: int = 100
    master_seed: int = DEFAULT_SEED
    workers: int = 1

    def __post_init__(self):
        if self.inner_samples < 100:
            raise InvalidParameterError(f"inner_samples must be >= 100, got {self.inner_samples}")
        if self.outer_samples < 1:
            raise InvalidParameterError(f"outer_samples must be >= 1, got {self.outer_samples}")
        if self.workers < 1:
            raise InvalidParameterError(f"workers must be >= 1, got {self.workers}")

    def chunk_sizes(self) -> list[int]:
        n_chunks = max(_MIN_CHUNKS, -(-self.inner_samples // _MAX_CHUNK))
        return [len(c) for c in np.array_split(np.empty(self.inner_samples), n_chunks)]


@dataclass
class SinrBreakdown:
    """Sample estimates of the conditional moments entering the SINR."""

    desired_gain: complex
    gain_variance: float
    jamming_power: float
    noise_power: float
    n_samples: int
    standard_errors: dict = field(default_factory=dict)
    # per-draw values of a^H h, |a^H g|^2 and ||a||^2, kept for batch statistics
    samples: tuple | None = field(default=None, repr=False)

    @classmethod
    def from_samples(cls, ah, ag2, aa) -> "SinrBreakdown":
        n = ah.shape[0]
        if n < 2:
            raise InvalidParameterError("at least two samples are needed")
        mean = ah.mean()
        dev2 = np.abs(ah - mean) ** 2
        var = dev2.sum() / (n - 1)
        rn = math.sqrt(n)
        se = {
            "desired_gain": math.sqrt(var) / rn,
            "gain_variance": float(dev2.std(ddof=1)) / rn,
            "jamming_power": float(ag2.std(ddof=1)) / rn,
            "noise_power": float(aa.std(ddof=1)) / rn,
        }
        return cls(complex(mean), float(var), float(ag2.mean()), float(aa.mean()), n, se,
                   (ah, ag2, aa))


@dataclass
class RateEstimate:
    """Achievable-rate estimate with its per-jamming-draw ingredients."""

    rate: float
    stderr: float
    log_terms: np.ndarray = field(repr=False)
    rhos: np.ndarray = field(repr=False)


def combine(a, y_d) -> complex:
    """Filter output ``a^H y_d``."""
    if isinstance(a, ReceiveFilter):
        a = a.a
    a = np.asarray(a)
    y_d = np.asarray(y_d)
    if a.shape != y_d.shape:
        raise InvalidParameterError(f"filter shape {a.shape} does not match signal shape {y_d.shape}")
    return complex(np.vdot(a, y_d))


def effective_sinr(bd: SinrBreakdown, p_d: float, q_d: float) -> float:
    num = p_d * abs(bd.desired_gain) ** 2
    terms = (p_d, q_d, bd.gain_variance, bd.jamming_power, bd.noise_power)
    if any(t < 0 for t in terms):
        raise InvalidParameterError(f"SINR inputs must be nonnegative, got {terms}")
    den = p_d * bd.gain_variance + q_d * bd.jamming_power + bd.noise_power
    if num == 0:
        return 0.0
    if den == 0:
        return math.inf
    return num / den


def sinr_stderr(bd: SinrBreakdown, p_d: float, q_d: float, n_batches: int = _MIN_CHUNKS) -> float:
    """Batch-means standard error of the effective SINR."""
    ah, ag2, aa = bd.samples
    rhos = [effective_sinr(SinrBreakdown.from_samples(*parts), p_d, q_d)
            for parts in zip(np.array_split(ah, n_batches), np.array_split(ag2, n_batches),
                             np.array_split(aa, n_batches))]
    return float(np.std(rhos, ddof=1) / math.sqrt(n_batches))


def log2_1p(rho: float) -> float:
    return math.log1p(rho) / _LN2


def synthesize_jamming_sequence(codebook: PilotCodebook, corr_u: complex, corr_ubar: complex) -> np.ndarray:
    """A unit-norm jamming sequence with prescribed correlations to both pilots.

    The sequence is ``corr_u s_u + corr_ubar s_ubar + r s_other`` with the
    remainder on the first other codebook entry.
    """
    corr_u, corr_ubar = complex(corr_u), complex(corr_ubar)
    rem = 1.0 - abs(corr_u) ** 2 - abs(corr_ubar) ** 2
    if rem < -1e-9:
        raise InvalidParameterError(f"correlations exceed the unit sphere: remainder {rem:.3g}")
    rem = max(rem, 0.0)
    s_j = corr_u * codebook.s_u + corr_ubar * codebook.s_ubar
    if rem > 1e-15:
        others = [k for k in range(codebook.tau)
                  if k not in (codebook.used_index, codebook.unused_index)]
        if not others:
            raise InvalidParameterError(
                "tau = 2 leaves no room for a jamming component outside both pilots")
        s_j = s_j + math.sqrt(rem) * codebook.sequences[others[0]]
    return s_j / np.linalg.norm(s_j)


def _simulate_chunk(params, codebook, s_j, kinds, sigma, rng, n):
    h, g = sample_channels(params, rng, n)
    N_t = complex_normal(rng, (n, params.M, params.tau))
    Y_t = pilot_rx(params, h, g, codebook.s_u, s_j, N_t)
    h_hat = lmmse_scale(params) * despread(Y_t, codebook.s_u)
    g_hat = despread(Y_t, codebook.s_ubar)
    out = {}
    for kind in kinds:
        a = build_filter(kind, h_hat, g_hat, sigma, params.q_d).a
        ah = np.sum(a.conj() * h, axis=-1)
        ag2 = np.abs(np.sum(a.conj() * g, axis=-1)) ** 2
        aa = np.sum(np.abs(a) ** 2, axis=-1)
        out[kind] = (ah, ag2, aa)
    return out


def conditional_breakdowns(params: SystemParams, kinds, s_j: np.ndarray, cfg: McConfig,
                           outer_index: int = 0, codebook: PilotCodebook | None = None,
                           sigma_scale: float = 1.0) -> dict:
    """Conditional moments for several filters on one shared set of inner draws."""
    codebook = codebook or build_codebook(params.tau)
    kinds = [FilterKind.parse(k) for k in kinds]
    sigma = compute_sigma(params) * sigma_scale
    parts = {k: ([], [], []) for k in kinds}
    for chunk, n in enumerate(cfg.chunk_sizes()):
        rng = derive_rng(cfg.master_seed, STREAM_INNER, outer_index, chunk)
        res = _simulate_chunk(params, codebook, s_j, kinds, sigma, rng, n)
        for k in kinds:
            for acc, arr in zip(parts[k], res[k]):
                acc.append(arr)
    return {k: SinrBreakdown.from_samples(*(np.concatenate(p) for p in parts[k])) for k in kinds}


def sinr_terms_mc(params: SystemParams, filter_kind, corr_u: complex, corr_ubar: complex,
                  cfg: McConfig, outer_index: int = 0, sigma_scale: float = 1.0) -> SinrBreakdown:
    """Conditional moments for a jamming sequence with the given pilot correlations."""
    return sinr_terms_mc_all(params, [filter_kind], corr_u, corr_ubar, cfg,
                             outer_index, sigma_scale)[FilterKind.parse(filter_kind)]


def sinr_terms_mc_all(params: SystemParams, kinds, corr_u: complex, corr_ubar: complex,
                      cfg: McConfig, outer_index: int = 0, sigma_scale: float = 1.0) -> dict:
    effective_coefficients(params, corr_u, corr_ubar)  # validates the correlation bound
    codebook = build_codebook(params.tau)
    s_j = synthesize_jamming_sequence(codebook, corr_u, corr_ubar)
    return conditional_breakdowns(params, kinds, s_j, cfg, outer_index, codebook, sigma_scale)


def jamming_draw(tau: int, master_seed: int, outer_index: int) -> np.ndarray:
    """The jamming sequence used by outer draw ``outer_index``."""
    return sample_jamming_sequence(tau, derive_rng(master_seed, STREAM_JAMMING, outer_index))


def _outer_task(args):
    params, kinds, cfg, o, sigma_scale = args
    s_j = jamming_draw(params.tau, cfg.master_seed, o)
    bds = conditional_breakdowns(params, kinds, s_j, cfg, o, sigma_scale=sigma_scale)
    return {k: (effective_sinr(bd, params.p_d, params.q_d),
                sinr_stderr(bd, params.p_d, params.q_d)) for k, bd in bds.items()}


def achievable_rates(params: SystemParams, kinds, cfg: McConfig,
                     sigma_scale: float = 1.0) -> dict:
    """Achievable rate in bits/symbol for each filter kind, on shared draws."""
    kinds = [FilterKind.parse(k) for k in kinds]
    tasks = [(params, kinds, cfg, o, sigma_scale) for o in range(cfg.outer_samples)]
    if cfg.workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_outer_task, tasks))
    else:
        results = [_outer_task(t) for t in tasks]
    out = {}
    for k in kinds:
        rhos = np.array([r[k][0] for r in results])
        logs = np.log1p(rhos) / _LN2
        rate = params.prelog * math.fsum(logs) / len(logs)
        if len(logs) > 1:
            se = params.prelog * float(np.std(logs, ddof=1)) / math.sqrt(len(logs))
        else:
            rho, rho_se = results[0][k]
            se = params.prelog * rho_se / ((1.0 + rho) * _LN2)
        out[k] = RateEstimate(rate, se, logs, rhos)
    return out


def achievable_rate(params: SystemParams, filter_kind, cfg: McConfig,
                    sigma_scale: float = 1.0) -> RateEstimate:
    kind = FilterKind.parse(filter_kind)
    return achievable_rates(params, [kind], cfg, sigma_scale)[kind]


def rate_from_sinrs(params: SystemParams, rhos) -> float:
    """Prelog times the average of ``log2(1 + rho)`` over jamming draws."""
    rhos = np.asarray(rhos, dtype=float)
    return params.prelog * math.fsum(np.log1p(rhos) / _LN2) / rhos.size


def jamming_correlations_for(params: SystemParams, master_seed: int, outer_index: int):
    """Pilot correlations of outer jamming draw ``outer_index``."""
    return jamming_correlations(jamming_draw(params.tau, master_seed, outer_index),
                                build_codebook(params.tau))
