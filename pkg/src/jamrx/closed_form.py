"""Large-scale SINR approximations for the MMSE-type and ZF-type filters.

Both approximations are evaluated at finite ``M``, keeping the
``sigma / (q_d M)`` corrections of the MMSE-type expression. The appendix
term functions return each SINR ingredient normalized the way the
large-antenna limits are taken: the desired, gain-uncertainty and jamming
terms by ``M^2`` and the noise term by ``M``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .estimation import Coefficients, effective_coefficients
from .filters import FilterKind
from .model import SystemParams
from .rate import DEFAULT_SEED, jamming_correlations_for, rate_from_sinrs


@dataclass(frozen=True)
class ClosedFormInputs:
    params: SystemParams
    coeffs: Coefficients
    M: int | None = None

    @property
    def n_antennas(self) -> int:
        return self.params.M if self.M is None else self.M

    @classmethod
    def from_correlations(cls, params, corr_u, corr_ubar, M=None) -> "ClosedFormInputs":
        return cls(params, effective_coefficients(params, corr_u, corr_ubar), M)


@dataclass(frozen=True)
class AppendixTerms:
    desired_signal: float
    gain_uncertainty: float
    jamming: float
    noise: float

    def sinr(self, M: int) -> float:
        """Combine the normalized terms back into an SINR."""
        den = self.gain_uncertainty + self.jamming + self.noise / M
        return self.desired_signal / den if den > 0 else math.inf


def _common(inp: ClosedFormInputs):
    p, c = inp.params, inp.coeffs
    a1sq = c.alpha_1 ** 2
    a2sq = abs(c.alpha_2) ** 2
    bsq = abs(c.b) ** 2
    M = inp.n_antennas
    num = M * p.p_d * a1sq * p.beta_u ** 2
    base = a1sq * p.beta_u * (p.p_d * p.beta_u + 1.0) + c.c_u ** 2
    return p, c, M, a1sq, a2sq, bsq, num, base


def rho_mmse_approx(inp: ClosedFormInputs) -> float:
    """Large-scale SINR approximation for the MMSE-type filter."""
    p, c, M, a1sq, a2sq, bsq, num, base = _common(inp)
    if p.q_d == 0:
        # sigma/(q_d M) -> inf: the jamming ratio tends to 1 and the jamming term vanishes
        return num / (base + a2sq * p.beta_j)
    s = c.sigma / (p.q_d * M)
    ratio = (s + 1.0) / (s + c.gamma_j)
    jam = M * ratio ** 2 * p.q_d * a2sq * p.beta_j ** 2
    leak = a2sq * p.beta_j * (bsq * p.beta_j + (s + 1.0) ** 2) / (s + c.gamma_j) ** 2
    return num / (jam + base + leak)


def rho_zf_approx(inp: ClosedFormInputs) -> float:
    """Large-scale SINR approximation for the ZF-type filter."""
    p, c, M, a1sq, a2sq, bsq, num, base = _common(inp)
    jam = M * p.q_d * a2sq * p.beta_j ** 2 / c.gamma_j ** 2
    return num / (jam + base + a2sq * p.beta_j / c.gamma_j)


def rho_asymptotic(params: SystemParams, coeffs: Coefficients) -> float:
    """Common large-``M`` limit of both approximations; ``inf`` when unbounded.

    The limit is finite only when the jammer contaminates the user pilot
    (``alpha_2 != 0``) and jams the data phase (``q_d > 0``).
    """
    a2sq = abs(coeffs.alpha_2) ** 2
    if params.q_d == 0 or a2sq == 0:
        return math.inf
    return (params.p_d * coeffs.alpha_1 ** 2 * params.beta_u ** 2 * coeffs.gamma_j ** 2
            / (params.q_d * a2sq * params.beta_j ** 2))


def inner_product_limits(params: SystemParams, coeffs: Coefficients) -> dict:
    """Deterministic limits of the normalized inner products between estimates and channels.

    Keys: ``hh`` for h_hat^H h / M, ``hg`` for h_hat^H g_hat / M, ``gh`` for
    g_hat^H h / M and ``gg`` for ||g_hat||^2 / M.
    """
    return {
        "hh": coeffs.alpha_1 * params.beta_u,
        "hg": coeffs.alpha_2.conjugate() * coeffs.b * params.beta_j,
        "gh": 0.0,
        "gg": coeffs.gamma_j,
    }


def appendix_terms_mmse(inp: ClosedFormInputs) -> AppendixTerms:
    p, c, M, a1sq, a2sq, bsq, *_ = _common(inp)
    if p.q_d == 0:
        raise ValueError("the normalized MMSE-type terms vanish at q_d = 0; use rho_mmse_approx")
    k = (p.q_d / c.sigma) ** 2
    s = c.sigma / (p.q_d * M)
    desired = p.p_d * k * a1sq * p.beta_u ** 2
    uncertainty = p.p_d * k * a1sq * p.beta_u ** 2 / M
    jamming = (p.q_d ** 3 / c.sigma ** 2) * ((s + 1.0) / (s + c.gamma_j)) ** 2 * a2sq * p.beta_j ** 2
    noise = k * (a1sq * p.beta_u + c.c_u ** 2
                 + a2sq * p.beta_j * (bsq * p.beta_j + (s + 1.0) ** 2) / (s + c.gamma_j) ** 2)
    return AppendixTerms(desired, uncertainty, jamming, noise)


def appendix_terms_zf(inp: ClosedFormInputs) -> AppendixTerms:
    """ZF-type counterparts of the MMSE-type terms (the filter needs no ``q_d/sigma`` scale)."""
    p, c, M, a1sq, a2sq, *_ = _common(inp)
    desired = p.p_d * a1sq * p.beta_u ** 2
    return AppendixTerms(
        desired_signal=desired,
        gain_uncertainty=desired / M,
        jamming=p.q_d * a2sq * p.beta_j ** 2 / c.gamma_j ** 2,
        noise=a1sq * p.beta_u + c.c_u ** 2 + a2sq * p.beta_j / c.gamma_j,
    )


def rho_approx(kind, inp: ClosedFormInputs) -> float:
    kind = FilterKind.parse(kind)
    if kind is FilterKind.MMSE_TYPE:
        return rho_mmse_approx(inp)
    if kind is FilterKind.ZF_TYPE:
        return rho_zf_approx(inp)
    raise ValueError("no large-scale approximation is available for MRC")


def rate_from_closed_form(params: SystemParams, filter_kind, M: int | None = None,
                          outer_samples: int = 100, master_seed: int | None = None,
                          correlations=None) -> float:
    """Achievable rate with the SINR replaced by its large-scale approximation.

    The jamming sequences are the same outer draws the Monte-Carlo rate uses
    for ``master_seed``; ``correlations`` pins them explicitly instead.
    """
    if correlations is None:
        seed = DEFAULT_SEED if master_seed is None else master_seed
        correlations = [jamming_correlations_for(params, seed, o) for o in range(outer_samples)]
    rhos = [rho_approx(filter_kind, ClosedFormInputs.from_correlations(params, cu, cub, M))
            for cu, cub in correlations]
    return rate_from_sinrs(params, rhos)
