"""Pilot despreading, LMMSE user-channel estimate and jamming-channel estimate."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .model import InvalidParameterError, PilotCodebook, SystemParams

# slack for |corr_u|^2 + |corr_ubar|^2 <= 1 with float round-off
_CORR_SLACK = 1e-9


@dataclass(frozen=True)
class Coefficients:
    """Scalars that describe the estimates conditioned on the jamming sequence.

    ``h_hat = alpha_1 h + alpha_2 g + c_u N_t s_u^*`` and
    ``g_hat = b g + N_t s_ubar^*``.
    """

    c_u: float
    alpha_1: float
    alpha_2: complex
    b: complex
    gamma_j: float
    sigma: float


@dataclass
class ChannelEstimates:
    h_hat: np.ndarray
    g_hat: np.ndarray
    coeffs: Coefficients


class HEstimate(NamedTuple):
    h_hat: np.ndarray
    c_u: float
    alpha_1: float
    alpha_2: complex


def jamming_correlations(s_j: np.ndarray, codebook: PilotCodebook) -> tuple[complex, complex]:
    """Return ``(s_j^T s_u^*, s_j^T s_ubar^*)``."""
    s_j = np.asarray(s_j)
    return complex(s_j @ codebook.s_u.conj()), complex(s_j @ codebook.s_ubar.conj())


def despread(Y_t: np.ndarray, s: np.ndarray) -> np.ndarray:
    """Correlate the received pilot block with a pilot sequence: ``Y_t s^*``."""
    Y_t = np.asarray(Y_t)
    s = np.asarray(s)
    if s.ndim != 1 or Y_t.shape[-1] != s.shape[0]:
        raise InvalidParameterError(
            f"cannot despread block of shape {Y_t.shape} with sequence of shape {s.shape}")
    return Y_t @ s.conj()


def lmmse_scale(params: SystemParams) -> float:
    """The LMMSE scaling ``c_u``; it does not depend on the jamming sequence."""
    tp = params.tau * params.p_t
    return math.sqrt(tp) * params.beta_u / (tp * params.beta_u + params.q_t * params.beta_j + 1.0)


def estimate_h(y_t: np.ndarray, params: SystemParams, corr_u: complex = 0.0) -> HEstimate:
    """LMMSE estimate of the user channel from the despread pilot ``y_t``."""
    c_u = lmmse_scale(params)
    alpha_1 = c_u * math.sqrt(params.tau * params.p_t)
    alpha_2 = c_u * math.sqrt(params.tau * params.q_t) * complex(corr_u)
    return HEstimate(c_u * np.asarray(y_t), c_u, alpha_1, alpha_2)


def estimate_g(Y_t: np.ndarray, s_ubar: np.ndarray, params: SystemParams,
               corr_ubar: complex = 0.0, s_u: np.ndarray | None = None):
    """Jamming-channel estimate by projecting onto an unused pilot.

    Returns ``(g_hat, b)`` with ``b = sqrt(tau q_t) s_j^T s_ubar^*``. When
    ``s_u`` is given it is checked to be orthogonal to ``s_ubar``.
    """
    if s_u is not None:
        overlap = abs(np.vdot(s_ubar, s_u))
        if overlap > 1e-9:
            raise InvalidParameterError(
                f"unused pilot is not orthogonal to the user pilot (|s_u^T s_ubar^*| = {overlap:.3g})")
    b = math.sqrt(params.tau * params.q_t) * complex(corr_ubar)
    return despread(Y_t, s_ubar), b


def compute_sigma(params: SystemParams) -> float:
    """Per-antenna power of estimation errors plus noise seen by the MMSE-type filter."""
    c_u = lmmse_scale(params)
    return (params.p_d * params.beta_u * (1.0 - c_u * math.sqrt(params.tau * params.p_t))
            + params.q_d * (params.beta_j * (1.0 + params.q_t) + 1.0)
            + 1.0)


def effective_coefficients(params: SystemParams, corr_u: complex, corr_ubar: complex) -> Coefficients:
    corr_u = complex(corr_u)
    corr_ubar = complex(corr_ubar)
    if abs(corr_u) ** 2 + abs(corr_ubar) ** 2 > 1.0 + _CORR_SLACK:
        raise InvalidParameterError(
            f"|corr_u|^2 + |corr_ubar|^2 = {abs(corr_u) ** 2 + abs(corr_ubar) ** 2:.6g} exceeds 1")
    c_u = lmmse_scale(params)
    sq = math.sqrt(params.tau * params.q_t)
    b = sq * corr_ubar
    return Coefficients(
        c_u=c_u,
        alpha_1=c_u * math.sqrt(params.tau * params.p_t),
        alpha_2=c_u * sq * corr_u,
        b=b,
        gamma_j=abs(b) ** 2 * params.beta_j + 1.0,
        sigma=compute_sigma(params),
    )


def estimate_channels(Y_t: np.ndarray, codebook: PilotCodebook, params: SystemParams,
                      s_j: np.ndarray) -> ChannelEstimates:
    """Both estimates plus their coefficients for one received pilot block.

    ``s_j`` only enters the coefficients; the estimates themselves use the
    received block and the codebook alone.
    """
    corr_u, corr_ubar = jamming_correlations(s_j, codebook)
    h_est = estimate_h(despread(Y_t, codebook.s_u), params, corr_u)
    g_hat, _ = estimate_g(Y_t, codebook.s_ubar, params, corr_ubar, s_u=codebook.s_u)
    return ChannelEstimates(h_est.h_hat, g_hat, effective_coefficients(params, corr_u, corr_ubar))
