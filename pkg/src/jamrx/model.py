"""System parameters and random sampling for the jammed single-user uplink.

All complex Gaussian draws split their variance equally between the real
and imaginary parts. Random generators are derived from a master seed and
an integer key so that every draw is a pure function of its indices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, fields, replace

import numpy as np


class InvalidParameterError(ValueError):
    """Raised for out-of-domain model parameters or mismatched shapes."""


@dataclass(frozen=True)
class SystemParams:
    """Scalar model parameters, all powers and fadings in linear scale."""

    M: int = 100
    tau: int = 3
    T: int = 200
    p_t: float = 1.0
    p_d: float = 1.0
    q_t: float = 1.0
    q_d: float = 1.0
    beta_u: float = 1.0
    beta_j: float = 1.0

    def __post_init__(self):
        if int(self.M) != self.M or self.M < 1:
            raise InvalidParameterError(f"M must be a positive integer, got {self.M!r}")
        if int(self.tau) != self.tau or self.tau < 2:
            raise InvalidParameterError(f"tau must be an integer >= 2, got {self.tau!r}")
        if int(self.T) != self.T or self.T <= self.tau:
            raise InvalidParameterError(
                f"T must be an integer larger than tau={self.tau}, got {self.T!r}")
        for f in fields(self)[3:]:
            v = getattr(self, f.name)
            if not math.isfinite(v) or v < 0:
                raise InvalidParameterError(
                    f"{f.name} must be finite and nonnegative, got {v!r}")

    def with_(self, **changes) -> "SystemParams":
        return replace(self, **changes)

    @property
    def prelog(self) -> float:
        """Fraction of the coherence block spent on data."""
        return 1.0 - self.tau / self.T


@dataclass(frozen=True)
class PilotCodebook:
    """Orthonormal pilot sequences, one per row."""

    sequences: np.ndarray
    used_index: int = 0
    unused_index: int = 1

    def __post_init__(self):
        if self.used_index == self.unused_index:
            raise InvalidParameterError("used and unused pilot indices must differ")

    @property
    def tau(self) -> int:
        return self.sequences.shape[0]

    @property
    def s_u(self) -> np.ndarray:
        return self.sequences[self.used_index]

    @property
    def s_ubar(self) -> np.ndarray:
        return self.sequences[self.unused_index]

    def gram(self) -> np.ndarray:
        """Matrix of inner products ``s_i^T s_k^*``."""
        return self.sequences @ self.sequences.conj().T


@dataclass
class BlockRealization:
    """Random draws of one coherence block."""

    h: np.ndarray
    g: np.ndarray
    s_j: np.ndarray
    N_t: np.ndarray
    n_d: np.ndarray


def build_codebook(tau: int, used_index: int = 0, unused_index: int = 1) -> PilotCodebook:
    """Rows of the unitary DFT matrix of size ``tau`` as pilot sequences."""
    if int(tau) != tau or tau < 2:
        raise InvalidParameterError(f"tau must be an integer >= 2, got {tau!r}")
    k = np.arange(tau)
    seqs = np.exp(-2j * np.pi * np.outer(k, k) / tau) / math.sqrt(tau)
    for idx in (used_index, unused_index):
        if not 0 <= idx < tau:
            raise InvalidParameterError(f"pilot index {idx} out of range for tau={tau}")
    return PilotCodebook(seqs, used_index, unused_index)


def derive_rng(master_seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the stream identified by ``key``."""
    ss = np.random.SeedSequence(int(master_seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def complex_normal(rng: np.random.Generator, shape, variance: float = 1.0) -> np.ndarray:
    """Circularly-symmetric complex Gaussian samples with the given variance."""
    scale = math.sqrt(variance / 2.0)
    z = rng.standard_normal(shape + (2,) if isinstance(shape, tuple) else (shape, 2))
    return scale * (z[..., 0] + 1j * z[..., 1])


def sample_jamming_sequence(tau: int, rng: np.random.Generator) -> np.ndarray:
    """Uniform draw from the complex unit sphere in ``tau`` dimensions."""
    if tau < 2:
        raise InvalidParameterError(f"tau must be >= 2, got {tau!r}")
    z = complex_normal(rng, (tau,))
    return z / np.linalg.norm(z)


def sample_channels(params: SystemParams, rng: np.random.Generator, size: int | None = None):
    """Draw ``(h, g)``; with ``size`` the leading axis indexes realizations."""
    shape = (params.M,) if size is None else (size, params.M)
    h = complex_normal(rng, shape, params.beta_u)
    g = complex_normal(rng, shape, params.beta_j)
    return h, g


def sample_block(params: SystemParams, rng: np.random.Generator,
                 s_j: np.ndarray | None = None) -> BlockRealization:
    if s_j is None:
        s_j = sample_jamming_sequence(params.tau, rng)
    h, g = sample_channels(params, rng)
    N_t = complex_normal(rng, (params.M, params.tau))
    n_d = complex_normal(rng, (params.M,))
    return BlockRealization(h, g, s_j, N_t, n_d)


def _check_vec(name, v, n):
    if v.shape[-1] != n:
        raise InvalidParameterError(f"{name} has trailing dimension {v.shape[-1]}, expected {n}")


def pilot_rx(params: SystemParams, h, g, s_u, s_j, N_t) -> np.ndarray:
    """Received pilot block ``Y_t`` (M x tau, or batched n x M x tau).

    ``Y_t = sqrt(tau p_t) h s_u^T + sqrt(tau q_t) g s_j^T + N_t``
    """
    h, g, s_u, s_j, N_t = map(np.asarray, (h, g, s_u, s_j, N_t))
    M, tau = params.M, params.tau
    _check_vec("h", h, M)
    _check_vec("g", g, M)
    _check_vec("s_u", s_u, tau)
    _check_vec("s_j", s_j, tau)
    if N_t.shape[-2:] != (M, tau):
        raise InvalidParameterError(f"N_t has shape {N_t.shape}, expected (..., {M}, {tau})")
    a = math.sqrt(tau * params.p_t)
    b = math.sqrt(tau * params.q_t)
    return a * h[..., :, None] * s_u + b * g[..., :, None] * s_j + N_t


def data_rx(params: SystemParams, h, g, x_u, x_j, n_d) -> np.ndarray:
    """Received data-phase vector ``sqrt(p_d) h x_u + sqrt(q_d) g x_j + n_d``."""
    h, g, n_d = map(np.asarray, (h, g, n_d))
    for name, v in (("h", h), ("g", g), ("n_d", n_d)):
        _check_vec(name, v, params.M)
    x_u = np.asarray(x_u)[..., None]
    x_j = np.asarray(x_j)[..., None]
    return math.sqrt(params.p_d) * h * x_u + math.sqrt(params.q_d) * g * x_j + n_d
