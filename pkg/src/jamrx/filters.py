"""Receive combining vectors: MRC, MMSE-type and ZF-type.

Every function works on a single M-vector or on a stack of them along the
leading axes (the last axis is the antenna axis).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .model import InvalidParameterError


class FilterKind(str, enum.Enum):
    MRC = "mrc"
    MMSE_TYPE = "mmse"
    ZF_TYPE = "zf"

    @classmethod
    def parse(cls, value) -> "FilterKind":
        if isinstance(value, cls):
            return value
        v = str(value).strip().lower().replace("-type", "").replace("_type", "")
        try:
            return cls(v)
        except ValueError:
            raise ValueError(f"unknown filter kind {value!r}; expected one of mrc, mmse, zf") from None


@dataclass
class ReceiveFilter:
    a: np.ndarray
    kind: FilterKind


def _inner(x, y):
    """``x^H y`` along the last axis."""
    return np.sum(x.conj() * y, axis=-1)


def mrc(h_hat) -> ReceiveFilter:
    return ReceiveFilter(np.asarray(h_hat), FilterKind.MRC)


def mmse_type(h_hat, g_hat, sigma: float, q_d: float) -> ReceiveFilter:
    """``(g_hat g_hat^H + (sigma/q_d) I)^{-1} h_hat`` via the rank-one inversion identity.

    With ``q_d = 0`` the regularizer dominates and the filter reduces to
    ``h_hat / sigma``.
    """
    if not sigma > 0:
        raise InvalidParameterError(f"sigma must be positive, got {sigma!r}")
    if q_d < 0:
        raise InvalidParameterError(f"q_d must be nonnegative, got {q_d!r}")
    h_hat = np.asarray(h_hat)
    g_hat = np.asarray(g_hat)
    if q_d == 0:
        return ReceiveFilter(h_hat / sigma, FilterKind.MMSE_TYPE)
    reg = sigma / q_d
    proj = _inner(g_hat, h_hat) / (reg + np.sum(np.abs(g_hat) ** 2, axis=-1))
    a = (h_hat - g_hat * np.asarray(proj)[..., None]) / reg
    return ReceiveFilter(a, FilterKind.MMSE_TYPE)


def mmse_type_dense(h_hat, g_hat, sigma: float, q_d: float) -> np.ndarray:
    """Reference MMSE-type filter from a dense linear solve (single vector only)."""
    h_hat = np.asarray(h_hat)
    g_hat = np.asarray(g_hat)
    A = np.outer(g_hat, g_hat.conj()) + (sigma / q_d) * np.eye(h_hat.shape[0])
    return np.linalg.solve(A, h_hat)


def zf_type(h_hat, g_hat) -> ReceiveFilter:
    """Project ``h_hat`` onto the orthogonal complement of ``g_hat``.

    A zero ``g_hat`` leaves ``h_hat`` unchanged.
    """
    h_hat = np.asarray(h_hat)
    g_hat = np.asarray(g_hat)
    gg = np.sum(np.abs(g_hat) ** 2, axis=-1)
    safe = np.where(gg > 0, gg, 1.0)
    coef = np.where(gg > 0, _inner(g_hat, h_hat) / safe, 0.0)
    return ReceiveFilter(h_hat - g_hat * np.asarray(coef)[..., None], FilterKind.ZF_TYPE)


def build_filter(kind, h_hat, g_hat, sigma: float, q_d: float) -> ReceiveFilter:
    kind = FilterKind.parse(kind)
    if kind is FilterKind.MRC:
        return mrc(h_hat)
    if kind is FilterKind.MMSE_TYPE:
        return mmse_type(h_hat, g_hat, sigma, q_d)
    return zf_type(h_hat, g_hat)
