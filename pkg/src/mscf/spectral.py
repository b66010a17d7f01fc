"""Unitary 2-D DFT and spectral-domain circular correlation.

Transforms act on the two leading (row, col) axes; any trailing axis is a
channel axis.  ``dft2`` uses the orthonormal scaling so that Parseval holds
without extra factors.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .core import InvalidArgument, ResponseMap

logger = logging.getLogger(__name__)

_AXES = (0, 1)


@dataclass(frozen=True)
class TransformPlan:
    rows: int
    cols: int

    def _check(self, a: np.ndarray) -> None:
        if a.shape[:2] != (self.rows, self.cols):
            raise InvalidArgument(
                f"plan is {self.rows}x{self.cols}, got grid {a.shape[0]}x{a.shape[1]}"
            )

    def forward(self, t: np.ndarray) -> np.ndarray:
        self._check(t)
        return dft2(t)

    def inverse(self, s: np.ndarray) -> np.ndarray:
        self._check(s)
        return idft2(s)


def dft2(t: np.ndarray) -> np.ndarray:
    t = np.asarray(t)
    if not np.all(np.isfinite(t)):
        raise InvalidArgument("dft2 input contains non-finite values")
    return np.fft.fft2(t, axes=_AXES, norm="ortho")


def idft2(s: np.ndarray) -> np.ndarray:
    """Inverse of :func:`dft2`, returning the real part."""
    full = np.fft.ifft2(s, axes=_AXES, norm="ortho")
    residue = np.linalg.norm(full.imag)
    if residue > 1e-6 * max(np.linalg.norm(s), 1e-300):
        logger.warning("idft2 discarded imaginary residue %.3g", residue)
    return full.real


def correlate(z_hat: np.ndarray, g_hat: np.ndarray) -> ResponseMap:
    """Channel-summed circular correlation of a sample with a filter.

    Both arguments are :func:`dft2` spectra.  The result is
    ``R[tau] = sum_d sum_t g_d[t] * z_d[t + tau]``, so a sample that is the
    filter's pattern moved by ``s`` peaks at ``tau = s``.
    """
    z_hat = np.asarray(z_hat)
    g_hat = np.asarray(g_hat)
    if z_hat.shape != g_hat.shape:
        raise InvalidArgument(f"shape mismatch: {z_hat.shape} vs {g_hat.shape}")
    rows, cols = z_hat.shape[:2]
    prod = z_hat * np.conj(g_hat)
    if prod.ndim == 3:
        prod = prod.sum(axis=2)
    # unitary scaling: corr_hat = sqrt(T) * z_hat * conj(g_hat)
    values = np.fft.ifft2(prod, norm="ortho").real * np.sqrt(rows * cols)
    return ResponseMap.from_values(values)
