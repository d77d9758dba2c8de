"""Kerr states: coherent states rotated by the number-squared phase.

|beta, xi> = exp(-i xi n^2)|beta> keeps the Poissonian excitation statistics
of its coherent parent while acquiring non-Gaussian phase-space structure.
The family is the coherent-state family of a deformed annihilation operator
B = a f(n) with f(n) = exp(i xi (2n - 1)); the module provides the state
amplitudes, the deformed ladder matrices, the excitation distribution, the
Mandel Q parameter, and the closed-form normalized quadrature variances.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm
from scipy.special import gammaln

from .fock import (
    FockOperator,
    FockState,
    TruncationError,
    coherent_amplitudes,
    default_truncation,
    poisson_tail,
)

__all__ = [
    "KerrStateParams",
    "MandelResult",
    "kerr_state",
    "deformed_ladder",
    "modified_displacement",
    "excitation_distribution",
    "quadrature_variance_ratios",
    "mandel_q",
    "mandel_q_state",
]


@dataclass(frozen=True)
class KerrStateParams:
    """Amplitude beta and dimensionless Kerr phase xi = chi * t."""

    beta: complex
    xi: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "xi", float(self.xi))


def kerr_state(params: KerrStateParams, n_trunc: int | None = None) -> FockState:
    """Amplitudes e^{-|b|^2/2} b^n e^{-i xi n^2} / sqrt(n!) on the truncated basis.

    Raises
    ------
    TruncationError
        If the Poisson tail beyond n_trunc exceeds 1e-12.
    """
    if n_trunc is None:
        n_trunc = default_truncation(params.beta)
    tail = poisson_tail(abs(params.beta) ** 2, n_trunc)
    if tail >= 1e-12:
        raise TruncationError(
            f"n_trunc={n_trunc} leaves tail mass {tail:.3e} >= 1e-12 "
            f"for |beta|^2={abs(params.beta)**2:.6g}")
    n = np.arange(n_trunc)
    amps = coherent_amplitudes(params.beta, n_trunc) \
        * np.exp(-1j * params.xi * n ** 2)
    amps /= np.linalg.norm(amps)
    return FockState(amps, normalized=True, renormalized=True)


def deformed_ladder(xi: float, n_trunc: int) -> FockOperator:
    """Deformed annihilation operator B with <n|B|n+1> = sqrt(n+1) f(n+1).

    f(n) = exp(i xi (2n - 1)); at xi = 0 this is the plain ladder operator.
    """
    mat = np.zeros((n_trunc, n_trunc), dtype=np.complex128)
    n = np.arange(1, n_trunc)
    mat[n - 1, n] = np.sqrt(n) * np.exp(1j * xi * (2.0 * n - 1.0))
    return FockOperator(mat)


def modified_displacement(params: KerrStateParams, n_trunc: int) -> FockOperator:
    """exp(beta B^dag - conj(beta) B); applied to vacuum it builds the state."""
    b = deformed_ladder(params.xi, n_trunc).matrix
    return FockOperator(expm(params.beta * b.conj().T
                             - np.conj(params.beta) * b))


def excitation_distribution(params: KerrStateParams,
                            n_trunc: int | None = None) -> np.ndarray:
    """Poisson probabilities P(n) = e^{-|b|^2} |b|^{2n} / n!; xi drops out."""
    if n_trunc is None:
        n_trunc = default_truncation(params.beta)
    mu = abs(params.beta) ** 2
    n = np.arange(n_trunc)
    if mu == 0.0:
        p = np.zeros(n_trunc)
        p[0] = 1.0
        return p
    return np.exp(n * math.log(mu) - gammaln(n + 1.0) - mu)


def quadrature_variance_ratios(params: KerrStateParams) -> tuple[float, float]:
    """Normalized quadrature widths (dq_xi/dq_0, dp_xi/dp_0).

    Closed forms in |beta|, phi = arg beta and xi; both ratios equal one at
    xi = 0 where the state is coherent and minimum-uncertainty.
    """
    b2 = abs(params.beta) ** 2
    phi = np.angle(params.beta)
    xi = params.xi
    pair_term = 2.0 * b2 * math.exp(-2.0 * b2 * math.sin(2.0 * xi) ** 2) \
        * math.cos(2.0 * phi - 4.0 * xi - b2 * math.sin(4.0 * xi))
    mean_angle = phi - xi - b2 * math.sin(2.0 * xi)
    mean_sq = 4.0 * b2 * math.exp(-4.0 * b2 * math.sin(xi) ** 2)
    rq2 = 2.0 * b2 + 1.0 + pair_term - mean_sq * math.cos(mean_angle) ** 2
    rp2 = 2.0 * b2 + 1.0 - pair_term - mean_sq * math.sin(mean_angle) ** 2
    return math.sqrt(max(rq2, 0.0)), math.sqrt(max(rp2, 0.0))


class MandelResult(NamedTuple):
    q: float
    g2_zero: float


def mandel_q_state(state: FockState) -> MandelResult:
    """Mandel Q and g2(0) from the number moments of any Fock-space state."""
    p = state.occupations()
    n = np.arange(state.n_trunc)
    mean = float(np.dot(n, p))
    if mean <= 0.0:
        raise ValueError("vacuum state: Mandel Q undefined")
    mean_sq = float(np.dot(n ** 2, p))
    var = mean_sq - mean ** 2
    q = var / mean - 1.0
    return MandelResult(q=q, g2_zero=q / mean + 1.0)


def mandel_q(params: KerrStateParams,
             n_trunc: int | None = None) -> MandelResult:
    """Mandel Q of a Kerr state; zero, since the statistics stay Poissonian.

    Raises
    ------
    ValueError
        For beta = 0, where Q is undefined.
    """
    if params.beta == 0.0:
        raise ValueError("vacuum state: Mandel Q undefined")
    return mandel_q_state(kerr_state(params, n_trunc))
