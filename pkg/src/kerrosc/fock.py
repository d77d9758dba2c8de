"""Truncated Fock-space substrate: states, ladder operators, moments.

Everything downstream (driven-oscillator diagonalization, Kerr evolution,
phase-space diagnostics, the exact reference integrator) computes on the
dense complex vectors and matrices defined here.  Amplitudes of large-mean
coherent states are assembled in log space so truncations beyond n = 170
do not overflow the factorials.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm
from scipy.special import gammainc, gammaln

__all__ = [
    "FockState",
    "FockOperator",
    "TruncationError",
    "annihilation_operator",
    "creation_operator",
    "number_operator",
    "identity_operator",
    "position_operator",
    "momentum_operator",
    "displacement_operator",
    "coherent_state",
    "coherent_amplitudes",
    "number_state",
    "default_truncation",
    "poisson_tail",
    "apply",
    "expectation",
    "inner",
]


class TruncationError(ValueError):
    """Requested basis size cannot hold the state to the required tail mass."""


@dataclass(frozen=True)
class FockState:
    """Pure state as a complex amplitude vector over |0>, ..., |n_trunc - 1>.

    Parameters
    ----------
    amplitudes : ndarray
        Complex amplitudes; made read-only on construction.
    normalized : bool
        Marks states guaranteed to have unit norm within 1e-9.
    renormalized : bool
        Set when a post-truncation rescale was applied by the constructor.
    """

    amplitudes: np.ndarray
    normalized: bool = False
    renormalized: bool = False

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=np.complex128)
        if amps.ndim != 1 or amps.size < 1:
            raise ValueError("amplitudes must be a non-empty 1-D vector")
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @property
    def n_trunc(self) -> int:
        return self.amplitudes.size

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def occupations(self) -> np.ndarray:
        """|c_n|^2 for n = 0 .. n_trunc - 1."""
        return np.abs(self.amplitudes) ** 2

    def mean_occupation(self) -> float:
        p = self.occupations()
        return float(np.dot(np.arange(self.n_trunc), p))


@dataclass(frozen=True)
class FockOperator:
    """Dense operator matrix on the truncated number basis."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError("operator matrix must be square")
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def n_trunc(self) -> int:
        return self.matrix.shape[0]

    def dagger(self) -> "FockOperator":
        return FockOperator(self.matrix.conj().T)

    def __matmul__(self, other: "FockOperator") -> "FockOperator":
        if self.n_trunc != other.n_trunc:
            raise ValueError("operator dimensions differ: "
                             f"{self.n_trunc} vs {other.n_trunc}")
        return FockOperator(self.matrix @ other.matrix)

    def __add__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.matrix + other.matrix)

    def __sub__(self, other: "FockOperator") -> "FockOperator":
        return FockOperator(self.matrix - other.matrix)

    def __mul__(self, scalar) -> "FockOperator":
        return FockOperator(self.matrix * scalar)

    __rmul__ = __mul__


def annihilation_operator(n_trunc: int) -> FockOperator:
    """Ladder-down operator: <n|a|n+1> = sqrt(n+1)."""
    mat = np.zeros((n_trunc, n_trunc), dtype=np.complex128)
    n = np.arange(1, n_trunc)
    mat[n - 1, n] = np.sqrt(n)
    return FockOperator(mat)


def creation_operator(n_trunc: int) -> FockOperator:
    return annihilation_operator(n_trunc).dagger()


def number_operator(n_trunc: int) -> FockOperator:
    return FockOperator(np.diag(np.arange(n_trunc, dtype=np.complex128)))


def identity_operator(n_trunc: int) -> FockOperator:
    return FockOperator(np.eye(n_trunc, dtype=np.complex128))


def position_operator(n_trunc: int, omega: float = 1.0) -> FockOperator:
    """q = (a + a^dag) / sqrt(2 omega) for ladder operators built at `omega`."""
    a = annihilation_operator(n_trunc).matrix
    return FockOperator((a + a.conj().T) / math.sqrt(2.0 * omega))


def momentum_operator(n_trunc: int, omega: float = 1.0) -> FockOperator:
    """p = i sqrt(omega / 2) (a^dag - a)."""
    a = annihilation_operator(n_trunc).matrix
    return FockOperator(1j * math.sqrt(omega / 2.0) * (a.conj().T - a))


def displacement_operator(alpha: complex, n_trunc: int) -> FockOperator:
    """exp(alpha a^dag - conj(alpha) a) by dense scaling-and-squaring."""
    a = annihilation_operator(n_trunc).matrix
    return FockOperator(expm(alpha * a.conj().T - np.conj(alpha) * a))


def poisson_tail(mean: float, n_trunc: int) -> float:
    """Probability mass of Poisson(mean) at or above n_trunc."""
    if mean <= 0.0:
        return 0.0
    return float(gammainc(n_trunc, mean))


def default_truncation(alpha: complex) -> int:
    """Basis size covering a coherent amplitude: mean + 10 sigma + 10 levels."""
    mu = abs(alpha) ** 2
    return int(math.ceil(mu + 10.0 * math.sqrt(mu + 1.0) + 10.0))


def coherent_amplitudes(alpha: complex, n_trunc: int) -> np.ndarray:
    """Unnormalized coherent amplitudes e^{-|a|^2/2} a^n / sqrt(n!).

    Built from exp(log magnitude) times a unit phase so large |alpha| and
    large n stay finite.
    """
    n = np.arange(n_trunc)
    mu = abs(alpha) ** 2
    if mu == 0.0:
        amps = np.zeros(n_trunc, dtype=np.complex128)
        amps[0] = 1.0
        return amps
    log_mag = n * math.log(abs(alpha)) - 0.5 * gammaln(n + 1.0) - 0.5 * mu
    phase = n * np.angle(alpha)
    return np.exp(log_mag + 1j * phase)


def coherent_state(alpha: complex, n_trunc: int | None = None) -> FockState:
    """Coherent state |alpha> on a truncated basis.

    Parameters
    ----------
    alpha : complex
        Coherent amplitude.
    n_trunc : int, optional
        Basis size; defaults to `default_truncation(alpha)`.  Rejected if the
        Poisson tail mass beyond it exceeds 1e-12.

    Returns
    -------
    FockState
        Renormalized to unit norm after truncation.
    """
    if n_trunc is None:
        n_trunc = default_truncation(alpha)
    if n_trunc < 1:
        raise TruncationError("n_trunc must be at least 1")
    tail = poisson_tail(abs(alpha) ** 2, n_trunc)
    if tail >= 1e-12:
        raise TruncationError(
            f"n_trunc={n_trunc} leaves tail mass {tail:.3e} >= 1e-12 "
            f"for |alpha|^2={abs(alpha)**2:.6g}")
    amps = coherent_amplitudes(alpha, n_trunc)
    amps /= np.linalg.norm(amps)
    return FockState(amps, normalized=True, renormalized=True)


def number_state(n: int, n_trunc: int) -> FockState:
    if not 0 <= n < n_trunc:
        raise ValueError(f"level n={n} outside basis of size {n_trunc}")
    amps = np.zeros(n_trunc, dtype=np.complex128)
    amps[n] = 1.0
    return FockState(amps, normalized=True)


def apply(op: FockOperator, state: FockState) -> FockState:
    """Matrix-vector product Op|psi>; result carries no normalization claim."""
    if op.n_trunc != state.n_trunc:
        raise ValueError(f"dimension mismatch: operator {op.n_trunc}, "
                         f"state {state.n_trunc}")
    return FockState(op.matrix @ state.amplitudes)


def expectation(op: FockOperator, state: FockState) -> complex:
    """<psi|Op|psi> for a normalized state."""
    if op.n_trunc != state.n_trunc:
        raise ValueError(f"dimension mismatch: operator {op.n_trunc}, "
                         f"state {state.n_trunc}")
    return complex(np.vdot(state.amplitudes, op.matrix @ state.amplitudes))


def inner(bra: FockState, ket: FockState) -> complex:
    """<bra|ket> with the conjugation on the first argument."""
    if bra.n_trunc != ket.n_trunc:
        raise ValueError(f"dimension mismatch: {bra.n_trunc} vs {ket.n_trunc}")
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))
