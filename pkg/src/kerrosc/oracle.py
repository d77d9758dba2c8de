"""Ground-truth Schrodinger integration on the truncated Fock space.

`integrate_exact` propagates the full Kerr-oscillator Hamiltonian, including
the exact number-squared term and the drive, in the interaction picture of
the diagonal part (the diagonal phases grow like n^2 and would otherwise
make the raw system artificially stiff at large truncation).
`integrate_schrodinger` is the generic dense-matrix variant used to validate
the time-reparametrization theorem.  Both share the adaptive stepper of the
approximate branches so tolerances are comparable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evolution import ModelParams
from .fock import FockState
from .integrators import integrate_adaptive

__all__ = [
    "OracleError",
    "OracleRun",
    "integrate_exact",
    "integrate_schrodinger",
    "fidelity",
]

_NORM_DRIFT_LIMIT = 1e-8
_BOUNDARY_POPULATION = 1e-10
_SUPPORT_MARGIN = 10


class OracleError(RuntimeError):
    """The reference run left its validity envelope (norm drift, truncation)."""


@dataclass(frozen=True)
class OracleRun:
    """Sampled exact evolution with its norm-drift record."""

    params: ModelParams
    n_trunc: int
    times: np.ndarray
    states: np.ndarray  # shape (len(times), n_trunc), Schrodinger picture
    norm_drift: np.ndarray

    def __post_init__(self):
        for name in ("times", "states", "norm_drift"):
            arr = np.asarray(getattr(self, name))
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

    def state_at(self, index: int) -> FockState:
        """Sampled state as a unit-norm FockState; raw norms live in
        `norm_drift`."""
        amps = self.states[index]
        return FockState(amps / np.linalg.norm(amps), normalized=True,
                         renormalized=True)


def _diagonal_energies(params: ModelParams, n_trunc: int) -> np.ndarray:
    n = np.arange(n_trunc)
    return params.omega0 * (n + 0.5) + params.chi * n.astype(float) ** 2


def integrate_exact(params: ModelParams, psi0: FockState, t_end: float,
                    tol: float = 1e-10,
                    sample_times: np.ndarray | None = None) -> OracleRun:
    """Direct time-ordered evolution of the full Kerr-oscillator Hamiltonian.

    Parameters
    ----------
    params : ModelParams
    psi0 : FockState
        Normalized initial state whose top `_SUPPORT_MARGIN` levels must be
        essentially empty.
    t_end : float
        Final time.
    tol : float
        Local error budget per unit step.
    sample_times : ndarray, optional
        Output grid; defaults to 1001 equidistant samples.

    Raises
    ------
    OracleError
        If the norm drifts beyond 1e-8 or the support reaches the truncation
        boundary (top-level population above 1e-10).
    """
    if abs(psi0.norm() - 1.0) > 1e-9:
        raise ValueError("initial state must be normalized")
    n_trunc = psi0.n_trunc
    margin_pop = float(np.sum(psi0.occupations()[n_trunc - _SUPPORT_MARGIN:]))
    if n_trunc <= _SUPPORT_MARGIN or margin_pop > _BOUNDARY_POPULATION:
        raise OracleError(
            f"initial support too close to the truncation boundary "
            f"(top-{_SUPPORT_MARGIN} population {margin_pop:.3e})")
    if sample_times is None:
        sample_times = np.linspace(0.0, t_end, 1001)

    energies = _diagonal_energies(params, n_trunc)
    ladder = np.sqrt(np.arange(1, n_trunc))
    scale = 1.0 / math.sqrt(2.0 * params.omega0)
    # Interaction picture: phi = exp(+i H0 t) psi; only the drive term remains.
    # H0-rotated ladder phases: exp(-i t (Omega0 + chi (2n + 1))) on <n|a|n+1>.
    phase_rate = energies[1:] - energies[:-1]

    def rhs(t, phi):
        e_t = params.drive(t)
        if e_t == 0.0:
            return np.zeros_like(phi)
        rotated = np.exp(-1j * phase_rate * t) * ladder * phi[1:]
        out = np.empty_like(phi)
        out[:-1] = rotated
        out[-1] = 0.0
        out[1:] += np.conj(np.exp(-1j * phase_rate * t) * ladder) * phi[:-1]
        return -1j * e_t * scale * out

    _, phis = integrate_adaptive(rhs, psi0.amplitudes, 0.0, float(t_end),
                                 tol, sample_times=np.asarray(sample_times))
    phases = np.exp(-1j * energies[None, :] * np.asarray(sample_times)[:, None])
    states = phases * phis
    norms = np.linalg.norm(states, axis=1)
    drift = np.abs(norms - 1.0)
    if drift.max() > _NORM_DRIFT_LIMIT:
        raise OracleError(f"norm drift {drift.max():.3e} exceeds "
                          f"{_NORM_DRIFT_LIMIT:g}; run invalid")
    top_pop = np.abs(states[:, -1]) ** 2
    if top_pop.max() > _BOUNDARY_POPULATION:
        raise OracleError(
            f"support reached the truncation boundary "
            f"(top-level population {top_pop.max():.3e})")
    return OracleRun(params=params, n_trunc=n_trunc,
                     times=np.asarray(sample_times, dtype=float),
                     states=states, norm_drift=drift)


def integrate_schrodinger(hamiltonian, psi0: FockState, t_end: float,
                          tol: float = 1e-9,
                          sample_times: np.ndarray | None = None) -> np.ndarray:
    """Generic dense-matrix Schrodinger integration i d psi/dt = H(t) psi.

    Parameters
    ----------
    hamiltonian : callable
        t -> complex ndarray (n, n).
    psi0 : FockState
    t_end : float
    tol : float
    sample_times : ndarray, optional
        Defaults to just the endpoint.

    Returns
    -------
    ndarray
        States at the sample times, shape (len(sample_times), n).
    """
    if sample_times is None:
        sample_times = np.array([t_end])

    def rhs(t, psi):
        return -1j * (hamiltonian(t) @ psi)

    _, states = integrate_adaptive(rhs, psi0.amplitudes, 0.0, float(t_end),
                                   tol, sample_times=np.asarray(sample_times))
    return states


def fidelity(psi: FockState, phi: FockState) -> float:
    """|<psi|phi>|^2 for states on the same truncated basis."""
    if psi.n_trunc != phi.n_trunc:
        raise ValueError(f"dimension mismatch: {psi.n_trunc} vs {phi.n_trunc}")
    return float(abs(np.vdot(psi.amplitudes, phi.amplitudes)) ** 2)
