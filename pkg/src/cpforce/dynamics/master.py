"""Internal atomic dynamics: decaying coherences and population balance equations."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm

from .dressing import LevelDressing

__all__ = [
    "DensityMatrixState",
    "rate_matrix",
    "evolve_coherences",
    "evolve_populations",
    "evolve",
    "density_matrix_series",
]


@dataclass(frozen=True, eq=False)
class DensityMatrixState:
    """Atomic density matrix ``sigma[n, m]`` at time ``t``."""

    sigma: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        s = np.array(self.sigma, dtype=complex)
        if s.ndim != 2 or s.shape[0] != s.shape[1]:
            raise ValueError("sigma must be a square matrix")
        s.setflags(write=False)
        object.__setattr__(self, "sigma", s)

    @property
    def populations(self) -> np.ndarray:
        return self.sigma.diagonal().real.copy()

    def validate(self, atol=1e-12):
        """Raise ``ValueError`` unless sigma is Hermitian, trace one, and has populations in [0, 1]."""
        s = self.sigma
        if not np.allclose(s, s.conj().T, atol=atol, rtol=0):
            raise ValueError("density matrix must be Hermitian")
        if abs(np.trace(s) - 1.0) > atol:
            raise ValueError("density matrix must have unit trace")
        p = s.diagonal().real
        if np.any(p < -atol) or np.any(p > 1 + atol):
            raise ValueError("populations must lie in [0, 1]")
        return self


def _as_state(sigma0) -> DensityMatrixState:
    if isinstance(sigma0, DensityMatrixState):
        return sigma0
    return DensityMatrixState(sigma0)


def rate_matrix(dressing: LevelDressing) -> np.ndarray:
    """``R`` with ``d p / dt = R p``; ``R[m, n] = Gamma_n^m`` off the diagonal, ``-Gamma_m`` on it."""
    pw = dressing.partial_widths
    rates = pw.T.copy()
    np.fill_diagonal(rates, 0.0)
    rates -= np.diag(rates.sum(axis=0))
    return rates


def evolve_coherences(dressing: LevelDressing, sigma0, t: float) -> DensityMatrixState:
    """Off-diagonal part ``sigma_nm(t) = exp{(i w~_mn - (Gamma_m + Gamma_n)/2) t} sigma_nm``."""
    s0 = _as_state(sigma0).sigma
    wt = dressing.omega_tilde
    g = dressing.widths
    # Entry [n, m] picks up the phase of w~_mn = wt[m, n].
    expo = 1j * wt.T - 0.5 * (g[:, None] + g[None, :])
    out = np.exp(expo * t) * s0
    np.fill_diagonal(out, 0.0)
    return DensityMatrixState(out, t)


def evolve_populations(dressing: LevelDressing, sigma0, t: float) -> DensityMatrixState:
    """Diagonal part from the matrix exponential of the rate matrix."""
    p0 = _as_state(sigma0).sigma.diagonal().real
    p = expm(rate_matrix(dressing) * t) @ p0
    return DensityMatrixState(np.diag(p).astype(complex), t)


def evolve(dressing: LevelDressing, sigma0, t: float) -> DensityMatrixState:
    """Full density matrix at time ``t``."""
    c = evolve_coherences(dressing, sigma0, t).sigma
    p = evolve_populations(dressing, sigma0, t).sigma
    return DensityMatrixState(c + p, t)


def density_matrix_series(dressing: LevelDressing, sigma0, times) -> np.ndarray:
    """Stack ``evolve`` over ``times``; shape ``(len(times), N, N)``."""
    state = _as_state(sigma0).validate()
    return np.array([evolve(dressing, state, float(t)).sigma for t in np.atleast_1d(times)])
