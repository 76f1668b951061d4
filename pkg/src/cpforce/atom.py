"""Atomic level structure, dipole matrix elements and polarizabilities."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .materials import PoleError

__all__ = [
    "AtomModel",
    "two_level_atom",
    "dipole_from_gamma0",
    "polarizability_lowest_order",
    "polarizability_generalized",
]

# Minimal level spacing (units of omega_ref) accepted as non-degenerate.
MIN_SPLITTING = 1e-6


def dipole_from_gamma0(gamma0: float) -> float:
    """Dipole magnitude for the decay parameter ``omega_ref**2 d**2 / (3 pi)``.

    The free-space rate of a transition at frequency ``w`` is then
    ``gamma0 * w**3`` (in units of ``omega_ref``).
    """
    if gamma0 < 0:
        raise ValueError("gamma0 must be non-negative")
    return float(np.sqrt(3.0 * np.pi * gamma0))


@dataclass(frozen=True, eq=False)
class AtomModel:
    """Non-degenerate atom with transition dipoles only.

    Parameters
    ----------
    energies : array_like, shape (N,)
        Level frequencies ``E_n / hbar``, strictly increasing.
    dipoles : array_like, shape (N, N, 3)
        ``dipoles[m, n] = d_mn``; must satisfy ``d_nm = conj(d_mn)`` and
        ``d_mm = 0``.
    """

    energies: np.ndarray
    dipoles: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.energies, dtype=float)
        d = np.asarray(self.dipoles, dtype=complex)
        n = e.size
        if d.shape != (n, n, 3):
            raise ValueError(f"dipoles must have shape ({n}, {n}, 3)")
        if n < 2:
            raise ValueError("need at least two levels")
        if np.any(np.diff(e) < MIN_SPLITTING):
            raise ValueError("energies must be strictly increasing and non-degenerate")
        if not np.allclose(d, np.conj(np.swapaxes(d, 0, 1)), rtol=0, atol=1e-14 * max(1.0, np.abs(d).max())):
            raise ValueError("dipole matrix must be Hermitian (d_nm = conj(d_mn))")
        if np.any(np.abs(d[np.arange(n), np.arange(n)]) > 0):
            raise ValueError("permanent dipole moments (d_mm != 0) are not supported")
        e.setflags(write=False)
        d.setflags(write=False)
        object.__setattr__(self, "energies", e)
        object.__setattr__(self, "dipoles", d)

    @property
    def n_levels(self) -> int:
        return self.energies.size

    @property
    def transition_frequencies(self) -> np.ndarray:
        """``omega[m, n] = (E_m - E_n) / hbar``."""
        return self.energies[:, None] - self.energies[None, :]

    def scaled(self, factor: float) -> "AtomModel":
        """Copy with every dipole multiplied by ``factor``."""
        return AtomModel(self.energies, self.dipoles * factor)

    def __eq__(self, other):
        return (isinstance(other, AtomModel)
                and np.array_equal(self.energies, other.energies)
                and np.array_equal(self.dipoles, other.dipoles))

    def __hash__(self):
        return hash((self.energies.tobytes(), self.dipoles.tobytes()))


def two_level_atom(omega10: float, gamma0: float, theta: float = 0.0, phi: float = 0.0) -> AtomModel:
    """Two-level atom with real transition dipole at polar angle ``theta``.

    ``gamma0`` is the dimensionless decay parameter ``omega_ref**2 d**2/(3 pi)``
    (with ``omega_ref = 1``); ``theta`` is measured from the surface normal.
    """
    d = dipole_from_gamma0(gamma0)
    vec = d * np.array([np.cos(phi) * np.sin(theta), np.sin(phi) * np.sin(theta), np.cos(theta)])
    dip = np.zeros((2, 2, 3), complex)
    dip[1, 0] = vec
    dip[0, 1] = vec
    return AtomModel(np.array([0.0, float(omega10)]), dip)


def polarizability_lowest_order(atom: AtomModel, l: int, omega, isotropic: bool = False) -> np.ndarray:
    """Lowest-order polarizability of level ``l`` (3x3 complex).

    ``(1/hbar) sum_k [d_lk (x) d_kl / (w_kl - omega) + d_kl (x) d_lk / (w_kl + omega)]``,
    which for real dipoles is ``(2/hbar) sum_k w_kl d_lk (x) d_kl / (w_kl**2 - omega**2)``.
    With ``isotropic`` the orientation average ``(|d_lk|**2/3) I`` replaces the dyad.
    """
    omega = complex(omega)
    wkl = atom.energies - atom.energies[l]
    alpha = np.zeros((3, 3), complex)
    for k in range(atom.n_levels):
        if k == l:
            continue
        den = wkl[k] ** 2 - omega**2
        if abs(den) < 1e-300:
            raise PoleError(f"frequency on the resonance of transition {l}->{k}")
        dlk, dkl = atom.dipoles[l, k], atom.dipoles[k, l]
        if isotropic:
            alpha += 2.0 * wkl[k] / den * np.vdot(dlk, dlk).real / 3.0 * np.eye(3)
        else:
            alpha += np.outer(dlk, dkl) / (wkl[k] - omega) + np.outer(dkl, dlk) / (wkl[k] + omega)
    return alpha


def polarizability_generalized(atom: AtomModel, dressing, m: int, n: int, omega) -> np.ndarray:
    """Body-dressed polarizability ``alpha_mn(r_A, omega)``.

    Both terms carry the damping ``(Gamma_k + Gamma_m)/2`` resp.
    ``(Gamma_k + Gamma_n)/2``; for ``m == n`` this is the usual causal
    polarizability of level ``m`` with shifted, broadened lines.
    """
    omega = complex(omega)
    wt = dressing.omega_tilde
    gam = dressing.widths
    alpha = np.zeros((3, 3), complex)
    d = atom.dipoles
    for k in range(atom.n_levels):
        a = d[m, k]
        b = d[k, n]
        if not (np.any(a) and np.any(b)):
            continue
        alpha += np.outer(a, b) / (wt[k, n] - omega - 0.5j * (gam[k] + gam[m]))
        alpha += np.outer(b, a) / (wt[k, m] + omega + 0.5j * (gam[k] + gam[n]))
    return alpha
