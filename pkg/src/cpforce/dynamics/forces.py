"""Casimir-Polder force components between internal states and the total force.

For every pair ``(m, n)`` the force matrix element splits into electric and
magnetic parts, each with an off-resonant (imaginary-frequency integral) and
a resonant (Green tensor at the complex frequency ``Omega_mnk``) piece:

    Omega_mnk = w~_nk + i (Gamma_m + Gamma_k) / 2.

The measured force is ``F(t) = sum_mn sigma_nm(t) F_mn``.
Magnetic pieces carry the prefactor ``w~_mn`` and vanish for ``m == n``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..atom import AtomModel
from ..green import (HalfSpace, curl_from_component, gradient_from_components,
                     green_components)
from ..quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_semi_infinite
from .dressing import DressingError, LevelDressing

__all__ = [
    "ForceComponents",
    "ForceBreakdown",
    "force_components",
    "force_breakdown",
    "total_force",
]

_LEVI = np.zeros((3, 3, 3))
for _a, _b, _c in ((0, 1, 2), (1, 2, 0), (2, 0, 1)):
    _LEVI[_a, _b, _c] = 1.0
    _LEVI[_a, _c, _b] = -1.0

# grad[a, i, j] as a linear map of the three independent bracket integrals.
_GRAD_BASIS = np.stack([gradient_from_components(*e).real for e in np.eye(3)])
_CURL_BASIS = curl_from_component(1.0).real


@dataclass(frozen=True)
class ForceComponents:
    """The four force pieces of the matrix element ``F_mn`` (complex 3-vectors)."""

    m: int
    n: int
    el_or: np.ndarray
    el_r: np.ndarray
    mag_or: np.ndarray
    mag_r: np.ndarray

    @property
    def total(self) -> np.ndarray:
        return self.el_or + self.el_r + self.mag_or + self.mag_r


@dataclass(frozen=True, eq=False)
class ForceBreakdown:
    """Force matrix elements for every pair, indexed ``[m, n, axis]``."""

    el_or: np.ndarray
    el_r: np.ndarray
    mag_or: np.ndarray
    mag_r: np.ndarray
    omegas: np.ndarray

    @property
    def total_matrix(self) -> np.ndarray:
        return self.el_or + self.el_r + self.mag_or + self.mag_r

    def weighted(self, sigma) -> dict:
        """``sum_mn sigma[n, m] F_mn`` for each piece and the total (complex)."""
        sigma = np.asarray(sigma)
        out = {}
        for name in ("el_or", "el_r", "mag_or", "mag_r"):
            out[name] = np.einsum("nm,mna->a", sigma, getattr(self, name))
        out["total"] = out["el_or"] + out["el_r"] + out["mag_or"] + out["mag_r"]
        return out

    def component(self, m: int, n: int) -> ForceComponents:
        return ForceComponents(m, n, self.el_or[m, n], self.el_r[m, n],
                               self.mag_or[m, n], self.mag_r[m, n])


def _omega(dressing, m, n, k):
    return dressing.omega_tilde[n, k] + 0.5j * (dressing.widths[m] + dressing.widths[k])


def _alpha_vec(atom, dressing, m, n, omega):
    """Generalized polarizability for an array of frequencies; shape (len, 3, 3)."""
    omega = np.asarray(omega, complex)
    wt, gam, d = dressing.omega_tilde, dressing.widths, atom.dipoles
    out = np.zeros((omega.size, 3, 3), complex)
    for k in range(atom.n_levels):
        a, b = d[m, k], d[k, n]
        if not (np.any(a) and np.any(b)):
            continue
        den1 = wt[k, n] - omega - 0.5j * (gam[k] + gam[m])
        den2 = wt[k, m] + omega + 0.5j * (gam[k] + gam[n])
        out += np.outer(a, b)[None] / den1[:, None, None]
        out += np.outer(b, a)[None] / den2[:, None, None]
    return out


def _u_scale(atom, geom):
    w = np.abs(atom.transition_frequencies)
    return float(min(w[w > 0].min(), 0.5 / geom.z))


def _imag_axis(geom, u, family, spec):
    return np.array([green_components(geom, 1j * ui, family, spec)[0].real for ui in u])


def _electric_off_resonant(atom, dressing, geom, spec, m, n):
    def integrand(u):
        grad = np.tensordot(_imag_axis(geom, u, "gradient", spec), _GRAD_BASIS, axes=1)
        alpha = _alpha_vec(atom, dressing, m, n, 1j * u) + _alpha_vec(atom, dressing, m, n, -1j * u)
        return -(u**2)[:, None] * np.einsum("uij,uaij->ua", alpha, grad) / (2.0 * np.pi)

    val, _ = integrate_semi_infinite(integrand, spec, scale=_u_scale(atom, geom), joint=True)
    return np.asarray(val, complex)


def _magnetic_off_resonant(atom, dressing, geom, spec, m, n):
    wmn = dressing.omega_tilde[m, n]

    def integrand(u):
        c = _imag_axis(geom, u, "curl", spec)[:, 0]
        curl = c[:, None, None] * _CURL_BASIS[None]
        p = (wmn / (1j * u))[:, None, None] * (
            _alpha_vec(atom, dressing, m, n, 1j * u) - _alpha_vec(atom, dressing, m, n, -1j * u))
        return (u**2)[:, None] * np.einsum("abc,ubj,ucj->ua", _LEVI, p, curl) / (2.0 * np.pi)

    val, _ = integrate_semi_infinite(integrand, spec, scale=_u_scale(atom, geom), joint=True)
    return np.asarray(val, complex)


def _electric_resonant_half(atom, dressing, geom, spec, m, n):
    d = atom.dipoles
    out = np.zeros(3, complex)
    for k in range(atom.n_levels):
        if dressing.omega_tilde[n, k] <= 0 or not (np.any(d[m, k]) and np.any(d[k, n])):
            continue
        om = _omega(dressing, m, n, k)
        vals, _ = green_components(geom, om, "gradient", spec)
        grad = gradient_from_components(*vals)
        out += om**2 * np.einsum("i,aij,j->a", d[m, k], grad, d[k, n])
    return out


def _magnetic_resonant_half(atom, dressing, geom, spec, m, n):
    d = atom.dipoles
    wmn = dressing.omega_tilde[m, n]
    out = np.zeros(3, complex)
    for k in range(atom.n_levels):
        if dressing.omega_tilde[n, k] <= 0 or not (np.any(d[m, k]) and np.any(d[k, n])):
            continue
        om = _omega(dressing, m, n, k)
        (c,), _ = green_components(geom, om, "curl", spec)
        out += wmn * om * np.cross(d[m, k], curl_from_component(c) @ d[k, n])
    return out


def _check(atom, dressing):
    if not dressing.converged:
        raise DressingError("force evaluation needs a converged dressing")
    if dressing.omega_tilde.shape != (atom.n_levels, atom.n_levels):
        raise ValueError("dressing does not match the atom")


def force_components(atom: AtomModel, dressing: LevelDressing, geom: HalfSpace,
                     spec: QuadratureSpec = DEFAULT_SPEC, m: int = 0, n: int = 0) -> ForceComponents:
    """All four pieces of ``F_mn``.

    The off-resonant electric piece uses the sum ``alpha_mn(iu) + alpha_mn(-iu)``
    contracted with the first-argument gradient; resonant pieces add the
    Hermitian-conjugate partner ``conj(Y_nm)``. Magnetic pieces are only
    evaluated for ``m != n``.
    """
    _check(atom, dressing)
    zero = np.zeros(3, complex)
    if geom.material.is_vacuum:
        return ForceComponents(m, n, zero, zero, zero, zero)
    el_or = _electric_off_resonant(atom, dressing, geom, spec, m, n)
    el_r = (_electric_resonant_half(atom, dressing, geom, spec, m, n)
            + np.conj(_electric_resonant_half(atom, dressing, geom, spec, n, m)))
    if m == n:
        mag_or = mag_r = zero
    else:
        mag_or = _magnetic_off_resonant(atom, dressing, geom, spec, m, n)
        mag_r = (_magnetic_resonant_half(atom, dressing, geom, spec, m, n)
                 + np.conj(_magnetic_resonant_half(atom, dressing, geom, spec, n, m)))
    return ForceComponents(m, n, el_or, el_r, mag_or, mag_r)


def force_breakdown(atom: AtomModel, dressing: LevelDressing, geom: HalfSpace,
                    spec: QuadratureSpec = DEFAULT_SPEC, pairs=None) -> ForceBreakdown:
    """Force matrix elements for ``pairs`` (default: every pair)."""
    _check(atom, dressing)
    n_lev = atom.n_levels
    if pairs is None:
        pairs = [(m, n) for m in range(n_lev) for n in range(n_lev)]
    arrays = {k: np.zeros((n_lev, n_lev, 3), complex) for k in ("el_or", "el_r", "mag_or", "mag_r")}
    for m, n in pairs:
        fc = force_components(atom, dressing, geom, spec, m, n)
        for k in arrays:
            arrays[k][m, n] = getattr(fc, k)
    omegas = np.array([[[_omega(dressing, m, n, k) for k in range(n_lev)]
                        for n in range(n_lev)] for m in range(n_lev)])
    return ForceBreakdown(omegas=omegas, **arrays)


def total_force(atom: AtomModel, dressing: LevelDressing, geom: HalfSpace,
                spec: QuadratureSpec = DEFAULT_SPEC, sigma_t=None, breakdown=None) -> np.ndarray:
    """Real force 3-vectors ``sum_mn sigma_nm(t) F_mn`` for a stack of density matrices.

    ``sigma_t`` has shape ``(T, N, N)`` (or ``(N, N)``). The matrix elements
    are computed once and reused; pass ``breakdown`` to skip that step.
    """
    if breakdown is None:
        breakdown = force_breakdown(atom, dressing, geom, spec)
    sig = np.asarray(sigma_t)
    single = sig.ndim == 2
    sig = sig[None] if single else sig
    out = np.einsum("tnm,mna->ta", sig, breakdown.total_matrix)
    out = out.real
    return out[0] if single else out
