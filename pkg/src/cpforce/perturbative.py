"""Perturbative van der Waals energy and Casimir-Polder force of an atom in level ``l``.

The energy splits into an off-resonant part, an integral along the imaginary
frequency axis,

    U_or = (1/2pi) int_0^inf du u^2 Tr[alpha_l(iu) G1(r_A, r_A, iu)],

and a resonant part from the downward transitions,

    U_r = - sum_{k: w_lk > 0} w_lk^2 d_lk . Re G1(r_A, r_A, w_lk) . d_kl.

Forces come from the analytic z_A derivative of the same integrands.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .atom import AtomModel
from .green import HalfSpace, green_components
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_adaptive, integrate_semi_infinite

__all__ = [
    "VdwResult",
    "vdw_off_resonant",
    "vdw_resonant",
    "vdw_potential",
    "ground_state_vdw_halfspace",
    "cp_force_perturbative",
    "perturbative_force_parts",
    "normalized_energy",
    "nonretarded_c3",
]


@dataclass(frozen=True)
class VdwResult:
    total: float
    off_resonant: float
    resonant: float
    quadrature_error: float
    position: float


def _imag_axis(geom, u, family, spec):
    """Stack cached imaginary-axis bracket integrals for an array of ``u``."""
    return np.array([green_components(geom, 1j * ui, family, spec)[0].real for ui in u])


def _u_scale(atom: AtomModel, l: int, geom: HalfSpace) -> float:
    w = np.abs(atom.energies - atom.energies[l])
    w = w[w > 0]
    return float(min(w.min(), 0.5 / geom.z))


def _alpha_diag(atom, l, u, isotropic):
    """Diagonal of the lowest-order polarizability at ``i u`` (shape (n, 3))."""
    wkl = atom.energies - atom.energies[l]
    out = np.zeros((u.size, 3))
    for k in range(atom.n_levels):
        if k == l:
            continue
        dd = (atom.dipoles[l, k] * atom.dipoles[k, l]).real
        if isotropic:
            dd = np.full(3, dd.sum() / 3.0)
        out += (2.0 * wkl[k] / (wkl[k] ** 2 + u**2))[:, None] * dd[None, :]
    return out


def _off_resonant_integral(atom, l, geom, spec, isotropic, family):
    if geom.material.is_vacuum:
        return 0.0, 0.0

    def integrand(u):
        g = _imag_axis(geom, u, family, spec)
        gx, gz = g[:, 0], g[:, 1]
        a = _alpha_diag(atom, l, u, isotropic)
        return u**2 * (a[:, 0] * gx + a[:, 1] * gx + a[:, 2] * gz) / (2.0 * np.pi)

    val, err = integrate_semi_infinite(integrand, spec, scale=_u_scale(atom, l, geom))
    return float(val), float(err) + spec.rel_tol * abs(float(val))


def vdw_off_resonant(atom: AtomModel, l: int, geom: HalfSpace,
                     spec: QuadratureSpec = DEFAULT_SPEC, isotropic: bool = False):
    """Off-resonant energy (trace form); returns ``(value, error_estimate)``."""
    return _off_resonant_integral(atom, l, geom, spec, isotropic, "coincident")


def _dGd(atom, l, k, diag):
    """Bilinear form ``d_lk . diag(gxx, gxx, gzz) . d_kl``."""
    dd = atom.dipoles[l, k] * atom.dipoles[k, l]
    return dd[0] * diag[0] + dd[1] * diag[0] + dd[2] * diag[1]


def _isotropic_dGd(atom, l, k, diag):
    d2 = np.vdot(atom.dipoles[l, k], atom.dipoles[l, k]).real
    return d2 / 3.0 * (2.0 * diag[0] + diag[1])


def vdw_resonant(atom: AtomModel, l: int, geom: HalfSpace,
                 spec: QuadratureSpec = DEFAULT_SPEC, isotropic: bool = False) -> float:
    """Resonant energy from the real-frequency Green tensor at bare ``w_lk``."""
    return _resonant_sum(atom, l, geom, spec, isotropic, "coincident")


def _resonant_sum(atom, l, geom, spec, isotropic, family):
    if geom.material.is_vacuum:
        return 0.0
    form = _isotropic_dGd if isotropic else _dGd
    total = 0.0
    for k in range(l):
        wlk = atom.energies[l] - atom.energies[k]
        if not np.any(atom.dipoles[l, k]):
            continue
        vals, _ = green_components(geom, wlk, family, spec)
        total += -wlk**2 * form(atom, l, k, vals.real).real
    return float(total)


def vdw_potential(atom: AtomModel, l: int, geom: HalfSpace,
                  spec: QuadratureSpec = DEFAULT_SPEC, isotropic: bool = False) -> VdwResult:
    """Full perturbative energy with its off-resonant/resonant split."""
    off, err = vdw_off_resonant(atom, l, geom, spec, isotropic)
    res = vdw_resonant(atom, l, geom, spec, isotropic)
    return VdwResult(off + res, off, res, err, geom.z)


def ground_state_vdw_halfspace(atom: AtomModel, geom: HalfSpace,
                               spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Orientation-averaged two-level ground-state energy as a direct (u, q) double integral.

    Independent of the Green-tensor module: the reflection coefficients are
    evaluated here in real arithmetic and the inner integral runs over ``q``.
    """
    if atom.n_levels != 2:
        raise ValueError("two-level atom required")
    mat = geom.material
    if mat.is_vacuum:
        return 0.0
    w10 = atom.energies[1] - atom.energies[0]
    d2 = np.vdot(atom.dipoles[1, 0], atom.dipoles[1, 0]).real
    z = geom.z
    qmax = spec.decay_cutoff / z

    def inner(u):
        eps = mat.epsilon.on_imaginary_axis(u)
        mu = mat.mu.on_imaginary_axis(u)

        def f(q):
            b0 = np.sqrt(u * u + q * q)
            b = np.sqrt(q * q + eps * mu * u * u)
            rs = (mu * b0 - b) / (mu * b0 + b)
            rp = (eps * b0 - b) / (eps * b0 + b)
            return q / b0 * np.exp(-2.0 * b0 * z) * (rs - rp * (2.0 * q * q / (u * u) + 1.0))

        return integrate_adaptive(f, 0.0, qmax, spec, breakpoints=[0.5 / z])[0]

    def outer(u):
        return np.array([ui**2 / (w10**2 + ui**2) * inner(ui) for ui in u])

    val, _ = integrate_semi_infinite(outer, spec, scale=min(w10, 0.5 / z))
    return float(w10 * d2 / (12.0 * np.pi**2) * val)


def perturbative_force_parts(atom: AtomModel, l: int, geom: HalfSpace,
                             spec: QuadratureSpec = DEFAULT_SPEC, isotropic: bool = False):
    """z components ``(F_or, F_r)`` of ``-dU/dz_A`` from analytic derivatives.

    The coincident-point derivative ``d/dz_A G1(r_A, r_A)`` is twice the
    first-argument derivative.
    """
    if geom.material.is_vacuum:
        return 0.0, 0.0
    f_or_half, _ = _off_resonant_integral(atom, l, geom, spec, isotropic, "gradient")
    f_r_half = _resonant_sum(atom, l, geom, spec, isotropic, "gradient")
    # U_or -> -2 * (first-argument form); U_r -> +2 * w^2 d.Re dG.d
    return -2.0 * f_or_half, -2.0 * f_r_half


def cp_force_perturbative(atom: AtomModel, l: int, geom: HalfSpace,
                          spec: QuadratureSpec = DEFAULT_SPEC, isotropic: bool = False) -> np.ndarray:
    """Force 3-vector ``-grad U_l``; only the normal component is non-zero."""
    f_or, f_r = perturbative_force_parts(atom, l, geom, spec, isotropic)
    return np.array([0.0, 0.0, f_or + f_r])


def normalized_energy(energy, atom: AtomModel, omega_ref: float = 1.0):
    """Scale an energy by ``12 pi^2 / (omega_ref^3 |d_10|^2)`` (c = mu0 = 1)."""
    d2 = np.vdot(atom.dipoles[1, 0], atom.dipoles[1, 0]).real
    return np.asarray(energy) * 12.0 * np.pi**2 / (omega_ref**3 * d2)


def nonretarded_c3(atom: AtomModel, material, spec: QuadratureSpec = DEFAULT_SPEC) -> float:
    """Short-distance coefficient of ``U_0 = -C3 / z^3`` (isotropic two-level atom).

    ``C3 = d^2/(24 pi^2) int_0^inf du w10/(w10^2 + u^2) (eps(iu)-1)/(eps(iu)+1)``.
    """
    w10 = atom.energies[1] - atom.energies[0]
    d2 = np.vdot(atom.dipoles[1, 0], atom.dipoles[1, 0]).real

    def f(u):
        e = material.epsilon.on_imaginary_axis(u)
        return w10 / (w10**2 + u**2) * (e - 1.0) / (e + 1.0)

    val, _ = integrate_semi_infinite(f, spec, scale=w10)
    return float(d2 / (24.0 * np.pi**2) * val)
