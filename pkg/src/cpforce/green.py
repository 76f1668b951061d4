"""Scattering Green tensor of a magnetodielectric half-space.

Geometry: interface at ``z = 0``, medium in ``z < 0``, atom at ``z = z_A > 0``
with ``e_z`` pointing away from the medium. Reduced units ``hbar = c = eps0 = 1``.

At coincident points the reflected tensor is diagonal,

    G_xx = G_yy = (i/8pi) int dq (q/b0) exp(2 i b0 z) [r_s - r_p b0^2/k^2]
    G_zz        = (i/8pi) int dq (q/b0) exp(2 i b0 z) [2 r_p q^2/k^2]

with ``b0 = sqrt(k^2 - q^2)`` (``Im b0 > 0``) and ``k = omega``. Derivatives in
the first argument insert ``i b0`` (along z) or ``i q_x`` (along x) before the
angular integration; the lateral derivatives survive only in the xz/zx pair.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .materials import MaterialModel, PoleError
from .quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_adaptive

__all__ = [
    "HalfSpace",
    "GreenEval",
    "PolePathError",
    "fresnel_rs_rp",
    "scattering_green_coincident",
    "scattering_green_gradient",
    "scattering_green_curl",
    "scattering_green_two_point",
    "vacuum_im_green_coincident",
]

# Relative size of |eps b0 + b| below which a surface-mode pole is declared on the path.
POLE_TOLERANCE = 1e-8


class PolePathError(PoleError):
    """A reflection-coefficient pole lies on (or within tolerance of) the q path."""


@dataclass(frozen=True)
class HalfSpace:
    """Atom at height ``z`` above a half-space filled with ``material``."""

    z: float
    material: MaterialModel

    def __post_init__(self):
        if not self.z > 0:
            raise ValueError("atom must sit above the interface (z > 0)")

    def moved(self, z: float) -> "HalfSpace":
        return HalfSpace(z, self.material)


@dataclass(frozen=True)
class GreenEval:
    tensor: np.ndarray
    frequency: complex
    error: float = 0.0


def _sqrt_upper(x2, omega):
    """Square root on the ``Im >= 0`` sheet; real-axis values continue from above."""
    s = np.sqrt(np.asarray(x2, dtype=complex))
    flip = (s.imag < 0) | ((s.imag == 0) & (s.real * np.real(omega) < 0))
    return np.where(flip, -s, s)


def _fresnel(chi_e, chi_m, q, k2, omega):
    """``(beta0, r_s, r_p)`` from the susceptibilities ``eps - 1`` and ``mu - 1``.

    The numerators are rewritten as ``(a^2 beta0^2 - beta^2) / (a beta0 + beta)``
    so that nearly vacuum-like media (large imaginary frequencies) keep full
    relative precision.
    """
    eps, mu = 1.0 + chi_e, 1.0 + chi_m
    q2 = q**2
    beta0 = _sqrt_upper(k2 - q2, omega)
    beta = _sqrt_upper(k2 * eps * mu - q2, omega)
    den_s = mu * beta0 + beta
    den_p = eps * beta0 + beta
    scale_s = np.abs(mu * beta0) + np.abs(beta)
    scale_p = np.abs(eps * beta0) + np.abs(beta)
    with np.errstate(invalid="ignore"):
        bad = (np.abs(den_s) <= POLE_TOLERANCE * scale_s) | (np.abs(den_p) <= POLE_TOLERANCE * scale_p)
    if np.any(bad & (scale_p > 0)):
        raise PolePathError("reflection-coefficient pole on the integration path")
    num_s = k2 * mu * (chi_m - chi_e) - q2 * chi_m * (2.0 + chi_m)
    num_p = k2 * eps * (chi_e - chi_m) - q2 * chi_e * (2.0 + chi_e)
    rs = num_s / den_s**2
    rp = num_p / den_p**2
    return beta0, rs, rp


def fresnel_rs_rp(material: MaterialModel, q, omega):
    """Reflection coefficients ``(r_s, r_p)`` at transverse wavenumber ``q``."""
    omega = complex(omega)
    chi_e = material.epsilon.susceptibility(omega)
    chi_m = material.mu.susceptibility(omega)
    q = np.asarray(q, dtype=float)
    _, rs, rp = _fresnel(chi_e, chi_m, q, omega**2, omega)
    if omega.real == 0.0:
        rs, rp = rs.real + 0j, rp.real + 0j
    return rs[()] if rs.ndim == 0 else rs, rp[()] if rp.ndim == 0 else rp


# Bracket families. Each entry maps (q, b0, rs, rp, k2) to the integrand that
# multiplies the common factor (i/8pi)(q/b0) exp(2 i b0 z).
def _br_coincident(q, b0, rs, rp, k2):
    return np.stack([rs - rp * b0**2 / k2, 2.0 * rp * q**2 / k2], axis=-1)


def _br_gradient(q, b0, rs, rp, k2):
    xx = rs - rp * b0**2 / k2
    return np.stack([1j * b0 * xx,
                     1j * b0 * 2.0 * rp * q**2 / k2,
                     -1j * b0 * rp * q**2 / k2], axis=-1)


def _br_curl(q, b0, rs, rp, k2):
    return (1j * b0 * (rs - rp))[:, None]


_FAMILIES = {"coincident": _br_coincident, "gradient": _br_gradient, "curl": _br_curl}


def _path_breaks(eps, mu, kr):
    """Candidate q values where the integrand varies sharply."""
    cands = [np.sqrt(eps * mu).real * kr]
    for a, b in ((eps, mu), (mu, eps)):
        with np.errstate(divide="ignore", invalid="ignore"):
            qsp2 = a * (a - b) / (a * a - 1.0) * kr**2 if a * a != 1.0 else np.inf
        if np.isfinite(qsp2):
            cands.append(np.sqrt(complex(qsp2)).real)
    return [c for c in cands if np.isfinite(c) and c > 0]


def _q_integral(z, material, omega, family, spec):
    """Integrate a bracket family along the real q axis.

    Returns ``(values, errors)`` as complex / real arrays over the family's
    components.
    """
    omega = complex(omega)
    if omega == 0:
        raise ValueError("zero frequency: p-polarized contribution diverges")
    bracket = _FAMILIES[family]
    chi_e = complex(material.epsilon.susceptibility(omega))
    chi_m = complex(material.mu.susceptibility(omega))
    k2 = omega**2
    cutoff = spec.decay_cutoff / z
    pref = 1j / (8.0 * np.pi)

    if omega.real == 0.0:
        u = abs(omega.imag)
        chi_e, chi_m = chi_e.real, chi_m.real

        def f_imag(s):
            # b0 = u + s; q^2 = b0^2 - u^2 written without cancellation.
            q = np.sqrt(s * (s + 2.0 * u))
            b0, rs, rp = _fresnel(chi_e, chi_m, q, k2, omega)
            val = bracket(q, b0, rs, rp, k2).real
            # (i/8pi)(q/b0) dq = db0/8pi on this axis
            return val * (np.exp(-2.0 * (u + s) * z) / (8.0 * np.pi))[:, None]

        val, err = integrate_adaptive(f_imag, 0.0, cutoff, spec, breakpoints=[0.5 / z])
        return val + 0j, err

    kr = abs(omega.real)
    breaks = _path_breaks(1.0 + chi_e, 1.0 + chi_m, kr)
    # Surface-mode poles of a (nearly) lossless medium sit at the break
    # points; probing them raises PolePathError before any quadrature runs.
    if breaks:
        _fresnel(chi_e, chi_m, np.asarray(breaks), k2, omega)

    def integrand(q, dq):
        b0, rs, rp = _fresnel(chi_e, chi_m, q, k2, omega)
        common = pref * q / b0 * np.exp(2j * b0 * z) * dq
        return bracket(q, b0, rs, rp, k2) * common[:, None]

    def f_prop(phi):
        return integrand(kr * np.sin(phi), kr * np.cos(phi))

    def f_evan(s):
        q = np.sqrt(kr**2 + s**2)
        return integrand(q, s / q)

    prop_breaks = [np.arcsin(b / kr) for b in breaks if b < kr]
    evan_breaks = [np.sqrt(b**2 - kr**2) for b in breaks if kr < b < kr + cutoff]
    evan_breaks.append(0.5 / z)
    v2, e2 = integrate_adaptive(f_evan, 0.0, cutoff, spec, breakpoints=evan_breaks)
    # The propagating sector only needs accuracy relative to the evanescent one.
    floor = max(spec.abs_tol, 0.1 * spec.rel_tol * float(np.max(np.abs(v2))))
    psec = QuadratureSpec(spec.rel_tol, floor, spec.max_subdivisions, spec.decay_cutoff)
    v1, e1 = integrate_adaptive(f_prop, 0.0, 0.5 * np.pi, psec, breakpoints=prop_breaks)
    return v1 + v2, e1 + e2


@lru_cache(maxsize=400_000)
def _cached(z, material, omega, family, spec):
    val, err = _q_integral(z, material, omega, family, spec)
    val.setflags(write=False)
    return val, err


def green_components(geom: HalfSpace, omega, family="coincident", spec=DEFAULT_SPEC):
    """Raw bracket integrals for ``family`` (cached, read-only arrays).

    ``coincident`` -> (G_xx, G_zz); ``gradient`` -> (dz G_xx, dz G_zz,
    dx G_xz); ``curl`` -> ((curl G)_yx,).
    """
    if geom.material.is_vacuum:
        n = {"coincident": 2, "gradient": 3, "curl": 1}[family]
        return np.zeros(n, complex), np.zeros(n)
    return _cached(float(geom.z), geom.material, complex(omega), family, spec)


def scattering_green_coincident(geom: HalfSpace, omega, spec=DEFAULT_SPEC) -> GreenEval:
    """Reflected Green tensor ``G1(r_A, r_A, omega)`` (3x3, diagonal)."""
    (gxx, gzz), err = green_components(geom, omega, "coincident", spec)
    return GreenEval(np.diag([gxx, gxx, gzz]), complex(omega), float(np.max(err)))


def gradient_from_components(dxx, dzz, axz):
    """Assemble ``grad[a, i, j] = d_a G_ij`` from the three independent entries."""
    grad = np.zeros((3, 3, 3), complex)
    grad[2, 0, 0] = grad[2, 1, 1] = dxx
    grad[2, 2, 2] = dzz
    grad[0, 0, 2] = grad[1, 1, 2] = axz
    grad[0, 2, 0] = grad[1, 2, 1] = -axz
    return grad


def curl_from_component(c):
    curl = np.zeros((3, 3), complex)
    curl[1, 0] = c
    curl[0, 1] = -c
    return curl


def scattering_green_gradient(geom: HalfSpace, omega, spec=DEFAULT_SPEC) -> np.ndarray:
    """First-argument gradient ``[d_a G1_ij(r, r_A)]`` at ``r = r_A``.

    Shape ``(3, 3, 3)`` indexed ``[a, i, j]``. Diagonal entries only have a z
    derivative; the lateral derivatives of the xz/zx pair are equal and opposite.
    """
    vals, _ = green_components(geom, omega, "gradient", spec)
    return gradient_from_components(*vals)


def scattering_green_curl(geom: HalfSpace, omega, spec=DEFAULT_SPEC) -> np.ndarray:
    """``[curl G1(r, r_A)]_ij = eps_ikl d_k G1_lj`` at ``r = r_A`` (antisymmetric)."""
    (c,), _ = green_components(geom, omega, "curl", spec)
    return curl_from_component(c)


def vacuum_im_green_coincident(omega) -> np.ndarray:
    """``Im G0(r, r, omega) = omega/(6 pi) I`` for real ``omega >= 0``."""
    omega = float(omega)
    if omega < 0:
        raise ValueError("frequency must be non-negative")
    return omega / (6.0 * np.pi) * np.eye(3)


def scattering_green_two_point(geom: HalfSpace, r, r_prime, omega,
                               spec=DEFAULT_SPEC, n_angles=32) -> np.ndarray:
    """Reflected Green tensor between nearby points ``r`` and ``r'`` above the medium.

    The plane-wave angular integral is done numerically (trapezoid rule in the
    azimuth) rather than through the closed angular forms used for the
    coincident quantities, so this routine serves as an independent check of
    gradient and curl by finite differences. Intended for lateral separations
    small compared with ``z + z'``.
    """
    r = np.asarray(r, float)
    rp_ = np.asarray(r_prime, float)
    if r[2] <= 0 or rp_[2] <= 0:
        raise ValueError("both points must lie above the interface")
    if geom.material.is_vacuum:
        return np.zeros((3, 3), complex)
    omega = complex(omega)
    mat = geom.material
    chi_e = complex(mat.epsilon.susceptibility(omega))
    chi_m = complex(mat.mu.susceptibility(omega))
    k2 = omega**2
    zsum = r[2] + rp_[2]
    dx, dy = r[0] - rp_[0], r[1] - rp_[1]
    phi = 2.0 * np.pi * np.arange(n_angles) / n_angles
    c, s = np.cos(phi), np.sin(phi)

    def integrand(q, jac):
        b0, rs, rp = _fresnel(chi_e, chi_m, q, k2, omega)
        phase = np.exp(1j * q[:, None] * (dx * c + dy * s)[None, :])  # (n, a)
        es = np.stack([s, -c, np.zeros_like(c)], -1)                      # (a, 3)
        ss = es[:, :, None] * es[:, None, :]
        khat = np.stack([c, s, np.zeros_like(c)], -1)
        zhat = np.array([0.0, 0.0, 1.0])
        up = -b0[:, None, None] * khat[None] + q[:, None, None] * zhat      # (n, a, 3)
        down = b0[:, None, None] * khat[None] + q[:, None, None] * zhat
        pp = up[..., :, None] * down[..., None, :] / k2
        m = rs[:, None, None, None] * ss[None] + rp[:, None, None, None] * pp
        ang = np.mean(phase[..., None, None] * m, axis=1)                     # (n, 3, 3)
        # (i/8pi^2) * 2pi * mean over azimuth
        common = 1j / (4.0 * np.pi) * q / b0 * np.exp(1j * b0 * zsum) * jac
        return (ang * common[:, None, None]).reshape(q.size, 9)

    cutoff = 2.0 * spec.decay_cutoff / zsum

    def run(sp):
        if omega.real == 0.0:
            val, _ = integrate_adaptive(lambda q: integrand(q, np.ones_like(q)), 0.0, cutoff, sp,
                                        breakpoints=[1.0 / zsum], joint=True)
            return val
        kr = abs(omega.real)
        v1, _ = integrate_adaptive(lambda p: integrand(kr * np.sin(p), kr * np.cos(p)),
                                   0.0, 0.5 * np.pi, sp, joint=True)

        def evan(sv):
            q = np.sqrt(kr**2 + sv**2)
            return integrand(q, sv / q)

        v2, _ = integrate_adaptive(evan, 0.0, cutoff, sp, breakpoints=[1.0 / zsum], joint=True)
        return v1 + v2

    val = run(spec)
    return val.reshape(3, 3)

