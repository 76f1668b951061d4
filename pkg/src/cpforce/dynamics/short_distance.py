"""Closed-form nonretarded dressing and resonant force of a two-level atom.

Close to the surface only the dielectric response matters. With

    K = (|d|^2 + |d_z|^2) / (32 pi z^3),   f(w) = (|eps(w)|^2 - 1) / |eps(w) + 1|^2,

the shifted transition frequency solves ``w~ = w10 - K f(w~)``, the excited
level width is ``4 K Im eps(w~) / |eps(w~) + 1|^2`` and the resonant force on
the excited state is ``-3 (|d|^2 + |d_z|^2) f(Omega) / (32 pi z^4)`` with
``Omega = w~ + i Gamma_1 / 2``. The off-resonant shift and the free-space
decay rate are neglected.
"""

from __future__ import annotations

import numpy as np

from ..atom import AtomModel
from ..green import HalfSpace
from ..materials import eval_epsilon
from .dressing import LevelDressing, NoRootError, _scan_roots

__all__ = [
    "short_distance_kernel",
    "short_distance_dressing",
    "short_distance_force",
    "one_pass_dressing",
    "closed_form_width",
    "closed_form_force",
]


def _dipole_weight(atom: AtomModel) -> float:
    if atom.n_levels != 2:
        raise ValueError("two-level atom required")
    d = atom.dipoles[1, 0]
    return float(np.vdot(d, d).real + abs(d[2]) ** 2)


def short_distance_kernel(atom: AtomModel, z: float) -> float:
    """``K = (|d|^2 + |d_z|^2) / (32 pi z^3)``."""
    return _dipole_weight(atom) / (32.0 * np.pi * z**3)


def _f(material, w):
    e = np.asarray(eval_epsilon(material, w), complex)
    out = (np.abs(e) ** 2 - 1.0) / np.abs(e + 1.0) ** 2
    return float(out) if out.ndim == 0 else out


def _width(material, kern, w):
    e = complex(eval_epsilon(material, w))
    return 4.0 * kern * e.imag / abs(e + 1.0) ** 2


def _dressing(atom, geom, w_t, candidates=(), flags=(), method="closed-form"):
    kern = short_distance_kernel(atom, geom.z)
    w10 = atom.energies[1] - atom.energies[0]
    g1 = _width(geom.material, kern, w_t)
    wt = np.array([[0.0, -w_t], [w_t, 0.0]])
    shifts = np.array([0.0, w_t - w10])
    ps = np.array([[0.0, 0.0], [shifts[1], 0.0]])
    pw = np.array([[0.0, 0.0], [g1, 0.0]])
    return LevelDressing(float(geom.z), wt, shifts, ps, np.array([0.0, g1]), pw,
                         residual=0.0, iterations=0, converged=True, method=method,
                         candidates=tuple(candidates), flags=tuple(flags))


def short_distance_dressing(atom: AtomModel, geom: HalfSpace, npts: int = 4001) -> LevelDressing:
    """Solve ``w~ = w10 - K f(w~)`` by a bracketed scan of every root.

    Every root satisfies ``|w~ - w10| <= K max|f|``, so the bracket is built
    from a bound on ``|f|`` and extends on both sides of ``w10`` (the shift is
    positive where ``|eps| < 1``). The root nearest ``w10`` is returned; when
    several exist all are listed in ``candidates`` and ``"multiple_roots"``
    is flagged.

    Raises
    ------
    NoRootError
        If no root exists in ``(0, w10 + K max|f|]``.
    """
    mat = geom.material
    w10 = atom.energies[1] - atom.energies[0]
    if mat.epsilon.omega_P == 0.0:
        return _dressing(atom, geom, w10)
    kern = short_distance_kernel(atom, geom.z)
    probe = np.linspace(1e-6 * w10, 4.0 * max(w10, mat.epsilon.omega_T), npts)
    fmax = np.abs(_f(mat, probe)).max()
    # The resonance of |eps + 1| may fall between probe points.
    es = np.sqrt(mat.epsilon.omega_T**2 + 0.5 * mat.epsilon.omega_P**2)
    fine = es + np.linspace(-5, 5, 201) * max(mat.epsilon.gamma, 1e-6)
    fmax = max(fmax, np.abs(_f(mat, fine)).max())
    half = kern * fmax * 1.01 + 1e-12 * w10
    lo, hi = max(w10 - half, 1e-9 * w10), w10 + half

    def g(x):
        return x - w10 + kern * _f(mat, x)

    # Uniform coverage of the bracket plus geometric refinement around w10, so
    # that a very wide bracket (weakly damped media) still resolves nearby roots.
    offsets = np.geomspace(1e-12 * w10, half, npts // 2)
    grid = np.concatenate([np.linspace(lo, hi, npts), w10 - offsets, w10 + offsets, [w10]])
    grid = grid[(grid >= lo) & (grid <= hi)]
    roots = _scan_roots(g, lo, hi, vectorized=True, grid=grid)
    if not roots:
        raise NoRootError(f"no solution of the short-distance shift equation in [{lo:.6g}, {hi:.6g}]")
    w_t = min(roots, key=lambda r: abs(r - w10))
    flags = ("multiple_roots",) if len(roots) > 1 else ()
    return _dressing(atom, geom, w_t, roots, flags)


def one_pass_dressing(atom: AtomModel, geom: HalfSpace) -> LevelDressing:
    """Single non-self-consistent evaluation of the kernel at the bare frequency."""
    w10 = atom.energies[1] - atom.energies[0]
    kern = short_distance_kernel(atom, geom.z)
    return _dressing(atom, geom, w10 - kern * _f(geom.material, w10), method="one-pass")


def closed_form_width(atom: AtomModel, geom: HalfSpace, omega: float) -> float:
    """Excited-level width ``4 K Im eps / |eps + 1|^2`` at transition frequency ``omega``."""
    return _width(geom.material, short_distance_kernel(atom, geom.z), omega)


def closed_form_force(atom: AtomModel, geom: HalfSpace, omega) -> float:
    """``-3 (|d|^2 + |d_z|^2) f(omega) / (32 pi z^4)`` at a (complex) frequency."""
    return -3.0 * _dipole_weight(atom) / (32.0 * np.pi * geom.z**4) * _f(geom.material, omega)


def short_distance_force(atom: AtomModel, dressing: LevelDressing, geom: HalfSpace) -> float:
    """Normal component of the excited-state resonant force at ``Omega = w~ + i Gamma_1/2``."""
    omega = dressing.omega_tilde[1, 0] + 0.5j * dressing.widths[1]
    return closed_form_force(atom, geom, omega)
