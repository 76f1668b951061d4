"""Body-induced level shifts and widths, solved self-consistently.

The shift of level ``m`` through channel ``k`` is

    dw_m^k = - Theta(w~_mk) w~_mk^2 d_km . Re G1(w~_mk) . d_mk
             + (1/pi) int_0^inf du u^2 w~_km d_km . G1(iu) . d_mk / (w~_km^2 + u^2)

and the partial width is ``2 Theta(w~_mk) w~_mk^2 d_km . Im G(w~_mk) . d_mk``
with the full (vacuum plus scattering) Green tensor. Because the shifted
frequencies ``w~_mn = w_mn + dw_m - dw_n`` appear on both sides, the shifts
are a fixed point; the widths follow once the shifts are known.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from ..atom import AtomModel
from ..green import HalfSpace, green_components
from ..quadrature import DEFAULT_SPEC, QuadratureSpec, integrate_semi_infinite

__all__ = [
    "DressingError",
    "NoRootError",
    "LevelDressing",
    "solve_dressing",
    "widths_only",
]


class DressingError(RuntimeError):
    """The self-consistent shift equations could not be solved."""


class NoRootError(DressingError):
    """The scalar shift equation has no solution on the searched bracket."""


@dataclass(frozen=True, eq=False)
class LevelDressing:
    """Shifted frequencies and widths of every level at height ``z``.

    Attributes
    ----------
    omega_tilde : ndarray, shape (N, N)
        ``omega_tilde[m, n] = w_mn + shifts[m] - shifts[n]``.
    partial_shifts, partial_widths : ndarray, shape (N, N)
        Channel contributions ``[m, k]``; rows sum to ``shifts`` and ``widths``.
    candidates : tuple of float
        Every root found for ``w~_10`` by a scalar root search (empty when the
        fixed point was reached by iteration).
    """

    z: float
    omega_tilde: np.ndarray
    shifts: np.ndarray
    partial_shifts: np.ndarray
    widths: np.ndarray
    partial_widths: np.ndarray
    residual: float = 0.0
    iterations: int = 0
    converged: bool = True
    method: str = "bare"
    candidates: tuple = ()
    flags: tuple = field(default=())

    @classmethod
    def bare(cls, atom: AtomModel, z: float, widths=None) -> "LevelDressing":
        """Undressed levels, optionally with prescribed total widths."""
        n = atom.n_levels
        w = np.zeros(n) if widths is None else np.asarray(widths, float)
        pw = np.zeros((n, n))
        # Put prescribed widths on the channel to the ground state.
        pw[:, 0] = w
        pw[0, 0] = 0.0
        return cls(float(z), atom.transition_frequencies.copy(), np.zeros(n), np.zeros((n, n)),
                   w.copy(), pw)

    def as_dict(self):
        return {
            "z": self.z,
            "omega_tilde": self.omega_tilde.tolist(),
            "shifts": self.shifts.tolist(),
            "widths": self.widths.tolist(),
            "residual": self.residual,
            "iterations": self.iterations,
            "converged": self.converged,
            "method": self.method,
            "candidates": list(self.candidates),
            "flags": list(self.flags),
        }


def _bilinear(atom, m, k, diag):
    """``d_km . diag(g_xx, g_xx, g_zz) . d_mk`` for an array of diagonals."""
    dd = atom.dipoles[k, m] * atom.dipoles[m, k]
    diag = np.asarray(diag)
    return (dd[0] + dd[1]) * diag[..., 0] + dd[2] * diag[..., 1]


def _channels(atom):
    n = atom.n_levels
    return [(m, k) for m in range(n) for k in range(n)
            if m != k and np.any(atom.dipoles[m, k])]


class _ShiftMap:
    """Evaluates the right-hand side of the shift equations."""

    def __init__(self, atom, geom, spec, include_off_resonant):
        self.atom = atom
        self.geom = geom
        self.spec = spec
        self.off = include_off_resonant and not geom.material.is_vacuum
        self.channels = _channels(atom)
        w = np.abs(atom.transition_frequencies)
        self.u_scale = float(min(w[w > 0].min(), 0.5 / geom.z))

    def partial(self, delta):
        atom, geom = self.atom, self.geom
        wt = atom.transition_frequencies + delta[:, None] - delta[None, :]
        n = atom.n_levels
        part = np.zeros((n, n))
        if geom.material.is_vacuum:
            return part, wt
        for m, k in self.channels:
            if wt[m, k] > 0:
                g, _ = green_components(geom, wt[m, k], "coincident", self.spec)
                part[m, k] -= wt[m, k] ** 2 * _bilinear(atom, m, k, g).real
        if self.off and self.channels:
            part += self._off_resonant(wt)
        return part, wt

    def _off_resonant(self, wt):
        atom, geom, spec = self.atom, self.geom, self.spec
        chans = self.channels
        wkm = np.array([wt[k, m] for m, k in chans])
        dd = np.array([atom.dipoles[k, m] * atom.dipoles[m, k] for m, k in chans]).real

        def integrand(u):
            g = np.array([green_components(geom, 1j * ui, "coincident", spec)[0].real for ui in u])
            form = (dd[None, :, 0] + dd[None, :, 1]) * g[:, None, 0] + dd[None, :, 2] * g[:, None, 1]
            return (u**2)[:, None] * wkm[None, :] * form / (wkm[None, :] ** 2 + (u**2)[:, None]) / np.pi

        vals, _ = integrate_semi_infinite(integrand, spec, scale=self.u_scale)
        out = np.zeros_like(wt)
        for (m, k), v in zip(chans, vals):
            out[m, k] = v
        return out


def _widths(atom, geom, wt, spec, include_free_space):
    n = atom.n_levels
    pw = np.zeros((n, n))
    for m, k in _channels(atom):
        w = wt[m, k]
        if w <= 0:
            continue
        im = 0.0
        if not geom.material.is_vacuum:
            g, _ = green_components(geom, w, "coincident", spec)
            im = _bilinear(atom, m, k, g.imag).real
        if include_free_space:
            dd = (atom.dipoles[k, m] * atom.dipoles[m, k]).real
            im += w / (6.0 * np.pi) * dd.sum()
        pw[m, k] = 2.0 * w**2 * im
    return pw


def _iterate(shift_map, n, tol, max_iter, damping):
    delta = np.zeros(n)
    scale = np.abs(shift_map.atom.transition_frequencies).max()
    history = []
    for it in range(1, max_iter + 1):
        part, _ = shift_map.partial(delta)
        step = part.sum(axis=1) - delta
        res = float(np.abs(step).max() / scale)
        delta = delta + (1.0 - damping) * step
        history.append(res)
        if res < tol:
            return delta, res, it, True
        # Three successive non-decreasing residuals signal oscillation or divergence.
        if len(history) > 3 and all(history[-i] >= history[-i - 1] for i in (1, 2, 3)):
            return delta, res, it, False
    return delta, history[-1], max_iter, False


def _scan_roots(g, lo, hi, npts=401, xtol=1e-14, vectorized=False, grid=None):
    """All sign changes of ``g`` on a uniform grid (or ``grid``), refined with Brent's method."""
    x = np.linspace(lo, hi, npts) if grid is None else np.unique(np.asarray(grid, float))
    npts = x.size
    y = np.asarray(g(x), float) if vectorized else np.array([g(xi) for xi in x])
    roots = []
    for i in range(npts - 1):
        if y[i] == 0.0:
            roots.append(float(x[i]))
        elif y[i] * y[i + 1] < 0:
            roots.append(float(brentq(lambda t: float(g(t)), x[i], x[i + 1], xtol=xtol,
                                      rtol=4 * np.finfo(float).eps)))
    if y[-1] == 0.0:
        roots.append(float(x[-1]))
    return roots


def _two_level_root(shift_map, w10, tol):
    """Solve ``x = w10 + dw_1(x) - dw_0(x)`` for the shifted transition frequency."""

    def delta_of(x):
        part, _ = shift_map.partial(np.array([0.0, x - w10]))
        # The partial shifts depend on the transition frequency only.
        return part.sum(axis=1)

    def g(x):
        d = delta_of(x)
        return x - w10 - (d[1] - d[0])

    width = max(4.0 * abs(g(w10)), 1e-6 * w10)
    for _ in range(8):
        lo, hi = max(w10 - width, 1e-3 * w10), w10 + width
        roots = _scan_roots(g, lo, hi)
        if roots:
            break
        width *= 4.0
    if not roots:
        raise NoRootError("no self-consistent transition frequency found")
    x = min(roots, key=lambda r: abs(r - w10))
    d = delta_of(x)
    # Recover individual shifts consistent with the chosen root.
    return d, tuple(roots), float(abs(g(x)) / w10)


def solve_dressing(
    atom: AtomModel,
    geom: HalfSpace,
    spec: QuadratureSpec = DEFAULT_SPEC,
    *,
    include_off_resonant: bool = True,
    include_free_space: bool = True,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> LevelDressing:
    """Self-consistent shifts and widths at height ``geom.z``.

    Undamped fixed-point iteration from the bare frequencies is tried first;
    if it stalls the iteration is repeated with damping 0.5, and for a
    two-level atom a bracketed scalar root search is the last resort.

    Parameters
    ----------
    include_off_resonant : bool
        Keep the imaginary-frequency integral in the shifts.
    include_free_space : bool
        Add the vacuum decay rate to the widths.

    Raises
    ------
    DressingError
        If no scheme converges.
    """
    n = atom.n_levels
    shift_map = _ShiftMap(atom, geom, spec, include_off_resonant)
    candidates = ()
    flags = []
    delta, res, iters, ok = _iterate(shift_map, n, tol, max_iter, 0.0)
    method = "iteration"
    if not ok:
        delta, res, more, ok = _iterate(shift_map, n, tol, max_iter, 0.5)
        iters += more
        method = "damped-iteration"
    if not ok and n == 2:
        w10 = atom.energies[1] - atom.energies[0]
        delta, candidates, res = _two_level_root(shift_map, w10, tol)
        ok = res < max(tol, 1e-12)
        method = "root-search"
        if len(candidates) > 1:
            flags.append("multiple_roots")
    if not ok:
        raise DressingError(f"shift equations did not converge (residual {res:.3e})")
    part, wt = shift_map.partial(delta)
    # Use the converged shifts themselves so that w~ = w + dw_m - dw_n is exact.
    wt = atom.transition_frequencies + delta[:, None] - delta[None, :]
    pw = _widths(atom, geom, wt, spec, include_free_space)
    return LevelDressing(float(geom.z), wt, delta, part, pw.sum(axis=1), pw,
                         residual=res, iterations=iters, converged=ok, method=method,
                         candidates=candidates, flags=tuple(flags))


def widths_only(atom: AtomModel, geom: HalfSpace, spec: QuadratureSpec = DEFAULT_SPEC,
                include_free_space: bool = True) -> LevelDressing:
    """Bare transition frequencies with the widths evaluated at those frequencies."""
    wt = atom.transition_frequencies.copy()
    pw = _widths(atom, geom, wt, spec, include_free_space)
    n = atom.n_levels
    return LevelDressing(float(geom.z), wt, np.zeros(n), np.zeros((n, n)), pw.sum(axis=1), pw,
                         method="widths-only")
