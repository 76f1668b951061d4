"""Adaptive one-dimensional Gauss-Kronrod quadrature.

Integrands are vectorized: ``f(x)`` receives a 1-d array of abscissae and
returns an array whose leading axis matches ``x``. Trailing axes are treated
as independent (possibly complex) components that share one partition of the
interval; convergence is required for every component separately.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = [
    "QuadratureSpec",
    "ConvergenceError",
    "integrate_adaptive",
    "integrate_semi_infinite",
]

# 15-point Kronrod extension of the 7-point Gauss rule (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KWEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GWEIGHTS = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes (1, 3, 5 from each end + centre).
_GWEIGHTS[[1, 3, 5]] = _WG[:3]
_GWEIGHTS[[13, 11, 9]] = _WG[:3]
_GWEIGHTS[7] = _WG[3]

_EPS = np.finfo(float).eps


class ConvergenceError(RuntimeError):
    """Adaptive refinement stopped before reaching the requested tolerance.

    The best available ``value`` and its ``error`` estimate are attached.
    """

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances shared by every integral in the package.

    Parameters
    ----------
    rel_tol : float
        Relative tolerance per component.
    abs_tol : float
        Absolute floor, in the units of the result.
    max_subdivisions : int
        Upper bound on the number of panels.
    decay_cutoff : float
        Exponent at which exponentially decaying tails ``exp(-x)`` are cut.
    """

    rel_tol: float = 1e-8
    abs_tol: float = 1e-300
    max_subdivisions: int = 2000
    decay_cutoff: float = 40.0

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise ValueError("rel_tol must be positive")
        if self.abs_tol < 0:
            raise ValueError("abs_tol must be non-negative")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if not self.decay_cutoff > 0:
            raise ValueError("decay_cutoff must be positive")

    def tightened(self, factor: float) -> "QuadratureSpec":
        """Copy with ``rel_tol`` divided by ``factor``."""
        return QuadratureSpec(self.rel_tol / factor, self.abs_tol,
                              self.max_subdivisions, self.decay_cutoff)


DEFAULT_SPEC = QuadratureSpec()


def _panel_rules(f, lo, hi):
    """Kronrod estimate, error estimate and |f| integral for each panel."""
    centre = 0.5 * (lo + hi)
    half = 0.5 * (hi - lo)
    x = (centre[:, None] + half[:, None] * _NODES[None, :]).ravel()
    fx = np.asarray(f(x))
    if fx.shape[0] != x.shape[0]:
        raise ValueError("integrand must return one row per abscissa")
    fx = fx.reshape((lo.size, 15) + fx.shape[1:])
    wshape = (1, 15) + (1,) * (fx.ndim - 2)
    hk = half.reshape((-1,) + (1,) * (fx.ndim - 2))
    kron = hk * np.sum(fx * _KWEIGHTS.reshape(wshape), axis=1)
    gauss = hk * np.sum(fx * _GWEIGHTS.reshape(wshape), axis=1)
    absint = np.abs(hk) * np.sum(np.abs(fx) * _KWEIGHTS.reshape(wshape), axis=1)
    mean = kron / np.where(hk == 0, 1.0, 2.0 * hk)
    resasc = np.abs(hk) * np.sum(
        np.abs(fx - mean[:, None, ...]) * _KWEIGHTS.reshape(wshape), axis=1)
    err = np.abs(kron - gauss)
    # QUADPACK error scaling, floored at roundoff level.
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where(resasc > 0, scaled, err)
    floor = 50.0 * _EPS * absint
    err = np.maximum(err, floor)
    if not np.all(np.isfinite(kron)):
        raise FloatingPointError("integrand returned non-finite values")
    return kron, err, floor


def integrate_adaptive(
    f: Callable[[np.ndarray], np.ndarray],
    a: float,
    b: float,
    spec: QuadratureSpec = DEFAULT_SPEC,
    breakpoints=(),
    joint: bool = False,
):
    """Integrate ``f`` over ``[a, b]`` with bisection of 15-point panels.

    With ``joint=True`` every component is held to ``rel_tol`` times the
    largest component magnitude instead of its own, which is what entries that
    vanish by symmetry need.

    Returns
    -------
    value, error : ndarray or scalar
        Integral and error estimate, with the trailing shape of ``f``.

    Raises
    ------
    ConvergenceError
        If ``spec.max_subdivisions`` panels do not reach the tolerance.
    """
    edges = np.unique(np.concatenate([[a, b], np.asarray(breakpoints, float)]))
    edges = edges[(edges >= min(a, b)) & (edges <= max(a, b))]
    if b < a:
        edges = edges[::-1]
    lo, hi = edges[:-1].astype(float), edges[1:].astype(float)
    if lo.size == 0:
        return 0.0, 0.0
    val, err, floor = _panel_rules(f, lo, hi)

    while True:
        total = val.sum(axis=0)
        total_err = err.sum(axis=0)
        mag = np.abs(total)
        if joint:
            mag = np.full_like(mag, np.max(mag))
        tol = np.maximum(spec.rel_tol * mag, spec.abs_tol)
        # Accept once every panel is limited by roundoff: further bisection cannot help.
        at_floor = np.all(err <= floor * (1.0 + 1e-12))
        if np.all(total_err <= tol) or at_floor:
            return total, total_err
        npan = lo.size
        if npan >= spec.max_subdivisions:
            raise ConvergenceError(
                f"no convergence after {npan} subdivisions "
                f"(error estimate {np.max(total_err):.3e})",
                value=total, error=total_err)
        # Panels carrying more than their share of the excess are bisected.
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = err / np.where(tol > 0, tol, np.inf)
        score = ratio.reshape(npan, -1).max(axis=1)
        split = score > 0.5 / npan
        split[np.argmax(score)] = True
        nsplit = int(split.sum())
        if npan + nsplit > spec.max_subdivisions:
            order = np.argsort(score)[::-1][: max(1, spec.max_subdivisions - npan)]
            split = np.zeros(npan, bool)
            split[order] = True
        mid = 0.5 * (lo[split] + hi[split])
        if np.any((mid == lo[split]) | (mid == hi[split])):
            raise ConvergenceError("panel width reached machine resolution",
                                   value=total, error=total_err)
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        nv, ne, nf = _panel_rules(f, new_lo, new_hi)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        floor = np.concatenate([floor[keep], nf])


def integrate_semi_infinite(
    f: Callable[[np.ndarray], np.ndarray],
    spec: QuadratureSpec = DEFAULT_SPEC,
    scale: float = 1.0,
    start: float = 0.0,
    joint: bool = False,
):
    """Integrate a decaying ``f`` over ``[start, inf)``.

    The map ``u = start + scale * t / (1 - t)`` sends ``t`` in ``[0, 1)`` to
    the half line; ``scale`` should be the width of the region carrying most
    of the integral. ``joint`` is passed on to :func:`integrate_adaptive`.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")

    def mapped(t):
        one_minus = 1.0 - t
        u = start + scale * t / one_minus
        jac = scale / one_minus**2
        fu = np.asarray(f(u))
        return fu * jac.reshape((-1,) + (1,) * (fu.ndim - 1))

    return integrate_adaptive(mapped, 0.0, 1.0, spec, joint=joint)
