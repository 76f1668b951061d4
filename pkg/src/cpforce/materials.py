"""Single-resonance Drude-Lorentz permittivity and permeability.

All frequencies are in units of a reference frequency ``omega_ref``; the
response functions are dimensionless.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "PoleError",
    "DrudeLorentzParams",
    "MaterialModel",
    "VACUUM",
    "eval_epsilon",
    "eval_mu",
]

_TINY = 1e-300


class PoleError(ArithmeticError):
    """Evaluation exactly at (or numerically on) a pole of a response function."""


@dataclass(frozen=True)
class DrudeLorentzParams:
    """Oscillator ``1 + omega_P**2 / (omega_T**2 - omega**2 - i gamma omega)``."""

    omega_P: float = 0.0
    omega_T: float = 1.0
    gamma: float = 0.0

    def __post_init__(self):
        if self.omega_P < 0:
            raise ValueError("omega_P must be >= 0")
        if not self.omega_T > 0:
            raise ValueError("omega_T must be > 0")
        if self.gamma < 0:
            raise ValueError("gamma must be >= 0")

    def __call__(self, omega):
        return 1.0 + self.susceptibility(omega)

    def susceptibility(self, omega):
        """Response minus one, computed without the cancellation in ``value - 1``."""
        omega = np.asarray(omega, dtype=complex)
        if self.omega_P == 0.0:
            return np.zeros_like(omega)
        den = self.omega_T**2 - omega**2 - 1j * self.gamma * omega
        if np.any(np.abs(den) < _TINY * (1.0 + self.omega_T**2)):
            raise PoleError("frequency coincides with an oscillator pole")
        return self.omega_P**2 / den

    def on_imaginary_axis(self, u):
        """Real response at ``omega = i u``."""
        u = np.asarray(u, dtype=float)
        if self.omega_P == 0.0:
            return np.ones_like(u)
        return 1.0 + self.omega_P**2 / (self.omega_T**2 + u**2 + self.gamma * u)

    def as_dict(self):
        return {"omega_P": self.omega_P, "omega_T": self.omega_T, "gamma": self.gamma}


@dataclass(frozen=True)
class MaterialModel:
    """Magnetodielectric medium filling the half-space below the interface."""

    epsilon: DrudeLorentzParams = field(default_factory=DrudeLorentzParams)
    mu: DrudeLorentzParams = field(default_factory=DrudeLorentzParams)

    @property
    def is_vacuum(self) -> bool:
        return self.epsilon.omega_P == 0.0 and self.mu.omega_P == 0.0

    def as_dict(self):
        return {"epsilon": self.epsilon.as_dict(), "mu": self.mu.as_dict()}

    @classmethod
    def from_dict(cls, data):
        return cls(DrudeLorentzParams(**data.get("epsilon", {})),
                   DrudeLorentzParams(**data.get("mu", {})))


VACUUM = MaterialModel()


def eval_epsilon(model: MaterialModel, omega):
    """Relative permittivity at (complex) ``omega``.

    On the positive imaginary axis the result is real; ``omega = i u`` is
    handled like any other complex argument.
    """
    value = model.epsilon(omega)
    return _real_on_imaginary_axis(value, omega)


def eval_mu(model: MaterialModel, omega):
    """Relative permeability at (complex) ``omega``."""
    value = model.mu(omega)
    return _real_on_imaginary_axis(value, omega)


def _real_on_imaginary_axis(value, omega):
    omega = np.asarray(omega, dtype=complex)
    on_axis = (omega.real == 0.0)
    if np.any(on_axis):
        value = np.where(on_axis, value.real + 0j, value)
    return value[()] if value.ndim == 0 else value
