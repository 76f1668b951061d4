"""Run configuration: a JSON document with named sections.

Example::

    {
      "material": {"epsilon": {"omega_P": 0.75, "omega_T": 1.0, "gamma": 0.01}},
      "atom": {"omega10": 1.1, "gamma0": 1e-7, "theta": 0.0},
      "geometry": {"z_min": 0.01, "z_max": 1.0, "points": 20, "spacing": "log"},
      "numerics": {"rel_tol": 1e-8},
      "output": {"format": "csv"}
    }

Multilevel atoms use ``"energies"`` plus a ``"transitions"`` list whose
entries give ``upper``, ``lower``, a ``direction`` (optionally
``direction_imag``) and the strength parameter ``gamma0``.
"""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass, field

import numpy as np

from .atom import AtomModel, dipole_from_gamma0, two_level_atom
from .materials import DrudeLorentzParams, MaterialModel
from .quadrature import QuadratureSpec

__all__ = ["ConfigError", "RunConfig", "load_config", "grid"]

_SECTIONS = {"material", "atom", "geometry", "frequency", "dynamics", "numerics", "output"}

_NUMERICS_DEFAULTS = {
    "rel_tol": 1e-8,
    "abs_tol": 1e-300,
    "max_subdivisions": 2000,
    "decay_cutoff": 40.0,
    "dressing_tol": 1e-10,
    "max_iter": 200,
    "include_off_resonant": True,
    "include_free_space": True,
    "isotropic": False,
    "level": 0,
    "frequency_scan_method": "closed-form",
}

_OUTPUT_DEFAULTS = {"path": None, "format": "csv"}


class ConfigError(ValueError):
    """Invalid or inconsistent configuration."""


def grid(section: dict, prefix: str):
    """Points from ``value`` / ``values`` or ``{prefix}_min``, ``{prefix}_max``, ``points``, ``spacing``."""
    if prefix in section:
        return np.array([float(section[prefix])])
    if "values" in section:
        vals = np.asarray(section["values"], float)
        if vals.ndim != 1 or vals.size == 0:
            raise ConfigError(f"'{prefix}' values must be a non-empty list")
        return vals
    try:
        lo = float(section[f"{prefix}_min"])
        hi = float(section[f"{prefix}_max"])
    except KeyError as exc:
        raise ConfigError(f"missing {exc.args[0]!r} (or a single {prefix!r})") from None
    npts = int(section.get("points", 1))
    spacing = section.get("spacing", "linear")
    if npts < 1:
        raise ConfigError("point count must be >= 1")
    if not (0 < lo <= hi):
        raise ConfigError(f"{prefix} range must be positive and ordered")
    if npts == 1:
        return np.array([lo])
    if spacing == "log":
        return np.geomspace(lo, hi, npts)
    if spacing == "linear":
        return np.linspace(lo, hi, npts)
    raise ConfigError(f"unknown spacing {spacing!r}")


def _material(sec: dict) -> MaterialModel:
    try:
        return MaterialModel(DrudeLorentzParams(**sec.get("epsilon", {})),
                             DrudeLorentzParams(**sec.get("mu", {})))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"material: {exc}") from None


def _atom(sec: dict) -> AtomModel:
    try:
        if "energies" not in sec:
            return two_level_atom(float(sec.get("omega10", 1.0)), float(sec.get("gamma0", 1e-7)),
                                  float(sec.get("theta", 0.0)), float(sec.get("phi", 0.0)))
        energies = np.asarray(sec["energies"], float)
        n = energies.size
        dip = np.zeros((n, n, 3), complex)
        for tr in sec.get("transitions", []):
            m, k = int(tr["upper"]), int(tr["lower"])
            vec = np.asarray(tr["direction"], float) + 1j * np.asarray(tr.get("direction_imag", [0, 0, 0]), float)
            norm = np.linalg.norm(vec)
            if norm == 0:
                raise ConfigError("transition direction must be non-zero")
            vec = dipole_from_gamma0(float(tr["gamma0"])) * vec / norm
            dip[m, k] = vec
            dip[k, m] = np.conj(vec)
        return AtomModel(energies, dip)
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise ConfigError(f"atom: {exc}") from None


@dataclass
class RunConfig:
    """Parsed configuration; ``raw`` keeps the JSON document for provenance."""

    raw: dict
    material: MaterialModel
    atom: AtomModel
    spec: QuadratureSpec
    numerics: dict
    output: dict
    geometry: dict = field(default_factory=dict)
    frequency: dict = field(default_factory=dict)
    dynamics: dict = field(default_factory=dict)

    @classmethod
    def from_dict(cls, data: dict, tol=None) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("configuration must be a JSON object")
        unknown = set(data) - _SECTIONS
        if unknown:
            raise ConfigError(f"unknown sections: {sorted(unknown)}")
        raw = copy.deepcopy(data)
        if tol is not None:
            raw.setdefault("numerics", {})["rel_tol"] = float(tol)
        numerics = dict(_NUMERICS_DEFAULTS)
        numerics.update(raw.get("numerics", {}))
        bad = set(numerics) - set(_NUMERICS_DEFAULTS)
        if bad:
            raise ConfigError(f"unknown numerics keys: {sorted(bad)}")
        output = dict(_OUTPUT_DEFAULTS)
        output.update(raw.get("output", {}))
        if output["format"] not in ("csv", "json"):
            raise ConfigError("output format must be 'csv' or 'json'")
        if numerics["frequency_scan_method"] not in ("closed-form", "general"):
            raise ConfigError("frequency_scan_method must be 'closed-form' or 'general'")
        try:
            spec = QuadratureSpec(float(numerics["rel_tol"]), float(numerics["abs_tol"]),
                                  int(numerics["max_subdivisions"]), float(numerics["decay_cutoff"]))
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"numerics: {exc}") from None
        return cls(raw, _material(raw.get("material", {})), _atom(raw.get("atom", {})), spec,
                   numerics, output, raw.get("geometry", {}), raw.get("frequency", {}),
                   raw.get("dynamics", {}))

    def positions(self):
        if not self.geometry:
            raise ConfigError("geometry section required")
        return grid(self.geometry, "z")

    def to_json(self) -> str:
        """Canonical JSON echo of the parsed document."""
        return json.dumps(self.raw, sort_keys=True, separators=(",", ":"))


def load_config(path, tol=None) -> RunConfig:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc}") from None
    return RunConfig.from_dict(data, tol=tol)
