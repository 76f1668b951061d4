"""Command-line driver for material, Green-tensor, potential, force and dynamics scans.

Every subcommand reads a JSON configuration (``--config`` or the
``CPFORCE_CONFIG`` environment variable) and writes one table. CSV output
starts with ``#`` lines echoing the toolkit version and the configuration,
followed by a header row; numbers are written with 17 significant digits.

Exit codes: 0 success, 2 configuration error, 3 numerical failure (the rows
computed so far are still written, with the failure in the ``status`` column).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__
from .atom import AtomModel, two_level_atom
from .config import ConfigError, RunConfig, grid, load_config
from .dynamics import (DressingError, LevelDressing, closed_form_force, closed_form_width,
                       density_matrix_series, force_breakdown, force_components,
                       short_distance_dressing, short_distance_force, solve_dressing, widths_only)
from .green import HalfSpace, green_components
from .materials import PoleError, eval_epsilon, eval_mu
from .perturbative import normalized_energy, perturbative_force_parts, vdw_potential
from .quadrature import ConvergenceError

__all__ = ["main", "build_parser", "run_command", "COMMANDS"]

ENV_CONFIG = "CPFORCE_CONFIG"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3

_NUMERICAL_ERRORS = (ConvergenceError, PoleError, DressingError, ArithmeticError)


# ---------------------------------------------------------------------------
# per-point workers (module level so that they can be sent to worker processes)


def _material_row(cfg: RunConfig, omega):
    eps = complex(eval_epsilon(cfg.material, omega))
    mu = complex(eval_mu(cfg.material, omega))
    return [omega.real, omega.imag, eps.real, eps.imag, mu.real, mu.imag]


def _green_row(cfg: RunConfig, point):
    z, omega = point
    geom = HalfSpace(z, cfg.material)
    (gxx, gzz), e1 = green_components(geom, omega, "coincident", cfg.spec)
    (dxx, dzz, axz), e2 = green_components(geom, omega, "gradient", cfg.spec)
    (c,), e3 = green_components(geom, omega, "curl", cfg.spec)
    err = float(max(np.max(e1), np.max(e2), np.max(e3)))
    vals = [gxx, gzz, dxx, dzz, axz, c]
    return [z, omega.real, omega.imag] + [p for v in vals for p in (v.real, v.imag)] + [err]


def _potential_row(cfg: RunConfig, z):
    geom = HalfSpace(z, cfg.material)
    level = int(cfg.numerics["level"])
    res = vdw_potential(cfg.atom, level, geom, cfg.spec, bool(cfg.numerics["isotropic"]))
    norm = float(normalized_energy(res.total, cfg.atom, cfg.material.mu.omega_T))
    return [z, res.total, norm, res.off_resonant, res.resonant, res.quadrature_error]


def _dress(cfg: RunConfig, atom, geom):
    return solve_dressing(atom, geom, cfg.spec,
                          include_off_resonant=bool(cfg.numerics["include_off_resonant"]),
                          include_free_space=bool(cfg.numerics["include_free_space"]),
                          tol=float(cfg.numerics["dressing_tol"]),
                          max_iter=int(cfg.numerics["max_iter"]))


def _force_row(cfg: RunConfig, z):
    geom = HalfSpace(z, cfg.material)
    level = int(cfg.numerics["level"])
    dressing = _dress(cfg, cfg.atom, geom)
    fc = force_components(cfg.atom, dressing, geom, cfg.spec, level, level)
    f_or, f_r = perturbative_force_parts(cfg.atom, level, geom, cfg.spec,
                                         bool(cfg.numerics["isotropic"]))
    parts = [fc.el_or[2].real, fc.el_r[2].real, fc.mag_or[2].real, fc.mag_r[2].real]
    return [z, sum(parts)] + parts + [f_or + f_r, dressing.shifts[level], dressing.widths[level]]


def _frequency_geometry(cfg: RunConfig):
    geo = cfg.geometry
    if "z_over_lambda" in geo:
        lam = 2.0 * np.pi / cfg.material.epsilon.omega_T
        return float(geo["z_over_lambda"]) * lam
    z = grid(geo, "z")
    if z.size != 1:
        raise ConfigError("frequency-scan needs a single position")
    return float(z[0])


def _two_level_for(cfg: RunConfig, omega10):
    sec = cfg.raw.get("atom", {})
    if "energies" in sec:
        raise ConfigError("frequency-scan needs the two-level atom parameters")
    return two_level_atom(omega10, float(sec.get("gamma0", 1e-7)),
                          float(sec.get("theta", 0.0)), float(sec.get("phi", 0.0)))


def _frequency_row(cfg: RunConfig, omega10):
    z = _frequency_geometry(cfg)
    geom = HalfSpace(z, cfg.material)
    atom = _two_level_for(cfg, omega10)
    d2 = float(np.vdot(atom.dipoles[1, 0], atom.dipoles[1, 0]).real)
    lam = 2.0 * np.pi / cfg.material.epsilon.omega_T
    scale = lam**4 * 16.0 * np.pi * 1e-9 / (3.0 * d2)
    if cfg.numerics["frequency_scan_method"] == "closed-form":
        dressing = short_distance_dressing(atom, geom)
        f_non = short_distance_force(atom, dressing, geom)
        f_pert = closed_form_force(atom, geom, omega10)
        f_shift = closed_form_force(atom, geom, dressing.omega_tilde[1, 0])
        g_bare = closed_form_width(atom, geom, omega10)
        f_broad = closed_form_force(atom, geom, omega10 + 0.5j * g_bare)
    else:
        dressing = _dress(cfg, atom, geom)
        f_non = force_components(atom, dressing, geom, cfg.spec, 1, 1).el_r[2].real
        f_pert = perturbative_force_parts(atom, 1, geom, cfg.spec)[1]
        shift_only = LevelDressing(z, dressing.omega_tilde, dressing.shifts, dressing.partial_shifts,
                                   np.zeros(2), np.zeros((2, 2)))
        f_shift = force_components(atom, shift_only, geom, cfg.spec, 1, 1).el_r[2].real
        broad = widths_only(atom, geom, cfg.spec, bool(cfg.numerics["include_free_space"]))
        f_broad = force_components(atom, broad, geom, cfg.spec, 1, 1).el_r[2].real
    row = [omega10, dressing.omega_tilde[1, 0], dressing.widths[1], f_non, f_pert, f_shift, f_broad,
           scale]
    return row, ";".join(dressing.flags)


_WORKERS = {
    "material-eval": _material_row,
    "green-eval": _green_row,
    "potential-scan": _potential_row,
    "force-scan": _force_row,
    "frequency-scan": _frequency_row,
}


def _evaluate(args):
    """Run one scan point; returns ``(values, status)``."""
    command, raw, tol, point = args
    cfg = RunConfig.from_dict(raw, tol=tol)
    try:
        out = _WORKERS[command](cfg, point)
    except _NUMERICAL_ERRORS as exc:
        return None, f"error: {type(exc).__name__}: {exc}"
    if isinstance(out, tuple):
        values, flags = out
        return values, flags or "ok"
    return out, "ok"


# ---------------------------------------------------------------------------
# command setup


def _frequencies(cfg: RunConfig):
    sec = cfg.frequency
    if "complex_values" in sec:
        return [complex(re, im) for re, im in sec["complex_values"]]
    vals = grid(sec, "omega")
    axis = sec.get("axis", "real")
    if axis == "real":
        return [complex(v) for v in vals]
    if axis == "imaginary":
        return [1j * v for v in vals]
    raise ConfigError(f"unknown frequency axis {axis!r}")


def _columns_and_points(command: str, cfg: RunConfig):
    if command == "material-eval":
        cols = ["omega_re", "omega_im", "eps_re", "eps_im", "mu_re", "mu_im"]
        return cols, _frequencies(cfg)
    if command == "green-eval":
        cols = ["z", "omega_re", "omega_im"]
        for name in ("G_xx", "G_zz", "dzG_xx", "dzG_zz", "dxG_xz", "curlG_yx"):
            cols += [f"{name}_re", f"{name}_im"]
        cols.append("quad_error")
        pts = [(float(z), w) for z in cfg.positions() for w in _frequencies(cfg)]
        return cols, pts
    if command == "potential-scan":
        cols = ["z", "U_raw", "U_normalized", "U_or", "U_r", "quad_error"]
        return cols, [float(z) for z in cfg.positions()]
    if command == "force-scan":
        cols = ["z", "F_z_total", "F_z_el_or", "F_z_el_r", "F_z_mag_or", "F_z_mag_r",
                "F_z_perturbative", "shift", "width"]
        return cols, [float(z) for z in cfg.positions()]
    if command == "frequency-scan":
        _frequency_geometry(cfg)
        cols = ["omega10", "omega_tilde10", "Gamma1", "F_r_nonpert", "F_r_pert",
                "F_r_shift_only", "F_r_broadening_only", "force_scale"]
        return cols, [float(w) for w in grid(cfg.frequency, "omega10")]
    raise ConfigError(f"unknown command {command!r}")


def _leading(command, point):
    """Input coordinates written into a failed row."""
    if command == "material-eval":
        return [point.real, point.imag]
    if command == "green-eval":
        return [point[0], point[1].real, point[1].imag]
    return [point]


def _initial_sigma(cfg: RunConfig, n: int) -> np.ndarray:
    sec = cfg.dynamics
    init = sec.get("initial", "excited")
    sigma = np.zeros((n, n), complex)
    if init == "excited":
        sigma[n - 1, n - 1] = 1.0
    elif init == "ground":
        sigma[0, 0] = 1.0
    elif init == "superposition":
        a, b = sec.get("levels", [0, n - 1])
        phase = np.exp(1j * float(sec.get("phase", 0.0)))
        sigma[a, a] = sigma[b, b] = 0.5
        sigma[a, b] = 0.5 * np.conj(phase)
        sigma[b, a] = 0.5 * phase
    elif init == "matrix":
        sigma = np.asarray(sec["sigma"], float) + 1j * np.asarray(sec.get("sigma_imag", np.zeros((n, n))), float)
        if sigma.shape != (n, n):
            raise ConfigError("dynamics sigma has the wrong shape")
    else:
        raise ConfigError(f"unknown initial state {init!r}")
    return sigma


def _run_dynamics(cfg: RunConfig):
    atom: AtomModel = cfg.atom
    n = atom.n_levels
    z = cfg.positions()
    if z.size != 1:
        raise ConfigError("dynamics needs a single position")
    geom = HalfSpace(float(z[0]), cfg.material)
    cols = ["t"] + [f"sigma_{m}{m}" for m in range(n)]
    for m in range(n):
        for k in range(m + 1, n):
            cols += [f"re_sigma_{m}{k}", f"im_sigma_{m}{k}"]
    cols += ["F_z_total", "F_z_el_or", "F_z_el_r", "F_z_mag_or", "F_z_mag_r"]
    sigma0 = _initial_sigma(cfg, n)
    try:
        dressing = _dress(cfg, atom, geom)
        sec = cfg.dynamics
        npts = int(sec.get("points", 11))
        if "t_max" in sec:
            t_max = float(sec["t_max"])
        else:
            gmax = float(np.max(dressing.widths))
            if gmax <= 0:
                raise ConfigError("t_max required when every width vanishes")
            t_max = float(sec.get("t_max_lifetimes", 10.0)) / gmax
        if npts < 1 or t_max < 0:
            raise ConfigError("dynamics needs points >= 1 and t_max >= 0")
        times = np.linspace(0.0, t_max, npts)
        try:
            series = density_matrix_series(dressing, sigma0, times)
        except ValueError as exc:
            raise ConfigError(f"dynamics: {exc}") from None
        fb = force_breakdown(atom, dressing, geom, cfg.spec)
    except _NUMERICAL_ERRORS as exc:
        return cols, [], f"error: {type(exc).__name__}: {exc}"
    rows = []
    for t, s in zip(times, series):
        w = fb.weighted(s)
        vals = [t] + [s[m, m].real for m in range(n)]
        for m in range(n):
            for k in range(m + 1, n):
                vals += [s[m, k].real, s[m, k].imag]
        vals += [w[key][2].real for key in ("total", "el_or", "el_r", "mag_or", "mag_r")]
        rows.append((vals, "ok"))
    return cols, rows, None


def run_command(command: str, cfg: RunConfig, jobs: int = 1, tol=None):
    """Evaluate ``command``; returns ``(columns, rows, error)`` with rows ``(values, status)``."""
    if command == "dynamics":
        return _run_dynamics(cfg)
    cols, points = _columns_and_points(command, cfg)
    tasks = [(command, cfg.raw, None, p) for p in points]
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_evaluate, tasks))
    else:
        results = [_evaluate(t) for t in tasks]
    rows, error = [], None
    for p, (values, status) in zip(points, results):
        if values is None:
            lead = _leading(command, p)
            values = lead + [np.nan] * (len(cols) - len(lead))
            error = error or status
        rows.append((values, status))
    return cols, rows, error


# ---------------------------------------------------------------------------
# output


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    return "%.17g" % float(v)


def format_csv(command, cfg: RunConfig, cols, rows) -> str:
    lines = [f"# cpforce {__version__}", f"# command: {command}", f"# config: {cfg.to_json()}",
             ",".join(cols + ["status"])]
    for values, status in rows:
        lines.append(",".join([_fmt(v) for v in values] + [status]))
    return "\n".join(lines) + "\n"


def format_json(command, cfg: RunConfig, cols, rows) -> str:
    def clean(v):
        v = float(v)
        return v if np.isfinite(v) else None

    doc = {"version": __version__, "command": command, "config": cfg.raw,
           "columns": cols + ["status"],
           "rows": [[clean(v) for v in values] + [status] for values, status in rows]}
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


COMMANDS = ("material-eval", "green-eval", "potential-scan", "force-scan", "frequency-scan", "dynamics")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cpforce", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cpforce {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", help=f"JSON config (default: ${ENV_CONFIG})")
        p.add_argument("--out", help="output path (default: output.path or stdout)")
        p.add_argument("--tol", type=float, help="override numerics.rel_tol")
        p.add_argument("--format", choices=("csv", "json"), help="override output.format")
        p.add_argument("--jobs", type=int, default=1, help="worker processes for scans")
    return parser


def _error(kind, message):
    sys.stderr.write(json.dumps({"error": kind, "message": str(message)}) + "\n")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    path = args.config or os.environ.get(ENV_CONFIG)
    try:
        if not path:
            raise ConfigError(f"no config given (use --config or ${ENV_CONFIG})")
        if args.jobs < 1:
            raise ConfigError("--jobs must be >= 1")
        cfg = load_config(path, tol=args.tol)
        cols, rows, error = run_command(args.command, cfg, jobs=args.jobs)
    except ConfigError as exc:
        _error("config", exc)
        return EXIT_CONFIG
    fmt = args.format or cfg.output["format"]
    text = (format_csv if fmt == "csv" else format_json)(args.command, cfg, cols, rows)
    out = args.out or cfg.output.get("path")
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if error:
        _error("numerical", error)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
