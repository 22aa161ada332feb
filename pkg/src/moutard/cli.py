"""Command-line front end.

    moutard green      [--config C] [--energy E] [--out DIR]
    moutard spectrum   --alpha A ...
    moutard check {dbar,symmetry,omega,seed} --alpha A ...
    moutard create     --alpha A ...
    moutard annihilate --alpha A ...

Every run writes CSV tables and one ``<prefix>_summary.json`` into the
output directory.  Exit codes: 0 all checks pass, 2 invalid configuration,
3 numerical failure, 4 some acceptance check failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fields, thresholds
from .dbar import build_grid, check_dbar, check_symmetries_B, check_symmetries_b, observed_order
from .errors import ConfigError, MoutardError, SeedInvalid
from .green import QuadratureConfig, bessel_reference, green_contour_shift, green_direct
from .omega import (
    IntegrationPath,
    OmegaConstants,
    OmegaKind,
    anchor_for,
    check_omega_gradient,
    omega_closed,
    omega_field,
    omega_integrate,
    pairing,
    standard_path,
)
from .point import B_from_b, B_point, TOL_SING, a_point, b_point, denom, fit_radial_pole_order, singular_circles
from .transform import (
    DEFAULT_Z,
    annihilation_seed,
    moutard_B,
    run_annihilation,
    run_creation,
    vacuum_seed,
    verify_seed,
)

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_CHECK = 0, 2, 3, 4

DEFAULT_LAMBDA_RADII = (0.3, 0.7, 1.5, 3.0)
DEFAULT_LAMBDA_ANGLE = 0.4
DEFAULT_RAYS = (0.0, math.pi / 4, math.pi / 2)
UNIT_TOL = 1e-12

_KNOWN_KEYS = {"energy", "alpha", "grid", "z_samples", "lambda_samples", "rays", "fd_step",
               "quadrature", "omega_mode", "output_dir", "seed_overrides"}
_OMEGA_MODES = {"closed": "closed", "closedform": "closed", "path": "path",
                "pathintegrated": "path"}


@dataclass(frozen=True)
class GridSpec:
    r_min: float = 0.1
    r_max: float = 10.0
    n_radial: int = 24
    n_angular: int = 16


@dataclass(frozen=True)
class RunConfig:
    energy: float = -1.0
    alpha: float | None = None
    grid: GridSpec = field(default_factory=GridSpec)
    z_samples: tuple = DEFAULT_Z
    lambda_samples: tuple = tuple(r * complex(math.cos(DEFAULT_LAMBDA_ANGLE), math.sin(DEFAULT_LAMBDA_ANGLE))
                                  for r in DEFAULT_LAMBDA_RADII)
    rays: tuple = DEFAULT_RAYS
    fd_step: float = thresholds.FD_STEPS[-1]
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    omega_mode: str = "closed"
    output_dir: str = "moutard_out"
    seed_overrides: dict | None = None

    @property
    def fd_steps(self):
        return (4 * self.fd_step, 2 * self.fd_step, self.fd_step)

    def require_alpha(self):
        if self.alpha is None:
            raise ConfigError("alpha: required for this command")
        return self.alpha

    def ff_constants(self):
        if not self.seed_overrides:
            return None
        o = self.seed_overrides
        return OmegaConstants(float(o["c_ff_plus"]), float(o["c_ff_minus"]))

    def grid_for(self, E=None, alpha=None):
        g = self.grid
        return build_grid(g.r_min, g.r_max, g.n_radial, g.n_angular, E, alpha, h_fd=self.fd_steps[0])

    def to_dict(self):
        return {
            "energy": self.energy,
            "alpha": self.alpha,
            "grid": vars(self.grid).copy(),
            "z_samples": [[z.real, z.imag] for z in self.z_samples],
            "lambda_samples": [[v.real, v.imag] for v in self.lambda_samples],
            "rays": list(self.rays),
            "fd_step": self.fd_step,
            "quadrature": {"rel_tol": self.quadrature.rel_tol, "abs_tol": self.quadrature.abs_tol,
                           "max_subdivisions": self.quadrature.max_subdivisions},
            "omega_mode": self.omega_mode,
            "seed_overrides": self.seed_overrides,
        }


def _complex(v):
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    if isinstance(v, bool):
        raise TypeError
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, str):
        return complex(v.replace(" ", ""))
    raise TypeError


def _finite(x):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError
    return x


def parse_config(data: dict) -> RunConfig:
    """Validate a config mapping; all problems are reported together, one per field."""
    if not isinstance(data, dict):
        raise ConfigError("config: expected a JSON object")
    problems = []
    kw = {}
    for key in sorted(set(data) - _KNOWN_KEYS):
        problems.append(f"{key}: unknown field")

    def grab(key, conv, check=None, msg=""):
        if key not in data or data[key] is None:
            return
        try:
            val = conv(data[key])
        except (TypeError, ValueError, KeyError):
            problems.append(f"{key}: {msg or 'invalid value'}")
            return
        if check is not None and not check(val):
            problems.append(f"{key}: {msg}")
            return
        kw[key] = val

    grab("energy", _finite, lambda e: e < 0, "must be a finite real number < 0")
    grab("alpha", _finite, lambda a: a != 0, "must be a finite nonzero real number")
    grab("fd_step", _finite, lambda h: 0 < h < 0.05, "must satisfy 0 < fd_step < 0.05")
    grab("output_dir", str, lambda s: len(s) > 0, "must be a nonempty path")
    grab("z_samples", lambda v: tuple(_complex(z) for z in v),
         lambda zs: len(zs) > 0 and all(z != 0 and np.isfinite(z) for z in zs),
         "must be a nonempty list of nonzero complex numbers ([re, im] pairs)")
    grab("lambda_samples", lambda v: tuple(_complex(z) for z in v),
         lambda ls: len(ls) > 0 and all(z != 0 and np.isfinite(z) for z in ls),
         "must be a nonempty list of nonzero complex numbers ([re, im] pairs)")
    grab("rays", lambda v: tuple(_finite(a) for a in v), lambda r: len(r) > 0,
         "must be a nonempty list of angles")
    grab("omega_mode", lambda v: _OMEGA_MODES[str(v).lower()], None,
         "must be 'closed' (ClosedForm) or 'path' (PathIntegrated)")

    if data.get("grid") is not None:
        g = data["grid"]
        if not isinstance(g, dict) or set(g) - {"r_min", "r_max", "n_radial", "n_angular"}:
            problems.append("grid: expected an object with r_min, r_max, n_radial, n_angular")
        else:
            try:
                spec = GridSpec(**{k: (int(v) if k.startswith("n_") else _finite(v)) for k, v in g.items()})
            except (TypeError, ValueError):
                problems.append("grid: fields must be numbers")
            else:
                if not 0 < spec.r_min < 1 < spec.r_max:
                    problems.append("grid: need 0 < r_min < 1 < r_max")
                elif spec.n_radial < 1 or spec.n_angular < 1:
                    problems.append("grid: n_radial and n_angular must be positive")
                else:
                    kw["grid"] = spec
    if data.get("quadrature") is not None:
        q = data["quadrature"]
        try:
            kw["quadrature"] = QuadratureConfig(**q)
        except (TypeError, ValueError) as exc:
            problems.append(f"quadrature: {exc}")
    if data.get("seed_overrides") is not None:
        o = data["seed_overrides"]
        try:
            ok = isinstance(o, dict) and set(o) == {"c_ff_plus", "c_ff_minus"}
            if ok:
                kw["seed_overrides"] = {k: _finite(v) for k, v in sorted(o.items())}
        except (TypeError, ValueError):
            ok = False
        if not ok:
            problems.append("seed_overrides: expected {\"c_ff_plus\": real, \"c_ff_minus\": real}")
    if problems:
        raise ConfigError("; ".join(problems))
    return RunConfig(**kw)


def load_config(path=None, overrides=None) -> RunConfig:
    data = {}
    if path is not None:
        try:
            with open(path, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"config: cannot read {path}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
        if not isinstance(data, dict):
            raise ConfigError("config: expected a JSON object")
    data = dict(data)
    for k, v in (overrides or {}).items():
        if v is not None:
            data[k] = v
    return parse_config(data)


def thread_count():
    raw = os.environ.get("MOUTARD_THREADS")
    if raw is None or raw == "":
        return os.cpu_count() or 1
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError("MOUTARD_THREADS: must be a positive integer") from None
    if n < 1:
        raise ConfigError("MOUTARD_THREADS: must be a positive integer")
    return n


def _pmap(fn, items):
    """Order-preserving map over at most MOUTARD_THREADS workers."""
    items = list(items)
    n = min(thread_count(), len(items))
    if n <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# -- output ---------------------------------------------------------------

def fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, str):
        return v
    return "%.17g" % float(v)


def csv_text(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    return buf.getvalue()


def _json_safe(v):
    if isinstance(v, dict):
        return {str(k): _json_safe(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_json_safe(x) for x in v]
    if isinstance(v, (bool, np.bool_)):
        return bool(v)
    if isinstance(v, (int, np.integer)):
        return int(v)
    if isinstance(v, (float, np.floating)):
        v = float(v)
        return v if math.isfinite(v) else str(v)
    return v


@dataclass
class OutputRecord:
    command: str
    params: dict
    tables: dict = field(default_factory=dict)     # name -> (header, rows)
    checks: dict = field(default_factory=dict)     # name -> (value, threshold, relation, passed)
    info: dict = field(default_factory=dict)

    def check(self, name, value, threshold, relation="<="):
        value = float(value)
        if relation == "<=":
            ok = value <= threshold
        elif relation == ">=":
            ok = value >= threshold
        elif relation == "in":
            ok = threshold[0] <= value <= threshold[1]
        else:
            raise ValueError(relation)
        self.checks[name] = (value, threshold, relation, bool(ok))
        return ok

    @property
    def passed(self):
        return all(c[3] for c in self.checks.values())

    def summary(self):
        return {
            "command": self.command,
            "params": self.params,
            "tables": [f"{self.command}_{name}.csv" for name in self.tables],
            "checks": {k: {"value": v, "threshold": t, "relation": r, "pass": ok}
                       for k, (v, t, r, ok) in self.checks.items()},
            "info": self.info,
            "passed": self.passed,
        }

    def write(self, out_dir):
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        for name, (header, rows) in self.tables.items():
            (out / f"{self.command}_{name}.csv").write_text(csv_text(header, rows), encoding="utf-8",
                                                           newline="\n")
        text = json.dumps(_json_safe(self.summary()), indent=2, sort_keys=True) + "\n"
        (out / f"{self.command}_summary.json").write_text(text, encoding="utf-8", newline="\n")


# -- commands -------------------------------------------------------------

def cmd_green(cfg: RunConfig) -> OutputRecord:
    rec = OutputRecord("green", cfg.to_dict())
    E = cfg.energy
    jobs = [(lam, z) for lam in cfg.lambda_samples for z in cfg.z_samples]

    def one(job):
        lam, z = job
        return green_direct(z, lam, E, cfg.quadrature), green_contour_shift(z, lam, E, cfg.quadrature)

    results = _pmap(one, jobs)
    on_unit = [abs(abs(lam) - 1.0) <= UNIT_TOL for lam, _ in jobs]
    bessel = any(on_unit)
    header = ["re_lambda", "im_lambda", "abs_z", "arg_z", "g_direct", "g_shift", "err_direct",
              "err_shift", "agree"]
    if bessel:
        header += ["g_bessel", "bessel_rel_err"]
    rows, worst_gap, worst_imag, worst_bessel, n_bad = [], 0.0, 0.0, 0.0, 0
    for (lam, z), (gd, gs), unit in zip(jobs, results, on_unit):
        gap = abs(gd.value - gs.value)
        imag = abs(gd.imag) / (1 + abs(gd.value))
        agree = gap <= gd.est_error + gs.est_error and imag <= 1e-8
        n_bad += not agree
        worst_gap = max(worst_gap, gap / (gd.est_error + gs.est_error))
        worst_imag = max(worst_imag, imag)
        row = [lam.real, lam.imag, abs(z), math.atan2(z.imag, z.real), gd.value, gs.value,
               gd.est_error, gs.est_error, agree]
        if bessel:
            if unit:
                ref = float(bessel_reference(z, E))
                rel = max(abs(gd.value - ref), abs(gs.value - ref)) / abs(ref)
                worst_bessel = max(worst_bessel, rel)
                row += [ref, rel]
            else:
                row += [math.nan, math.nan]
        rows.append(row)
    rec.tables["values"] = (header, rows)
    rec.check("disagreeing_rows", n_bad, 0)
    rec.check("max_gap_over_error_sum", worst_gap, 1.0)
    rec.check("max_imag_rel", worst_imag, 1e-8)
    if bessel:
        rec.check("max_bessel_rel_err", worst_bessel, 1e-6)
    return rec


def _profile_radii(cfg, n_per_cell=8):
    g = cfg.grid
    n = g.n_radial * n_per_cell
    t = (np.arange(n) + 0.5) / n
    return g.r_min * (g.r_max / g.r_min) ** t


def cmd_spectrum(cfg: RunConfig) -> OutputRecord:
    alpha = cfg.require_alpha()
    E = cfg.energy
    rec = OutputRecord("spectrum", cfg.to_dict())
    sing = singular_circles(E, alpha)
    r = _profile_radii(cfg)
    r = r[np.abs(denom(r.astype(complex), E, alpha)) > TOL_SING]
    rows = []
    b = b_point(r.astype(complex), E, alpha)
    mags = [np.abs(B_point(r * np.exp(1j * a), E, alpha)) for a in cfg.rays]
    for i, ri in enumerate(r):
        rows.append([ri, float(np.real(b[i]))] + [m[i] for m in mags])
    rec.tables["profile"] = (["abs_lambda", "b"] + [f"abs_B_ray{j}" for j in range(len(cfg.rays))], rows)
    rec.tables["singular_radii"] = (["radius"], [[x] for x in sing.radii])

    fit_rows = []
    for rs in sing.radii:
        if rs == 1.0:
            continue
        for side in (-1, 1):
            p = fit_radial_pole_order(E, alpha, rs, side=side)
            fit_rows.append([rs, side, p])
            rec.check(f"pole_order_r{rs:.6g}_{'in' if side < 0 else 'out'}", p,
                      thresholds.POLE_ORDER_RANGE, "in")
    rec.tables["pole_fit"] = (["radius", "side", "order"], fit_rows)
    rec.info = {"threshold_energy_mag": sing.threshold_energy_mag, "regular": sing.regular,
                "singular_radii": list(sing.radii), "rays": list(cfg.rays)}
    return rec


def _check_dbar(cfg: RunConfig, rec: OutputRecord):
    E, alpha = cfg.energy, cfg.require_alpha()
    grid = cfg.grid_for(E, alpha)
    hs = cfg.fd_steps
    conv_rows, pts = [], []
    for conj, name in ((False, "psi"), (True, "psi_star")):
        per_h = []
        for h in hs:
            reps = []
            for z in cfg.z_samples:
                f = (fields.point_psi_star if conj else fields.point_psi)(z, E, alpha, cfg.quadrature)
                reps.append(check_dbar(f, fields.point_B(E, alpha), grid, h, conjugate=conj,
                                       keep=h == hs[-1]))
            per_h.append(reps)
        maxima = [max(r.max_abs for r in reps) for reps in per_h]
        order, pair = observed_order(hs, maxima)
        rec.check(f"{name}_dbar_order", order, thresholds.MIN_ORDER, ">=")
        for h, reps in zip(hs, per_h):
            rep = max(reps, key=lambda r: r.max_abs)
            conv_rows.append([name, h, rep.max_abs, rep.rms, rep.relative, rep.n_points, rep.n_skipped])
        for z, rep in zip(cfg.z_samples, per_h[-1]):
            for lam, res in rep.per_point:
                pts.append([name, z.real, z.imag, lam.real, lam.imag, res])
        rec.info[f"{name}_pairwise_orders"] = pair
    rec.tables["convergence"] = (["field", "h", "max_abs", "rms", "relative", "n_points", "n_skipped"],
                                 conv_rows)
    rec.tables["residuals"] = (["field", "re_z", "im_z", "re_lambda", "im_lambda", "residual"], pts)
    rec.info["grid"] = grid.to_dict()


def _check_symmetry(cfg: RunConfig, rec: OutputRecord):
    E, alpha = cfg.energy, cfg.require_alpha()
    grid = cfg.grid_for(E, alpha)
    rB = check_symmetries_B(fields.point_B(E, alpha), grid, keep=True)
    rb = check_symmetries_b(lambda lam: b_point(lam, E, alpha), grid, keep=True)
    lam = grid.points()
    B1, B2 = B_point(lam, E, alpha), B_from_b(lam, E, alpha)
    cons = float(np.max(np.abs(B1 - B2)) / np.max(np.abs(B1)))
    bv = b_point(lam, E, alpha)
    ab = float(np.max(np.abs(a_point(lam, E, alpha) - bv)) / np.max(np.abs(bv)))
    rec.check("B_symmetry_rel", rB.relative, thresholds.SYMMETRY_TOL)
    rec.check("b_symmetry_rel", rb.relative, thresholds.SYMMETRY_TOL)
    rec.check("B_routes_rel", cons, thresholds.CONSISTENCY_TOL)
    rec.check("a_vs_b_rel", ab, thresholds.CONSISTENCY_TOL)
    rows = [["B", lam.real, lam.imag, res] for lam, res in rB.per_point]
    rows += [["b", lam.real, lam.imag, res] for lam, res in rb.per_point]
    rec.tables["residuals"] = (["quantity", "re_lambda", "im_lambda", "residual"], rows)
    rec.info["grid"] = grid.to_dict()


def _loop(lam, anchor, lo):
    """anchor -> lam by the standard path, back radially and along |lambda| = anchor."""
    lam = complex(lam)
    out = list(standard_path(lam, anchor, lower=lo).waypoints)
    phi = math.atan2(lam.imag, lam.real)
    back = list(standard_path(anchor * complex(math.cos(phi), math.sin(phi)), anchor,
                              lower=lo).waypoints)[::-1]
    pts = out + [p for p in back if p != out[-1]]
    dedup = [pts[0]] + [p for prev, p in zip(pts[:-1], pts[1:]) if p != prev]
    return IntegrationPath(tuple(dedup), 0j)


def _check_omega(cfg: RunConfig, rec: OutputRecord):
    E, alpha = cfg.energy, cfg.require_alpha()
    grid = cfg.grid_for(E, alpha)
    hs = cfg.fd_steps
    z = cfg.z_samples[0]
    lam = grid.points()
    conv_rows, path_rows = [], []
    stride = max(1, lam.size // 8)
    sample = lam[::stride][:8]
    for kind in OmegaKind:
        om = omega_field(kind, z, E, alpha, cfg=cfg.quadrature)
        psi, psi_star = pairing(kind, z, E, alpha, cfg.quadrature)
        vals = om(lam)
        imag_rel = float(np.max(np.abs(vals.real)) / max(1.0, float(np.max(np.abs(vals)))))
        rec.check(f"{kind.value}_real_part_rel", imag_rel, thresholds.OMEGA_IMAG_TOL)
        reps = [check_omega_gradient(om, psi, psi_star, grid, h) for h in hs]
        order, _ = observed_order(hs, [r.max_abs for r in reps])
        rec.check(f"{kind.value}_gradient_order", order, thresholds.MIN_ORDER, ">=")
        for h, r in zip(hs, reps):
            conv_rows.append([kind.value, h, r.max_abs, r.relative, r.n_points, r.n_skipped])
        if cfg.omega_mode != "path":
            continue
        worst_inc, worst_loop = 0.0, 0.0

        def one(p, kind=kind, psi=psi, psi_star=psi_star):
            anchor = anchor_for(p, grid)
            lo, _ = grid.component(p)
            base = complex(omega_closed(kind, z, anchor, E, alpha, cfg=cfg.quadrature))
            path = standard_path(p, anchor, 0j, lower=lo)
            inc, est = omega_integrate(psi, psi_star, path, forbidden=grid.exclusions, full_output=True)
            closed = complex(omega_closed(kind, z, p, E, alpha, cfg=cfg.quadrature)) - base
            loop, loop_est = omega_integrate(psi, psi_star, _loop(p, anchor, lo),
                                             forbidden=grid.exclusions, full_output=True)
            return inc, est, closed, loop, loop_est

        for p, (inc, est, closed, loop, loop_est) in zip(sample, _pmap(one, sample)):
            err = abs(inc - closed)
            # the loop floor covers rounding in sums of O(|omega|) size
            floor = 64 * np.finfo(float).eps * (1 + abs(closed) + abs(inc))
            inc_lim = max(thresholds.OMEGA_INCREMENT_TOL, est)
            worst_inc = max(worst_inc, err / inc_lim)
            worst_loop = max(worst_loop, abs(loop) / max(loop_est, floor))
            path_rows.append([kind.value, p.real, p.imag, inc.imag, closed.imag, err, est,
                              abs(loop), loop_est])
        rec.check(f"{kind.value}_increment_err_over_limit", worst_inc, 1.0)
        rec.check(f"{kind.value}_loop_over_estimate", worst_loop, 1.0)
    rec.tables["gradient"] = (["kind", "h", "max_abs", "relative", "n_points", "n_skipped"], conv_rows)
    if cfg.omega_mode == "path":
        rec.tables["path"] = (["kind", "re_lambda", "im_lambda", "im_increment_path",
                               "im_increment_closed", "increment_err", "quad_est", "loop_residual",
                               "loop_est"], path_rows)
    rec.info["grid"] = grid.to_dict()
    rec.info["z"] = [z.real, z.imag]


def _check_seed(cfg: RunConfig, rec: OutputRecord):
    E, alpha = cfg.energy, cfg.require_alpha()
    grid = cfg.grid_for(E, alpha)
    rows = []
    consts = cfg.ff_constants()
    for name, make in (("vacuum", vacuum_seed), ("point_potential", annihilation_seed)):
        seed = make(E, alpha, consts)
        try:
            rep = verify_seed(seed, grid, cfg.fd_step)
        except SeedInvalid as exc:
            rep = exc.report
        rows.append([name, rep.relative, 1e-2])
        rec.check(f"{name}_seed_rel", rep.relative, 1e-2)
    rec.tables["seeds"] = (["seed", "relative_residual", "tolerance"], rows)
    rec.info["grid"] = grid.to_dict()


def cmd_check(cfg: RunConfig, which: str) -> OutputRecord:
    rec = OutputRecord(f"check_{which}", cfg.to_dict())
    {"dbar": _check_dbar, "symmetry": _check_symmetry, "omega": _check_omega,
     "seed": _check_seed}[which](cfg, rec)
    return rec


def _scenario(cfg: RunConfig, creation: bool) -> OutputRecord:
    E, alpha = cfg.energy, cfg.require_alpha()
    name = "create" if creation else "annihilate"
    rec = OutputRecord(name, cfg.to_dict())
    grid = cfg.grid_for(E, alpha)
    run = run_creation if creation else run_annihilation
    consts = cfg.ff_constants()
    try:
        res = run(E, alpha, grid=grid, z_samples=cfg.z_samples, h=cfg.fd_step, hs=cfg.fd_steps,
                  omega_mode=cfg.omega_mode, cfg=cfg.quadrature, ff_constants=consts)
    except SeedInvalid as exc:
        rec.check("seed_relative_residual", exc.report.relative if exc.report else math.inf, 1e-2)
        return rec
    for key, (value, limit, _) in res.checks().items():
        rec.check(key, value, limit, ">=" if key.endswith("order") else "<=")
    seed = (vacuum_seed if creation else annihilation_seed)(E, alpha, consts)
    lam = res.grid.points()
    Bt = moutard_B(seed, lam)
    ref = B_point(lam, E, alpha) if creation else np.zeros_like(Bt)
    resid = np.abs(Bt - ref)
    b_tol = thresholds.CREATION_B_TOL if creation else thresholds.ANNIHILATION_B_TOL
    rec.check("B_tilde_max_abs", float(resid.max()), b_tol * res.residual_B.scale)
    rec.info["components"] = res.components
    rec.info["grid"] = res.grid.to_dict()
    rec.tables["points"] = (["re_lambda", "im_lambda", "re_B_tilde", "im_B_tilde", "re_B_expected",
                             "im_B_expected", "residual_B"],
                            [[l.real, l.imag, b.real, b.imag, r.real, r.imag, e]
                             for l, b, r, e in zip(lam, Bt, ref, resid)])
    rows = [[h, r] for h, r in zip(res.dbar_steps, res.dbar_residuals)]
    rec.tables["dbar_convergence"] = (["h", "max_abs"], rows)
    rec.tables["eigenfunctions"] = (["field", "max_abs", "scale", "n_points"],
                                    [["psi", res.residual_psi.max_abs, res.residual_psi.scale,
                                      res.residual_psi.n_points],
                                     ["psi_star", res.residual_psi_star.max_abs,
                                      res.residual_psi_star.scale, res.residual_psi_star.n_points]])
    return rec


def cmd_create(cfg: RunConfig) -> OutputRecord:
    return _scenario(cfg, True)


def cmd_annihilate(cfg: RunConfig) -> OutputRecord:
    return _scenario(cfg, False)


# -- entry point ----------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON run configuration")
    common.add_argument("--energy", type=float, help="energy E < 0")
    common.add_argument("--alpha", type=float, help="point-potential coupling (nonzero)")
    common.add_argument("--fd-step", type=float, dest="fd_step", help="finest relative FD step")
    common.add_argument("--out", dest="output_dir", help="output directory")
    p = argparse.ArgumentParser(prog="moutard", description=__doc__.split("\n")[0])
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("green", "spectrum", "create", "annihilate"):
        sub.add_parser(name, parents=[common])
    chk = sub.add_parser("check", parents=[common])
    chk.add_argument("which", choices=["dbar", "symmetry", "omega", "seed"])
    return p


def run(argv=None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_CONFIG
    overrides = {k: getattr(args, k) for k in ("energy", "alpha", "fd_step", "output_dir")}
    try:
        cfg = load_config(args.config, overrides)
        thread_count()
        if args.command == "check":
            rec = cmd_check(cfg, args.which)
        else:
            rec = {"green": cmd_green, "spectrum": cmd_spectrum, "create": cmd_create,
                   "annihilate": cmd_annihilate}[args.command](cfg)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (MoutardError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    rec.write(cfg.output_dir)
    for k, (v, t, rel, ok) in rec.checks.items():
        print(f"{'PASS' if ok else 'FAIL'} {k}: {fmt(v)} {rel} {t}", file=stdout)
    return EXIT_OK if rec.passed else EXIT_CHECK


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
