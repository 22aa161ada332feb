"""Moutard-type transform for the conjugate pair dbar psi = B conj psi, dbar psi* = -conj(B) conj psi*.

Given a seed (f, f*) solving the pair and omega_{f,f*}:

    B~    = B + f conj(f*) / omega_{f,f*}
    psi~  = psi  - omega_{psi,f*} / omega_{f,f*} * f
    psi*~ = psi* - omega_{f,psi*} / omega_{f,f*} * f*

``run_creation`` starts from the vacuum and must produce the point potential;
``run_annihilation`` starts from the point potential and must return the vacuum.
D+ and D- are treated as separate domains sharing equal integration constants.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from . import fields, thresholds
from .dbar import (
    AnnulusGrid,
    LambdaField,
    ResidualReport,
    band_half_width,
    build_grid,
    check_dbar,
    check_dbar_pair,
    observed_order,
)
from .errors import DivisionByZeroOmega, SeedInvalid
from .green import DEFAULT_QUAD, QuadratureConfig
from .omega import OmegaKind, check_omega_gradient, omega_by_path, omega_closed, omega_field, pairing
from .point import B_point, psi_point, singular_circles
from .spectral import check_energy, plane_wave

DEFAULT_Z = (1 + 0.5j, -0.7 + 0.3j, 0.4 - 1.1j)
OMEGA_ZERO_REL = 1e-10


@dataclass(frozen=True)
class MoutardSeed:
    B: LambdaField
    f: LambdaField
    f_star: LambdaField
    omega_ff: LambdaField
    label: str = ""


def vacuum_seed(E, alpha, constants=None) -> MoutardSeed:
    return MoutardSeed(fields.vacuum_B(), fields.vacuum_f(), fields.vacuum_f_star(),
                       omega_field(OmegaKind.FF_CREATION, None, E, alpha, constants), "vacuum")


def annihilation_seed(E, alpha, constants=None) -> MoutardSeed:
    return MoutardSeed(fields.point_B(E, alpha), fields.point_f(E, alpha),
                       fields.point_f_star(E, alpha),
                       omega_field(OmegaKind.FF_ANNIHILATION, None, E, alpha, constants),
                       "point potential")


def _omega_ff(seed: MoutardSeed, lam):
    w = seed.omega_ff(lam)
    f, fs = seed.f(lam), seed.f_star(lam)
    if np.any(np.abs(w) < OMEGA_ZERO_REL * (1 + np.abs(f * fs))):
        raise DivisionByZeroOmega("omega_{f,f*} vanishes (created/removed singular circle)")
    return w, f, fs


def moutard_B(seed: MoutardSeed, lam):
    lam = np.asarray(lam, dtype=complex)
    w, f, fs = _omega_ff(seed, lam)
    return seed.B(lam) + f * np.conj(fs) / w


def moutard_psi(seed: MoutardSeed, psi, omega_psi_fstar, lam):
    lam = np.asarray(lam, dtype=complex)
    w, f, _ = _omega_ff(seed, lam)
    return psi(lam) - omega_psi_fstar(lam) / w * f


def moutard_psi_star(seed: MoutardSeed, psi_star, omega_f_psistar, lam):
    lam = np.asarray(lam, dtype=complex)
    w, _, fs = _omega_ff(seed, lam)
    return psi_star(lam) - omega_f_psistar(lam) / w * fs


def transformed_B(seed):
    return LambdaField(lambda lam: moutard_B(seed, lam), f"M[{seed.label}]B")


def transformed_psi(seed, psi, omega_psi_fstar):
    return LambdaField(lambda lam: moutard_psi(seed, psi, omega_psi_fstar, lam), f"M[{seed.label}]psi")


def transformed_psi_star(seed, psi_star, omega_f_psistar):
    return LambdaField(lambda lam: moutard_psi_star(seed, psi_star, omega_f_psistar, lam),
                       f"M[{seed.label}]psi*")


def verify_seed(seed: MoutardSeed, grid: AnnulusGrid, h=1e-3, tol=1e-2) -> ResidualReport:
    """Relative residuals of dbar f = B conj f, dbar f* = -conj(B) conj f* and of the omega gradient.

    Raises SeedInvalid when the worst relative residual exceeds ``tol``.
    """
    reports = {
        "f": check_dbar(seed.f, seed.B, grid, h),
        "f_star": check_dbar(seed.f_star, seed.B, grid, h, conjugate=True),
        "omega_ff": check_omega_gradient(seed.omega_ff, seed.f, seed.f_star, grid, h),
    }
    worst = max(reports, key=lambda k: reports[k].relative)
    rel = reports[worst].relative
    n = reports["omega_ff"].n_points
    out = ResidualReport(rel, rel, n, h, reports["omega_ff"].n_skipped, 1.0)
    if not rel <= tol:
        raise SeedInvalid(f"seed '{seed.label}' fails {worst} check: relative residual {rel:.3e}", out)
    return out


def with_singular_bands(grid: AnnulusGrid, radii, h_fd=1e-2) -> AnnulusGrid:
    """Add exclusion bands at ``radii`` if the grid does not already carry them."""
    have = {round(c, 12) for c, _ in grid.exclusions}
    extra = tuple((r, band_half_width(r, h_fd)) for r in radii if round(r, 12) not in have)
    if not extra:
        return grid
    return replace(grid, exclusions=tuple(sorted(grid.exclusions + extra)))


def default_grid(E, alpha, h_max=thresholds.FD_STEPS[0]) -> AnnulusGrid:
    return build_grid(0.1, 10.0, 24, 16, E, alpha, h_fd=h_max)


@dataclass
class ScenarioResult:
    residual_B: ResidualReport
    residual_psi: ResidualReport
    residual_psi_star: ResidualReport
    residual_transformed_dbar: ResidualReport
    grid: AnnulusGrid
    params: dict
    dbar_steps: tuple = ()
    dbar_residuals: tuple = ()
    seed_report: ResidualReport | None = None
    components: dict = field(default_factory=dict)

    @property
    def dbar_order(self) -> float:
        return observed_order(self.dbar_steps, self.dbar_residuals)[0]

    def checks(self) -> dict:
        """name -> (value, threshold, passed); comparisons are relative to the report scale."""
        b_tol = (thresholds.CREATION_B_TOL if self.params["scenario"] == "creation"
                 else thresholds.ANNIHILATION_B_TOL)
        out = {}

        def add(name, value, limit, ok):
            out[name] = (float(value), float(limit), bool(ok))

        add("B_tilde_max_rel", self.residual_B.relative, b_tol, self.residual_B.relative <= b_tol)
        for name, rep in (("psi", self.residual_psi), ("psi_star", self.residual_psi_star)):
            val = rep.max_abs / max(1.0, rep.scale)
            add(f"{name}_tilde_max_rel", val, thresholds.PSI_TOL, val <= thresholds.PSI_TOL)
        order = self.dbar_order
        add("transformed_dbar_order", order, thresholds.MIN_ORDER, order >= thresholds.MIN_ORDER)
        return out

    def passed(self) -> bool:
        return all(ok for _, _, ok in self.checks().values())


def _component_split(lam):
    return {"D+": np.abs(lam) < 1, "D-": np.abs(lam) > 1}


def _compare(values, reference, lam, h=0.0):
    scale = float(np.max(np.abs(reference))) if np.size(reference) else 1.0
    return ResidualReport.from_residuals(values - reference, h, 0, scale, lam)


def _path_field(kind, z, E, alpha, grid, cfg):
    psi, psi_star = pairing(kind, z, E, alpha, cfg)

    def base(anchor):
        return omega_closed(kind, z, anchor, E, alpha, cfg=cfg)

    def ev(lam):
        lam = np.asarray(lam, dtype=complex)
        flat = [omega_by_path(psi, psi_star, p, grid, base) for p in lam.ravel()]
        return np.array(flat, dtype=complex).reshape(lam.shape)

    return LambdaField(ev, f"omega_path[{kind.value}]")


def _run(scenario, E, alpha, grid, z_samples, h, hs, omega_mode, cfg, verify, constants=None):
    E = check_energy(E)
    creation = scenario == "creation"
    hs = tuple(sorted(set(hs or thresholds.FD_STEPS) | {h}, reverse=True))
    if grid is None:
        grid = default_grid(E, alpha, hs[0])
    grid = with_singular_bands(grid, singular_circles(E, alpha).radii)
    make_seed = vacuum_seed if creation else annihilation_seed
    seed = make_seed(E, alpha, constants)
    seed_report = verify_seed(seed, grid, h) if verify else None

    lam = grid.points()
    kinds = ((OmegaKind.PSIF_CREATION, OmegaKind.FPSISTAR_CREATION) if creation
             else (OmegaKind.PSIF_ANNIHILATION, OmegaKind.FPSISTAR_ANNIHILATION))
    B_ref = B_point(lam, E, alpha)
    if omega_mode == "path":
        seed = replace(seed, omega_ff=_path_field(
            OmegaKind.FF_CREATION if creation else OmegaKind.FF_ANNIHILATION, None, E, alpha, grid, cfg))
    Bt = moutard_B(seed, lam)
    res_B = _compare(Bt, B_ref if creation else np.zeros_like(Bt), lam)
    if not creation:
        res_B = replace(res_B, scale=float(np.max(np.abs(B_ref))))

    psi_reports, star_reports, dbar_by_h = [], [], {hh: [] for hh in hs}
    comp = {name: {"B": 0.0, "psi": 0.0, "psi_star": 0.0} for name in ("D+", "D-")}
    for name, mask in _component_split(lam).items():
        if mask.any():
            comp[name]["B"] = float(np.max(np.abs(Bt[mask] - (B_ref[mask] if creation else 0))))

    closed_seed = make_seed(E, alpha, constants)
    for z in z_samples:
        if creation:
            psi, psi_star = fields.plane_wave_field(z, E), fields.inverse_plane_wave_star(z, E)
            psi_ref = psi_point(z, lam, E, alpha, cfg)
            star_ref = 1j / lam * psi_point(z, -lam, E, alpha, cfg)
        else:
            psi, psi_star = fields.point_psi(z, E, alpha, cfg), fields.point_psi_star(z, E, alpha, cfg)
            psi_ref = plane_wave(z, lam, E)
            star_ref = 1j / lam * plane_wave(z, -lam, E)
        om_psi = omega_field(kinds[0], z, E, alpha, cfg=cfg)
        om_star = omega_field(kinds[1], z, E, alpha, cfg=cfg)
        if omega_mode == "path":
            om_psi_eval = _path_field(kinds[0], z, E, alpha, grid, cfg)
            om_star_eval = _path_field(kinds[1], z, E, alpha, grid, cfg)
        else:
            om_psi_eval, om_star_eval = om_psi, om_star
        pt = moutard_psi(seed, psi, om_psi_eval, lam)
        pst = moutard_psi_star(seed, psi_star, om_star_eval, lam)
        psi_reports.append(_compare(pt, psi_ref, lam))
        star_reports.append(_compare(pst, star_ref, lam))
        for name, mask in _component_split(lam).items():
            if mask.any():
                comp[name]["psi"] = max(comp[name]["psi"], float(np.max(np.abs(pt - psi_ref)[mask])))
                comp[name]["psi_star"] = max(comp[name]["psi_star"],
                                             float(np.max(np.abs(pst - star_ref)[mask])))

        # finite-difference check of the transformed pair always uses closed-form omega
        Bt_field = transformed_B(closed_seed)
        pt_field = transformed_psi(closed_seed, psi, om_psi)
        pst_field = transformed_psi_star(closed_seed, psi_star, om_star)
        for hh in hs:
            r1, r2 = check_dbar_pair(pt_field, pst_field, Bt_field, grid, hh)
            dbar_by_h[hh].append(r1 if r1.max_abs >= r2.max_abs else r2)

    merged = {hh: ResidualReport.merge(dbar_by_h[hh]) for hh in hs}
    params = {"scenario": scenario, "E": E, "alpha": float(alpha), "z_samples": list(z_samples),
              "h": h, "omega_mode": omega_mode}
    return ScenarioResult(
        residual_B=res_B,
        residual_psi=ResidualReport.merge(psi_reports),
        residual_psi_star=ResidualReport.merge(star_reports),
        residual_transformed_dbar=merged[h],
        grid=grid,
        params=params,
        dbar_steps=hs,
        dbar_residuals=tuple(merged[hh].max_abs for hh in hs),
        seed_report=seed_report,
        components=comp,
    )


def run_creation(E, alpha, grid: AnnulusGrid | None = None, z_samples=DEFAULT_Z,
                 h=thresholds.FD_STEPS[-1], hs=None, omega_mode="closed",
                 cfg: QuadratureConfig = DEFAULT_QUAD, verify=True,
                 ff_constants=None) -> ScenarioResult:
    """Vacuum -> point potential with omega_{f,f*} constants 4 pi / alpha and the others zero.

    ``ff_constants`` (an OmegaConstants) overrides the omega_{f,f*} constants.
    """
    return _run("creation", E, alpha, grid, z_samples, h, hs, omega_mode, cfg, verify, ff_constants)


def run_annihilation(E, alpha, grid: AnnulusGrid | None = None, z_samples=DEFAULT_Z,
                     h=thresholds.FD_STEPS[-1], hs=None, omega_mode="closed",
                     cfg: QuadratureConfig = DEFAULT_QUAD, verify=True,
                  ff_constants=None) -> ScenarioResult:
    """Point potential -> vacuum with all integration constants zero.

    ``ff_constants`` (an OmegaConstants) overrides the omega_{f,f*} constants.
    """
    return _run("annihilation", E, alpha, grid, z_samples, h, hs, omega_mode, cfg, verify, ff_constants)


def round_trip_B(E, alpha, grid: AnnulusGrid | None = None) -> ResidualReport:
    """Feed the dbar-data created from the vacuum into the annihilation seed; result must vanish."""
    if grid is None:
        grid = default_grid(E, alpha)
    created = transformed_B(vacuum_seed(E, alpha))
    seed = replace(annihilation_seed(E, alpha), B=created, label="created point potential")
    lam = grid.points()
    out = moutard_B(seed, lam)
    rep = ResidualReport.from_residuals(out, 0.0, 0, float(np.max(np.abs(created(lam)))), lam)
    return rep


__all__ = [
    "DEFAULT_Z", "MoutardSeed", "ScenarioResult", "annihilation_seed", "default_grid",
    "moutard_B", "moutard_psi", "moutard_psi_star", "round_trip_B", "run_annihilation",
    "run_creation", "transformed_B", "transformed_psi", "transformed_psi_star", "vacuum_seed",
    "verify_seed", "with_singular_bands",
]
