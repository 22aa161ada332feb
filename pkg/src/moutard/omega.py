"""Moutard potentials omega_{psi,psi*}: imaginary-valued with

    d/d lam omega = psi psi*,   d/d(conj lam) omega = -conj(psi psi*).

Closed forms for the six pairings used in the creation and annihilation
scenarios, path integration of the exact differential, and gradient checks.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import fields
from .dbar import AnnulusGrid, H_FD, LambdaField, ResidualReport, d_fd, dbar_fd
from .errors import NonConvergence, PathError
from .green import DEFAULT_QUAD, QuadratureConfig, green_shift_values
from .point import a_point, check_alpha, denom
from .spectral import as_lambda, check_energy, sign_domain


class OmegaKind(enum.Enum):
    FF_CREATION = "ff_creation"
    PSIF_CREATION = "psif_creation"
    FPSISTAR_CREATION = "fpsistar_creation"
    FF_ANNIHILATION = "ff_annihilation"
    PSIF_ANNIHILATION = "psif_annihilation"
    FPSISTAR_ANNIHILATION = "fpsistar_annihilation"

    @property
    def creation(self) -> bool:
        return self.value.endswith("_creation")


@dataclass(frozen=True)
class OmegaConstants:
    """Real integration constants (inside, outside the unit circle)."""

    plus: float = 0.0
    minus: float = 0.0

    def pick(self, lam):
        r = np.abs(lam)
        return np.where(r < 1.0, self.plus, self.minus) if np.ndim(r) else (
            self.plus if r < 1.0 else self.minus)


def default_constants(kind: OmegaKind, alpha=None) -> OmegaConstants:
    """Constants that reproduce the point potential (creation) or the vacuum (annihilation)."""
    if kind is OmegaKind.FF_CREATION:
        c = 4 * math.pi / check_alpha(alpha)
        return OmegaConstants(c, c)
    return OmegaConstants()


def omega_closed(kind, z, lam, E, alpha=None, constants: OmegaConstants | None = None,
                 cfg: QuadratureConfig = DEFAULT_QUAD):
    kind = OmegaKind(kind)
    lam = as_lambda(lam)
    E = check_energy(E)
    if constants is None:
        constants = default_constants(kind, alpha)
    c = constants.pick(lam)
    if kind is OmegaKind.FF_CREATION:
        return 1j * (2 * np.abs(np.log(np.abs(lam))) + math.log(-E)) - 1j * c
    if kind is OmegaKind.PSIF_CREATION:
        return 4j * math.pi * green_shift_values(z, lam, E, cfg) + 1j * c
    if kind is OmegaKind.FPSISTAR_CREATION:
        return 4j * math.pi * sign_domain(lam) * green_shift_values(z, -lam, E, cfg) + 1j * c
    d = denom(lam, E, alpha)
    if kind is OmegaKind.FF_ANNIHILATION:
        # additive constant taken imaginary so that omega stays imaginary-valued
        return 1j / math.pi * a_point(lam, E, alpha) + 1j * c
    if kind is OmegaKind.PSIF_ANNIHILATION:
        return -4j * green_shift_values(z, lam, E, cfg) / d + 1j * c
    return -4j * sign_domain(lam) * green_shift_values(z, -lam, E, cfg) / d + 1j * c


def omega_field(kind, z, E, alpha=None, constants=None, cfg=DEFAULT_QUAD) -> LambdaField:
    kind = OmegaKind(kind)
    return LambdaField(lambda lam: omega_closed(kind, z, lam, E, alpha, constants, cfg),
                       f"omega[{kind.value}]")


def pairing(kind, z, E, alpha=None, cfg=DEFAULT_QUAD):
    """The (psi, psi*) fields whose omega the closed form of ``kind`` represents."""
    kind = OmegaKind(kind)
    if kind is OmegaKind.FF_CREATION:
        return fields.vacuum_f(), fields.vacuum_f_star()
    if kind is OmegaKind.PSIF_CREATION:
        return fields.plane_wave_field(z, E), fields.vacuum_f_star()
    if kind is OmegaKind.FPSISTAR_CREATION:
        return fields.vacuum_f(), fields.inverse_plane_wave_star(z, E)
    if kind is OmegaKind.FF_ANNIHILATION:
        return fields.point_f(E, alpha), fields.point_f_star(E, alpha)
    if kind is OmegaKind.PSIF_ANNIHILATION:
        return fields.point_psi(z, E, alpha, cfg), fields.point_f_star(E, alpha)
    return fields.point_f(E, alpha), fields.point_psi_star(z, E, alpha, cfg)


@dataclass(frozen=True)
class IntegrationPath:
    waypoints: tuple
    base_value: complex = 0j

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise PathError("a path needs at least two waypoints")
        b = complex(self.base_value)
        if abs(b.real) > 1e-12 * (1 + abs(b)):
            raise PathError("base value of omega must be purely imaginary")


def _segment_radius_range(a, b):
    d = b - a
    if d == 0:
        return abs(a), abs(a)
    t = min(1.0, max(0.0, -(np.conj(a) * d).real / abs(d) ** 2))
    return abs(a + t * d), max(abs(a), abs(b))


def validate_path(path: IntegrationPath, forbidden=((1.0, 0.0),)):
    """Raise PathError if a segment meets the origin or a forbidden band (center, half-width)."""
    pts = [complex(p) for p in path.waypoints]
    for a, b in zip(pts[:-1], pts[1:]):
        lo, hi = _segment_radius_range(a, b)
        if lo <= 0:
            raise PathError("path passes through lambda = 0")
        for c, hw in forbidden:
            if lo <= c + hw and hi >= c - hw:
                raise PathError(f"segment {a} -> {b} crosses the circle |lambda| = {c}")


_GL10 = np.polynomial.legendre.leggauss(10)


def _segment_integral(psi, psi_star, a, b, n_panels):
    u, w = _GL10
    edges = np.linspace(0.0, 1.0, n_panels + 1)
    t = (0.5 * (edges[:-1, None] + edges[1:, None]) + 0.5 * np.diff(edges)[:, None] * u).ravel()
    wt = (0.5 * np.diff(edges)[:, None] * w).ravel()
    d = b - a
    lam = a + d * t
    pp = psi(lam) * psi_star(lam)
    return np.sum(wt * (pp * d - np.conj(pp) * np.conj(d)))


def omega_integrate(psi, psi_star, path: IntegrationPath, n_panels=4, tol=1e-11,
                    forbidden=((1.0, 0.0),), max_doublings=8, full_output=False):
    """base_value + int_path (psi psi* d lam - conj(psi psi*) d conj(lam)).

    Each segment uses composite 10-point Gauss-Legendre; panels are doubled
    until two successive results agree to ``tol`` (relative to 1 + |result|).
    """
    validate_path(path, forbidden)
    pts = [complex(p) for p in path.waypoints]
    total, est = complex(path.base_value), 0.0
    for a, b in zip(pts[:-1], pts[1:]):
        n = n_panels
        prev = _segment_integral(psi, psi_star, a, b, n)
        for _ in range(max_doublings):
            n *= 2
            cur = _segment_integral(psi, psi_star, a, b, n)
            diff = abs(cur - prev)
            prev = cur
            if diff <= tol * (1 + abs(cur)):
                break
        else:
            raise NonConvergence(f"path integral on segment {a} -> {b} did not converge")
        total += prev
        est += diff
    return (total, est) if full_output else total


def anchor_for(lam, grid: AnnulusGrid | None = None):
    """Base point on the positive real axis in the same component as lam (2 in D-, 1/2 in D+)."""
    r = abs(complex(lam))
    pref = 2.0 if r > 1 else 0.5
    if grid is None:
        return pref
    lo, hi = grid.component(lam)
    if lo < pref < hi:
        return pref
    hi_eff = hi if math.isfinite(hi) else max(grid.r_max, r) * 1.5
    lo_eff = lo if lo > 0 else min(grid.r_min, r) / 1.5
    return math.sqrt(lo_eff * hi_eff)


def standard_path(lam, anchor, base_value=0j, lower=0.0, max_step=math.pi / 32) -> IntegrationPath:
    """Anchor -> |lam| along the real axis, then chords along the circle |lambda| = |lam|.

    Chord count is raised until the chords stay above ``lower`` (the inner
    edge of the component).
    """
    lam = complex(lam)
    r, phi = abs(lam), math.atan2(lam.imag, lam.real)
    n = max(1, math.ceil(abs(phi) / max_step))
    while lower > 0 and r * math.cos(0.5 * abs(phi) / n) <= lower * (1 + 1e-9):
        n *= 2
    arc = [r * np.exp(1j * phi * j / n) for j in range(1, n + 1)]
    arc[-1] = lam
    pts = [complex(anchor)]
    for p in [complex(r)] + arc:
        if p != pts[-1]:
            pts.append(p)
    if len(pts) == 1:
        pts.append(lam)
    return IntegrationPath(tuple(pts), base_value)


def omega_by_path(psi, psi_star, lam, grid: AnnulusGrid, base_fn, n_panels=4, tol=1e-11):
    """omega at lam from the closed-form value ``base_fn(anchor)`` at its component anchor."""
    anchor = anchor_for(lam, grid)
    lo, _ = grid.component(lam)
    base = complex(base_fn(anchor))
    base = 1j * base.imag
    path = standard_path(lam, anchor, base, lower=lo)
    return omega_integrate(psi, psi_star, path, n_panels, tol, forbidden=grid.exclusions)


def check_omega_gradient(omega: LambdaField, psi: LambdaField, psi_star: LambdaField,
                         grid: AnnulusGrid, h=H_FD, keep=False) -> ResidualReport:
    """Finite-difference residuals of d omega = psi psi* and dbar omega = -conj(psi psi*)."""
    lam, skipped = grid.valid_points(h)
    if lam.size == 0:
        return ResidualReport(0.0, 0.0, 0, h, skipped)
    step = h * np.abs(lam)
    pp = psi(lam) * psi_star(lam)
    r1 = d_fd(omega, lam, step) - pp
    r2 = dbar_fd(omega, lam, step) + np.conj(pp)
    res = np.maximum(np.abs(r1), np.abs(r2))
    return ResidualReport.from_residuals(res, h, skipped, float(np.max(np.abs(pp))), lam, keep)
