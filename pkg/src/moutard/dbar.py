"""Finite-difference dbar operators, annulus grids and residual checkers.

Convention: d/d(conj lam) = (d/d Re lam + i d/d Im lam) / 2 and
d/d lam = (d/d Re lam - i d/d Im lam) / 2.

Grid-level checkers take a *relative* step ``h``: the stencil at lam uses
h * |lam|, since grids span decades in |lam|.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import ConfigError, StencilError
from .point import singular_circles

H_FD = 1e-3
BAND_REL = 1e-2


@dataclass(frozen=True)
class LambdaField:
    """A complex field over the lambda plane at fixed z, E, alpha (vectorized)."""

    func: Callable
    label: str = ""

    def __call__(self, lam):
        return self.func(lam)


@dataclass(frozen=True)
class ResidualReport:
    max_abs: float
    rms: float
    n_points: int
    h: float
    n_skipped: int = 0
    scale: float = 1.0
    per_point: Optional[list] = None

    @property
    def relative(self) -> float:
        return self.max_abs / self.scale if self.scale > 0 else self.max_abs

    @classmethod
    def from_residuals(cls, residuals, h=0.0, n_skipped=0, scale=1.0, lam=None, keep=False):
        res = np.abs(np.asarray(residuals, dtype=complex)).ravel()
        if res.size == 0:
            return cls(0.0, 0.0, 0, h, n_skipped, float(scale))
        per = None
        if keep and lam is not None:
            per = list(zip(np.asarray(lam).ravel().tolist(), res.tolist()))
        return cls(float(res.max()), float(np.sqrt(np.mean(res ** 2))), int(res.size), h,
                   n_skipped, float(scale), per)

    @staticmethod
    def merge(reports):
        """Combine reports computed on disjoint point sets (same h)."""
        reports = list(reports)
        n = sum(r.n_points for r in reports)
        if n == 0:
            return ResidualReport(0.0, 0.0, 0, reports[0].h if reports else 0.0,
                                  sum(r.n_skipped for r in reports))
        ms = sum(r.rms ** 2 * r.n_points for r in reports) / n
        return ResidualReport(max(r.max_abs for r in reports), math.sqrt(ms), n, reports[0].h,
                              sum(r.n_skipped for r in reports), max(r.scale for r in reports))


@dataclass(frozen=True)
class AnnulusGrid:
    """Log-uniform radii (cell midpoints) times uniform angles, minus exclusion bands.

    ``h_max`` is the largest relative FD step the grid serves: points whose
    stencil at that step would reach a band are dropped, so every h <= h_max
    sees the same point set.
    """

    r_min: float
    r_max: float
    n_radial: int
    n_angular: int
    exclusions: tuple = field(default_factory=tuple)
    h_max: float = 0.0

    def radii(self):
        t = (np.arange(self.n_radial) + 0.5) / self.n_radial
        return self.r_min * (self.r_max / self.r_min) ** t

    def angles(self):
        return 2 * math.pi * (np.arange(self.n_angular) + 0.5) / self.n_angular

    def all_points(self):
        return (self.radii()[:, None] * np.exp(1j * self.angles())[None, :]).ravel()

    def excluded(self, lam):
        r = np.abs(np.asarray(lam))
        out = np.zeros(r.shape, dtype=bool)
        for c, hw in self.exclusions:
            out |= np.abs(r - c) <= hw
        return out

    def stencil_ok(self, lam, h):
        """True where the whole radial range [|lam| - h|lam|, |lam| + h|lam|] avoids every band."""
        r = np.abs(np.asarray(lam))
        lo, hi = r * (1 - h), r * (1 + h)
        ok = lo > 0
        for c, hw in self.exclusions:
            ok &= (hi < c - hw) | (lo > c + hw)
        return ok

    def points(self):
        lam = self.all_points()
        ok = ~self.excluded(lam)
        if self.h_max > 0:
            ok &= self.stencil_ok(lam, self.h_max)
        return lam[ok]

    def valid_points(self, h):
        """Grid points with a usable stencil at relative step h, and the count of skipped ones."""
        lam = self.all_points()
        ok = self.stencil_ok(lam, max(h, self.h_max))
        return lam[ok], int(lam.size - ok.sum())

    def band_edges(self):
        edges = sorted((c - hw, c + hw) for c, hw in self.exclusions)
        return edges

    def component(self, lam):
        """(inner, outer) radial bounds of the annulus component containing lam."""
        r = abs(complex(lam))
        lo, hi = 0.0, math.inf
        for a, b in self.band_edges():
            if a <= r <= b:
                raise StencilError(f"|lambda| = {r} lies in an excluded band")
            if b < r:
                lo = max(lo, b)
            if a > r:
                hi = min(hi, a)
        return lo, hi

    def to_dict(self):
        return {"r_min": self.r_min, "r_max": self.r_max, "n_radial": self.n_radial,
                "n_angular": self.n_angular, "h_max": self.h_max,
                "exclusions": [[c, hw] for c, hw in self.exclusions]}


def band_half_width(radius, h_fd=H_FD, band_rel=BAND_REL):
    return max(10 * h_fd * radius, band_rel * radius)


def build_grid(r_min, r_max, n_radial, n_angular, E=None, alpha=None, h_fd=H_FD,
               band_rel=BAND_REL) -> AnnulusGrid:
    """Annulus grid with bands at |lam| = 1 and at the singular circles of (E, alpha)."""
    if not (0 < r_min < 1 < r_max):
        raise ConfigError("need 0 < r_min < 1 < r_max")
    if n_radial < 1 or n_angular < 1:
        raise ConfigError("grid sizes must be positive")
    centers = [1.0]
    if alpha is not None:
        centers += list(singular_circles(E, alpha).radii)
    centers = sorted(set(centers))
    bands = tuple((c, band_half_width(c, h_fd, band_rel)) for c in centers)
    grid = AnnulusGrid(float(r_min), float(r_max), int(n_radial), int(n_angular), bands, float(h_fd))
    if grid.points().size == 0:
        raise ConfigError("exclusion bands cover the whole grid")
    return grid


def _stencil(lam, h):
    return lam + h, lam - h, lam + 1j * h, lam - 1j * h


def _check_stencil(lam, h, grid):
    if grid is not None:
        ok = grid.stencil_ok(lam, np.asarray(h) / np.abs(lam))
        if not np.all(ok):
            raise StencilError("finite-difference stencil touches an excluded band")


def dbar_fd(field, lam, h, grid: AnnulusGrid | None = None):
    """Central second-order d/d(conj lam) with absolute step h."""
    lam = np.asarray(lam, dtype=complex)
    _check_stencil(lam, h, grid)
    fp, fm, fip, fim = (field(p) for p in _stencil(lam, h))
    return 0.5 * ((fp - fm) / (2 * h) + 1j * (fip - fim) / (2 * h))


def d_fd(field, lam, h, grid: AnnulusGrid | None = None):
    """Central second-order d/d lam with absolute step h."""
    lam = np.asarray(lam, dtype=complex)
    _check_stencil(lam, h, grid)
    fp, fm, fip, fim = (field(p) for p in _stencil(lam, h))
    return 0.5 * ((fp - fm) / (2 * h) - 1j * (fip - fim) / (2 * h))


def check_dbar(psi, B, grid: AnnulusGrid, h=H_FD, conjugate=False, keep=False) -> ResidualReport:
    """Residual of dbar psi = B conj(psi) (or dbar psi* = -conj(B) conj(psi*) when ``conjugate``)."""
    lam, skipped = grid.valid_points(h)
    if lam.size == 0:
        return ResidualReport(0.0, 0.0, 0, h, skipped)
    lhs = dbar_fd(psi, lam, h * np.abs(lam))
    vals = psi(lam)
    b = B(lam)
    rhs = -np.conj(b) * np.conj(vals) if conjugate else b * np.conj(vals)
    # dbar psi scales like psi / lam; use that when the right-hand side vanishes (B = 0)
    scale = max(float(np.max(np.abs(rhs))), float(np.max(np.abs(vals / lam))))
    return ResidualReport.from_residuals(lhs - rhs, h, skipped, scale, lam, keep)


def check_dbar_pair(psi, psi_star, B, grid: AnnulusGrid, h=H_FD, keep=False):
    """Residual reports for the conjugate pair dbar psi = B conj psi, dbar psi* = -conj(B) conj psi*."""
    return (check_dbar(psi, B, grid, h, conjugate=False, keep=keep),
            check_dbar(psi_star, B, grid, h, conjugate=True, keep=keep))


def _partner_mask(grid, lam):
    p = 1.0 / np.conj(lam)
    return ~grid.excluded(p)


def check_symmetries_B(B, grid: AnnulusGrid, keep=False) -> ResidualReport:
    """B(1/conj lam) = -lam^2 conj B(lam) and B(-1/conj lam) = |lam|^2 B(lam)."""
    lam = grid.points()
    mask = _partner_mask(grid, lam)
    lam, skipped = lam[mask], int((~mask).sum())
    p = 1.0 / np.conj(lam)
    b = B(lam)
    r1 = np.abs(B(p) + lam ** 2 * np.conj(b))
    r2 = np.abs(B(-p) - lam * np.conj(lam) * b)
    scale = float(np.max(np.abs(b))) if b.size else 1.0
    return ResidualReport.from_residuals(np.maximum(r1, r2), 0.0, skipped, scale, lam, keep)


def check_symmetries_b(b, grid: AnnulusGrid, radial=True, keep=False) -> ResidualReport:
    """b(1/conj lam) = conj b(lam), b(-1/conj lam) = b(lam); radial case adds b(lam) = b(|lam|) real."""
    lam = grid.points()
    mask = _partner_mask(grid, lam)
    lam, skipped = lam[mask], int((~mask).sum())
    p = 1.0 / np.conj(lam)
    v = np.asarray(b(lam), dtype=complex)
    res = np.maximum(np.abs(b(p) - np.conj(v)), np.abs(b(-p) - v))
    if radial:
        res = np.maximum(res, np.abs(v - b(np.abs(lam).astype(complex))))
        res = np.maximum(res, np.abs(v - np.conj(v)))
    scale = float(np.max(np.abs(v))) if v.size else 1.0
    return ResidualReport.from_residuals(res, 0.0, skipped, scale, lam, keep)


def observed_order(hs, residuals):
    """Least-squares slope of log(residual) against log(h), plus the pairwise orders."""
    hs = np.asarray(hs, dtype=float)
    res = np.asarray(residuals, dtype=float)
    if np.any(res <= 0):
        return math.inf, [math.inf] * (len(hs) - 1)
    slope = float(np.polyfit(np.log(hs), np.log(res), 1)[0])
    pair = [float(np.log(res[i] / res[i + 1]) / np.log(hs[i] / hs[i + 1])) for i in range(len(hs) - 1)]
    return slope, pair
