"""Closed forms for the two-dimensional point potential at the origin.

Everything is driven by the real function

    denom(lam) = |ln(lam conj(lam))| + ln|E| - 4 pi / alpha,

which is related to the scattering-amplitude form through
1 - (alpha/2pi) ln(|Re k| + |Im k|) = -(alpha/4pi) denom.  Its zero set
consists of the singular circles of the dbar-data B.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, NonConvergence, SingularPoint
from .green import DEFAULT_QUAD, GreenMethod, QuadratureConfig, green, green_shift_values
from .spectral import (
    as_lambda,
    check_energy,
    k_from_lambda,
    plane_wave,
    re_im_norm,
    sign_domain,
)

TOL_SING = 1e-8


def check_alpha(alpha) -> float:
    if alpha is None:
        raise DomainError("coupling alpha is required")
    alpha = float(alpha)
    if alpha == 0 or not math.isfinite(alpha):
        raise DomainError("coupling alpha must be finite and nonzero (alpha = 0 is the vacuum)")
    return alpha


def denom(lam, E, alpha):
    lam = as_lambda(lam)
    E, alpha = check_energy(E), check_alpha(alpha)
    # ln(lam conj lam) taken as 2 ln|lam|: no complex-log branch
    return 2.0 * np.abs(np.log(np.abs(lam))) + math.log(-E) - 4.0 * math.pi / alpha


def amplitude_denom(lam, E, alpha):
    """1 - (alpha/2pi) ln(|Re k| + |Im k|), computed from k_E(lam)."""
    alpha = check_alpha(alpha)
    return 1.0 - alpha / (2 * math.pi) * np.log(re_im_norm(k_from_lambda(E, lam)))


def _checked_denom(lam, E, alpha):
    d = denom(lam, E, alpha)
    if np.any(np.abs(d) < TOL_SING):
        raise SingularPoint("lambda lies on a singular circle of the point potential")
    return d


def b_point(lam, E, alpha):
    """Scattering amplitude b_{0,alpha}(k_E(lam)); real and radial."""
    _checked_denom(lam, E, alpha)
    return alpha / (4 * math.pi ** 2) / amplitude_denom(lam, E, alpha)


def B_point(lam, E, alpha):
    """dbar-data of the point potential from its closed form."""
    lam = as_lambda(lam)
    d = _checked_denom(lam, E, alpha)
    return -sign_domain(lam) / np.conj(lam) / d


def B_from_b(lam, E, alpha):
    """dbar-data through pi sign(|lam|^2 - 1) / conj(lam) * b."""
    lam = as_lambda(lam)
    return math.pi * sign_domain(lam) / np.conj(lam) * b_point(lam, E, alpha)


def a_point(lam, E, alpha):
    return -1.0 / math.pi / _checked_denom(lam, E, alpha)


def psi_point(z, lam, E, alpha, cfg: QuadratureConfig = DEFAULT_QUAD):
    """Faddeev eigenfunction: plane wave minus 4 pi G / denom."""
    d = _checked_denom(lam, E, alpha)
    return plane_wave(z, lam, E) - 4 * math.pi * green_shift_values(z, lam, E, cfg) / d


def psi_point_scattering_form(z, lam, E, alpha, cfg: QuadratureConfig = DEFAULT_QUAD,
                              method=GreenMethod.DIRECT):
    """Scalar evaluation as exp(ikx)[1 + c g(x,k)], c = alpha / (1 - (alpha/2pi) ln(|Re k|+|Im k|)).

    With the default direct Green quadrature this is independent of ``psi_point``.
    """
    lam = complex(as_lambda(lam))
    _checked_denom(lam, E, alpha)
    c = check_alpha(alpha) / amplitude_denom(lam, E, alpha)
    ev = green(z, lam, E, cfg, method)
    pw = plane_wave(z, lam, E)
    g = ev.value / pw
    return pw * (1 + c * g)


def psi_star_point(z, lam, E, alpha, cfg: QuadratureConfig = DEFAULT_QUAD):
    lam = as_lambda(lam)
    d = _checked_denom(lam, E, alpha)
    inv_pw = plane_wave(z, -lam, E)
    return 1j / lam * (inv_pw - 4 * math.pi * green_shift_values(z, -lam, E, cfg) / d)


def a_from_limit(lam, E, alpha, cfg: QuadratureConfig = DEFAULT_QUAD, radii=None, tol=1e-6):
    """lim_{|x|->0} (2 pi ln|x|)^{-1} psi, via the log-slope of psi averaged over four directions."""
    lam = complex(as_lambda(lam))
    if radii is None:
        radii = 10.0 ** -np.arange(1.0, 6.0)
    radii = np.asarray(radii, dtype=float)
    dirs = np.array([1, 1j, -1, -1j])
    mean_psi = np.array([np.mean(psi_point(r * dirs, lam, E, alpha, cfg)) for r in radii])
    slopes = np.diff(mean_psi) / np.diff(np.log(radii)) / (2 * math.pi)
    scale = max(1.0, abs(slopes[-1]))
    if abs(slopes[-1] - slopes[-2]) > tol * scale:
        raise NonConvergence(f"small-|x| limit did not stabilize: {slopes}")
    return slopes[-1]


@dataclass(frozen=True)
class SingularSet:
    radii: tuple
    threshold_energy_mag: float

    @property
    def regular(self) -> bool:
        return not self.radii


def singular_circles(E, alpha, tol=1e-12) -> SingularSet:
    """Radii where denom vanishes: exp(+-s/2), s = 4pi/alpha - ln|E|."""
    E, alpha = check_energy(E), check_alpha(alpha)
    c = 4 * math.pi / alpha
    s = c - math.log(-E)
    thresh = math.exp(c)
    if abs(s) <= tol * max(1.0, abs(c)):
        return SingularSet((1.0,), thresh)
    if s < 0:
        return SingularSet((), thresh)
    return SingularSet((math.exp(-0.5 * s), math.exp(0.5 * s)), thresh)


def fit_radial_pole_order(E, alpha, radius, angle=0.3, offsets=None, side=1):
    """Least-squares slope p of log|B| against -log| |lam| - radius | along a ray."""
    if offsets is None:
        offsets = radius * 10.0 ** -np.arange(3.0, 6.5, 0.5)
    offsets = np.asarray(offsets, dtype=float)
    lam = (radius + side * offsets) * np.exp(1j * angle)
    mag = np.abs(B_point(lam, E, alpha))
    slope = np.polyfit(np.log(offsets), np.log(mag), 1)[0]
    return float(-slope)
