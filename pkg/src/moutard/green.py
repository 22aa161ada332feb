"""Faddeev Green function G(z, lam, E) = exp(i k x) g(x, k) at negative energy.

Two independent evaluators are provided.

``green_direct``
    Integrates the defining Fourier integral of g in polar xi-coordinates.
    The Jacobian cancels the zero of the denominator at xi = 0, so for every
    direction e(theta) the radial integral is

        F(u, w) = int_0^inf exp(i rho u) / (rho + w) d rho,
        u = x.e,  w = 2 k.e,

    which has a closed form in the complex exponential integral E1 (with a
    2*pi*i branch correction when Re w < 0 and Im w < 0).  The remaining
    angular integral is done adaptively, with breakpoints at the log
    singularities (u = 0, w -> 0) and at the jump where w crosses the
    negative real axis.

``green_contour_shift``
    Shifts the integration contour by Im k.  The classical resolvent
    -(1/2pi) K0(sqrt|E| |x|) remains, plus the contribution of the poles of
    1/(eta^2 + |E|) crossed on the way, which after rotating lam onto the
    positive axis (G(z e^{i phi}, lam e^{i phi}) = G(z, lam)) is

        (1/2pi) int_0^beta cos(t x2) exp(-x1 q) / q dt,
        q = sqrt(t^2 + |E|),  beta = sqrt|E| | |lam| - 1/|lam| | / 2.

    The integrand is smooth on a finite interval; it is integrated with
    nested Gauss-Legendre rules and an adaptive fallback.  This evaluator is
    vectorized and is the one used by the rest of the package.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, special

from .errors import DomainError, NonConvergence
from .spectral import (
    as_lambda,
    check_energy,
    k_from_lambda,
    plane_wave,
    sign_domain,
)

_EPS = np.finfo(float).eps
_GL_LO = np.polynomial.legendre.leggauss(48)
_GL_HI = np.polynomial.legendre.leggauss(96)


class GreenMethod(enum.Enum):
    DIRECT = "direct"
    SHIFT = "shift"


@dataclass(frozen=True)
class QuadratureConfig:
    rel_tol: float = 1e-8
    abs_tol: float = 1e-10
    max_subdivisions: int = 400

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


DEFAULT_QUAD = QuadratureConfig()


@dataclass(frozen=True)
class GreenEval:
    value: float
    method: GreenMethod
    est_error: float
    imag: float = 0.0

    def is_real(self) -> bool:
        return abs(self.imag) <= max(10 * self.est_error, 1e-8) * (1 + abs(self.value))


def _check_z(z):
    if np.any(np.asarray(z) == 0):
        raise DomainError("G is logarithmically singular at z = 0")


def _bessel_term(z, E):
    return -special.k0(math.sqrt(-E) * np.abs(z)) / (2 * math.pi)


def _rotated(z, lam):
    """Coordinates of z in the frame where lam is real positive."""
    r = np.abs(lam)
    zr = z * np.conj(lam) / r
    return r, np.real(zr), np.imag(zr)


def _gl(nodes_weights, x1, x2, beta, s):
    u, w = nodes_weights
    t = 0.5 * beta[..., None] * (u + 1.0)
    q = np.sqrt(t * t + s * s)
    f = np.cos(t * x2[..., None]) * np.exp(-x1[..., None] * q) / q
    half = 0.5 * beta
    return half * (f @ w), half * (np.abs(f) @ w)


def _correction_quad(x1, x2, beta, s, cfg):
    eps_abs, eps_rel = 0.1 * cfg.abs_tol, 0.1 * cfg.rel_tol
    if abs(x2) * beta > 20 * math.pi:
        # many periods of cos(t x2): integrate the smooth factor against the cosine weight
        def smooth(t):
            q = math.sqrt(t * t + s * s)
            return math.exp(-x1 * q) / q

        return integrate.quad(smooth, 0.0, beta, weight="cos", wvar=x2, epsabs=eps_abs,
                              epsrel=eps_rel, limit=cfg.max_subdivisions)[:2]

    def f(t):
        q = math.sqrt(t * t + s * s)
        return math.cos(t * x2) * math.exp(-x1 * q) / q

    return integrate.quad(f, 0.0, beta, epsabs=eps_abs, epsrel=eps_rel, limit=cfg.max_subdivisions)[:2]


def green_shift_values(z, lam, E, cfg: QuadratureConfig = DEFAULT_QUAD, with_error=False):
    """Vectorized contour-shift evaluation of G; broadcasts ``z`` against ``lam``."""
    E = check_energy(E)
    lam = as_lambda(lam)
    _check_z(z)
    z, lam = np.broadcast_arrays(np.asarray(z, dtype=complex), np.asarray(lam, dtype=complex))
    shape = z.shape
    z, lam = z.ravel(), lam.ravel()
    s = math.sqrt(-E)
    r, x1, x2 = _rotated(z, lam)
    beta = 0.5 * s * np.abs(r - 1.0 / r)
    base = _bessel_term(z, E)

    with np.errstate(over="ignore", invalid="ignore"):  # overflow is reported below
        lo, _ = _gl(_GL_LO, x1, x2, beta, s)
        corr, hi_abs = _gl(_GL_HI, x1, x2, beta, s)
    err = np.abs(corr - lo)
    tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(corr)) * 2 * math.pi
    for i in np.flatnonzero(err > tol):
        v, e = _correction_quad(x1[i], x2[i], beta[i], s, cfg)
        if not e <= max(tol[i], cfg.rel_tol * abs(v) * 2 * math.pi):
            raise NonConvergence(f"contour-shift correction did not converge at z={z[i]}, lam={lam[i]}")
        corr[i], err[i] = v, e
    value = (base + corr / (2 * math.pi)).reshape(shape)
    if not np.all(np.isfinite(value)):
        raise NonConvergence("contour-shift value overflows double precision")
    if not with_error:
        return value[()] if value.ndim == 0 else value
    est = ((err + 64 * _EPS * hi_abs) / (2 * math.pi) + 64 * _EPS * np.abs(base)).reshape(shape)
    if value.ndim == 0:
        return value[()], est[()]
    return value, est


def green_contour_shift(z, lam, E, cfg: QuadratureConfig = DEFAULT_QUAD) -> GreenEval:
    value, est = green_shift_values(complex(z), complex(lam), E, cfg, with_error=True)
    return GreenEval(float(value), GreenMethod.SHIFT, float(est))


def _exp_e1(sigma):
    """exp(sigma) E1(sigma) by its continued fraction; used where exp(sigma) would overflow."""
    tiny = 1e-300
    f = sigma + 1.0
    c, d = f, 0.0
    for n in range(1, 5000):
        b = sigma + 2 * n + 1
        a = -float(n * n)
        d = b + a * d
        d = 1.0 / (d if d != 0 else tiny)
        c = b + a / (c if c != 0 else tiny)
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            return 1.0 / f
    raise NonConvergence(f"continued fraction for exp(s) E1(s) did not converge at s={sigma}")


def _radial_integral(u, w):
    """int_0^inf exp(i rho u) / (rho + w) d rho for real u != 0."""
    if u < 0:
        return np.conj(_radial_integral(-u, np.conj(w)))
    sigma = -1j * u * w
    branch = w.real < 0 and w.imag < 0
    if abs(sigma) > 500:
        # exp(sigma) and E1(sigma) separately over/underflow here
        out = _exp_e1(sigma)
        return out + 2j * math.pi * np.exp(sigma) if branch else out
    val = special.exp1(sigma)
    if branch:
        val += 2j * math.pi
    return np.exp(sigma) * val


def green_direct(z, lam, E, cfg: QuadratureConfig = DEFAULT_QUAD) -> GreenEval:
    """Polar-coordinate quadrature of the defining Fourier integral."""
    E = check_energy(E)
    lam = complex(as_lambda(lam))
    z = complex(z)
    _check_z(z)
    k = k_from_lambda(E, lam)
    kvec = np.array([k.k1, k.k2])
    x = np.array([z.real, z.imag])
    with np.errstate(over="ignore"):
        phase = complex(np.exp(1j * (kvec @ x)))

    def integrand(theta):
        e = np.array([math.cos(theta), math.sin(theta)])
        u = float(x @ e)
        if u == 0.0:
            u = 1e-300
        return _radial_integral(u, complex(2 * (kvec @ e)))

    two_pi = 2 * math.pi
    arg_x = math.atan2(x[1], x[0])
    kI = kvec.imag
    arg_k = math.atan2(kI[1], kI[0])
    base_pts = [(a + d) % two_pi for a in (arg_x, arg_k) for d in (0.5 * math.pi, -0.5 * math.pi)]
    # near |lam| = 1 the pole crossing at w ~ 0 is a feature of angular width ~ |Re k| / |Im k|;
    # below 1e-12 it is rounding noise of an on-circle lam and contributes nothing
    width = np.linalg.norm(kvec.real) / np.linalg.norm(kI)
    if 1e-12 < width < 1e-2:
        for a in base_pts[2:]:
            d = width
            while d < 0.1:
                base_pts += [(a + d) % two_pi, (a - d) % two_pi]
                d *= 8.0
    pts = sorted(set(base_pts))
    pts = [p for p in pts if 0.0 < p < two_pi]

    if not np.isfinite(phase):
        raise NonConvergence(f"exp(ikx) overflows double precision at z={z}, lam={lam}")
    # target absolute accuracy on G, mapped back through the prefactor
    scale = abs(phase) / (4 * math.pi ** 2)
    epsabs = max(cfg.abs_tol / scale, 1e-15) if scale > 0 else 1e-15
    parts = []
    for fn in (lambda t: integrand(t).real, lambda t: integrand(t).imag):
        res = integrate.quad(fn, 0.0, two_pi, points=pts, limit=max(cfg.max_subdivisions, len(pts) + 1),
                             epsabs=0.5 * epsabs, epsrel=0.5 * cfg.rel_tol, full_output=1)
        val, err = res[0], res[1]
        if len(res) > 3 and err > max(epsabs, cfg.rel_tol * abs(val)):
            raise NonConvergence(f"angular quadrature failed at z={z}, lam={lam}: {res[3]}")
        parts.append((val, err))
    (re, e_re), (im, e_im) = parts
    G = -phase * complex(re, im) / (4 * math.pi ** 2)
    est = scale * (e_re + e_im) + 256 * _EPS * (abs(G) + scale * (abs(re) + abs(im)))
    return GreenEval(G.real, GreenMethod.DIRECT, est, G.imag)


def green(z, lam, E, cfg: QuadratureConfig = DEFAULT_QUAD, method=GreenMethod.SHIFT) -> GreenEval:
    if GreenMethod(method) is GreenMethod.DIRECT:
        return green_direct(z, lam, E, cfg)
    return green_contour_shift(z, lam, E, cfg)


def bessel_reference(z, E):
    """-(1/2pi) K0(sqrt|E| |z|): the value of G on the unit circle |lam| = 1."""
    return _bessel_term(np.asarray(z, dtype=complex), check_energy(E))


def dbar_green_exact(z, lam, E):
    """Closed-form d/d(conj lam) of G off the unit circle."""
    s = math.sqrt(-check_energy(E))
    lam = as_lambda(lam)
    lb = np.conj(lam)
    return sign_domain(lam) / (4 * math.pi * lb) * np.exp(-0.5 * s * (lb * z + np.conj(z) / lb))


def check_dbar_green(z, lam, E, h, cfg: QuadratureConfig = DEFAULT_QUAD) -> float:
    """|central-difference d/d(conj lam) G - closed form| with absolute step h."""
    lam = complex(as_lambda(lam))
    if abs(abs(lam) - 1.0) <= h:
        raise DomainError("finite-difference stencil straddles |lambda| = 1")
    pts = lam + np.array([h, -h, 1j * h, -1j * h])
    g = green_shift_values(z, pts, E, cfg)
    fd = 0.5 * ((g[0] - g[1]) / (2 * h) + 1j * (g[2] - g[3]) / (2 * h))
    return float(abs(fd - dbar_green_exact(z, lam, E)))


def g_values(z, lam, E, cfg: QuadratureConfig = DEFAULT_QUAD):
    """g(x, k) = exp(-i k x) G(x, k)."""
    return green_shift_values(z, lam, E, cfg) / plane_wave(z, lam, E)


def green_log_coeff(lam, E, cfg: QuadratureConfig = DEFAULT_QUAD, radii=None, tol=1e-6) -> float:
    """Extrapolate lim_{|x|->0} g(x, k) / ln|x|.

    Averaging g over the four directions +-z, +-iz cancels the O(|x|) part of
    g, so successive log-slopes converge like |x|^2 ln|x|.
    """
    lam = complex(as_lambda(lam))
    E = check_energy(E)
    if radii is None:
        radii = 10.0 ** -np.arange(1.0, 6.0)
    radii = np.asarray(radii, dtype=float)
    dirs = np.array([1, 1j, -1, -1j])
    gbar = np.array([np.mean(g_values(r * dirs, lam, E, cfg)) for r in radii])
    slopes = np.diff(gbar) / np.diff(np.log(radii))
    if len(slopes) < 2 or abs(slopes[-1] - slopes[-2]) > tol:
        raise NonConvergence(f"log-coefficient sequence did not stabilize: {slopes}")
    out = slopes[-1]
    if abs(out.imag) > tol:
        raise NonConvergence(f"log-coefficient has imaginary part {out.imag}")
    return float(out.real)
