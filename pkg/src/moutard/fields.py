"""LambdaField factories for the vacuum and the point potential at fixed (z, E, alpha)."""
from __future__ import annotations

import numpy as np

from .dbar import LambdaField
from .green import DEFAULT_QUAD
from .point import B_point, a_point, psi_point, psi_star_point
from .spectral import plane_wave, sign_domain


def _zeros_like(lam):
    return np.zeros(np.shape(lam), dtype=complex) if np.ndim(lam) else 0j


def vacuum_B():
    return LambdaField(_zeros_like, "B=0")


def plane_wave_field(z, E):
    return LambdaField(lambda lam: plane_wave(z, lam, E), f"exp(ikx), z={z}")


def inverse_plane_wave_star(z, E):
    """(i/lam) exp[+(sqrt|E|/2)(lam conj z + z/lam)]: the conjugate-equation vacuum solution."""
    return LambdaField(lambda lam: 1j / np.asarray(lam) * plane_wave(z, -np.asarray(lam), E),
                       f"psi*_0, z={z}")


def vacuum_f():
    return LambdaField(lambda lam: np.ones(np.shape(lam), dtype=complex) if np.ndim(lam) else 1 + 0j,
                       "f=1")


def vacuum_f_star():
    return LambdaField(lambda lam: 1j * sign_domain(lam) / np.asarray(lam), "f*=i sign/lam")


def point_B(E, alpha):
    return LambdaField(lambda lam: B_point(lam, E, alpha), f"B_point(E={E}, alpha={alpha})")


def point_psi(z, E, alpha, cfg=DEFAULT_QUAD):
    return LambdaField(lambda lam: psi_point(z, lam, E, alpha, cfg), f"psi_point, z={z}")


def point_psi_star(z, E, alpha, cfg=DEFAULT_QUAD):
    return LambdaField(lambda lam: psi_star_point(z, lam, E, alpha, cfg), f"psi*_point, z={z}")


def point_f(E, alpha):
    return LambdaField(lambda lam: a_point(lam, E, alpha) + 0j, "f=a")


def point_f_star(E, alpha):
    return LambdaField(lambda lam: 1j * sign_domain(lam) / np.asarray(lam) * a_point(lam, E, alpha),
                       "f*=i sign a/lam")


def product(f, g, label=None):
    return LambdaField(lambda lam: f(lam) * g(lam), label or f"({f.label})({g.label})")


def scaled(f, c, label=None):
    return LambdaField(lambda lam: c * f(lam), label or f"{c}*({f.label})")

