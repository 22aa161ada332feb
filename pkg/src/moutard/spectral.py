"""Spectral variety k^2 = E < 0, its lambda chart and the lambda-plane symmetries.

A point of the variety is parametrized by a nonzero complex ``lam``::

    k1 = (lam + 1/lam) * i*sqrt|E| / 2
    k2 = (lam - 1/lam) *   sqrt|E| / 2

Every function below accepts python scalars or numpy arrays for ``lam``
and ``z`` and broadcasts.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import BoundaryError, DomainError

TOL_BOUNDARY = 1e-12


class Domain(enum.Enum):
    DPLUS = "D+"
    DMINUS = "D-"
    BOUNDARY = "boundary"


def classify(lam, tol=TOL_BOUNDARY) -> Domain:
    r = abs(complex(lam))
    if abs(r - 1.0) <= tol:
        return Domain.BOUNDARY
    return Domain.DPLUS if r < 1.0 else Domain.DMINUS


@dataclass(frozen=True)
class SpectralParam:
    """A nonzero spectral parameter tagged with its domain D+ / D- / boundary."""

    lam: complex
    domain: Domain

    @classmethod
    def of(cls, lam) -> "SpectralParam":
        lam = complex(lam)
        if lam == 0:
            raise DomainError("lambda = 0 is not on the spectral variety")
        return cls(lam, classify(lam))

    def __complex__(self):
        return self.lam


class KVector(NamedTuple):
    """Point of the complex quadric k1^2 + k2^2 = E.

    ``plus`` and ``minus`` are the null coordinates k1 + i k2 and k1 - i k2.
    They are stored because the Cartesian pair loses the quadric identity
    to cancellation when |lam| is far from 1; ``square()`` uses them.
    """

    k1: complex
    k2: complex
    plus: complex
    minus: complex

    def square(self):
        return self.plus * self.minus

    def square_cartesian(self):
        return self.k1 * self.k1 + self.k2 * self.k2


def check_energy(E) -> float:
    E = float(E)
    if not np.isfinite(E) or E >= 0:
        raise DomainError(f"energy must be finite and strictly negative, got {E!r}")
    return E


def as_lambda(lam):
    """Coerce to complex (array) and reject lambda = 0."""
    if isinstance(lam, SpectralParam):
        return lam.lam
    arr = np.asarray(lam, dtype=complex)
    if np.any(arr == 0):
        raise DomainError("lambda = 0 is not on the spectral variety")
    return complex(arr) if arr.ndim == 0 else arr


def sign_domain(lam, tol=TOL_BOUNDARY):
    """sign(lam * conj(lam) - 1); raises BoundaryError on the unit circle."""
    r = np.abs(lam)
    if np.any(np.abs(r - 1.0) <= tol):
        raise BoundaryError("sign(|lambda|^2 - 1) is undefined on |lambda| = 1")
    return np.where(r > 1.0, 1.0, -1.0) if np.ndim(r) else (1.0 if r > 1.0 else -1.0)


def k_from_lambda(E, lam) -> KVector:
    E = check_energy(E)
    lam = as_lambda(lam)
    s = np.sqrt(-E)
    inv = 1.0 / lam
    plus = 1j * s * lam
    minus = 1j * s * inv
    k1 = (lam + inv) * (0.5j * s)
    k2 = (lam - inv) * (0.5 * s)
    return KVector(k1, k2, plus, minus)


def re_im_norm(k: KVector):
    """|Re k| + |Im k| with Euclidean norms of the real and imaginary 2-vectors."""
    re = np.hypot(np.real(k.k1), np.real(k.k2))
    im = np.hypot(np.imag(k.k1), np.imag(k.k2))
    return re + im


def re_im_norm_formula(E, lam):
    """Two-branch closed form: sqrt|E|*|lam| outside the unit disc, sqrt|E|/|lam| inside."""
    r = np.abs(lam)
    s = np.sqrt(-check_energy(E))
    return np.where(r >= 1.0, s * r, s / r) if np.ndim(r) else (s * r if r >= 1.0 else s / r)


def involutions(lam):
    """The symmetry partners (1/conj(lam), -1/conj(lam))."""
    lam = as_lambda(lam)
    p = 1.0 / np.conj(lam)
    return p, -p


def xy_from_z(z):
    z = np.asarray(z, dtype=complex)
    return np.real(z), np.imag(z)


def z_from_xy(x1, x2):
    return np.asarray(x1, dtype=float) + 1j * np.asarray(x2, dtype=float)


def plane_wave(z, lam, E):
    """exp[-(sqrt|E|/2) (lam conj(z) + z/lam)], i.e. exp(i k.x) for k = k_E(lam)."""
    s = np.sqrt(-check_energy(E))
    lam = as_lambda(lam)
    return np.exp(-0.5 * s * (lam * np.conj(z) + z / lam))


def plane_wave_via_k(z, lam, E):
    """exp(i k.x) computed from the Cartesian components of k."""
    k = k_from_lambda(E, lam)
    x1, x2 = xy_from_z(z)
    return np.exp(1j * (k.k1 * x1 + k.k2 * x2))
