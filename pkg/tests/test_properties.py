import math

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from moutard.green import green_shift_values
from moutard.omega import OmegaKind, omega_closed
from moutard.point import B_point, b_point, denom, singular_circles
from moutard.spectral import k_from_lambda, plane_wave, re_im_norm, re_im_norm_formula
from moutard.transform import annihilation_seed, moutard_B, vacuum_seed

EPS = np.finfo(float).eps

energy = st.floats(-10.0, -0.1)
log_r = st.floats(-3.0, 3.0)
angle = st.floats(0.0, 2 * math.pi)
coupling = st.one_of(st.floats(0.5, 20.0), st.floats(-20.0, -0.5))


def polar(lr, a):
    return 10.0 ** lr * complex(math.cos(a), math.sin(a))


def off_special_circles(lam, E, alpha, margin=1e-6):
    r = abs(lam)
    return abs(r - 1) > margin and abs(denom(lam, E, alpha)) > margin


@given(energy, log_r, angle)
def test_variety(E, lr, a):
    lam = polar(lr, a)
    k = k_from_lambda(E, lam)
    assert abs(k.square() - E) <= 16 * EPS * abs(E)
    assert abs(re_im_norm(k) - re_im_norm_formula(E, lam)) <= 1e-12 * re_im_norm_formula(E, lam)


@given(energy, log_r, angle, st.floats(-3, 3), st.floats(-3, 3))
def test_plane_wave_modulus(E, lr, a, x1, x2):
    lam, z = polar(lr, a), complex(x1, x2)
    s = math.sqrt(-E)
    expected = -0.5 * s * ((lam * z.conjugate()).real + (z / lam).real)
    assume(abs(expected) < 600)
    assert math.log(abs(plane_wave(z, lam, E))) == pytest.approx(expected, rel=1e-12, abs=1e-12)


@given(energy, st.floats(-1.0, 1.0), angle, coupling)
def test_point_data_symmetries(E, lr, a, alpha):
    lam = polar(lr, a)
    assume(off_special_circles(lam, E, alpha))
    B = B_point(lam, E, alpha)
    p = 1 / lam.conjugate()
    scale = abs(B) * max(1, abs(lam) ** 2)
    assert abs(B_point(p, E, alpha) + lam ** 2 * np.conj(B)) <= 1e-13 * scale
    assert abs(B_point(-p, E, alpha) - abs(lam) ** 2 * B) <= 1e-13 * scale
    b = b_point(lam, E, alpha)
    assert b.imag == 0
    assert abs(b_point(p, E, alpha) - b) <= 1e-13 * abs(b)


@given(energy, coupling)
def test_singular_circles_structure(E, alpha):
    s = 4 * math.pi / alpha - math.log(-E)
    radii = singular_circles(E, alpha).radii
    if abs(s) <= 1e-12 * max(1, abs(4 * math.pi / alpha)):
        assert radii == (1.0,)
    elif s < 0:
        assert radii == ()
    else:
        assert radii == (math.exp(-s / 2), math.exp(s / 2))
        assert radii[0] * radii[1] == pytest.approx(1.0, rel=1e-15)


@settings(max_examples=40, deadline=None)
@given(energy, st.floats(-1.0, 1.0), angle, st.floats(0.1, 2.0), angle)
def test_green_covariance(E, lr, a, rz, az):
    lam, z = polar(lr, a), rz * complex(math.cos(az), math.sin(az))
    rot = complex(math.cos(0.7), math.sin(0.7))
    g = green_shift_values(z, lam, E)
    assert abs(green_shift_values(z * rot, lam * rot, E) - g) <= 1e-12 * (1 + abs(g))
    assert abs(green_shift_values(z, 1 / lam.conjugate(), E) - g) <= 1e-12 * (1 + abs(g))


@given(energy, st.floats(-1.0, 1.0), angle, coupling)
def test_moutard_B_closed_forms(E, lr, a, alpha):
    lam = polar(lr, a)
    assume(off_special_circles(lam, E, alpha, 1e-4))
    arr = np.array([lam])
    B = B_point(arr, E, alpha)
    assert abs(moutard_B(vacuum_seed(E, alpha), arr)[0] - B[0]) <= 1e-12 * abs(B[0])
    assert abs(moutard_B(annihilation_seed(E, alpha), arr)[0]) <= 1e-12 * abs(B[0])


@settings(max_examples=30, deadline=None)
@given(energy, st.floats(-1.0, 1.0), angle, coupling, st.sampled_from(list(OmegaKind)))
def test_omega_imaginary(E, lr, a, alpha, kind):
    lam = polar(lr, a)
    assume(off_special_circles(lam, E, alpha))
    w = omega_closed(kind, 0.5 - 0.25j, lam, E, alpha)
    assert abs(w.real) <= 1e-10 * max(1, abs(w))
