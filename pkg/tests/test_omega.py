import math

import numpy as np
import pytest

from moutard import fields
from moutard.dbar import build_grid, observed_order
from moutard.errors import NonConvergence, PathError
from moutard.green import green_shift_values
from moutard.omega import (
    IntegrationPath,
    OmegaConstants,
    OmegaKind,
    check_omega_gradient,
    default_constants,
    omega_by_path,
    omega_closed,
    omega_field,
    omega_integrate,
    pairing,
    standard_path,
    validate_path,
)

PI = math.pi
Z = 0.6 + 0.3j


def test_closed_form_examples():
    assert omega_closed(OmegaKind.FF_CREATION, None, 2, -1, 2 * PI) == pytest.approx(
        1j * (math.log(4) - 2), abs=1e-15)
    assert omega_closed(OmegaKind.FF_ANNIHILATION, None, 1.0 + 0j, -1, PI) == pytest.approx(
        1j / (4 * PI ** 2), abs=1e-15)


def test_default_constants():
    assert default_constants(OmegaKind.FF_CREATION, PI) == OmegaConstants(4.0, 4.0)
    for kind in OmegaKind:
        if kind is not OmegaKind.FF_CREATION:
            assert default_constants(kind) == OmegaConstants()
    assert OmegaKind.PSIF_CREATION.creation and not OmegaKind.PSIF_ANNIHILATION.creation


@pytest.mark.parametrize("kind", list(OmegaKind))
def test_purely_imaginary(kind):
    g = build_grid(0.1, 10, 12, 8, -1, PI)
    v = omega_closed(kind, Z, g.points(), -1, PI)
    assert np.max(np.abs(v.real)) <= 1e-10 * max(1, np.max(np.abs(v)))


@pytest.mark.parametrize("kind", list(OmegaKind))
def test_gradient_second_order(kind):
    E, alpha = -1, PI
    g = build_grid(0.1, 10, 12, 8, E, alpha, h_fd=1e-2)
    psi, psi_star = pairing(kind, Z, E, alpha)
    om = omega_field(kind, Z, E, alpha)
    hs = (1e-2, 5e-3, 2.5e-3)
    res = [check_omega_gradient(om, psi, psi_star, g, h).max_abs for h in hs]
    assert observed_order(hs, res)[0] >= 1.9


def test_path_increment_for_vacuum_seed():
    """Along the real axis from 2 to 4 the increment is i ln 4, whatever the constants."""
    E, alpha = -1, PI
    c = 4 * PI / alpha
    path = IntegrationPath((2.0, 4.0), 1j * (math.log(4) + math.log(-E) - c))
    w = omega_integrate(fields.vacuum_f(), fields.vacuum_f_star(), path)
    assert w - path.base_value == pytest.approx(1j * math.log(4), abs=1e-12)
    closed = omega_closed(OmegaKind.FF_CREATION, None, 4.0, E, alpha)
    assert w == pytest.approx(closed, abs=1e-12)


def test_path_increment_matches_green():
    E = -1.0
    a, b = 1.6 + 0.2j, 1.9 + 0.5j
    path = IntegrationPath((a, b), 0j)
    w = omega_integrate(fields.plane_wave_field(Z, E), fields.vacuum_f_star(), path)
    dG = green_shift_values(Z, b, E) - green_shift_values(Z, a, E)
    assert w == pytest.approx(4j * PI * dG, abs=1e-10)


@pytest.mark.parametrize("kind", list(OmegaKind))
def test_closed_loop_vanishes(kind):
    E, alpha = -1, PI
    psi, psi_star = pairing(kind, Z, E, alpha)
    r = 3.0
    pts = tuple(r * np.exp(2j * PI * np.arange(65) / 64))
    w, est = omega_integrate(psi, psi_star, IntegrationPath(pts), forbidden=((math.exp(2), 0.1), (1, 0.01)),
                             full_output=True)
    assert abs(w) <= max(est, 1e-13)


def test_omega_by_path_reproduces_closed_form():
    E, alpha = -1, PI
    g = build_grid(0.1, 10, 12, 8, E, alpha)
    for kind in (OmegaKind.PSIF_ANNIHILATION, OmegaKind.FF_CREATION):
        psi, psi_star = pairing(kind, Z, E, alpha)
        base = lambda p, kind=kind: omega_closed(kind, Z, p, E, alpha)  # noqa: E731
        for lam in g.points()[::17]:
            assert omega_by_path(psi, psi_star, lam, g, base) == pytest.approx(
                omega_closed(kind, Z, lam, E, alpha), abs=1e-9)


def test_path_validation():
    with pytest.raises(PathError):
        IntegrationPath((1.0,))
    with pytest.raises(PathError):
        IntegrationPath((0.5, 0.6), 1.0 + 0j)
    with pytest.raises(PathError):
        validate_path(IntegrationPath((0.5, 2.0)))
    with pytest.raises(PathError):
        validate_path(IntegrationPath((-0.5, 0.5)))
    with pytest.raises(PathError):
        validate_path(IntegrationPath((6.0, 8.0)), forbidden=((math.exp(2), 0.1),))


def test_standard_path_stays_in_component():
    p = standard_path(-0.5 + 0.01j, 0.5, lower=0.45)
    validate_path(p, forbidden=((1.0, 0.01), (0.45, 0.0)))
    assert p.waypoints[0] == 0.5 and p.waypoints[-1] == -0.5 + 0.01j


def test_non_convergence_reported():
    wild = fields.scaled(fields.vacuum_f(), 1.0)
    osc = type(wild)(lambda l: np.exp(1j * 1e4 * np.real(l)), "osc")
    with pytest.raises(NonConvergence):
        omega_integrate(osc, wild, IntegrationPath((2.0, 9.0)), n_panels=1, max_doublings=1)
