"""Acceptance criteria 1-10, each at its stated tolerance."""
import filecmp
import json
import math
import subprocess
import sys

import mpmath
import numpy as np
import pytest

from moutard import fields, thresholds
from moutard.cli import cmd_check, parse_config
from moutard.dbar import check_dbar_pair, check_symmetries_B, check_symmetries_b, observed_order
from moutard.green import check_dbar_green, green_contour_shift, green_direct
from moutard.omega import OmegaKind
from moutard.point import B_from_b, B_point, a_point, b_point, fit_radial_pole_order, singular_circles
from moutard.spectral import k_from_lambda, re_im_norm, re_im_norm_formula
from moutard.transform import (
    annihilation_seed,
    default_grid,
    run_annihilation,
    run_creation,
    transformed_psi,
    transformed_psi_star,
)
from moutard.omega import omega_field

PI = math.pi
EPS = np.finfo(float).eps
SCENARIOS = [(-1.0, 2 * PI), (-1.0, PI), (-4.0, PI)]
HS = thresholds.FD_STEPS


def test_01_variety_identity(report):
    rng = np.random.default_rng(20240601)
    n = 10_000
    E = rng.uniform(-10, -0.1, n)
    lam = 10.0 ** rng.uniform(-3, 3, n) * np.exp(1j * rng.uniform(0, 2 * PI, n))
    worst_sq, worst_cart, worst_norm = 0.0, 0.0, 0.0
    for Ei, li in zip(E, lam):
        k = k_from_lambda(Ei, li)
        worst_sq = max(worst_sq, abs(k.square() - Ei) / (EPS * abs(Ei)))
        # k1^2 + k2^2 cancels terms of size |E| max(|lam|, 1/|lam|)^2; bound it by that scale
        cond = max(abs(li), 1 / abs(li)) ** 2
        worst_cart = max(worst_cart, abs(k.square_cartesian() - Ei) / (EPS * abs(Ei) * cond))
        ref = re_im_norm_formula(Ei, li)
        worst_norm = max(worst_norm, abs(re_im_norm(k) - ref) / ref)
    ok = worst_sq <= 16 and worst_cart <= 16 and worst_norm <= 1e-12
    report("1 variety identity", ok, f"max |k^2-E|/(eps|E|) = {worst_sq:.2f}, cartesian/(eps|E|cond) = "
           f"{worst_cart:.2f}, re_im_norm rel = {worst_norm:.1e}")
    assert ok


def _z_samples():
    out = []
    for i, r in enumerate((0.25, 0.5, 1.0, 2.0)):
        out.append(r * np.exp(1j * (0.3 + 1.7 * i)))
    return out


def test_02_green_cross_validation(report):
    worst_gap, worst_imag, worst_k0, n = 0.0, 0.0, 0.0, 0
    for E in (-0.5, -1.0, -4.0):
        for j, r in enumerate((0.3, 0.7, 1.0, 1.5, 3.0)):
            lam = r * np.exp(1j * (0.9 * j - 0.4))
            for z in _z_samples():
                d, s = green_direct(z, lam, E), green_contour_shift(z, lam, E)
                n += 1
                worst_gap = max(worst_gap, abs(d.value - s.value) / (d.est_error + s.est_error))
                for g in (d, s):
                    worst_imag = max(worst_imag, abs(g.imag) / (1 + abs(g.value)))
                if r == 1.0:
                    ref = -float(mpmath.besselk(0, math.sqrt(-E) * abs(z))) / (2 * PI)
                    worst_k0 = max(worst_k0, abs(d.value - ref) / abs(ref), abs(s.value - ref) / abs(ref))
    ok = n == 60 and worst_gap <= 1 and worst_imag <= 1e-8 and worst_k0 <= 1e-6
    report("2 green cross-validation", ok,
           f"gap/err_sum = {worst_gap:.2e}, imag = {worst_imag:.1e}, K0 rel = {worst_k0:.1e}")
    assert ok


def test_03_dbar_green_identity(report):
    points = [(0.7 - 0.4j, 1.8 * np.exp(0.6j), -1.0), (0.3 + 1.1j, 0.4 * np.exp(-2.2j), -1.0),
              (-1.0 + 0.2j, 3.0j, -4.0), (0.5, 0.6, -0.5), (1.5 - 0.5j, 2.5 * np.exp(2.9j), -2.0),
              (-0.2 - 0.6j, 0.25 * np.exp(1.0j), -4.0), (0.9 + 0.9j, 1.3, -1.0)]
    orders = []
    for z, lam, E in points:
        res = [check_dbar_green(z, lam, E, h * abs(lam)) for h in HS]
        orders.append(observed_order(HS, res)[0])
    ok = len(points) >= 6 and min(orders) >= thresholds.MIN_ORDER
    report("3 dbar-Green identity", ok, f"min order = {min(orders):.4f} over {len(points)} points")
    assert ok


def test_04_point_potential_consistency(report):
    worst = {"routes": 0.0, "B_sym": 0.0, "b_sym": 0.0, "a=b": 0.0}
    for E, alpha in SCENARIOS + [(-0.3, -2.0)]:
        grid = default_grid(E, alpha)
        lam = grid.points()
        B1, B2 = B_point(lam, E, alpha), B_from_b(lam, E, alpha)
        worst["routes"] = max(worst["routes"], float(np.max(np.abs(B1 - B2) / np.abs(B1))))
        worst["B_sym"] = max(worst["B_sym"], check_symmetries_B(fields.point_B(E, alpha), grid).relative)
        worst["b_sym"] = max(worst["b_sym"], check_symmetries_b(lambda l: b_point(l, E, alpha), grid).relative)
        b = b_point(lam, E, alpha)
        worst["a=b"] = max(worst["a=b"], float(np.max(np.abs(a_point(lam, E, alpha) - b) / np.abs(b))))
    ok = all(v <= 1e-13 for v in worst.values())
    report("4 point-potential consistency", ok, ", ".join(f"{k} = {v:.1e}" for k, v in worst.items()))
    assert ok


def test_05_point_potential_dbar(report):
    z_samples = (1 + 0.5j, -0.7 + 0.3j, 0.4 - 1.1j)
    orders = []
    for E, alpha in SCENARIOS:
        grid = default_grid(E, alpha)
        res = []
        for h in HS:
            worst = 0.0
            for z in z_samples:
                r1, r2 = check_dbar_pair(fields.point_psi(z, E, alpha), fields.point_psi_star(z, E, alpha),
                                         fields.point_B(E, alpha), grid, h)
                worst = max(worst, r1.max_abs, r2.max_abs)
            res.append(worst)
        orders.append(observed_order(HS, res)[0])
    ok = min(orders) >= thresholds.MIN_ORDER
    report("5 point-potential dbar equation", ok, f"orders = {', '.join(f'{o:.4f}' for o in orders)}")
    assert ok


def test_06_omega(report):
    cfg = parse_config({"energy": -1.0, "alpha": PI, "omega_mode": "path"})
    rec = cmd_check(cfg, "omega")
    failed = [k for k, c in rec.checks.items() if not c[3]]
    kinds = {row[0] for row in rec.tables["path"][1]}
    ok = not failed and len(kinds) == len(OmegaKind) and len(rec.checks) == 4 * len(OmegaKind)
    worst_order = min(c[0] for k, c in rec.checks.items() if k.endswith("gradient_order"))
    report("6 omega potentials", ok, f"{len(rec.checks)} checks, min gradient order = {worst_order:.4f}"
           + (f", failed: {failed}" if failed else ""))
    assert ok


@pytest.mark.parametrize("E, alpha", SCENARIOS)
def test_07_creation(report, E, alpha):
    res = run_creation(E, alpha)
    c = res.checks()
    ok = res.passed()
    report(f"7 creation (E={E:g}, alpha={alpha:.4g})", ok,
           ", ".join(f"{k} = {v[0]:.2e}" for k, v in c.items()))
    assert ok


@pytest.mark.parametrize("E, alpha", SCENARIOS)
def test_08_annihilation(report, E, alpha):
    res = run_annihilation(E, alpha)
    # transformed pair against the zero potential, as a separate FD check
    seed = annihilation_seed(E, alpha)
    z = 1 + 0.5j
    pt = transformed_psi(seed, fields.point_psi(z, E, alpha),
                         omega_field(OmegaKind.PSIF_ANNIHILATION, z, E, alpha))
    pst = transformed_psi_star(seed, fields.point_psi_star(z, E, alpha),
                               omega_field(OmegaKind.FPSISTAR_ANNIHILATION, z, E, alpha))
    res0 = [max(r.max_abs for r in check_dbar_pair(pt, pst, fields.vacuum_B(), res.grid, h)) for h in HS]
    order0 = observed_order(HS, res0)[0]
    ok = res.passed() and order0 >= thresholds.MIN_ORDER
    c = res.checks()
    report(f"8 annihilation (E={E:g}, alpha={alpha:.4g})", ok,
           ", ".join(f"{k} = {v[0]:.2e}" for k, v in c.items()) + f", B=0 FD order = {order0:.4f}")
    assert ok


def test_09_singularity_structure(report):
    exact, orders = True, []
    for E in (-0.1, -0.5, -1.0, -4.0, -math.exp(5), -10.0):
        for alpha in (PI, 2 * PI, 4.0, 20.0, -3.0):
            s = 4 * PI / alpha - math.log(-E)
            got = singular_circles(E, alpha).radii
            want = (math.exp(-s / 2), math.exp(s / 2)) if s > 0 else ()
            exact &= got == want
            for r in got:
                for side in (-1, 1):
                    orders.append(fit_radial_pole_order(E, alpha, r, side=side))
    lo, hi = thresholds.POLE_ORDER_RANGE
    ok = exact and all(lo <= p <= hi for p in orders)
    report("9 singularity structure", ok,
           f"radii exact = {exact}, pole orders in [{min(orders):.4f}, {max(orders):.4f}]")
    assert ok


COMMANDS = [["green"], ["spectrum"], ["check", "dbar"], ["check", "symmetry"], ["check", "omega"],
            ["check", "seed"], ["create"], ["annihilate"]]


def _cli(args):
    return subprocess.run([sys.executable, "-m", "moutard.cli", *args], capture_output=True, text=True).returncode


def test_10_cli_contract(report, tmp_path):
    cfg = tmp_path / "run.json"
    cfg.write_text(json.dumps({"energy": -1.0, "alpha": PI, "lambda_samples": [[1, 0], [0.3, 0.2], [0, -2]],
                               "grid": {"r_min": 0.1, "r_max": 10, "n_radial": 12, "n_angular": 8}}))
    codes = {}
    for run_dir in ("a", "b"):
        for cmd in COMMANDS:
            codes[(run_dir, *cmd)] = _cli([*cmd, "--config", str(cfg), "--out", str(tmp_path / run_dir)])
    names = sorted(p.name for p in (tmp_path / "a").iterdir())
    same = names == sorted(p.name for p in (tmp_path / "b").iterdir())
    match, mismatch, errors = filecmp.cmpfiles(tmp_path / "a", tmp_path / "b", names, shallow=False)
    same &= not mismatch and not errors
    summaries = [n for n in names if n.endswith("_summary.json")]

    no_alpha = tmp_path / "no_alpha.json"
    no_alpha.write_text(json.dumps({"energy": -1.0}))
    broken = tmp_path / "quad.json"
    broken.write_text(json.dumps({"quadrature": {"rel_tol": 1e-15, "abs_tol": 1e-18, "max_subdivisions": 1}}))
    wrong = tmp_path / "wrong.json"
    wrong.write_text(json.dumps({"alpha": PI, "seed_overrides": {"c_ff_plus": 1.0, "c_ff_minus": 1.0},
                                 "grid": {"r_min": 0.2, "r_max": 5, "n_radial": 6, "n_angular": 5}}))
    out = str(tmp_path / "c")
    extra = {
        "create without alpha": (_cli(["create", "--config", str(no_alpha), "--out", out]), 2),
        "green with z = 0": (_cli(["green", "--config", str(_zero_z(tmp_path)), "--out", out]), 2),
        "quadrature failure": (_cli(["green", "--config", str(broken), "--out", out]), 3),
        "wrong constants": (_cli(["create", "--config", str(wrong), "--out", out]), 4),
    }
    codes_ok = all(c == 0 for c in codes.values()) and all(got == want for got, want in extra.values())
    ok = same and codes_ok and len(summaries) == len(COMMANDS)
    report("10 determinism and CLI contract", ok,
           f"{len(names)} files byte-identical = {same}, exit codes = "
           + ", ".join(f"{k}: {v[0]}" for k, v in extra.items()))
    assert ok


def _zero_z(tmp_path):
    p = tmp_path / "zero_z.json"
    p.write_text(json.dumps({"z_samples": [[1, 0], [0, 0]]}))
    return p
