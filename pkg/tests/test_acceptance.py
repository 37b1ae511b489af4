"""Acceptance suite: one test per acceptance check, each at its fixed tolerance.

A summary line per check is printed at the end of the pytest run (see
conftest.py).  Closed-form oracles are computed inline: the catenary height
g(x) = r0 * log((x + sqrt(x^2 - r0^2)) / r0) and its derivatives.
"""

import contextlib
import io
import json
import math
import time

import numpy as np
import pytest
from scipy.optimize import brentq

import hcatenoid as hc
from hcatenoid.cli import main as cli_main
from hcatenoid.errors import PreconditionError


def catenary(x, r0=1.0):
    return r0 * np.arccosh(np.asarray(x, dtype=float) / r0)


def catenary_slope(x, r0=1.0):
    x = np.asarray(x, dtype=float)
    return r0 / np.sqrt(x * x - r0 * r0)


def test_01_minimal_catenoid_oracle():
    start = time.perf_counter()
    cat = hc.integrate_catenoid(hc.minimal(), 1.0, hc.IntegratorConfig(x_max=100.0))
    xs = np.geomspace(1.001, 100.0, 400)
    height_err = max(
        abs(hc.height_at(cat, "upper", float(x)) - float(catenary(x))) / float(catenary(x))
        for x in xs)
    slope_err = max(
        abs(hc.slope_at(cat, "upper", float(x)) - float(catenary_slope(x)))
        / float(catenary_slope(x))
        for x in xs)
    elapsed = time.perf_counter() - start
    assert height_err <= 1e-8, height_err
    assert slope_err <= 1e-8, slope_err
    assert elapsed < 1.0, elapsed


def test_02_residual_oracle_on_both_branches():
    start = time.perf_counter()
    for H, r0 in ((hc.power_law(2), 1.0), (hc.power_law(1.5), 2.0)):
        cat = hc.integrate_catenoid(H, r0, hc.IntegratorConfig(x_max=1e6 * r0))
        for branch in ("upper", "lower"):
            xs = cat.branch(branch).checkpoints()["x"]
            worst = max(hc.residual(cat, branch, float(x)) for x in xs)
            assert worst <= 1e-7, (H.describe(), r0, branch, worst)
    elapsed = time.perf_counter() - start
    assert elapsed < 2.0, elapsed


def test_03_unbounded_growth_and_stable_coefficient():
    start = time.perf_counter()
    for alpha in (1.5, 2.0, 3.0):
        cat = hc.integrate_catenoid(hc.power_law(alpha), 1.0,
                                    hc.IntegratorConfig(x_max=1e6))
        c0s = []
        for branch in ("upper", "lower"):
            for up_to in (1e4, 1e5, 1e6):
                ec = hc.classify_end(cat, branch, up_to=up_to)
                assert ec.verdict == "Unbounded", (alpha, branch, up_to, ec.verdict)
                c0s.append(ec.c0)
        spread = (max(c0s) - min(c0s)) / np.mean(c0s)
        assert spread <= 0.01, (alpha, spread)
    minimal_cat = hc.integrate_catenoid(hc.minimal(), 1.0, hc.IntegratorConfig(x_max=1e6))
    ec = hc.classify_end(minimal_cat, "upper")
    assert ec.verdict == "Unbounded"
    assert abs(ec.c0 - 1.0) <= 1e-6, ec.c0
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0, elapsed


def test_04_slope_bound_with_positive_margin(cat_h2, cat_minimal):
    xs, margins = hc.minimal_bound_margins(cat_h2)
    assert np.all(margins > 0.0), float(np.min(margins))
    xs, margins0 = hc.minimal_bound_margins(cat_minimal)
    assert np.max(np.abs(margins0)) <= 1e-7, float(np.max(np.abs(margins0)))


def test_05a_radius_times_slope_nonincreasing(cat_h15, cat_h2, cat_h3):
    for cat in (cat_h15, cat_h2, cat_h3):
        u = cat.upper.checkpoints()["u"]
        assert np.all(np.diff(u) <= 1e-12), cat.prescription.describe()


def test_05b_growth_rate_envelope_two_sided(cat_h15, cat_h2, cat_h3):
    # exp(-I) <= normalized slope weight <= exp(-I/2) after renormalizing at
    # the first checkpoint, I = integral of f'^(2 alpha - 1)
    slack = 1e-6
    failures = []
    for cat in (cat_h15, cat_h2, cat_h3):
        env = hc.growth_envelope(cat)
        if env.lower_violation > slack or env.upper_violation > slack:
            failures.append((cat.prescription.describe(),
                             env.lower_violation, env.upper_violation))
    assert not failures, (
        "envelope bound violated (lower_violation, upper_violation): "
        f"{failures}")


def test_06_curvature_identity_and_uniform_bound(cat_h2, cat_h15, cat_minimal):
    for cat in (cat_h2, cat_h15, cat_minimal):
        for branch in ("upper", "lower"):
            for x in cat.branch(branch).checkpoints()["x"]:
                c = hc.curvature_at(cat, branch, float(x))
                assert c.sff_norm_sq == pytest.approx(
                    c.kappa1 ** 2 + c.kappa2 ** 2, rel=1e-9)
    # shrinking-waist schedule: surfaces through (x_n, nu_n) = (1/n, 1-1/n^2)
    # keep |sigma|^2 below 4(2+sqrt(2)) at every checkpoint beyond x_n
    bound = 4.0 * (2.0 + math.sqrt(2.0))
    H = hc.power_law(2)

    def angle_at(r, x_target):
        cat = hc.integrate_catenoid(H, r, hc.IntegratorConfig(x_max=1.05 * x_target))
        return cat.upper.state_at(x_target).nu

    for n in range(11, 21):
        x_n = 1.0 / n
        nu_n = 1.0 - 1.0 / n ** 2
        r_n = brentq(lambda r: angle_at(r, x_n) - nu_n, 1e-6 * x_n, 0.999 * x_n,
                     xtol=1e-12, rtol=8.9e-16)
        assert r_n < x_n
        cat = hc.integrate_catenoid(H, r_n, hc.IntegratorConfig(x_max=1e3 * x_n))
        cp = cat.upper.checkpoints()
        beyond = cp["x"][cp["x"] > x_n]
        worst = max(hc.curvature_at(cat, "upper", float(x)).sff_norm_sq for x in beyond)
        assert worst < bound, (n, worst)


def test_07_homothety_identity(cat_h2):
    # scaling by lam matches integrating the prescription H/lam at neck lam*r0
    half = hc.scale(cat_h2, 0.5)
    cross_half = hc.integrate_catenoid(hc.scaled(hc.power_law(2), 2.0), 0.5,
                                       hc.IntegratorConfig(x_max=5e3))
    double = hc.scale(cat_h2, 2.0)
    cross_double = hc.integrate_catenoid(hc.scaled(hc.power_law(2), 0.5), 2.0,
                                         hc.IntegratorConfig(x_max=2e4))
    for scaled_cat, cross, lo in ((half, cross_half, 0.505),
                                  (double, cross_double, 2.02)):
        xs = np.geomspace(lo, 0.9 * cross.upper.x_end, 60)
        for branch in ("upper", "lower"):
            for x in xs:
                a = scaled_cat.branch(branch).state_at(float(x)).z
                b = cross.branch(branch).state_at(float(x)).z
                assert a == pytest.approx(b, rel=1e-8, abs=1e-12), (branch, x)


def test_08_comparison_suite_strict_inequalities():
    pairs = (
        (hc.power_law(2), hc.scaled(hc.power_law(2), 2.0)),
        (hc.minimal(), hc.power_law(2)),
    )
    for H, F in pairs:
        rep = hc.compare_derivatives(H, F, 1.0, x_max=1e4, per_decade=64)
        assert rep.height_ok, rep.first_violation
        assert rep.derivative_ok, rep.first_violation
        assert rep.first_violation is None
        assert not rep.ties


def test_09_equivalence_transfer():
    perturbed = hc.from_expression("-(1-y^2)^2*(2-y^2)")
    mixed = hc.from_expression("-(1-y^2)^2*(1.5-0.5*y)")
    pairs_per_endpoint = {
        1: ((hc.power_law(2), hc.scaled(hc.power_law(2), 1 / 3)),
            (hc.power_law(2), perturbed),
            (hc.power_law(2), mixed)),
        -1: ((hc.power_law(1.5), hc.scaled(hc.power_law(1.5), 2.0)),
             (hc.power_law(2), perturbed),
             (hc.power_law(2), mixed)),
    }
    for endpoint, pairs in pairs_per_endpoint.items():
        for H, F in pairs:
            rep = hc.equivalence_behavior(H, F, 1.0, endpoint=endpoint)
            assert rep.passed, (endpoint, H.describe(), F.describe(), rep.verdicts)
            assert not rep.inconclusive
    with pytest.raises(PreconditionError):
        hc.equivalence_behavior(hc.power_law(2), hc.power_law(1.5), 1.0, endpoint=1)


def test_10_small_neck_plane_convergence():
    for H in (hc.minimal(), hc.power_law(2)):
        rep = hc.double_cover_convergence(H, [1e-1, 1e-2, 1e-3], (0.5, 2.0))
        sups = [s for _, s in rep.rows]
        assert sups[0] > sups[1] > sups[2], sups
        assert sups[-1] < 0.05 * 2.0, sups
        assert rep.passed


def test_11_halfspace_certifier():
    start = time.perf_counter()
    h2 = hc.SphereFunction.axisymmetric(hc.power_law(2))
    cert = hc.certify(h2)
    assert cert.excluded == ("lower", "upper")
    assert cert.minorant_north.alpha == 2.0
    assert cert.minorant_south.alpha == 2.0
    assert abs(cert.limit_constants["C1"].value - 1.0) <= 1e-6
    assert abs(cert.limit_constants["C2"].value - 1.0) <= 1e-6
    assert cert.limit_constants["C1"].converged
    certificates = [(cert, h2)]

    const = hc.SphereFunction.axisymmetric(hc.polynomial([-1.0]))
    cert_const = hc.certify(const)
    assert cert_const.excluded == ()
    certificates.append((cert_const, const))

    slow = hc.SphereFunction.axisymmetric(hc.power_law(0.5))
    cert_slow = hc.certify(slow)
    assert cert_slow.excluded == ()
    certificates.append((cert_slow, slow))

    for cert, fn in certificates:
        ok, checks = hc.verify_certificate(cert, fn)
        assert ok, checks
    elapsed = time.perf_counter() - start
    assert elapsed < 5.0, elapsed


def test_12_cli_determinism(tmp_path):
    def run(args):
        out = io.StringIO()
        with contextlib.redirect_stdout(out), contextlib.redirect_stderr(io.StringIO()):
            code = cli_main(args)
        return code, out.getvalue()

    stdout_cases = [
        ["classify", "--h", "powerlaw:alpha=2", "--r0", "1", "--xmax", "1e4"],
        ["certify", "--h", "powerlaw:alpha=2"],
        ["equiv", "--h", "powerlaw:alpha=2", "--f", "scale:0.5:powerlaw:alpha=2",
         "--r0", "1"],
        ["compare", "--h", "powerlaw:alpha=2", "--f", "scale:2:powerlaw:alpha=2",
         "--r0", "1", "--xmax", "100"],
        ["sweep", "--h", "powerlaw:alpha=2", "--r-list", "0.5,1"],
    ]
    for args in stdout_cases:
        code1, out1 = run(args)
        code2, out2 = run(args)
        assert code1 == code2 == 0, args
        assert out1.encode() == out2.encode(), args
        json.loads(out1)

    for name, args in (
        ("p.csv", ["profile", "--h", "powerlaw:alpha=2", "--r0", "1", "--xmax", "1e3"]),
        ("m.obj", ["mesh", "--h", "powerlaw:alpha=2", "--r0", "1", "--rings", "3",
                   "--segments", "4", "--xmax", "10"]),
    ):
        pa, pb = tmp_path / f"a_{name}", tmp_path / f"b_{name}"
        assert run(args + ["--out", str(pa)])[0] == 0
        assert run(args + ["--out", str(pb)])[0] == 0
        assert pa.read_bytes() == pb.read_bytes(), name
