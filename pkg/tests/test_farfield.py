import csv
import warnings

import numpy as np
import pytest

from quarterplane.core import DomainError, Wavenumber
from quarterplane.farfield import (farfield_C2, farfield_C4, farfield_verify, oracle_arc_rho, phase_E, phase_E1,
                                   phase_E2, phase_E_polar, stationary_points, write_report_csv)
from quarterplane.oracle import HankelSource

H = 1.0 + 0.0j


def test_phase_special_values():
    x, z = 0.7, 1.3
    assert phase_E(1j, x, z, H) == pytest.approx(-1j * H * x)
    assert phase_E(1.0, x, z, H) == pytest.approx(1j * H * z)
    with pytest.raises(DomainError):
        phase_E(0.0, x, z, H)


def test_polar_form_agrees():
    rng = np.random.default_rng(7)
    h = 1 + 0.1j
    for _ in range(20):
        zeta = complex(rng.normal(), rng.normal())
        R, th = rng.uniform(0.1, 50), rng.uniform(0, np.pi / 2)
        a = phase_E(zeta, R * np.cos(th), R * np.sin(th), h)
        b = phase_E_polar(zeta, R, th, h)
        assert abs(a - b) < 1e-12 * max(1, abs(a))


def test_stationary_points():
    z1, z2 = stationary_points(0.0)
    assert z1 == pytest.approx(-1j) and z2 == pytest.approx(1j)
    z1, z2 = stationary_points(np.pi / 2)
    assert z1 == pytest.approx(1) and z2 == pytest.approx(-1)
    with pytest.raises(DomainError):
        stationary_points(2.0)


@pytest.mark.parametrize("theta", [0.3, np.pi / 4, 1.2])
def test_phase_derivatives_at_stationary_points(theta):
    R = 30.0
    x, z = R * np.cos(theta), R * np.sin(theta)
    d = 1e-5
    for zs in stationary_points(theta):
        fd = (phase_E(zs + d, x, z, H) - phase_E(zs - d, x, z, H)) / (2 * d)
        assert abs(fd) < 1e-6 * R
        assert abs(phase_E1(zs, x, z, H)) < 1e-12 * R
    z1, _ = stationary_points(theta)
    assert phase_E(z1, x, z, H) == pytest.approx(1j * R * H)
    assert phase_E2(z1, x, z, H) == pytest.approx(-1j * R * H * np.exp(-2j * theta))


def test_quadratic_model_is_third_order():
    theta, R = 0.6, 20.0
    x, z = R * np.cos(theta), R * np.sin(theta)
    z1, _ = stationary_points(theta)
    tangent = 1j * z1
    ds = np.geomspace(1e-3, 1e-1, 8)
    err = [abs(phase_E(z1 + s * tangent, x, z, H) - phase_E(z1, x, z, H)
               - 0.5 * phase_E2(z1, x, z, H) * (s * tangent) ** 2) for s in ds]
    slope = np.polyfit(np.log(ds), np.log(err), 1)[0]
    assert slope >= 2.8


def test_c4_formula_example():
    Rh = 8 * np.pi
    for theta in (0.2, 0.9):
        z1, _ = stationary_points(theta)
        v = farfield_C4(2j * np.pi * z1, Rh, theta, H)
        assert abs(v - 0.5 * np.exp(1j * (theta - np.pi / 4))) < 1e-12
    assert farfield_C4(0.0, 50.0, 0.5, H) == 0


def test_formula_scaling_and_phase():
    theta = 0.5
    z1, z2 = stationary_points(theta)
    a = farfield_C4(1.0, 40.0, theta, H)
    b = farfield_C4(1.0, 80.0, theta, H)
    assert abs(abs(b) / abs(a) - 2 ** -0.5) < 1e-12
    # outgoing e^{+iRh} on C4, incoming e^{-iRh} on C2: d(arg)/dR = +-h
    d = 1e-6
    for f, sgn in ((lambda R: farfield_C4(1.0, R, theta, H), 1), (lambda R: farfield_C2(1.0, R, theta, H), -1)):
        rate = np.angle(f(50.0 + d) / f(50.0 - d)) / (2 * d)
        assert rate == pytest.approx(sgn * 1.0, abs=1e-6)


def test_regime_warning():
    with pytest.warns(RuntimeWarning):
        farfield_C4(1.0, 5.0, 0.5, H)
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        farfield_C4(1.0, 50.0, 0.5, H)


def test_endpoint_angles_excluded():
    with pytest.raises(DomainError):
        farfield_verify(lambda z: 1.0, lambda z: 1.0, H, [50.0], theta=0.01)


def test_oracle_far_field():
    src = HankelSource(1.0, 1.0, Wavenumber(1.0, 0.0))
    r31, r13 = oracle_arc_rho(src)
    rep = farfield_verify(r31, r13, src.h, [50.0, 100.0, 200.0])
    assert rep.decreasing()
    assert rep.rows[-1].abs_err < 0.1
    assert max(rep.c2_over_c4) < 0.1


def test_c2_reading_matches_quadrature():
    # densities vanishing at the arc endpoints isolate the interior stationary point
    rep = farfield_verify(lambda z: (z + 1j) * (z - 1), lambda z: (z - 1j) * (z + 1), H,
                          [50.0, 100.0, 200.0, 400.0], theta=1.0)
    assert rep.decreasing()
    assert rep.rate > 0.8
    errs = rep.c2_reading_errors
    assert errs["zeta2/cw"] < 0.1
    assert min(errs["zeta2/ccw"], errs["zeta1/ccw"], errs["zeta1/cw"]) > 1.0


def test_zero_density_rows_skipped(tmp_path):
    rep = farfield_verify(lambda z: 0.0, lambda z: 0.0, H, [50.0, 100.0])
    assert all(np.isnan(r.abs_err) for r in rep.rows)
    assert np.isnan(rep.rate)
    p = tmp_path / "ff.csv"
    write_report_csv(p, rep)
    assert next(csv.reader(open(p))) == ["Rh", "theta", "ratio_re", "ratio_im", "abs_err"]
