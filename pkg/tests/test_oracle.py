import mpmath
import numpy as np
import pytest
from scipy import special

from quarterplane.core import DomainError, Wavenumber
from quarterplane.oracle import (HankelSource, bessel_J0, bessel_Y0, hankel_H0_1, hankel_H1_1,
                                 helmholtz_residual, oracle_rho, rho_from_eigenfunctions, smooth_window,
                                 volterra_phi)

ARGS = [0.3, 2.0, 7.5, 9.9, 10.5, 19.0, 25.0, 60.0, 3 + 0.6j, 12 + 2.4j, 30 + 6j, -4 + 0.5j, -15 + 3j, 0.01j]


@pytest.mark.parametrize("w", ARGS)
def test_own_bessel_against_mpmath(w):
    mp = complex(mpmath.besselj(0, w))
    assert abs(bessel_J0(w) - mp) < 1e-11 * max(1, abs(mp))
    my = complex(mpmath.bessely(0, w))
    assert abs(bessel_Y0(w) - my) < 1e-11 * max(1, abs(my))
    h0 = complex(mpmath.hankel1(0, w))
    h1 = complex(mpmath.hankel1(1, w))
    assert abs(hankel_H0_1(w) - h0) < 1e-11 * max(1, abs(h0))
    assert abs(hankel_H1_1(w) - h1) < 1e-11 * max(1, abs(h1))


def test_scipy_scaled_hankel_agrees():
    for w in (1.3 + 0.26j, 22 + 4.4j):
        assert abs(special.hankel1e(0, w) * np.exp(1j * w) - hankel_H0_1(w)) < 1e-13


def test_bessel_argument_guard():
    with pytest.raises(DomainError):
        bessel_J0(1 - 1j)
    with pytest.raises(DomainError):
        hankel_H0_1(-2.0)
    with pytest.raises(DomainError):
        bessel_Y0(0.0)


def test_source_validation():
    with pytest.raises(DomainError):
        HankelSource(-1.0, 1.0, Wavenumber(1.0, 0.2))
    with pytest.raises(ValueError):
        HankelSource(1.0, 1.0, Wavenumber(1.0, 0.2), kind="sideways")


def test_value_is_the_hankel_function(src):
    r = np.hypot(2.0, 1.5)
    assert abs(src.u(1.0, 0.5) - hankel_H0_1(src.h * r)) < 1e-13
    assert abs(src.u00 - hankel_H0_1(src.h * np.sqrt(2))) < 1e-13


@pytest.mark.parametrize("x,z", [(1.0, 1.0), (2.0, 0.5), (0.5, 3.0)])
def test_stencil_second_order(src, x, z):
    res = [abs(helmholtz_residual(src.u, x, z, d, src.h)) for d in (0.1, 0.05, 0.025)]
    orders = np.log2(np.array(res[:-1]) / np.array(res[1:]))
    assert np.all(orders >= 1.8)


def test_stencil_leaving_quadrant(src):
    with pytest.raises(DomainError):
        helmholtz_residual(src.u, 0.005, 1.0, 0.01, src.h)


@pytest.mark.parametrize("x,z", [(1.0, 1.0), (0.2, 2.5)])
def test_gradient_matches_finite_differences(src, x, z):
    d = 1e-4
    ux, uz = src.grad(x, z)
    fx = (src.u(x + d, z) - src.u(x - d, z)) / (2 * d)
    fz = (src.u(x, z + d) - src.u(x, z - d)) / (2 * d)
    assert abs(ux - fx) < 1e-6 * abs(ux)
    assert abs(uz - fz) < 1e-6 * abs(uz)


def test_absorption_decay():
    s = HankelSource(1.0, 1.0, Wavenumber(1.0, 0.2))
    r = [abs(s.u(t, t)) for t in (5.0, 10.0, 20.0)]
    assert r[0] > r[1] > r[2]
    assert r[2] < 1e-2


def test_incoming_is_conjugate_at_zero_absorption():
    wn = Wavenumber(1.0, 0.0)
    out, inc = HankelSource(1.0, 1.0, wn), HankelSource(1.0, 1.0, wn, "incoming")
    assert abs(inc.u(1.0, 2.0) - np.conj(out.u(1.0, 2.0))) < 1e-14


def test_jumps_from_eigenfunctions_agree(src):
    for zeta in (0.5 + 0.5j, -0.7 + 0.3j, 2 + 1j):
        r13, r21, r32 = rho_from_eigenfunctions(src, zeta)
        o21, o32, o31 = oracle_rho(src, zeta)
        assert abs(r21 - o21) < 1e-12
        assert abs(r32 - o32) < 1e-12
        assert abs(r13 + o31) < 1e-12


def test_jumps_are_corner_eigenfunctions(src):
    zeta = 0.6 + 0.4j
    o21, o32, _ = oracle_rho(src, zeta)
    assert abs(o21 + volterra_phi(src, 1, zeta, 0.0, 0.0)) < 1e-12
    assert abs(o32 - volterra_phi(src, 3, zeta, 0.0, 0.0)) < 1e-12


def test_smooth_window():
    w = smooth_window(10.0, 0.2)
    v = w(np.array([0.0, 7.9, 8.0, 9.0, 10.0, 11.0]))
    assert v[0] == v[1] == v[2] == 1.0
    assert 0 < v[3] < 1
    assert v[4] == v[5] == 0.0
    assert np.all(np.diff(w(np.linspace(8, 10, 200))) <= 0)
