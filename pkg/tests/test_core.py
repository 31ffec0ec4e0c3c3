import numpy as np
import pytest

from quarterplane.core import (ConfigError, DomainError, QuadratureSpec, Wavenumber, as_zeta,
                               build_contour_Gamma, build_contour_K, classify_region, gauss_legendre,
                               gr_valid, graded_edges, in_D1, in_phi3_domain, panel_rule, sym_inv,
                               sym_neg, sym_neginv, GAMMA_LABELS, K_LABELS)


def test_wavenumber():
    assert Wavenumber(2.0, 0.1).h == complex(2.0, 0.2)
    with pytest.raises(ConfigError):
        Wavenumber(-1.0, 0.1)
    with pytest.raises(ConfigError):
        Wavenumber(1.0, -0.1)


def test_zero_is_not_a_spectral_point():
    with pytest.raises(DomainError):
        as_zeta(0)


@pytest.mark.parametrize("z,q,r", [(0.5 + 0.5j, "Q1", "inside"), (-2 + 1j, "Q2", "outside"),
                                   (-0.3 - 0.1j, "Q3", "inside"), (np.exp(-0.3j), "Q4", "on"),
                                   (2.0, "Q1", "outside"), (0.5j, "Q2", "inside")])
def test_classify_region(z, q, r):
    tag = classify_region(z)
    assert (tag.quadrant, tag.radial) == (q, r)


def test_symmetries_are_involutions():
    z = 0.3 - 1.7j
    assert sym_neg(sym_neg(z)) == pytest.approx(z)
    assert sym_inv(sym_inv(z)) == pytest.approx(z)
    assert sym_neginv(sym_neginv(z)) == pytest.approx(z)


def test_analyticity_domains():
    assert in_D1(0.3 + 0.2j) and in_D1(2 - 1j)
    assert not in_D1(0.3 - 0.2j) and not in_D1(2 + 1j)
    assert in_phi3_domain(0.3 - 0.2j) and in_phi3_domain(-2 + 1j)
    assert not in_phi3_domain(-0.3 + 0.2j)


def test_gr_validity_sector():
    h = Wavenumber(1.0, 0.2).h
    for z in (0.5 + 0.5j, -2 - 1j, 0.5j, -0.5, -3.0, np.exp(2.0j)):
        assert gr_valid(z, h)
    for z in (2.0, 5.0, -0.5j, np.exp(-0.5j), np.exp(-1.2j)):
        assert not gr_valid(z, h)


def test_gauss_legendre_exact_for_polynomials():
    x, w = gauss_legendre(8)
    assert np.sum(w * x ** 14) == pytest.approx(2 / 15, rel=1e-14)


def test_panel_rule_and_grading():
    e = graded_edges(0.0, 1.0, 0.35, min_size=1e-6)
    assert e[0] == 0.0 and e[-1] == 1.0 and np.all(np.diff(e) > 0)
    assert e[1] == pytest.approx(1e-6)
    t, w = panel_rule(e, 8)
    assert np.sum(w * np.exp(t)) == pytest.approx(np.e - 1, rel=1e-13)


def test_quadrature_spec_validation():
    with pytest.raises(ConfigError):
        QuadratureSpec(Lambda=0.5)
    with pytest.raises(ConfigError):
        QuadratureSpec(nodes_per_panel=0)


def test_gamma_contour_structure():
    g = build_contour_Gamma()
    assert tuple(g.labels) == GAMMA_LABELS
    d = QuadratureSpec().delta
    c1, c4 = g.piece("C1"), g.piece("C4")
    # counterclockwise arcs: the weights sum to the chord end - start
    assert np.sum(c1.weights) == pytest.approx(1j - np.exp(1j * d), abs=1e-12)
    assert np.sum(c4.weights) == pytest.approx(np.exp(-1j * d) + 1j, abs=1e-12)
    # mirrored pieces carry exactly mirrored nodes
    assert np.array_equal(g.piece("(-1,0)").nodes, -g.piece("(0,1)").nodes[::-1])
    assert np.array_equal(g.piece("C3").nodes, -c1.nodes)
    assert np.sum(g.piece("(0,1)").weights) == pytest.approx(1 - 2 * d)


def test_K_orientation_flip():
    k1 = build_contour_K()
    k2 = build_contour_K(orientations={"C3": -1})
    assert tuple(k1.labels) == K_LABELS
    assert np.array_equal(k2.piece("C3").weights, -k1.piece("C3").weights)
    assert np.array_equal(k2.piece("C1").weights, k1.piece("C1").weights)
