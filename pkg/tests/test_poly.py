import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rifclark import catalog
from rifclark.errors import DegreeNotAttained, ZeroPolynomial
from rifclark.poly import (PolyMD, Rif, companion_roots, derivative_coeffs,
                           eval_poly, poly_from_json, poly_to_json, reflect,
                           slice_coeffs, stability_check, trim)

P_FAV = PolyMD(np.array([[2.0, -1.0], [-1.0, 0.0]], dtype=complex))


def test_trim_drops_zero_faces():
    c = np.zeros((3, 3), dtype=complex)
    c[0, 0] = 1.0
    c[1, 1] = 2.0
    assert trim(c).shape == (2, 2)


def test_zero_polynomial_rejected():
    with pytest.raises(ZeroPolynomial):
        PolyMD(np.zeros((2, 2)))


def test_degree_not_attained_rejected():
    # top face all zero in axis 0
    c = np.array([[1.0, 2.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(DegreeNotAttained):
        PolyMD(c)


def test_reflection_of_fav_denominator():
    # reflection of 2 - z1 - z2 at degrees (1,1) is 2 z1 z2 - z1 - z2
    q = reflect(P_FAV)
    assert np.allclose(q.coeffs, np.array([[0.0, -1.0], [-1.0, 2.0]]))


def test_reflection_is_involution_on_fav():
    twice = reflect(reflect(P_FAV))
    assert np.array_equal(twice.coeffs, P_FAV.coeffs)


@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False,
                                   allow_infinity=False),
                min_size=4, max_size=4))
@settings(max_examples=50, deadline=None)
def test_reflection_involution_property(vals):
    c = np.array(vals, dtype=complex).reshape(2, 2)
    c[0, 0] += 11.0  # keep the constant term alive
    c[1, 1] += 7.0   # keep top degrees attained
    p = PolyMD(c)
    assert np.allclose(reflect(reflect(p)).coeffs, c)


def test_reflection_padding_requires_degrees_at_least_deg_p():
    with pytest.raises(ValueError):
        reflect(P_FAV, (0, 1))


def test_eval_matches_direct_formula():
    z1, z2 = 0.3 + 0.1j, -0.2 + 0.4j
    got = complex(eval_poly(P_FAV, (z1, z2)))
    assert abs(got - (2 - z1 - z2)) < 1e-14


def test_eval_broadcasts_columns_against_rows():
    z1 = np.exp(1j * np.linspace(0, 1, 3))[None, :]
    z2 = np.array([[0.5], [0.25]], dtype=complex)
    out = eval_poly(P_FAV, (z1, z2))
    assert out.shape == (2, 3)
    assert abs(out[1, 2] - (2 - z1[0, 2] - 0.25)) < 1e-14


def test_eval_three_variables():
    c = np.zeros((2, 2, 2), dtype=complex)
    c[1, 1, 1] = 1.0
    c[0, 0, 0] = 4.0
    got = complex(eval_poly(PolyMD(c), (0.5, 0.5j, 2.0)))
    assert abs(got - (4.0 + 0.5 * 0.5j * 2.0)) < 1e-14


def test_derivative_matches_finite_difference():
    h = 1e-7
    p = PolyMD(np.array([[2.0, -1.0, 0.5], [-1.0, 0.25, 1.5]], dtype=complex))
    z1, z2 = 0.4 + 0.2j, -0.3 + 0.1j
    for axis in (1, 2):
        dc = derivative_coeffs(p.coeffs, axis)
        dval = complex(np.polynomial.polynomial.polyval2d(z1, z2, dc))
        dz = (h, 0.0) if axis == 1 else (0.0, h)
        fd = (complex(eval_poly(p, (z1 + dz[0], z2 + dz[1])))
              - complex(eval_poly(p, (z1 - dz[0], z2 - dz[1])))) / (2 * h)
        assert abs(dval - fd) < 1e-6


def test_slice_coeffs_agrees_with_eval():
    zp = np.array([[0.7 + 0.1j], [0.2 - 0.5j]], dtype=complex)
    rows = slice_coeffs(P_FAV.coeffs, zp)
    for k in range(2):
        poly1d = np.polynomial.polynomial.polyval(0.3j, rows[k])
        direct = complex(eval_poly(P_FAV, (zp[k, 0], 0.3j)))
        assert abs(poly1d - direct) < 1e-13


def test_slice_coeffs_along_first_axis():
    zp = np.array([[0.4 - 0.2j]], dtype=complex)  # frozen z2
    row = slice_coeffs(P_FAV.coeffs, zp, axis=1)[0]
    val = np.polynomial.polynomial.polyval(0.6, row)
    assert abs(val - complex(eval_poly(P_FAV, (0.6, zp[0, 0])))) < 1e-13


def test_companion_roots_match_numpy():
    rows = np.array([[6.0, -5.0, 1.0], [2.0, -3.0, 1.0]], dtype=complex)
    got = companion_roots(rows)
    for k, row in enumerate(rows):
        expect = np.sort_complex(np.roots(row[::-1]))
        assert np.allclose(np.sort_complex(got[k]), expect)


def test_companion_roots_degree_drop():
    # vanishing leading coefficient in one row yields one fewer root there
    rows = np.array([[6.0, -5.0, 1.0], [1.0, 1.0, 0.0]], dtype=complex)
    got = companion_roots(rows)
    assert len(got[0]) == 2 and len(got[1]) == 1
    assert abs(got[1][0] + 1.0) < 1e-12


def test_stability_of_catalog_denominators():
    for phi in (catalog.simple_singular_rif(), catalog.squared_singular_rif(),
                catalog.diagonal_rif()):
        cert = stability_check(phi.den)
        assert cert.is_stable
        assert cert.min_modulus_on_grid > 1.0 - 1e-9


def test_instability_detected():
    # z1 z2 - 0.25 vanishes at (0.5, 0.5)
    c = np.array([[-0.25, 0.0], [0.0, 1.0]], dtype=complex)
    assert not stability_check(PolyMD(c)).is_stable


def test_json_round_trip_is_byte_identical():
    text = poly_to_json(P_FAV)
    again = poly_to_json(poly_from_json(text))
    assert text == again
    obj = json.loads(text)
    assert obj["degrees"] == [1, 1]


def test_rif_numerator_is_reflection():
    phi = Rif(P_FAV)
    assert np.allclose(phi.num.coeffs, reflect(P_FAV).coeffs)


def test_rif_monomial_padding():
    phi = Rif(P_FAV, degrees=(2, 2))
    # padded numerator equals z1 z2 times the plain reflection
    plain = reflect(P_FAV).coeffs
    padded = np.zeros((3, 3), dtype=complex)
    padded[1:, 1:] = plain
    assert np.allclose(phi.num.coeffs, padded)
    z = (0.3 + 0.2j, -0.1 + 0.5j)
    base = Rif(P_FAV)
    assert abs(complex(phi(*z)) - z[0] * z[1] * complex(base(*z))) < 1e-14


def test_rif_is_inner_on_torus_samples():
    phi = Rif(P_FAV)
    th = np.linspace(0.1, 6.0, 17)
    vals = phi(np.exp(1j * th), np.exp(1j * th[::-1]))
    assert np.max(np.abs(np.abs(vals) - 1.0)) < 1e-12


def test_rif_contracts_interior():
    phi = Rif(P_FAV)
    rng = np.random.default_rng(3)
    z = 0.8 * np.sqrt(rng.uniform(size=(40, 2))) \
        * np.exp(2j * np.pi * rng.uniform(size=(40, 2)))
    assert np.max(np.abs(phi(z[:, 0], z[:, 1]))) < 1.0


def test_rif_requires_positive_degrees():
    flat = PolyMD(np.array([[2.0, -1.0]], dtype=complex))  # degree 0 in z1
    with pytest.raises(ValueError):
        Rif(flat)


def test_level_coeffs_definition():
    phi = Rif(P_FAV)
    alpha = np.exp(0.4j)
    h = phi.level_coeffs(alpha)
    assert np.allclose(h, phi.num.coeffs - alpha * P_FAV.coeffs)
