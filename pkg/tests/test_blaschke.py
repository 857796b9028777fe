import numpy as np
import pytest

from rifclark import blaschke, catalog
from rifclark.errors import IdenticallyZeroSlice

ALPHA = np.exp(0.7j)


def fav_branch(alpha, z1):
    return (2 * alpha + (1 - alpha) * z1) / (2 * z1 - 1 + alpha)


def fav_weight(alpha, z1):
    return 2 * abs(z1 - 1) ** 2 / abs(2 * z1 - 1 + alpha) ** 2


def test_slice_roots_match_closed_form():
    phi = catalog.simple_singular_rif()
    for th in (0.3, 1.1, 2.9, 5.0):
        z1 = np.exp(1j * th)
        sr = blaschke.slice_roots(phi, ALPHA, z1)
        assert len(sr.roots) == 1
        assert abs(sr.roots[0] - fav_branch(ALPHA, z1)) < 1e-12
        assert sr.unimodular[0]
        assert not sr.degree_dropped


def test_slice_atom_mass_matches_closed_form():
    phi = catalog.simple_singular_rif()
    for th in (0.3, 1.1, 2.9):
        z1 = np.exp(1j * th)
        atoms = blaschke.slice_clark_atoms(phi, ALPHA, z1)
        assert len(atoms) == 1
        assert abs(atoms[0].mass - fav_weight(ALPHA, z1)) < 1e-12
        assert not atoms[0].degenerate


def test_two_roots_per_slice_for_squared_rif():
    phi = catalog.squared_singular_rif()
    z1 = np.exp(0.4j)
    sr = blaschke.slice_roots(phi, ALPHA, z1)
    assert len(sr.roots) == 2
    for r in sr.roots:
        assert abs(complex(phi(z1, r)) - ALPHA) < 1e-10
    # the two roots are the two square roots of the induced degree-1 branch
    assert abs(sr.roots[0] + sr.roots[1]) < 1e-10


def test_atom_masses_sum_to_one_variable_clark_mass():
    # slicing first yields a one-variable inner function b(w) = phi(z1, w);
    # its Clark measure at alpha has total mass (1-|b(0)|^2)/|alpha-b(0)|^2
    phi = catalog.squared_singular_rif()
    z1 = np.exp(0.4j)
    atoms = blaschke.slice_clark_atoms(phi, ALPHA, z1)
    b0 = complex(phi(z1, 0.0))
    expect = (1 - abs(b0) ** 2) / abs(ALPHA - b0) ** 2
    assert abs(sum(a.mass for a in atoms) - expect) < 1e-10


def test_identically_zero_slice_raises():
    phi = catalog.simple_singular_rif()
    with pytest.raises(IdenticallyZeroSlice):
        blaschke.slice_roots(phi, -1.0 + 0.0j, 1.0 + 0.0j)


def test_slice_through_singularity_is_degenerate():
    phi = catalog.simple_singular_rif()
    atoms = blaschke.slice_clark_atoms(phi, 1.0 + 0.0j, 1.0 + 0.0j)
    assert len(atoms) == 1
    assert abs(atoms[0].point - 1.0) < 1e-8
    assert atoms[0].degenerate
    assert atoms[0].mass == 0.0


def test_monomial_slice():
    phi = catalog.monomial_rif()
    z1 = np.exp(1.3j)
    sr = blaschke.slice_roots(phi, ALPHA, z1)
    assert abs(sr.roots[0] - ALPHA * np.conj(z1)) < 1e-13
    atoms = blaschke.slice_clark_atoms(phi, ALPHA, z1)
    assert abs(atoms[0].mass - 1.0) < 1e-13


def test_wrong_slice_arity_rejected():
    phi = catalog.simple_singular_rif()
    with pytest.raises(ValueError):
        blaschke.slice_roots(phi, ALPHA, (0.5, 0.5))
