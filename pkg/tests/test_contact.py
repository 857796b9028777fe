import numpy as np
import pytest

from rifclark import contact
from rifclark.errors import FitDegenerate, NonConvergent

SING = (1.0 + 0.0j, 1.0 + 0.0j)


def test_weight_vanishes_quadratically_alpha_one(fav):
    fit = contact.weight_vanish_order(fav, 1.0 + 0.0j, SING)
    assert abs(fit.exponent - 2.0) < 1e-3
    assert fit.rounded == 2
    # W = 1 - cos(theta) = |zeta - 1|^2 / 2 exactly, so the bracket
    # constants both sit at 1/2
    assert abs(fit.c_lower - 0.5) < 1e-6
    assert abs(fit.c_upper - 0.5) < 1e-6
    assert fit.r_squared > 0.999999


def test_weight_vanish_order_other_alphas(fav):
    for alpha in (1.0j, np.exp(1j * np.pi / 3)):
        fit = contact.weight_vanish_order(fav, alpha, SING)
        assert abs(fit.exponent - 2.0) < 0.01
        assert fit.rounded == 2
        assert 0.0 < fit.c_lower <= fit.c_upper
        assert fit.r_squared >= 0.999
        # both one-sided fits agree on the exponent
        s1, s2 = fit.side_exponents
        assert abs(s1 - s2) < 0.05


def test_contact_exponent_is_alpha_independent(fav):
    exps = [contact.weight_vanish_order(fav, a, SING).exponent
            for a in (1.0 + 0.0j, 1.0j, np.exp(0.4j))]
    assert max(exps) - min(exps) < 0.01


def test_squared_rif_contact_at_all_corners(squared):
    fit = contact.weight_vanish_order(squared, 1.0j, (1.0 + 0.0j, 1.0 + 0.0j))
    assert fit.rounded == 2 and abs(fit.exponent - 2.0) < 0.05
    fit = contact.weight_vanish_order(squared, 1.0j,
                                      (-1.0 + 0.0j, -1.0 + 0.0j))
    assert fit.rounded == 2 and abs(fit.exponent - 2.0) < 0.05


def test_branch_contact_order(fav):
    order = contact.branch_contact_order(fav, SING, 1.0j, np.exp(0.4j))
    assert order.rounded == 2
    assert abs(order.exponent - 2.0) < 0.05
    assert order.r_squared >= 0.999


def test_branch_contact_order_rejects_exceptional(fav):
    with pytest.raises(ValueError):
        contact.branch_contact_order(fav, SING, -1.0 + 0.0j, 1.0j)
    with pytest.raises(ValueError):
        contact.branch_contact_order(fav, SING, 1.0j, 1.0j)


def test_nontangential_value_at_singularity(fav):
    nt = contact.nontangential_value(fav, SING)
    assert abs(nt - (-1.0)) < 1e-9


def test_nontangential_value_at_regular_point(fav):
    # at a regular boundary point the limit is just the boundary value
    z = (np.exp(0.5j), np.exp(1.2j))
    nt = contact.nontangential_value(fav, z)
    assert abs(nt - complex(fav(*z))) < 1e-8


def test_nontangential_value_in_three_variables():
    from rifclark import catalog

    phi3 = catalog.tridisk_rif(3.0)
    nt = contact.nontangential_value(phi3, (1.0, 1.0, 1.0))
    assert abs(nt - (-1.0)) < 1e-9


def test_fit_degenerate_at_non_vanishing_point(fav):
    # (zeta, g(zeta)) away from the singularity: the weight tends to a
    # positive constant, so no power law fits
    with pytest.raises((FitDegenerate, ValueError)):
        contact.weight_vanish_order(fav, 1.0j, (np.exp(2.0j), np.exp(1.0j)))


def test_contact_report_structure(fav):
    rep = contact.contact_report(fav, SING, [1.0 + 0.0j, 1.0j])
    assert abs(rep.nontangential_value - (-1.0)) < 1e-8
    assert len(rep.fits) == 2
    obj = contact.report_to_obj(rep)
    assert obj["fits"][0]["rounded"] == 2
    assert obj["location"][0] == 1.0 + 0.0j
