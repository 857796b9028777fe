"""Ready-made rational inner functions used in tests and documentation.

All of them are built from small stable denominators; the names describe
their structure, not their provenance.
"""

from __future__ import annotations

import numpy as np

from .poly import PolyMD, Rif


def monomial_rif(d: int = 2) -> Rif:
    """z_1 * ... * z_d, realized as reflect(1) / 1 at degrees (1, ..., 1)."""
    coeffs = np.ones((1,) * d, dtype=np.complex128)
    return Rif(PolyMD(coeffs), degrees=(1,) * d)


def simple_singular_rif() -> Rif:
    """(2 z1 z2 - z1 - z2) / (2 - z1 - z2).

    Bidegree (1, 1), one boundary singularity at (1, 1), where the
    function has nontangential value -1.
    """
    c = np.zeros((2, 2), dtype=np.complex128)
    c[0, 0] = 2.0
    c[1, 0] = -1.0
    c[0, 1] = -1.0
    return Rif(PolyMD(c))


def squared_singular_rif() -> Rif:
    """(2 z1^2 z2^2 - z1^2 - z2^2) / (2 - z1^2 - z2^2).

    The simple singular example composed with (z1^2, z2^2): bidegree
    (2, 2), four boundary singularities (+-1, +-1), and alpha = -1 is an
    exceptional value with line components on both axes.
    """
    c = np.zeros((3, 3), dtype=np.complex128)
    c[0, 0] = 2.0
    c[2, 0] = -1.0
    c[0, 2] = -1.0
    return Rif(PolyMD(c))


def product_singular_rif() -> Rif:
    """z1 z2 * (2 z1 z2 - z1 - z2) / (2 - z1 - z2).

    Same denominator as the simple singular example but reflected at
    degrees (2, 2); the two level-set branches touch at the boundary
    singularity when alpha = -1, which stresses branch relabeling.
    """
    c = np.zeros((2, 2), dtype=np.complex128)
    c[0, 0] = 2.0
    c[1, 0] = -1.0
    c[0, 1] = -1.0
    return Rif(PolyMD(c), degrees=(2, 2))


def diagonal_rif() -> Rif:
    """(1 + 2 z1 z2) / (2 + z1 z2); value 1/2 at the origin, no singularities."""
    c = np.zeros((2, 2), dtype=np.complex128)
    c[0, 0] = 2.0
    c[1, 1] = 1.0
    return Rif(PolyMD(c))


def tridisk_rif(s: float) -> Rif:
    """(s z1 z2 z3 - z1 z2 - z1 z3 - z2 z3) / (s - z1 - z2 - z3).

    Inner on the tridisk for s >= 3; s = 3 has a boundary zero at
    (1, 1, 1) and s > 3 is stable on the closed tridisk.
    """
    if s < 3:
        raise ValueError("family requires s >= 3")
    c = np.zeros((2, 2, 2), dtype=np.complex128)
    c[0, 0, 0] = s
    c[1, 0, 0] = -1.0
    c[0, 1, 0] = -1.0
    c[0, 0, 1] = -1.0
    return Rif(PolyMD(c))
