"""Finite-rank checks of the Clark embedding into L^2 of a Clark measure.

The embedding sends the deflated reproducing kernel at w to
(1 - alpha * conj(phi(w))) times the Szego product kernel C_w, and is an
isometry on their span.  Whether it is onto is governed by a density
dichotomy: for generic alpha the conjugate coordinates zeta-bar_j agree
with rational functions of zeta on the support (so polynomials are
dense), while line components at exceptional alpha force a positive
distance.  All three facets are checked numerically here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import poly as _poly
from .clark import ClarkMeasure, _merged_nodes, total_mass
from .errors import DenominatorVanishes
from .levelset import trace_branches
from .poly import PolyMD, Rif, companion_roots, trim
from .util import TWO_PI


@dataclass(frozen=True)
class GramReport:
    sample_points: np.ndarray
    gram_model: np.ndarray
    gram_embedded: np.ndarray
    max_abs_error: float


@dataclass(frozen=True)
class DensityReport:
    alpha: complex
    degree: int
    distance_zbar2: float
    distance_zbar1: float
    gram_rank: int
    verdict: str


def _szego(w, z1, z2):
    """Product Szego kernel C_w(z) = prod_t 1/(1 - conj(w_t) z_t)."""
    return 1.0 / ((1.0 - np.conj(w[0]) * z1) * (1.0 - np.conj(w[1]) * z2))


def gram_isometry_check(phi: Rif, alpha: complex, points,
                        measure: ClarkMeasure) -> GramReport:
    """Compare kernel inner products in the model space and in L^2(sigma).

    gram_model[i][j] = (1 - conj(phi(w_i)) phi(w_j)) C_{w_i}(w_j);
    gram_embedded[i][j] integrates the embedded kernels against the
    measure.  For an exact embedding the two agree; the gap measures
    quadrature error.
    """
    w = np.asarray([(complex(a), complex(b)) for a, b in points],
                   dtype=complex)
    if np.any(np.abs(w) >= 1.0):
        raise ValueError("sample points must lie inside the bidisk")
    if abs(complex(alpha) - complex(measure.alpha)) > 1e-9:
        raise ValueError("alpha does not match the measure")
    M = len(w)
    phw = phi(w[:, 0], w[:, 1])
    cw = 1.0 / ((1.0 - np.conj(w[:, 0])[:, None] * w[None, :, 0])
                * (1.0 - np.conj(w[:, 1])[:, None] * w[None, :, 1]))
    model = (1.0 - np.conj(phw)[:, None] * phw[None, :]) * cw

    prefac = 1.0 - complex(measure.alpha) * np.conj(phw)
    embedded = np.zeros((M, M), dtype=complex)
    for br in measure.branches:
        zeta1, vals, wts, quad = _merged_nodes(br)
        F = prefac[:, None] * _szego((w[:, 0][:, None], w[:, 1][:, None]),
                                     zeta1[None, :], vals[None, :])
        embedded += (F * (quad * wts)) @ np.conj(F).T
    if measure.lines:
        zg = np.exp(1j * measure.theta)
        for line in measure.lines:
            F = prefac[:, None] * _szego((w[:, 0][:, None], w[:, 1][:, None]),
                                         np.full_like(zg, line.tau)[None, :],
                                         zg[None, :])
            embedded += (line.constant / len(zg)) * (F @ np.conj(F).T)
    err = float(np.max(np.abs(model - embedded)))
    return GramReport(sample_points=w, gram_model=model,
                      gram_embedded=embedded, max_abs_error=err)


# ---------------------------------------------------------------------------
# conjugate coordinates as rational functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConjRational:
    """Rational representatives of conj(zeta1) and conj(zeta2) on the level set.

    Splitting p = p1(z2) + z1 p2(z) and the reflection q = q1(z2) + z1 q2(z)
    by powers of z1, the level relation q = alpha p solves for
    conj(zeta1) = (alpha p2 - q2)/(q1 - alpha p1) on the torus; same with
    the variables exchanged for conj(zeta2).  Both denominators are
    univariate and must be zero-free on the closed disk.
    """

    alpha: complex
    r1_num: PolyMD
    r1_den: PolyMD
    r2_num: PolyMD
    r2_den: PolyMD
    max_residual: tuple[float, float]

    def r1(self, z1, z2):
        return (_poly.eval_poly(self.r1_num, (z1, z2))
                / _poly.eval_poly(self.r1_den, (z1, z2)))

    def r2(self, z1, z2):
        return (_poly.eval_poly(self.r2_num, (z1, z2))
                / _poly.eval_poly(self.r2_den, (z1, z2)))


def _split_axis1(coeffs):
    """p = head(z2) + z1 * tail(z1, z2): return (head, tail) tensors."""
    head = coeffs[0:1, :]
    tail = coeffs[1:, :] if coeffs.shape[0] > 1 else np.zeros((1, coeffs.shape[1]),
                                                              dtype=complex)
    return head, tail


def conj_rational(phi: Rif, alpha: complex, grid_n: int = 512,
                  branches=None) -> ConjRational:
    """Build the rational functions agreeing with conj(zeta_j) on the level set.

    Raises DenominatorVanishes when a denominator has a root on the
    closed unit disk — the hallmark of an exceptional alpha.  The
    ``max_residual`` field records sup |R_j - conj(zeta_j)| over traced
    branch samples as an end-to-end consistency check.
    """
    alpha = complex(alpha)
    p = phi.den.coeffs
    q = phi.num.coeffs

    def build(pc, qc):
        p1, p2 = _split_axis1(pc)
        q1, q2 = _split_axis1(qc)
        num = np.zeros(np.maximum(p2.shape, q2.shape), dtype=complex)
        num[: p2.shape[0], : p2.shape[1]] += alpha * p2
        num[: q2.shape[0], : q2.shape[1]] -= q2
        den = np.zeros(max(p1.shape[1], q1.shape[1]), dtype=complex)
        den[: q1.shape[1]] += q1[0]
        den[: p1.shape[1]] -= alpha * p1[0]
        den_t = trim(den)
        if np.max(np.abs(den_t)) < 1e-14:
            raise DenominatorVanishes(
                "conjugate-coordinate denominator is identically zero")
        roots = companion_roots(den_t[None, :])[0]
        if roots.size and np.min(np.abs(roots)) <= 1.0 + 1e-9:
            raise DenominatorVanishes(
                f"denominator root of modulus "
                f"{float(np.min(np.abs(roots))):.6g} inside the closed disk "
                "(alpha is exceptional)")
        return num, den_t

    n1, d1 = build(p, q)
    n2t, d2t = build(p.T, q.T)
    r1_num = PolyMD(trim(n1))
    r1_den = PolyMD(d1[None, :])  # constant in z1
    r2_num = PolyMD(trim(n2t.T))
    r2_den = PolyMD(d2t[:, None])  # constant in z2

    cr = ConjRational(alpha=alpha, r1_num=r1_num, r1_den=r1_den,
                      r2_num=r2_num, r2_den=r2_den, max_residual=(0.0, 0.0))
    if branches is None:
        branches = trace_branches(phi, alpha, grid_n, spike_refine=False)
    res1 = res2 = 0.0
    for br in branches:
        z1 = np.exp(1j * br.theta)
        res1 = max(res1, float(np.max(np.abs(cr.r1(z1, br.values)
                                             - np.conj(z1)))))
        res2 = max(res2, float(np.max(np.abs(cr.r2(z1, br.values)
                                             - np.conj(br.values)))))
    return ConjRational(alpha=alpha, r1_num=r1_num, r1_den=r1_den,
                        r2_num=r2_num, r2_den=r2_den,
                        max_residual=(res1, res2))


# ---------------------------------------------------------------------------
# density of polynomials in L^2(sigma)
# ---------------------------------------------------------------------------

def _torus_moments(measure: ClarkMeasure, S: int) -> np.ndarray:
    """Moment table M[s, t] = integral of zeta1^s zeta2^t, |s|,|t| <= S."""
    exps = np.arange(-S, S + 1)
    M = np.zeros((2 * S + 1, 2 * S + 1), dtype=complex)
    for br in measure.branches:
        zeta1, vals, wts, quad = _merged_nodes(br)
        A = zeta1[None, :] ** exps[:, None]
        B = vals[None, :] ** exps[:, None]
        M += (A * (quad * wts)) @ B.T
    for line in measure.lines:
        M[:, S] += line.constant * (np.asarray(line.tau) ** exps)
    return M


def density_distance(measure: ClarkMeasure, degree: int) -> DensityReport:
    """L^2(sigma) distance from conj(zeta_2) (and conj(zeta_1)) to the span
    of monomials zeta1^a zeta2^b with 0 <= a, b <= degree.

    The Gram of the monomials is assembled from the measure's moment
    table and inverted by a truncated spectral pseudoinverse (cutoff
    1e-10 of the top eigenvalue) — level-set measures make the monomials
    far from independent, so plain solves would be meaningless.
    """
    if degree < 1:
        raise ValueError("degree must be at least 1")
    D = degree
    S = D + 1
    M = _torus_moments(measure, S)
    mass = float(np.real(M[S, S]))

    idx = np.arange(D + 1)
    aa, bb = [g.ravel() for g in np.meshgrid(idx, idx, indexing="ij")]
    G = M[aa[:, None] - aa[None, :] + S, bb[:, None] - bb[None, :] + S]
    lam, U = np.linalg.eigh((G + np.conj(G).T) / 2.0)
    cutoff = 1e-10 * float(lam[-1])
    keep = lam > cutoff
    rank = int(np.sum(keep))

    def dist_to(v):
        y = np.conj(U[:, keep]).T @ v
        proj = float(np.real(np.sum(np.abs(y) ** 2 / lam[keep])))
        return float(np.sqrt(max(0.0, mass - proj)))

    v2 = M[-aa + S, -bb - 1 + S]
    v1 = M[-aa - 1 + S, -bb + S]
    d2 = dist_to(v2)
    d1 = dist_to(v1)
    if d2 < 0.05:
        verdict = "consistent_with_unitary"
    elif d2 > 0.3:
        verdict = "consistent_with_nonunitary"
    else:
        verdict = "inconclusive"
    return DensityReport(alpha=complex(measure.alpha), degree=D,
                         distance_zbar2=d2, distance_zbar1=d1,
                         gram_rank=rank, verdict=verdict)
