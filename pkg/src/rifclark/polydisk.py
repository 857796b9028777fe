"""Clark structure on the tridisk.

For a RIF in three variables whose denominator is zero-free on the
closed tridisk, the Clark measure at every unimodular alpha is absolutely
continuous over the first two torus coordinates: graphs
zeta3 = g_j(zeta1, zeta2) weighted by 1/|d phi / d z3|.  The general
builder below handles that singularity-free case; the one-parameter
family phi_s = (s z1 z2 z3 - z1 z2 - z1 z3 - z2 z3)/(s - z1 - z2 - z3)
additionally has closed-form level surfaces and weights, which remain
usable at the singular border case s = 3 where the builder must refuse.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import poly as _poly
from .errors import RootFindFailure, SingularDenominator, UnstableDenominator
from .poly import Rif, companion_roots, derivative_coeffs, slice_coeffs, \
    stability_check
from .util import TWO_PI

__all__ = [
    "HyperBranch", "build_measure_d", "integrate_d", "total_mass_d",
    "tridisk_level", "tridisk_weight", "verify_poisson_d", "PoissonReportD",
    "two_path_witness", "level_surface_rows",
]


@dataclass
class HyperBranch:
    """One sheet zeta3 = g(zeta1, zeta2) of a level set over the 2-torus."""

    alpha: complex
    theta1: np.ndarray
    theta2: np.ndarray
    values: np.ndarray   # (N, N)
    weights: np.ndarray  # (N, N)


def build_measure_d(phi: Rif, alpha: complex,
                    grid_n: int = 256) -> list[HyperBranch]:
    """Hyper-branches of the Clark measure of a singularity-free 3-var RIF.

    Requires the stability certificate to keep a margin off the boundary
    (min slice-root modulus > 1 + 1e-6); denominators with boundary
    zeros — phi_3 at (1,1,1) for instance — are refused, since the
    absolutely-continuous structure formula breaks down there.
    Continuation runs along axis 1 first, then down axis 2, row-major.
    """
    if phi.dim != 3:
        raise ValueError("build_measure_d handles exactly three variables")
    if abs(abs(complex(alpha)) - 1.0) > 1e-9:
        raise ValueError("alpha must be unimodular")
    cert = stability_check(phi.den)
    if not cert.is_stable or cert.min_modulus_on_grid <= 1.0 + 1e-6:
        raise UnstableDenominator(
            f"denominator has a zero within {cert.min_modulus_on_grid - 1.0:.3g} "
            "of the closed tridisk boundary; the graph structure formula "
            "does not apply")
    N = grid_n
    theta = TWO_PI * np.arange(N) / N
    zg = np.exp(1j * theta)
    h = phi.level_coeffs(alpha)
    n_br = phi.degrees[-1]

    Z1, Z2 = np.meshgrid(zg, zg, indexing="ij")
    pts = np.stack([Z1.ravel(), Z2.ravel()], axis=-1)
    rows = slice_coeffs(h, pts)

    if n_br == 1:
        vals = (-rows[:, 0] / rows[:, 1]).reshape(1, N, N)
    else:
        roots = companion_roots(rows)
        if any(len(r) != n_br for r in roots):
            raise RootFindFailure(
                "a slice dropped degree; the surface is not a clean cover "
                "of the 2-torus")
        vals = np.empty((n_br, N, N), dtype=complex)
        grid_roots = np.array(roots).reshape(N, N, n_br)
        # first row: 1-D continuation in theta1
        first = grid_roots[0, 0][np.argsort(np.angle(grid_roots[0, 0]))]
        row_vals = np.empty((N, n_br), dtype=complex)
        row_vals[0] = first
        for i in range(1, N):
            row_vals[i] = _nearest_perm(row_vals[i - 1], grid_roots[i, 0])
        vals[:, :, 0] = row_vals.T
        # remaining: march down axis 2, all columns at once
        prev = row_vals
        for j in range(1, N):
            prev = _nearest_perm_rows(prev, grid_roots[:, j])
            vals[:, :, j] = prev.T
        # Newton polish
        drows = rows[:, 1:] * np.arange(1, rows.shape[1])
        flat = vals.reshape(n_br, -1)
        for _ in range(3):
            f = _eval_rows(rows, flat)
            fp = _eval_rows(drows, flat)
            good = np.abs(fp) > 1e-12
            flat = flat - np.where(good, f / np.where(good, fp, 1.0), 0.0)
        vals = flat.reshape(n_br, N, N)

    hd = derivative_coeffs(h, 3)
    out = []
    pden = phi.den
    for b in range(n_br):
        zs = [Z1, Z2, vals[b]]
        num = np.abs(_poly._eval_tensor(pden.coeffs, zs))
        den = np.abs(_poly._eval_tensor(hd, zs))
        out.append(HyperBranch(alpha=complex(alpha), theta1=theta,
                               theta2=theta, values=vals[b],
                               weights=num / den))
    return out


def _eval_rows(rows, w):
    """rows (M, k+1) per-point coefficients; w (n, M) points."""
    acc = np.broadcast_to(rows[:, -1], w.shape).copy()
    for k in range(rows.shape[1] - 2, -1, -1):
        acc = acc * w + rows[:, k]
    return acc


def _nearest_perm(ref, roots):
    """Order ``roots`` to match ``ref`` (small root counts, greedy)."""
    n = len(ref)
    out = np.empty(n, dtype=complex)
    used = np.zeros(len(roots), dtype=bool)
    for a in np.argsort([np.min(np.abs(roots - r)) for r in ref]):
        d = np.abs(roots - ref[a])
        d[used] = np.inf
        j = int(np.argmin(d))
        out[a] = roots[j]
        used[j] = True
    return out


def _nearest_perm_rows(prev, roots_rows):
    """Match each row of roots (N, n) against prev (N, n), vectorized for
    n = 2 and loop otherwise."""
    N, n = prev.shape
    if n == 2:
        keep = (np.abs(roots_rows[:, 0] - prev[:, 0])
                + np.abs(roots_rows[:, 1] - prev[:, 1]))
        swap = (np.abs(roots_rows[:, 1] - prev[:, 0])
                + np.abs(roots_rows[:, 0] - prev[:, 1]))
        take_swap = swap < keep
        out = roots_rows.copy()
        out[take_swap] = roots_rows[take_swap][:, ::-1]
        return out
    out = np.empty_like(prev)
    for i in range(N):
        out[i] = _nearest_perm(prev[i], roots_rows[i])
    return out


def integrate_d(branches: list[HyperBranch], f) -> complex:
    """Tensor-trapezoid integration of f(z1, z2, z3) over the hyper-branches."""
    total = 0.0 + 0.0j
    for hb in branches:
        Z1 = np.exp(1j * hb.theta1)[:, None]
        Z2 = np.exp(1j * hb.theta2)[None, :]
        total += np.mean(hb.weights * f(Z1, Z2, hb.values))
    return complex(total)


def total_mass_d(branches: list[HyperBranch]) -> float:
    return float(np.real(integrate_d(
        branches, lambda a, b, c: np.ones(np.broadcast(a, b, c).shape))))


# ---------------------------------------------------------------------------
# the tridisk family
# ---------------------------------------------------------------------------

def _family_check(s: float):
    s = float(s)
    if s < 3.0:
        raise ValueError("the family needs s >= 3 (inner only there)")
    return s


def tridisk_level(s: float, alpha: complex, zeta1, zeta2):
    """Third coordinate of the alpha-level surface of phi_s over (zeta1, zeta2).

    psi = (alpha s - alpha z1 - alpha z2 + z1 z2) /
          (s z1 z2 - z1 - z2 + alpha); the denominator vanishes only at
    s = 3, alpha = -1, (1, 1), which raises SingularDenominator.
    """
    s = _family_check(s)
    a = complex(alpha)
    z1 = np.asarray(zeta1, dtype=complex)
    z2 = np.asarray(zeta2, dtype=complex)
    den = s * z1 * z2 - z1 - z2 + a
    if np.any(np.abs(den) < 1e-12 * (s + 3.0)):
        raise SingularDenominator(
            "level-surface denominator vanishes (s = 3, alpha = -1 corner)")
    out = (a * s - a * z1 - a * z2 + z1 * z2) / den
    return complex(out) if out.ndim == 0 else out


def tridisk_weight(s: float, alpha: complex, zeta1, zeta2):
    """Closed-form Clark weight W_{s,alpha}(zeta1, zeta2) of the family."""
    s = _family_check(s)
    a = complex(alpha)
    z1 = np.asarray(zeta1, dtype=complex)
    z2 = np.asarray(zeta2, dtype=complex)
    den = s * z1 * z2 - z1 - z2 + a
    if np.any(np.abs(den) < 1e-12 * (s + 3.0)):
        raise SingularDenominator(
            "weight denominator vanishes (s = 3, alpha = -1 corner)")
    num = (s * s * z1 * z2 - s * (z1 * z1 * z2 + z1 * z2 * z2 + z1 + z2)
           + z1 * z1 + z1 * z2 + z2 * z2)
    out = np.abs(num) / np.abs(den) ** 2
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class PoissonReportD:
    lhs: float
    rhs: float

    @property
    def abs_err(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def rel_err(self) -> float:
        return self.abs_err / abs(self.lhs)


def _poisson1(zeta, z):
    return (1.0 - abs(z) ** 2) / np.abs(zeta - z) ** 2


def verify_poisson_d(s: float, alpha: complex, z, grid_n: int = 512,
                     refine: bool | None = None) -> PoissonReportD:
    """Three-variable Poisson identity for phi_s via the closed-form weight.

    The right side integrates W_{s,alpha} * P_z over the 2-torus by the
    tensor trapezoid rule.  For s = 3 the weight loses smoothness at
    (1, 1), so cells near that corner are re-averaged on an 8x-refined
    subgrid (on by default exactly when s == 3).
    """
    s = _family_check(s)
    a = complex(alpha)
    z = np.asarray(z, dtype=complex)
    if z.shape != (3,) or np.any(np.abs(z) >= 1.0):
        raise ValueError("z must be an interior point of the tridisk")
    if refine is None:
        refine = s == 3.0

    from .catalog import tridisk_rif
    phi = tridisk_rif(s)
    v = complex(phi(z[0], z[1], z[2]))
    lhs = (1.0 - abs(v) ** 2) / abs(a - v) ** 2

    N = grid_n
    theta = TWO_PI * np.arange(N) / N

    def node_values(t1, t2):
        z1 = np.exp(1j * t1)
        z2 = np.exp(1j * t2)
        w = tridisk_weight(s, a, z1, z2)
        psi = tridisk_level(s, a, z1, z2)
        return w * (_poisson1(z1, z[0]) * _poisson1(z2, z[1])
                    * _poisson1(psi, z[2]))

    T1, T2 = np.meshgrid(theta, theta, indexing="ij")
    vals = node_values(T1, T2)
    rhs = float(np.mean(vals))

    if refine:
        # swap the coarse estimate of the window around (1, 1) for an
        # 8x-refined one; both window rules are composite trapezoids with
        # matching boundary weights, so the substitution only changes the
        # window's interior quadrature error
        half = 0.5
        dtheta = TWO_PI / N
        k = int(np.ceil(half / dtheta))

        def window_trapz(step):
            g = np.arange(-k * 8, k * 8 + 1, step) * (dtheta / 8.0)
            wq = np.ones(len(g))
            wq[0] = wq[-1] = 0.5
            v = node_values(g[:, None], g[None, :])
            cell = step * dtheta / 8.0
            return float(np.real((wq[:, None] * wq[None, :] * v).sum())) \
                * cell * cell / TWO_PI ** 2

        rhs += window_trapz(1) - window_trapz(8)
    return PoissonReportD(lhs=lhs, rhs=rhs)


def two_path_witness(k_range: tuple[int, int] = (6, 16)) -> tuple[complex, complex, float]:
    """Two-path limits of psi_3^{-1} at (1, 1): the level surface has a jump.

    Along (e^{it}, e^{-it}) the surface coordinate is identically -1;
    along (e^{it}, e^{it}) it tends to +1.  Returns (limit_conj, limit_diag,
    gap) with the limits Richardson-extrapolated in t.
    """
    k_lo, k_hi = k_range
    ts = 2.0 ** -np.arange(k_lo, k_hi + 1)

    def extrapolate(seq):
        T = np.asarray(seq, dtype=complex)
        for j in range(1, len(seq)):
            T = T[1:] + (T[1:] - T[:-1]) / (2.0 ** j - 1.0)
        return complex(T[0])

    conj_path = [tridisk_level(3.0, -1.0, np.exp(1j * t), np.exp(-1j * t))
                 for t in ts]
    diag_path = [tridisk_level(3.0, -1.0, np.exp(1j * t), np.exp(1j * t))
                 for t in ts]
    la = extrapolate(conj_path)
    lb = extrapolate(diag_path)
    return la, lb, abs(la - lb)


def level_surface_rows(s: float, alpha: complex, grid_n: int = 128):
    """Rows (theta1, theta2, arg psi) sampling the level surface."""
    s = _family_check(s)
    theta = TWO_PI * np.arange(grid_n) / grid_n
    T1, T2 = np.meshgrid(theta, theta, indexing="ij")
    psi = tridisk_level(s, complex(alpha), np.exp(1j * T1), np.exp(1j * T2))
    ang = np.angle(psi)
    return np.stack([T1.ravel(), T2.ravel(), ang.ravel()], axis=-1)
