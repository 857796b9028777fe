"""Dense multivariate polynomials, reflection, and stability certification.

A polynomial in d complex variables is stored as a dense coefficient
tensor ``coeffs`` of shape ``(n_1 + 1, ..., n_d + 1)`` where
``coeffs[j_1, ..., j_d]`` multiplies ``z_1**j_1 * ... * z_d**j_d``.
Declared degrees must be attained: the top slab of every axis has to
contain a coefficient of modulus above a small absolute floor.

The reflection of p at degrees (n_1, ..., n_d) is

    p~(z) = z_1**n_1 * ... * z_d**n_d * conj(p(1/conj(z_1), ..., 1/conj(z_d)))

which on the coefficient tensor is "reverse every axis and conjugate".
A rational inner function (RIF) is the ratio p~/p for a stable p, with
the reflection optionally taken at degrees larger than deg(p); the extra
degrees contribute a monomial factor (e.g. z1*z2 = reflect(1, (1,1)) / 1).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import DegreeNotAttained, RootFindFailure, ZeroPolynomial

ATTAIN_TOL = 1e-14


def _as_coeff_tensor(coeffs):
    arr = np.asarray(coeffs, dtype=np.complex128)
    if arr.ndim == 0:
        arr = arr.reshape(1)
    return arr


@dataclass(frozen=True)
class PolyMD:
    """Dense polynomial in d >= 1 complex variables.

    Parameters
    ----------
    coeffs : array_like
        Complex tensor of shape (n_1+1, ..., n_d+1). The shape declares
        the degrees, which must be attained within an absolute tolerance
        of 1e-14 on the relevant coefficient slabs.
    """

    coeffs: np.ndarray = field(repr=False)

    def __init__(self, coeffs):
        arr = _as_coeff_tensor(coeffs)
        scale = float(np.max(np.abs(arr))) if arr.size else 0.0
        if scale == 0.0:
            raise ZeroPolynomial("all coefficients vanish")
        for axis in range(arr.ndim):
            top = np.take(arr, arr.shape[axis] - 1, axis=axis)
            if arr.shape[axis] > 1 and np.max(np.abs(top)) <= ATTAIN_TOL:
                raise DegreeNotAttained(
                    f"declared degree {arr.shape[axis] - 1} in variable "
                    f"{axis + 1} is not attained"
                )
        object.__setattr__(self, "coeffs", arr)

    @property
    def dim(self) -> int:
        return self.coeffs.ndim

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(s - 1 for s in self.coeffs.shape)

    def __call__(self, *z):
        return eval_poly(self, z)

    def coefficient_scale(self) -> float:
        return float(np.sum(np.abs(self.coeffs)))


def trim(coeffs, rel_tol=1e-14):
    """Drop trailing coefficient slabs that are negligible on every axis."""
    arr = _as_coeff_tensor(coeffs)
    scale = float(np.max(np.abs(arr)))
    if scale == 0.0:
        raise ZeroPolynomial("cannot trim the zero polynomial")
    for axis in range(arr.ndim):
        keep = arr.shape[axis]
        while keep > 1:
            top = np.take(arr, keep - 1, axis=axis)
            if np.max(np.abs(top)) > rel_tol * scale:
                break
            keep -= 1
        arr = np.take(arr, range(keep), axis=axis)
    return arr


def reflect(p: PolyMD, degrees=None) -> PolyMD:
    """Reflection of p at the given degrees (default: the degrees of p).

    Reversing and conjugating the coefficient tensor is exact, so
    reflecting twice at the same degrees returns the input bit for bit.
    Degrees larger than deg(p) pad with an explicit monomial factor.
    """
    if degrees is None:
        degrees = p.degrees
    degrees = tuple(int(n) for n in degrees)
    if len(degrees) != p.dim:
        raise ValueError("degree tuple has wrong length")
    if any(n < d for n, d in zip(degrees, p.degrees)):
        raise ValueError(f"reflection degrees {degrees} below deg(p) {p.degrees}")
    arr = np.conj(p.coeffs[tuple(slice(None, None, -1) for _ in range(p.dim))])
    pad = [(n - d, 0) for n, d in zip(degrees, p.degrees)]
    arr = np.pad(arr, pad)
    return PolyMD(arr)


def eval_poly(p: PolyMD, z):
    """Evaluate p at one point or at broadcastable coordinate arrays.

    ``z`` is a sequence of d scalars or d equal-shaped arrays.
    """
    zs = [np.asarray(zj, dtype=np.complex128) for zj in z]
    if len(zs) != p.dim:
        raise ValueError(f"expected {p.dim} coordinates, got {len(zs)}")
    return _eval_tensor(p.coeffs, zs)


def _eval_tensor(coeffs, zs):
    d = coeffs.ndim
    if d == 1:
        return npoly.polyval(zs[0], coeffs)
    zs = np.broadcast_arrays(*zs)
    if d == 2:
        return npoly.polyval2d(zs[0], zs[1], coeffs)
    if d == 3:
        return npoly.polyval3d(zs[0], zs[1], zs[2], coeffs)
    acc = _eval_tensor(coeffs[..., -1], zs[:-1])
    for k in range(coeffs.shape[-1] - 2, -1, -1):
        acc = acc * zs[-1] + _eval_tensor(coeffs[..., k], zs[:-1])
    return acc


def derivative(p: PolyMD, axis: int) -> PolyMD:
    """Partial derivative with respect to variable ``axis`` (1-based)."""
    coeffs = derivative_coeffs(p.coeffs, axis)
    return PolyMD(trim(coeffs))


def derivative_coeffs(coeffs, axis: int):
    a = axis - 1
    if not 0 <= a < coeffs.ndim:
        raise ValueError(f"axis {axis} out of range for {coeffs.ndim} variables")
    n = coeffs.shape[a]
    if n == 1:
        return np.zeros_like(coeffs)
    sl = [slice(None)] * coeffs.ndim
    sl[a] = slice(1, None)
    out = coeffs[tuple(sl)].copy()
    shape = [1] * coeffs.ndim
    shape[a] = n - 1
    out *= np.arange(1, n).reshape(shape)
    return out


def eval_partial(p: PolyMD, axis: int, z):
    """Evaluate the partial derivative d p / d z_axis at z (axis is 1-based)."""
    zs = [np.asarray(zj, dtype=np.complex128) for zj in z]
    return _eval_tensor(derivative_coeffs(p.coeffs, axis), zs)


# ---------------------------------------------------------------------------
# slice coefficient extraction and batched univariate root solving
# ---------------------------------------------------------------------------

def slice_coeffs(coeffs, points, axis=None):
    """Coefficients of the univariate polynomial obtained by freezing all
    variables except ``axis`` (1-based, default: the last variable).

    ``points`` is an array of shape (..., d-1) whose rows hold the frozen
    coordinates in variable order with ``axis`` removed.  Returns an array
    of shape (..., n_axis + 1).
    """
    coeffs = _as_coeff_tensor(coeffs)
    d = coeffs.ndim
    if axis is None:
        axis = d
    a = axis - 1
    pts = np.asarray(points, dtype=np.complex128)
    if d == 1:
        if pts.shape[-1] != 0:
            raise ValueError("univariate polynomial takes no frozen coordinates")
        return np.broadcast_to(coeffs, pts.shape[:-1] + coeffs.shape).copy()
    if pts.shape[-1] != d - 1:
        raise ValueError(f"expected {d - 1} frozen coordinates per point")
    moved = np.moveaxis(coeffs, a, -1)
    acc = moved.reshape((1,) * (pts.ndim - 1) + moved.shape)
    for k in range(d - 1):
        nk = acc.shape[pts.ndim - 1]
        powers = pts[..., k, None] ** np.arange(nk)
        extra = acc.ndim - pts.ndim
        acc = np.sum(acc * powers.reshape(powers.shape + (1,) * extra),
                     axis=pts.ndim - 1)
    return acc


def companion_roots(batch_coeffs, rel_tol=1e-11):
    """Roots of a batch of univariate polynomials via companion eigenvalues.

    ``batch_coeffs`` has shape (m, k+1), constant term first.  Rows are
    trimmed individually: trailing coefficients below ``rel_tol`` times
    the row maximum are treated as zero (degree drop).  Returns a list of
    m root arrays (possibly of different lengths).
    """
    c = np.asarray(batch_coeffs, dtype=np.complex128)
    rowmax = np.max(np.abs(c), axis=1)
    k = c.shape[1] - 1
    mask = np.abs(c) > (rel_tol * rowmax)[:, None]
    rev_any = mask[:, ::-1].any(axis=1)
    eff_deg = np.where(rev_any, k - np.argmax(mask[:, ::-1], axis=1), -1)
    out: list[np.ndarray] = [np.empty(0, dtype=np.complex128)] * len(c)
    for deg in range(1, k + 1):
        idx = np.nonzero(eff_deg == deg)[0]
        if idx.size == 0:
            continue
        block = c[idx, : deg + 1]
        if deg == 1:
            roots = (-block[:, 0] / block[:, 1])[:, None]
        else:
            comp = np.zeros((idx.size, deg, deg), dtype=np.complex128)
            comp[:, 1:, :-1] = np.eye(deg - 1)
            comp[:, :, -1] = -block[:, :-1] / block[:, -1:]
            try:
                roots = np.linalg.eigvals(comp)
            except np.linalg.LinAlgError as exc:  # pragma: no cover
                raise RootFindFailure(str(exc)) from exc
        for row, r in zip(idx, roots):
            out[row] = r
    return out


# ---------------------------------------------------------------------------
# stability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class StabilityCertificate:
    """Outcome of the grid-slice root scan.

    ``min_modulus_on_grid`` is the smallest root modulus seen over every
    scanned slice and every distinguished variable; ``is_stable`` means no
    root entered the open unit disk beyond a 1e-9 guard band.
    """

    is_stable: bool
    min_modulus_on_grid: float
    grid_resolution: tuple[int, int]
    method: str = "grid-slice-roots"


def stability_check(p: PolyMD, grid_n: int | None = None) -> StabilityCertificate:
    """Heuristic certificate that p has no zeros in the open unit polydisk.

    For each variable in turn, the other variables are sampled on a
    closed-disk grid (``grid_n`` radii including 0 and 1, ``4 * grid_n``
    angles) and the roots of the resulting univariate slices are found.
    The certificate is heuristic: it can be fooled by zeros between grid
    nodes, but the grid includes the full boundary torus where zeros of
    an intended denominator would matter most.
    """
    if grid_n is None:
        grid_n = 64 if p.dim <= 2 else 6
    n_ang = 4 * grid_n
    radii = np.linspace(0.0, 1.0, grid_n)
    angles = np.exp(2j * np.pi * np.arange(n_ang) / n_ang)
    disk = np.unique((radii[:, None] * angles[None, :]).ravel())

    min_mod = np.inf
    for axis in range(1, p.dim + 1):
        if p.coeffs.shape[axis - 1] == 1:
            continue
        if p.dim == 1:
            frozen = np.empty((1, 0), dtype=np.complex128)
        else:
            grids = np.meshgrid(*([disk] * (p.dim - 1)), indexing="ij")
            frozen = np.stack([g.ravel() for g in grids], axis=-1)
        sc = slice_coeffs(p.coeffs, frozen, axis=axis)
        rows = companion_roots(sc.reshape(-1, sc.shape[-1]))
        nonempty = [r for r in rows if r.size]
        if nonempty:
            min_mod = min(min_mod,
                          float(np.min(np.abs(np.concatenate(nonempty)))))
    stable = bool(min_mod > 1.0 - 1e-9)
    return StabilityCertificate(
        is_stable=stable,
        min_modulus_on_grid=float(min_mod),
        grid_resolution=(grid_n, 4 * grid_n),
    )


# ---------------------------------------------------------------------------
# JSON round trip
# ---------------------------------------------------------------------------

def poly_to_json_obj(p: PolyMD) -> dict:
    flat = p.coeffs.ravel(order="C")
    return {
        "degrees": [int(n) for n in p.degrees],
        "coeffs": [[float(c.real), float(c.imag)] for c in flat],
    }


def poly_to_json(p: PolyMD) -> str:
    return json.dumps(poly_to_json_obj(p))


def poly_from_json_obj(obj: dict) -> PolyMD:
    degrees = [int(n) for n in obj["degrees"]]
    shape = tuple(n + 1 for n in degrees)
    flat = np.array([complex(re, im) for re, im in obj["coeffs"]],
                    dtype=np.complex128)
    if flat.size != int(np.prod(shape)):
        raise ValueError("coefficient count does not match degrees")
    return PolyMD(flat.reshape(shape, order="C"))


def poly_from_json(text: str) -> PolyMD:
    return poly_from_json_obj(json.loads(text))


# ---------------------------------------------------------------------------
# rational inner functions
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rif:
    """Rational inner function numerator/denominator pair.

    ``den`` is the (stable) denominator polynomial and ``num`` its
    reflection at ``degrees``, so the function is num/den.  Degrees must
    be at least 1 in every variable; padding beyond deg(den) realizes
    monomial factors.
    """

    den: PolyMD
    num: PolyMD = field(repr=False)
    degrees: tuple[int, ...]

    def __init__(self, den: PolyMD, degrees=None):
        if degrees is None:
            degrees = den.degrees
        degrees = tuple(int(n) for n in degrees)
        if any(n < 1 for n in degrees):
            raise ValueError(
                "inner function must be nonconstant in every variable "
                f"(got degrees {degrees})"
            )
        num = reflect(den, degrees)
        object.__setattr__(self, "den", den)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "degrees", degrees)

    @property
    def dim(self) -> int:
        return self.den.dim

    def __call__(self, *z):
        return eval_poly(self.num, z) / eval_poly(self.den, z)

    def level_coeffs(self, alpha: complex) -> np.ndarray:
        """Coefficient tensor of num - alpha * den, padded to ``degrees``."""
        shape = tuple(n + 1 for n in self.degrees)
        h = self.num.coeffs.astype(np.complex128).copy()
        pad = [(0, s - t) for s, t in zip(shape, self.den.coeffs.shape)]
        h -= alpha * np.pad(self.den.coeffs, pad)
        return h

    def derivative_pair(self, axis: int):
        """Coefficient tensors of (d num / d z_axis, d den / d z_axis)."""
        return (derivative_coeffs(self.num.coeffs, axis),
                derivative_coeffs(self.den.coeffs, axis))
