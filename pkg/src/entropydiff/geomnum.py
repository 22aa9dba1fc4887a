"""Shared numerical infrastructure.

Uniform rectangular grids with scalar/metric fields, second-order finite
difference operators in conformal metrics, and deterministic adaptive
Gauss-Legendre quadrature (2-D panels and 1-D complex line segments).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import GridMismatch, GridTooCoarse, NoConvergence

__all__ = [
    "RectDomain",
    "UniformGrid",
    "ScalarField",
    "ConformalMetricField",
    "laplacian_conformal",
    "tracefree_hessian_conformal",
    "interior_mask",
    "interior_stats",
    "integrate2d",
    "integrate_segment",
    "QuadratureResult",
]


@dataclass(frozen=True)
class RectDomain:
    """Axis-aligned rectangle in the z = x + iy plane."""

    x0: float
    x1: float
    y0: float
    y1: float

    def __post_init__(self):
        if not (self.x1 > self.x0 and self.y1 > self.y0):
            raise ValueError("domain must have positive extent")

    @property
    def area(self) -> float:
        return (self.x1 - self.x0) * (self.y1 - self.y0)

    def contains(self, z, margin: float = 0.0):
        x, y = np.real(z), np.imag(z)
        return (
            (x >= self.x0 - margin)
            & (x <= self.x1 + margin)
            & (y >= self.y0 - margin)
            & (y <= self.y1 + margin)
        )

    def grid(self, nx: int, ny: int) -> "UniformGrid":
        return UniformGrid(self, nx, ny)

    @staticmethod
    def square(half_width: float, center: complex = 0j) -> "RectDomain":
        cx, cy = center.real, center.imag
        return RectDomain(cx - half_width, cx + half_width, cy - half_width, cy + half_width)


class UniformGrid:
    """nx-by-ny node grid over a RectDomain; arrays are indexed [iy, ix]."""

    def __init__(self, domain: RectDomain, nx: int, ny: int):
        if nx < 2 or ny < 2:
            raise GridTooCoarse("grid needs at least 2 nodes per axis")
        self.domain = domain
        self.nx = int(nx)
        self.ny = int(ny)
        self.xs = np.linspace(domain.x0, domain.x1, self.nx)
        self.ys = np.linspace(domain.y0, domain.y1, self.ny)
        self.hx = self.xs[1] - self.xs[0]
        self.hy = self.ys[1] - self.ys[0]
        self.zs = self.xs[None, :] + 1j * self.ys[:, None]

    @property
    def shape(self):
        return (self.ny, self.nx)

    def same_as(self, other: "UniformGrid") -> bool:
        return (
            self.shape == other.shape
            and self.domain == other.domain
        )

    def __repr__(self):
        d = self.domain
        return f"UniformGrid([{d.x0},{d.x1}]x[{d.y0},{d.y1}], {self.nx}x{self.ny})"


@dataclass
class ScalarField:
    """Real samples on a uniform grid (NaN marks invalid nodes)."""

    grid: UniformGrid
    values: np.ndarray

    def __post_init__(self):
        if self.grid.nx < 5 or self.grid.ny < 5:
            raise GridTooCoarse("scalar fields need at least 5 nodes per axis")
        self.values = np.asarray(self.values, dtype=np.float64)
        if self.values.shape != self.grid.shape:
            raise GridMismatch(f"values shape {self.values.shape} != grid shape {self.grid.shape}")


@dataclass
class ConformalMetricField:
    """Conformal factor lambda^2 > 0 per node: g = lambda^2 (dx^2 + dy^2)."""

    grid: UniformGrid
    lambda_sq: np.ndarray

    def __post_init__(self):
        if self.grid.nx < 5 or self.grid.ny < 5:
            raise GridTooCoarse("metric fields need at least 5 nodes per axis")
        self.lambda_sq = np.asarray(self.lambda_sq, dtype=np.float64)
        if self.lambda_sq.shape != self.grid.shape:
            raise GridMismatch("lambda_sq shape does not match grid")
        if not np.all(self.lambda_sq[np.isfinite(self.lambda_sq)] > 0):
            raise ValueError("conformal factor must be positive")


def _check_same_grid(f: ScalarField, m: ConformalMetricField):
    if not f.grid.same_as(m.grid):
        raise GridMismatch("field and metric live on different grids")


def _central_xy(values: np.ndarray, hx: float, hy: float):
    """First derivatives by central differences; NaN on the boundary ring."""
    fx = np.full_like(values, np.nan)
    fy = np.full_like(values, np.nan)
    fx[:, 1:-1] = (values[:, 2:] - values[:, :-2]) / (2 * hx)
    fy[1:-1, :] = (values[2:, :] - values[:-2, :]) / (2 * hy)
    return fx, fy


def _second_xy(values: np.ndarray, hx: float, hy: float):
    fxx = np.full_like(values, np.nan)
    fyy = np.full_like(values, np.nan)
    fxy = np.full_like(values, np.nan)
    fxx[:, 1:-1] = (values[:, 2:] - 2 * values[:, 1:-1] + values[:, :-2]) / hx**2
    fyy[1:-1, :] = (values[2:, :] - 2 * values[1:-1, :] + values[:-2, :]) / hy**2
    fxy[1:-1, 1:-1] = (
        values[2:, 2:] - values[2:, :-2] - values[:-2, 2:] + values[:-2, :-2]
    ) / (4 * hx * hy)
    return fxx, fyy, fxy


def laplacian_conformal(f: ScalarField, m: ConformalMetricField) -> ScalarField:
    """Laplace-Beltrami of f in the metric lambda^2(dx^2+dy^2).

    Conformal covariance reduces it to the flat 5-point stencil divided by
    the conformal factor; the boundary ring is marked invalid (NaN).
    """
    _check_same_grid(f, m)
    fxx, fyy, _ = _second_xy(f.values, f.grid.hx, f.grid.hy)
    return ScalarField(f.grid, (fxx + fyy) / m.lambda_sq)


def tracefree_hessian_conformal(f: ScalarField, m: ConformalMetricField):
    """Trace-free Hessian of f in the conformal metric, flat components.

    Returns (a, b) with the tensor [[a, b], [b, -a]]: the flat trace-free
    Hessian minus the first-order conformal correction with
    omega = log(lambda^2)/2.  Interior nodes only (NaN ring).
    """
    _check_same_grid(f, m)
    hx, hy = f.grid.hx, f.grid.hy
    fxx, fyy, fxy = _second_xy(f.values, hx, hy)
    fx, fy = _central_xy(f.values, hx, hy)
    omega = 0.5 * np.log(m.lambda_sq)
    wx, wy = _central_xy(omega, hx, hy)
    a = 0.5 * (fxx - fyy) - (fx * wx - fy * wy)
    b = fxy - (fx * wy + fy * wx)
    return ScalarField(f.grid, a), ScalarField(f.grid, b)


def interior_mask(grid: UniformGrid, ring: int = 2) -> np.ndarray:
    """Boolean mask excluding a boundary ring (width 2 by default, so
    one-sided effects never pollute residual statistics)."""
    mask = np.zeros(grid.shape, dtype=bool)
    mask[ring:-ring, ring:-ring] = True
    return mask


def interior_stats(values: np.ndarray, grid: UniformGrid, ring: int = 2, extra_mask=None):
    """(max, mean) of |values| over valid interior nodes."""
    mask = interior_mask(grid, ring) & np.isfinite(values)
    if extra_mask is not None:
        mask &= extra_mask
    if not mask.any():
        raise GridTooCoarse("no valid interior nodes for statistics")
    v = np.abs(values[mask])
    return float(v.max()), float(v.mean())


# ---------------------------------------------------------------------------
# Quadrature
# ---------------------------------------------------------------------------

@dataclass
class QuadratureResult:
    value: float | complex | np.ndarray
    error: float
    panels: int = field(default=0)

    def __float__(self):
        return float(np.real(self.value))


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_rule(n: int):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


_GL2D_POINTS = 12  # even: tensor nodes never hit panel centers or edges


def _panel_value(density, x0, x1, y0, y1) -> float:
    nodes, weights = _gl_rule(_GL2D_POINTS)
    cx, rx = 0.5 * (x0 + x1), 0.5 * (x1 - x0)
    cy, ry = 0.5 * (y0 + y1), 0.5 * (y1 - y0)
    xs = cx + rx * nodes
    ys = cy + ry * nodes
    zs = xs[None, :] + 1j * ys[:, None]
    vals = np.asarray(density(zs), dtype=np.float64)
    return float(rx * ry * np.einsum("i,ij,j->", weights, vals, weights))


def integrate2d(density, domain: RectDomain, tol: float = 1e-8, max_panels: int = 40000) -> QuadratureResult:
    """Adaptive tensor-product Gauss-Legendre integration over a rectangle.

    ``density`` maps a complex ndarray of sample points to real values.
    Panels are bisected (into 4) until the local error estimate -- parent
    rule vs sum of children -- falls under the area-proportional share of
    ``tol``.  Panel processing order is fixed, so results are reproducible
    bit for bit.
    """
    total_area = domain.area
    stack = [(domain.x0, domain.x1, domain.y0, domain.y1, None)]
    total = 0.0
    err_total = 0.0
    panels = 0
    while stack:
        x0, x1, y0, y1, parent_val = stack.pop()
        panels += 1
        if panels > max_panels:
            raise NoConvergence(f"2-D quadrature exceeded {max_panels} panels")
        if parent_val is None:
            parent_val = _panel_value(density, x0, x1, y0, y1)
        xm, ym = 0.5 * (x0 + x1), 0.5 * (y0 + y1)
        quads = (
            (x0, xm, y0, ym),
            (xm, x1, y0, ym),
            (x0, xm, ym, y1),
            (xm, x1, ym, y1),
        )
        child_vals = [_panel_value(density, *q) for q in quads]
        refined = sum(child_vals)
        err = abs(refined - parent_val)
        local_tol = tol * ((x1 - x0) * (y1 - y0)) / total_area
        if err <= local_tol:
            total += refined
            err_total += err
        else:
            for q, v in zip(reversed(quads), reversed(child_vals)):
                stack.append(q + (v,))
    return QuadratureResult(total, err_total, panels)


_GL1D_POINTS = 15


def _segment_value(f, a: complex, b: complex):
    nodes, weights = _gl_rule(_GL1D_POINTS)
    mid, half = 0.5 * (a + b), 0.5 * (b - a)
    zs = mid + half * nodes
    vals = np.asarray(f(zs))
    return half * np.tensordot(vals, weights, axes=([-1], [0]))


def integrate_segment(f, a: complex, b: complex, tol: float = 1e-10, max_panels: int = 4000) -> QuadratureResult:
    """Adaptive contour integral of f along the straight segment a -> b.

    ``f`` maps a complex ndarray (sample points, last axis) to values with
    any leading shape; components integrate simultaneously.  Panels are
    bisected until |whole - sum of halves| (max over components) meets the
    length-proportional share of ``tol``.
    """
    total_len = abs(b - a)
    if total_len == 0:
        probe = np.asarray(f(np.array([a])))
        return QuadratureResult(np.zeros(probe.shape[:-1], dtype=probe.dtype), 0.0, 0)
    stack = [(a, b, None)]
    total = None
    err_total = 0.0
    panels = 0
    while stack:
        za, zb, whole = stack.pop()
        panels += 1
        if panels > max_panels:
            raise NoConvergence(f"line quadrature exceeded {max_panels} panels")
        if whole is None:
            whole = _segment_value(f, za, zb)
        zm = 0.5 * (za + zb)
        left = _segment_value(f, za, zm)
        right = _segment_value(f, zm, zb)
        refined = left + right
        err = float(np.max(np.abs(refined - whole)))
        local_tol = tol * abs(zb - za) / total_len
        if err <= local_tol:
            total = refined if total is None else total + refined
            err_total += err
        else:
            stack.append((zm, zb, right))
            stack.append((za, zm, left))
    return QuadratureResult(total, err_total, panels)
