"""First-order geometry of a minimal surface from its Weierstrass data.

The data is a pair of closed-form functions (G, h) on a rectangle: G is the
stereographic image of the Gauss map, h the coefficient of the height
differential h dz.  Everything here is algebraic in the jets of G and h:

    metric      lambda^2 = (|h|^2/4)(|G| + |G|^-1)^2
    curvature   K        = -16 |G G'/h|^2 / (1+|G|^2)^4
    Hopf        q        = -h G'/G              (Q = q dz^2)
    entropy     rho                              (P = rho/2 dz^2)

with rho the eight-term rational combination of G', G'', G''', h', h''.
Removable singularities of the displayed quotients (e.g. G and h vanishing
together) are absorbed by jet cancellation; points where only the eight-term
*decomposition* of rho degenerates are recovered through the mean-value
property of holomorphic functions on a small circle.

Field functions (suffix ``_fields``/``_field``) evaluate whole grids of
points at once and mark failures with NaN; the sample functions take one
point and raise instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import CriticalPoint, DegeneratePoint, PoleAtPoint, UmbilicPoint
from .geomnum import RectDomain
from .jets import AnalyticExpr, const, eval_jet, jet_div, jet_mul

__all__ = [
    "WeierstrassData",
    "MetricSample",
    "QuadDiffSample",
    "metric_fields",
    "metric_sample",
    "hopf_field",
    "hopf_coefficient",
    "entropy_field",
    "entropy_coefficient",
    "rho_from_derivatives",
    "quad_diff_sample",
    "schwarzian",
    "norm_fields",
    "entropy_form_norms",
]

# |T|_g = _T_NORM_FACTOR * |rho| / lambda^2, derived by contracting
# T = Re((rho/2) dz^2) in the metric lambda^2(dx^2+dy^2) and validated
# against the catenoid values sqrt(2)/(2 cosh^2 x).  The constant lives
# only here (and is cross-checked against componentwise contraction in
# the tests).
_T_NORM_FACTOR = 1.0 / math.sqrt(2.0)

# Relative threshold for "the Hopf coefficient vanishes" (umbilic point).
_UMBILIC_RTOL = 1e-9


@dataclass
class WeierstrassData:
    """Weierstrass pair (G, h) on a rectangular coordinate patch.

    ``periodic_y`` marks data invariant under z -> z + i*period (quotient
    cylinders such as the catenoid's C/<2 pi i>).
    """

    G: AnalyticExpr
    h: AnalyticExpr
    domain: RectDomain
    periodic_y: float | None = None
    label: str = ""

    def contains(self, z) -> bool:
        x, y = np.real(z), np.imag(z)
        if self.periodic_y is not None:
            y = self.domain.y0 + np.mod(y - self.domain.y0, self.periodic_y)
        return bool(np.all(self.domain.contains(x + 1j * y, margin=1e-12)))

    def rescaled(self, factor: complex) -> "WeierstrassData":
        """Same surface data with h -> factor*h (homothety for real factor)."""
        return WeierstrassData(self.G, const(factor) * self.h, self.domain, self.periodic_y,
                               label=f"{self.label}*{factor}" if self.label else "")

    def reflected(self) -> "WeierstrassData":
        """Mirror data (G, h) -> (G*, h*) with e*(z) = conj(e(conj z)).

        Sampling the reflection at conj(z) reproduces all pointwise norms
        at z (orientation/reflection law).
        """
        dom = self.domain
        return WeierstrassData(
            self.G.conjugated(), self.h.conjugated(),
            RectDomain(dom.x0, dom.x1, -dom.y1, -dom.y0),
            self.periodic_y,
            label=f"{self.label}-reflected" if self.label else "",
        )


@dataclass
class MetricSample:
    """Metric data at one point; A_norm_sq = -2K is the Gauss equation for
    minimal immersions and holds by construction."""

    z: complex
    lambda_sq: float
    K: float
    u: float
    A_norm_sq: float


@dataclass
class QuadDiffSample:
    """Hopf and entropy coefficients at one point (Q = q dz^2, P = (rho/2) dz^2)."""

    z: complex
    q: complex
    rho: complex


# ---------------------------------------------------------------------------
# Jet plumbing
# ---------------------------------------------------------------------------

def _base_jets(data: WeierstrassData, z):
    """Order-3 jet of G and order-2 jet of h (all derivatives rho needs)."""
    return eval_jet(data.G, z, 3), eval_jet(data.h, z, 2)


def _derivatives(jG, jh):
    G = jG.coeffs[0]
    G1 = jG.coeffs[1]
    G2 = 2.0 * jG.coeffs[2]
    G3 = 6.0 * jG.coeffs[3]
    h = jh.coeffs[0]
    h1 = jh.coeffs[1]
    h2 = 2.0 * jh.coeffs[2]
    return G, G1, G2, G3, h, h1, h2


# ---------------------------------------------------------------------------
# Metric, curvature, Hopf coefficient
# ---------------------------------------------------------------------------

def _holomorphic_parts(data: WeierstrassData, z):
    """(q, h/G, hG) on an array of points.

    All three are holomorphic wherever the data describes an immersion
    (h/G = -2 w1^2 and hG = -2 w2^2 in spinor terms), so isolated nodes
    where the jet evaluation degenerates -- e.g. an exact hit on a Gauss
    map pole of the deformed families -- are recovered by the circle
    mean-value fallback.
    """
    zz = np.asarray(z, dtype=np.complex128)
    jG, jh = _base_jets(data, zz)
    jGp = jG.derivative_jet()
    with np.errstate(all="ignore"):
        q = np.asarray(-jet_div(jet_mul(jh, jGp), jG).value, dtype=np.complex128)
        r = np.asarray(jet_div(jh, jG).value, dtype=np.complex128)
        p = np.asarray(jet_mul(jh, jG).value, dtype=np.complex128)
    for idx, part in enumerate((q, r, p)):
        bad = ~np.isfinite(part)
        if not np.any(bad):
            continue
        flat = part.reshape(-1)
        flat_z = np.broadcast_to(zz, part.shape).reshape(-1)
        fn = (
            lambda pts, i=idx: np.asarray(_holomorphic_parts_raw(data, pts)[i], dtype=np.complex128)
        )
        for i in np.nonzero(bad.reshape(-1))[0]:
            flat[i] = _circle_mean(fn, flat_z[i], 1e-3)
    return q, r, p


def _holomorphic_parts_raw(data: WeierstrassData, z):
    zz = np.asarray(z, dtype=np.complex128)
    jG, jh = _base_jets(data, zz)
    jGp = jG.derivative_jet()
    with np.errstate(all="ignore"):
        return (
            -jet_div(jet_mul(jh, jGp), jG).value,
            jet_div(jh, jG).value,
            jet_mul(jh, jG).value,
        )


def metric_fields(data: WeierstrassData, z):
    """lambda^2, K, u, |A|^2 at an array of points (NaN where singular).

    Computed in the pole-stable grouping s = |h/G| + |hG| and the Hopf
    coefficient q = -h G'/G:

        lambda^2 = s^2/4,   K = -16 |q|^2 / s^4,
        u = -log 2 - log|q|/2 + log s.

    These are algebraically identical to the displayed formulas
    lambda^2 = (|h|^2/4)(|G|+|G|^-1)^2 and K = -16|GG'|^2/(|h|^2(1+|G|^2)^4)
    (with the |h|^2 denominator; see the curvature design decision) but
    stay finite across Gauss-map poles, where G blows up and h vanishes.
    """
    q, r, p = _holomorphic_parts(data, z)
    with np.errstate(all="ignore"):
        s = np.abs(r) + np.abs(p)
        lambda_sq = 0.25 * s**2
        K = -16.0 * np.abs(q) ** 2 / s**4
        u = -np.log(2.0) - 0.5 * np.log(np.abs(q)) + np.log(s)
    return {
        "lambda_sq": np.real(lambda_sq),
        "K": np.real(K),
        "u": np.real(u),
        "A_norm_sq": np.real(-2.0 * K),
    }


def metric_sample(data: WeierstrassData, z: complex) -> MetricSample:
    """Metric, curvature, u and |A|^2 at a single point."""
    if not data.contains(z):
        raise ValueError(f"{z} outside the data domain")
    f = metric_fields(data, complex(z))
    lam2 = float(f["lambda_sq"])
    if not np.isfinite(lam2) or lam2 <= 0.0 or lam2 < 1e-280:
        raise DegeneratePoint(f"conformal factor degenerates at {z}")
    K = float(f["K"])
    if not np.isfinite(K):
        raise PoleAtPoint(f"curvature undefined at {z}")
    return MetricSample(z=complex(z), lambda_sq=lam2, K=K, u=float(f["u"]), A_norm_sq=-2.0 * K)


def hopf_field(data: WeierstrassData, z):
    """Hopf coefficient q = -h G'/G on an array of points (holomorphic;
    isolated degenerate nodes recovered by the circle mean)."""
    q, _, _ = _holomorphic_parts(data, z)
    return q


def hopf_coefficient(data: WeierstrassData, z: complex) -> complex:
    if not data.contains(z):
        raise ValueError(f"{z} outside the data domain")
    q = complex(hopf_field(data, complex(z)))
    if not np.isfinite(q.real) or not np.isfinite(q.imag):
        raise PoleAtPoint(f"Hopf coefficient undefined at {z}")
    return q


# ---------------------------------------------------------------------------
# Entropy coefficient
# ---------------------------------------------------------------------------

def rho_from_derivatives(G, G1, G2, G3, h, h1, h2):
    """The eight-term entropy coefficient from pointwise derivatives.

    rho = G'''/G' + G''/2G - 3G'^2/4G^2 - 7G''^2/4G'^2
          + G''h'/2G'h - G'h'/2Gh - h''/h + 5h'^2/4h^2
    """
    with np.errstate(all="ignore"):
        return (
            G3 / G1
            + G2 / (2.0 * G)
            - 3.0 * G1**2 / (4.0 * G**2)
            - 7.0 * G2**2 / (4.0 * G1**2)
            + G2 * h1 / (2.0 * G1 * h)
            - G1 * h1 / (2.0 * G * h)
            - h2 / h
            + 5.0 * h1**2 / (4.0 * h**2)
        )


def _circle_mean(fn, center: complex, radius: float, n: int = 16):
    """Center value of a function holomorphic near ``center`` via the
    discrete mean-value property (aliasing error O(radius^n)).

    Guards against misuse at a genuine pole: if the circle values scatter
    far more than continuity allows, the singularity is not removable and
    NaN is returned.
    """
    theta = 2.0 * np.pi * np.arange(n) / n
    pts = center + radius * np.exp(1j * theta)
    vals = np.asarray(fn(pts), dtype=np.complex128)
    if not np.all(np.isfinite(vals)):
        return complex(np.nan, np.nan)
    mean = np.mean(vals)
    spread = float(np.max(np.abs(vals - mean)))
    if spread > 10.0 * (1.0 + abs(mean)):
        return complex(np.nan, np.nan)
    return mean


def entropy_field(data: WeierstrassData, z, fallback: bool = True):
    """Entropy coefficient rho on an array of points.

    Genuine umbilic poles come back NaN.  Points where only the eight-term
    decomposition degenerates (G or h vanishing with regular rho) are
    recovered via the circle mean-value fallback when ``fallback`` is set.
    """
    zz = np.asarray(z, dtype=np.complex128)
    jG, jh = _base_jets(data, zz)
    rho = np.asarray(rho_from_derivatives(*_derivatives(jG, jh)), dtype=np.complex128)

    if fallback:
        bad = ~np.isfinite(rho)
        if np.any(bad):
            q = np.asarray(hopf_field(data, zz), dtype=np.complex128)
            qscale = np.nanmax(np.abs(q[np.isfinite(q)])) if np.any(np.isfinite(q)) else 1.0
            flat_rho = rho.reshape(-1)
            flat_bad = bad.reshape(-1)
            flat_q = np.broadcast_to(q, rho.shape).reshape(-1)
            flat_z = np.broadcast_to(zz, rho.shape).reshape(-1)
            for i in np.nonzero(flat_bad)[0]:
                if not np.isfinite(flat_q[i]) or abs(flat_q[i]) <= _UMBILIC_RTOL * max(qscale, 1.0):
                    continue  # umbilic: rho genuinely has a double pole
                flat_rho[i] = _circle_mean(
                    lambda pts: entropy_field(data, pts, fallback=False), flat_z[i], 1e-3
                )
            rho = flat_rho.reshape(rho.shape)
    return rho


def entropy_coefficient(data: WeierstrassData, z: complex) -> complex:
    """rho at a single non-umbilic point (P = (rho/2) dz^2).

    Raises UmbilicPoint where the Hopf coefficient vanishes (rho has a
    double pole there; use verify.pole_probe for those) and PoleAtPoint
    where the data itself is singular.
    """
    if not data.contains(z):
        raise ValueError(f"{z} outside the data domain")
    q = hopf_coefficient(data, z)  # raises PoleAtPoint on data poles
    if abs(q) <= _UMBILIC_RTOL:
        raise UmbilicPoint(f"umbilic point at {z}: entropy differential has a double pole")
    rho = complex(entropy_field(data, complex(z)))
    if not (np.isfinite(rho.real) and np.isfinite(rho.imag)):
        raise PoleAtPoint(f"entropy coefficient undefined at {z}")
    return rho


def quad_diff_sample(data: WeierstrassData, z: complex) -> QuadDiffSample:
    """Hopf and entropy coefficients bundled at one non-umbilic point."""
    return QuadDiffSample(z=complex(z), q=hopf_coefficient(data, z), rho=entropy_coefficient(data, z))


def schwarzian(G: AnalyticExpr, z) -> complex:
    """Schwarzian derivative {G, z} = (G''/G')' - (G''/G')^2/2.

    Equals the entropy coefficient divided by 2 whenever the Hopf
    coefficient is constant.  Vectorizes over ``z``.
    """
    zz = np.asarray(z, dtype=np.complex128)
    jG = eval_jet(G, zz, 3)
    G1 = jG.coeffs[1]
    G2 = 2.0 * jG.coeffs[2]
    G3 = 6.0 * jG.coeffs[3]
    scale = np.max(np.abs(jG.coeffs))
    if np.any(np.abs(G1) <= 1e-14 * max(float(scale), 1.0)):
        raise CriticalPoint("G' vanishes: Schwarzian has a pole")
    with np.errstate(all="ignore"):
        ratio = G2 / G1
        out = G3 / G1 - 1.5 * ratio**2
    return complex(out) if np.isscalar(z) or isinstance(z, complex) else out


# ---------------------------------------------------------------------------
# Pointwise norms of the entropy form
# ---------------------------------------------------------------------------

def norm_fields(data: WeierstrassData, z):
    """(|T|_g, |T-hat|_g) on an array of points.

    |T-hat| = |K| |T| is continuous across umbilic points; there it is
    evaluated through the holomorphic product q^2 rho (mean-value fallback),
    while |T| itself is infinite.
    """
    zz = np.asarray(z, dtype=np.complex128)
    mf = metric_fields(data, zz)
    lam2 = mf["lambda_sq"]
    rho = entropy_field(data, zz)
    q = np.asarray(hopf_field(data, zz), dtype=np.complex128)

    with np.errstate(all="ignore"):
        T = _T_NORM_FACTOR * np.abs(rho) / lam2
        s = q**2 * rho                                  # holomorphic across umbilics
        That = _T_NORM_FACTOR * np.abs(s) / lam2**3

    bad = ~np.isfinite(np.real(s)) | ~np.isfinite(np.imag(s))
    if np.any(bad):
        flat_s = np.asarray(s, dtype=np.complex128).reshape(-1)
        flat_bad = bad.reshape(-1)
        flat_z = np.broadcast_to(zz, np.asarray(s).shape).reshape(-1)

        def _qsq_rho(pts):
            return np.asarray(hopf_field(data, pts), dtype=np.complex128) ** 2 * entropy_field(
                data, pts, fallback=False
            )

        for i in np.nonzero(flat_bad)[0]:
            flat_s[i] = _circle_mean(_qsq_rho, flat_z[i], 1e-3)
        That = _T_NORM_FACTOR * np.abs(flat_s.reshape(np.asarray(s).shape)) / lam2**3
        T = np.where(bad, np.inf, T)
    return np.real(T), np.real(That)


def entropy_form_norms(data: WeierstrassData, z: complex):
    """(|T|_g, |T-hat|_g) at one point; |T| is inf at umbilics where the
    continuous extension applies only to |T-hat|."""
    if not data.contains(z):
        raise ValueError(f"{z} outside the data domain")
    mf = metric_fields(data, complex(z))
    if not np.isfinite(mf["lambda_sq"]) or mf["lambda_sq"] <= 0:
        raise DegeneratePoint(f"metric degenerates at {z}")
    T, That = norm_fields(data, complex(z))
    return float(T), float(That)
