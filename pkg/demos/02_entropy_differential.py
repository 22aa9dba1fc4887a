#!/usr/bin/env python3
"""The entropy differential P = (rho/2) dz^2 on the model surfaces.

Shows the three family relations that characterize the classical surfaces
(P = 0 for Enneper, P = Q/2 for deformed catenoids, P = iQ/2 for deformed
helicoids), the Schwarzian-derivative connection, and the Laurent pole
law at umbilic points.
"""

from entropydiff import (
    Z,
    WeierstrassData,
    const,
    entropy_coefficient,
    get_model,
    hopf_coefficient,
    pole_probe,
    schwarzian,
)
from entropydiff.geomnum import RectDomain
from entropydiff.models import family_relation_residual

print("== family relations on 32x32 grids ==")
for name, kwargs in [
    ("enneper", {}),
    ("catenoid", {}),
    ("helicoid", {}),
    ("deformed-catenoid", {"t": 0.3}),
    ("deformed-catenoid", {"t": 0.9}),
    ("deformed-helicoid", {"t": -0.7}),
]:
    m = get_model(name, **kwargs)
    resid = family_relation_residual(m)
    print(f"  {m.data.label or name:<16} {m.expected_relation.value:<8} residual {resid:.3e}")

print("\n== rho equals twice the Schwarzian when the Hopf coefficient is constant ==")
cat = get_model("catenoid")
for z in (0.0, 0.7 + 0.2j, -1.0 + 3.0j):
    rho = entropy_coefficient(cat.data, z)
    sch = schwarzian(cat.data.G, z)
    q = hopf_coefficient(cat.data, z)
    print(f"  z = {z}: rho = {rho:.12f}, 2*{{G,z}} = {2*sch:.12f}, q = {q:.3f}")

print("\n== double-pole coefficients at singular points ==")
print("  umbilic of order n: c_-2 = -(3n^2+4n)/8")
for n in (1, 2, 3):
    data = WeierstrassData(1 + Z ** (n + 1), const(1.0), RectDomain.square(2.0))
    fit = pole_probe(data, 0.0)
    print(f"    n={n}: fitted {fit.c_minus2.real:+.10f}, exact {-(3*n*n+4*n)/8:+.10f}")
print("  branch point order n, index k: c_-2 = ((n+k+1)^2-4k^2)/8")
for n, k in ((1, 1), (2, 1), (3, 2), (1, 2)):
    data = WeierstrassData(Z**k, Z ** (n + k), RectDomain.square(2.0))
    fit = pole_probe(data, 0.0)
    print(f"    n={n}, k={k}: fitted {fit.c_minus2.real:+.10f}, exact {((n+k+1)**2-4*k*k)/8:+.10f}")
print("  (n=1, k=2 is the degenerate case: at most a simple pole, so c_-2 = 0)")
