"""Immersion integrals, periods, meshes, and OBJ export."""

import json

import numpy as np
import pytest

from entropydiff.errors import PoleOnPath
from entropydiff.geomnum import RectDomain
from entropydiff.hill import HillSystem, canonical_state_mu_nu, solve_on_grid
from entropydiff.jets import Z, const
from entropydiff.models import catenoid, deformed_catenoid, enneper, helicoid
from entropydiff.surface import (
    immersion_point,
    inverse_stereographic,
    period_vector,
    sample_mesh,
    write_obj,
    write_sidecar,
)
from entropydiff.weierstrass import WeierstrassData, metric_fields


def test_catenoid_immersion_point():
    cat = catenoid()
    x = immersion_point(cat.data, 0.0, 1.0).x
    np.testing.assert_allclose(x, [np.cosh(1.0) - 1.0, 0.0, 1.0], atol=1e-10)


def test_helicoid_immersion_point():
    hel = helicoid()
    x = immersion_point(hel.data, 0.0, 1j * np.pi / 2).x
    np.testing.assert_allclose(x, [0.0, 0.0, np.pi / 2], atol=1e-10)


def test_immersion_at_start_is_zero():
    enn = enneper()
    np.testing.assert_allclose(immersion_point(enn.data, 0.3 + 0.1j, 0.3 + 0.1j).x, 0.0, atol=1e-14)


def test_immersion_path_independence():
    m = deformed_catenoid(0.3)
    p0, p = 0.0, 1.0 + 1.0j
    straight = immersion_point(m.data, p0, p).x
    bent = immersion_point(m.data, p0, p, path=[p0, 1.0, 0.5 + 0.8j, p]).x
    np.testing.assert_allclose(straight, bent, atol=1e-8)


def test_period_vectors():
    cat = catenoid()
    np.testing.assert_allclose(period_vector(cat.data, [0.0, 2j * np.pi]), 0.0, atol=1e-10)
    m5 = deformed_catenoid(0.5)
    np.testing.assert_allclose(
        period_vector(m5.data, [0.0, 2j * np.pi]), [0.0, -8 * np.pi / 3, 0.0], atol=1e-9
    )


def test_period_vanishes_on_contractible_cycle():
    m = deformed_catenoid(-0.4)
    cycle = [0.5, 1.0, 1.0 + 1.0j, 0.5 + 1.0j]
    np.testing.assert_allclose(period_vector(m.data, cycle), 0.0, atol=1e-10)


def test_pole_on_path_detected():
    bad = WeierstrassData(const(1.0) / Z, const(1.0), RectDomain.square(2.0))
    with pytest.raises(PoleOnPath):
        immersion_point(bad, -1.0, 1.0)


def test_inverse_stereographic_convention():
    np.testing.assert_allclose(inverse_stereographic(0j), [0, 0, -1], atol=1e-15)
    np.testing.assert_allclose(inverse_stereographic(complex(np.inf)), [0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(inverse_stereographic(1e300 + 0j), [0, 0, 1], atol=1e-15)
    np.testing.assert_allclose(inverse_stereographic(1.0 + 0j), [1, 0, 0], atol=1e-15)
    # equator: |G| = 1 maps to the z = 0 circle
    g = np.exp(1j * np.linspace(0, 2 * np.pi, 9))
    assert np.abs(inverse_stereographic(g)[..., 2]).max() < 1e-15


def test_catenoid_mesh_positions_and_normals():
    cat = catenoid()
    mesh = sample_mesh(cat.data, (64, 64), domain=RectDomain(-2, 2, 0, 2 * np.pi))
    assert np.abs(np.linalg.norm(mesh.normals, axis=-1) - 1.0).max() < 1e-8
    X, Y = np.real(mesh.zs), np.imag(mesh.zs)
    F = np.stack([np.cosh(X) * np.cos(Y), np.cosh(X) * np.sin(Y), X], axis=-1)
    np.testing.assert_allclose(mesh.positions, F - F[0, 0], atol=1e-6)
    # Gauss-map normals match the right-handed parameterization normal
    N = np.stack([-np.cos(Y), -np.sin(Y), np.sinh(X)], axis=-1) / np.cosh(X)[..., None]
    np.testing.assert_allclose(mesh.normals, N, atol=1e-10)


def test_mesh_normals_orthogonal_to_tangents_and_conformal():
    m = deformed_catenoid(0.3)
    mesh = sample_mesh(m.data, (48, 48), domain=RectDomain(-1, 1, 0, np.pi))
    pos = mesh.positions
    tx = (pos[:, 2:, :] - pos[:, :-2, :]) / (2 * mesh.grid.hx)
    ty = (pos[2:, :, :] - pos[:-2, :, :]) / (2 * mesh.grid.hy)
    n = mesh.normals[1:-1, 1:-1]
    # orthogonality to O(delta^2)
    dot_x = np.abs(np.einsum("ijk,ijk->ij", tx[1:-1], n))
    dot_y = np.abs(np.einsum("ijk,ijk->ij", ty[:, 1:-1], n))
    assert dot_x.max() < 5e-3 and dot_y.max() < 5e-3
    # conformality: equal tangent lengths, orthogonal tangents, length = lambda
    lx = np.linalg.norm(tx[1:-1], axis=-1)
    ly = np.linalg.norm(ty[:, 1:-1], axis=-1)
    assert np.abs(lx / ly - 1.0).max() < 5e-3
    cross = np.abs(np.einsum("ijk,ijk->ij", tx[1:-1], ty[:, 1:-1])) / (lx * ly)
    assert cross.max() < 5e-3
    lam = np.sqrt(metric_fields(m.data, mesh.zs[1:-1, 1:-1])["lambda_sq"])
    assert np.abs(lx / lam - 1.0).max() < 5e-3


def test_mesh_perturbs_exact_pole_nodes():
    m5 = deformed_catenoid(0.5)
    dom = RectDomain(np.log(2.0) - 1.0, np.log(2.0) + 1.0, -1.0, 1.0)
    mesh = sample_mesh(m5.data, (9, 9), domain=dom)
    assert np.all(np.isfinite(mesh.positions))
    assert np.all(np.isfinite(mesh.normals))
    assert np.all(np.isfinite(mesh.K))
    moved = np.abs(mesh.zs - mesh.grid.zs) > 0
    assert moved.sum() >= 1  # the exact hit at z = log 2 was displaced


def test_enneper_mesh_matches_hill_route_after_alignment():
    # two independent pipelines to the same surface: catalog data (z, z)
    # integrated by quadrature vs the rho = 0 Hill system marched by ODE
    # (data (z, -z)); they differ by the isometry -I.
    dom = RectDomain(-1, 1, -1, 1)
    enn = enneper()  # mu = 1/sqrt(2): G = z, h = z
    mesh = sample_mesh(enn.data, (21, 21), domain=dom)
    a = mesh.positions.reshape(-1, 3)

    sys0 = HillSystem(const(0.0), 0.0, canonical_state_mu_nu(1.0 / np.sqrt(2.0)))
    grid = dom.grid(21, 21)
    f = solve_on_grid(sys0, grid, with_positions=True)
    b = np.stack([f["x1"], f["x2"], f["x3"]], axis=-1).reshape(-1, 3)

    a0 = a - a.mean(axis=0)
    b0 = b - b.mean(axis=0)
    # orthogonal Procrustes (isometries include the point reflection)
    M = b0.T @ a0
    U, _, Vt = np.linalg.svd(M)
    Q = U @ Vt
    assert np.abs(b0 @ Q - a0).max() < 1e-6


def test_obj_and_sidecar_export(tmp_path):
    cat = catenoid()
    mesh = sample_mesh(cat.data, (8, 8), domain=RectDomain(-1, 1, 0, np.pi))
    obj_path = tmp_path / "cat.obj"
    write_obj(mesh, str(obj_path))
    lines = obj_path.read_text().splitlines()
    v = [l for l in lines if l.startswith("v ")]
    vn = [l for l in lines if l.startswith("vn ")]
    fc = [l for l in lines if l.startswith("f ")]
    assert len(v) == 64 and len(vn) == 64
    assert len(fc) == 2 * 7 * 7
    # all face indices in range, 1-based
    for line in fc:
        ids = [int(tok.split("//")[0]) for tok in line.split()[1:]]
        assert all(1 <= i <= 64 for i in ids)

    side_path = tmp_path / "cat.json"
    write_sidecar(mesh, str(side_path))
    doc = json.loads(side_path.read_text())
    assert doc["nx"] == 8 and doc["ny"] == 8
    assert len(doc["K"]) == 64 and len(doc["T_norm"]) == 64 and len(doc["That_norm"]) == 64
    np.testing.assert_allclose(doc["K"], mesh.K.reshape(-1), rtol=1e-12)
