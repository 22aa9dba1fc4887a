"""Hill-equation integration, group actions, and reconstruction tests."""

import numpy as np
import pytest

from entropydiff.errors import NotUnimodular, PoleOnPath
from entropydiff.geomnum import RectDomain, ScalarField
from entropydiff.hill import (
    HillSystem,
    apply_sl2,
    canonical_state_mu_nu,
    canonical_state_phi_alpha,
    integrate_hill,
    liouville_residual,
    ql_factor,
    rebase,
    reconstruct_weierstrass,
    reconstructed_data_jets,
    solve_on_grid,
)
from entropydiff.jets import Z, const
from entropydiff.weierstrass import rho_from_derivatives


def test_zero_coefficient_linear_solution():
    sys0 = HillSystem(const(0.0), 0.0, [[1.0, 0.0], [0.0, 0.5]])
    sol = integrate_hill(sys0, [0.0, 2.0])
    _, w1, w2, _, _ = sol.samples[-1]
    assert abs(w1 - 1.0) < 1e-12 and abs(w2 - 1.0) < 1e-12
    assert sol.wronskian_drift < 1e-10


def test_constant_negative_coefficient_exponentials():
    # rho = -1: w1 = e^{-z/2}/sqrt(2), w2 = e^{z/2}/sqrt(2)
    s = np.array([[1, 1], [-0.5, 0.5]]) / np.sqrt(2)
    sysm = HillSystem(const(-1.0), 0.0, s)
    sol = integrate_hill(sysm, [0.0, 1.0])
    _, w1, w2, _, _ = sol.samples[-1]
    assert abs(w1 - np.exp(-0.5) / np.sqrt(2)) < 1e-10
    assert abs(w2 - np.exp(0.5) / np.sqrt(2)) < 1e-10
    assert sol.wronskian_drift < 1e-10


def test_wronskian_is_first_integral_on_wild_path():
    sys = HillSystem(Z**2 - 0.5j * Z, 0.0, canonical_state_mu_nu(1.3, 0.2j))
    path = [0.0, 1.0 + 0.5j, 0.5 + 1.5j, -0.5 + 1.0j, 0.0 + 2.0j]
    sol = integrate_hill(sys, path)
    assert sol.wronskian_drift < 1e-10


def test_path_independence_of_endpoint_state():
    sys = HillSystem(Z, 0.0, canonical_state_mu_nu(0.9))
    end = 1.0 + 1.0j
    sol_a = integrate_hill(sys, [0.0, end])
    sol_b = integrate_hill(sys, [0.0, 1.0, end])
    sol_c = integrate_hill(sys, [0.0, 1.0j, -0.3 + 0.8j, end])
    assert np.abs(sol_a.end_state - sol_b.end_state).max() < 1e-8
    assert np.abs(sol_a.end_state - sol_c.end_state).max() < 1e-8


def test_pole_on_path_raises():
    sys = HillSystem(const(1.0) / Z, 1.0, canonical_state_mu_nu(1.0, base=1.0))
    with pytest.raises(PoleOnPath):
        integrate_hill(sys, [1.0, -1.0])


def test_wronskian_invariant_enforced_on_construction():
    with pytest.raises(ValueError):
        HillSystem(const(0.0), 0.0, [[1.0, 0.0], [0.0, 1.0]])


# --- SL(2,C) machinery -------------------------------------------------------

def _random_su2(rng):
    v = rng.normal(size=4)
    v /= np.linalg.norm(v)
    a = v[0] + 1j * v[1]
    b = v[2] + 1j * v[3]
    return np.array([[a, -np.conj(b)], [b, np.conj(a)]])


def test_apply_sl2_identity_and_triangular():
    sys0 = HillSystem(const(0.0), 0.0, [[1.0, 0.0], [0.0, 0.5]])
    same = apply_sl2(np.eye(2), sys0)
    assert np.abs(same.state_at_base - sys0.state_at_base).max() == 0.0
    moved = apply_sl2(np.array([[2.0, 0.0], [1j, 0.5]]), sys0)
    # w1 -> 2, w2 -> i + z/4
    expected = np.array([[2.0, 1j], [0.0, 0.25]])
    assert np.abs(moved.state_at_base - expected).max() < 1e-14


def test_apply_sl2_rejects_non_unimodular():
    sys0 = HillSystem(const(0.0), 0.0, [[1.0, 0.0], [0.0, 0.5]])
    with pytest.raises(NotUnimodular):
        apply_sl2(np.diag([2.0, 1.0]), sys0)


def test_su2_action_preserves_u_pointwise():
    rng = np.random.default_rng(8)
    sys = HillSystem(const(-1.0), 0.0, canonical_state_phi_alpha(0.15, 1.0))
    pts = [0.0, 0.4 + 0.3j, -0.6 + 1.1j, 1.2 - 0.8j]
    sol = integrate_hill(sys, pts)
    states = sol.states_at(pts[1:])
    for _ in range(100):
        U = _random_su2(rng)
        for st in states:
            transformed = st @ U.T
            u_before = np.log(abs(st[0, 0]) ** 2 + abs(st[0, 1]) ** 2)
            u_after = np.log(abs(transformed[0, 0]) ** 2 + abs(transformed[0, 1]) ** 2)
            assert abs(u_before - u_after) < 1e-12


def test_su2_action_commutes_with_integration():
    rng = np.random.default_rng(9)
    sys = HillSystem(0.3 * Z, 0.0, canonical_state_mu_nu(1.0))
    end = 0.8 + 0.6j
    base_end = integrate_hill(sys, [0.0, end]).end_state
    for _ in range(3):
        U = _random_su2(rng)
        moved = apply_sl2(U, sys)
        moved_end = integrate_hill(moved, [0.0, end]).end_state
        assert np.abs(moved_end - base_end @ U.T).max() < 1e-9


def test_sl2_action_is_transitive_on_wronskian_half_states():
    rng = np.random.default_rng(10)
    sys0 = HillSystem(const(0.0), 0.0, [[1.0, 0.0], [0.0, 0.5]])
    s0 = sys0.state_at_base
    for _ in range(20):
        t = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        det = t[0, 0] * t[1, 1] - t[0, 1] * t[1, 0]
        if abs(det) < 0.05:
            continue
        t = t / np.sqrt(det / 0.5)
        bt = np.linalg.solve(s0, t)
        B = bt.T
        detB = B[0, 0] * B[1, 1] - B[0, 1] * B[1, 0]
        assert abs(detB - 1.0) < 1e-10
        moved = apply_sl2(B, sys0)
        assert np.abs(moved.state_at_base - t).max() < 1e-10


def test_ql_factorization():
    # lower triangular with positive diagonal: U = I
    B = np.array([[2.0, 0.0], [0.3 + 0.4j, 0.5]])
    U, L = ql_factor(B)
    assert np.abs(U - np.eye(2)).max() < 1e-14
    assert np.abs(L - B).max() < 1e-14
    # already unitary: L = I
    B = np.array([[0.0, -1.0], [1.0, 0.0]])
    U, L = ql_factor(B)
    assert np.abs(U - B).max() < 1e-14
    assert np.abs(L - np.eye(2)).max() < 1e-14
    # random SL(2,C): reassembly and structure
    rng = np.random.default_rng(12)
    for _ in range(25):
        M = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        M = M / np.sqrt(np.linalg.det(M).astype(complex))
        U, L = ql_factor(M)
        assert np.abs(U.conj().T @ U - np.eye(2)).max() < 1e-12
        assert abs(np.linalg.det(U) - 1.0) < 1e-12
        assert np.abs(U @ L - M).max() < 1e-12
        assert abs(L[0, 1]) == 0.0
        assert L[0, 0].imag == 0.0 and L[0, 0].real > 0
        assert L[1, 1].imag == 0.0 and L[1, 1].real > 0


def test_translation_action_matches_closed_forms():
    # for constant rho = -alpha^2, integrating to tau and rebasing must
    # reproduce the closed-form translated pair
    phi, alpha = 0.2, 1.0
    tau = 0.7 - 0.4j
    sys = HillSystem(const(-(alpha**2)), 0.0, canonical_state_phi_alpha(phi, alpha))
    moved = rebase(sys, tau)
    expected = canonical_state_phi_alpha(phi, alpha, base=tau)
    assert np.abs(moved.state_at_base - expected).max() < 1e-9


# --- reconstruction -----------------------------------------------------------

def test_reconstruct_exponential_pair():
    # (w1, w2) = (e^{-z/2}, e^{z/2})/sqrt(2): G = e^z, h = -1
    s = np.array([[1, 1], [-0.5, 0.5]]) / np.sqrt(2)
    sys = HillSystem(const(-1.0), 0.0, s)
    sol = integrate_hill(sys, [0.0, 0.9])
    rec = reconstruct_weierstrass(sol)[-1]
    assert abs(rec.G - np.exp(0.9)) < 1e-9
    assert abs(rec.h + 1.0) < 1e-10
    assert abs(rec.lambda_sq - np.cosh(0.9) ** 2) < 1e-9
    assert abs(rec.u - np.log(np.cosh(0.9)) - np.log(1.0)) < 1e-9


def test_reconstruct_enneper_pair():
    mu = 0.75
    sys = HillSystem(const(0.0), 0.0, canonical_state_mu_nu(mu))
    sol = integrate_hill(sys, [0.0, 1.3 + 0.4j])
    rec = reconstruct_weierstrass(sol)[-1]
    z = 1.3 + 0.4j
    assert abs(rec.G - z / (2 * mu**2)) < 1e-10
    assert abs(rec.h + z) < 1e-10


def test_reconstruct_flags_gauss_pole():
    # w1 = z/2 vanishes at 0: swap the Enneper pair so w1 has the zero
    state = np.array([[0.0, -1.0], [0.5, 0.0]])  # w1 = z/2, w2 = -1, W = 1/2
    sys = HillSystem(const(0.0), 0.0, state)
    sol = integrate_hill(sys, [0.0, 1.0])
    rec = reconstruct_weierstrass(sol)
    assert rec[0].gauss_pole and rec[0].G is None
    assert abs(rec[0].h) < 1e-12
    assert not rec[-1].gauss_pole


def test_round_trip_recovers_entropy_coefficient():
    # the module's master test: Hill solve -> (G, h) jets -> eight-term rho
    for rho in (const(0.0), const(-1.0), const(-1j), Z):
        sys = HillSystem(rho, 0.0, canonical_state_mu_nu(1.0, 0.1))
        pts = [0.25 + 0.2j, 0.6 - 0.3j, 1.1 + 0.7j]
        sol = integrate_hill(sys, [0.0] + pts)
        for zp in pts:
            st = sol.states_at([zp])[0]
            jG, jh = reconstructed_data_jets(st, rho, zp)
            rhat = rho_from_derivatives(
                jG.coeffs[0], jG.coeffs[1], 2 * jG.coeffs[2], 6 * jG.coeffs[3],
                jh.coeffs[0], jh.coeffs[1], 2 * jh.coeffs[2],
            )
            assert abs(rhat - rho.eval(zp)) < 1e-8
        assert sol.wronskian_drift < 1e-10


# --- grids and the Liouville equation -----------------------------------------

def test_liouville_residual_enneper_grid():
    grid = RectDomain.square(1.0).grid(201, 201)
    sys = HillSystem(const(0.0), 0.0, canonical_state_mu_nu(1.0))
    f = solve_on_grid(sys, grid)
    u = np.log(np.abs(f["w1"]) ** 2 + np.abs(f["w2"]) ** 2)
    exact = np.log(1.0 + np.abs(grid.zs) ** 2 / 4.0)
    assert np.abs(u - exact).max() < 1e-10
    res = liouville_residual(ScalarField(grid, u))
    assert res.max_residual < 1e-3


def test_liouville_residual_catenoid_grid():
    grid = RectDomain.square(1.0).grid(201, 201)
    sys = HillSystem(const(-1.0), 0.0, canonical_state_phi_alpha(0.0, 1.0))
    f = solve_on_grid(sys, grid)
    assert f["wronskian_drift"] < 1e-10
    u = np.log(np.abs(f["w1"]) ** 2 + np.abs(f["w2"]) ** 2)
    assert np.abs(u - np.log(np.cosh(np.real(grid.zs)))).max() < 1e-10
    res = liouville_residual(ScalarField(grid, u))
    assert res.max_residual < 1e-3


def test_liouville_constant_negative_control():
    grid = RectDomain.square(1.0).grid(21, 21)
    res = liouville_residual(ScalarField(grid, np.full(grid.shape, 0.3)))
    assert abs(res.max_residual - np.exp(-0.6)) < 1e-14
