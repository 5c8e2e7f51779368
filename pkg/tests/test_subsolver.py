import numpy as np
import pytest

from ocbf import baselines
from ocbf.outage import LinkPowers, epsilon_rate
from ocbf.scenario import Scenario, generate_scenario
from ocbf.sca import anchor_from_solution
from ocbf.subsolver import (Anchor, BarrierModel, InitializationError, Layout,
                            SmoothConstraint, build_subproblem, herm_pack,
                            herm_trace_coeffs, herm_unpack, kkt_residual,
                            solve, solve_barrier, strict_interior_point)


def single_user_scenario(sigma2=0.1, seed=20):
    return generate_scenario(K=1, Nt=2, eta=0.0, snr_db=-10 * np.log10(sigma2),
                             eps=0.1, ranks=2, seed=seed)


def feasible_point(s, backoff=1.0):
    sol = baselines.mrt(s)
    return sol.w, np.asarray(sol.rates) * backoff


# --- parametrization ------------------------------------------------------

def test_herm_pack_roundtrip():
    rng = np.random.default_rng(0)
    A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
    W = A + A.conj().T
    assert np.allclose(herm_unpack(herm_pack(W), 3), W, atol=1e-14)


def test_trace_coeffs_linear_form():
    rng = np.random.default_rng(1)
    for _ in range(5):
        A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        W = A @ A.conj().T
        B = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        Q = B @ B.conj().T
        assert herm_trace_coeffs(Q) @ herm_pack(W) == pytest.approx(
            float(np.trace(W @ Q).real), rel=1e-12)


# --- model assembly -------------------------------------------------------

def test_variable_and_constraint_counts():
    s = generate_scenario(K=2, Nt=2, eta=0.5, snr_db=10, eps=0.1, ranks=2, seed=21)
    w, R = feasible_point(s, backoff=0.9)
    sub = build_subproblem(s, anchor_from_solution(s, w, R))
    assert sub.layout.n == 2 * 4 + 4 + 3 * 2  # 18 reals
    assert len(sub.model.constraints) == 14  # 6 rows per user + 2 cross rows
    assert len(sub.model.psd_blocks) == 2


def test_anchor_symmetric_point():
    a = Anchor(x_bar=np.zeros((1, 1)), y_bar=np.zeros(1))  # rate 1: 2^1 - 1 = 1
    assert a.theta1[0] == pytest.approx(0.5)
    assert a.big_theta[0] == pytest.approx(0.5)
    s = single_user_scenario()
    sub = build_subproblem(s, a)
    d_rows = [c for c in sub.model.constraints if c.label.startswith("rate")]
    assert d_rows[0].d0 == pytest.approx(np.log(0.5))


def test_linearization_tangent_at_anchor():
    s = generate_scenario(K=2, Nt=3, eta=0.6, snr_db=10, eps=0.1, ranks=3, seed=22)
    w, R = feasible_point(s, backoff=0.9)
    anchor = anchor_from_solution(s, w, R)
    sub = build_subproblem(s, anchor)
    lay = sub.layout
    v = np.zeros(lay.n)
    for k in range(2):
        for i in range(2):
            v[lay.x_idx(k, i)] = anchor.x_bar[k, i]
    for c in sub.model.constraints:
        if not c.label.startswith("cross"):
            continue
        k, i = map(int, c.label[6:-1].split(","))
        # choose W_k so that tr(W_k Q_ki) = e^{xbar_ki}: the row must be active
        coeffs = herm_trace_coeffs(s.Q[k, i])
        Wk = np.exp(anchor.x_bar[k, i]) / coeffs[0] * np.diag([1.0, 0, 0]).astype(complex)
        v2 = v.copy()
        v2[lay.w_slice(k)] = herm_pack(Wk)
        assert abs(c.value(v2)) < 1e-9


def test_amgm_bound_tight_at_anchor():
    # ln Theta + ln2 R - theta1 y = 0 exactly at R = log2(e^y + 1), y = ybar
    for ybar in (-2.0, 0.0, 1.5):
        a = Anchor(x_bar=np.zeros((1, 1)), y_bar=np.array([ybar]))
        R = np.log2(np.exp(ybar) + 1.0)
        resid = np.log(a.big_theta[0]) + np.log(2.0) * R - a.theta1[0] * ybar
        assert abs(resid) < 1e-9


# --- strictly feasible start ----------------------------------------------

def test_strict_start_no_backoff():
    s = single_user_scenario()
    w, R = feasible_point(s, backoff=0.9)
    sub = build_subproblem(s, anchor_from_solution(s, w, R))
    v = strict_interior_point(sub, w, R)
    assert max(c.value(v) for c in sub.model.constraints) < 0.0
    # 90% backoff leaves slack, so y is used as anchored
    assert v[sub.layout.y_idx(0)] == pytest.approx(sub.anchor.y_bar[0])


def test_strict_start_backoff_at_active_outage():
    s = single_user_scenario()
    w, R = feasible_point(s)  # rates exactly at the outage budget
    sub = build_subproblem(s, anchor_from_solution(s, w, R))
    v = strict_interior_point(sub, w, R)
    assert max(c.value(v) for c in sub.model.constraints) < 0.0
    assert v[sub.layout.y_idx(0)] < sub.anchor.y_bar[0]  # at least one backoff


def test_strict_start_rejects_zero_beamformer():
    s = single_user_scenario()
    w, R = feasible_point(s, backoff=0.9)
    sub = build_subproblem(s, anchor_from_solution(s, w, R))
    with pytest.raises(InitializationError):
        strict_interior_point(sub, [np.zeros(2, dtype=complex)], R)


# --- barrier solver -------------------------------------------------------

def eigenvalue_sdp(Q):
    """maximize tr(Q W) s.t. tr(W) <= 1, W >= 0 (optimum is lambda_max)."""
    dim = Q.shape[0]
    n = dim * dim
    row = SmoothConstraint(n, d0=-1.0, label="trace")
    row.d[:] = herm_trace_coeffs(np.eye(dim))
    return BarrierModel(n=n, objective=herm_trace_coeffs(Q),
                        constraints=[row], psd_blocks=[(0, dim)])


def test_diagonal_sdp_reaches_largest_eigenvalue():
    model = eigenvalue_sdp(np.diag([2.0, 1.0]).astype(complex))
    bs = solve_barrier(model, herm_pack(0.25 * np.eye(2)))
    assert bs.status == "optimal"
    assert bs.objective == pytest.approx(2.0, abs=1e-7)
    W = herm_unpack(bs.v, 2)
    assert W[0, 0].real == pytest.approx(1.0, abs=1e-6)
    assert abs(W[1, 1]) < 1e-6


def test_random_sdp_reaches_largest_eigenvalue():
    rng = np.random.default_rng(31)
    for _ in range(5):
        A = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        Q = A @ A.conj().T
        model = eigenvalue_sdp(Q)
        bs = solve_barrier(model, herm_pack(np.eye(3) / 6.0))
        lmax = float(np.linalg.eigvalsh(Q)[-1])
        assert bs.objective == pytest.approx(lmax, rel=1e-7)


def test_single_user_solve_matches_grid_oracle():
    s = single_user_scenario()
    w, R = feasible_point(s, backoff=0.9)
    anchor = anchor_from_solution(s, w, R)
    sub = build_subproblem(s, anchor)
    sol = solve(sub, strict_interior_point(sub, w, R))
    assert sol.status == "optimal"
    # brute-force over (x11, y): all other constraints are monotone in them
    s_max = float(s.P[0] * np.linalg.eigvalsh(s.Q[0, 0])[-1])
    z_cap = -np.log(1.0 - s.eps[0]) / s.sigma2[0]
    x_grid = np.arange(np.log(s_max) - 2.0, np.log(s_max), 1e-4)
    best = -np.inf
    for x11 in (x_grid[-1],):  # objective increases in x11; scan y at the cap
        y_grid = np.arange(anchor.y_bar[0] - 2.0, anchor.y_bar[0] + 4.0, 1e-4)
        feas = np.exp(y_grid - x11) <= z_cap
        Rg = (anchor.theta1[0] * y_grid - np.log(anchor.big_theta[0])) / np.log(2.0)
        best = max(best, float(np.max(Rg[feas])))
    # confirm monotonicity claim on the coarse grid
    coarse = []
    for x11 in x_grid[::2000]:
        y_grid = np.arange(anchor.y_bar[0] - 2.0, anchor.y_bar[0] + 4.0, 1e-3)
        feas = np.exp(y_grid - x11) <= z_cap
        Rg = (anchor.theta1[0] * y_grid - np.log(anchor.big_theta[0])) / np.log(2.0)
        coarse.append(float(np.max(Rg[feas])))
    assert np.all(np.diff(coarse) >= -1e-12)
    assert sol.objective == pytest.approx(best, abs=2e-4)


def test_solve_feasible_and_ascending():
    s = generate_scenario(K=2, Nt=3, eta=0.7, snr_db=10, eps=0.1, ranks=3, seed=33)
    w, R = feasible_point(s)
    sub = build_subproblem(s, anchor_from_solution(s, w, R))
    v0 = strict_interior_point(sub, w, R)
    sol = solve(sub, v0)
    assert sol.status == "optimal"
    assert sol.feasibility_residual <= 1e-7
    assert sol.objective >= float(sub.model.objective @ v0)
    for W in sol.W:
        assert np.linalg.eigvalsh(W)[0] > -1e-9


def test_kkt_residual_small_at_optimum_large_at_start():
    s = generate_scenario(K=2, Nt=3, eta=0.7, snr_db=10, eps=0.1, ranks=3, seed=34)
    w, R = feasible_point(s)
    sub = build_subproblem(s, anchor_from_solution(s, w, R))
    v0 = strict_interior_point(sub, w, R)
    sol = solve(sub, v0)
    assert sol.kkt_residual <= 1e-7
    assert kkt_residual(sub.model, v0, sol.t_final) > 1e-3


# --- constraint calculus --------------------------------------------------

def random_feasible_points(sub, w, R, rng, count):
    v0 = strict_interior_point(sub, w, R)
    pts = [v0]
    while len(pts) < count:
        v = v0 + 1e-3 * rng.standard_normal(len(v0))
        if all(c.value(v) < 0 for c in sub.model.constraints):
            pts.append(v)
    return pts


def test_constraint_gradients_match_finite_differences():
    s = generate_scenario(K=2, Nt=2, eta=0.6, snr_db=10, eps=0.1, ranks=2, seed=35)
    w, R = feasible_point(s, backoff=0.9)
    sub = build_subproblem(s, anchor_from_solution(s, w, R))
    rng = np.random.default_rng(35)
    for v in random_feasible_points(sub, w, R, rng, 5):
        for c in sub.model.constraints:
            _, grad, _ = c.value_grad_curv(v)
            for _ in range(3):
                d = rng.standard_normal(len(v))
                d /= np.linalg.norm(d)
                h = 1e-6
                fd = (c.value(v + h * d) - c.value(v - h * d)) / (2 * h)
                assert fd == pytest.approx(grad @ d, rel=1e-5, abs=1e-7)


def test_constraint_curvature_nonnegative():
    # every scalar row is convex: second differences stay nonnegative
    s = generate_scenario(K=3, Nt=2, eta=0.9, snr_db=10, eps=0.1, ranks=2, seed=36)
    w, R = feasible_point(s, backoff=0.9)
    sub = build_subproblem(s, anchor_from_solution(s, w, R))
    rng = np.random.default_rng(36)
    pts = random_feasible_points(sub, w, R, rng, 100)
    for v in pts:
        c = sub.model.constraints[rng.integers(len(sub.model.constraints))]
        d = rng.standard_normal(len(v))
        d /= np.linalg.norm(d)
        h = 1e-4
        second = c.value(v + h * d) - 2.0 * c.value(v) + c.value(v - h * d)
        scale = max(1.0, abs(c.value(v)))
        assert second >= -1e-6 * scale
