"""Exhaustive-search optimality oracle for the two-user channel.

The achievable region is sampled by discretizing the cross-link interference
each transmitter is allowed to cause into geometric levels (plus an exact
zero level).  For every cap, the transmitter maximizes its own received
signal covariance subject to the power budget and that single interference
cap (a tiny linear SDP), and the receiver rate uses the cap itself as the
interference power, so every grid point is achievable.  The search cost is
M^(K(K-1)), which is why only K = 2 is supported.
"""

from dataclasses import dataclass, field

import numpy as np

from .hermitian import eig_hermitian, fix_phase, joint_nullspace
from .outage import LN2
from .subsolver import (BarrierModel, SmoothConstraint, herm_trace_coeffs,
                        herm_unpack, solve_barrier)


class UnsupportedKError(ValueError):
    """Exhaustive search requested for K != 2."""


@dataclass
class OracleConfig:
    M: int = 20
    grid_min_frac: float = 1e-4
    include_zero: bool = True

    def __post_init__(self):
        if self.M < 2:
            raise ValueError("need at least 2 discretization levels")


@dataclass
class OracleResult:
    best_rates: np.ndarray
    best_sum: float
    best_w: list
    grid: dict
    evaluated: int
    best_caps: dict = field(default_factory=dict)


def interference_grid(s, cfg: OracleConfig) -> dict:
    """Interference cap levels per cross link (k, i), k != i."""
    if s.K != 2:
        raise UnsupportedKError("exhaustive search supports K=2 only, got K=%d" % s.K)
    grid = {}
    for k in range(s.K):
        for i in range(s.K):
            if k == i:
                continue
            gamma_max = float(s.P[k]) * float(np.linalg.eigvalsh(s.Q[k, i])[-1])
            if gamma_max <= 0.0:
                grid[(k, i)] = np.array([0.0])
                continue
            levels = np.geomspace(cfg.grid_min_frac * gamma_max, gamma_max, cfg.M)
            if cfg.include_zero:
                levels = np.concatenate(([0.0], levels))
            grid[(k, i)] = levels
    return grid


def max_signal_power(Q_own, Q_cross, P, gamma_cap):
    """maximize w^H Q_own w  s.t.  ||w||^2 <= P,  w^H Q_cross w <= gamma_cap.

    Solved as the SDP relaxation over W >= 0 (which has a rank-one optimum
    for two linear constraints) via the barrier solver, with shortcuts for
    the inactive-cap and zero-cap cases.  Returns (s_max, w).
    """
    Q_own = np.asarray(Q_own, dtype=complex)
    Q_cross = np.asarray(Q_cross, dtype=complex)
    Nt = Q_own.shape[0]
    if not (P > 0) or gamma_cap < 0:
        raise ValueError("need P > 0 and gamma_cap >= 0")
    vals, V = eig_hermitian(Q_own)
    w_mrt = np.sqrt(P) * fix_phase(V[:, 0])
    cross_mrt = float(np.real(w_mrt.conj() @ Q_cross @ w_mrt))
    if cross_mrt <= gamma_cap:
        return float(P * vals[0]), w_mrt
    if gamma_cap == 0.0:
        B = joint_nullspace([Q_cross])
        if B.shape[1] == 0:
            return 0.0, np.zeros(Nt, dtype=complex)
        nvals, nV = eig_hermitian(B.conj().T @ Q_own @ B)
        u = fix_phase(B @ nV[:, 0])
        w = np.sqrt(P) * u / np.linalg.norm(u)
        return float(np.real(w.conj() @ Q_own @ w)), w
    n = Nt * Nt
    power_row = SmoothConstraint(n, d0=-float(P), label="power")
    power_row.d[:] = herm_trace_coeffs(np.eye(Nt))
    cap_row = SmoothConstraint(n, d0=-float(gamma_cap), label="cap")
    cap_row.d[:] = herm_trace_coeffs(Q_cross)
    model = BarrierModel(n=n, objective=herm_trace_coeffs(Q_own),
                         constraints=[power_row, cap_row], psd_blocks=[(0, Nt)])
    tr_cross = float(np.trace(Q_cross).real)
    c0 = min(P / (2.0 * Nt), gamma_cap / (2.0 * tr_cross))
    from .subsolver import herm_pack
    v0 = herm_pack(c0 * np.eye(Nt))
    bs = solve_barrier(model, v0)
    W = herm_unpack(bs.v, Nt)
    wvals, wV = eig_hermitian(W)
    lam1 = max(float(wvals[0]), 0.0)
    if lam1 == 0.0:
        return 0.0, np.zeros(Nt, dtype=complex)
    w = np.sqrt(lam1) * fix_phase(wV[:, 0])
    # the rank-one part of a feasible W is feasible; scale up to the binding
    # constraint to recover any mass lost to residual rank
    cross_w = float(np.real(w.conj() @ Q_cross @ w))
    norm2 = float(np.real(w.conj() @ w))
    rho2 = min(P / norm2, gamma_cap / cross_w if cross_w > 0 else np.inf)
    if rho2 > 1.0:
        w = w * np.sqrt(rho2)
    return float(np.real(w.conj() @ Q_own @ w)), w


def _eps_rate_single(sig, interf, sigma2, eps, iters=200):
    """Vectorized epsilon-rate inversion for a single interference term.

    sig and interf broadcast against each other; returns rates of the
    broadcast shape.
    """
    sig, interf = np.broadcast_arrays(np.asarray(sig, float), np.asarray(interf, float))
    out = np.zeros(sig.shape)
    pos = sig > 0

    def pout(R):
        t = np.expm1(R * LN2)
        log_success = -t * sigma2 / sig[pos] - np.log1p(t * interf[pos] / sig[pos])
        return -np.expm1(log_success)

    if not np.any(pos):
        return out
    hi = np.ones(np.count_nonzero(pos))
    for _ in range(200):
        below = pout(hi) < eps
        if not np.any(below):
            break
        hi[below] *= 2.0
    lo = np.zeros_like(hi)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        small = pout(mid) < eps
        lo = np.where(small, mid, lo)
        hi = np.where(small, hi, mid)
    out[pos] = 0.5 * (lo + hi)
    return out


def exhaustive_search(s, cfg: OracleConfig = None) -> OracleResult:
    """Best weighted rate tuple over the discretized interference caps (K=2)."""
    cfg = cfg or OracleConfig()
    grid = interference_grid(s, cfg)
    lv01 = grid[(0, 1)]
    lv10 = grid[(1, 0)]
    s0 = np.zeros(len(lv01))
    w0 = []
    for a, gamma in enumerate(lv01):
        s0[a], w = max_signal_power(s.Q[0, 0], s.Q[0, 1], float(s.P[0]), float(gamma))
        w0.append(w)
    s1 = np.zeros(len(lv10))
    w1 = []
    for b, gamma in enumerate(lv10):
        s1[b], w = max_signal_power(s.Q[1, 1], s.Q[1, 0], float(s.P[1]), float(gamma))
        w1.append(w)
    # R0[a, b]: user 0 transmits under cap lv01[a]; its receiver sees at most lv10[b]
    R0 = _eps_rate_single(s0[:, None], lv10[None, :], float(s.sigma2[0]), float(s.eps[0]))
    R1 = _eps_rate_single(s1[None, :], lv01[:, None], float(s.sigma2[1]), float(s.eps[1]))
    total = s.alpha[0] * R0 + s.alpha[1] * R1
    flat = int(np.argmax(total))  # first maximum: lexicographic tie-break
    a, b = np.unravel_index(flat, total.shape)
    best_rates = np.array([R0[a, b], R1[a, b]])
    return OracleResult(best_rates=best_rates, best_sum=float(total[a, b]),
                        best_w=[w0[a], w1[b]], grid=grid,
                        evaluated=len(lv01) * len(lv10),
                        best_caps={(0, 1): float(lv01[a]), (1, 0): float(lv10[b])})
