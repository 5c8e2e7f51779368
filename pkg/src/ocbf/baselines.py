"""Baseline transmission strategies: MRT, statistical ZF, and TDMA.

These serve both as comparison curves and as feasible starting points for
the successive approximation loop.  All of them report the epsilon-outage
rates obtained by inverting the closed-form outage probability at the
average link powers they induce.
"""

from dataclasses import dataclass, field

import numpy as np

from .hermitian import eig_hermitian, fix_phase, joint_nullspace
from .outage import LinkPowers, epsilon_rate


class InfeasibleStrategyError(RuntimeError):
    """Raised when a strategy cannot produce a valid beamformer (e.g. empty ZF null space)."""

    def __init__(self, message, user=None):
        super().__init__(message)
        self.user = user


@dataclass
class BeamformerSolution:
    """Per-user beamformers together with the rate tuple they support."""

    w: list
    rates: np.ndarray
    method: str
    meta: dict = field(default_factory=dict)

    @property
    def sum_rate(self):
        return float(np.sum(self.rates))

    def weighted_sum(self, alpha):
        return float(np.dot(np.asarray(alpha, dtype=float), self.rates))


def link_powers(s, w, i) -> LinkPowers:
    """Average signal and interference powers at receiver i under beamformers w."""
    sig = float(np.real(w[i].conj() @ s.Q[i, i] @ w[i]))
    interf = np.array([float(np.real(w[k].conj() @ s.Q[k, i] @ w[k]))
                       for k in range(s.K) if k != i])
    return LinkPowers(signal=max(sig, 0.0), interference=np.maximum(interf, 0.0),
                      sigma2=float(s.sigma2[i]))


def evaluate_rates(s, w) -> np.ndarray:
    """Epsilon-outage rates of the given beamformers (simultaneous transmission)."""
    rates = np.zeros(s.K)
    for i in range(s.K):
        lp = link_powers(s, w, i)
        if lp.signal == 0.0:
            rates[i] = 0.0
        else:
            rates[i] = epsilon_rate(lp, float(s.eps[i]))
    return rates


def mrt(s) -> BeamformerSolution:
    """Maximum-ratio transmission: beamform along the principal eigenvector of Q_ii."""
    w = []
    for i in range(s.K):
        _, V = eig_hermitian(s.Q[i, i])
        w.append(np.sqrt(s.P[i]) * fix_phase(V[:, 0]))
    return BeamformerSolution(w=w, rates=evaluate_rates(s, w), method="MRT")


def zf(s) -> BeamformerSolution:
    """Statistical zero forcing: confine w_i to the joint null space of its
    outgoing cross covariances {Q_ij : j != i} and maximize the own-signal
    covariance there."""
    w = []
    for i in range(s.K):
        crosses = [s.Q[i, j] for j in range(s.K) if j != i]
        if crosses:
            B = joint_nullspace(crosses)
        else:
            B = np.eye(s.Nt, dtype=complex)
        if B.shape[1] == 0:
            raise InfeasibleStrategyError(
                "ZF infeasible: empty joint null space for user %d" % i, user=i)
        _, V = eig_hermitian(B.conj().T @ s.Q[i, i] @ B)
        u = fix_phase(B @ V[:, 0])
        w.append(np.sqrt(s.P[i]) * u / np.linalg.norm(u))
    return BeamformerSolution(w=w, rates=evaluate_rates(s, w), method="ZF")


def tdma(s) -> BeamformerSolution:
    """Equal 1/K time sharing with per-slot MRT at full power and no interference.

    Reported rates are the slot rates scaled by the 1/K time share.  Per-slot
    power equals P_i (no power boosting across slots).
    """
    w = []
    rates = np.zeros(s.K)
    for i in range(s.K):
        vals, V = eig_hermitian(s.Q[i, i])
        w.append(np.sqrt(s.P[i]) * fix_phase(V[:, 0]))
        lp = LinkPowers(signal=float(s.P[i] * vals[0]), interference=[], sigma2=float(s.sigma2[i]))
        rates[i] = epsilon_rate(lp, float(s.eps[i])) / s.K
    return BeamformerSolution(w=w, rates=rates, method="TDMA",
                              meta={"time_share": 1.0 / s.K, "slot_power": "P_i"})
