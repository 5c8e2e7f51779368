"""Rate and outage mathematics for the statistical-CSI interference channel.

The channel from transmitter k to receiver i is h_ki ~ CN(0, Q_ki), so the
received signal power |h_ii^H w_i|^2 is exponential with mean w_i^H Q_ii w_i
and each interference term is exponential with mean w_k^H Q_ki w_k.  The
outage probability of a rate target R then has the closed form

    1 - exp(-(2^R - 1) sigma^2 / s) * prod_k s / (s + (2^R - 1) I_k)

which is evaluated in log domain here to stay accurate at high rates.
"""

from dataclasses import dataclass

import numpy as np

from .hermitian import sqrt_factor

LN2 = np.log(2.0)


@dataclass
class LinkPowers:
    """Average received powers seen by one receiver."""

    signal: float
    interference: np.ndarray
    sigma2: float

    def __post_init__(self):
        self.interference = np.atleast_1d(np.asarray(self.interference, dtype=float))
        if not np.isfinite(self.signal) or self.signal < 0:
            raise ValueError("signal power must be finite and nonnegative")
        if np.any(~np.isfinite(self.interference)) or np.any(self.interference < 0):
            raise ValueError("interference powers must be finite and nonnegative")
        if not (self.sigma2 > 0):
            raise ValueError("noise power must be positive")


def instantaneous_rate(h, w, sigma2, i):
    """Achievable rate of user i for one channel realization.

    h has shape (K, K, Nt) with h[k, i] the channel from transmitter k to
    receiver i; w is the list of beamforming vectors.
    """
    sig = abs(np.vdot(h[i, i], w[i])) ** 2
    interf = sum(abs(np.vdot(h[k, i], w[k])) ** 2 for k in range(len(w)) if k != i)
    return float(np.log2(1.0 + sig / (interf + sigma2)))


def outage_probability(lp: LinkPowers, R: float) -> float:
    """Closed-form outage probability Pr{rate < R} for given link powers."""
    if R < 0:
        raise ValueError("rate target must be nonnegative")
    if R == 0.0:
        return 0.0
    if lp.signal == 0.0:
        return 1.0
    t = np.expm1(R * LN2)  # 2^R - 1
    log_success = -t * lp.sigma2 / lp.signal - np.sum(np.log1p(t * lp.interference / lp.signal))
    return float(-np.expm1(log_success))


def epsilon_rate(lp: LinkPowers, eps: float, tol=1e-10, max_iter=200) -> float:
    """Largest rate whose outage probability does not exceed eps.

    Found by bisection on the (strictly increasing) outage probability.
    """
    if not (0.0 < eps < 1.0):
        raise ValueError("outage budget must lie in (0, 1)")
    if lp.signal == 0.0:
        return 0.0
    lo, hi = 0.0, 1.0
    grow = 0
    while outage_probability(lp, hi) < eps:
        lo, hi = hi, 2.0 * hi
        grow += 1
        if grow > 200:
            raise RuntimeError("failed to bracket the epsilon-rate")
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        p = outage_probability(lp, mid)
        if abs(p - eps) <= tol:
            return mid
        if p < eps:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def mc_outage(s, w, R, i, n_samples, rng):
    """Monte Carlo outage estimate for user i at rate target R[i].

    Draws n_samples independent channel realizations h_ki = F_ki g with g
    standard complex normal, and counts rate < R[i].  Returns
    (estimate, stderr).
    """
    if n_samples < 1:
        raise ValueError("need at least one sample")
    R_i = float(np.asarray(R)[i]) if np.ndim(R) else float(R)
    if R_i == 0.0:
        return 0.0, 0.0
    K = s.K
    threshold = np.expm1(R_i * LN2)  # rate < R  <=>  SINR < 2^R - 1
    sig = np.zeros(n_samples)
    interf = np.zeros(n_samples)
    for k in range(K):
        F = sqrt_factor(s.Q[k][i])
        a = F.conj().T @ w[k]
        if a.size == 0 or np.linalg.norm(a) == 0.0:
            continue
        g = rng.standard_normal((n_samples, a.size)) + 1j * rng.standard_normal((n_samples, a.size))
        g /= np.sqrt(2.0)
        p = np.abs(g.conj() @ a) ** 2  # |h^H w|^2 with h = F g
        if k == i:
            sig = p
        else:
            interf += p
    outages = sig < threshold * (interf + s.sigma2[i])
    est = float(np.mean(outages))
    stderr = float(np.sqrt(est * (1.0 - est) / n_samples))
    return est, stderr
