"""Problem-instance construction: covariances, channel sampling, file I/O.

Covariance matrices are generated as A A^H with Gaussian A of a chosen rank,
then rescaled so that lambda_max(Q_ii) = 1 and lambda_max(Q_ki) = eta for
cross links.  All randomness goes through numpy's PCG64 generator; the
algorithm name is recorded in saved files so runs can be reproduced.
"""

import json
from dataclasses import dataclass

import numpy as np

from .hermitian import check_hermitian, eig_hermitian, sqrt_factor

RNG_ALGORITHM = "numpy-PCG64"


@dataclass
class Scenario:
    """One problem instance of the K-user interference channel."""

    K: int
    Nt: int
    Q: np.ndarray  # (K, K, Nt, Nt) complex; Q[k][i] is the tx-k -> rx-i covariance
    sigma2: np.ndarray
    P: np.ndarray
    eps: np.ndarray
    alpha: np.ndarray
    eta: float
    seed: int = 0

    def __post_init__(self):
        self.Q = np.asarray(self.Q, dtype=complex)
        for name in ("sigma2", "P", "eps", "alpha"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=float))

    def validate(self, normalization_tol=1e-9):
        if self.K < 1 or self.Nt < 1:
            raise ValueError("K and Nt must be positive")
        if self.Q.shape != (self.K, self.K, self.Nt, self.Nt):
            raise ValueError("Q has shape %s, expected %s"
                             % (self.Q.shape, (self.K, self.K, self.Nt, self.Nt)))
        for name in ("sigma2", "P", "eps", "alpha"):
            if getattr(self, name).shape != (self.K,):
                raise ValueError("%s must have length K" % name)
        if np.any(self.sigma2 <= 0) or np.any(self.P <= 0):
            raise ValueError("noise powers and power budgets must be positive")
        if np.any(self.eps <= 0) or np.any(self.eps > 1):
            raise ValueError("outage budgets must lie in (0, 1]")
        if np.any(self.alpha < 0) or not np.any(self.alpha > 0):
            raise ValueError("weights must be nonnegative with at least one positive")
        for k in range(self.K):
            for i in range(self.K):
                vals, _ = eig_hermitian(check_hermitian(self.Q[k, i]))
                lmax = vals[0]
                if vals[-1] < -1e-10 * max(lmax, 1e-30):
                    raise ValueError("Q[%d][%d] is not PSD" % (k, i))
                target = 1.0 if k == i else self.eta
                if abs(lmax - target) > normalization_tol * max(1.0, target):
                    raise ValueError("lambda_max(Q[%d][%d]) = %.12g, expected %.12g"
                                     % (k, i, lmax, target))
        return self


def generate_scenario(K, Nt, eta, snr_db, eps, ranks, seed,
                      P=None, alpha=None) -> Scenario:
    """Random scenario with the standard normalizations.

    Each Q[k][i] is A A^H with A an Nt x rank standard complex Gaussian
    matrix, rescaled so lambda_max is 1 for direct links and eta for cross
    links.  sigma2 = 10^(-snr_db/10) for all users; P and alpha default to 1.
    eta = 0 yields exactly zero cross covariances.
    """
    if K < 1 or Nt < 1:
        raise ValueError("K and Nt must be positive")
    if not (0.0 <= eta <= 1.0):
        raise ValueError("eta must lie in [0, 1]")
    ranks = int(ranks)
    if not (1 <= ranks <= Nt):
        raise ValueError("rank must lie in [1, Nt]")
    rng = np.random.default_rng(seed)
    Q = np.zeros((K, K, Nt, Nt), dtype=complex)
    for k in range(K):
        for i in range(K):
            A = (rng.standard_normal((Nt, ranks)) + 1j * rng.standard_normal((Nt, ranks)))
            A /= np.sqrt(2.0)
            M = A @ A.conj().T
            target = 1.0 if k == i else eta
            lmax = float(np.linalg.eigvalsh(M)[-1])
            Q[k, i] = M * (target / lmax) if target > 0 else 0.0
    sigma2 = np.full(K, 10.0 ** (-snr_db / 10.0))
    P = np.ones(K) if P is None else np.asarray(P, dtype=float)
    alpha = np.ones(K) if alpha is None else np.asarray(alpha, dtype=float)
    s = Scenario(K=K, Nt=Nt, Q=Q, sigma2=sigma2, P=P,
                 eps=np.full(K, float(eps)), alpha=alpha, eta=float(eta), seed=int(seed))
    return s.validate()


def trial_rng(master_seed, *key):
    """Independent generator for one (axis index, trial index, ...) stream."""
    return np.random.default_rng(np.random.SeedSequence((int(master_seed),) + tuple(int(x) for x in key)))


def sample_channels(s: Scenario, rng) -> np.ndarray:
    """Draw one channel realization h with h[k, i] ~ CN(0, Q[k][i])."""
    h = np.zeros((s.K, s.K, s.Nt), dtype=complex)
    for k in range(s.K):
        for i in range(s.K):
            F = sqrt_factor(s.Q[k, i])
            if F.shape[1] == 0:
                continue
            g = (rng.standard_normal(F.shape[1]) + 1j * rng.standard_normal(F.shape[1])) / np.sqrt(2.0)
            h[k, i] = F @ g
    return h


def _complex_matrix_to_json(M):
    return [[[float(z.real), float(z.imag)] for z in row] for row in M]


def _complex_matrix_from_json(rows, what):
    try:
        return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=complex)
    except (TypeError, ValueError) as exc:
        raise ValueError("malformed complex matrix in field %r: %s" % (what, exc)) from None


def save_scenario(s: Scenario, path):
    doc = {
        "rng_algorithm": RNG_ALGORITHM,
        "K": s.K,
        "Nt": s.Nt,
        "eta": s.eta,
        "sigma2": s.sigma2.tolist(),
        "P": s.P.tolist(),
        "eps": s.eps.tolist(),
        "alpha": s.alpha.tolist(),
        "seed": int(s.seed),
        "Q": [[_complex_matrix_to_json(s.Q[k, i]) for i in range(s.K)] for k in range(s.K)],
    }
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def load_scenario(path) -> Scenario:
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise ValueError("failed to parse scenario file %s: %s" % (path, exc)) from None
    for key in ("K", "Nt", "eta", "sigma2", "P", "eps", "alpha", "Q"):
        if key not in doc:
            raise ValueError("scenario file %s is missing field %r" % (path, key))
    K, Nt = int(doc["K"]), int(doc["Nt"])
    Q = np.zeros((K, K, Nt, Nt), dtype=complex)
    rows = doc["Q"]
    if len(rows) != K or any(len(r) != K for r in rows):
        raise ValueError("field 'Q' must be a %dx%d array of matrices" % (K, K))
    for k in range(K):
        for i in range(K):
            M = _complex_matrix_from_json(rows[k][i], "Q[%d][%d]" % (k, i))
            if M.shape != (Nt, Nt):
                raise ValueError("Q[%d][%d] has shape %s, expected (%d, %d)"
                                 % (k, i, M.shape, Nt, Nt))
            Q[k, i] = M
    s = Scenario(K=K, Nt=Nt, Q=Q,
                 sigma2=doc["sigma2"], P=doc["P"], eps=doc["eps"], alpha=doc["alpha"],
                 eta=float(doc["eta"]), seed=int(doc.get("seed", 0)))
    return s.validate()
