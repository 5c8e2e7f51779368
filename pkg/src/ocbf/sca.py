"""Outer successive conservative approximation loop.

Each iteration anchors the convex subproblem at the current feasible point,
solves it with the barrier method, extracts rank-one beamformers from the
optimal Hermitian blocks, and re-derives guaranteed-feasible rates by
inverting the closed-form outage probability.  The loop stops when the
relative weighted-sum-rate improvement drops below delta.
"""

from dataclasses import dataclass, field, replace

import numpy as np

from . import baselines
from .baselines import BeamformerSolution, evaluate_rates
from .hermitian import eig_hermitian, fix_phase
from .subsolver import (MIX_GAMMA, Anchor, InitializationError, build_subproblem,
                        solve, strict_interior_point)

RATE_FLOOR = 1e-6  # ybar = ln(2^R - 1) must stay finite


class AnchorError(RuntimeError):
    """Anchor cannot be formed (zero signal power or zero rate)."""


def anchor_from_solution(s, w, R) -> Anchor:
    """Anchor per the change of variables at a feasible (w, R) point.

    Rates are floored at RATE_FLOOR before taking ln(2^R - 1).  Cross powers
    are floored slightly above the identity component that the strictly
    feasible start mixes into W, so the linearized rows stay satisfiable;
    the linearization remains a valid underestimate for any anchor.
    """
    R = np.maximum(np.asarray(R, dtype=float), RATE_FLOOR)
    K = s.K
    x_bar = np.zeros((K, K))
    for i in range(K):
        sig = float(np.real(w[i].conj() @ s.Q[i, i] @ w[i]))
        if sig <= 0.0:
            raise AnchorError("zero signal power for user %d" % i)
        x_bar[i, i] = np.log(sig)
        for k in range(K):
            if k == i:
                continue
            cross = float(np.real(w[k].conj() @ s.Q[k, i] @ w[k]))
            mix_level = MIX_GAMMA * (s.P[k] / (2.0 * s.Nt)) * float(np.trace(s.Q[k, i]).real)
            floor = max(1e-12, 2.0 * mix_level)
            x_bar[k, i] = np.log(max(cross, floor))
    y_bar = np.log(np.expm1(R * np.log(2.0)))
    return Anchor(x_bar=x_bar, y_bar=y_bar)


def extract_beamformers(W_list, rank_tol=1e-5):
    """Principal rank-one factors of the optimal Hermitian blocks.

    Returns (w list, rank_ratios) with rank_ratios[i] = lambda_2 / lambda_1,
    the empirical rank-one quality of each block.
    """
    w = []
    ratios = []
    for W in W_list:
        vals, V = eig_hermitian(W)
        lam1 = max(float(vals[0]), 0.0)
        if lam1 == 0.0:
            w.append(np.zeros(W.shape[0], dtype=complex))
            ratios.append(0.0)
            continue
        w.append(np.sqrt(lam1) * fix_phase(V[:, 0]))
        lam2 = max(float(vals[1]), 0.0) if len(vals) > 1 else 0.0
        ratios.append(lam2 / lam1)
    return w, np.array(ratios)


def refeasibilize(s, w) -> np.ndarray:
    """Guaranteed-feasible rates of the extracted beamformers (closed-form
    outage inverted at the realized link powers)."""
    return evaluate_rates(s, w)


def orthogonal_init(s) -> BeamformerSolution:
    """Greedy interference-avoiding start: each user beamforms along the
    principal eigenvector of its own covariance projected orthogonal to the
    directions already assigned to earlier users.  Always feasible; useful
    as an alternative start in interference-dominated settings."""
    chosen = []
    w = []
    for i in range(s.K):
        Pmat = np.eye(s.Nt, dtype=complex)
        for u in chosen:
            Pmat -= np.outer(u, u.conj())
        M = Pmat @ s.Q[i, i] @ Pmat.conj().T
        vals, V = eig_hermitian(0.5 * (M + M.conj().T))
        if vals[0] <= 1e-12:
            # projector exhausted (K > Nt): fall back to plain MRT direction
            _, V = eig_hermitian(s.Q[i, i])
        u = fix_phase(V[:, 0])
        u = u / np.linalg.norm(u)
        chosen.append(u)
        w.append(np.sqrt(s.P[i]) * u)
    return BeamformerSolution(w=w, rates=evaluate_rates(s, w), method="ORTH")


def solo_init(s) -> BeamformerSolution:
    """Near-single-user start: the user with the best weighted single-user
    rate transmits at full MRT power, everyone else at a negligible power.
    Guarantees the loop can reach at least the best single-user operating
    point, which dominates TDMA's equal time shares."""
    from .outage import LinkPowers, epsilon_rate
    solo_obj = np.zeros(s.K)
    for i in range(s.K):
        lam1 = float(np.linalg.eigvalsh(s.Q[i, i])[-1])
        lp = LinkPowers(signal=float(s.P[i]) * lam1, interference=[], sigma2=float(s.sigma2[i]))
        solo_obj[i] = s.alpha[i] * epsilon_rate(lp, float(s.eps[i]))
    star = int(np.argmax(solo_obj))
    w = []
    for i in range(s.K):
        _, V = eig_hermitian(s.Q[i, i])
        scale = 1.0 if i == star else 1e-5
        w.append(scale * np.sqrt(s.P[i]) * fix_phase(V[:, 0]))
    return BeamformerSolution(w=w, rates=evaluate_rates(s, w), method="SOLO")


@dataclass
class ScaConfig:
    delta: float = 1e-2
    max_iters: int = 50
    init: str = "mrt"  # mrt | zf | orth | solo | best | provided
    rank_tol: float = 1e-5
    init_solution: BeamformerSolution = None
    verbose: bool = False

    def __post_init__(self):
        if not (self.delta > 0):
            raise ValueError("delta must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")


@dataclass
class ScaResult:
    solution: BeamformerSolution
    objective_trace: list
    iterations: int
    rank_ratios: np.ndarray
    converged: bool
    subproblem_rank_ratios: list = field(default_factory=list)
    subproblem_statuses: list = field(default_factory=list)


def _initial_solution(s, cfg: ScaConfig) -> BeamformerSolution:
    if cfg.init == "mrt":
        return baselines.mrt(s)
    if cfg.init == "zf":
        return baselines.zf(s)  # may raise InfeasibleStrategyError
    if cfg.init == "orth":
        return orthogonal_init(s)
    if cfg.init == "solo":
        return solo_init(s)
    if cfg.init == "provided":
        if cfg.init_solution is None:
            raise ValueError("init='provided' requires init_solution")
        return cfg.init_solution
    raise ValueError("unknown init strategy %r" % cfg.init)


def run(s, cfg: ScaConfig = None) -> ScaResult:
    """Run the sequential conservative approximation from a feasible start.

    init='best' tries starts in the order MRT, ZF (when feasible), greedy
    orthogonal, near-single-user, stopping early once the outcome beats
    every simple baseline strategy, and returns the best run found.
    """
    cfg = cfg or ScaConfig()
    if cfg.init == "best":
        targets = [baselines.mrt(s).weighted_sum(s.alpha),
                   baselines.tdma(s).weighted_sum(s.alpha)]
        try:
            targets.append(baselines.zf(s).weighted_sum(s.alpha))
        except baselines.InfeasibleStrategyError:
            pass
        target = max(targets)
        best = None
        for init in ("mrt", "zf", "orth", "solo"):
            try:
                res = run(s, replace(cfg, init=init))
            except baselines.InfeasibleStrategyError:
                continue
            if best is None or (res.solution.weighted_sum(s.alpha)
                                > best.solution.weighted_sum(s.alpha)):
                best = res
            if best.solution.weighted_sum(s.alpha) >= target and best.converged:
                break
        return best
    init = _initial_solution(s, cfg)
    w_bar = [np.asarray(wi, dtype=complex) for wi in init.w]
    R_bar = np.asarray(init.rates, dtype=float)
    alpha = s.alpha
    obj_bar = float(alpha @ R_bar)
    trace = [obj_bar]
    best_w, best_R, best_obj = w_bar, R_bar, obj_bar
    ratios = np.zeros(s.K)
    all_ratios = []
    statuses = []
    converged = False
    iters = 0
    for iters in range(1, cfg.max_iters + 1):
        anchor = anchor_from_solution(s, w_bar, R_bar)
        sub = build_subproblem(s, anchor)
        try:
            v0 = strict_interior_point(sub, w_bar, R_bar)
        except InitializationError:
            break
        sol = solve(sub, v0)
        statuses.append(sol.status)
        if sol.status != "optimal":
            break
        w_new, ratios = extract_beamformers(sol.W, cfg.rank_tol)
        all_ratios.append(ratios)
        R_new = refeasibilize(s, w_new)
        obj_new = float(alpha @ R_new)
        if cfg.verbose:
            print("sca iter %d: objective %.6f (subproblem %.6f)"
                  % (iters, obj_new, sol.objective))
        denom = float(alpha @ R_bar)
        stop = abs(obj_new - obj_bar) < cfg.delta * denom if denom > 0 else obj_new < cfg.delta
        if obj_new < obj_bar:
            # the conservative model could not certify ascent from this anchor
            # (its floors hide sub-floor interference); re-anchoring at the
            # same point would reproduce the subproblem, so stop here
            converged = stop
            break
        trace.append(obj_new)
        if obj_new >= best_obj:
            best_w, best_R, best_obj = w_new, R_new, obj_new
        w_bar, R_bar, obj_bar = w_new, R_new, obj_new
        if stop:
            converged = True
            break
    solution = BeamformerSolution(w=best_w, rates=best_R, method="SCA",
                                  meta={"iterations": iters, "converged": converged,
                                        "init": cfg.init})
    return ScaResult(solution=solution, objective_trace=trace, iterations=iters,
                     rank_ratios=ratios, converged=converged,
                     subproblem_rank_ratios=all_ratios,
                     subproblem_statuses=statuses)
