"""Barrier interior-point solver for the convex conservative subproblem.

One subproblem instance has, per user i, a Hermitian block W_i (Nt^2 real
parameters), the rate R_i, and slack scalars y_i, z_i and x_ki.  The
constraint set in solver form is

  (a)  ln(1-eps_i) + sigma_i^2 z_i + sum_{k!=i} softplus(x_ki + y_i - x_ii) <= 0
  (b)  tr(W_k Q_ki) <= e^{xbar_ki} (x_ki - xbar_ki + 1),   k != i
  (c)  e^{x_ii} <= tr(W_i Q_ii)
  (d)  ln Theta_i + (ln 2) R_i - theta_i1 y_i <= 0
  (e)  e^{y_i - x_ii} <= z_i
  (f)  tr(W_i) <= P_i
  (g)  W_i PSD,  R_i >= 0

(a) and (d) are the exact logarithms of the product-form outage row and the
monomial rate bound; the log form is much better conditioned.  The solver
is a plain log-barrier path-following method: dense Newton steps with
backtracking line search, barrier parameter multiplied by mu each outer
stage until m_total / t <= gap_tol.  Problem sizes are tiny (a few hundred
real variables), so dense factorizations are the robust choice.
"""

from dataclasses import dataclass, field

import numpy as np

from .hermitian import check_hermitian

# weight of the identity component mixed into the strictly feasible start
MIX_GAMMA = 1e-3

_EXP = 0
_SOFTPLUS = 1


class InitializationError(RuntimeError):
    """Strictly feasible start could not be constructed (degenerate anchor)."""


# ---------------------------------------------------------------------------
# Hermitian parametrization: Nt real diagonal entries followed by (re, im)
# pairs for the strict upper triangle in row-major order.

_BASIS_CACHE = {}


def herm_basis(dim):
    """Real basis matrices E_m of the Hermitian parametrization, shape (dim^2, dim, dim)."""
    if dim not in _BASIS_CACHE:
        E = np.zeros((dim * dim, dim, dim), dtype=complex)
        m = 0
        for p in range(dim):
            E[m, p, p] = 1.0
            m += 1
        for p in range(dim):
            for q in range(p + 1, dim):
                E[m, p, q] = 1.0
                E[m, q, p] = 1.0
                m += 1
                E[m, p, q] = 1.0j
                E[m, q, p] = -1.0j
                m += 1
        _BASIS_CACHE[dim] = E
    return _BASIS_CACHE[dim]


def herm_pack(W):
    """Hermitian matrix -> real parameter vector of length dim^2."""
    W = np.asarray(W, dtype=complex)
    dim = W.shape[0]
    params = np.empty(dim * dim)
    params[:dim] = np.diag(W).real
    m = dim
    for p in range(dim):
        for q in range(p + 1, dim):
            params[m] = W[p, q].real
            params[m + 1] = W[p, q].imag
            m += 2
    return params


def herm_unpack(params, dim):
    """Real parameter vector -> Hermitian matrix."""
    W = np.zeros((dim, dim), dtype=complex)
    W[np.diag_indices(dim)] = params[:dim]
    m = dim
    for p in range(dim):
        for q in range(p + 1, dim):
            W[p, q] = params[m] + 1j * params[m + 1]
            W[q, p] = params[m] - 1j * params[m + 1]
            m += 2
    return W


def herm_trace_coeffs(Q):
    """Coefficients c with c @ herm_pack(W) = Re tr(W Q) for Hermitian Q."""
    Q = np.asarray(Q, dtype=complex)
    dim = Q.shape[0]
    c = np.empty(dim * dim)
    c[:dim] = np.diag(Q).real
    m = dim
    for p in range(dim):
        for q in range(p + 1, dim):
            c[m] = 2.0 * Q[q, p].real
            c[m + 1] = -2.0 * Q[q, p].imag
            m += 2
    return c


# ---------------------------------------------------------------------------
# Generic smooth convex constraint g(v) <= 0 of the form
#   g(v) = d.v + d0 + sum_j w_j phi_j(a_j.v + b_j),  phi in {exp, softplus}.

def _sigmoid(u):
    return 0.5 * (1.0 + np.tanh(0.5 * u))


class SmoothConstraint:
    __slots__ = ("d", "d0", "terms", "label")

    def __init__(self, n, d0=0.0, label=""):
        self.d = np.zeros(n)
        self.d0 = float(d0)
        self.terms = []
        self.label = label

    def add_exp(self, weight, a, b=0.0):
        self.terms.append((_EXP, float(weight), np.asarray(a, dtype=float), float(b)))
        return self

    def add_softplus(self, weight, a, b=0.0):
        self.terms.append((_SOFTPLUS, float(weight), np.asarray(a, dtype=float), float(b)))
        return self

    def value(self, v):
        val = self.d @ v + self.d0
        for kind, w, a, b in self.terms:
            u = a @ v + b
            if kind == _EXP:
                val += w * (np.exp(u) if u < 700 else np.inf)
            else:
                val += w * np.logaddexp(0.0, u)
        return val

    def value_grad_curv(self, v):
        """Returns (value, gradient, [(curvature_weight, a_j)]) at v."""
        val = self.d @ v + self.d0
        grad = self.d.copy()
        curv = []
        for kind, w, a, b in self.terms:
            u = a @ v + b
            if kind == _EXP:
                e = np.exp(u) if u < 700 else np.inf
                val += w * e
                grad = grad + (w * e) * a
                curv.append((w * e, a))
            else:
                sg = _sigmoid(u)
                val += w * np.logaddexp(0.0, u)
                grad = grad + (w * sg) * a
                curv.append((w * sg * (1.0 - sg), a))
        return val, grad, curv


@dataclass
class BarrierModel:
    """maximize objective @ v  s.t.  g_j(v) <= 0 and Hermitian blocks PSD."""

    n: int
    objective: np.ndarray
    constraints: list
    psd_blocks: list  # (offset, dim) pairs

    @property
    def m_total(self):
        return len(self.constraints) + sum(dim for _, dim in self.psd_blocks)


# ---------------------------------------------------------------------------
# Anchor (linearization point) of the conservative approximation.

@dataclass
class Anchor:
    """Linearization point: log powers xbar, log(2^R - 1) ybar, and the
    AM-GM weights theta1, theta2 with Theta = theta1^theta1 * theta2^theta2."""

    x_bar: np.ndarray  # (K, K); x_bar[k][i] = ln received power of link k->i
    y_bar: np.ndarray  # (K,)
    theta1: np.ndarray = None
    theta2: np.ndarray = None
    big_theta: np.ndarray = None

    def __post_init__(self):
        self.x_bar = np.asarray(self.x_bar, dtype=float)
        self.y_bar = np.asarray(self.y_bar, dtype=float)
        ey = np.exp(self.y_bar)
        if self.theta1 is None:
            self.theta1 = ey / (ey + 1.0)
        if self.theta2 is None:
            self.theta2 = 1.0 - self.theta1
        if self.big_theta is None:
            self.big_theta = self.theta1 ** self.theta1 * self.theta2 ** self.theta2


# ---------------------------------------------------------------------------
# Variable layout and subproblem assembly.

@dataclass
class Layout:
    K: int
    Nt: int

    @property
    def n(self):
        return self.K * self.Nt ** 2 + self.K ** 2 + 3 * self.K

    def w_slice(self, i):
        return slice(i * self.Nt ** 2, (i + 1) * self.Nt ** 2)

    def x_idx(self, k, i):
        return self.K * self.Nt ** 2 + k * self.K + i

    def r_idx(self, i):
        return self.K * self.Nt ** 2 + self.K ** 2 + i

    def y_idx(self, i):
        return self.K * self.Nt ** 2 + self.K ** 2 + self.K + i

    def z_idx(self, i):
        return self.K * self.Nt ** 2 + self.K ** 2 + 2 * self.K + i


@dataclass
class SubproblemModel:
    scenario: object
    anchor: Anchor
    layout: Layout
    model: BarrierModel


@dataclass
class SubproblemSolution:
    W: list
    R: np.ndarray
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    objective: float
    kkt_residual: float
    iterations: int
    status: str  # optimal | max-iter | numerical-failure
    v: np.ndarray = None
    t_final: float = 0.0
    feasibility_residual: float = 0.0


def build_subproblem(s, anchor: Anchor) -> SubproblemModel:
    """Assemble the convex conservative subproblem at the given anchor."""
    K, Nt = s.K, s.Nt
    lay = Layout(K, Nt)
    n = lay.n
    constraints = []
    ln2 = np.log(2.0)
    for i in range(K):
        # (a) log-form outage constraint
        con = SmoothConstraint(n, d0=np.log(1.0 - s.eps[i]), label="outage[%d]" % i)
        con.d[lay.z_idx(i)] = s.sigma2[i]
        for k in range(K):
            if k == i:
                continue
            a = np.zeros(n)
            a[lay.x_idx(k, i)] = 1.0
            a[lay.y_idx(i)] = 1.0
            a[lay.x_idx(i, i)] = -1.0
            con.add_softplus(1.0, a)
        constraints.append(con)
        # (b) linearized cross-power rows: tr(W_k Q_ki) <= e^xbar (x_ki - xbar + 1)
        for k in range(K):
            if k == i:
                continue
            exb = np.exp(anchor.x_bar[k, i])
            con = SmoothConstraint(n, d0=exb * (anchor.x_bar[k, i] - 1.0),
                                   label="cross[%d,%d]" % (k, i))
            con.d[lay.w_slice(k)] = herm_trace_coeffs(s.Q[k, i])
            con.d[lay.x_idx(k, i)] = -exb
            constraints.append(con)
        # (c) e^{x_ii} <= tr(W_i Q_ii)
        con = SmoothConstraint(n, label="signal[%d]" % i)
        con.d[lay.w_slice(i)] = -herm_trace_coeffs(s.Q[i, i])
        a = np.zeros(n)
        a[lay.x_idx(i, i)] = 1.0
        con.add_exp(1.0, a)
        constraints.append(con)
        # (d) log of the AM-GM monomial rate bound
        con = SmoothConstraint(n, d0=np.log(anchor.big_theta[i]), label="rate[%d]" % i)
        con.d[lay.r_idx(i)] = ln2
        con.d[lay.y_idx(i)] = -anchor.theta1[i]
        constraints.append(con)
        # (e) e^{y_i - x_ii} <= z_i
        con = SmoothConstraint(n, label="slack[%d]" % i)
        con.d[lay.z_idx(i)] = -1.0
        a = np.zeros(n)
        a[lay.y_idx(i)] = 1.0
        a[lay.x_idx(i, i)] = -1.0
        con.add_exp(1.0, a)
        constraints.append(con)
        # (f) tr(W_i) <= P_i
        con = SmoothConstraint(n, d0=-s.P[i], label="power[%d]" % i)
        con.d[lay.w_slice(i)] = herm_trace_coeffs(np.eye(Nt))
        constraints.append(con)
        # R_i >= 0
        con = SmoothConstraint(n, label="ratepos[%d]" % i)
        con.d[lay.r_idx(i)] = -1.0
        constraints.append(con)
    objective = np.zeros(n)
    for i in range(K):
        objective[lay.r_idx(i)] = s.alpha[i]
    psd_blocks = [(i * Nt ** 2, Nt) for i in range(K)]
    return SubproblemModel(scenario=s, anchor=anchor, layout=lay,
                           model=BarrierModel(n=n, objective=objective,
                                              constraints=constraints,
                                              psd_blocks=psd_blocks))


def strict_interior_point(sub: SubproblemModel, w_bar, R_bar, margin=1e-8,
                          max_backoffs=200) -> np.ndarray:
    """Deterministic strictly feasible start from a feasible beamformer set.

    W_i mixes the rank-one w_bar w_bar^H with a small multiple of the
    identity; x, y, z follow from the change of variables at that W, and the
    rate variables are backed off (e^y shrunk by 0.9) until the outage and
    slack rows hold with margin.
    """
    s = sub.scenario
    anchor = sub.anchor
    lay = sub.layout
    K, Nt = s.K, s.Nt
    R_bar = np.asarray(R_bar, dtype=float)
    v = np.zeros(lay.n)
    W0 = []
    for i in range(K):
        wi = np.asarray(w_bar[i], dtype=complex)
        if np.linalg.norm(wi) == 0.0:
            raise InitializationError("zero beamformer for user %d" % i)
        Wi = (1.0 - MIX_GAMMA) * np.outer(wi, wi.conj()) \
            + MIX_GAMMA * (s.P[i] / (2.0 * Nt)) * np.eye(Nt)
        W0.append(Wi)
        v[lay.w_slice(i)] = herm_pack(Wi)
    # x variables: direct links from the exact change of variables (with a
    # small downward shift so (c) is strict); cross links from inverting the
    # tangent in (b) so the linearized rows are strict.
    for i in range(K):
        tr_ii = float(np.trace(W0[i] @ s.Q[i, i]).real)
        if tr_ii <= 0.0:
            raise InitializationError("zero signal covariance for user %d" % i)
        v[lay.x_idx(i, i)] = np.log(tr_ii) - 1e-3
        for k in range(K):
            if k == i:
                continue
            tr_ki = max(float(np.trace(W0[k] @ s.Q[k, i]).real), 0.0)
            exb = np.exp(anchor.x_bar[k, i])
            v[lay.x_idx(k, i)] = anchor.x_bar[k, i] + tr_ki / exb - 1.0 + 1e-3
    ln2 = np.log(2.0)
    y0 = anchor.y_bar.copy()  # rate floor already applied by the anchor
    a_rows = {}
    for c in sub.model.constraints:
        if c.label.startswith("outage"):
            a_rows[int(c.label[7:-1])] = c

    def place(i):
        v[lay.y_idx(i)] = y0[i]
        v[lay.z_idx(i)] = np.exp(y0[i] - v[lay.x_idx(i, i)]) * (1.0 + 1e-3) + margin
        r_eq = (anchor.theta1[i] * y0[i] - np.log(anchor.big_theta[i])) / ln2
        r0 = r_eq - max(margin, 1e-6 * abs(r_eq)) / ln2
        v[lay.r_idx(i)] = max(r0, 1e-300)
        return r0 > 0.0

    rate_ok = [place(i) for i in range(K)]
    # back off each user's rate variables independently until its outage row
    # holds with margin (the row only involves that user's own y_i, z_i)
    for _ in range(max_backoffs):
        bad = [i for i in range(K)
               if not rate_ok[i] or a_rows[i].value(v) > -margin]
        if not bad:
            break
        for i in bad:
            y0[i] += np.log(0.9)  # shrink e^y by 0.9
            rate_ok[i] = place(i)
    else:
        raise InitializationError("no strictly feasible start after %d backoffs" % max_backoffs)
    # final sanity check over every row
    worst = max(c.value(v) for c in sub.model.constraints)
    if not worst < 0.0:
        raise InitializationError("constructed start is not strictly feasible (residual %g)" % worst)
    return v


# ---------------------------------------------------------------------------
# Barrier solver.

@dataclass
class BarrierSolution:
    v: np.ndarray
    objective: float
    status: str
    newton_steps: int
    t_final: float
    gap: float
    newton_decrement: float
    trace: list = field(default_factory=list)


class _CompiledConstraints:
    """Stacked-array form of the scalar constraint list for fast evaluation.

    Splits every constraint into a shared linear part (D v + d0) and a flat
    list of exp / softplus terms tagged with the row they belong to, so the
    barrier value, gradient, and Hessian reduce to a few BLAS calls instead
    of a Python loop per row.
    """

    def __init__(self, model):
        n = model.n
        cons = model.constraints
        self.m = len(cons)
        self.D = np.array([c.d for c in cons]) if cons else np.zeros((0, n))
        self.d0 = np.array([c.d0 for c in cons])
        rows, bs, ws, kinds, owner = [], [], [], [], []
        for j, c in enumerate(cons):
            for kind, w, a, b in c.terms:
                rows.append(a)
                bs.append(b)
                ws.append(w)
                kinds.append(kind)
                owner.append(j)
        self.T = len(rows)
        self.A = np.array(rows) if rows else np.zeros((0, n))
        self.b = np.array(bs)
        self.w = np.array(ws)
        self.is_exp = np.array(kinds) == _EXP
        self.owner = np.array(owner, dtype=int)

    def _phi(self, v):
        u = self.A @ v + self.b
        phi = np.empty(self.T)
        e = self.is_exp
        phi[e] = np.where(u[e] < 700.0, np.exp(np.minimum(u[e], 700.0)), np.inf)
        phi[~e] = np.logaddexp(0.0, u[~e])
        return u, phi

    def values(self, v):
        vals = self.D @ v + self.d0
        if self.T:
            _, phi = self._phi(v)
            np.add.at(vals, self.owner, self.w * phi)
        return vals

    def slacks(self, v):
        """-g_j(v) per row, or None if any row is violated."""
        slack = -self.values(v)
        if not np.all(slack > 0.0) or not np.all(np.isfinite(slack)):
            return None
        return slack


def _compiled(model):
    comp = getattr(model, "_comp", None)
    if comp is None:
        comp = _CompiledConstraints(model)
        model._comp = comp
    return comp


def _barrier_value(model, v, t):
    """Barrier objective value, or +inf if v is infeasible."""
    slack = _compiled(model).slacks(v)
    if slack is None:
        return np.inf
    f = -t * float(model.objective @ v) - float(np.sum(np.log(slack)))
    for off, dim in model.psd_blocks:
        W = herm_unpack(v[off:off + dim * dim], dim)
        try:
            L = np.linalg.cholesky(W)
        except np.linalg.LinAlgError:
            return np.inf
        f -= 2.0 * float(np.sum(np.log(np.diag(L).real)))
    return f


def _barrier_grad_hess(model, v, t):
    comp = _compiled(model)
    vals = comp.D @ v + comp.d0
    C = comp.D.copy()  # per-row constraint gradients
    curv_coef = None
    if comp.T:
        u, phi = comp._phi(v)
        np.add.at(vals, comp.owner, comp.w * phi)
        dphi = np.empty(comp.T)
        d2phi = np.empty(comp.T)
        e = comp.is_exp
        dphi[e] = phi[e]
        d2phi[e] = phi[e]
        sg = _sigmoid(u[~e])
        dphi[~e] = sg
        d2phi[~e] = sg * (1.0 - sg)
        np.add.at(C, comp.owner, (comp.w * dphi)[:, None] * comp.A)
        curv_coef = comp.w * d2phi
    slack = -vals
    if not np.all(slack > 0.0) or not np.all(np.isfinite(slack)):
        return np.inf, None, None
    f = -t * float(model.objective @ v) - float(np.sum(np.log(slack)))
    g = -t * model.objective + C.T @ (1.0 / slack)
    H = C.T @ (C / (slack ** 2)[:, None])
    if comp.T:
        H += comp.A.T @ (comp.A * (curv_coef / slack[comp.owner])[:, None])
    for off, dim in model.psd_blocks:
        sl = slice(off, off + dim * dim)
        W = herm_unpack(v[sl], dim)
        try:
            L = np.linalg.cholesky(W)
        except np.linalg.LinAlgError:
            return np.inf, None, None
        f -= 2.0 * float(np.sum(np.log(np.diag(L).real)))
        S = np.linalg.inv(W)
        g[sl] += -herm_trace_coeffs(S)
        E = herm_basis(dim)
        M = np.einsum("ab,mbc->mac", S, E)
        H[sl, sl] += np.einsum("mab,nba->mn", M, M).real
    return f, g, H


def solve_barrier(model: BarrierModel, v0, gap_tol=1e-8, mu=10.0,
                  newton_tol=1e-8, final_tol=1e-10, max_inner=100,
                  verbose=False, trace_stream=None) -> BarrierSolution:
    """Log-barrier path following: maximize objective @ v over the model.

    The centering tolerance is on the Newton decrement lambda^2 / 2 of the
    barrier function t*(-objective) + B; the final stage is centered more
    tightly so the reported KKT residual is small.  Status becomes
    "numerical-failure" if the decrement fails to decrease for 50
    consecutive inner steps.
    """
    v = v0.copy()
    m_total = model.m_total
    f0 = _barrier_value(model, v, 0.0)
    if not np.isfinite(f0):
        raise ValueError("start point is not strictly feasible")
    omag = abs(float(model.objective @ v)) + 1.0
    t = max(1.0, abs(f0) / omag)
    status = "optimal"
    total_steps = 0
    lam2 = np.inf
    trace = []
    while True:
        final = (m_total / t <= gap_tol)
        tol = final_tol if final else newton_tol
        no_decrease = 0
        prev_lam2 = np.inf
        for _ in range(max_inner):
            f, g, H = _barrier_grad_hess(model, v, t)
            if not np.isfinite(f):
                status = "numerical-failure"
                break
            ridge = 0.0
            for attempt in range(8):
                try:
                    L = np.linalg.cholesky(H + ridge * np.eye(model.n) if ridge else H)
                    break
                except np.linalg.LinAlgError:
                    ridge = max(ridge * 100.0, 1e-12 * (np.trace(H) / model.n + 1.0))
            else:
                status = "numerical-failure"
                break
            dv = np.linalg.solve(H + ridge * np.eye(model.n) if ridge else H, -g)
            lam2 = float(-(g @ dv))
            if lam2 < 0.0:
                lam2 = 0.0
                break
            if 0.5 * lam2 <= tol:
                break
            if lam2 >= prev_lam2:
                no_decrease += 1
                if no_decrease >= 50:
                    status = "numerical-failure"
                    break
            else:
                no_decrease = 0
            prev_lam2 = lam2
            slope = float(g @ dv)
            # Armijo comparisons cannot resolve decreases below the rounding
            # level of f itself (f grows like t), so allow that much slack
            armijo_eps = 1e-13 * (abs(f) + 1.0)
            step = 1.0
            moved = False
            while step > 1e-14:
                vn = v + step * dv
                fn = _barrier_value(model, vn, t)
                if np.isfinite(fn) and fn <= f + 0.01 * step * slope + armijo_eps:
                    v = vn
                    moved = True
                    break
                step *= 0.5
            total_steps += 1
            if not moved:
                # stalled line search: accept the current center if it is
                # already close enough for the duality-gap bound to hold
                if lam2 <= 1e-4:
                    break
                status = "numerical-failure"
                break
        if trace_stream is not None or verbose:
            fval = float(model.objective @ v)
            worst = max(c.value(v) for c in model.constraints)
            line = "t=%.3e newton_steps=%d objective=%.9g max_residual=%.3e" % (
                t, total_steps, fval, worst)
            if trace_stream is not None:
                trace_stream.write(line + "\n")
            if verbose:
                print(line)
        trace.append((t, total_steps, float(model.objective @ v)))
        if status != "optimal":
            break
        if final:
            break
        t *= mu
    return BarrierSolution(v=v, objective=float(model.objective @ v), status=status,
                           newton_steps=total_steps, t_final=t, gap=m_total / t,
                           newton_decrement=np.sqrt(max(lam2, 0.0)), trace=trace)


def kkt_residual(model: BarrierModel, v, t):
    """Stationarity residual of the barrier optimality system at parameter t.

    The dual point implied by the barrier center has stationarity error
    grad(t*(-obj) + B) / t in the original objective scale; its Newton-metric
    norm is decrement / t.  The complementary-slackness surrogate m_total / t
    is added.
    """
    f, g, H = _barrier_grad_hess(model, v, t)
    if not np.isfinite(f):
        return np.inf
    try:
        dv = np.linalg.solve(H, -g)
    except np.linalg.LinAlgError:
        return np.inf
    lam2 = max(float(-(g @ dv)), 0.0)
    return np.sqrt(lam2) / t + model.m_total / t


def solve(sub: SubproblemModel, start, gap_tol=1e-8, verbose=False,
          trace_stream=None) -> SubproblemSolution:
    """Solve one conservative subproblem from a strictly feasible start."""
    s = sub.scenario
    lay = sub.layout
    bs = solve_barrier(sub.model, start, gap_tol=gap_tol, verbose=verbose,
                       trace_stream=trace_stream)
    v = bs.v
    K, Nt = s.K, s.Nt
    W = [check_hermitian(herm_unpack(v[lay.w_slice(i)], Nt), tol=1e-9) for i in range(K)]
    R = np.array([v[lay.r_idx(i)] for i in range(K)])
    x = np.array([[v[lay.x_idx(k, i)] for i in range(K)] for k in range(K)])
    y = np.array([v[lay.y_idx(i)] for i in range(K)])
    z = np.array([v[lay.z_idx(i)] for i in range(K)])
    feas = max(max(c.value(v) for c in sub.model.constraints), 0.0)
    resid = bs.newton_decrement / bs.t_final + bs.gap if bs.status == "optimal" else np.inf
    return SubproblemSolution(W=W, R=R, x=x, y=y, z=z,
                              objective=float(sub.model.objective @ v),
                              kkt_residual=resid, iterations=bs.newton_steps,
                              status=bs.status, v=v, t_final=bs.t_final,
                              feasibility_residual=feas)
