"""Command-line experiment harness.

Commands: gen, solve, verify, sweep, oracle.  Single solutions are printed
as JSON; sweeps write one CSV row per (axis value, method, trial) plus a
companion summary CSV with mean sum rates per curve point.  Exit codes:
0 success, 1 usage/parse error, 2 method infeasible, 3 numerical failure.
"""

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import baselines, oracle, sca
from .baselines import BeamformerSolution, InfeasibleStrategyError
from .outage import LN2, mc_outage
from .scenario import generate_scenario, load_scenario, save_scenario, trial_rng

EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERICAL = 3

CSV_COLUMNS = ["axis_value", "method", "trial", "sum_rate", "rates", "iterations",
               "solve_ms", "max_outage_estimate", "max_rank_ratio", "status"]


def _w_to_json(w):
    return [[[float(z.real), float(z.imag)] for z in wi] for wi in w]


def _w_from_json(rows):
    return [np.array([complex(re, im) for re, im in wi], dtype=complex) for wi in rows]


def _solution_doc(sol: BeamformerSolution, extra=None):
    doc = {
        "method": sol.method,
        "rates": [float(r) for r in sol.rates],
        "sum_rate": sol.sum_rate,
        "w": _w_to_json(sol.w),
    }
    doc.update(sol.meta)
    if extra:
        doc.update(extra)
    return doc


def cmd_gen(args):
    s = generate_scenario(args.K, args.Nt, args.eta, args.snr_db, args.eps,
                          args.rank, args.seed)
    save_scenario(s, args.out)
    print(json.dumps({"written": args.out, "K": s.K, "Nt": s.Nt, "eta": s.eta,
                      "sigma2": s.sigma2[0]}))
    return 0


def _run_method(s, method, args):
    """Returns (solution, extra-diagnostics)."""
    if method == "mrt":
        return baselines.mrt(s), {}
    if method == "zf":
        return baselines.zf(s), {}
    if method == "tdma":
        return baselines.tdma(s), {}
    if method == "sca":
        cfg = sca.ScaConfig(delta=args.delta, max_iters=args.max_iters,
                            init=args.init, verbose=args.verbose)
        res = sca.run(s, cfg)
        extra = {"objective_trace": [float(x) for x in res.objective_trace],
                 "converged": res.converged,
                 "iterations": res.iterations,
                 "rank_ratios": [float(r) for r in res.rank_ratios]}
        return res.solution, extra
    raise ValueError("unknown method %r" % method)


def cmd_solve(args):
    s = load_scenario(args.scenario)
    try:
        sol, extra = _run_method(s, args.method, args)
    except InfeasibleStrategyError as exc:
        print("infeasible: %s" % exc, file=sys.stderr)
        return EXIT_INFEASIBLE
    doc = _solution_doc(sol, extra)
    print(json.dumps(doc))
    if args.out:
        with open(args.out, "w") as f:
            json.dump(doc, f)
            f.write("\n")
    if sol.method == "SCA" and not extra.get("converged", True):
        return EXIT_NUMERICAL
    return 0


def cmd_verify(args):
    s = load_scenario(args.scenario)
    with open(args.solution) as f:
        doc = json.load(f)
    w = _w_from_json(doc["w"])
    rates = np.asarray(doc["rates"], dtype=float)
    if len(w) != s.K or any(wi.shape != (s.Nt,) for wi in w):
        print("solution/scenario dimension mismatch", file=sys.stderr)
        return EXIT_USAGE
    all_pass = True
    for i in range(s.K):
        lp = baselines.link_powers(s, w, i)
        from .outage import outage_probability
        closed = outage_probability(lp, float(rates[i]))
        rng = trial_rng(args.seed, i)
        est, se = mc_outage(s, w, rates, i, args.samples, rng)
        ok = est <= s.eps[i] + 3.0 * se
        all_pass = all_pass and ok
        print(json.dumps({"user": i, "closed_form_outage": closed,
                          "mc_estimate": est, "stderr": se,
                          "eps": float(s.eps[i]), "pass": bool(ok)}))
    return 0 if all_pass else EXIT_NUMERICAL


def cmd_oracle(args):
    s = load_scenario(args.scenario)
    if s.K != 2:
        print("oracle supports K=2 only", file=sys.stderr)
        return EXIT_USAGE
    cfg = oracle.OracleConfig(M=args.levels, grid_min_frac=args.grid_min_frac)
    res = oracle.exhaustive_search(s, cfg)
    print(json.dumps({"method": "ORACLE",
                      "rates": [float(r) for r in res.best_rates],
                      "sum_rate": res.best_sum,
                      "w": _w_to_json(res.best_w),
                      "evaluated": res.evaluated}))
    return 0


# ---------------------------------------------------------------------------
# Sweeps.

@dataclass
class SweepSpec:
    axis: str
    values: list
    trials: int
    methods: list
    K: int
    Nt: int
    ranks: int
    eps: float
    delta: float
    seed: int
    eta: float = 0.5
    snr_db: float = 10.0
    verify_samples: int = 5000

    @classmethod
    def from_file(cls, path):
        with open(path) as f:
            doc = json.load(f)
        for key in ("axis", "values", "trials", "methods", "K", "Nt", "ranks",
                    "eps", "delta", "seed"):
            if key not in doc:
                raise ValueError("sweep spec is missing field %r" % key)
        spec = cls(**{k: doc[k] for k in doc})
        if spec.axis not in ("eta", "snr_db"):
            raise ValueError("axis must be 'eta' or 'snr_db'")
        if spec.trials < 1:
            raise ValueError("trials must be at least 1")
        known = {"SCA", "MRT", "ZF", "TDMA", "ORACLE"}
        bad = set(spec.methods) - known
        if bad:
            raise ValueError("unknown methods: %s" % sorted(bad))
        if "ORACLE" in spec.methods and spec.K != 2:
            raise ValueError("ORACLE requires K=2")
        return spec


def _trial_seed(master, axis_index, trial):
    return int(np.random.SeedSequence((int(master), int(axis_index), int(trial)))
               .generate_state(1, np.uint64)[0])


def _mc_single_link(s, w_i, slot_rate, i, n, rng):
    """Monte Carlo outage of one user transmitting alone (TDMA slot semantics)."""
    from .hermitian import sqrt_factor
    F = sqrt_factor(s.Q[i, i])
    a = F.conj().T @ w_i
    if a.size == 0 or slot_rate == 0.0:
        return 0.0 if slot_rate == 0.0 else 1.0, 0.0
    g = (rng.standard_normal((n, a.size)) + 1j * rng.standard_normal((n, a.size))) / np.sqrt(2.0)
    p = np.abs(g.conj() @ a) ** 2
    est = float(np.mean(p < np.expm1(slot_rate * LN2) * s.sigma2[i]))
    return est, float(np.sqrt(est * (1.0 - est) / n))


def _sweep_point(spec: SweepSpec, axis_index, trial):
    """All result rows for one (axis value, trial) pair."""
    value = spec.values[axis_index]
    eta = value if spec.axis == "eta" else spec.eta
    snr = value if spec.axis == "snr_db" else spec.snr_db
    seed = _trial_seed(spec.seed, axis_index, trial)
    s = generate_scenario(spec.K, spec.Nt, eta, snr, spec.eps, spec.ranks, seed)
    rows = []
    for method in spec.methods:
        t0 = time.perf_counter()
        status = "ok"
        iterations = 0
        max_ratio = 0.0
        sol = None
        try:
            if method == "SCA":
                res = sca.run(s, sca.ScaConfig(delta=spec.delta))
                sol = res.solution
                iterations = res.iterations
                if res.rank_ratios.size:
                    max_ratio = float(np.max(res.rank_ratios))
                if not res.converged:
                    status = "max-iter"
            elif method == "MRT":
                sol = baselines.mrt(s)
            elif method == "ZF":
                sol = baselines.zf(s)
            elif method == "TDMA":
                sol = baselines.tdma(s)
            elif method == "ORACLE":
                res = oracle.exhaustive_search(s, oracle.OracleConfig())
                sol = BeamformerSolution(w=res.best_w, rates=res.best_rates,
                                         method="ORACLE")
                iterations = res.evaluated
        except InfeasibleStrategyError:
            status = "infeasible"
        except Exception:
            status = "numerical-failure"
        ms = (time.perf_counter() - t0) * 1e3
        if sol is None:
            rows.append({"axis_value": value, "method": method, "trial": trial,
                         "sum_rate": "nan", "rates": "", "iterations": 0,
                         "solve_ms": "%.3f" % ms, "max_outage_estimate": "nan",
                         "max_rank_ratio": 0.0, "status": status})
            continue
        rng = trial_rng(spec.seed, axis_index, trial, 1)
        ests = []
        for i in range(s.K):
            if method == "TDMA":
                est, _ = _mc_single_link(s, sol.w[i], s.K * float(sol.rates[i]), i,
                                         spec.verify_samples, rng)
            else:
                est, _ = mc_outage(s, sol.w, sol.rates, i, spec.verify_samples, rng)
            ests.append(est)
        wsum = sol.weighted_sum(s.alpha)
        rows.append({"axis_value": value, "method": method, "trial": trial,
                     "sum_rate": "%.12g" % wsum,
                     "rates": ";".join("%.12g" % r for r in sol.rates),
                     "iterations": iterations, "solve_ms": "%.3f" % ms,
                     "max_outage_estimate": "%.6g" % max(ests),
                     "max_rank_ratio": "%.6g" % max_ratio, "status": status})
    return rows


def _sweep_point_star(args):
    return _sweep_point(*args)


def cmd_sweep(args):
    spec = SweepSpec.from_file(args.spec)
    keys = [(ai, tr) for ai in range(len(spec.values)) for tr in range(spec.trials)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_sweep_point_star,
                                    [(spec, ai, tr) for ai, tr in keys]))
    else:
        results = [_sweep_point(spec, ai, tr) for ai, tr in keys]
    with open(args.out, "w", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for rows in results:
            for row in rows:
                writer.writerow(row)
    # aggregate mean sum rate per (axis value, method)
    sums = {}
    for rows in results:
        for row in rows:
            if row["status"] in ("ok", "max-iter") and row["sum_rate"] != "nan":
                key = (row["axis_value"], row["method"])
                sums.setdefault(key, []).append(float(row["sum_rate"]))
    summary_path = args.summary or (args.out + ".summary.csv")
    with open(summary_path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["axis_value", "method", "trials", "mean_sum_rate"])
        for (value, method), vals in sorted(sums.items()):
            writer.writerow([value, method, len(vals), "%.12g" % float(np.mean(vals))])
    print(json.dumps({"rows": sum(len(r) for r in results), "out": args.out,
                      "summary": summary_path}))
    return 0


def build_parser():
    parser = argparse.ArgumentParser(prog="ocbf",
                                     description=__doc__,
                                     formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", help="generate a random scenario file")
    p.add_argument("--K", type=int, default=2)
    p.add_argument("--Nt", type=int, default=4)
    p.add_argument("--eta", type=float, default=0.5)
    p.add_argument("--snr-db", type=float, default=10.0)
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--rank", type=int, default=4)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve", help="solve one scenario with one method")
    p.add_argument("--scenario", required=True)
    p.add_argument("--method", required=True, choices=["mrt", "zf", "tdma", "sca"])
    p.add_argument("--delta", type=float, default=1e-2)
    p.add_argument("--max-iters", type=int, default=50)
    p.add_argument("--init", default="mrt",
                   choices=["mrt", "zf", "orth", "solo", "best"])
    p.add_argument("--out", default=None, help="also write the solution JSON here")
    p.add_argument("--verbose", action="store_true")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="Monte Carlo check of a solution's outage constraints")
    p.add_argument("--scenario", required=True)
    p.add_argument("--solution", required=True)
    p.add_argument("--samples", type=int, default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("oracle", help="exhaustive-search optimum for K=2")
    p.add_argument("--scenario", required=True)
    p.add_argument("--levels", type=int, default=20)
    p.add_argument("--grid-min-frac", type=float, default=1e-4)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("sweep", help="run a sweep spec and write CSV results")
    p.add_argument("--spec", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--summary", default=None)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except (ValueError, OSError, json.JSONDecodeError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
