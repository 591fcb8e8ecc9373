"""Batch experiment harness.

Each subcommand prints a short human summary on stdout and writes its
machine-readable results (CSV or JSON) to ``--out``; without ``--out`` the
machine output goes to stdout instead. Files never contain timing, so reruns
with the same flags and seed are byte-identical.

Exit codes: 0 success, 2 usage/invalid parameters, 3 resource limit.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__, arith, circuit as circ, errmetrics as em, qftlib, reduction
from ._kernels import BACKEND
from .statevec import Statevector, basis_state, random_state

EXIT_USAGE = 2
EXIT_LIMIT = 3


class UsageError(ValueError):
    pass


@dataclass
class RunRecord:
    command: str
    config: dict
    seed: int | None
    results: dict
    version: str = __version__
    wall_time: float = field(default=0.0, compare=False)

    def to_json(self) -> str:
        payload = {
            "command": self.command,
            "config": self.config,
            "seed": self.seed,
            "version": self.version,
            "results": self.results,
        }
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return format(v, ".17g")
    return v


def _emit(args, text: str, summary: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
        print(summary)
    else:
        sys.stdout.write(text)


def _pmap(fn, items, jobs: int):
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=jobs) as ex:
        return list(ex.map(fn, items))


def _input_state(choice: str, n: int, seed: int | None) -> tuple[Statevector, str]:
    if choice == "ones":
        return basis_state(n, (1 << n) - 1), choice
    if choice == "zeros":
        return basis_state(n, 0), choice
    if choice == "random":
        if seed is None:
            raise UsageError("--input random needs --seed")
        return random_state(n, np.random.default_rng([seed, 1])), choice
    try:
        x = int(choice, 0)
    except ValueError:
        raise UsageError(f"--input must be an integer, 'ones', 'zeros' or 'random', got {choice!r}") from None
    return basis_state(n, x), choice


def _variant(name: str, m: int | None) -> qftlib.QftVariant:
    try:
        return qftlib.QftVariant(name, None if name == "exact" else m)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# -- subcommands -----------------------------------------------------------------------------

def cmd_build(args) -> RunRecord:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if args.variant != "exact" and (args.m is None or not 1 <= args.m <= args.n):
        raise UsageError(f"--m must lie in [1, {args.n}] for variant {args.variant}")
    c = _variant(args.variant, args.m).build(args.n)
    s = circ.summary(c)
    text = circ.export_text(c)
    msg = f"{args.variant} n={args.n} m={args.m}: gates={s['gates']} depth={s['depth']} locality={s['locality']}"
    _emit(args, text, msg)
    return RunRecord("build", {"variant": args.variant, "n": args.n, "m": args.m}, None, s)


def cmd_error_sweep(args) -> RunRecord:
    if args.mode == "sampled" and args.seed is None:
        raise UsageError("--mode sampled needs --seed")
    points = [(n, m) for n in args.n for m in args.m if 1 <= m <= n]
    if args.mode == "exhaustive":
        too_big = [n for n, _ in points if n > em.EXHAUSTIVE_MAX_QUBITS]
        if too_big:
            raise em.ResourceLimit(f"exhaustive sweep capped at n <= {em.EXHAUSTIVE_MAX_QUBITS}, got {max(too_big)}")
    per_state_dir = Path(args.per_state_dir) if args.per_state_dir else None
    if per_state_dir:
        per_state_dir.mkdir(parents=True, exist_ok=True)

    def run(point):
        n, m = point
        test = _variant(args.variant, m).build(n)
        ref = qftlib.QftReference(n)
        bound = em.blocked_bound(n, m) if args.variant == "blocked" else None
        if args.mode == "exhaustive":
            rep = em.frobenius_error_avg(test, ref, m=m, bound=bound)
            if per_state_dir:
                rows = [(x, float(e), int(em.is_bad_state(x, n, m))) for x, e in enumerate(rep.per_state)]
                (per_state_dir / f"per_state_{args.variant}_n{n}_m{m}.csv").write_text(_csv(["x", "error", "bad"], rows))
            return (n, m, rep.avg_frobenius, bound, float(rep.per_state.max()), None)
        # per-point seed derived from the sweep seed and the parameter tuple
        seed = np.random.SeedSequence([args.seed, n, m]).generate_state(1)[0]
        xs = np.random.default_rng(seed).integers(0, 1 << n, size=args.samples)
        errs = em.per_state_errors(test, ref, xs)
        return (n, m, float(errs.mean()), bound, float(errs.max()), float(errs.std(ddof=1) / math.sqrt(len(errs))))

    rows = _pmap(run, points, args.jobs)
    if args.format == "csv":
        text = _csv(["n", "m", "avg_error", "bound", "per_state_max"], [r[:5] for r in rows])
    else:
        text = json.dumps([dict(zip(["n", "m", "avg_error", "bound", "per_state_max", "stderr"], r)) for r in rows],
                          indent=2) + "\n"
    _emit(args, text, f"error-sweep {args.variant} ({args.mode}): {len(rows)} point(s)")
    return RunRecord("error-sweep", vars_clean(args), args.seed, {"rows": rows})


def cmd_reduce(args) -> RunRecord:
    cfg = reduction.ReductionConfig(args.n, args.m, args.draws, args.seed)
    psi, label = _input_state(args.input, args.n, args.seed)
    r1, r2, errs = reduction.reduced_draw_errors(psi, cfg)
    est = float(errs.mean())
    stderr = float(errs.std(ddof=1) / math.sqrt(len(errs))) if len(errs) > 1 else None
    results = {"draws": args.draws, "mean_error": est, "stderr": stderr}
    if args.exact_expectation:
        if args.n > reduction.EXPECTATION_MAX_N:
            raise em.ResourceLimit(f"exact expectation limited to n <= {reduction.EXPECTATION_MAX_N}")
        results["expected_error_exact"] = reduction.expected_error_exact(psi, cfg)
        results["avg_frobenius"] = em.frobenius_error_avg(cfg.circuit(), qftlib.QftReference(args.n)).avg_frobenius
    if args.format == "csv":
        text = _csv(["draw", "r1", "r2", "error"], [(i, int(a), int(b), float(e)) for i, (a, b, e) in enumerate(zip(r1, r2, errs))])
    else:
        text = RunRecord("reduce", vars_clean(args), args.seed, results).to_json()
    parts = [f"{k}={v:.6g}" for k, v in results.items() if isinstance(v, float)]
    _emit(args, text, f"reduce n={args.n} m={args.m} input={label}: " + " ".join(parts))
    return RunRecord("reduce", vars_clean(args), args.seed, results)


def cmd_purified(args) -> RunRecord:
    if args.n > reduction.PURIFIED_MAX_N:
        raise em.ResourceLimit(f"purified simulation limited to n <= {reduction.PURIFIED_MAX_N}")
    cfg = reduction.ReductionConfig(args.n, args.m)
    psi, label = _input_state(args.input, args.n, args.seed)
    results = {
        "purified_error": reduction.purified_error(psi, cfg),
        "expected_error_exact": reduction.expected_error_exact(psi, cfg),
        "avg_frobenius": em.frobenius_error_avg(cfg.circuit(), qftlib.QftReference(args.n)).avg_frobenius,
        "joint_qubits": 3 * args.n,
    }
    rec = RunRecord("purified", vars_clean(args), args.seed, results)
    _emit(args, rec.to_json(), f"purified n={args.n} m={args.m} input={label}: error={results['purified_error']:.6g}")
    return rec


def cmd_cpg(args) -> RunRecord:
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    if 2 * args.n > 24:
        raise em.ResourceLimit("controlled phase gradient check limited to n <= 12")
    if args.delta is not None:
        ms = [reduction.cpg_size_for(args.n, args.delta)]
    else:
        ms = args.m or list(range(1, args.n + 1))
    for m in ms:
        if not 1 <= m <= args.n:
            raise UsageError(f"--m {m} outside [1, {args.n}]")

    def run(m):
        return (args.n, m, reduction.cpg_operator_error(args.n, m), 2 * math.pi * args.n / 2 ** m, reduction.cpg_depth(args.n, m))

    rows = _pmap(run, ms, args.jobs)
    text = _csv(["n", "m", "op_error", "bound", "depth"], rows) if args.format == "csv" else json.dumps(
        [dict(zip(["n", "m", "op_error", "bound", "depth"], r)) for r in rows], indent=2) + "\n"
    _emit(args, text, f"cpg n={args.n}: {len(rows)} cutoff(s)")
    return RunRecord("cpg", vars_clean(args), None, {"rows": rows})


def cmd_commutation(args) -> RunRecord:
    for m in args.m:
        if not 1 <= m <= 5:
            raise em.ResourceLimit(f"commutation gap limited to 1 <= m <= 5, got {m}")
    gaps = _pmap(em.commutation_gap, args.m, args.jobs)
    rows = [(m, g, g / 4 ** m) for m, g in zip(args.m, gaps)]
    text = _csv(["m", "gap", "gap_over_4_pow_m"], rows) if args.format == "csv" else json.dumps(
        [dict(zip(["m", "gap", "gap_over_4_pow_m"], r)) for r in rows], indent=2) + "\n"
    _emit(args, text, "commutation: " + ", ".join(f"m={m}: {g:.6g}" for m, g, _ in rows))
    return RunRecord("commutation", vars_clean(args), None, {"rows": rows})


def cmd_qpe_profile(args) -> RunRecord:
    if not 1 <= args.m <= 12:
        raise UsageError("--m must lie in [1, 12]")
    try:
        alpha = em.qpe_wraparound_profile(args.m, args.X, args.frac)
    except em.MetricError as exc:
        raise UsageError(str(exc)) from None
    rows = [(xp, float(a.real), float(a.imag), float(abs(a) ** 2), em.lee_distance(xp - args.X, args.m))
            for xp, a in enumerate(alpha)]
    header = ["x_est", "re", "im", "prob", "lee_from_X"]
    text = _csv(header, rows) if args.format == "csv" else json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    peak = int(np.argmax(np.abs(alpha)))
    _emit(args, text, f"qpe-profile m={args.m} X={args.X} frac={args.frac}: peak at {peak}")
    return RunRecord("qpe-profile", vars_clean(args), None, {"peak": peak})


def cmd_adder(args) -> RunRecord:
    ks = args.k or list(range(1, args.n + 1))
    for k in ks:
        if not 1 <= k <= args.n:
            raise UsageError(f"--k {k} outside [1, {args.n}]")
    sampled = 2 * args.n > 24
    if sampled and args.seed is None:
        raise UsageError("adders wider than 12 bits are sampled and need --seed")

    def run(k):
        if sampled:
            return (args.n, k, arith.adder_avg_error(args.n, k, samples=args.samples, seed=args.seed), arith.adder_union_bound(args.n, k))
        return (args.n, k, arith.adder_avg_error(args.n, k), arith.adder_union_bound(args.n, k))

    rows = _pmap(run, ks, args.jobs)
    header = ["n", "k", "avg_error", "union_bound"]
    text = _csv(header, rows) if args.format == "csv" else json.dumps([dict(zip(header, r)) for r in rows], indent=2) + "\n"
    _emit(args, text, f"adder n={args.n}: {len(rows)} window(s)")
    return RunRecord("adder", vars_clean(args), args.seed, {"rows": rows})


def cmd_factor(args) -> RunRecord:
    try:
        variant = _variant(args.variant, args.m)
        cfg = arith.FactoringConfig(args.N, args.g, args.t, variant, args.r_rand)
        base = arith.FactoringConfig(args.N, args.g, args.t, qftlib.QftVariant("exact"), args.r_rand)
    except arith.ArithError as exc:
        raise UsageError(str(exc)) from None
    res = arith.period_finding_experiment(cfg, trials=args.trials, seed=args.seed)
    p0 = res.p_success if variant.kind == "exact" else arith.period_finding_experiment(base).p_success
    hist_path = args.histogram
    if hist_path:
        rows = [(k, p, int(s)) for k, p, s in res.histogram()]
        Path(hist_path).write_text(_csv(["outcome", "probability", "success"], rows))
    results = {
        "p_success": res.p_success,
        "p0_baseline": p0,
        "histogram_csv_path": hist_path,
        "qft_instances": res.qft_instances,
        "counting_bits": cfg.counting_bits,
        "sampled_success": res.sampled_success,
        "trials": args.trials,
    }
    rec = RunRecord("factor", vars_clean(args), args.seed, results)
    _emit(args, rec.to_json(), f"factor N={args.N} g={args.g} {variant.tag()}: p_success={res.p_success:.6f} p0={p0:.6f}")
    return rec


def vars_clean(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "jobs")}


# -- parser ---------------------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="oqft", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__} ({BACKEND} kernels)")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, fmt="csv", seed=False, seed_required=False):
        sp.add_argument("--out", help="write machine-readable output here")
        sp.add_argument("--jobs", type=int, default=1, help="parallel sweep points")
        sp.add_argument("--format", choices=("csv", "json"), default=fmt)
        if seed:
            sp.add_argument("--seed", type=int, required=seed_required)

    variants = list(qftlib.VARIANTS)

    b = sub.add_parser("build", help="write a QFT circuit in the text exchange format")
    b.add_argument("--variant", choices=variants, required=True)
    b.add_argument("--n", type=int, required=True)
    b.add_argument("--m", type=int)
    common(b)
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("error-sweep", help="average Frobenius error over (n, m) grids")
    e.add_argument("--variant", choices=variants, required=True)
    e.add_argument("--n", type=int, nargs="*", default=[])
    e.add_argument("--m", type=int, nargs="*", default=[])
    e.add_argument("--mode", choices=("exhaustive", "sampled"), default="exhaustive")
    e.add_argument("--samples", type=int, default=500)
    e.add_argument("--per-state-dir", help="also write per-state error histograms (exhaustive mode)")
    common(e, seed=True)
    e.set_defaults(func=cmd_error_sweep)

    r = sub.add_parser("reduce", help="randomized reduction draws around the optimistic QFT")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--m", type=int, required=True)
    r.add_argument("--input", default="ones")
    r.add_argument("--draws", type=int, default=200)
    r.add_argument("--exact-expectation", action="store_true")
    common(r, fmt="json", seed=True, seed_required=True)
    r.set_defaults(func=cmd_reduce)

    pu = sub.add_parser("purified", help="derandomized (purified) reduction error")
    pu.add_argument("--n", type=int, required=True)
    pu.add_argument("--m", type=int, required=True)
    pu.add_argument("--input", default="ones")
    common(pu, fmt="json", seed=True)
    pu.set_defaults(func=cmd_purified)

    c = sub.add_parser("cpg", help="approximate controlled phase gradient error and depth")
    c.add_argument("--n", type=int, required=True)
    c.add_argument("--m", type=int, nargs="*")
    c.add_argument("--delta", type=float)
    common(c)
    c.set_defaults(func=cmd_cpg)

    cm = sub.add_parser("commutation", help="Frobenius gap of the optimistic commutation step")
    cm.add_argument("--m", type=int, nargs="+", required=True)
    common(cm)
    cm.set_defaults(func=cmd_commutation)

    q = sub.add_parser("qpe-profile", help="phase-estimation amplitudes and wraparound")
    q.add_argument("--m", type=int, required=True)
    q.add_argument("--X", type=int, required=True)
    q.add_argument("--frac", type=float, default=0.0)
    common(q)
    q.set_defaults(func=cmd_qpe_profile)

    a = sub.add_parser("adder", help="carry-window adder error sweep")
    a.add_argument("--n", type=int, required=True)
    a.add_argument("--k", type=int, nargs="*")
    a.add_argument("--samples", type=int, default=100000)
    common(a, seed=True)
    a.set_defaults(func=cmd_adder)

    f = sub.add_parser("factor", help="period finding with optimistic multipliers")
    f.add_argument("--N", type=int, default=15)
    f.add_argument("--g", type=int, default=7)
    f.add_argument("--t", type=int)
    f.add_argument("--m", type=int)
    f.add_argument("--variant", choices=variants, default="optimistic")
    f.add_argument("--r-rand", type=int)
    f.add_argument("--trials", type=int, default=0)
    f.add_argument("--histogram", help="CSV path for the outcome histogram")
    common(f, fmt="json", seed=True, seed_required=True)
    f.set_defaults(func=cmd_factor)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    start = time.perf_counter()
    try:
        rec = args.func(args)
    except em.ResourceLimit as exc:
        print(f"oqft: resource limit: {exc}", file=sys.stderr)
        return EXIT_LIMIT
    except (UsageError, ValueError) as exc:
        print(f"oqft {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    rec.wall_time = time.perf_counter() - start
    if args.out:
        print(f"[{rec.wall_time:.2f}s, {BACKEND} kernels]")
    return 0
