"""
Command-line experiment driver.

Every invocation runs one experiment and writes one report.  Options can come
from flags or from a ``--config`` file of ``key=value`` lines (flags win).
Exit codes: 0 success, 2 configuration error, 3 resource cap exceeded.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from . import families as fam
from . import majority as maj
from . import noise as nz
from . import percolation as perc
from . import walk as wk
from .errors import ContractError, ResourceError
from .montecarlo import DEFAULT_SEED
from .reports import emit_report
from .spectral import dumps, influence_profile, load, transform

DEFAULTS = {
    "seed": DEFAULT_SEED,
    "workers": 1,
    "format": "csv",
    "out": None,
    "samples": 10_000,
    "eps": "0.1",
    "delta": "",
    "outer": 10_000,
    "inner": 1,
    "duration": 1.0,
    "rate": 1.0,
    "replicas": 200,
    "threshold": None,
    "mode": "exact",
    "subset": None,
}


def _floats(text) -> list[float]:
    if text is None or text == "":
        return []
    if isinstance(text, (int, float)):
        return [float(text)]
    return [float(tok) for tok in str(text).replace(";", ",").split(",") if tok.strip()]


def _ints(text) -> list[int]:
    return [int(v) for v in _floats(text)]


def _typed(value: str):
    for cast in (int, float):
        try:
            return cast(value)
        except ValueError:
            pass
    return value


def read_config(path) -> dict:
    """Flat ``key=value`` lines; ``#`` starts a comment; values typed as int, float or str."""
    cfg = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, val = line.partition("=")
        if not sep:
            raise ContractError(f"config line without '=': {raw!r}")
        cfg[key.strip().replace("-", "_")] = _typed(val.strip())
    return cfg


def read_weights(path) -> np.ndarray:
    """One real per line."""
    vals = [float(ln) for ln in Path(path).read_text().split() if ln.strip()]
    if not vals:
        raise ContractError(f"no weights in {path}")
    return np.array(vals)


def _function(args):
    if args.table:
        return load(args.table)
    if args.family is None:
        raise ContractError("need --family or --table")
    weights = tuple(read_weights(args.weights)) if args.weights else None
    spec = fam.FamilySpec(args.family, n=args.n, t=args.t, s=args.s, depth=args.depth,
                          threshold=args.threshold, weights=weights)
    return fam.make_family(spec)


def _write(args, rows, columns, meta):
    emit_report(rows, columns, args.format, args.out, meta)


# -- subcommands ---------------------------------------------------------------

def cmd_spectrum(args, meta):
    f = _function(args)
    sp = transform(f)
    if args.out and args.out != "-":
        Path(str(args.out) + ".table").write_text(dumps(f))
        Path(str(args.out) + ".spectrum").write_text(dumps(sp))
    deg = sp.degrees()
    rows = [{"mask": S, "degree": int(deg[S]), "coeff": float(sp.coeffs[S])} for S in range(1 << f.n)]
    _write(args, rows, ["mask", "degree", "coeff"], meta)


def cmd_influence(args, meta):
    f = _function(args)
    prof = influence_profile(f)
    rows = [{"quantity": f"I_{k + 1}", "value": float(v)} for k, v in enumerate(prof.per_var)]
    rows += [{"quantity": q, "value": getattr(prof, a)} for q, a in
             (("I", "total_I"), ("II", "total_II"), ("J", "J"), ("alpha", "alpha"), ("beta", "beta"))]
    rows += [{"quantity": f"W_{k}", "value": float(w)} for k, w in enumerate(prof.level_weights)]
    _write(args, rows, ["quantity", "value"], meta)


def cmd_noise(args, meta):
    sp = transform(_function(args))
    rows = [{"model": "bernoulli", "param": e, "var": nz.var_noise(sp, e)} for e in _floats(args.eps)]
    rows += [{"model": "fixed", "param": q, "var": nz.var_fixed(sp, q)} for q in _ints(args.q)]
    _write(args, rows, ["model", "param", "var"], meta)


def cmd_gauge(args, meta):
    f = _function(args)
    rows = []
    for e in _floats(args.eps):
        g = nz.gauge_phi(f, e)
        rows.append({"eps": e, "phi": g.phi, "var_noise": g.var_noise,
                     "half_var": g.var_noise / 2, "var_cbrt": g.var_noise ** (1 / 3)})
    _write(args, rows, ["eps", "phi", "var_noise", "half_var", "var_cbrt"], meta)


def cmd_majority(args, meta):
    f = _function(args)
    rows = []
    if args.subset is not None:
        rep = maj.correlation_with_majority(f, int(args.subset))
        rows.append({"quantity": "correlation", "value": rep.value, "subset": rep.subset})
        rows.append({"quantity": "bound_rhs", "value": rep.bound_rhs, "subset": rep.subset})
        rows.append({"quantity": "bound_ratio", "value": rep.ratio, "subset": rep.subset})
    if args.mode == "exact":
        val, arg = maj.lambda_exact(f)
        rows.append({"quantity": "lambda", "value": val, "subset": arg})
    else:
        val, name = maj.lambda_heuristic(f)
        rows.append({"quantity": "lambda_weighted_lower", "value": val, "subset": name})
    _write(args, rows, ["quantity", "value", "subset"], meta)


def cmd_stability(args, meta):
    if args.weights:
        wm = maj.WeightedMajority(tuple(read_weights(args.weights)), args.threshold or 0.0)
    elif args.n:
        wm = maj.WeightedMajority.uniform(args.n, args.threshold or 0.0)
    else:
        raise ContractError("stability needs --weights or --n")
    rows = []
    for i, e in enumerate(_floats(args.eps)):
        est = maj.stability_deficit(wm, wm.n, e, args.samples, args.seed + i, workers=args.workers)
        rows.append({"n": wm.n, "eps": e, "deficit": est.value, "stderr": est.stderr,
                     "samples": est.samples, "seed": est.seed})
    _write(args, rows, ["n", "eps", "deficit", "stderr", "samples", "seed"], meta)


def cmd_family(args, meta):
    text = dumps(_function(args))
    if args.out and args.out != "-":
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _grid(args):
    if args.m is None:
        raise ContractError("percolation commands need --m")
    return perc.build_grid(args.m)


def cmd_perc(args, meta):
    g = _grid(args)
    cols = ["m", "value", "stderr", "samples", "seed"]
    if args.perc_cmd == "crossing":
        est = perc.estimate_crossing(g, args.samples, args.seed, exact=args.exact, workers=args.workers)
        rows = [{"m": g.m, "value": est.value, "stderr": est.stderr, "samples": est.samples, "seed": est.seed}]
    elif args.perc_cmd == "majcorr":
        K = args.subset if args.subset not in (None, "") else "right-half"
        if K != "right-half":
            K = _ints(K)
        est = perc.estimate_majority_correlation(g, K, args.samples, args.seed, workers=args.workers)
        rows = [{"m": g.m, "value": est.value, "stderr": est.stderr, "samples": est.samples, "seed": est.seed}]
    elif args.perc_cmd == "sensitivity":
        deltas = _floats(args.delta)
        rows, cols = [], ["m", "eps", "covariance", "stderr", "samples", "seed", "inner", "p_bar"]
        cols += [f"gamma_{d:g}" for d in deltas]
        for i, e in enumerate(_floats(args.eps)):
            r = perc.estimate_noise_sensitivity(g, e, deltas, args.outer, args.inner, args.seed + i,
                                                workers=args.workers)
            row = {"m": g.m, "eps": e, "covariance": r.covariance, "stderr": r.covariance_stderr,
                   "samples": r.outer, "seed": r.seed, "inner": r.inner, "p_bar": r.p_bar}
            row.update({f"gamma_{d:g}": gv for d, gv in zip(deltas, r.gamma_hat)})
            rows.append(row)
    elif args.perc_cmd == "dynamical":
        rows, cols = [], ["replica", "initial_state", "count"]
        for i in range(args.replicas):
            rec = perc.run_dynamical(g, args.duration, args.rate, args.seed, fast=True, replica=i)
            rows.append({"replica": i, "initial_state": rec.initial_state, "count": rec.count})
        counts = np.array([r["count"] for r in rows], dtype=np.float64)
        meta["mean_count"] = float(counts.mean())
        meta["mean_count_stderr"] = float(counts.std(ddof=1) / math.sqrt(counts.size)) if counts.size > 1 else None
    else:
        raise ContractError(f"unknown perc command {args.perc_cmd!r}")
    _write(args, rows, cols, meta)


def cmd_walk(args, meta):
    A = _function(args)
    eps = _floats(args.eps)[0]
    res = wk.mixing_time(A, eps)
    tmax = args.tmax if args.tmax is not None else res.t
    ts = np.arange(tmax + 1)
    tv = wk.tv_curve(A, ts)
    meta["mixing_time"] = res.t
    meta["l2_bound_time"] = res.l2_bound_t
    _write(args, [{"t": int(t), "tv": float(v)} for t, v in zip(ts, tv)], ["t", "tv"], meta)


COMMANDS = {
    "spectrum": cmd_spectrum,
    "influence": cmd_influence,
    "noise": cmd_noise,
    "gauge": cmd_gauge,
    "majority": cmd_majority,
    "stability": cmd_stability,
    "family": cmd_family,
    "perc": cmd_perc,
    "walk": cmd_walk,
}


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="key=value file; flags override it")
    p.add_argument("--seed", type=int)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    p.add_argument("--format", choices=["csv", "json"])
    p.add_argument("--family", choices=fam.FAMILY_KINDS)
    p.add_argument("--table", help="truth-table file")
    p.add_argument("--n", type=int)
    p.add_argument("--t", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--depth", type=int)
    p.add_argument("--threshold", type=float)
    p.add_argument("--weights", help="file with one weight per line")
    p.add_argument("--eps", help="comma-separated flip probabilities")
    p.add_argument("--q", help="comma-separated fixed flip counts")
    p.add_argument("--delta", help="comma-separated deviation thresholds")
    p.add_argument("--samples", type=int)
    p.add_argument("--subset", help="bitmask (majority) or edge ids / right-half (perc)")
    p.add_argument("--mode", choices=["exact", "heuristic"])
    p.add_argument("--m", type=int)
    p.add_argument("--exact", action="store_true")
    p.add_argument("--outer", type=int)
    p.add_argument("--inner", type=int)
    p.add_argument("--duration", type=float)
    p.add_argument("--rate", type=float)
    p.add_argument("--replicas", type=int)
    p.add_argument("--tmax", type=int)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="noisesens", description=__doc__.strip().splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        if name == "perc":
            p.add_argument("perc_cmd", choices=["crossing", "sensitivity", "majcorr", "dynamical"])
        _common(p)
    return parser


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Merge config-file values and defaults into parsed flags."""
    cfg = read_config(args.config) if args.config else {}
    for key, val in cfg.items():
        if not hasattr(args, key):
            raise ContractError(f"unknown config key {key!r}")
        if getattr(args, key) in (None, False):
            setattr(args, key, val)
    for key, val in DEFAULTS.items():
        if getattr(args, key, None) is None:
            setattr(args, key, val)
    return args


def _config_echo(args) -> dict:
    skip = {"config", "out", "format", "workers"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v not in (None, False, "")}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = resolve(args)
        meta = {"command": args.command + (f" {args.perc_cmd}" if args.command == "perc" else ""),
                "seed": args.seed, "config": _config_echo(args)}
        COMMANDS[args.command](args, meta)
    except ResourceError as exc:
        print(f"noisesens: resource cap: {exc}", file=sys.stderr)
        return 3
    except (ContractError, ValueError, FileNotFoundError) as exc:
        print(f"noisesens: configuration error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
