"""Command-line interface: ``lmtrans <command> [options]``.

Exit codes: 0 success, 1 invalid input or configuration, 2 failed verification.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import harness, verification
from .farima import Kind, ProcessSpec, read_series_csv, simulate
from .innovations import InnovationSpec, Law
from .power_rank import MarginalSampler, power_rank
from .spectral import gph_estimate
from .theory import (
    classify_covariance,
    classify_spectral,
    classify_square_antipersistent,
    classify_type1_square,
)
from .transforms import apply_values, parse_transform


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # usage errors are input errors (exit 1); exit 2 is reserved for failed checks
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _floats(text: str) -> tuple[float, ...]:
    text = text.strip()
    return tuple(float(v) for v in text.split(",")) if text else ()


def _global_flags(suppress: bool) -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    default = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=default(0), help="base seed (replication r uses seed + r)")
    p.add_argument("--out", default=default(None), help="output file (default: standard output)")
    p.add_argument("--threads", type=int, default=default(1), help="worker processes")
    p.add_argument("--config", default=default(None), help="experiment config file (table command)")
    return p


def _model_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=float, required=True, help="memory parameter")
    p.add_argument("--ar", type=_floats, default=(), help="AR coefficients, comma separated")
    p.add_argument("--ma", type=_floats, default=(), help="MA coefficients, comma separated")
    p.add_argument("--kind", choices=[k.value for k in Kind], default="stationary")
    p.add_argument("--law", choices=[v.value for v in Law], default="t")
    p.add_argument("--nu", type=float, default=10.0, help="degrees of freedom for t laws")
    p.add_argument("--no-standardize", action="store_true", help="keep raw t draws (variance nu/(nu-2))")


def _spec_from(args) -> ProcessSpec:
    inn = InnovationSpec(Law(args.law), args.nu, not args.no_standardize)
    return ProcessSpec(args.d, ar=args.ar, ma=args.ma, kind=Kind(args.kind), innovation=inn)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lmtrans", description=__doc__.splitlines()[0], parents=[_global_flags(False)])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    common = [_global_flags(True)]

    p = sub.add_parser("simulate", parents=common, help="simulate a FARIMA or Type-I path")
    _model_flags(p)
    p.add_argument("--n", type=int, required=True, help="path length")
    p.add_argument("--truncation", type=int, default=None, help="MA truncation M (default 2n)")

    p = sub.add_parser("transform", parents=common, help="apply K to a series CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--transform", required=True, help="e.g. pow:2, poly:0,-3,0,1, sin, ind:0.1, call:1.5")

    p = sub.add_parser("estimate", parents=common, help="GPH estimate of d for a series CSV")
    p.add_argument("--input", required=True)
    p.add_argument("--m", type=int, default=None, help="bandwidth (default floor(n^0.8))")
    p.add_argument("--regressor", choices=["sin", "log"], default="sin")

    p = sub.add_parser("rank", parents=common, help="numerical power rank of a transform")
    p.add_argument("--transform", required=True)
    p.add_argument("--marginal", choices=["gaussian", "farima", "empirical"], default="gaussian")
    p.add_argument("--sigma", type=float, default=1.0, help="sd of the gaussian marginal")
    p.add_argument("--input", help="series CSV for the empirical marginal")
    p.add_argument("--samples", type=int, default=10**6)
    p.add_argument("--max-rank", type=int, default=6)
    p.add_argument("--tol", type=float, default=1e-3)
    p.add_argument("--d", type=float, help="farima marginal: memory parameter")
    p.add_argument("--ar", type=_floats, default=())
    p.add_argument("--ma", type=_floats, default=())
    p.add_argument("--law", choices=[v.value for v in Law], default="t")
    p.add_argument("--nu", type=float, default=10.0)
    p.add_argument("--no-standardize", action="store_true")

    p = sub.add_parser("theory", parents=common, help="theoretical memory class of K(X)")
    p.add_argument("--d", type=float, help="memory parameter of X")
    p.add_argument("--k", type=int, default=None, help="power rank of K")
    p.add_argument("--beta", type=float, help="coefficient decay exponent (covariance rule)")
    p.add_argument("--type1", action="store_true", help="X is a Type-I process and K(x) = x^2")

    p = sub.add_parser("table", parents=common, help="reproduce a simulation table or run a config")
    p.add_argument("table_id", nargs="?", choices=list(harness.TABLE_IDS))
    p.add_argument("--scale", type=float, default=1.0, help="fraction of full N and n")
    p.add_argument("--N", type=int, default=None, help="override replications")
    p.add_argument("--n", type=int, default=None, help="override path length")
    p.add_argument("--print-config", action="store_true", help="emit the config instead of running it")

    p = sub.add_parser("verify", parents=common, help="run the numerical identity checks")
    p.add_argument("--quick", action="store_true", help="smaller sums and Monte Carlo sizes")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _read_input(path) -> np.ndarray:
    try:
        return read_series_csv(path)
    except OSError as err:
        raise ValueError(f"cannot read {path}: {err}") from err


def _cmd_simulate(args) -> int:
    s = simulate(_spec_from(args), args.n, truncation=args.truncation, seed=args.seed)
    if args.out:
        sidecar = s.write_csv(args.out)
        print(f"wrote {args.out} and {sidecar}", file=sys.stderr)
    else:
        sys.stdout.write("".join(f"{v!r}\n" for v in s.values))
    return 0


def _cmd_transform(args) -> int:
    t = parse_transform(args.transform)
    y = apply_values(t, _read_input(args.input))
    _emit("".join(f"{float(v)!r}\n" for v in y), args.out)
    return 0


def _cmd_estimate(args) -> int:
    est = gph_estimate(_read_input(args.input), m=args.m, regressor=args.regressor)
    _emit(f"d_hat={est.d_hat:.6f} std_error={est.std_error:.6f} m={est.m} n={est.n}\n", args.out)
    return 0


def _cmd_rank(args) -> int:
    t = parse_transform(args.transform)
    if args.marginal == "gaussian":
        ms = MarginalSampler.gaussian(args.sigma, args.samples, seed=args.seed)
    elif args.marginal == "empirical":
        if not args.input:
            raise ValueError("--marginal empirical needs --input")
        ms = MarginalSampler.empirical(_read_input(args.input))
    else:
        if args.d is None:
            raise ValueError("--marginal farima needs --d")
        inn = InnovationSpec(Law(args.law), args.nu, not args.no_standardize)
        spec = ProcessSpec(args.d, ar=args.ar, ma=args.ma, innovation=inn)
        ms = MarginalSampler.farima(spec, sample_count=min(args.samples, 2 * 10**5), seed=args.seed)
    res = power_rank(t, ms, max_rank=args.max_rank, tol=args.tol)
    lines = [f"rank={res.label}", f"marginal_sd={res.marginal_sd:.6g}", "order  derivative  std_error  threshold"]
    for e, thr in zip(res.estimates, res.thresholds):
        lines.append(f"{e.order:<5}  {e.value:<10.6g}  {e.std_error:<9.3g}  {thr:.3g}")
    _emit("\n".join(lines) + "\n", args.out)
    return 0


def _cmd_theory(args) -> int:
    if args.beta is not None:
        if args.k is None:
            raise ValueError("--beta needs --k")
        mc = classify_covariance(args.beta, args.k)
    elif args.d is None:
        raise ValueError("theory needs --d (or --beta)")
    elif args.type1:
        mc = classify_type1_square(args.d)
    elif args.d < 0:
        if args.k != 2:
            raise ValueError("for d < 0 only the square (k = 2) of FARIMA(0,d,0) is classified")
        mc = classify_square_antipersistent(args.d)
    else:
        if args.k is None:
            raise ValueError("theory needs --k")
        mc = classify_spectral(args.d, args.k)
    _emit(f"{mc}\n", args.out)
    return 0


def _cmd_table(args) -> int:
    if args.config:
        cfg = harness.load_config(args.config)
    elif args.table_id:
        cfg = harness.table_config(args.table_id, args.scale, seed=args.seed, N=args.N, n=args.n)
    else:
        raise ValueError("table needs an id (T1, T2, T4, T5) or --config")
    if args.print_config:
        _emit(cfg.to_text(), args.out)
        return 0
    rows = harness.run_experiment(cfg, threads=args.threads)
    _emit(harness.rows_to_csv(rows), args.out or cfg.output)
    return 0


def _cmd_verify(args) -> int:
    reports = verification.run_all(quick=args.quick, threads=args.threads)
    print(verification.render_table(reports))
    if args.out:
        Path(args.out).write_text(verification.reports_to_csv(reports))
    failed = [r.name for r in reports if not r.passed]
    if failed:
        print(f"{len(failed)} check(s) failed: {', '.join(failed)}", file=sys.stderr)
        return 2
    return 0


_COMMANDS = {
    "simulate": _cmd_simulate,
    "transform": _cmd_transform,
    "estimate": _cmd_estimate,
    "rank": _cmd_rank,
    "theory": _cmd_theory,
    "table": _cmd_table,
    "verify": _cmd_verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if args.threads < 1:
            raise ValueError("--threads must be >= 1")
        return _COMMANDS[args.command](args)
    except _UsageError as err:
        print(err, file=sys.stderr)
        return 1
    except (ValueError, ArithmeticError) as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
