"""Command-line front end: ``qredundancy <command> [options]``.

Exit codes: 0 answer, 1 error, 2 Fourier-rank budget exceeded.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import arcsine, fitting, fourier, pqc, rank

EXIT_OK, EXIT_ERROR, EXIT_EXCEEDED = 0, 1, 2

BUILTIN_TARGETS = {
    "cos": lambda x: np.cos(2 * np.pi * x),
    "cos2": lambda x: np.cos(2 * np.pi * x) ** 2,
    "sin": np.sin,
    "abs_sin": lambda x: np.abs(np.sin(np.pi * x)),
    "sqrt": lambda x: np.sqrt(1 - np.asarray(x) ** 2),
}


class UsageError(ValueError):
    pass


def _r12(v: float) -> float:
    return float(f"{v:.12g}")


def _floats(text: str) -> list[float]:
    try:
        return [float(t) for t in text.replace(";", ",").split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _rationals(text: str) -> list[Fraction]:
    try:
        return [Fraction(t.strip()) for t in text.split(",") if t.strip()]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _read_samples(path: str) -> tuple[np.ndarray, np.ndarray]:
    xs, ys = [], []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh), 1):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                x, y = (float(v) for v in row[:2])
            except ValueError:
                if lineno == 1:
                    continue  # header
                raise UsageError(f"{path}:{lineno}: expected 'x,y' numbers, got {row!r}") from None
            xs.append(x)
            ys.append(y)
    if len(xs) < 3:
        raise UsageError(f"{path}: need at least 3 samples")
    return np.array(xs), np.array(ys)


def parse_target(spec: str):
    """Builtin name, ``poly:c0,c1,...`` (ascending), or a CSV file of ``x,y`` samples.

    Returns a callable, or an ``(x, y)`` tuple for sample files.
    """
    if spec in BUILTIN_TARGETS:
        return BUILTIN_TARGETS[spec]
    if spec.startswith("poly:"):
        coeffs = _floats(spec[5:])
        if not coeffs:
            raise UsageError("poly: needs at least one coefficient")
        return np.polynomial.Polynomial(coeffs)
    if os.path.isfile(spec):
        return _read_samples(spec)
    raise UsageError(f"unknown target {spec!r}; use {', '.join(BUILTIN_TARGETS)}, poly:c0,c1,... or a CSV file")


def _parse_range(text: str) -> list[int]:
    try:
        if ".." in text:
            lo, hi = text.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"expected a range like 1..3 or a list like 1,2,4, got {text!r}") from None


def _interval(text: str) -> tuple[float, float]:
    vals = _floats(text)
    if len(vals) != 2 or not vals[0] < vals[1]:
        raise UsageError(f"expected an interval 'lo,hi' with lo < hi, got {text!r}")
    return vals[0], vals[1]


# ---------------------------------------------------------------- commands


def cmd_spectrum(args, out) -> int:
    c = pqc.load_circuit(args.circuit)
    s = fourier.extract_spectrum(c)
    if args.format == "json":
        rows = [
            {"w": [int(v) for v in w], "re": _r12(z.real), "im": _r12(z.imag)}
            for (w, z), zero in zip(s.items(), s.numerically_zero().ravel())
            if not (args.nonzero and zero)
        ]
        json.dump({"n": s.n, "coefficients": rows}, out, indent=2)
        out.write("\n")
    else:
        s.to_csv(out, nonzero_only=args.nonzero)
    return EXIT_OK


def cmd_spread(args, out) -> int:
    text = args.a
    if os.path.isfile(text):
        with open(text) as fh:
            text = ",".join(fh.read().split())
    a = _rationals(text)
    axes = None
    if args.axis_sets:
        axes = [[int(v) for v in part.split(",")] for part in args.axis_sets.split(";")]
    fs = fourier.frequency_set(a, axes)
    if args.format == "csv":
        fs.to_csv(out)
    else:
        json.dump({
            "a": [_r12(float(v)) for v in a],
            "spread": fs.spread,
            "size": len(fs.values),
            "values": [_r12(k) for k in fs.values],
            "multiplicities": [int(m) for m in fs.multiplicities],
        }, out, indent=2)
        out.write("\n")
    return EXIT_OK


def cmd_rank(args, out) -> int:
    target = parse_target(args.target)
    if isinstance(target, tuple):
        h = rank.SampleSet.from_points(*target)
    else:
        h = target
    report = rank.fourier_rank(h, args.x0, args.eps, args.budget_N, args.tol_rank)
    out.write(report.to_json() + "\n")
    return EXIT_EXCEEDED if report.exceeded else EXIT_OK


def cmd_scdim(args, out) -> int:
    d = arcsine.ScDictionary(_floats(args.a), _floats(args.b))
    if args.format == "csv":
        d.to_csv(out)
        return EXIT_OK
    dim = arcsine.sc_dimension(d, args.x0, args.eps, args.samples, args.tol_sc)
    iv = d.common_interval
    json.dump({
        "n": d.n,
        "dimension": dim,
        "max_dimension": 3**d.n,
        "common_interval": [_r12(iv.lo) if np.isfinite(iv.lo) else None,
                            _r12(iv.hi) if np.isfinite(iv.hi) else None],
    }, out, indent=2)
    out.write("\n")
    return EXIT_OK


def cmd_bound(args, out) -> int:
    if args.kind == "degree":
        if args.degree is None:
            raise UsageError("--kind degree needs --degree")
        reports = [fitting.bound_degree(args.degree)]
    else:
        if args.rank is None:
            raise UsageError(f"--kind {args.kind} needs --rank")
        if args.kind == "arcsin":
            reports = [fitting.bound_arcsin(args.rank)]
        else:
            plain, sharp = fitting.bound_linear(args.rank)
            reports = [sharp if args.kind == "linear_sharp" else plain]
    if args.format == "json":
        json.dump(reports[0].to_dict(), out, indent=2)
        out.write("\n")
    elif args.format == "csv":
        w = csv.writer(out, lineterminator="\n")
        w.writerow(["rank_used", "bound_kind", "lower_bound_real", "lower_bound_int"])
        for rep in reports:
            d = rep.to_dict()
            w.writerow([d["rank_used"], d["bound_kind"], d["lower_bound_real"], d["lower_bound_int"]])
    else:
        out.write(f"{reports[0].lower_bound_int}\n")
    return EXIT_OK


def _fit(args, n):
    target = parse_target(args.target)
    interval = _interval(args.interval)
    if args.encoding == "linear":
        return fitting.fit_linear(target, interval, n, args.restarts, args.seed, freq_cap=args.freq_cap)
    return fitting.fit_arcsin(target, interval, n, args.restarts, args.seed)


def cmd_fit(args, out) -> int:
    result = _fit(args, args.n)
    out.write(result.to_json() + "\n")
    return EXIT_OK


def cmd_sweep(args, out) -> int:
    target = parse_target(args.target)
    kwargs = {"freq_cap": args.freq_cap} if args.encoding == "linear" else {}
    rows, _ = fitting.tightness_sweep(
        target, _interval(args.interval), _parse_range(args.n), args.encoding,
        args.restarts, args.seed, **kwargs,
    )
    if args.format == "json":
        json.dump([{"n": r.n, "best_residual": _r12(r.best_residual),
                    "wall_ms": None if args.no_timing else round(r.wall_ms, 3), "seed": r.seed}
                   for r in rows], out, indent=2)
        out.write("\n")
    else:
        fitting.write_sweep_csv(rows, out, timing=not args.no_timing)
    return EXIT_OK


# ---------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default 0)")
    common.add_argument("--tol-rank", type=float, default=rank.DEFAULT_RANK_TOL,
                        help="relative singular-value threshold for Hankel rank (default 1e-8)")
    common.add_argument("--budget-N", dest="budget_N", type=int, default=rank.DEFAULT_BUDGET,
                        help="Fourier-rank sample budget N (default 24)")
    common.add_argument("--restarts", type=int, default=8, help="fit restarts (default 8)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], help="report format")

    p = argparse.ArgumentParser(
        prog="qredundancy",
        description="Fourier structure and input-redundancy bounds for parameterized quantum circuits.",
        epilog="Fits use a frequency cap F = 5 and max-abs residuals on 512 equispaced points; "
               "keep fit intervals at length <= 1. Negative list values need '=', e.g. --a=-1,2.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", parents=[common], help="Fourier spectrum of a circuit (CSV)")
    s.add_argument("circuit", help="circuit JSON file")
    s.add_argument("--nonzero", action="store_true", help="omit numerically zero coefficients")
    s.set_defaults(func=cmd_spectrum, default_format="csv")

    s = sub.add_parser("spread", parents=[common], help="frequency set K_a and spread of a")
    s.add_argument("a", help="comma list (exact rationals allowed, e.g. 1/3) or a file")
    s.add_argument("--axis-sets", help="per-slot integer sets, e.g. '-1,0,1;-2,-1,0,1,2'")
    s.set_defaults(func=cmd_spread, default_format="json")

    target_help = "cos | cos2 | sin | abs_sin | sqrt | poly:c0,c1,... | CSV file of x,y"
    s = sub.add_parser("rank", parents=[common], help="estimate the Fourier rank of a target")
    s.add_argument("--target", required=True, help=target_help)
    s.add_argument("--x0", type=float, default=0.0)
    s.add_argument("--eps", type=float, default=0.5)
    s.set_defaults(func=cmd_rank, default_format="json")

    s = sub.add_parser("scdim", parents=[common], help="numerical dimension of an sc-dictionary")
    s.add_argument("--a", required=True)
    s.add_argument("--b", required=True)
    s.add_argument("--x0", type=float, default=0.0)
    s.add_argument("--eps", type=float, default=0.4)
    s.add_argument("--samples", type=int)
    s.add_argument("--tol-sc", type=float, default=arcsine.DEFAULT_TOL)
    s.set_defaults(func=cmd_scdim, default_format="json")

    s = sub.add_parser("bound", parents=[common], help="redundancy lower bound (prints the integer)")
    s.add_argument("--kind", choices=["linear", "linear_sharp", "arcsin", "degree"], required=True)
    s.add_argument("--rank", type=int)
    s.add_argument("--degree", type=int)
    s.set_defaults(func=cmd_bound, default_format=None)

    for name, func, helptext in (("fit", cmd_fit, "variational input-encoding fit"),
                                 ("sweep", cmd_sweep, "best residual per redundancy (CSV)")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--target", required=True, help=target_help)
        s.add_argument("--encoding", choices=["linear", "arcsine"], default="linear")
        s.add_argument("--interval", default="-0.5,0.5", help="fit interval lo,hi (default -0.5,0.5)")
        s.add_argument("--freq-cap", type=float, default=fitting.DEFAULT_FREQ_CAP)
        if name == "fit":
            s.add_argument("--n", type=int, required=True, help="redundancy")
            s.set_defaults(func=func, default_format="json")
        else:
            s.add_argument("--n", default="1..3", help="redundancy range, e.g. 1..3")
            s.add_argument("--no-timing", action="store_true", help="leave wall_ms empty")
            s.set_defaults(func=func, default_format="csv")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except (ValueError, OSError) as exc:
        print(f"qredundancy {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(buf.getvalue())
    else:
        sys.stdout.write(buf.getvalue())
    return code


if __name__ == "__main__":
    sys.exit(main())
