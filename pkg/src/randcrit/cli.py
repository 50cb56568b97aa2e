"""Command-line frontend: reproducible tables and experiment records.

Commands:
    constants  --m 2..8       K_m, c_m, I_m (both routes), C(m), log ratios
    wigner     --n 16,36,100  rescaled GOE density against the semicircle
    sphere     --n 10 --trials 200   critical-point experiment (JSONL + summary)

Every output starts with a header carrying the tool version, the full
configuration, and the seed; re-running the same configuration reproduces
the file byte for byte.  Exit codes: 0 ok, 2 usage/validation, 3 numeric
failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from math import sqrt

from . import __version__
from .exceptions import NumericError, RandcritError

CSV_FMT = "%.17g"


def _parse_int_list(spec: str) -> list[int]:
    """Accept '2..8', '2,3,4' or a single integer."""
    spec = spec.strip()
    if not spec:
        raise ValueError("empty range")
    if ".." in spec:
        lo, hi = spec.split("..", 1)
        lo, hi = int(lo), int(hi)
        if hi < lo:
            raise ValueError(f"empty range {spec!r}")
        return list(range(lo, hi + 1))
    return [int(tok) for tok in spec.split(",") if tok.strip()]


def _header_lines(args: argparse.Namespace, command: str) -> list[str]:
    # output paths are where the file lands, not part of what it contains
    cfg = {
        k: v
        for k, v in sorted(vars(args).items())
        if k not in ("func", "out", "summary_out")
    }
    return [
        f"# randcrit {__version__} {command}",
        f"# config: {json.dumps(cfg, sort_keys=True, default=str)}",
    ]


def _open_out(args: argparse.Namespace):
    if args.out is None or args.out == "-":
        return sys.stdout, False
    out_dir = os.environ.get("RANDCRIT_OUTDIR", "")
    path = args.out if os.path.isabs(args.out) or not out_dir else os.path.join(out_dir, args.out)
    return open(path, "w", newline=""), True


def _emit_csv(fh, header_lines, columns, rows):
    for line in header_lines:
        fh.write(line + "\n")
    fh.write(",".join(columns) + "\n")
    for row in rows:
        cells = []
        for v in row:
            if isinstance(v, float):
                cells.append(CSV_FMT % v)
            else:
                cells.append(str(v))
        fh.write(",".join(cells) + "\n")


def cmd_constants(args: argparse.Namespace) -> int:
    from .constants import constants_row
    from .ensembles import universal_params
    from .matgauss import expected_abs_det

    m_values = _parse_int_list(args.m)
    if any(m < 2 for m in m_values):
        raise ValueError("all m must be >= 2")
    rows = []
    for m in m_values:
        mc = None
        if args.samples > 0:
            mc = expected_abs_det(
                universal_params(m), args.samples, seed=args.seed, threads=args.threads
            )
        r = constants_row(m, i_m_mc=mc)
        rows.append(
            (
                r.m,
                r.k_m,
                r.c_m,
                r.i_m_fyodorov,
                mc.mean if mc else float("nan"),
                mc.std_error if mc else float("nan"),
                r.log_c_m_value,
                r.c_m_value,
                r.log_ratio_c,
                r.log_ratio_i,
                r.ratio_gap,
            )
        )
    fh, close = _open_out(args)
    try:
        _emit_csv(
            fh,
            _header_lines(args, "constants"),
            [
                "m", "K_m", "c_m", "I_m_fyodorov", "I_m_mc", "I_m_mc_se",
                "log_C_m", "C_m", "log_ratio_C", "log_ratio_I", "ratio_gap",
            ],
            rows,
        )
    finally:
        if close:
            fh.close()
    return 0


def cmd_wigner(args: argparse.Namespace) -> int:
    from .hermite import integral_r, rescaled_density, semicircle, wigner_limit_integral

    n_values = _parse_int_list(args.n)
    if not n_values or any(n < 2 for n in n_values):
        raise ValueError("need degrees n >= 2")
    limit = sqrt(2.0) / 3.141592653589793
    rows = []
    for n in n_values:
        w = wigner_limit_integral(n)
        rows.append(
            (
                n,
                w,
                limit,
                abs(w - limit),
                rescaled_density(n, 0.0),
                semicircle(0.0),
                integral_r(n),
                float(n),
            )
        )
    fh, close = _open_out(args)
    try:
        _emit_csv(
            fh,
            _header_lines(args, "wigner"),
            [
                "n", "wigner_integral", "semicircle_0", "abs_error",
                "rho_bar_0", "semicircle_at_0", "int_R_n", "expected_int",
            ],
            rows,
        )
    finally:
        if close:
            fh.close()
    return 0


def cmd_sphere(args: argparse.Namespace) -> int:
    from .sphere import run_experiment

    if args.n < 1:
        raise ValueError("degree must be >= 1")
    if args.trials < 1:
        raise ValueError("trials must be >= 1")
    exp = run_experiment(
        args.n, args.trials, seed=args.seed, grid_res=args.grid_res, threads=args.threads
    )
    fh, close = _open_out(args)
    try:
        for line in _header_lines(args, "sphere"):
            fh.write(line + "\n")
        for rec in exp.records:
            fh.write(
                json.dumps(
                    {
                        "degree": rec.degree,
                        "seed": [args.seed, rec.degree, rec.trial],
                        "trial": rec.trial,
                        "N": rec.total,
                        "p": rec.extrema,
                        "s": rec.saddles,
                        "euler_check": rec.euler_ok,
                        "is_morse": rec.is_morse,
                    },
                    sort_keys=True,
                )
                + "\n"
            )
        summary = {
            "summary": True,
            "degree": exp.n,
            "trials": args.trials,
            "mean_N": exp.mean_total,
            "se_N": exp.se_total,
            "predicted_N": exp.predicted,
            "mean_peak_ratio": exp.mean_peak_ratio,
            "peak_limit": exp.peak_limit,
            "peak_limit_claimed": exp.peak_limit_claimed,
            "pleijel_bound": exp.pleijel,
            "euler_failures": exp.euler_failures,
            "non_morse": exp.non_morse,
        }
        fh.write(json.dumps(summary, sort_keys=True) + "\n")
    finally:
        if close:
            fh.close()
    if args.summary_out:
        sfh = open(args.summary_out, "w", newline="")
        try:
            cols = [k for k in summary if k != "summary"]
            _emit_csv(
                sfh,
                _header_lines(args, "sphere-summary"),
                cols,
                [tuple(summary[k] for k in cols)],
            )
        finally:
            sfh.close()
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="randcrit",
        description="Expected-critical-point constants of random smooth functions",
    )
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    pc = sub.add_parser("constants", help="universal constants table")
    pc.add_argument("--m", required=True, help="dimension range, e.g. 2..8 or 2,4,8")
    pc.add_argument("--samples", type=int, default=0, help="MC samples for the I_m cross-check (0 = skip)")
    pc.add_argument("--seed", type=int, default=0)
    pc.add_argument("--threads", type=int, default=1)
    pc.add_argument("--format", choices=["csv"], default="csv")
    pc.add_argument("--out", default=None, help="output path (default stdout)")
    pc.set_defaults(func=cmd_constants)

    pw = sub.add_parser("wigner", help="GOE rescaled density vs the semicircle")
    pw.add_argument("--n", required=True, help="degree list, e.g. 16,36,64,100")
    pw.add_argument("--format", choices=["csv"], default="csv")
    pw.add_argument("--out", default=None)
    pw.set_defaults(func=cmd_wigner)

    ps = sub.add_parser("sphere", help="critical points of random spherical harmonics")
    ps.add_argument("--n", type=int, required=True, help="harmonic degree")
    ps.add_argument("--trials", type=int, default=200)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--grid-res", type=int, default=None, dest="grid_res")
    ps.add_argument("--threads", type=int, default=1)
    ps.add_argument("--format", choices=["jsonl"], default="jsonl")
    ps.add_argument("--out", default=None)
    ps.add_argument("--summary-out", default=None, dest="summary_out",
                    help="also write the summary row as CSV")
    ps.set_defaults(func=cmd_sphere)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if e.code else 0
    try:
        return args.func(args)
    except (ValueError, RandcritError) as e:
        if isinstance(e, NumericError):
            print(f"randcrit: numeric failure: {e}", file=sys.stderr)
            return 3
        print(f"randcrit: invalid input: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
