"""Command-line front end: ``hyperwalk {spectrum,crossing,search,gapscan}``.

Tables are written as CSV with shortest round-trip floats, single results as
JSON. Every file written gets a ``<file>.manifest.json`` sidecar recording the
command, parameters, version and timestamp (``SOURCE_DATE_EPOCH`` honoured).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import __version__
from .errors import CapabilityError, HyperwalkError, NoCrossingError, NumericError, TrackingError
from .reduced import MAX_REDUCED_N
from .search import detect_peak, run_search, scan_gap_vs_theory
from .spectral import find_crossing, sweep_eigenphases
from .theory import gamma_n, g_prime, gap_theory, lambda_of_crossing, search_time

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NUMERIC = 3


class UsageError(Exception):
    pass


@dataclass
class RunManifest:
    command: str
    params: dict
    version: str
    timestamp: str
    outputs: list = field(default_factory=list)


def _timestamp() -> str:
    epoch = os.environ.get("SOURCE_DATE_EPOCH")
    if epoch:
        when = datetime.fromtimestamp(int(epoch), tz=timezone.utc)
    else:
        when = datetime.now(tz=timezone.utc).replace(microsecond=0)
    return when.isoformat().replace("+00:00", "Z")


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return str(bool(x)).lower()
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    return str(x)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def _emit(text: str, out: str | None, command: str, params: dict) -> None:
    if out is None or out == "-":
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    manifest = RunManifest(command, params, __version__, _timestamp(), [os.path.abspath(out)])
    with open(out + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(asdict(manifest), fh, indent=2, sort_keys=True)
        fh.write("\n")


def _params(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "command")}


def cmd_spectrum(args) -> int:
    if not 2 <= args.n <= MAX_REDUCED_N:
        raise UsageError(f"--n must lie in [2, {MAX_REDUCED_N}]")
    if args.points < 2:
        raise UsageError("--points must be >= 2")
    if not 0.0 <= args.lambda_min < args.lambda_max <= 2.0:
        raise UsageError("need 0 <= --lambda-min < --lambda-max <= 2")
    grid = np.linspace(args.lambda_min, args.lambda_max, args.points)
    curve = sweep_eigenphases(args.n, grid)
    phases = curve.wrapped / math.pi
    rows = (
        (lam, j, phases[i, j]) for i, lam in enumerate(curve.lambdas) for j in range(phases.shape[1])
    )
    _emit(_csv_text(["lambda", "track_id", "phase_over_pi"], rows), args.out, "spectrum", _params(args))
    return EXIT_OK


def crossing_record(n: int, m: int) -> dict:
    try:
        num = find_crossing(n, m)
        lam = lambda_of_crossing(n, m)
    except NoCrossingError:
        return {"status": "no-crossing", "n": n, "m": m}
    th = gap_theory(n, m)
    return {
        "status": "ok",
        "n": n,
        "m": m,
        "lambda_m": lam,
        "lambda_star_numeric": num.lambda_star,
        "gap_theory": th,
        "gap_numeric": num.gap,
        "rel_error": abs(num.gap - th) / num.gap,
        "T_m": search_time(n, m),
        "g_prime": g_prime(n, m),
        "gamma_n": gamma_n(n).gamma,
    }


def cmd_crossing(args) -> int:
    if not 2 <= args.n <= MAX_REDUCED_N:
        raise UsageError(f"--n must lie in [2, {MAX_REDUCED_N}]")
    if not -args.n < args.m <= args.n:
        raise UsageError(f"--m must lie in [{-args.n + 1}, {args.n}]")
    rec = crossing_record(args.n, args.m)
    if args.json or args.out:
        _emit(json.dumps(rec, indent=2) + "\n", args.out, "crossing", _params(args))
    else:
        for k, v in rec.items():
            print(f"{k}: {_fmt(v)}")
    return EXIT_OK


def cmd_search(args) -> int:
    try:
        run = run_search(
            args.n, args.m, args.space, args.steps, use_numeric_lambda=args.numeric_lambda, v=args.v
        )
    except (CapabilityError, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    header = ["t", "p_marked", "p_neighbors"]
    cols = [run.t, run.p_marked, run.p_neighbors]
    if run.shells is not None:
        header += [f"shell_{k}" for k in range(run.n + 1)]
        cols += list(run.shells.T)
    text = _csv_text(header, zip(*cols))
    report = detect_peak(run)
    if args.out:
        _emit(text, args.out, "search", _params(args))
        print(report.summary())
    else:
        sys.stdout.write(text)
        print(report.summary(), file=sys.stderr)
    return EXIT_OK


def cmd_gapscan(args) -> int:
    if not 2 <= args.n_min <= args.n_max <= MAX_REDUCED_N:
        raise UsageError(f"need 2 <= --n-min <= --n-max <= {MAX_REDUCED_N}")
    if args.m_max < args.m_min:
        raise UsageError("--m-max must be >= --m-min")
    rows = scan_gap_vs_theory(range(args.n_min, args.n_max + 1), range(args.m_min, args.m_max + 1))
    table = ((r.n, r.m, r.gap_numeric, r.gap_theory, r.rel_error, r.reason) for r in rows)
    header = ["n", "m", "gap_numeric", "gap_theory", "rel_error", "reason"]
    _emit(_csv_text(header, table), args.out, "gapscan", _params(args))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hyperwalk", description="Quantum walk search on the hypercube.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("spectrum", help="eigenphase tracks of the reduced operator over lambda")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--lambda-min", type=float, default=0.0)
    s.add_argument("--lambda-max", type=float, default=2.0)
    s.add_argument("--points", type=int, default=400)
    s.add_argument("--out")
    s.set_defaults(func=cmd_spectrum)

    s = sub.add_parser("crossing", help="numerical and analytic data for one avoided crossing")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--json", action="store_true")
    s.add_argument("--out")
    s.set_defaults(func=cmd_crossing)

    s = sub.add_parser("search", help="run the search at a crossing and report the peak")
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--m", type=int, default=0)
    s.add_argument("--space", choices=("reduced", "full"), default="reduced")
    s.add_argument("--steps", type=int)
    s.add_argument("--v", type=int, default=0, help="marked vertex (full space)")
    s.add_argument("--numeric-lambda", action="store_true", help="use the numerical crossing point")
    s.add_argument("--out")
    s.set_defaults(func=cmd_search)

    s = sub.add_parser("gapscan", help="numerical vs analytic gaps over a range of n and m")
    s.add_argument("--n-min", type=int, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--m-min", type=int, default=0)
    s.add_argument("--m-max", type=int, default=3)
    s.add_argument("--out")
    s.set_defaults(func=cmd_gapscan)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, CapabilityError) as exc:
        print(f"hyperwalk {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, TrackingError) as exc:
        print(f"hyperwalk {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except HyperwalkError as exc:
        print(f"hyperwalk {args.command}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
