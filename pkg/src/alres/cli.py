"""Command-line front end: alres describe|entry|expand|verify|sweep."""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from . import numerics
from .errors import (
    BoundarySurface,
    InvalidResidueIndex,
    NearSingularEvaluation,
    ParseError,
    PoleAtOrigin,
    SingularMatrix,
    SingularTransition,
    WindowTooSmall,
    ZeroDivide,
)
from .opcalc import SUITES, all_passed, run_suites
from .potential import Potential, load_potential
from .resolvent import (
    REGIONS,
    RegionTag,
    Window,
    a_matrix,
    default_window,
    lambda_expansion,
    region_classify,
    resolvent_window,
)

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_SINGULAR = 0, 1, 2, 3
COMMANDS = ("describe", "entry", "expand", "verify", "sweep")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    potential: Potential
    window: Window
    region: Optional[RegionTag] = None
    w0: Optional[complex] = None
    lam0: complex = 0.0
    h0: Optional[float] = None
    out: Optional[str] = None
    fmt: str = "json"


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, fixed indentation, trailing newline."""
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _complex_json(z: complex) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def _int_pair(text: str) -> Tuple[int, int]:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 'm,n', got {text!r}") from None
    return a, b


def _float_list(text: str) -> List[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _eval_point(text: str) -> Tuple[complex, complex]:
    parts = text.split(",")
    if len(parts) not in (2, 3):
        raise argparse.ArgumentTypeError("--eval takes w_re,w_im[,lambda]")
    try:
        w0 = complex(float(parts[0]), float(parts[1]))
        lam0 = complex(parts[2]) if len(parts) == 3 else 0j
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad --eval value {text!r}") from None
    return w0, lam0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="alres", description=__doc__)
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--potential", required=True, metavar="FILE")
    parser.add_argument("--region", choices=[r.value for r in REGIONS])
    parser.add_argument("--abs-w", type=float)
    parser.add_argument("--h", type=float)
    parser.add_argument("--window", type=int, nargs=4, metavar=("M_LO", "M_HI", "N_LO", "N_HI"))
    parser.add_argument("--eval", type=_eval_point, metavar="W_RE,W_IM[,LAMBDA]")
    parser.add_argument("--out", metavar="FILE")
    parser.add_argument("--format", choices=("json", "csv"), default="json")
    # entry
    parser.add_argument("--m", type=int)
    parser.add_argument("--n", type=int)
    # verify
    parser.add_argument("--suites", default=",".join(SUITES),
                        help="comma-separated subset of " + ",".join(SUITES))
    parser.add_argument("--corrupt", type=_int_pair, metavar="M,N",
                        help="debug: add 1 to entry (M, N) of each suite's kernel")
    # sweep
    parser.add_argument("--w-grid", type=_float_list, default=[0.5, 2.0])
    parser.add_argument("--h-grid", type=_float_list, default=[0.1, 1.0, 3.0])
    parser.add_argument("--entries", default=None,
                        help="semicolon-separated m,n pairs for the sweep columns")
    parser.add_argument("--lam0", type=complex, default=numerics.DEFAULT_LAM0)
    parser.add_argument("--phase", type=float, default=0.0, help="arg(w0) in the sweep")
    parser.add_argument("--jobs", type=int, default=1)
    return parser


def resolve_region(tag: Optional[str], abs_w: Optional[float], h: Optional[float]) -> Optional[RegionTag]:
    """Region from a tag, from a numeric (|w|, h), or both (which must agree)."""
    if abs_w is not None and h is None:
        raise UsageError("--abs-w needs --h")
    numeric = region_classify(abs_w, h) if abs_w is not None else None
    if tag is None:
        return numeric
    region = RegionTag(tag)
    if numeric is not None and numeric is not region:
        raise UsageError(f"--region {tag} disagrees with (|w|, h) = ({abs_w}, {h}) in {numeric.value}")
    return region


def make_config(args: argparse.Namespace) -> RunConfig:
    p = load_potential(args.potential)
    window = tuple(args.window) if args.window else default_window(p)
    if window[0] > window[1] or window[2] > window[3]:
        raise UsageError(f"empty window {window}")
    w0, lam0 = args.eval if args.eval else (None, 0j)
    if w0 is not None and args.abs_w is not None and not math.isclose(abs(w0), args.abs_w, rel_tol=1e-12):
        raise UsageError(f"--abs-w {args.abs_w} disagrees with |w0| = {abs(w0)}")
    abs_w = args.abs_w
    if abs_w is None and w0 is not None and args.h is not None:
        abs_w = abs(w0)
    if args.h is not None and abs_w is None and args.command != "sweep":
        raise UsageError("--h needs --abs-w or --eval")
    region = resolve_region(args.region, abs_w, args.h) if args.command != "sweep" else None
    return RunConfig(args.command, p, window, region, w0, lam0, args.h, args.out, args.format)


# commands

def cmd_describe(cfg: RunConfig) -> dict:
    p = cfg.potential
    a = a_matrix(p)
    return {
        "k": p.k,
        "K": p.K,
        "r": list(p.r),
        "s": list(p.s),
        "degenerate_sites": p.degenerate_sites(),
        "Q": p.Q,
        "a": a.to_json(),
        "a_text": [[str(x) for x in row] for row in a.rows()],
    }


def cmd_entry(cfg: RunConfig, m: int, n: int) -> dict:
    if cfg.region is None:
        raise UsageError("entry needs --region or --abs-w/--h")
    A = resolvent_window(cfg.potential, cfg.region, (m, m, n, n))[m, n]
    out = {
        "potential": cfg.potential.to_json(),
        "region": cfg.region.value,
        "m": m,
        "n": n,
        "h_exp": n - m,
        "matrix": A.to_json(),
        "text": [[str(x) for x in row] for row in A.rows()],
    }
    if cfg.w0 is not None:
        value = A.evaluate(cfg.w0, cfg.lam0)
        numeric = {"w0": _complex_json(cfg.w0), "lam0": _complex_json(cfg.lam0),
                   "stripped": [[_complex_json(z) for z in row] for row in value]}
        if cfg.h0 is not None:
            full = cfg.h0 ** (n - m) * value
            numeric["h0"] = cfg.h0
            numeric["full"] = [[_complex_json(z) for z in row] for row in full]
        out["numeric"] = numeric
    return out


def cmd_expand(cfg: RunConfig) -> dict:
    if cfg.region not in (None, RegionTag.R_BOTH_ABOVE):
        raise UsageError("expand is defined in R_BOTH_ABOVE only")
    p = cfg.potential
    m_lo, m_hi, n_lo, n_hi = cfg.window
    if m_lo > p.k or m_hi < p.K or n_lo > p.k or n_hi < p.K:
        raise WindowTooSmall(f"window {cfg.window} does not cover the support [{p.k}, {p.K}]")
    return lambda_expansion(p, cfg.window).to_json()


def cmd_verify(cfg: RunConfig, suites: Sequence[str],
               corrupt_at: Optional[Tuple[int, int]] = None) -> Tuple[dict, int]:
    regions = [cfg.region] if cfg.region else list(REGIONS)
    reports = run_suites(cfg.potential, cfg.window, suites, regions, corrupt_at)
    passed = all_passed(reports)
    body = {
        "potential": cfg.potential.to_json(),
        "window": list(cfg.window),
        "passed": passed,
        "corrupt_at": list(corrupt_at) if corrupt_at else None,
        "reports": [r.to_json() for r in reports],
    }
    return body, EXIT_OK if passed else EXIT_FAIL


def cmd_sweep(cfg: RunConfig, w_grid, h_grid, entries, lam0, phase, jobs) -> List[dict]:
    return numerics.sweep(cfg.potential, w_grid, h_grid, entries, lam0, phase, jobs)


# output

def _csv_text(rows: List[dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _parse_entries(text: Optional[str], p: Potential) -> List[Tuple[int, int]]:
    if not text:
        return [(p.k, p.k), (p.K + 1, p.k)]
    try:
        return [_int_pair(part) for part in text.split(";") if part.strip()]
    except argparse.ArgumentTypeError as exc:
        raise UsageError(str(exc)) from None


def run(args: argparse.Namespace) -> int:
    cfg = make_config(args)
    if args.command == "describe":
        if cfg.fmt != "json":
            raise UsageError("describe writes json only")
        _emit(dumps(cmd_describe(cfg)), cfg.out)
        return EXIT_OK
    if args.command == "entry":
        if args.m is None or args.n is None:
            raise UsageError("entry needs --m and --n")
        body = cmd_entry(cfg, args.m, args.n)
        if cfg.fmt == "csv":
            rows = [{"m": body["m"], "n": body["n"], "h_exp": body["h_exp"],
                     "row": i + 1, "col": j + 1, "value": body["text"][i][j]}
                    for i in range(2) for j in range(2)]
            _emit(_csv_text(rows, ["m", "n", "h_exp", "row", "col", "value"]), cfg.out)
        else:
            _emit(dumps(body), cfg.out)
        return EXIT_OK
    if args.command == "expand":
        if cfg.fmt != "json":
            raise UsageError("expand writes json only")
        _emit(dumps(cmd_expand(cfg)), cfg.out)
        return EXIT_OK
    if args.command == "verify":
        suites = [s.strip() for s in args.suites.split(",") if s.strip()]
        unknown = sorted(set(suites) - set(SUITES))
        if unknown:
            raise UsageError(f"unknown suites {unknown}")
        body, code = cmd_verify(cfg, suites, args.corrupt)
        if cfg.fmt == "csv":
            cols = ["name", "region", "passed", "advisory", "checked", "failure", "note"]
            rows = [{c: r.get(c) for c in cols} for r in body["reports"]]
            _emit(_csv_text(rows, cols), cfg.out)
        else:
            _emit(dumps(body), cfg.out)
        return code
    entries = _parse_entries(args.entries, cfg.potential)
    rows = cmd_sweep(cfg, args.w_grid, args.h_grid, entries, args.lam0, args.phase, args.jobs)
    if cfg.fmt == "csv":
        _emit(_csv_text(rows, numerics.sweep_columns(entries)), cfg.out)
    else:
        _emit(dumps(rows), cfg.out)
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    try:
        return run(args)
    except (ParseError, UsageError, WindowTooSmall, InvalidResidueIndex) as exc:
        print(f"alres: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (BoundarySurface, SingularTransition, NearSingularEvaluation, PoleAtOrigin,
            SingularMatrix, ZeroDivide, ZeroDivisionError) as exc:
        print(f"alres: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SINGULAR
    except ValueError as exc:
        print(f"alres: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
