"""Command-line entry point: ``hypercount count | ws-class | verify-counterexample``."""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .counting import METHODS, CountRecord, count, records_to_csv
from .errors import (
    BudgetExceeded,
    CheckpointError,
    HypercountError,
    InvariantViolation,
    TooFewPoints,
)
from .ffield import is_prime_power
from .motive import predicted_count, ws_class, ws_T, ws_y
from .rationalfit import divisibility_audit, reduced_fit

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3
EXIT_INVARIANT = 4
EXIT_CHECKPOINT = 5

DEFAULT_VERIFY_QS = (2, 3, 4, 5, 7, 8, 9, 11, 13, 16, 17, 19)


class UsageError(Exception):
    pass


def _q_list(text: str) -> list[int]:
    try:
        qs = [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad q list {text!r}") from None
    if not qs:
        raise argparse.ArgumentTypeError("q list is empty")
    bad = [q for q in qs if not is_prime_power(q)]
    if bad:
        raise argparse.ArgumentTypeError(f"not prime powers: {bad}")
    return qs


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad integer list {text!r}") from None


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="hypercount", description="Point counts of graph hypersurfaces over finite fields.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    c = sub.add_parser("count", help="count F_q-points of a graph hypersurface or matrix determinant")
    c.add_argument("--graph", default="xstrip", help="xstrip | ws:<m> | file:<path>")
    c.add_argument("--q", type=_q_list, required=True, help="comma-separated prime powers")
    c.add_argument("--method", choices=METHODS, default="brute")
    c.add_argument("--workers", type=_positive, default=1)
    c.add_argument("--checkpoint", help="checkpoint file (stratified methods); one file per q, suffixed when several q")
    c.add_argument("--format", choices=("json", "csv", "text"), default="json")
    c.add_argument("--override-budget", action="store_true", help="allow brute force beyond 10^8 tuples")
    c.add_argument("--output", help="write records here instead of stdout")

    w = sub.add_parser("ws-class", help="print the class of the wheel-with-spokes hypersurface")
    w.add_argument("n", type=_int_list, help="comma-separated wheel sizes, each >= 3")
    w.add_argument("--tables", action="store_true", help="also print T(n-1) and the y, y' tables")
    w.add_argument("--format", choices=("text", "json"), default="text")

    v = sub.add_parser("verify-counterexample", help="run the reduced-form polynomiality test")
    v.add_argument("--q", type=_q_list, default=list(DEFAULT_VERIFY_QS))
    v.add_argument("--source", choices=("computed", "predicted"), default="predicted")
    v.add_argument("--method", choices=METHODS, default="stratified-accelerated",
                   help="counting method for --source computed")
    v.add_argument("--workers", type=_positive, default=1)
    v.add_argument("--override-budget", action="store_true")
    return ap


# -- subcommands -------------------------------------------------------------------

def _checkpoint_for(base: str | None, q: int, many: bool) -> str | None:
    if base is None or not many:
        return base
    p = Path(base)
    return str(p.with_name(f"{p.stem}.q{q}{p.suffix}"))


def _text(r: CountRecord) -> str:
    extra = f" N_Y={r.n_y} N_Z={r.n_z}" if r.n_y is not None else ""
    return f"{r.graph} q={r.q} method={r.method} count={r.count}{extra} ({r.elapsed_seconds:.2f}s)"


def cmd_count(args: argparse.Namespace, out) -> int:
    records = []
    many = len(args.q) > 1
    for q in args.q:
        rec = count(
            args.graph, q, method=args.method, workers=args.workers,
            checkpoint=_checkpoint_for(args.checkpoint, q, many), override=args.override_budget,
        )
        records.append(rec)
        if args.format == "json":
            print(rec.dumps(), file=out, flush=True)
        elif args.format == "text":
            print(_text(rec), file=out, flush=True)
    if args.format == "csv":
        out.write(records_to_csv(records))
    return EXIT_OK


def cmd_ws_class(args: argparse.Namespace, out) -> int:
    bad = [n for n in args.n if n < 3]
    if bad:
        raise UsageError(f"wheel sizes must be >= 3, got {bad}")
    for n in args.n:
        cls = ws_class(n)
        if args.format == "json":
            row = {"n": n, "class": list(cls.coeffs)}
            if args.tables:
                row["T"] = list(ws_T(n - 1).coeffs)
                row["y"] = [[list(a.coeffs), list(b.coeffs)] for a, b in map(ws_y, range(1, n))]
            print(json.dumps(row), file=out)
            continue
        print(f"[X{n}] = {cls}", file=out)
        if args.tables:
            print(f"  T{n - 1} = {ws_T(n - 1)}", file=out)
            for i in range(1, n):
                y, yp = ws_y(i)
                print(f"  y{i} = {y}    y'{i} = {yp}", file=out)
    return EXIT_OK


def cmd_verify(args: argparse.Namespace, out) -> int:
    qs = list(args.q)
    if args.source == "predicted":
        values = {q: predicted_count(q) for q in qs}
        provenance = {q: "predicted" for q in qs}
        report = reduced_fit(list(values.items()), provenance=provenance)
        audit = divisibility_audit(values)
        ok = report.verdict == "non-polynomial-witness" and all(r.passed for r in audit)
    else:
        values, provenance = {}, {}
        for q in qs:
            rec = count("xstrip", q, method=args.method, workers=args.workers, override=args.override_budget)
            values[q] = rec.count
            provenance[q] = f"computed:{rec.method}"
        audit = divisibility_audit(values)
        report = None
        if len(qs) > 11:
            report = reduced_fit(list(values.items()), provenance=provenance)
        ok = all(values[q] == predicted_count(q) for q in qs) and all(r.passed for r in audit)
    payload = {
        "source": args.source,
        "values": [{"q": q, "count": str(values[q]), "predicted": str(predicted_count(q)), "source": provenance[q]} for q in qs],
        "divisibility": [{"q": r.q, "pass": r.passed} for r in audit],
        "fit": report.to_json() if report is not None else None,
        "ok": ok,
    }
    print(json.dumps(payload, sort_keys=True), file=out)
    return EXIT_OK if ok else EXIT_FAIL


def main(argv: Sequence[str] | None = None, out=None) -> int:
    out = out if out is not None else sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"count": cmd_count, "ws-class": cmd_ws_class, "verify-counterexample": cmd_verify}[args.command]
    try:
        return handler(args, out)
    except (UsageError, TooFewPoints, ValueError) as exc:
        print(f"hypercount: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"hypercount: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except InvariantViolation as exc:
        print(f"hypercount: invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except CheckpointError as exc:
        print(f"hypercount: checkpoint error: {exc}", file=sys.stderr)
        return EXIT_CHECKPOINT
    except HypercountError as exc:
        print(f"hypercount: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
