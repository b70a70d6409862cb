"""Command line front end.

Subcommands mirror the library operations: ingest, query, mass, grd,
summary, audit, report, serve.  The database path comes from --db or the
FIELDBASE_DB environment variable; commands that only read fail cleanly
when it is missing instead of creating an empty one.
"""

from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

from .ingest import ingest_lines, ingest_text_table, load_seed
from .mass import tame_mass, predict_count, MissingMassError
from .model import GroupId, format_discriminant
from .query import SearchRequest, execute_search
from .service import (
    DB_ENV_VAR,
    ParamError,
    class_column,
    open_store,
    parse_fields_params,
    parse_grd_args,
    parse_mass_params,
    summarize_group,
)
from .store import FieldStore

COMPLETE_BANNER = "Proven complete: every field matching this search is listed."
INCOMPLETE_BANNER = "Completeness not proven"
MISSING_MARK = "n/a"


class _ArgParams:
    """Adapter so CLI flags run through the same parser as HTTP params."""

    def __init__(self, pairs: dict[str, list[str]]):
        self._pairs = {k: v for k, v in pairs.items() if v}

    def get(self, name):
        values = self._pairs.get(name)
        return values[-1] if values else None

    def getlist(self, name):
        return self._pairs.get(name, [])

    def __iter__(self):
        return iter(self._pairs)


def _query_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--degree", action="append", default=[])
    sub.add_argument("--degree-min")
    sub.add_argument("--degree-max")
    sub.add_argument("--group", action="append", default=[])
    sub.add_argument("--s", action="append", default=[])
    sub.add_argument("--absdisc-min")
    sub.add_argument("--absdisc-max")
    sub.add_argument("--rd-max")
    sub.add_argument("--grd-min")
    sub.add_argument("--grd-max")
    sub.add_argument("--ram", action="append", default=[],
                     help="p:emin-emax[:z] or pmin-pmax:emin-emax[:z]")
    sub.add_argument("--only-listed", action="store_true",
                     help="no ramification outside the --ram primes")
    sub.add_argument("--max-prime")
    sub.add_argument("--sort", choices=("rd", "grd", "absdisc"))
    sub.add_argument("--display", choices=("class", "narrow"))
    sub.add_argument("--limit")
    sub.add_argument("--offset")


def _request_from_args(args) -> SearchRequest:
    pairs = {
        "degree": args.degree,
        "group": args.group,
        "s": args.s,
        "ram": args.ram,
    }
    for name in ("degree_min", "degree_max", "absdisc_min", "absdisc_max",
                 "rd_max", "grd_min", "grd_max", "max_prime", "sort",
                 "display", "limit", "offset"):
        value = getattr(args, name)
        if value is not None:
            pairs[name] = [value]
    if args.only_listed:
        pairs["only_listed"] = ["1"]
    return parse_fields_params(_ArgParams(pairs))


def _open_existing(path: str | None) -> FieldStore:
    path = path or os.environ.get(DB_ENV_VAR)
    if not path:
        raise SystemExit("no database: pass --db or set " + DB_ENV_VAR)
    if not os.path.exists(path):
        raise SystemExit(f"no database at {path}")
    return FieldStore(path, read_only=True)


def _result_lines(result, display: str) -> list[str]:
    lines = []
    if result.complete:
        lines.append(COMPLETE_BANNER)
    else:
        lines.append(f"{INCOMPLETE_BANNER}: {result.completeness_trace}")
    lines.append("rd | grd | D | h | G | polynomial")
    for r in result.rows:
        grd = r.grd.decimal2() if r.grd is not None else MISSING_MARK
        h = class_column(r, display)
        lines.append(" | ".join([
            r.rd().decimal2(),
            grd,
            format_discriminant(r.disc),
            h if h is not None else MISSING_MARK,
            r.group.label,
            r.poly_text(),
        ]))
    if len(result.rows) != result.total:
        lines.append(f"showing {len(result.rows)} of {result.total}")
    return lines


def _cmd_ingest(args) -> int:
    path = args.db or os.environ.get(DB_ENV_VAR)
    store = FieldStore(path) if path else FieldStore()
    if not path:
        print("warning: no --db given, loading into a throwaway store",
              file=sys.stderr)
    with store:
        if args.seed:
            report = load_seed(store)
        elif args.file is None:
            raise SystemExit("ingest needs a file or --seed")
        else:
            with open(args.file, encoding="utf-8") as handle:
                if args.kind == "records":
                    report = ingest_lines(store, handle)
                else:
                    report = ingest_text_table(store, handle, args.kind)
    print(f"accepted {report.accepted}")
    for lineno, reason in report.rejected:
        print(f"line {lineno}: {reason}", file=sys.stderr)
    return 1 if report.rejected else 0


def _cmd_query(args) -> int:
    request = _request_from_args(args)
    with _open_existing(args.db) as store:
        result = execute_search(store, request)
        if store.grh_conditional:
            print("class numbers are conditional on GRH", file=sys.stderr)
    for line in _result_lines(result, request.class_display):
        print(line)
    return 0


def _cmd_mass(args) -> int:
    n, s, exponents = parse_mass_params(args.n, args.s, args.p or [])
    if args.tame_prime is not None:
        p = int(args.tame_prime)
        row = [tame_mass(n, p, c) for c in range(n)]
        total = sum(row)
        print(" ".join(str(m) for m in row) + f" | total {total}")
        return 0
    path = args.db or os.environ.get(DB_ENV_VAR)
    store = FieldStore(path, read_only=True) if path and os.path.exists(path) \
        else FieldStore()
    with store:
        table = store.mass_table()
        prediction = predict_count(n, s, exponents, table)
    note = "" if prediction.applicable else \
        "  (square-discriminant cell: heuristic not expected to apply)"
    print(f"{prediction.value} ~= {prediction.decimal()}{note}")
    return 0


def _cmd_grd(args) -> int:
    product = parse_grd_args(args.content)
    print(f"{product.text()} ~= {product.decimal2()}")
    return 0


def _cmd_summary(args) -> int:
    group = GroupId.parse(args.group)
    families = [[int(p) for p in f.split(",") if p] for f in args.family or []]
    cut = Fraction(args.grd_cut) if args.grd_cut is not None else None
    with _open_existing(args.db) as store:
        summary = summarize_group(store, group, families, cut)
    print(f"group {summary.group} ({summary.group.label})")
    print(f"records {summary.total_records}")
    if summary.min_rd is not None:
        print(f"min rd {summary.min_rd.text()} ~= {summary.min_rd.decimal2()}")
    if summary.min_grd is not None:
        print(f"min grd {summary.min_grd.text()} ~= {summary.min_grd.decimal2()}")
    for fam in summary.families:
        mark = "proven complete" if fam.provable else "not proven complete"
        primes = ",".join(str(p) for p in fam.primes)
        print(f"family {{{primes}}}: {fam.count} ({mark})")
    if summary.grd_below is not None:
        mark = "proven complete" if summary.grd_below.provable \
            else "not proven complete"
        print(f"grd <= {summary.grd_below.cut}: {summary.grd_below.count} ({mark})")
    return 0


def _cmd_audit(args) -> int:
    with _open_existing(args.db) as store:
        problems = store.audit()
    for problem in problems:
        print(problem)
    if problems:
        return 1
    print("audit clean")
    return 0


def _cmd_report(args) -> int:
    from .report import write_report

    request = _request_from_args(args)
    with _open_existing(args.db) as store:
        result = execute_search(store, request)
    paths = write_report(result, request, args.out)
    for path in paths:
        print(path)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(db_path=args.db, ui_dir=args.ui)
    uvicorn.run(app, host=args.host, port=int(args.port))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fieldbase",
        description="Searchable number field tables with provable completeness",
    )
    parser.add_argument("--db", help=f"database path (default ${DB_ENV_VAR})")
    commands = parser.add_subparsers(dest="command", required=True)

    ingest = commands.add_parser("ingest", help="load a JSON-lines file")
    ingest.add_argument("file", nargs="?")
    ingest.add_argument("--seed", action="store_true",
                        help="load the bundled sample dataset")
    ingest.add_argument("--kind", choices=("records", "alpha", "wildmass"),
                        default="records")
    ingest.set_defaults(func=_cmd_ingest)

    query = commands.add_parser("query", help="search the field table")
    _query_flags(query)
    query.set_defaults(func=_cmd_query)

    mass = commands.add_parser("mass", help="local masses and predicted counts")
    mass.add_argument("--n", required=True)
    mass.add_argument("--s")
    mass.add_argument("--p", action="append", help="p or p:c, repeatable")
    mass.add_argument("--tame-prime",
                      help="print the tame mass row for this prime")
    mass.set_defaults(func=_cmd_mass)

    grd = commands.add_parser(
        "grd", help="Galois root discriminant from slope contents")
    grd.add_argument("content", nargs="+", help="p:[slopes]_t^u")
    grd.set_defaults(func=_cmd_grd)

    summary = commands.add_parser("summary", help="per-group statistics")
    summary.add_argument("--group", required=True)
    summary.add_argument("--family", action="append",
                         help="comma-separated prime set, repeatable")
    summary.add_argument("--grd-cut")
    summary.set_defaults(func=_cmd_summary)

    audit = commands.add_parser("audit", help="cross-check the store indexes")
    audit.set_defaults(func=_cmd_audit)

    report = commands.add_parser(
        "report", help="query results as TSV plus figures")
    report.add_argument("--out", required=True, help="output directory")
    _query_flags(report)
    report.set_defaults(func=_cmd_report)

    serve = commands.add_parser("serve", help="run the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", default="8080")
    serve.add_argument("--ui", help="directory with the built web UI")
    serve.set_defaults(func=_cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ParamError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MissingMassError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
