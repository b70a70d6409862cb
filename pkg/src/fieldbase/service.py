"""Group summaries, HTTP parameter parsing, and the web application.

FastAPI is imported inside create_app so library users and the CLI query
paths never pay for it.  Every query parameter arrives as a raw string and
is parsed by hand: malformed input is answered with a 400 and a reason, not
a framework validation dump.

No `from __future__ import annotations` here: the route handlers annotate
their parameter with the locally imported Request class, and stringified
annotations would make the framework misread it as a query field.
"""

import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .localdata import grd_from_contents, parse_slope_content
from .mass import LocalMassTable, MissingMassError, predict_count
from .model import (
    FieldRecord,
    GroupId,
    PrimePowerProduct,
    format_class_group,
    format_discriminant,
)
from .query import (
    CLASS_DISPLAYS,
    SORT_KEYS,
    RamCondition,
    SearchRequest,
    SearchResult,
    execute_search,
)
from .store import FieldStore

__all__ = [
    "FamilyCount",
    "GrdCount",
    "GroupSummary",
    "ParamError",
    "summarize_group",
    "parse_fields_params",
    "parse_ram_param",
    "parse_grd_args",
    "parse_mass_params",
    "open_store",
    "create_app",
    "DB_ENV_VAR",
]

DB_ENV_VAR = "FIELDBASE_DB"


class ParamError(ValueError):
    """Malformed request parameter; maps to HTTP 400."""


@dataclass(frozen=True)
class FamilyCount:
    primes: tuple[int, ...]
    count: int
    provable: bool  # a ledger C row certifies the family complete


@dataclass(frozen=True)
class GrdCount:
    cut: Fraction
    count: int
    provable: bool  # a ledger D row reaches the cut


@dataclass(frozen=True)
class GroupSummary:
    group: GroupId
    total_records: int
    min_rd: PrimePowerProduct | None
    min_grd: PrimePowerProduct | None
    families: tuple[FamilyCount, ...]
    grd_below: GrdCount | None


def summarize_group(
    store: FieldStore,
    group: GroupId,
    families: Sequence[Iterable[int]] = (),
    grd_cut: Fraction | None = None,
) -> GroupSummary:
    records = [r for r in store.iter_fields() if r.group == group]
    min_rd = min_grd = None
    for r in records:
        rd = r.rd()
        if min_rd is None or rd.compare(min_rd) < 0:
            min_rd = rd
        if r.grd is not None and (min_grd is None or r.grd.compare(min_grd) < 0):
            min_grd = r.grd

    c_rows = store.completeness_rows(kind="C", n=group.degree)
    bit = 1 << (group.t_number - 1)
    family_counts = []
    for family in families:
        primes = tuple(sorted(set(int(p) for p in family)))
        count = sum(1 for r in records if set(r.ramified_primes) <= set(primes))
        provable = any(
            set(primes) <= set(row.primes) and row.group_set & bit for row in c_rows
        )
        family_counts.append(FamilyCount(primes, count, provable))

    grd_below = None
    if grd_cut is not None:
        count = sum(
            1
            for r in records
            if r.grd is not None and r.grd.compare_fraction(grd_cut) <= 0
        )
        provable = any(
            row.group == group and row.grd_bound >= grd_cut
            for row in store.completeness_rows(kind="D", n=group.degree)
        )
        grd_below = GrdCount(grd_cut, count, provable)

    return GroupSummary(
        group=group,
        total_records=len(records),
        min_rd=min_rd,
        min_grd=min_grd,
        families=tuple(family_counts),
        grd_below=grd_below,
    )


# -- parameter parsing ---------------------------------------------------------


def _int_param(text: str, name: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise ParamError(f"{name} must be an integer, got {text!r}") from None


def _fraction_param(text: str, name: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParamError(f"{name} must be a number, got {text!r}") from None


def _span(text: str, name: str) -> tuple[int, int | None]:
    """ "3" -> (3, 3); "3-5" -> (3, 5); "1-" -> (1, None)."""
    lo, sep, hi = text.partition("-")
    low = _int_param(lo, name)
    if not sep:
        return low, low
    return low, (None if hi == "" else _int_param(hi, name))


def parse_ram_param(text: str) -> RamCondition:
    """Parse "229:1-1", "3-5:1-2:z", "2:4", "7:1-" forms."""
    parts = text.split(":")
    if len(parts) == 3 and parts[2] == "z":
        zero = True
        parts = parts[:2]
    elif len(parts) <= 2:
        zero = False
    else:
        raise ParamError(f"bad ram constraint {text!r}")
    if len(parts) != 2 or not parts[0] or not parts[1]:
        raise ParamError(f"bad ram constraint {text!r} (want p:emin-emax[:z])")
    p_lo, p_hi = _span(parts[0], "ram prime")
    e_lo, e_hi = _span(parts[1], "ram exponent")
    try:
        return RamCondition(
            p_lo=p_lo,
            p_hi=None if p_hi == p_lo else p_hi,
            e_lo=e_lo,
            e_hi=e_hi,
            may_be_zero=zero,
        )
    except ValueError as exc:
        raise ParamError(str(exc)) from None


def parse_fields_params(params) -> SearchRequest:
    """Build a SearchRequest from a multi-dict of query parameters.

    params needs .get(name) and .getlist(name), as in
    starlette's QueryParams; raises ParamError with the offending name."""
    known = {
        "degree", "degree_min", "degree_max", "group", "s",
        "absdisc_min", "absdisc_max", "rd_max", "grd_min", "grd_max",
        "ram", "only_listed", "max_prime", "sort", "display",
        "limit", "offset",
    }
    for name in params:
        if name not in known:
            raise ParamError(f"unknown parameter {name!r}")

    kw = {}
    degree_list = [_int_param(v, "degree") for v in params.getlist("degree")]
    degree_min = params.get("degree_min")
    degree_max = params.get("degree_max")
    if degree_list:
        kw["degrees"] = frozenset(degree_list)
    elif degree_max is not None:
        hi = _int_param(degree_max, "degree_max")
        lo = _int_param(degree_min, "degree_min") if degree_min is not None else 1
        kw["degrees"] = frozenset(range(lo, hi + 1))
    elif degree_min is not None:
        kw["degree_min"] = _int_param(degree_min, "degree_min")

    group_list = params.getlist("group")
    if group_list:
        try:
            kw["groups"] = frozenset(GroupId.parse(g) for g in group_list)
        except ValueError as exc:
            raise ParamError(str(exc)) from None
    s_list = params.getlist("s")
    if s_list:
        kw["s_values"] = frozenset(_int_param(v, "s") for v in s_list)

    for name in ("absdisc_min", "absdisc_max", "max_prime"):
        value = params.get(name)
        if value is not None:
            key = "max_ramified_prime" if name == "max_prime" else name
            kw[key] = _int_param(value, name)
    for name in ("rd_max", "grd_min", "grd_max"):
        value = params.get(name)
        if value is not None:
            kw[name] = _fraction_param(value, name)

    ram_list = params.getlist("ram")
    if ram_list:
        kw["ram_constraints"] = tuple(parse_ram_param(v) for v in ram_list)
    only = params.get("only_listed")
    if only is not None:
        if only not in ("0", "1"):
            raise ParamError("only_listed must be 0 or 1")
        kw["only_listed"] = only == "1"

    sort = params.get("sort")
    if sort is not None:
        if sort not in SORT_KEYS:
            raise ParamError(f"sort must be one of {', '.join(SORT_KEYS)}")
        kw["sort_key"] = sort
    display = params.get("display")
    if display is not None:
        if display not in CLASS_DISPLAYS:
            raise ParamError(f"display must be one of {', '.join(CLASS_DISPLAYS)}")
        kw["class_display"] = display
    for name in ("limit", "offset"):
        value = params.get(name)
        if value is not None:
            kw[name] = _int_param(value, name)

    try:
        return SearchRequest(**kw)
    except ValueError as exc:
        raise ParamError(str(exc)) from None


# -- response shaping ----------------------------------------------------------


def class_column(record: FieldRecord, display: str) -> str | None:
    """The h column under the class/narrow toggle; None marks missing data."""
    if display == "narrow":
        if record.narrow_class_group is None:
            return None
        return format_class_group(record.narrow_class_group)
    return format_class_group(record.class_group)


def row_payload(record: FieldRecord, display: str) -> dict:
    rd = record.rd()
    return {
        "id": record.id,
        "degree": record.degree,
        "rd": {"exact": rd.text(), "decimal": rd.decimal2()},
        "grd": (
            None
            if record.grd is None
            else {"exact": record.grd.text(), "decimal": record.grd.decimal2()}
        ),
        "disc": format_discriminant(record.disc),
        "absdisc": str(record.absdisc),
        "h": class_column(record, display),
        "group": record.group.label,
        "t_name": str(record.group),
        "s": record.s,
        "poly": record.poly_text(),
        "coefficients": list(record.polynomial),
        "ramified_primes": list(record.ramified_primes),
    }


def search_payload(result: SearchResult, display: str) -> dict:
    return {
        "complete": result.complete,
        "trace": result.completeness_trace,
        "total": result.total,
        "rows": [row_payload(r, display) for r in result.rows],
    }


def summary_payload(summary: GroupSummary) -> dict:
    def product(value):
        return None if value is None else {
            "exact": value.text(), "decimal": value.decimal2()
        }

    payload = {
        "group": str(summary.group),
        "label": summary.group.label,
        "total_records": summary.total_records,
        "min_rd": product(summary.min_rd),
        "min_grd": product(summary.min_grd),
        "families": [
            {
                "primes": list(f.primes),
                "count": f.count,
                "provable": f.provable,
            }
            for f in summary.families
        ],
    }
    if summary.grd_below is not None:
        payload["grd_below"] = {
            "cut": str(summary.grd_below.cut),
            "count": summary.grd_below.count,
            "provable": summary.grd_below.provable,
        }
    return payload


def parse_grd_args(args: Sequence[str]) -> PrimePowerProduct:
    """Each argument is p:content, e.g. "2:[20/7,20/7,20/7]_7^3"."""
    contents = {}
    for arg in args:
        p_text, sep, body = arg.partition(":")
        if not sep or not p_text.isdigit():
            raise ParamError(f"bad content {arg!r} (want p:[slopes]_t^u)")
        p = int(p_text)
        if p in contents:
            raise ParamError(f"prime {p} given twice")
        try:
            contents[p] = parse_slope_content(body, p)
        except ValueError as exc:
            raise ParamError(str(exc)) from None
    if not contents:
        raise ParamError("no slope contents given")
    return grd_from_contents(contents)


def parse_mass_params(n_text: str, s_text: str | None, p_args: Sequence[str]):
    """(n, s, {p: c or None}) from raw strings; p_args entries are "p" or "p:c"."""
    n = _int_param(n_text, "n")
    s = None if s_text is None else _int_param(s_text, "s")
    exponents: dict[int, int | None] = {}
    for arg in p_args:
        p_text, sep, c_text = arg.partition(":")
        p = _int_param(p_text, "p")
        if p in exponents:
            raise ParamError(f"prime {p} given twice")
        exponents[p] = _int_param(c_text, "c") if sep else None
    return n, s, exponents


# -- the application -----------------------------------------------------------


def open_store(path: str | None = None, *, read_only: bool = False) -> FieldStore:
    """Open the store named by argument or environment, in-memory if neither."""
    path = path or os.environ.get(DB_ENV_VAR)
    return FieldStore(path, read_only=read_only) if path else FieldStore()


def create_app(
    store: FieldStore | None = None,
    *,
    db_path: str | None = None,
    ui_dir: str | None = None,
):
    from fastapi import FastAPI, Request
    from fastapi.responses import JSONResponse, PlainTextResponse

    if store is None:
        store = open_store(db_path)
    app = FastAPI(title="fieldbase", docs_url=None, redoc_url=None)

    @app.exception_handler(ParamError)
    async def _param_error(request: Request, exc: ParamError):
        return JSONResponse({"error": str(exc)}, status_code=400)

    @app.get("/api/health")
    def health():
        return {
            "status": "ok",
            "fields": store.count_fields(),
            "grh_conditional": store.grh_conditional,
        }

    @app.get("/api/fields")
    def fields(request: Request):
        req = parse_fields_params(request.query_params)
        payload = search_payload(execute_search(store, req), req.class_display)
        if store.grh_conditional:
            payload["grh_conditional"] = True
        return payload

    @app.get("/api/fields.txt")
    def fields_text(request: Request):
        req = parse_fields_params(request.query_params)
        result = execute_search(store, req)
        lines = [r.poly_text() for r in result.rows]
        return PlainTextResponse("\n".join(lines) + ("\n" if lines else ""))

    @app.get("/api/summary")
    def summary(request: Request):
        params = request.query_params
        group_text = params.get("group")
        if group_text is None:
            raise ParamError("group is required")
        try:
            group = GroupId.parse(group_text)
        except ValueError as exc:
            raise ParamError(str(exc)) from None
        families = []
        for text in params.getlist("family"):
            try:
                families.append([int(p) for p in text.split(",") if p])
            except ValueError:
                raise ParamError(f"bad family {text!r}") from None
        cut_text = params.get("grd_cut")
        cut = None if cut_text is None else _fraction_param(cut_text, "grd_cut")
        return summary_payload(summarize_group(store, group, families, cut))

    @app.get("/api/mass")
    def mass(request: Request):
        params = request.query_params
        n_text = params.get("n")
        if n_text is None:
            raise ParamError("n is required")
        n, s, exponents = parse_mass_params(
            n_text, params.get("s"), params.getlist("p")
        )
        try:
            prediction = predict_count(n, s, exponents, store.mass_table())
        except MissingMassError as exc:
            raise ParamError(str(exc)) from None
        except ValueError as exc:
            raise ParamError(str(exc)) from None
        return {
            "value": str(prediction.value),
            "decimal": prediction.decimal(),
            "applicable": prediction.applicable,
        }

    @app.get("/api/grd")
    def grd(request: Request):
        args = request.query_params.getlist("content")
        product = parse_grd_args(args)
        return {
            "exact": product.text(),
            "decimal": product.decimal2(),
            "terms": [{"p": p, "exponent": str(e)} for p, e in product.terms],
        }

    if ui_dir is not None:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=ui_dir, html=True), name="ui")

    return app
