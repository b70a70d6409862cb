"""Shared builders for test data.

quartic_records() is the six-row sample set used across the suite; tests
that need a populated store insert it via the table1_store fixture.
"""

from __future__ import annotations

from fractions import Fraction

import pytest

from fieldbase.completeness import CompletenessRecord
from fieldbase.groups import group_count
from fieldbase.localdata import parse_slope_content
from fieldbase.model import (
    ClassGroupStructure,
    FactoredInteger,
    FieldRecord,
    GroupId,
    PrimePowerProduct,
    SignedDiscriminant,
)
from fieldbase.store import FieldStore


def make_record(
    degree,
    poly,
    group,
    s,
    disc,
    h=(),
    narrow=(),
    local=None,
    grd=None,
):
    return FieldRecord(
        degree=degree,
        polynomial=tuple(poly),
        group=GroupId.parse(group) if isinstance(group, str) else group,
        disc=SignedDiscriminant(s, FactoredInteger.from_factors(dict(disc))),
        class_group=ClassGroupStructure(tuple(h)),
        narrow_class_group=(
            None if narrow is None else ClassGroupStructure(tuple(narrow))
        ),
        local_data={p: parse_slope_content(t, p) for p, t in (local or {}).items()},
        grd=None if grd is None else PrimePowerProduct.parse(grd),
    )


def quartic_records() -> list[FieldRecord]:
    """Six quartic fields, ascending root discriminant. Fresh objects on
    every call; insert_field stamps ids onto them."""
    return [
        make_record(
            4, [1, -1, -1, 1, 1], "4T3", 2, {3: 2, 13: 1},
            local={3: "[]_2", 13: "[]_2"}, grd="3^{1/2} 13^{1/2}",
        ),
        make_record(
            4, [1, -1, 1, -1, 1], "4T1", 2, {5: 3},
            local={5: "[]_4"}, grd="5^{3/4}",
        ),
        make_record(
            4, [1, 0, -1, 0, 1], "4T2", 2, {2: 4, 3: 2},
            local={2: "[2]", 3: "[]_2"}, grd="2^1 3^{1/2}",
        ),
        make_record(
            4, [1, -1, 0, 2, 1], "4T3", 2, {3: 3, 7: 1},
            local={3: "[]_4", 7: "[]_2"}, grd="3^{3/4} 7^{1/2}",
        ),
        make_record(
            4, [1, -1, 2, 1, 1], "4T2", 2, {3: 2, 5: 2},
            local={3: "[]_2", 5: "[]_2"}, grd="3^{1/2} 5^{1/2}",
        ),
        make_record(
            4, [1, 0, 0, -1, 1], "4T5", 2, {229: 1},
            local={229: "[]_2"}, grd="229^{1/2}",
        ),
    ]


def seed_ledger(store: FieldStore) -> None:
    """Ledger rows and alpha values matching the sample set's coverage."""
    for s in (0, 1, 2):
        store.add_completeness(CompletenessRecord(kind="A", n=4, s=s, bound=250))
    store.add_completeness(
        CompletenessRecord(
            kind="C", n=5, primes=(2, 3, 5, 7), group_set=0b11111
        )
    )
    store.add_completeness(
        CompletenessRecord(kind="D", n=9, group=GroupId(9, 17), grd_bound=Fraction(200))
    )
    for label in ("1T1", "2T1", "3T1", "4T1", "4T2", "5T1"):
        store.set_alpha(GroupId.parse(label), Fraction(1))


@pytest.fixture
def table1_store():
    with FieldStore(None) as store:
        for rec in quartic_records():
            store.insert_field(rec)
        seed_ledger(store)
        yield store


# -- independent request oracle ---------------------------------------------
# Deliberately avoids the query module's own evaluation helpers: primality
# comes from sympy, comparisons are re-derived cross powers.

import sympy


def _grd_cmp_fraction(grd, q: Fraction) -> int:
    from math import lcm, prod

    L = 1
    for _, e in grd.terms:
        L = lcm(L, e.denominator)
    lhs = prod(int(p) ** int(e * L) for p, e in grd.terms) * q.denominator**L
    rhs = q.numerator**L
    return (lhs > rhs) - (lhs < rhs)


def oracle_matches(rec, req) -> bool:
    if req.degrees is not None:
        if rec.degree not in req.degrees:
            return False
    elif req.degree_min is not None and rec.degree < req.degree_min:
        return False
    if req.groups is not None and rec.group not in req.groups:
        return False
    if req.s_values is not None and rec.s not in req.s_values:
        return False
    d = rec.absdisc
    if req.absdisc_min is not None and d < req.absdisc_min:
        return False
    if req.absdisc_max is not None and d > req.absdisc_max:
        return False
    if req.rd_max is not None:
        b = req.rd_max
        if d * b.denominator**rec.degree > b.numerator**rec.degree:
            return False
    if req.grd_min is not None or req.grd_max is not None:
        if rec.grd is None:
            return False
        if req.grd_min is not None and _grd_cmp_fraction(rec.grd, req.grd_min) < 0:
            return False
        if req.grd_max is not None and _grd_cmp_fraction(rec.grd, req.grd_max) > 0:
            return False
    exponents = dict(rec.disc.absdisc.factors)
    for c in req.ram_constraints:
        hi = c.p_hi if c.p_hi is not None else c.p_lo
        for p in sympy.primerange(c.p_lo, hi + 1):
            e = exponents.get(p, 0)
            if e == 0:
                if not c.may_be_zero:
                    return False
            elif e < c.e_lo or (c.e_hi is not None and e > c.e_hi):
                return False
    if req.only_listed:
        allowed = set()
        for c in req.ram_constraints:
            hi = c.p_hi if c.p_hi is not None else c.p_lo
            allowed.update(sympy.primerange(c.p_lo, hi + 1))
        if not set(exponents) <= allowed:
            return False
    if req.max_ramified_prime is not None:
        if any(p > req.max_ramified_prime for p in exponents):
            return False
    return True


def oracle_sorted(rows, key):
    import functools

    def cmp(a, b):
        if key == "absdisc":
            pa, pb = a.absdisc, b.absdisc
            primary = (pa > pb) - (pa < pb)
        elif key == "rd":
            lhs, rhs = a.absdisc ** b.degree, b.absdisc ** a.degree
            primary = (lhs > rhs) - (lhs < rhs)
        else:
            if a.grd is None and b.grd is None:
                primary = 0
            elif a.grd is None:
                primary = 1  # unknown grd after known
            elif b.grd is None:
                primary = -1
            else:
                # compare via a common-denominator exponent vector
                from math import lcm, prod

                L = 1
                for _, e in list(a.grd.terms) + list(b.grd.terms):
                    L = lcm(L, e.denominator)
                lhs = prod(int(p) ** int(e * L) for p, e in a.grd.terms)
                rhs = prod(int(p) ** int(e * L) for p, e in b.grd.terms)
                primary = (lhs > rhs) - (lhs < rhs)
        if primary:
            return primary
        ka = (a.absdisc, a.degree, a.group.t_number, a.poly_text())
        kb = (b.absdisc, b.degree, b.group.t_number, b.poly_text())
        return (ka > kb) - (ka < kb)

    return sorted(rows, key=functools.cmp_to_key(cmp))


# -- random data for pipeline-vs-oracle runs -----------------------------------

DATASET_PRIMES = [2, 3, 5, 7, 11, 13, 17, 229]


def random_dataset(rng, size: int):
    records = []
    for tag in range(size):
        degree = rng.randint(2, 6)
        poly = [1] + [rng.randint(-5, 5) for _ in range(degree - 1)] + [tag + 1]
        disc = {}
        if rng.random() < 0.9:
            for p in rng.sample(DATASET_PRIMES, rng.randint(1, 3)):
                disc[p] = rng.randint(1, 5)
        s = rng.randint(0, degree // 2)
        t = rng.randint(1, min(2, group_count(degree)))
        rec = make_record(
            degree, poly, GroupId(degree, t), s, disc,
            h=[rng.choice([1, 2, 3])] if rng.random() < 0.5 else (),
            narrow=None,
        )
        if rng.random() < 0.6:
            scale = rng.choice([Fraction(1), Fraction(3, 2), Fraction(2)])
            rec.grd = PrimePowerProduct.of(
                (p, Fraction(e, degree) * scale)
                for p, e in rec.disc.absdisc.factors
            )
        records.append(rec)
    return records


def random_request(rng):
    from fieldbase.query import RamCondition, SearchRequest

    kw = {}
    roll = rng.random()
    if roll < 0.5:
        kw["degrees"] = frozenset(
            rng.sample(range(2, 7), rng.randint(1, 3))
        )
    elif roll < 0.7:
        kw["degree_min"] = rng.randint(2, 5)
    if rng.random() < 0.3:
        degs = sorted(kw.get("degrees") or range(2, 7))
        kw["groups"] = frozenset(
            GroupId(d, t)
            for d in degs
            for t in range(1, min(2, group_count(d)) + 1)
            if rng.random() < 0.5
        ) or None
        if kw["groups"] is None:
            del kw["groups"]
    if rng.random() < 0.3:
        kw["s_values"] = frozenset(rng.sample(range(4), rng.randint(1, 2)))
    if rng.random() < 0.4:
        lo = rng.randint(1, 10**5)
        kw["absdisc_min"] = lo
        kw["absdisc_max"] = lo + rng.randint(0, 10**7)
    elif rng.random() < 0.3:
        kw["absdisc_max"] = rng.randint(1, 10**8)
    if rng.random() < 0.3:
        kw["rd_max"] = Fraction(rng.randint(100, 4000), 100)
    if rng.random() < 0.25:
        kw["grd_max"] = Fraction(rng.randint(100, 6000), 100)
        if rng.random() < 0.4:
            kw["grd_min"] = kw["grd_max"] / rng.randint(2, 5)
    constraints = []
    for _ in range(rng.randint(0, 2)):
        if rng.random() < 0.5:
            p = rng.choice(DATASET_PRIMES + [4, 101])
            hi = None
        else:
            p = rng.randint(2, 20)
            hi = p + rng.randint(0, 12)
        e_lo = rng.randint(1, 3)
        constraints.append(
            RamCondition(
                p_lo=p,
                p_hi=hi,
                e_lo=e_lo,
                e_hi=rng.choice([None, e_lo, e_lo + 2]),
                may_be_zero=rng.random() < 0.5,
            )
        )
    if constraints:
        kw["ram_constraints"] = tuple(constraints)
        if rng.random() < 0.3:
            kw["only_listed"] = True
    if rng.random() < 0.2:
        kw["max_ramified_prime"] = rng.choice([7, 13, 100])
    kw["sort_key"] = rng.choice(["rd", "grd", "absdisc"])
    return SearchRequest(**kw)
