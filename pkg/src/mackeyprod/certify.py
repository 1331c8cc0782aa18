"""Certified symbol reduction.

A certificate is a chain of formal linear combinations of symbols, each step
tagged with the rule that justifies it.  Every step is re-checked by
evaluating both sides in a truncated presentation and asking whether the
difference lies in the relation lattice.

Two strategies are scripted:

DIVISIBILITY, for {a, b} with a in GA and b in a semi-abelian factor:
    {a, b}_{y/x} = {a', j^*b}_{y'/x}       lift a through the trace of y'/y
                 = {a', p b'}_{y'/x}       j^*b = p b' in A(y')
                 = {p a', b'}_{y'/x}       multilinearity
                 = 0                        p a' = 0 in GA

GA_CHAIN, for {a_1, ..., a_n} with all factors GA:
    {a_1, ..., a_n}_{y/x} = j_*{a_1, ..., a_n}_{y/y}              push-forward normalization
                          = {a_1...a_n, 1, ..., 1}_{y/x}        I-move
                          = {Tr(a_1...a_n), 1, ..., 1}_{x/x}    projection formula
The I-move holds modulo the span of {a_1, ..., a_n}_{y/x} - {a_1...a_n, 1, ..., 1}_{y/x},
so those steps are validated against the relations extended by that span.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

from .ffield import FieldDesc, extension, trace
from .groups import (GroupValue, Kind, ValueFunctor, payload_json, pullback, pushforward,
                     solve_multiple, value_group, zero)
from .mackey import (FinitePoint, MackeyError, MackeyPresentation, Symbol, build_presentation,
                     combination_vector)
from .zlinalg import IntMatrix, RowLattice

STEP_CAP = 64
SEMI_ABELIAN = (Kind.GM, Kind.ELLIPTIC, Kind.GENJAC)

Combination = tuple[tuple[int, Symbol], ...]


class Strategy(str, Enum):
    DIVISIBILITY = "DIVISIBILITY"
    GA_CHAIN = "GA_CHAIN"


class StrategyError(MackeyError):
    pass


@dataclass
class Step:
    rule: str
    params: dict
    before: Combination
    after: Combination
    modulo_i_span: bool = False


@dataclass
class Certificate:
    initial: Symbol
    strategy: Strategy
    steps: list[Step] = field(default_factory=list)
    final: Combination = ()
    degree_bound: int = 1
    validated: bool = False
    failures: list[int] = field(default_factory=list)

    @property
    def proves_zero(self) -> bool:
        return not self.final

    def to_json(self) -> dict:
        return {
            "initial": symbol_json(self.initial),
            "strategy": self.strategy.value,
            "degree_bound": self.degree_bound,
            "steps": [{"rule": s.rule, "params": s.params,
                       "before": combination_json(s.before), "after": combination_json(s.after),
                       "modulo_i_span": s.modulo_i_span} for s in self.steps],
            "final": "zero" if not self.final else combination_json(self.final),
            "validated": self.validated,
        }


def symbol_json(s: Symbol) -> dict:
    return {"point": str(s.point), "entries": [payload_json(a) for a in s.entries]}


def combination_json(c: Combination) -> list:
    return [[k, symbol_json(s)] for k, s in c]


def _single(s: Symbol) -> Combination:
    return () if s.is_trivially_zero() else ((1, s),)


# --- strategies -------------------------------------------------------------------

def _trace_lift(a: GroupValue, big: FieldDesc) -> GroupValue:
    """Deterministic a' in GA(big) with Tr_{big/a.point}(a') = a."""
    small = a.point
    if a.is_zero():
        return zero(a.functor, big)
    for c in big.elements():
        t = trace(c, small)
        if not t.is_zero():
            from .ffield import embed
            return GroupValue(a.functor, big, c * embed(a.payload / t, big))
    raise StrategyError("trace is not surjective")  # unreachable for finite fields


def _divisibility(s: Symbol, max_degree: int) -> tuple[list[Step], int]:
    kinds = [fn.kind for fn in s.functors]
    if len(kinds) != 2 or Kind.GA not in kinds or not any(k in SEMI_ABELIAN for k in kinds):
        raise StrategyError("DIVISIBILITY needs one GA factor and one semi-abelian factor "
                            f"(GM, ELL, GENJAC); got {[k.value for k in kinds]}")
    u = kinds.index(Kind.GA)
    v = 1 - u
    fa, fb = s.functors[u], s.functors[v]
    a, b = s.entries[u], s.entries[v]
    x, y = s.point.base, s.point.ext
    p = x.p

    def sym(point, ua, vb):
        ent = [None, None]
        ent[u], ent[v] = ua, vb
        return Symbol(s.functors, FinitePoint(x, point), tuple(ent))

    for m in itertools.count(1):
        if s.point.degree * m > max_degree:
            raise StrategyError(f"no extension of degree <= {max_degree} makes {payload_json(b)} p-divisible")
        big = extension(y, m)
        jb = pullback(fb, big, b)
        b1 = solve_multiple(fb, big, jb, p)
        if b1 is not None:
            break
    a1 = _trace_lift(a, big)
    start = _single(s)
    s1 = sym(big, a1, jb)
    s2 = sym(big, a1, p * b1)
    s3 = sym(big, p * a1, b1)
    steps = [
        Step("projection_formula", {"extension": str(big), "lift": payload_json(a1)}, start, _single(s1)),
        Step("divisibility", {"p": p, "root": payload_json(b1)}, _single(s1), _single(s2)),
        Step("multilinearity", {"factor": p, "from": v, "to": u}, _single(s2), _single(s3)),
        Step("zero", {"entry": u}, _single(s3), ()),
    ]
    return steps, s.point.degree * m


def _ga_chain(s: Symbol) -> tuple[list[Step], Combination]:
    if any(fn.kind is not Kind.GA for fn in s.functors):
        raise StrategyError("GA_CHAIN needs every factor to be GA")
    x, y = s.point.base, s.point.ext
    fns = s.functors
    prod = s.entries[0].payload
    for a in s.entries[1:]:
        prod = prod * a.payload
    ones = [GroupValue(fn, y, y.one()) for fn in fns[1:]]
    moved = Symbol(fns, s.point, (GroupValue(fns[0], y, prod), *ones))
    tr = pushforward(fns[0], x, moved.entries[0])
    normal = Symbol(fns, FinitePoint(x, x), (tr, *[GroupValue(fn, x, x.one()) for fn in fns[1:]]))
    start = _single(s)
    steps = [
        Step("m3", {"via": f"{y}/{y}"}, start, start),
        Step("i_move", {}, start, _single(moved), modulo_i_span=True),
        Step("projection_formula", {"extension": str(y)}, _single(moved), _single(normal)),
    ]
    return steps, _single(normal)


def reduce_symbol(s: Symbol, strategy: Strategy | str, max_degree: int = 4,
                  validate: bool = True) -> Certificate:
    strategy = Strategy(strategy)
    if s.is_trivially_zero():
        cert = Certificate(s, strategy, [], (), s.point.degree)
        cert.validated = True
        return cert
    if strategy is Strategy.DIVISIBILITY:
        steps, deg = _divisibility(s, max_degree)
        final: Combination = ()
    else:
        steps, final = _ga_chain(s)
        deg = s.point.degree
    if len(steps) > STEP_CAP:
        raise StrategyError(f"certificate exceeds {STEP_CAP} steps")
    cert = Certificate(s, strategy, steps, final, deg)
    if validate:
        validate_certificate(cert)
    return cert


# --- validation ---------------------------------------------------------------------

def i_span_rows(pres: MackeyPresentation) -> list[dict[int, int]]:
    """{a_1,...,a_n}_{y/x} - {a_1...a_n, 1, ..., 1}_{y/x} over structure generators."""
    fns = pres.functors
    if any(fn.kind is not Kind.GA for fn in fns):
        return []
    rows = []
    for k, layer in pres.layers.items():
        E = layer.point
        pt = FinitePoint(pres.base, E)
        gens = [value_group(fn, E).generators for fn in fns]
        for tup in itertools.product(*gens):
            prod = tup[0].payload
            for a in tup[1:]:
                prod = prod * a.payload
            moved = (GroupValue(fns[0], E, prod), *[GroupValue(fn, E, E.one()) for fn in fns[1:]])
            vec = combination_vector([(1, Symbol(fns, pt, tuple(tup))), (-1, Symbol(fns, pt, moved))], pres)
            row = {i: c for i, c in enumerate(vec) if c}
            if row:
                rows.append(row)
    return rows


def validate_certificate(cert: Certificate, pres: MackeyPresentation | None = None) -> bool:
    s = cert.initial
    if pres is None:
        pres = build_presentation(s.functors, s.point.base, cert.degree_bound)
    plain = pres.lattice()
    extended = None
    cert.failures = []
    for i, step in enumerate(cert.steps):
        diff = combination_vector(list(step.before) + [(-c, t) for c, t in step.after], pres)
        lat = plain
        if step.modulo_i_span:
            if extended is None:
                rows = pres.relations.sparse_rows() + i_span_rows(pres)
                extended = RowLattice(IntMatrix.from_sparse_rows(rows, pres.generator_count))
            lat = extended
        ok, _ = lat.contains(diff)
        if not ok:
            cert.failures.append(i)
    chain_ok = all(cert.steps[i].after == cert.steps[i + 1].before for i in range(len(cert.steps) - 1))
    ends_ok = (not cert.steps) or (cert.steps[0].before == _single(s) and cert.steps[-1].after == cert.final)
    if cert.proves_zero and not cert.steps:
        ends_ok = s.is_trivially_zero() or plain.contains(combination_vector([(1, s)], pres))[0]
    cert.validated = not cert.failures and chain_ok and ends_ok
    return cert.validated


def all_generator_symbols(functors: Sequence[ValueFunctor], x: FieldDesc, d_max: int) -> list[Symbol]:
    """Symbols built from structure generators at every point of degree <= d_max."""
    out = []
    for k in range(1, d_max + 1):
        E = extension(x, k)
        gens = [value_group(fn, E).generators for fn in functors]
        for tup in itertools.product(*gens):
            out.append(Symbol(tuple(functors), FinitePoint(x, E), tuple(tup)))
    return out
