"""Random and exhaustive generators for formulas and models (test corpora)."""
from __future__ import annotations

import random
from functools import lru_cache
from typing import Iterator

from .formula import (
    BOT, TOP, And, Box, CountEQ, CountGE, CountLE, DD, Diamond, Diff, Formula,
    Implies, LogicDialect, NomAtom, Not, Or, PropAtom, SatOp, Somewhere, Univ,
)
from .kripke import FrameClass, KripkeModel

_BOOL_UNARY = ("not",)
_BOOL_BINARY = ("and", "or", "implies")
_MODAL = ("diamond", "box")

_EXTRA = {
    LogicDialect.ML: (),
    LogicDialect.MLDD: ("dd",),
    LogicDialect.H_AT: ("satop",),
    LogicDialect.MLC: ("ge", "le", "eq"),
    LogicDialect.ML_A: ("univ", "somewhere"),
}


class FormulaGenerator:
    """Random formulas of a dialect with bounded modal depth and connective count.

    ``boolean_dd`` keeps every description modal-free.  ``extra`` adds
    operator names outside the dialect (e.g. ``("diff",)``).
    """

    def __init__(self, rng: random.Random, dialect: LogicDialect = LogicDialect.MLDD,
                 props=("p", "q"), nominals=(), max_depth: int = 2,
                 max_connectives: int = 10, boolean_dd: bool = False,
                 max_count: int = 3, extra=()):
        self.rng = rng
        self.dialect = dialect
        self.props = tuple(props)
        self.nominals = tuple(nominals) if dialect is LogicDialect.H_AT else ()
        if dialect is LogicDialect.H_AT and not self.nominals:
            self.nominals = ("i",)
        self.max_depth = max_depth
        self.max_connectives = max_connectives
        self.boolean_dd = boolean_dd
        self.max_count = max_count
        self.ops = _BOOL_UNARY + _BOOL_BINARY + _MODAL + _EXTRA[dialect] + tuple(extra)

    def __call__(self) -> Formula:
        return self.formula(self.rng.randint(0, self.max_connectives), self.max_depth)

    def leaf(self) -> Formula:
        pool = [PropAtom(p) for p in self.props] + [TOP, BOT]
        pool += [NomAtom(i) for i in self.nominals]
        return self.rng.choice(pool)

    def formula(self, budget: int, depth: int, modal: bool = True, dd: bool = True) -> Formula:
        if budget == 0:
            return self.leaf()
        ops = [o for o in self.ops
               if (modal or o not in _MODAL)
               and (depth > 0 or o not in _MODAL)
               and (dd or o != "dd")
               and (budget >= 2 or o not in _BOOL_BINARY + ("dd",))]
        op = self.rng.choice(ops)
        rest = budget - 1
        if op in _BOOL_BINARY or op == "dd":
            a = self.rng.randint(0, rest)
            if op == "dd":
                boolean = not self.boolean_dd
                left = self.formula(a, depth, modal=boolean, dd=boolean)
                return DD(left, self.formula(rest - a, depth, modal, dd))
            cls = {"and": And, "or": Or, "implies": Implies}[op]
            return cls(self.formula(a, depth, modal, dd), self.formula(rest - a, depth, modal, dd))
        if op in _MODAL:
            cls = Diamond if op == "diamond" else Box
            return cls(self.formula(rest, depth - 1, modal, dd))
        arg = self.formula(rest, depth, modal, dd)
        if op == "not":
            return Not(arg)
        if op == "satop":
            return SatOp(self.rng.choice(self.nominals), arg)
        if op in ("ge", "le", "eq"):
            cls = {"ge": CountGE, "le": CountLE, "eq": CountEQ}[op]
            return cls(self.rng.randint(0, self.max_count), arg)
        return {"univ": Univ, "somewhere": Somewhere, "diff": Diff}[op](arg)


def random_formulas(seed: int, count: int, **kwargs) -> list:
    gen = FormulaGenerator(random.Random(seed), **kwargs)
    return [gen() for _ in range(count)]


def random_model(rng: random.Random, n: int, props=("p", "q"), nominals=(),
                 edge_prob: float = 0.35, prop_prob: float = 0.5,
                 frame_class: FrameClass = FrameClass.ALL) -> KripkeModel:
    worlds = tuple(f"w{i}" for i in range(n))
    if frame_class is FrameClass.ALL:
        rel = {(a, b) for a in worlds for b in worlds if rng.random() < edge_prob}
    else:
        order = list(worlds)
        rng.shuffle(order)
        rel = {(order[i], order[j]) for i in range(n) for j in range(i + 1, n)}
    val = {p: frozenset(w for w in worlds if rng.random() < prop_prob) for p in props}
    noms = {i: rng.choice(worlds) for i in nominals}
    return KripkeModel(worlds, frozenset(rel), val, noms)


# -- exhaustive enumeration -----------------------------------------------------------

@lru_cache(maxsize=None)
def _boolean(c: int, leaves: tuple) -> tuple:
    """Modal-free formulas over {~, |} with exactly ``c`` connectives."""
    if c == 0:
        return leaves
    out = [Not(g) for g in _boolean(c - 1, leaves)]
    for a in range(c):
        for x in _boolean(a, leaves):
            for y in _boolean(c - 1 - a, leaves):
                out.append(Or(x, y))
    return tuple(out)


@lru_cache(maxsize=None)
def _boolean_dd(c: int, leaves: tuple) -> tuple:
    if c == 0:
        return leaves
    out = [Not(g) for g in _boolean_dd(c - 1, leaves)]
    out += [Diamond(g) for g in _boolean_dd(c - 1, leaves)]
    for a in range(c):
        for x in _boolean_dd(a, leaves):
            for y in _boolean_dd(c - 1 - a, leaves):
                out.append(Or(x, y))
        for x in _boolean(a, leaves):
            for y in _boolean_dd(c - 1 - a, leaves):
                out.append(DD(x, y))
    return tuple(out)


def all_boolean_dd(max_connectives: int, props=("p",)) -> Iterator[Formula]:
    """Every Boolean-DD formula over ``{~, |, <>, @[..]}`` with leaves props and true.

    Ordered by connective count, then construction order.
    """
    leaves = tuple(PropAtom(p) for p in props) + (TOP,)
    for c in range(max_connectives + 1):
        yield from _boolean_dd(c, leaves)
