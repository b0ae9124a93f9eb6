"""Formula AST shared by ML, ML(DD), H(@), MLC and ML(A/E/D).

Every node is an immutable dataclass; structural equality (``==``) is the
equality used everywhere, including closure membership and Hintikka sets.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator, Union


class DialectError(ValueError):
    """A formula uses a constructor its target dialect does not admit."""


@dataclass(frozen=True)
class PropAtom:
    name: str


@dataclass(frozen=True)
class NomAtom:
    name: str


@dataclass(frozen=True)
class Top:
    pass


@dataclass(frozen=True)
class Bot:
    pass


@dataclass(frozen=True)
class Not:
    arg: Formula


@dataclass(frozen=True)
class And:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies:
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Diamond:
    arg: Formula


@dataclass(frozen=True)
class Box:
    arg: Formula


@dataclass(frozen=True)
class DD:
    """``@[description] body``: body holds at the unique description-world."""

    description: Formula
    body: Formula


@dataclass(frozen=True)
class SatOp:
    """Hybrid ``@i body``."""

    nominal: str
    body: Formula


@dataclass(frozen=True)
class CountGE:
    n: int
    arg: Formula

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("counting bound must be >= 0")


@dataclass(frozen=True)
class CountLE:
    n: int
    arg: Formula

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("counting bound must be >= 0")


@dataclass(frozen=True)
class CountEQ:
    n: int
    arg: Formula

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("counting bound must be >= 0")


@dataclass(frozen=True)
class Univ:
    arg: Formula


@dataclass(frozen=True)
class Somewhere:
    arg: Formula


@dataclass(frozen=True)
class Diff:
    arg: Formula


Formula = Union[
    PropAtom, NomAtom, Top, Bot, Not, And, Or, Implies, Diamond, Box, DD,
    SatOp, CountGE, CountLE, CountEQ, Univ, Somewhere, Diff,
]

TOP = Top()
BOT = Bot()

UNARY = (Not, Diamond, Box, Univ, Somewhere, Diff)
BINARY = (And, Or, Implies)
COUNTING = (CountGE, CountLE, CountEQ)
ATOMS = (PropAtom, NomAtom, Top, Bot)
# operators whose value does not depend on the evaluation world
GLOBAL = (DD, SatOp, CountGE, CountLE, CountEQ, Univ, Somewhere)


def children(f: Formula) -> tuple:
    """Immediate subformulas, descriptions included."""
    if isinstance(f, ATOMS):
        return ()
    if isinstance(f, UNARY) or isinstance(f, COUNTING):
        return (f.arg,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    if isinstance(f, DD):
        return (f.description, f.body)
    if isinstance(f, SatOp):
        return (f.body,)
    raise TypeError(f"not a formula: {f!r}")


def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal (with repeats)."""
    stack = [f]
    while stack:
        g = stack.pop()
        yield g
        stack.extend(reversed(children(g)))


def conj(*fs: Formula) -> Formula:
    """Left-nested conjunction; ``TOP`` for no arguments."""
    if not fs:
        return TOP
    out = fs[0]
    for g in fs[1:]:
        out = And(out, g)
    return out


def disj(*fs: Formula) -> Formula:
    if not fs:
        return BOT
    out = fs[0]
    for g in fs[1:]:
        out = Or(out, g)
    return out


# -- structural measures -----------------------------------------------------

def modal_depth(f: Formula) -> int:
    """Deepest nesting of diamonds (boxes count as their dual)."""
    if isinstance(f, (Diamond, Box)):
        return 1 + modal_depth(f.arg)
    return max((modal_depth(c) for c in children(f)), default=0)


def size(f: Formula) -> int:
    return sum(1 for _ in walk(f))


def connectives(f: Formula) -> int:
    """Number of non-atomic nodes."""
    return sum(1 for g in walk(f) if not isinstance(g, ATOMS))


def subformulas(f: Formula) -> frozenset:
    return frozenset(walk(f))


def dd_set(f: Formula) -> frozenset:
    """Descriptions of all DD nodes occurring in ``f``."""
    return frozenset(g.description for g in walk(f) if isinstance(g, DD))


def props(f: Formula) -> frozenset:
    return frozenset(g.name for g in walk(f) if isinstance(g, PropAtom))


def nominals(f: Formula) -> frozenset:
    out = set()
    for g in walk(f):
        if isinstance(g, NomAtom):
            out.add(g.name)
        elif isinstance(g, SatOp):
            out.add(g.nominal)
    return frozenset(out)


def is_modal_free(f: Formula) -> bool:
    return not any(isinstance(g, (Diamond, Box, DD)) for g in walk(f))


def is_boolean_dd(f: Formula) -> bool:
    """True iff no description mentions a modality or another DD."""
    return all(is_modal_free(d) for d in dd_set(f))


# -- dialects ----------------------------------------------------------------

class LogicDialect(enum.Enum):
    ML = "ML"
    MLDD = "MLDD"
    H_AT = "H_AT"
    MLC = "MLC"
    ML_A = "ML_A"


_CORE = frozenset({PropAtom, Top, Bot, Not, And, Or, Implies, Diamond, Box})

ADMITS = {
    LogicDialect.ML: _CORE,
    LogicDialect.MLDD: _CORE | {DD},
    LogicDialect.H_AT: _CORE | {NomAtom, SatOp},
    LogicDialect.MLC: _CORE | {CountGE, CountLE, CountEQ},
    LogicDialect.ML_A: _CORE | {Univ, Somewhere},
}


def in_dialect(f: Formula, dialect: LogicDialect) -> bool:
    allowed = ADMITS[dialect]
    return all(type(g) in allowed for g in walk(f))


def require_dialect(f: Formula, dialect: LogicDialect) -> None:
    allowed = ADMITS[dialect]
    for g in walk(f):
        if type(g) not in allowed:
            raise DialectError(
                f"{type(g).__name__} is not admitted by dialect {dialect.value}")


def dialect_of(f: Formula) -> LogicDialect | None:
    """Smallest dialect admitting ``f`` (ML first), or None for mixtures."""
    for d in LogicDialect:
        if in_dialect(f, d):
            return d
    return None


# -- rewriting ---------------------------------------------------------------

def rebuild(f: Formula, args: tuple) -> Formula:
    """Same constructor as ``f`` with new immediate subformulas."""
    if isinstance(f, ATOMS):
        return f
    if isinstance(f, UNARY):
        return type(f)(args[0])
    if isinstance(f, COUNTING):
        return type(f)(f.n, args[0])
    if isinstance(f, BINARY):
        return type(f)(args[0], args[1])
    if isinstance(f, DD):
        return DD(args[0], args[1])
    if isinstance(f, SatOp):
        return SatOp(f.nominal, args[0])
    raise TypeError(f"not a formula: {f!r}")


def bottom_up(f: Formula, rule) -> Formula:
    """Rewrite children first, then apply ``rule`` to the rebuilt node."""
    return rule(rebuild(f, tuple(bottom_up(c, rule) for c in children(f))))


def expand_counting(f: Formula) -> Formula:
    """Replace <= and = counting by their >= definitions."""

    def rule(g):
        if isinstance(g, CountLE):
            return Not(CountGE(g.n + 1, g.arg))
        if isinstance(g, CountEQ):
            return And(CountGE(g.n, g.arg), Not(CountGE(g.n + 1, g.arg)))
        return g

    return bottom_up(f, rule)


@lru_cache(maxsize=4096)
def to_core(f: Formula) -> Formula:
    """Rewrite into the primitive connectives ``p, true, ~, |, <>, @[..]``.

    Used before closure computation: Hintikka saturation only knows negation
    and disjunction.
    """
    if isinstance(f, (PropAtom, NomAtom, Top)):
        return f
    if isinstance(f, Bot):
        return Not(TOP)
    if isinstance(f, Not):
        return Not(to_core(f.arg))
    if isinstance(f, Or):
        return Or(to_core(f.left), to_core(f.right))
    if isinstance(f, And):
        return Not(Or(Not(to_core(f.left)), Not(to_core(f.right))))
    if isinstance(f, Implies):
        return Or(Not(to_core(f.left)), to_core(f.right))
    if isinstance(f, Diamond):
        return Diamond(to_core(f.arg))
    if isinstance(f, Box):
        return Not(Diamond(Not(to_core(f.arg))))
    if isinstance(f, DD):
        return DD(to_core(f.description), to_core(f.body))
    raise DialectError(f"{type(f).__name__} has no core ML(DD) form")


def nnf(f: Formula, dialect: LogicDialect = LogicDialect.ML_A) -> Formula:
    """Negation normal form over ``~ | & <> [] A E``; negations end on atoms."""
    if dialect is not LogicDialect.ML_A:
        raise DialectError("nnf is defined for the ML_A dialect only")
    require_dialect(f, LogicDialect.ML_A)
    return _nnf(f, False)


def _nnf(f: Formula, neg: bool) -> Formula:
    if isinstance(f, PropAtom):
        return Not(f) if neg else f
    if isinstance(f, Top):
        return BOT if neg else TOP
    if isinstance(f, Bot):
        return TOP if neg else BOT
    if isinstance(f, Not):
        return _nnf(f.arg, not neg)
    if isinstance(f, And):
        op = Or if neg else And
        return op(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Or):
        op = And if neg else Or
        return op(_nnf(f.left, neg), _nnf(f.right, neg))
    if isinstance(f, Implies):
        if neg:
            return And(_nnf(f.left, False), _nnf(f.right, True))
        return Or(_nnf(f.left, True), _nnf(f.right, False))
    if isinstance(f, Diamond):
        return Box(_nnf(f.arg, True)) if neg else Diamond(_nnf(f.arg, False))
    if isinstance(f, Box):
        return Diamond(_nnf(f.arg, True)) if neg else Box(_nnf(f.arg, False))
    if isinstance(f, Univ):
        return Somewhere(_nnf(f.arg, True)) if neg else Univ(_nnf(f.arg, False))
    if isinstance(f, Somewhere):
        return Univ(_nnf(f.arg, True)) if neg else Somewhere(_nnf(f.arg, False))
    raise DialectError(f"{type(f).__name__} is not admitted by dialect ML_A")


def is_nnf(f: Formula) -> bool:
    return all(isinstance(g.arg, PropAtom) for g in walk(f) if isinstance(g, Not)) \
        and not any(isinstance(g, Implies) for g in walk(f))
