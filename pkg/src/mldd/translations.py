"""Translations between ML(DD), H(@), MLC and ML(A)."""
from __future__ import annotations

import hashlib

from .formula import (
    ATOMS, TOP, And, Box, CountEQ, CountGE, DD, DialectError, Diamond, Diff,
    Formula, Implies, LogicDialect, NomAtom, Not, Or, PropAtom, SatOp, Somewhere,
    Univ, bottom_up, conj, expand_counting, nnf, nominals, props, require_dialect,
)
from .syntax import IDENT, to_text


class FreshSymbolSource:
    """Hands out proposition names that avoid ``reserved`` and each other."""

    def __init__(self, reserved=()):
        self.reserved = set(reserved)
        self.counters = {}

    def fresh(self, base: str) -> str:
        name = base
        while name in self.reserved:
            k = self.counters.get(base, 0) + 1
            self.counters[base] = k
            name = f"{base}{k}"
        self.reserved.add(name)
        return name


def _label(psi: Formula) -> str:
    text = to_text(psi)
    if IDENT.match(text):
        return text
    return hashlib.sha1(text.encode()).hexdigest()[:8]


# -- H(@) -> ML(DD) ---------------------------------------------------------------

def hybrid_to_dd(f: Formula, fresh: FreshSymbolSource | None = None) -> Formula:
    """Nominal ``i`` becomes prop ``p_i``; ``@i psi`` becomes ``@[p_i] psi``.

    The result is conjoined with ``@[p_i] true`` for every nominal so that
    each ``p_i`` is forced to hold at exactly one world.
    """
    require_dialect(f, LogicDialect.H_AT)
    fresh = fresh or FreshSymbolSource(props(f))
    names = {i: fresh.fresh("p_" + i) for i in sorted(nominals(f))}

    def rule(g):
        if isinstance(g, NomAtom):
            return PropAtom(names[g.name])
        if isinstance(g, SatOp):
            return DD(PropAtom(names[g.nominal]), g.body)
        return g

    body = bottom_up(f, rule)
    return conj(body, *(DD(PropAtom(names[i]), TOP) for i in sorted(names)))


# -- ML(DD) -> MLC ---------------------------------------------------------------

def dd_to_mlc(f: Formula) -> Formula:
    """``@[phi] psi`` becomes ``E=1 phi & E=1 (phi & psi)``, innermost first."""
    require_dialect(f, LogicDialect.MLDD)

    def rule(g):
        if isinstance(g, DD):
            return And(CountEQ(1, g.description), CountEQ(1, And(g.description, g.body)))
        return g

    return bottom_up(f, rule)


def dd_to_ed(f: Formula) -> Formula:
    """``@[phi] psi`` becomes ``E (phi & psi & ~D phi)``."""
    require_dialect(f, LogicDialect.MLDD)

    def rule(g):
        if isinstance(g, DD):
            return Somewhere(And(And(g.description, g.body), Not(Diff(g.description))))
        return g

    return bottom_up(f, rule)


def ed_to_mlc(f: Formula) -> Formula:
    """Expand ``E psi`` to ``E>=1 psi`` and ``D psi`` to its counting form."""

    def rule(g):
        if isinstance(g, Somewhere):
            return CountGE(1, g.arg)
        if isinstance(g, Diff):
            psi = g.arg
            return And(Implies(psi, CountGE(2, psi)), Implies(Not(psi), CountGE(1, psi)))
        return g

    return bottom_up(f, rule)


def dd_to_mlc_via_diff(f: Formula) -> Formula:
    return ed_to_mlc(dd_to_ed(f))


# -- ML(A) -> ML(DD) ---------------------------------------------------------------

def univ_to_dd(f: Formula, fresh: FreshSymbolSource | None = None) -> Formula:
    """Equisatisfiable ML(DD) image of an ML(A) formula via a trash world.

    ``s`` marks a unique world reachable only from itself; ``A psi`` is read
    as "psi everywhere except at the trash world" and ``E psi`` picks a fresh
    marker ``p_psi`` for a non-trash witness.
    """
    require_dialect(f, LogicDialect.ML_A)
    fresh = fresh or FreshSymbolSource(props(f))
    s = PropAtom(fresh.fresh("s"))
    markers = {}

    def tau(g):
        if isinstance(g, ATOMS) or (isinstance(g, Not) and isinstance(g.arg, PropAtom)):
            return g
        if isinstance(g, (And, Or)):
            return type(g)(tau(g.left), tau(g.right))
        if isinstance(g, (Diamond, Box)):
            return type(g)(tau(g.arg))
        if isinstance(g, Somewhere):
            if g.arg not in markers:
                markers[g.arg] = PropAtom(fresh.fresh("p_" + _label(g.arg)))
            return DD(markers[g.arg], And(tau(g.arg), Not(s)))
        if isinstance(g, Univ):
            return DD(Or(s, Not(tau(g.arg))), TOP)
        raise DialectError(f"unexpected {type(g).__name__} after nnf")

    return conj(tau(nnf(f)), Not(s), DD(s, TOP), DD(Diamond(s), s))


# -- MLC -> ML(DD) over finite linear orders ----------------------------------------

def chain_formula(psi: Formula, n: int) -> Formula:
    """``psi & <>(psi & <>(... ))`` with ``n`` copies of psi."""
    if n < 1:
        raise ValueError("chain length must be >= 1")
    out = psi
    for _ in range(n - 1):
        out = And(psi, Diamond(out))
    return out


def mlc_to_dd_linear(f: Formula) -> Formula:
    """Replace ``E>=n psi`` by ``<>psi_n | @[psi_n & ~<>psi_n] true`` bottom-up."""
    require_dialect(f, LogicDialect.MLC)

    def rule(g):
        if isinstance(g, CountGE):
            if g.n == 0:
                return TOP
            chain = chain_formula(g.arg, g.n)
            return Or(Diamond(chain), DD(And(chain, Not(Diamond(chain))), TOP))
        return g

    return bottom_up(expand_counting(f), rule)


DIRECTIONS = {
    "h-to-dd": hybrid_to_dd,
    "dd-to-mlc": dd_to_mlc,
    "dd-to-mlc-diff": dd_to_mlc_via_diff,
    "dd-to-ed": dd_to_ed,
    "a-to-dd": univ_to_dd,
    "mlc-to-dd-linear": mlc_to_dd_linear,
}
