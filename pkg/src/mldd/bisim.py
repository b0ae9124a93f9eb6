"""Bisimulation checking and search for the standard, DD, hybrid and MLC notions."""
from __future__ import annotations

import enum
import json

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from .formula import Formula, LogicDialect, in_dialect
from .kripke import KripkeModel, extension

MAX_CANDIDATES = 1 << 20


class BisimKind(enum.Enum):
    STANDARD = "standard"
    DD = "dd"
    HYBRID = "h"
    MLC = "mlc"


class BisimError(ValueError):
    pass


class SearchLimitExceeded(RuntimeError):
    pass


_DIALECT = {
    BisimKind.STANDARD: LogicDialect.ML,
    BisimKind.DD: LogicDialect.MLDD,
    BisimKind.HYBRID: LogicDialect.H_AT,
    BisimKind.MLC: LogicDialect.MLC,
}


def load_relation(path) -> frozenset:
    with open(path) as fh:
        return parse_relation(json.load(fh))


def parse_relation(data) -> frozenset:
    if not isinstance(data, list) or not all(
            isinstance(p, list) and len(p) == 2 and all(isinstance(x, str) for x in p)
            for p in data):
        raise BisimError("relation must be an array of 2-element string arrays")
    return frozenset(tuple(p) for p in data)


def dump_relation(z) -> str:
    return json.dumps(sorted([list(p) for p in z])) + "\n"


def _atoms(m: KripkeModel, w: str, with_nominals: bool) -> tuple:
    ps = frozenset(p for p, ws in m.valuation.items() if w in ws)
    if not with_nominals:
        return (ps,)
    return ps, frozenset(i for i, v in m.nominals.items() if v == w)


def _image(z, w):
    return {b for a, b in z if a == w}


def _preimage(z, w):
    return {a for a, b in z if b == w}


def has_bijection(m: KripkeModel, m2: KripkeModel, z) -> bool:
    """Does ``z`` contain a bijection between the two world sets?"""
    n, n2 = len(m.worlds), len(m2.worlds)
    if n != n2:
        return False
    if n == 0:
        return True
    rows = [m.index(a) for a, _ in z]
    cols = [m2.index(b) for _, b in z]
    graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n2))
    match = maximum_bipartite_matching(graph, perm_type="column")
    return int((match >= 0).sum()) == n


def check_bisim(kind: BisimKind, m: KripkeModel, m2: KripkeModel, z) -> list:
    """Violated conditions of ``z`` as a bisimulation of ``kind``; empty if ok."""
    z = frozenset(z)
    for a, b in z:
        if a not in m._index or b not in m2._index:
            raise BisimError(f"pair ({a}, {b}) is not in W x W'")
    out = []
    nominal_atoms = kind is BisimKind.HYBRID
    for a, b in sorted(z):
        if _atoms(m, a, nominal_atoms) != _atoms(m2, b, nominal_atoms):
            out.append(f"atom fails at ({a}, {b})")
        for v in m.successors(a):
            if not any((v, v2) in z for v2 in m2.successors(b)):
                out.append(f"zig fails at ({a}, {b}) for successor {v}")
        for v2 in m2.successors(b):
            if not any((v, v2) in z for v in m.successors(a)):
                out.append(f"zag fails at ({a}, {b}) for successor {v2}")
    if kind is BisimKind.DD:
        for a in m.worlds:
            if not _image(z, a):
                out.append(f"not serial: {a} has no partner")
        for b in m2.worlds:
            if not _preimage(z, b):
                out.append(f"not surjective: {b} has no partner")
        for a, b in sorted(z):
            if (_image(z, a) == {b}) != (_preimage(z, b) == {a}):
                out.append(f"singular fails at ({a}, {b})")
    elif kind is BisimKind.HYBRID:
        for i in sorted(set(m.nominals) & set(m2.nominals)):
            if (m.nominals[i], m2.nominals[i]) not in z:
                out.append(f"nom fails for {i}")
    elif kind is BisimKind.MLC:
        if not has_bijection(m, m2, z):
            out.append("no bijection")
    return out


def greatest_bisimulation(m: KripkeModel, m2: KripkeModel, with_nominals: bool = False) -> frozenset:
    """Largest standard bisimulation, by partition refinement on the disjoint union."""
    nodes = [(0, w) for w in m.worlds] + [(1, w) for w in m2.worlds]
    models = (m, m2)
    succ = {(s, w): [(s, v) for v in models[s].successors(w)] for s, w in nodes}
    block = {x: _atoms(models[x[0]], x[1], with_nominals) for x in nodes}
    while True:
        ids = {}
        for x in nodes:
            ids.setdefault(block[x], len(ids))
        sig = {x: (ids[block[x]], frozenset(ids[block[y]] for y in succ[x])) for x in nodes}
        if len(set(sig.values())) == len(ids):
            break
        block = sig
    return frozenset((a, b) for a in m.worlds for b in m2.worlds
                     if block[(0, a)] == block[(1, b)])


def find_bisim(kind: BisimKind, m: KripkeModel, w: str, m2: KripkeModel, w2: str,
               max_candidates: int = MAX_CANDIDATES):
    """A relation of ``kind`` containing ``(w, w2)``, or ``None`` if none exists.

    Raises :class:`SearchLimitExceeded` when the DD/MLC subset search would
    exceed ``max_candidates`` without finding one.
    """
    m.index(w), m2.index(w2)
    hybrid = kind is BisimKind.HYBRID
    big = greatest_bisimulation(m, m2, with_nominals=hybrid)
    if (w, w2) not in big:
        return None
    if kind in (BisimKind.STANDARD, BisimKind.HYBRID):
        return big if not check_bisim(kind, m, m2, big) else None
    pairs = sorted(big)
    anchor = pairs.index((w, w2))
    count = len(pairs)
    if (1 << count) > max_candidates:
        budget = max_candidates
    else:
        budget = 1 << count
    tried = 0
    # largest relations first: masks counted down from the full set
    for mask in range((1 << count) - 1, -1, -1):
        if not mask >> anchor & 1:
            continue
        tried += 1
        if tried > budget:
            raise SearchLimitExceeded(f"more than {max_candidates} candidate relations")
        z = frozenset(p for k, p in enumerate(pairs) if mask >> k & 1)
        if not check_bisim(kind, m, m2, z):
            return z
    return None


def invariance_probe(kind: BisimKind, m: KripkeModel, w: str, m2: KripkeModel, w2: str,
                     z, formulas, strict: bool = False) -> list:
    """Formulas whose truth differs at ``(m, w)`` and ``(m2, w2)``.

    With ``strict`` every formula must lie in the dialect matching ``kind``;
    otherwise out-of-dialect formulas are evaluated too, which is how
    separating formulas are exhibited.
    """
    problems = check_bisim(kind, m, m2, z)
    if problems:
        raise BisimError(f"not a {kind.value}-bisimulation: {problems[0]}")
    if (w, w2) not in frozenset(z):
        raise BisimError(f"({w}, {w2}) is not in the relation")
    out = []
    i, i2 = m.index(w), m2.index(w2)
    memo, memo2 = {}, {}
    for f in formulas:
        if strict and not in_dialect(f, _DIALECT[kind]):
            raise BisimError(f"formula outside dialect {_DIALECT[kind].value}")
        if bool(extension(m, f, memo)[i]) != bool(extension(m2, f, memo2)[i2]):
            out.append(f)
    return out
