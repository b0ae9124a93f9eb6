"""Bounded ground truth: model enumeration, satisfiability and equivalence.

Models are enumerated exhaustively up to isomorphism for every size from 1 to
``max_worlds``.  When the raw search space is too large to enumerate (many
propositions, five or more worlds over arbitrary frames) the same bounded
question is answered by a propositional encoding handed to a SAT solver; both
routes are complete within the bound.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator

import numpy as np
from pysat.solvers import Solver

from . import _kernels
from .formula import (
    And, Bot, Box, CountEQ, CountGE, CountLE, DD, Diamond, Diff, Formula,
    Implies, NomAtom, Not, Or, PropAtom, SatOp, Somewhere, Top, Univ,
    nominals as formula_nominals, props as formula_props,
)
from .kripke import FrameClass, KripkeModel, evaluate_batch, satisfies

# above this many (relation, valuation) pairs per size, brute_sat switches to SAT
ENUMERATION_CAP = 3_000_000
CHUNK = 1 << 16


class AlphabetError(ValueError):
    pass


@dataclass(frozen=True)
class EnumerationSpec:
    max_worlds: int
    props: tuple = ()
    nominals: tuple = ()
    frame_class: FrameClass = FrameClass.ALL

    def __post_init__(self):
        if self.max_worlds < 1:
            raise ValueError("max_worlds must be >= 1")
        object.__setattr__(self, "props", tuple(sorted(set(self.props))))
        object.__setattr__(self, "nominals", tuple(sorted(set(self.nominals))))

    @property
    def linear(self) -> bool:
        return self.frame_class is not FrameClass.ALL


@dataclass
class ModelBatch:
    """Same-size models as arrays; see :func:`mldd.kripke.evaluate_batch`."""

    n: int
    rel: np.ndarray                      # (B, n, n)
    val: dict                            # prop -> (B, n)
    noms: dict = field(default_factory=dict)   # nominal -> (B,)

    def __len__(self):
        return self.rel.shape[0]

    def model(self, b: int) -> KripkeModel:
        worlds = tuple(f"w{i}" for i in range(self.n))
        rel = frozenset((worlds[i], worlds[j]) for i, j in zip(*np.nonzero(self.rel[b])))
        val = {p: frozenset(worlds[i] for i in np.nonzero(v[b])[0]) for p, v in self.val.items()}
        noms = {i: worlds[int(v[b])] for i, v in self.noms.items()}
        return KripkeModel(worlds, rel, val, noms)


@lru_cache(maxsize=None)
def _canonical_relations(n: int) -> np.ndarray:
    return _kernels.canonical_relations(n)


@lru_cache(maxsize=64)
def _valuation_candidates(n: int, nprops: int, nnoms: int) -> np.ndarray:
    prop_codes = np.arange(1 << (n * nprops), dtype=np.int64)
    if nnoms == 0:
        return prop_codes
    nom_codes = []
    for choice in itertools.product(range(n), repeat=nnoms):
        code = 0
        for j, w in enumerate(choice):
            code |= 1 << ((nprops + j) * n + w)
        nom_codes.append(code)
    nom_codes = np.array(nom_codes, dtype=np.int64)
    return (prop_codes[:, None] | nom_codes[None, :]).reshape(-1)


def _chain(n: int) -> int:
    code = 0
    for i in range(n):
        for j in range(i + 1, n):
            code |= 1 << (i * n + j)
    return code


@lru_cache(maxsize=64)
def _size_codes(n: int, nprops: int, nnoms: int, linear: bool):
    """(relation codes, valuation codes) of canonical models with ``n`` worlds."""
    k = nprops + nnoms
    cands = _valuation_candidates(n, nprops, nnoms)
    if linear:
        rels = np.full(cands.shape[0], _chain(n), dtype=np.int64)
        return rels, cands
    perms = _kernels.permutations(n)
    rel_parts, val_parts = [], []
    for code in _canonical_relations(n):
        auts = _kernels.automorphisms(int(code), n, perms)
        vals = _kernels.canonical_valuations(n, k, auts, cands)
        rel_parts.append(np.full(vals.shape[0], code, dtype=np.int64))
        val_parts.append(vals)
    return np.concatenate(rel_parts), np.concatenate(val_parts)


def count_models(spec: EnumerationSpec, n: int | None = None) -> int:
    sizes = [n] if n is not None else range(1, spec.max_worlds + 1)
    return sum(_size_codes(k, len(spec.props), len(spec.nominals), spec.linear)[0].shape[0]
               for k in sizes)


def raw_space(spec: EnumerationSpec, n: int) -> int:
    """Unreduced number of models with ``n`` worlds (before isomorphism)."""
    rels = 1 if spec.linear else 1 << (n * n)
    return rels * (1 << (n * len(spec.props))) * n ** len(spec.nominals)


def model_batches(spec: EnumerationSpec, chunk: int = CHUNK) -> Iterator[ModelBatch]:
    """Canonical models as arrays, by size then relation code then valuation code."""
    np_, nn = len(spec.props), len(spec.nominals)
    for n in range(1, spec.max_worlds + 1):
        rels, vals = _size_codes(n, np_, nn, spec.linear)
        for lo in range(0, rels.shape[0], chunk):
            r = _kernels.decode_relations(rels[lo:lo + chunk], n)
            v = _kernels.decode_valuations(vals[lo:lo + chunk], n, np_ + nn)
            val = {p: v[:, s, :] for s, p in enumerate(spec.props)}
            noms = {i: v[:, np_ + s, :].argmax(axis=1) for s, i in enumerate(spec.nominals)}
            yield ModelBatch(n, r, val, noms)


def enumerate_models(spec: EnumerationSpec) -> Iterator[KripkeModel]:
    """Every model up to isomorphism with 1..max_worlds worlds, deterministically."""
    for batch in model_batches(spec):
        for b in range(len(batch)):
            yield batch.model(b)


def _check_alphabet(f: Formula, spec: EnumerationSpec):
    extra = formula_props(f) - set(spec.props)
    if extra:
        raise AlphabetError(f"props {sorted(extra)} are outside the enumeration alphabet")
    extra = formula_nominals(f) - set(spec.nominals)
    if extra:
        raise AlphabetError(f"nominals {sorted(extra)} are outside the enumeration alphabet")


def spec_for(*fs: Formula, max_worlds: int = 4,
             frame_class: FrameClass = FrameClass.ALL) -> EnumerationSpec:
    ps, ns = set(), set()
    for f in fs:
        ps |= formula_props(f)
        ns |= formula_nominals(f)
    return EnumerationSpec(max_worlds, tuple(ps), tuple(ns), frame_class)


@dataclass
class OracleResult:
    found: bool
    model: KripkeModel | None = None
    world: str | None = None
    bound: int = 0
    method: str = "enumerate"


def brute_sat(f: Formula, spec: EnumerationSpec, method: str = "auto") -> OracleResult:
    """First model (smallest size first) satisfying ``f`` somewhere, within the bound.

    ``method`` is ``"enumerate"``, ``"sat"`` or ``"auto"`` (enumerate while the
    per-size raw space is at most ``ENUMERATION_CAP``).
    """
    _check_alphabet(f, spec)
    for n in range(1, spec.max_worlds + 1):
        use = method
        if method == "auto":
            use = "enumerate" if raw_space(spec, n) <= ENUMERATION_CAP else "sat"
        if use == "enumerate":
            hit = _enumerate_size(f, spec, n)
        elif use == "sat":
            hit = _sat_size(f, spec, n)
        else:
            raise ValueError(f"unknown method {method!r}")
        if hit is not None:
            model, world = hit
            if not satisfies(model, world, f):
                raise AssertionError("oracle witness failed the model checker")
            return OracleResult(True, model, world, spec.max_worlds, use)
    return OracleResult(False, bound=spec.max_worlds, method=method)


def _enumerate_size(f, spec, n):
    sub = EnumerationSpec(n, spec.props, spec.nominals, spec.frame_class)
    for batch in model_batches(sub):
        if batch.n != n:
            continue
        truth = evaluate_batch(batch.rel, batch.val, f, batch.noms)
        hits = np.argwhere(truth)
        if hits.size:
            b, i = hits[0]
            return batch.model(int(b)), f"w{int(i)}"
    return None


@dataclass
class EquivalenceResult:
    equivalent: bool
    model: KripkeModel | None = None
    world: str | None = None
    left: bool | None = None
    right: bool | None = None


def equivalent_upto(f: Formula, g: Formula, spec: EnumerationSpec,
                    method: str = "auto") -> EquivalenceResult:
    """Pointwise agreement of ``f`` and ``g`` on every model of the bound."""
    _check_alphabet(f, spec)
    _check_alphabet(g, spec)
    for n in range(1, spec.max_worlds + 1):
        use = method
        if method == "auto":
            use = "enumerate" if raw_space(spec, n) <= ENUMERATION_CAP else "sat"
        if use == "enumerate":
            sub = EnumerationSpec(n, spec.props, spec.nominals, spec.frame_class)
            for batch in model_batches(sub):
                if batch.n != n:
                    continue
                memo = {}
                a = evaluate_batch(batch.rel, batch.val, f, batch.noms, memo)
                b = evaluate_batch(batch.rel, batch.val, g, batch.noms, memo)
                hits = np.argwhere(a != b)
                if hits.size:
                    m, i = hits[0]
                    return EquivalenceResult(False, batch.model(int(m)), f"w{int(i)}",
                                             bool(a[m, i]), bool(b[m, i]))
        else:
            differ = Or(And(f, Not(g)), And(Not(f), g))
            hit = _sat_size(differ, spec, n)
            if hit is not None:
                model, world = hit
                return EquivalenceResult(False, model, world,
                                         satisfies(model, world, f), satisfies(model, world, g))
    return EquivalenceResult(True)


# -- SAT encoding -----------------------------------------------------------------

class _Encoder:
    """Tseitin-style encoding of "f holds at world 0 of some n-world model"."""

    def __init__(self, n: int, spec: EnumerationSpec):
        self.n = n
        self.spec = spec
        self.nvars = 0
        self.clauses = []
        self.true = self.var()
        self.clauses.append([self.true])
        self.r = [[self.var() for _ in range(n)] for _ in range(n)]
        self.p = {p: [self.var() for _ in range(n)] for p in spec.props}
        self.nom = {i: [self.var() for _ in range(n)] for i in spec.nominals}
        self.cache = {}
        for lits in self.nom.values():
            self.exactly_one(lits)
        if spec.linear:
            for i in range(n):
                self.clauses.append([-self.r[i][i]])
                for j in range(n):
                    if i != j:
                        self.clauses.append([self.r[i][j], self.r[j][i]])
                    for k in range(n):
                        self.clauses.append([-self.r[i][j], -self.r[j][k], self.r[i][k]])

    def var(self) -> int:
        self.nvars += 1
        return self.nvars

    def exactly_one(self, lits):
        self.clauses.append(list(lits))
        for a, b in itertools.combinations(lits, 2):
            self.clauses.append([-a, -b])

    def land(self, lits) -> int:
        lits = list(lits)
        if not lits:
            return self.true
        if len(lits) == 1:
            return lits[0]
        x = self.var()
        for a in lits:
            self.clauses.append([-x, a])
        self.clauses.append([x] + [-a for a in lits])
        return x

    def lor(self, lits) -> int:
        lits = list(lits)
        if not lits:
            return -self.true
        if len(lits) == 1:
            return lits[0]
        return -self.land([-a for a in lits])

    def at_least(self, k: int, lits) -> int:
        if k <= 0:
            return self.true
        if k > len(lits):
            return -self.true
        return self.lor(self.land(c) for c in itertools.combinations(lits, k))

    def lits(self, f: Formula) -> list:
        """Literal per world standing for the truth of ``f`` there."""
        got = self.cache.get(f)
        if got is not None:
            return got
        n = self.n
        W = range(n)
        if isinstance(f, PropAtom):
            out = self.p[f.name]
        elif isinstance(f, NomAtom):
            out = self.nom[f.name]
        elif isinstance(f, Top):
            out = [self.true] * n
        elif isinstance(f, Bot):
            out = [-self.true] * n
        elif isinstance(f, Not):
            out = [-a for a in self.lits(f.arg)]
        elif isinstance(f, And):
            a, b = self.lits(f.left), self.lits(f.right)
            out = [self.land([a[i], b[i]]) for i in W]
        elif isinstance(f, Or):
            a, b = self.lits(f.left), self.lits(f.right)
            out = [self.lor([a[i], b[i]]) for i in W]
        elif isinstance(f, Implies):
            a, b = self.lits(f.left), self.lits(f.right)
            out = [self.lor([-a[i], b[i]]) for i in W]
        elif isinstance(f, Diamond):
            a = self.lits(f.arg)
            out = [self.lor(self.land([self.r[i][j], a[j]]) for j in W) for i in W]
        elif isinstance(f, Box):
            a = self.lits(f.arg)
            out = [-self.lor(self.land([self.r[i][j], -a[j]]) for j in W) for i in W]
        elif isinstance(f, DD):
            a, b = self.lits(f.description), self.lits(f.body)
            unique_at = [self.land([a[j]] + [-a[k] for k in W if k != j]) for j in W]
            out = [self.lor(self.land([unique_at[j], b[j]]) for j in W)] * n
        elif isinstance(f, SatOp):
            b = self.lits(f.body)
            at = self.nom[f.nominal]
            out = [self.lor(self.land([at[j], b[j]]) for j in W)] * n
        elif isinstance(f, CountGE):
            out = [self.at_least(f.n, self.lits(f.arg))] * n
        elif isinstance(f, CountLE):
            out = [-self.at_least(f.n + 1, self.lits(f.arg))] * n
        elif isinstance(f, CountEQ):
            a = self.lits(f.arg)
            out = [self.land([self.at_least(f.n, a), -self.at_least(f.n + 1, a)])] * n
        elif isinstance(f, Univ):
            out = [self.land(self.lits(f.arg))] * n
        elif isinstance(f, Somewhere):
            out = [self.lor(self.lits(f.arg))] * n
        elif isinstance(f, Diff):
            a = self.lits(f.arg)
            out = [self.lor(a[j] for j in W if j != i) for i in W]
        else:
            raise TypeError(f"not a formula: {f!r}")
        self.cache[f] = out
        return out

    def decode(self, assignment) -> KripkeModel:
        true = {v for v in assignment if v > 0}
        worlds = tuple(f"w{i}" for i in range(self.n))
        rel = frozenset((worlds[i], worlds[j]) for i in range(self.n) for j in range(self.n)
                        if self.r[i][j] in true)
        val = {p: frozenset(worlds[i] for i in range(self.n) if vs[i] in true)
               for p, vs in self.p.items()}
        noms = {i: next(worlds[k] for k in range(self.n) if vs[k] in true)
                for i, vs in self.nom.items()}
        return KripkeModel(worlds, rel, val, noms)


def _sat_size(f: Formula, spec: EnumerationSpec, n: int):
    enc = _Encoder(n, spec)
    root = enc.lits(f)[0]
    with Solver(name="cadical153", bootstrap_with=enc.clauses) as solver:
        if not solver.solve(assumptions=[root]):
            return None
        return enc.decode(solver.get_model()), "w0"
