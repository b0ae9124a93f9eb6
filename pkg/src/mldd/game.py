"""Satisfiability of ML(DD) with Boolean descriptions via the Hintikka-set game.

Eloise opens with a small family of Hintikka sets (at most one per
description, plus one containing the input formula); Abelard then challenges
diamonds of bounded depth and Eloise must answer with witnessing sets.  The
input is satisfiable iff Eloise has a winning strategy, and a winning
strategy is turned into a finite model.

Hintikka sets are represented as ``int`` bitmasks over a canonical ordering of
the closure; :class:`HintikkaSet` wraps one for the public API.
"""
from __future__ import annotations

import hashlib
import itertools
import json
import os
import time
from dataclasses import dataclass, field
from typing import Iterator

import numpy as np

from .formula import (
    DD, Diamond, Formula, LogicDialect, Not, Or, PropAtom, Top, dd_set,
    is_boolean_dd, modal_depth, require_dialect, size, subformulas, to_core,
)
from .kripke import KripkeModel, satisfies
from .syntax import to_text


class GameError(ValueError):
    pass


class LimitExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class Limits:
    """Search budget; ``None`` disables a bound."""

    max_nodes: int | None = 2_000_000
    max_seconds: float | None = None
    max_hintikka: int = 1 << 20

    @classmethod
    def from_env(cls, var: str = "MLDD_LIMITS") -> "Limits":
        """Parse e.g. ``MLDD_LIMITS="nodes=100000,seconds=5"``."""
        text = os.environ.get(var, "").strip()
        if not text:
            return cls()
        kw = {}
        for part in text.split(","):
            key, _, value = part.partition("=")
            key = key.strip()
            if key == "nodes":
                kw["max_nodes"] = None if value in ("", "none") else int(value)
            elif key == "seconds":
                kw["max_seconds"] = None if value in ("", "none") else float(value)
            elif key == "hintikka":
                kw["max_hintikka"] = int(value)
            else:
                raise ValueError(f"unknown limit {key!r} in {var}")
        return cls(**kw)


# -- closure and Hintikka sets ----------------------------------------------------

@dataclass(frozen=True)
class ClosureSet:
    """``cl(phi)`` with a canonical member order (by size, then text)."""

    root: Formula
    order: tuple

    @property
    def members(self) -> frozenset:
        return frozenset(self.order)

    def __contains__(self, g) -> bool:
        return g in self.members

    def __len__(self) -> int:
        return len(self.order)


def closure(f: Formula) -> ClosureSet:
    require_dialect(f, LogicDialect.MLDD)
    core = to_core(f)
    subs = subformulas(core)
    members = set(subs) | {Not(g) for g in subs if not isinstance(g, Not)}
    order = tuple(sorted(members, key=lambda g: (size(g), to_text(g))))
    return ClosureSet(core, order)


@dataclass(frozen=True)
class HintikkaSet:
    closure: ClosureSet
    mask: int

    @property
    def members(self) -> frozenset:
        return frozenset(g for i, g in enumerate(self.closure.order) if self.mask >> i & 1)

    def __contains__(self, g) -> bool:
        try:
            i = self.closure.order.index(g)
        except ValueError:
            return False
        return bool(self.mask >> i & 1)

    def __repr__(self):
        inner = ", ".join(sorted(to_text(g) for g in self.members))
        return "{" + inner + "}"


def _hintikka_masks(cl: ClosureSet, limit: int) -> list:
    """All Hintikka sets of ``cl`` as sorted bitmasks."""
    order = cl.order
    index = {g: i for i, g in enumerate(order)}
    free = [i for i, g in enumerate(order) if isinstance(g, (PropAtom, Diamond, DD))]
    if (1 << len(free)) > limit:
        raise LimitExceeded(f"{1 << len(free)} Hintikka sets exceed the limit of {limit}")
    assign = np.arange(1 << len(free), dtype=np.int64)
    cols = np.zeros((assign.shape[0], len(order)), dtype=bool)
    slot = {i: k for k, i in enumerate(free)}
    # members are sorted by size, so children are filled in before parents
    for i, g in enumerate(order):
        if i in slot:
            cols[:, i] = (assign >> slot[i]) & 1
        elif isinstance(g, Top):
            cols[:, i] = True
        elif isinstance(g, Not):
            cols[:, i] = ~cols[:, index[g.arg]]
        elif isinstance(g, Or):
            cols[:, i] = cols[:, index[g.left]] | cols[:, index[g.right]]
        else:
            raise GameError(f"unexpected closure member {to_text(g)}")
    return sorted(_pack(cols))


def _pack(cols: np.ndarray) -> list:
    out = [0] * cols.shape[0]
    for lo in range(0, cols.shape[1], 62):
        chunk = cols[:, lo:lo + 62].astype(np.int64)
        weights = np.left_shift(np.int64(1), np.arange(chunk.shape[1], dtype=np.int64))
        vals = (chunk * weights).sum(axis=1).tolist()
        out = [o | (v << lo) for o, v in zip(out, vals)]
    return out


def hintikka_sets(f: Formula, limits: Limits | None = None) -> Iterator[HintikkaSet]:
    """Every phi-Hintikka set exactly once, ordered by membership bit-vector."""
    limits = limits or Limits()
    cl = closure(f)
    for mask in _hintikka_masks(cl, limits.max_hintikka):
        yield HintikkaSet(cl, mask)


# -- the game -------------------------------------------------------------------

@dataclass(frozen=True)
class GameConfiguration:
    family: tuple                 # HintikkaSet masks, the evolving family
    family_relation: frozenset    # index pairs into ``family``
    current: frozenset            # indices into ``family``
    abelard_turns: int
    plural: int = 0               # descriptions declared to hold at >= 2 worlds

    def digest(self) -> str:
        payload = json.dumps([[hex(h) for h in self.family], sorted(self.family_relation),
                              sorted(self.current), self.abelard_turns, hex(self.plural)])
        return hashlib.sha1(payload.encode()).hexdigest()[:16]


@dataclass
class StrategyRecord:
    """Eloise's recorded winning strategy.

    ``responses`` maps ``(set, abelard_turns, challenged diamond bit)`` to the
    set Eloise answers with.
    """

    game: "PhiGame"
    opening: GameConfiguration
    responses: dict = field(default_factory=dict)

    def entries(self) -> list:
        """Ordered ``(configuration digest, choice)`` pairs."""
        order = self.game.cl.order
        out = [(self.opening.digest(), {"family": [hex(h) for h in self.opening.family],
                                        "relation": sorted(self.opening.family_relation),
                                        "plural": hex(self.opening.plural)})]
        fam = self.opening.family
        for (h, turn, bit), resp in sorted(self.responses.items()):
            cur = fam.index(h) if h in fam else len(fam)
            config = GameConfiguration(fam + (() if h in fam else (h,)), frozenset(),
                                       frozenset({cur}), turn, self.opening.plural)
            out.append((config.digest(), {"challenge": to_text(order[bit]),
                                          "response": hex(resp)}))
        return out

    def to_json(self) -> str:
        return json.dumps([{"config": d, "choice": c} for d, c in self.entries()], indent=1)


@dataclass
class GameOutcome:
    verdict: str                         # "win" | "lose" | "limit_exceeded"
    strategy: StrategyRecord | None = None
    nodes: int = 0
    families_tried: int = 0
    max_turns: int = 0


class PhiGame:
    """Precomputed bit-level view of the game for one Boolean-DD formula.

    With ``literal=True`` Eloise may not declare plural descriptions; that
    variant cannot make a description hold at two worlds and so misses
    satisfiable formulas such as ``~@[true] true``.
    """

    def __init__(self, f: Formula, limits: Limits | None = None, literal: bool = False):
        require_dialect(f, LogicDialect.MLDD)
        if not is_boolean_dd(f):
            raise GameError("the game decides Boolean-DD formulas only")
        self.limits = limits or Limits()
        self.literal = literal
        self.formula = f
        self.cl = closure(f)
        core = self.cl.root
        order = self.cl.order
        idx = {g: i for i, g in enumerate(order)}
        self.index = idx
        self.md = modal_depth(core)
        self.phi_bit = 1 << idx[core]
        self.diamonds = [(1 << i, 1 << idx[g.arg], modal_depth(g))
                         for i, g in enumerate(order) if isinstance(g, Diamond)]
        self.dd_nodes = [(1 << i, 1 << idx[g.description], 1 << idx[g.body])
                         for i, g in enumerate(order) if isinstance(g, DD)]
        self.descriptions = sorted(dd_set(core), key=lambda g: idx[g])
        self.desc_bits = [1 << idx[g] for g in self.descriptions]
        self.desc_mask = sum(self.desc_bits)
        self.dd_mask = sum(b for b, _, _ in self.dd_nodes)
        self.props = sorted({g.name for g in order if isinstance(g, PropAtom)})
        self.sets = _hintikka_masks(self.cl, self.limits.max_hintikka)
        self._forbidden = {}

    # -- helpers ----------------------------------------------------------

    def forbidden(self, h: int) -> int:
        """Bits a successor of ``h`` may not contain (diamond-coherence)."""
        got = self._forbidden.get(h)
        if got is None:
            got = 0
            for dbit, abit, _ in self.diamonds:
                if not h & dbit:
                    got |= abit
            self._forbidden[h] = got
        return got

    def challenges(self, h: int, turns: int) -> list:
        budget = self.md - turns
        return [(dbit, abit) for dbit, abit, depth in self.diamonds
                if h & dbit and depth <= budget]

    def desc_sig(self, h: int) -> int:
        return h & self.desc_mask

    def family_ok(self, family, plural: int = 0) -> bool:
        """Opening conditions on a family.

        ``plural`` is the bitmask of descriptions Eloise declares to hold at
        two or more worlds.  Every other description occurs in at most one
        member; DD nodes are true iff their description is not plural and
        some member holds description and body; members agree on DD nodes;
        a plural description occurs in two members or in a member free of
        non-plural descriptions (which the model then duplicates).
        """
        if plural and self.literal:
            return False
        if not any(h & self.phi_bit for h in family):
            return False
        dbits = family[0] & self.dd_mask
        if any(h & self.dd_mask != dbits for h in family):
            return False
        seen = 0
        for h in family:
            unique = h & self.desc_mask & ~plural
            if unique & seen:
                return False
            seen |= unique
        for node, dbit, bbit in self.dd_nodes:
            witnessed = not dbit & plural and any(h & dbit and h & bbit for h in family)
            if bool(dbits & node) != witnessed:
                return False
        for bit in self.desc_bits:
            if bit & plural and not self._plural_covered(family, bit, plural):
                return False
        return True

    def _plural_covered(self, family, bit: int, plural: int) -> bool:
        holders = [h for h in family if h & bit]
        if len(holders) >= 2:
            return True
        return any(not h & self.desc_mask & ~plural for h in holders)

    def relation_ok(self, family, rel) -> bool:
        return all(not family[b] & self.forbidden(family[a]) for a, b in rel)

    def maximal_relation(self, family) -> frozenset:
        return frozenset((a, b) for a in range(len(family)) for b in range(len(family))
                         if not family[b] & self.forbidden(family[a]))

    # -- opening moves ----------------------------------------------------

    def families(self) -> Iterator[tuple]:
        """Candidate openings ``(family, plural)``, each once, in deterministic order.

        A family is one set containing the input formula plus at most one
        set per description: the holder of a unique description, or one
        holder of a plural one.  Candidates are filtered by :meth:`family_ok`.
        """
        seen = set()
        ndesc = len(self.desc_bits)
        for hphi in self.sets:
            if not hphi & self.phi_bit:
                continue
            dbits = hphi & self.dd_mask
            pool = [h for h in self.sets if h & self.dd_mask == dbits and h & self.desc_mask]
            need, can_plural = self._desc_requirements(dbits)

            def extend(members, decided, plural, j):
                if j == ndesc:
                    fam = tuple(sorted(set(members)))
                    key = (fam, plural)
                    if key not in seen and self.family_ok(fam, plural):
                        seen.add(key)
                        yield key
                    return
                bit = self.desc_bits[j]
                present = [h for h in members if h & bit]
                closed = decided & ~plural
                fresh = [h for h in pool if h & bit and not h & closed and h not in members]
                if len(present) == 1:
                    yield from extend(members, decided | bit, plural, j + 1)
                elif not present:
                    if not need[j]:
                        yield from extend(members, decided | bit, plural, j + 1)
                    for h in fresh:
                        yield from extend(members + [h], decided | bit, plural, j + 1)
                if can_plural[j]:
                    yield from extend(members, decided | bit, plural | bit, j + 1)
                    for h in fresh:
                        yield from extend(members + [h], decided | bit, plural | bit, j + 1)

            yield from extend([hphi], 0, 0, 0)

    def _desc_requirements(self, dbits: int):
        """Per description: must it be present (some DD node true), may it be plural."""
        need = [False] * len(self.desc_bits)
        for node, dbit, _ in self.dd_nodes:
            if dbits & node:
                need[self.desc_bits.index(dbit)] = True
        can_plural = [not n and not self.literal for n in need]
        return need, can_plural

    def initial_moves(self, relations: str = "all") -> Iterator[GameConfiguration]:
        for fam, plural in self.families():
            full = self.maximal_relation(fam)
            everyone = frozenset(range(len(fam)))
            if relations == "maximal":
                yield GameConfiguration(fam, full, everyone, 0, plural)
                continue
            pairs = sorted(full)
            for r in range(len(pairs) + 1):
                for rel in itertools.combinations(pairs, r):
                    yield GameConfiguration(fam, frozenset(rel), everyone, 0, plural)

    # -- search -----------------------------------------------------------

    def solve(self) -> GameOutcome:
        start = time.monotonic()
        out = GameOutcome("lose")
        self._nodes = 0
        self._deadline = None if self.limits.max_seconds is None else start + self.limits.max_seconds
        self._max_turns = 0
        memo = {}
        try:
            for fam, plural in self.families():
                out.families_tried += 1
                self._tick()
                choices = {}
                if self._family_wins(fam, plural, memo, choices):
                    opening = GameConfiguration(fam, self.maximal_relation(fam),
                                                frozenset(range(len(fam))), 0, plural)
                    out.verdict = "win"
                    out.strategy = StrategyRecord(self, opening, choices)
                    break
        except LimitExceeded:
            out.verdict = "limit_exceeded"
        out.nodes = self._nodes
        out.max_turns = self._max_turns
        return out

    def _tick(self):
        self._nodes += 1
        if self.limits.max_nodes is not None and self._nodes > self.limits.max_nodes:
            raise LimitExceeded("node budget exhausted")
        if self._deadline is not None and (self._nodes & 1023) == 0 \
                and time.monotonic() > self._deadline:
            raise LimitExceeded("time budget exhausted")

    def _family_wins(self, fam, plural, memo, choices) -> bool:
        unique = self.desc_mask & ~plural
        # responses holding a unique description must be family members and win
        targets = frozenset(h for h in fam if h & unique)
        dbits = fam[0] & self.dd_mask
        pool = [h for h in self.sets if h & self.dd_mask == dbits and not h & unique]
        ctx = (targets, dbits, plural)
        return all(self._wins_from(h, 0, ctx, pool, memo, choices) for h in fam)

    def _wins_from(self, h, turns, ctx, pool, memo, choices) -> bool:
        """Eloise wins with Abelard to move and Current = {h}."""
        key = (ctx, h, turns)
        got = memo.get(key)
        if got is not None:
            won, resp = got
            if won:
                choices.update(resp)
            return won
        self._tick()
        self._max_turns = max(self._max_turns, turns + 1)
        targets = ctx[0]
        forb = self.forbidden(h)
        local = {}
        won = True
        for dbit, abit in self.challenges(h, turns):
            answer = None
            for t in sorted(targets):
                if t & abit and not t & forb:
                    answer = t
                    break
            if answer is None:
                for cand in pool:
                    if cand & abit and not cand & forb:
                        sub = {}
                        if self._wins_from(cand, turns + 1, ctx, pool, memo, sub):
                            answer = cand
                            local.update(sub)
                            break
            if answer is None:
                won = False
                break
            local[(h, turns, dbit)] = answer
        memo[key] = (won, dict(local) if won else None)
        if won:
            choices.update(local)
        return won

    # -- witness extraction -----------------------------------------------

    def extract_model(self, strategy: StrategyRecord):
        """Build the model of the winning strategy; returns ``(model, world)``."""
        fam = strategy.opening.family
        levels = [list(fam)]
        base = set(fam)
        for k in range(self.md):
            nxt = []
            for h in levels[k]:
                for dbit, _ in self.challenges(h, k):
                    try:
                        resp = strategy.responses[(h, k, dbit)]
                    except KeyError:
                        raise GameError("strategy record has no answer for a legal challenge") \
                            from None
                    if resp not in base and resp not in nxt:
                        nxt.append(resp)
            levels.append(sorted(nxt))
        # a plural description seen at fewer than two worlds gets a twin holder
        plural = strategy.opening.plural
        unique = self.desc_mask & ~plural
        everything = [h for level in levels for h in level]
        for bit in self.desc_bits:
            if bit & plural and sum(1 for h in everything if h & bit) < 2:
                twin = next((h for h in levels[0] if h & bit and not h & unique), None)
                if twin is None:
                    raise GameError("plural description without a duplicable holder")
                levels[0].append(twin)
                everything.append(twin)
        worlds, masks, depth = [], [], []
        for k, level in enumerate(levels):
            for j, h in enumerate(level):
                worlds.append(f"w{k}_{j}")
                masks.append(h)
                depth.append(k)
        # level k is only trusted up to modal depth md - k, so edges never skip a level
        relation = frozenset((worlds[a], worlds[b])
                             for a in range(len(worlds)) for b in range(len(worlds))
                             if depth[b] <= depth[a] + 1
                             and not masks[b] & self.forbidden(masks[a]))
        pbit = {p: 1 << self.index[PropAtom(p)] for p in self.props}
        valuation = {p: frozenset(w for w, h in zip(worlds, masks) if h & bit)
                     for p, bit in pbit.items()}
        model = KripkeModel(tuple(worlds), relation, valuation)
        root = next(worlds[j] for j, h in enumerate(levels[0]) if h & self.phi_bit)
        return model, root


# -- module-level API -------------------------------------------------------------

def initial_moves(f: Formula, relations: str = "all") -> Iterator[GameConfiguration]:
    return PhiGame(f).initial_moves(relations)


def eloise_wins(f: Formula, limits: Limits | None = None) -> GameOutcome:
    return PhiGame(f, limits).solve()


def extract_model(f: Formula, strategy: StrategyRecord):
    if strategy is None or strategy.game.formula != f:
        raise GameError("malformed strategy record")
    return strategy.game.extract_model(strategy)


@dataclass
class SatResult:
    verdict: str                 # "sat" | "unsat" | "limit_exceeded"
    model: KripkeModel | None = None
    world: str | None = None
    outcome: GameOutcome | None = None


def sat_boolean_dd(f: Formula, limits: Limits | None = None) -> SatResult:
    """Decide satisfiability of a Boolean-DD formula; witnesses are re-checked."""
    try:
        game = PhiGame(f, limits)
    except LimitExceeded:
        return SatResult("limit_exceeded")
    outcome = game.solve()
    if outcome.verdict == "limit_exceeded":
        return SatResult("limit_exceeded", outcome=outcome)
    if outcome.verdict == "lose":
        return SatResult("unsat", outcome=outcome)
    model, world = game.extract_model(outcome.strategy)
    if not satisfies(model, world, f):
        raise GameError(f"extracted witness does not satisfy {to_text(f)}")
    return SatResult("sat", model, world, outcome)
