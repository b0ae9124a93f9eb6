"""Kripke models, frame classes and the satisfaction relation."""
from __future__ import annotations

import enum
import json
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import _kernels
from .formula import (
    And, Bot, Box, CountEQ, CountGE, CountLE, DD, Diamond, Diff, Formula,
    Implies, NomAtom, Not, Or, PropAtom, SatOp, Somewhere, Top, Univ,
)


class ModelError(ValueError):
    pass


class UnknownWorldError(ModelError, KeyError):
    pass


class UnboundNominalError(ModelError, KeyError):
    pass


class FrameClass(enum.Enum):
    ALL = "all"
    LINEAR = "linear"
    FINITE_STRICT_TOTAL_ORDER = "fsto"


@dataclass(frozen=True)
class KripkeModel:
    """A finite model ``(W, R, V)``; nominals map to single worlds."""

    worlds: tuple
    relation: frozenset = frozenset()
    valuation: Mapping[str, frozenset] = field(default_factory=dict)
    nominals: Mapping[str, str] = field(default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "relation", frozenset(tuple(e) for e in self.relation))
        object.__setattr__(self, "valuation",
                           {p: frozenset(ws) for p, ws in sorted(self.valuation.items())})
        object.__setattr__(self, "nominals", dict(sorted(self.nominals.items())))
        object.__setattr__(self, "_index", {w: i for i, w in enumerate(self.worlds)})

    def __hash__(self):
        return hash((self.worlds, self.relation,
                     tuple(self.valuation.items()), tuple(self.nominals.items())))

    def index(self, w: str) -> int:
        try:
            return self._index[w]
        except KeyError:
            raise UnknownWorldError(f"unknown world {w!r}") from None

    @property
    def adjacency(self) -> np.ndarray:
        adj = self.__dict__.get("_adj")
        if adj is None:
            n = len(self.worlds)
            adj = np.zeros((n, n), dtype=bool)
            for a, b in self.relation:
                adj[self.index(a), self.index(b)] = True
            object.__setattr__(self, "_adj", adj)
        return adj

    def successors(self, w: str) -> list:
        return [v for v in self.worlds if (w, v) in self.relation]

    def holds(self, prop: str) -> np.ndarray:
        out = np.zeros(len(self.worlds), dtype=bool)
        for w in self.valuation.get(prop, ()):
            out[self.index(w)] = True
        return out

    # -- serialization --------------------------------------------------

    def to_json(self) -> dict:
        return {
            "worlds": list(self.worlds),
            "relation": sorted([list(e) for e in self.relation],
                               key=lambda e: (self._index.get(e[0], -1), self._index.get(e[1], -1),
                                              e[0], e[1])),
            "valuation": {p: sorted(ws, key=lambda w: (self._index.get(w, -1), w))
                          for p, ws in self.valuation.items()},
            "nominals": dict(self.nominals),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_json(cls, data: dict) -> "KripkeModel":
        if not isinstance(data, dict):
            raise ModelError("model must be a JSON object")
        unknown = set(data) - {"worlds", "relation", "valuation", "nominals"}
        if unknown:
            raise ModelError(f"unknown keys in model: {sorted(unknown)}")
        if "worlds" not in data:
            raise ModelError("model needs a 'worlds' array")
        worlds = data["worlds"]
        if not isinstance(worlds, list) or not all(isinstance(w, str) for w in worlds):
            raise ModelError("'worlds' must be an array of strings")
        rel = data.get("relation", [])
        if not isinstance(rel, list) or not all(
                isinstance(e, list) and len(e) == 2 and all(isinstance(x, str) for x in e)
                for e in rel):
            raise ModelError("'relation' must be an array of 2-element string arrays")
        val = data.get("valuation", {})
        if not isinstance(val, dict) or not all(
                isinstance(ws, list) and all(isinstance(w, str) for w in ws) for ws in val.values()):
            raise ModelError("'valuation' must map props to arrays of worlds")
        noms = data.get("nominals", {})
        if not isinstance(noms, dict) or not all(isinstance(w, str) for w in noms.values()):
            raise ModelError("'nominals' must map nominals to a world")
        return cls(worlds, frozenset(tuple(e) for e in rel), val, noms)

    @classmethod
    def loads(cls, text: str) -> "KripkeModel":
        return cls.from_json(json.loads(text))

    @classmethod
    def load(cls, path) -> "KripkeModel":
        with open(path) as fh:
            return cls.loads(fh.read())


def validate(m: KripkeModel) -> list:
    """Invariant violations as human-readable strings; empty means ok."""
    out = []
    known = set(m.worlds)
    if not m.worlds:
        out.append("W is empty")
    if len(known) != len(m.worlds):
        out.append("duplicate world ids")
    for a, b in sorted(m.relation):
        if a not in known or b not in known:
            out.append(f"relation pair ({a}, {b}) mentions a world not in W")
    for p, ws in m.valuation.items():
        for w in sorted(ws - known):
            out.append(f"valuation of {p} mentions {w}, which is not in W")
    for i, w in m.nominals.items():
        if w not in known:
            out.append(f"nominal target not in W: {i} -> {w}")
    return out


def frame_class_check(m: KripkeModel, c: FrameClass) -> bool:
    if c is FrameClass.ALL:
        return True
    adj = m.adjacency
    n = len(m.worlds)
    if adj.diagonal().any():
        return False
    # transitivity: R;R within R
    two_step = (adj.astype(np.int64) @ adj.astype(np.int64)) > 0
    if (two_step & ~adj).any():
        return False
    off = ~np.eye(n, dtype=bool)
    trichotomous = (adj | adj.T | ~off).all()
    if not trichotomous:
        return False
    # on finite frames trichotomy + irreflexivity + transitivity already give a chain
    return True


# -- satisfaction ----------------------------------------------------------------

def extension(m: KripkeModel, f: Formula, _memo: dict | None = None) -> np.ndarray:
    """Boolean vector over ``m.worlds``: where ``f`` holds."""
    memo = {} if _memo is None else _memo
    got = memo.get(f)
    if got is not None:
        return got
    n = len(m.worlds)

    def ext(g):
        return extension(m, g, memo)

    if isinstance(f, PropAtom):
        out = m.holds(f.name)
    elif isinstance(f, NomAtom):
        out = np.zeros(n, dtype=bool)
        out[_nominal_index(m, f.name)] = True
    elif isinstance(f, Top):
        out = np.ones(n, dtype=bool)
    elif isinstance(f, Bot):
        out = np.zeros(n, dtype=bool)
    elif isinstance(f, Not):
        out = ~ext(f.arg)
    elif isinstance(f, And):
        out = ext(f.left) & ext(f.right)
    elif isinstance(f, Or):
        out = ext(f.left) | ext(f.right)
    elif isinstance(f, Implies):
        out = ~ext(f.left) | ext(f.right)
    elif isinstance(f, Diamond):
        out = (m.adjacency & ext(f.arg)[None, :]).any(axis=1)
    elif isinstance(f, Box):
        out = ~(m.adjacency & ~ext(f.arg)[None, :]).any(axis=1)
    elif isinstance(f, DD):
        d = ext(f.description)
        ok = d.sum() == 1 and bool((d & ext(f.body)).any())
        out = np.full(n, ok)
    elif isinstance(f, SatOp):
        out = np.full(n, bool(ext(f.body)[_nominal_index(m, f.nominal)]))
    elif isinstance(f, CountGE):
        out = np.full(n, int(ext(f.arg).sum()) >= f.n)
    elif isinstance(f, CountLE):
        out = np.full(n, int(ext(f.arg).sum()) <= f.n)
    elif isinstance(f, CountEQ):
        out = np.full(n, int(ext(f.arg).sum()) == f.n)
    elif isinstance(f, Univ):
        out = np.full(n, bool(ext(f.arg).all()))
    elif isinstance(f, Somewhere):
        out = np.full(n, bool(ext(f.arg).any()))
    elif isinstance(f, Diff):
        v = ext(f.arg)
        out = (int(v.sum()) - v.astype(np.int64)) >= 1
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out


def _nominal_index(m: KripkeModel, name: str) -> int:
    if name not in m.nominals:
        raise UnboundNominalError(f"nominal {name!r} is not interpreted in the model")
    return m.index(m.nominals[name])


def satisfies(m: KripkeModel, w: str, f: Formula) -> bool:
    """``M, w |= f``."""
    return bool(extension(m, f)[m.index(w)])


# -- batched evaluation ---------------------------------------------------------

def evaluate_batch(rel: np.ndarray, val: Mapping[str, np.ndarray], f: Formula,
                   noms: Mapping[str, np.ndarray] | None = None,
                   _memo: dict | None = None) -> np.ndarray:
    """Evaluate ``f`` on a batch of same-size models at once.

    ``rel`` has shape (B, n, n); ``val[p]`` has shape (B, n); ``noms[i]`` is
    an int array (B,) of world indices.  Props missing from ``val`` are
    false everywhere.  Returns a (B, n) boolean array.
    """
    memo = {} if _memo is None else _memo
    got = memo.get(f)
    if got is not None:
        return got
    batch, n = rel.shape[0], rel.shape[1]
    noms = noms or {}

    def ev(g):
        return evaluate_batch(rel, val, g, noms, memo)

    def glob(col):
        return np.broadcast_to(np.asarray(col, dtype=bool)[:, None], (batch, n))

    if isinstance(f, PropAtom):
        out = val[f.name] if f.name in val else np.zeros((batch, n), dtype=bool)
    elif isinstance(f, NomAtom):
        if f.name not in noms:
            raise UnboundNominalError(f"nominal {f.name!r} is not interpreted")
        out = np.arange(n)[None, :] == noms[f.name][:, None]
    elif isinstance(f, Top):
        out = np.ones((batch, n), dtype=bool)
    elif isinstance(f, Bot):
        out = np.zeros((batch, n), dtype=bool)
    elif isinstance(f, Not):
        out = ~ev(f.arg)
    elif isinstance(f, And):
        out = ev(f.left) & ev(f.right)
    elif isinstance(f, Or):
        out = ev(f.left) | ev(f.right)
    elif isinstance(f, Implies):
        out = ~ev(f.left) | ev(f.right)
    elif isinstance(f, Diamond):
        out = _kernels.diamond(rel, np.ascontiguousarray(ev(f.arg)))
    elif isinstance(f, Box):
        out = ~_kernels.diamond(rel, np.ascontiguousarray(~ev(f.arg)))
    elif isinstance(f, DD):
        d = ev(f.description)
        out = glob((d.sum(axis=1) == 1) & (d & ev(f.body)).any(axis=1))
    elif isinstance(f, SatOp):
        if f.nominal not in noms:
            raise UnboundNominalError(f"nominal {f.nominal!r} is not interpreted")
        out = glob(ev(f.body)[np.arange(batch), noms[f.nominal]])
    elif isinstance(f, CountGE):
        out = glob(ev(f.arg).sum(axis=1) >= f.n)
    elif isinstance(f, CountLE):
        out = glob(ev(f.arg).sum(axis=1) <= f.n)
    elif isinstance(f, CountEQ):
        out = glob(ev(f.arg).sum(axis=1) == f.n)
    elif isinstance(f, Univ):
        out = glob(ev(f.arg).all(axis=1))
    elif isinstance(f, Somewhere):
        out = glob(ev(f.arg).any(axis=1))
    elif isinstance(f, Diff):
        out = _kernels.diff(np.ascontiguousarray(ev(f.arg)))
    else:
        raise TypeError(f"not a formula: {f!r}")
    memo[f] = out
    return out
