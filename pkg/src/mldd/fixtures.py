"""Shipped model pairs that separate the logics.

``nominal``: one world against the same world plus an isolated one; the
identity on the named world is a hybrid bisimulation, yet ``@[true] true``
separates them.

``cardinality``: two bare worlds against three, related all-to-all; a DD
bisimulation with no bijection inside, separated by ``E=2 true``.

``linear_nominal`` and ``linear_count`` are finite truncations of integer
chains (``linear_count`` of two chains in sequence).  They illustrate the
linear-frame constructions only: the arguments behind them need infinite
frames, so they are not used for invariance checks.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources

from .bisim import parse_relation
from .kripke import KripkeModel


@dataclass(frozen=True)
class FixturePair:
    name: str
    left: KripkeModel
    right: KripkeModel
    relation: frozenset
    point: tuple            # (world of left, world of right)
    illustrative: bool = False


POINTS = {
    "nominal": ("w", "w'"),
    "cardinality": ("w1", "w1'"),
    "linear_nominal": ("w0", "w'0"),
    "linear_count": ("v0", "v'0"),
}
ILLUSTRATIVE = {"linear_nominal", "linear_count"}


def path(name: str, part: str):
    """Filesystem path of ``<name>_<part>.json`` (part: left, right, relation)."""
    return resources.files("mldd") / "fixtures" / f"{name}_{part}.json"


def load(name: str) -> FixturePair:
    if name not in POINTS:
        raise KeyError(f"unknown fixture {name!r}; known: {sorted(POINTS)}")
    left = KripkeModel.loads(path(name, "left").read_text())
    right = KripkeModel.loads(path(name, "right").read_text())
    rel = parse_relation(json.loads(path(name, "relation").read_text()))
    return FixturePair(name, left, right, rel, POINTS[name], name in ILLUSTRATIVE)


def names() -> list:
    return sorted(POINTS)
