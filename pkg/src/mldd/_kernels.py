"""Hot loops for model enumeration and batched evaluation.

Each kernel has a numba version and a pure-numpy twin with the same
signature.  Set ``MLDD_DISABLE_NUMBA=1`` to force the numpy path (also used
automatically when numba cannot be imported).

Bit layouts: a relation on ``n`` worlds is an integer whose bit ``i*n + j``
is set iff ``(i, j)`` is an edge; a valuation over ``k`` symbols is an
integer whose bit ``s*n + i`` is set iff symbol ``s`` holds at world ``i``.
"""
from __future__ import annotations

import itertools
import os

import numpy as np

_DISABLED = os.environ.get("MLDD_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes")

try:
    if _DISABLED:
        raise ImportError("disabled by MLDD_DISABLE_NUMBA")
    from numba import njit
    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

BACKEND = "numba" if HAVE_NUMBA else "numpy"

# below this many code-permutation checks, loading the compiled kernel costs
# more than the numpy loop it replaces
ORBIT_MIN_WORK = 1 << 22


def permutations(n: int) -> np.ndarray:
    """All permutations of ``range(n)`` in lexicographic order, shape (n!, n)."""
    return np.array(list(itertools.permutations(range(n))), dtype=np.int64).reshape(-1, n)


def _edge_maps(n: int, perms: np.ndarray) -> np.ndarray:
    """``maps[p, b]`` = bit position that relation bit ``b`` moves to under perm p."""
    b = np.arange(n * n)
    i, j = b // n, b % n
    return perms[:, i] * n + perms[:, j]


def _world_maps(n: int, k: int, perms: np.ndarray) -> np.ndarray:
    b = np.arange(n * k)
    s, i = b // n, b % n
    return s * n + perms[:, i]


# -- numpy twins -------------------------------------------------------------

def _permute_codes_np(codes: np.ndarray, maps: np.ndarray) -> np.ndarray:
    """Apply every bit map to every code; result shape (len(maps), len(codes))."""
    nbits = maps.shape[1]
    out = np.zeros((maps.shape[0], codes.shape[0]), dtype=np.int64)
    for b in range(nbits):
        bit = (codes >> b) & 1
        out |= bit[None, :] << maps[:, b][:, None]
    return out


def _orbit_min_mask_np(codes, maps):
    permuted = _permute_codes_np(codes, maps)
    return permuted.min(axis=0) == codes


def _diamond_np(rel: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.any(rel & v[:, None, :], axis=2)


def _diff_np(v: np.ndarray) -> np.ndarray:
    total = v.sum(axis=1, keepdims=True)
    return (total - v) >= 1


# -- numba kernels -----------------------------------------------------------

if HAVE_NUMBA:

    @njit(cache=True)
    def _orbit_min_mask_nb(codes, maps):
        nperm, nbits = maps.shape
        out = np.empty(codes.shape[0], dtype=np.bool_)
        for c in range(codes.shape[0]):
            code = codes[c]
            minimal = True
            for p in range(nperm):
                img = 0
                for b in range(nbits):
                    if (code >> b) & 1:
                        img |= 1 << maps[p, b]
                if img < code:
                    minimal = False
                    break
            out[c] = minimal
        return out

    @njit(cache=True)
    def _diamond_nb(rel, v):
        batch, n, _ = rel.shape
        out = np.zeros((batch, n), dtype=np.bool_)
        for m in range(batch):
            for i in range(n):
                for j in range(n):
                    if rel[m, i, j] and v[m, j]:
                        out[m, i] = True
                        break
        return out

    @njit(cache=True)
    def _diff_nb(v):
        batch, n = v.shape
        out = np.zeros((batch, n), dtype=np.bool_)
        for m in range(batch):
            total = 0
            for i in range(n):
                total += v[m, i]
            for i in range(n):
                out[m, i] = (total - v[m, i]) >= 1
        return out


# -- public dispatch ---------------------------------------------------------

def orbit_min_mask(codes: np.ndarray, maps: np.ndarray, use_numba: bool | None = None) -> np.ndarray:
    """Which codes are the least element of their orbit under the bit maps."""
    codes = np.ascontiguousarray(codes, dtype=np.int64)
    maps = np.ascontiguousarray(maps, dtype=np.int64)
    if use_numba is None and codes.shape[0] * maps.shape[0] < ORBIT_MIN_WORK:
        use_numba = False
    if _pick(use_numba):
        return _orbit_min_mask_nb(codes, maps)
    out = np.empty(codes.shape[0], dtype=bool)
    step = max(1, (1 << 22) // max(1, maps.shape[0]))
    for lo in range(0, codes.shape[0], step):
        out[lo:lo + step] = _orbit_min_mask_np(codes[lo:lo + step], maps)
    return out


def diamond(rel: np.ndarray, v: np.ndarray, use_numba: bool | None = None) -> np.ndarray:
    """Batched diamond: ``out[m, i]`` iff some ``j`` has ``rel[m,i,j]`` and ``v[m,j]``."""
    if _pick(use_numba):
        return _diamond_nb(rel, v)
    return _diamond_np(rel, v)


def diff(v: np.ndarray, use_numba: bool | None = None) -> np.ndarray:
    """Batched difference modality: true at i iff v holds at some j != i."""
    if _pick(use_numba):
        return _diff_nb(v)
    return _diff_np(v)


def _pick(use_numba):
    if use_numba is None:
        return HAVE_NUMBA
    if use_numba and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but unavailable")
    return use_numba


# -- enumeration helpers built on the kernels ---------------------------------

def canonical_relations(n: int, use_numba: bool | None = None) -> np.ndarray:
    """Least code in every isomorphism class of relations on ``n`` worlds."""
    codes = np.arange(1 << (n * n), dtype=np.int64)
    maps = _edge_maps(n, permutations(n))
    return codes[orbit_min_mask(codes, maps, use_numba)]


def automorphisms(code: int, n: int, perms: np.ndarray) -> np.ndarray:
    """Permutations fixing the relation ``code``."""
    maps = _edge_maps(n, perms)
    img = _permute_codes_np(np.array([code], dtype=np.int64), maps)[:, 0]
    return perms[img == code]


def canonical_valuations(n: int, k: int, auts: np.ndarray, candidates: np.ndarray,
                         use_numba: bool | None = None) -> np.ndarray:
    """Candidates (valuation codes over k symbols) minimal under the automorphisms."""
    if auts.shape[0] <= 1 or candidates.size == 0:
        return candidates
    maps = _world_maps(n, k, auts)
    return candidates[orbit_min_mask(candidates, maps, use_numba)]


def decode_relations(codes: np.ndarray, n: int) -> np.ndarray:
    bits = (codes[:, None] >> np.arange(n * n)[None, :]) & 1
    return bits.astype(bool).reshape(codes.shape[0], n, n)


def decode_valuations(codes: np.ndarray, n: int, k: int) -> np.ndarray:
    bits = (codes[:, None] >> np.arange(n * k)[None, :]) & 1
    return bits.astype(bool).reshape(codes.shape[0], k, n)
