import os
import subprocess
import sys

import numpy as np
import pytest

from mldd import _kernels

needs_numba = pytest.mark.skipif(not _kernels.HAVE_NUMBA, reason="numba not installed")


def test_permutations_shape():
    assert _kernels.permutations(3).shape == (6, 3)
    assert _kernels.permutations(1).tolist() == [[0]]


@pytest.mark.parametrize("n, expected", [(1, 2), (2, 10), (3, 104)])
def test_canonical_relation_counts(n, expected):
    # unlabelled directed graphs with loops allowed
    assert len(_kernels.canonical_relations(n, use_numba=False)) == expected


@needs_numba
@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_orbit_min_backends_agree(n):
    codes = np.arange(1 << (n * n), dtype=np.int64)
    maps = _kernels._edge_maps(n, _kernels.permutations(n))
    a = _kernels.orbit_min_mask(codes, maps, use_numba=False)
    b = _kernels.orbit_min_mask(codes, maps, use_numba=True)
    assert np.array_equal(a, b)


@needs_numba
def test_batch_kernels_agree():
    rng = np.random.default_rng(1)
    rel = rng.random((500, 4, 4)) < 0.4
    val = rng.random((500, 4)) < 0.5
    assert np.array_equal(_kernels.diamond(rel, val, use_numba=False),
                          _kernels.diamond(rel, val, use_numba=True))
    assert np.array_equal(_kernels.diff(val, use_numba=False), _kernels.diff(val, use_numba=True))


def test_diamond_reference():
    rel = np.zeros((1, 3, 3), dtype=bool)
    rel[0, 0, 2] = True
    val = np.array([[False, False, True]])
    assert _kernels.diamond(rel, val).tolist() == [[True, False, False]]
    assert _kernels.diff(val).tolist() == [[True, True, False]]


def test_decode_round_trip():
    codes = np.array([0, 5, 511], dtype=np.int64)
    rel = _kernels.decode_relations(codes, 3)
    back = (rel.reshape(3, -1) * (1 << np.arange(9))).sum(axis=1)
    assert back.tolist() == codes.tolist()
    assert _kernels.decode_valuations(codes, 3, 0).shape == (3, 0, 3)


def test_env_flag_selects_numpy():
    out = subprocess.run(
        [sys.executable, "-c", "from mldd import _kernels; print(_kernels.BACKEND)"],
        env={**os.environ, "MLDD_DISABLE_NUMBA": "1"}, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "numpy"


def test_requesting_missing_numba_fails(monkeypatch):
    monkeypatch.setattr(_kernels, "HAVE_NUMBA", False)
    with pytest.raises(RuntimeError):
        _kernels.diff(np.zeros((1, 2), dtype=bool), use_numba=True)
