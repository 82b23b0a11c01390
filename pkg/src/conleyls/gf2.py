"""GF(2) linear algebra on bitset rows.

A vector over GF(2) is a Python ``int`` whose bit ``i`` is coordinate ``i``.
The heavy elimination runs in the Cython kernel when it is importable and
in :mod:`conleyls._gf2_py` otherwise.  Set ``CONLEYLS_PURE_PYTHON=1`` to
force the fallback.
"""
from __future__ import annotations

import os

import numpy as np

from . import _gf2_py

_ext = None
if not os.environ.get("CONLEYLS_PURE_PYTHON"):
    try:
        from . import _gf2_ext as _ext
    except ImportError:  # extension not built
        _ext = None

BACKEND = "cython" if _ext is not None else "python"

# below this many rows packing costs more than it saves
_PACK_THRESHOLD = 48


def _pack(rows, nbits):
    nwords = max(1, (nbits + 63) // 64)
    out = np.zeros((len(rows), nwords), dtype=np.uint64)
    nbytes = nwords * 8
    for i, r in enumerate(rows):
        out[i] = np.frombuffer(r.to_bytes(nbytes, "little"), dtype="<u8")
    return out


def _unpack(row):
    return int.from_bytes(row.astype("<u8").tobytes(), "little")


def _use_ext(backend, nrows):
    if backend == "python":
        return False
    if backend == "cython":
        if _ext is None:
            raise RuntimeError("Cython GF(2) kernel is not built")
        return True
    return _ext is not None and nrows >= _PACK_THRESHOLD


def rank(rows, backend=None):
    """Rank over GF(2) of the matrix whose rows are ``rows``."""
    rows = [r for r in rows if r]
    if not rows:
        return 0
    nbits = max(r.bit_length() for r in rows)
    if _use_ext(backend, len(rows)):
        return int(_ext.eliminate(_pack(rows, nbits), nbits))
    return _gf2_py.eliminate(rows, nbits)[0]


def left_kernel(rows, ncols, backend=None):
    """Basis of ``{x : sum_i x_i rows[i] = 0}``.

    Each basis vector is returned as a bitset over row positions.  Row bits
    at or above ``ncols`` are ignored.
    """
    n = len(rows)
    if n == 0:
        return []
    mask = (1 << ncols) - 1
    aug = [(r & mask) | (1 << (ncols + i)) for i, r in enumerate(rows)]
    if _use_ext(backend, n):
        M = _pack(aug, ncols + n)
        rk = int(_ext.eliminate(M, ncols))
        return [_unpack(M[i]) >> ncols for i in range(rk, n)]
    _, residues = _gf2_py.eliminate(aug, ncols)
    return [r >> ncols for r in residues]


class Echelon:
    """Incrementally built reduced basis of a subspace."""

    def __init__(self, vectors=()):
        self._pivots = {}
        for v in vectors:
            self.add(v)

    def __len__(self):
        return len(self._pivots)

    def reduce(self, v):
        while v:
            lead = v & -v
            piv = self._pivots.get(lead)
            if piv is None:
                return v
            v ^= piv
        return 0

    def add(self, v):
        """Insert ``v``; return False if it was already in the span."""
        v = self.reduce(v)
        if not v:
            return False
        self._pivots[v & -v] = v
        return True

    def copy(self):
        e = Echelon()
        e._pivots = dict(self._pivots)
        return e
