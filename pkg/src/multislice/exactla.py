"""Exact linear algebra kernels for the certification paths.

Two engines, used by size:

* Fraction-free (Bareiss) row reduction over arbitrary-precision integers.
  Exact and self-contained, but intermediate entries are k x k minors whose
  bit length grows linearly with the elimination step, so it is only viable
  for small matrices (the default cap is a few hundred rows).

* Wordsize-modular elimination over GF(p) with float64 storage and blocked
  matmul updates.  Ranks over GF(p) never exceed ranks over Q, so a modular
  rank is an exact *lower* bound on the rational rank (equivalently an upper
  bound on the nullity).  Combined with explicitly verified kernel vectors
  this yields exact nullity certificates far past the Bareiss cap.

All float64 values handled by the modular engine are exact integers below
2^53; the panel width is capped so accumulated inner products stay exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

import numpy as np

#: Default cap for integer-exact (Bareiss) elimination.
BAREISS_CAP = 300

#: Primes below 2^22 so that 512 * p^2 < 2^53 holds with room to spare.
MODULAR_PRIMES = (4194301, 4194287, 3999971)

_MAX_PANEL = 256


def _as_int_rows(matrix, shift: Fraction | int = 0) -> list[list[int]]:
    """Copy ``matrix - shift*I`` into integer rows, clearing denominators.

    Accepts nested sequences or numpy arrays with int/Fraction entries.
    Scaling the whole matrix by the common denominator leaves rank and
    nullity unchanged.
    """
    rows = [list(row) for row in matrix]
    shift = Fraction(shift)
    if shift:
        for i, row in enumerate(rows):
            if i >= len(row):
                break
            row[i] = Fraction(row[i]) - shift
    denom = 1
    for row in rows:
        for v in row:
            if isinstance(v, Fraction):
                denom = denom * v.denominator // math.gcd(denom, v.denominator)
            elif isinstance(v, float):
                raise TypeError("exact elimination needs int or Fraction entries")
    out = []
    for row in rows:
        out.append([int(v * denom) if isinstance(v, Fraction) else int(v) * denom for v in row])
    return out


def fraction_free_rank(matrix, cap: int | None = BAREISS_CAP) -> int:
    """Exact rank over Q via Bareiss single-step fraction-free elimination.

    Every division is exact (by the previous pivot), so the computation stays
    in the integers.  ``cap`` guards against the superlinear bit growth of
    the intermediate minors.
    """
    a = _as_int_rows(matrix)
    nrows = len(a)
    ncols = len(a[0]) if nrows else 0
    if cap is not None and min(nrows, ncols) > cap:
        raise ValueError(
            f"matrix of shape ({nrows}, {ncols}) exceeds exact elimination cap {cap}"
        )
    prev = 1
    rank = 0
    for c in range(ncols):
        piv = next((i for i in range(rank, nrows) if a[i][c]), None)
        if piv is None:
            continue
        if piv != rank:
            a[rank], a[piv] = a[piv], a[rank]
        arc = a[rank][c]
        for i in range(rank + 1, nrows):
            aic = a[i][c]
            ai = a[i]
            ar = a[rank]
            for j in range(c + 1, ncols):
                ai[j] = (ai[j] * arc - aic * ar[j]) // prev
            ai[c] = 0
        prev = arc
        rank += 1
        if rank == nrows:
            break
    return rank


def exact_nullity(matrix, shift: Fraction | int = 0, cap: int | None = BAREISS_CAP) -> int:
    """Exact dimension of ker(matrix - shift*I) over Q (Bareiss engine)."""
    rows = _as_int_rows(matrix, shift)
    ncols = len(rows[0]) if rows else 0
    return ncols - fraction_free_rank(rows, cap)


def _reduce(a: np.ndarray, p: int, inv_p: float) -> np.ndarray:
    """In-place a mod p for float64 arrays holding exact integers |a| <= 2^53."""
    q = np.floor(a * inv_p)
    q *= p
    a -= q
    # the scaled floor can be off by one near multiples of p; correct into [0, p)
    np.add(a, p, out=a, where=a < 0)
    np.subtract(a, p, out=a, where=a >= p)
    return a


def rank_mod_p(matrix, p: int = MODULAR_PRIMES[0], block: int = _MAX_PANEL) -> int:
    """Rank of an integer matrix over GF(p).

    Blocked right-looking elimination: panels are factored with deferred
    reduction (entries stay below ``block * p^2 < 2^53``), and the trailing
    block is updated with a single matmul per panel, which is where nearly
    all the work lands.
    """
    block = min(block, _MAX_PANEL)
    if block < 1 or (2 * block) * (p - 1) ** 2 >= 2**53:
        raise ValueError(f"block {block} too wide for prime {p}")
    m = np.array(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("need a 2-d matrix")
    if m.size == 0:
        return 0
    if np.max(np.abs(m)) >= 2**53:
        raise ValueError("entries too large for exact float64 storage")
    inv_p = 1.0 / p
    _reduce(m, p, inv_p)
    nrows, ncols = m.shape
    row = 0
    col = 0
    while row < nrows and col < ncols:
        width = min(block, ncols - col)
        piv_cols: list[int] = []
        for c in range(col, col + width):
            r = row + len(piv_cols)
            colv = _reduce(m[r:, c], p, inv_p)
            nz = np.nonzero(colv)[0]
            if nz.size == 0:
                continue
            i = r + int(nz[0])
            if i != r:
                m[[r, i], :] = m[[i, r], :]
            prow = _reduce(m[r, c: col + width], p, inv_p)
            inv = float(pow(int(m[r, c]), p - 2, p))
            below = m[r + 1:, c]
            if below.size:
                mult = _reduce(below * inv, p, inv_p)
                m[r + 1:, c] = mult
                if c + 1 < col + width:
                    m[r + 1:, c + 1: col + width] -= np.outer(mult, prow[1:])
            piv_cols.append(c)
        npiv = len(piv_cols)
        tcol = col + width
        if npiv and tcol < ncols:
            idx = np.array(piv_cols)
            # forward substitution: U12 = L11^{-1} @ T_piv, L11 unit lower
            t = m[row: row + npiv, tcol:]
            _reduce(t, p, inv_p)
            lpan = m[row: row + npiv, :][:, idx]
            for s in range(1, npiv):
                t[s] -= lpan[s, :s] @ t[:s]
                _reduce(t[s], p, inv_p)
            l21 = m[row + npiv:, :][:, idx]
            if l21.shape[0]:
                rest = m[row + npiv:, tcol:]
                rest -= l21 @ t
                _reduce(rest, p, inv_p)
        row += npiv
        col = tcol
    return row


def nullity_mod_p(matrix, p: int = MODULAR_PRIMES[0]) -> int:
    """Nullity over GF(p); an exact upper bound on the nullity over Q."""
    m = np.asarray(matrix)
    return m.shape[1] - rank_mod_p(m, p)


def shifted_int_matrix(matrix: np.ndarray, shift: int) -> np.ndarray:
    """Integer ``matrix - shift*I`` as an int64 array (square input)."""
    m = np.array(matrix, dtype=np.int64)
    if m.shape[0] != m.shape[1]:
        raise ValueError("shift requires a square matrix")
    np.fill_diagonal(m, m.diagonal() - shift)
    return m


def kernel_rank_certified(vectors: Sequence[Sequence[int]] | np.ndarray) -> int:
    """Certified rank over Q of a small family of integer row vectors.

    Modular rank is a lower bound for the rational rank, so when it equals
    the row count the family is certified independent.  Otherwise fall back
    to the exact Bareiss engine (families here are small).
    """
    arr = np.asarray(vectors, dtype=np.int64)
    if arr.size == 0:
        return 0
    for p in MODULAR_PRIMES:
        if rank_mod_p(arr, p) == arr.shape[0]:
            return arr.shape[0]
    return fraction_free_rank(arr.tolist(), cap=None)
