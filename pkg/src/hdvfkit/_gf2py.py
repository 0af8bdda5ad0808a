"""Pure-Python GF(2) elimination kernels.

Rows and columns are Python ints used as bitsets: bit ``j`` of a row is the
entry in column ``j``.  Every function here has a twin with the same signature
in the compiled ``_gf2core`` extension.
"""

from __future__ import annotations

NAME = "python"


def rref(rows, ncols):
    """Reduced row echelon form, pivoting only on columns ``0 .. ncols-1``.

    Columns are scanned left to right and the first available row holding the
    column is taken as pivot.  Bits at positions ``>= ncols`` are carried along
    (augmented part).  Returns ``(rows, pivots)`` where ``rows[r]`` is the
    pivot row of ``pivots[r]`` for ``r < len(pivots)``.
    """
    work = list(rows)
    n = len(work)
    pivots = []
    r = 0
    for col in range(ncols):
        if r == n:
            break
        bit = 1 << col
        for i in range(r, n):
            if work[i] & bit:
                break
        else:
            continue
        work[r], work[i] = work[i], work[r]
        prow = work[r]
        for j in range(n):
            if j != r and work[j] & bit:
                work[j] ^= prow
        pivots.append(col)
        r += 1
    return work, pivots


def rank(rows, ncols):
    work = list(rows)
    n = len(work)
    r = 0
    for col in range(ncols):
        if r == n:
            break
        bit = 1 << col
        for i in range(r, n):
            if work[i] & bit:
                break
        else:
            continue
        work[r], work[i] = work[i], work[r]
        prow = work[r]
        for j in range(r + 1, n):
            if work[j] & bit:
                work[j] ^= prow
        r += 1
    return r


def reduce_columns(cols):
    """Standard persistence reduction (left-to-right, by lowest one = highest bit).

    Returns ``(reduced, lows)`` with ``lows[j] == -1`` for zero columns.
    """
    work = list(cols)
    owner = {}
    lows = []
    for j, c in enumerate(work):
        low = -1
        while c:
            low = c.bit_length() - 1
            k = owner.get(low)
            if k is None:
                owner[low] = j
                break
            c ^= work[k]
            low = -1
        work[j] = c
        lows.append(low)
    return work, lows
