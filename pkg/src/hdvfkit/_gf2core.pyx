# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled GF(2) elimination kernels over bit-packed uint64 rows.

Same API and pivot rules as ``hdvfkit._gf2py``.
"""

import sys

from libc.stdint cimport uint64_t
from libc.stdlib cimport calloc, free, malloc
from libc.string cimport memcpy

if sys.byteorder != "little":
    raise ImportError("bit packing assumes a little-endian host")

NAME = "compiled"

cdef extern from *:
    int __builtin_clzll(unsigned long long x) nogil


cdef Py_ssize_t _width(list vals, Py_ssize_t minimum):
    cdef Py_ssize_t w = minimum
    cdef Py_ssize_t b
    for v in vals:
        b = v.bit_length()
        if b > w:
            w = b
    return w


cdef uint64_t* _pack(list vals, Py_ssize_t nwords) except NULL:
    cdef Py_ssize_t n = len(vals)
    cdef Py_ssize_t nbytes = nwords * 8
    cdef uint64_t* buf = <uint64_t*> calloc((n if n > 0 else 1) * nwords, sizeof(uint64_t))
    cdef bytes raw
    cdef Py_ssize_t i
    if buf == NULL:
        raise MemoryError()
    for i in range(n):
        raw = (<object> vals[i]).to_bytes(nbytes, "little")
        memcpy(buf + i * nwords, <const char*> raw, nbytes)
    return buf


cdef list _unpack(uint64_t* buf, Py_ssize_t n, Py_ssize_t nwords):
    cdef Py_ssize_t nbytes = nwords * 8
    cdef Py_ssize_t i
    from_bytes = int.from_bytes
    return [from_bytes((<char*> (buf + i * nwords))[:nbytes], "little") for i in range(n)]


cdef Py_ssize_t _eliminate(uint64_t* a, Py_ssize_t n, Py_ssize_t nwords,
                           Py_ssize_t ncols, Py_ssize_t* piv, bint full) noexcept nogil:
    cdef Py_ssize_t r = 0
    cdef Py_ssize_t col, i, j, w, word, start
    cdef uint64_t bit, t
    cdef uint64_t* prow
    cdef uint64_t* row
    for col in range(ncols):
        if r == n:
            break
        word = col >> 6
        bit = (<uint64_t> 1) << (col & 63)
        i = r
        while i < n and (a[i * nwords + word] & bit) == 0:
            i += 1
        if i == n:
            continue
        if i != r:
            for w in range(nwords):
                t = a[i * nwords + w]
                a[i * nwords + w] = a[r * nwords + w]
                a[r * nwords + w] = t
        prow = a + r * nwords
        # below the pivot, every column left of ``col`` is already clear
        start = 0 if full else word
        for j in range(0 if full else r + 1, n):
            row = a + j * nwords
            if j != r and (row[word] & bit):
                for w in range(start, nwords):
                    row[w] ^= prow[w]
        piv[r] = col
        r += 1
    return r


def rref(rows, Py_ssize_t ncols):
    cdef list work = list(rows)
    cdef Py_ssize_t n = len(work)
    cdef Py_ssize_t nwords, npiv, k
    cdef uint64_t* a
    cdef Py_ssize_t* piv
    if n == 0 or ncols <= 0:
        return work, []
    nwords = (_width(work, ncols) + 63) // 64
    a = _pack(work, nwords)
    piv = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    if piv == NULL:
        free(a)
        raise MemoryError()
    try:
        with nogil:
            npiv = _eliminate(a, n, nwords, ncols, piv, True)
        return _unpack(a, n, nwords), [piv[k] for k in range(npiv)]
    finally:
        free(a)
        free(piv)


def rank(rows, Py_ssize_t ncols):
    cdef list work = list(rows)
    cdef Py_ssize_t n = len(work)
    cdef Py_ssize_t nwords, npiv
    cdef uint64_t* a
    cdef Py_ssize_t* piv
    if n == 0 or ncols <= 0:
        return 0
    nwords = (_width(work, ncols) + 63) // 64
    a = _pack(work, nwords)
    piv = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    if piv == NULL:
        free(a)
        raise MemoryError()
    try:
        with nogil:
            npiv = _eliminate(a, n, nwords, ncols, piv, False)
        return npiv
    finally:
        free(a)
        free(piv)


cdef inline Py_ssize_t _low(uint64_t* row, Py_ssize_t nwords) noexcept nogil:
    cdef Py_ssize_t w = nwords - 1
    while w >= 0:
        if row[w]:
            return w * 64 + 63 - __builtin_clzll(row[w])
        w -= 1
    return -1


def reduce_columns(cols):
    cdef list work = list(cols)
    cdef Py_ssize_t n = len(work)
    cdef Py_ssize_t nwords, nbits, j, k, w, low
    cdef uint64_t* a
    cdef uint64_t* row
    cdef uint64_t* other
    cdef Py_ssize_t* owner
    cdef Py_ssize_t* lows
    if n == 0:
        return work, []
    nwords = (_width(work, 1) + 63) // 64
    nbits = nwords * 64
    a = _pack(work, nwords)
    owner = <Py_ssize_t*> malloc(nbits * sizeof(Py_ssize_t))
    lows = <Py_ssize_t*> malloc(n * sizeof(Py_ssize_t))
    if owner == NULL or lows == NULL:
        free(a)
        free(owner)
        free(lows)
        raise MemoryError()
    try:
        with nogil:
            for k in range(nbits):
                owner[k] = -1
            for j in range(n):
                row = a + j * nwords
                while True:
                    low = _low(row, nwords)
                    if low < 0:
                        break
                    k = owner[low]
                    if k < 0:
                        owner[low] = j
                        break
                    other = a + k * nwords
                    for w in range(nwords):
                        row[w] ^= other[w]
                lows[j] = low
        return _unpack(a, n, nwords), [lows[k] for k in range(n)]
    finally:
        free(a)
        free(owner)
        free(lows)
