# cython: boundscheck=False, wraparound=False, cdivision=True
"""Packed-word GF(2) forward elimination."""
cimport cython
from libc.stdint cimport uint64_t


def eliminate(uint64_t[:, ::1] M, Py_ssize_t ncols):
    """Row-reduce ``M`` in place, pivoting only on the first ``ncols`` bits.

    Returns the rank.  Rows ``rank:`` end up zero on the pivot columns, so
    any bits they keep beyond ``ncols`` record the row combinations that
    produced them.
    """
    cdef Py_ssize_t nrows = M.shape[0]
    cdef Py_ssize_t nwords = M.shape[1]
    cdef Py_ssize_t rank = 0
    cdef Py_ssize_t col, r, p, w, word
    cdef uint64_t bit, tmp
    for col in range(ncols):
        if rank == nrows:
            break
        word = col >> 6
        bit = (<uint64_t>1) << (col & 63)
        p = -1
        for r in range(rank, nrows):
            if M[r, word] & bit:
                p = r
                break
        if p < 0:
            continue
        if p != rank:
            for w in range(word, nwords):
                tmp = M[p, w]
                M[p, w] = M[rank, w]
                M[rank, w] = tmp
        for r in range(p + 1, nrows):
            if M[r, word] & bit:
                for w in range(word, nwords):
                    M[r, w] ^= M[rank, w]
        rank += 1
    return rank
