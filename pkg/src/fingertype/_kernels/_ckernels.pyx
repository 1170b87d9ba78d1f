"""Compiled kernels: edit-operation counting and trie search.

Behaviour must match fingertype._kernels._pykernels exactly; the
parity tests compare the two backends value for value.
"""

import numpy as np

BACKEND = "cython"


def edit_ops(ref, hyp):
    """Count (substitutions, deletions, insertions) for aligning hyp
    against ref with unit costs.  Ties are broken while backtracking
    from the end, preferring substitution, then deletion, then
    insertion."""
    cdef int[::1] a = np.ascontiguousarray(ref, dtype=np.int32)
    cdef int[::1] b = np.ascontiguousarray(hyp, dtype=np.int32)
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t m = b.shape[0]
    cdef int[:, ::1] dist = np.empty((n + 1, m + 1), dtype=np.int32)
    cdef Py_ssize_t i, j
    cdef int sub, dele, ins, best, here
    dist[0, 0] = 0
    for j in range(1, m + 1):
        dist[0, j] = <int> j
    for i in range(1, n + 1):
        dist[i, 0] = <int> i
        for j in range(1, m + 1):
            sub = dist[i - 1, j - 1] + (a[i - 1] != b[j - 1])
            dele = dist[i - 1, j] + 1
            ins = dist[i, j - 1] + 1
            best = sub
            if dele < best:
                best = dele
            if ins < best:
                best = ins
            dist[i, j] = best
    cdef int subs = 0, dels = 0, inss = 0
    i = n
    j = m
    while i > 0 or j > 0:
        here = dist[i, j]
        if i > 0 and j > 0 and dist[i - 1, j - 1] + (a[i - 1] != b[j - 1]) == here:
            subs += a[i - 1] != b[j - 1]
            i -= 1
            j -= 1
        elif i > 0 and dist[i - 1, j] + 1 == here:
            dels += 1
            i -= 1
        else:
            inss += 1
            j -= 1
    return subs, dels, inss


cdef class _Trie:
    cdef int[::1] first_edge
    cdef signed char[::1] letters
    cdef int[::1] children
    cdef unsigned char[::1] terminal


def prepare_trie(first_edge, edge_letter, edge_child, terminal):
    """Convert CSR trie arrays into this backend's search handle."""
    cdef _Trie t = _Trie()
    t.first_edge = np.ascontiguousarray(first_edge, dtype=np.int32)
    t.letters = np.ascontiguousarray(edge_letter, dtype=np.int8)
    t.children = np.ascontiguousarray(edge_child, dtype=np.int32)
    t.terminal = np.ascontiguousarray(terminal, dtype=np.uint8)
    return t


cdef void _walk(_Trie t, unsigned char[:, ::1] mask, Py_ssize_t depth,
                int node, Py_ssize_t d, bytearray path, list out):
    cdef Py_ssize_t e
    cdef int li, child
    cdef bint last = d + 1 == depth
    for e in range(t.first_edge[node], t.first_edge[node + 1]):
        li = t.letters[e]
        if mask[d, li]:
            path[d] = 97 + li
            child = t.children[e]
            if last:
                if t.terminal[child]:
                    out.append(path.decode("ascii"))
            else:
                _walk(t, mask, depth, child, d + 1, path, out)


def trie_search(trie, mask):
    """Find all trie words matching the (depth, 26) position mask, in
    lexicographic order."""
    cdef _Trie t = trie
    cdef unsigned char[:, ::1] m = np.ascontiguousarray(mask, dtype=np.uint8)
    cdef Py_ssize_t depth = m.shape[0]
    out: list = []
    if depth == 0:
        return out
    path = bytearray(depth)
    _walk(t, m, depth, 0, 0, path, out)
    return out
