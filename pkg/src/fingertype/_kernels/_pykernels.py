"""Pure-Python kernels.

These mirror the compiled kernels in ``_ckernels`` exactly; the
package selects one implementation at import time (see
``fingertype._kernels``).  Both backends must return identical values
for identical inputs.
"""

from __future__ import annotations

BACKEND = "python"


def edit_ops(ref, hyp):
    """Count edit operations in a minimum-cost alignment.

    Returns ``(substitutions, deletions, insertions)`` for aligning
    ``hyp`` against ``ref`` with unit costs.  The alignment is made
    deterministic by backtracking from the end of the distance matrix
    and preferring substitution (or match), then deletion, then
    insertion whenever several steps explain the same cost.
    """
    a = list(ref)
    b = list(hyp)
    n, m = len(a), len(b)
    width = m + 1
    dist = [0] * ((n + 1) * width)
    for j in range(1, width):
        dist[j] = j
    for i in range(1, n + 1):
        row = i * width
        prev_row = row - width
        dist[row] = i
        ai = a[i - 1]
        for j in range(1, width):
            sub = dist[prev_row + j - 1] + (ai != b[j - 1])
            dele = dist[prev_row + j] + 1
            ins = dist[row + j - 1] + 1
            best = sub
            if dele < best:
                best = dele
            if ins < best:
                best = ins
            dist[row + j] = best
    subs = dels = inss = 0
    i, j = n, m
    while i > 0 or j > 0:
        here = dist[i * width + j]
        if i > 0 and j > 0 and dist[(i - 1) * width + j - 1] + (a[i - 1] != b[j - 1]) == here:
            subs += a[i - 1] != b[j - 1]
            i -= 1
            j -= 1
        elif i > 0 and dist[(i - 1) * width + j] + 1 == here:
            dels += 1
            i -= 1
        else:
            inss += 1
            j -= 1
    # plain ints even when the inputs are numpy scalars, to match the
    # compiled backend exactly
    return int(subs), int(dels), int(inss)


def prepare_trie(first_edge, edge_letter, edge_child, terminal):
    """Convert CSR trie arrays into this backend's search handle."""
    return (
        list(first_edge),
        list(edge_letter),
        list(edge_child),
        list(terminal),
    )


def trie_search(trie, mask):
    """Find all trie words whose letter at each position is allowed.

    ``mask`` is a (depth, 26) array of 0/1 flags.  Matches are emitted
    in lexicographic order because trie edges are stored sorted by
    letter.  Returns a list of lowercase strings of length ``depth``.
    """
    first_edge, letters, children, terminal = trie
    rows = [list(row) for row in mask]
    depth = len(rows)
    out: list[str] = []
    if depth == 0:
        return out
    path = bytearray(depth)

    def walk(node: int, d: int) -> None:
        row = rows[d]
        last = d + 1 == depth
        for e in range(first_edge[node], first_edge[node + 1]):
            li = letters[e]
            if row[li]:
                path[d] = 97 + li
                child = children[e]
                if last:
                    if terminal[child]:
                        out.append(path.decode("ascii"))
                else:
                    walk(child, d + 1)

    walk(0, 0)
    return out
