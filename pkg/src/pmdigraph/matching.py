"""Maximum matchings, Hall witnesses and components of the simple graph."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .model import BipartiteGraph

UNMATCHED = -1


def _adjacency(graph) -> BipartiteGraph:
    return getattr(graph, "adjacency", graph)


@dataclass(frozen=True, eq=False)
class MatchingResult:
    size: int
    row_match: np.ndarray
    col_match: np.ndarray

    @property
    def is_perfect(self) -> bool:
        return self.size == self.row_match.size


@dataclass(frozen=True)
class HallWitness:
    """A deficient set ``K`` with neighborhood ``L = Γ(K)``, ``|L| < |K|``.

    ``side`` is ``"row"`` when ``K`` is a set of rows (and ``L`` columns), or
    ``"col"`` for the transposed case.
    """

    K: frozenset
    L: frozenset
    side: str
    minimal: bool

    @property
    def deficiency(self) -> int:
        return len(self.K) - len(self.L)


def _hopcroft_karp(n: int, indptr: list, indices: list):
    match_r = [UNMATCHED] * n
    match_c = [UNMATCHED] * n
    for i in range(n):
        for p in range(indptr[i], indptr[i + 1]):
            j = indices[p]
            if match_c[j] < 0:
                match_r[i] = j
                match_c[j] = i
                break

    while True:
        dist = [-1] * n
        queue = [i for i in range(n) if match_r[i] < 0]
        for i in queue:
            dist[i] = 0
        found = False
        head = 0
        while head < len(queue):
            i = queue[head]
            head += 1
            d = dist[i] + 1
            for p in range(indptr[i], indptr[i + 1]):
                i2 = match_c[indices[p]]
                if i2 < 0:
                    found = True
                elif dist[i2] < 0:
                    dist[i2] = d
                    queue.append(i2)
        if not found:
            break

        ptr = indptr[:-1]
        for s in range(n):
            if match_r[s] >= 0:
                continue
            stack = [s]
            while stack:
                i = stack[-1]
                end = indptr[i + 1]
                pushed = False
                while ptr[i] < end:
                    j = indices[ptr[i]]
                    ptr[i] += 1
                    i2 = match_c[j]
                    if i2 < 0:
                        for row in reversed(stack):
                            prev = match_r[row]
                            match_r[row] = j
                            match_c[j] = row
                            j = prev
                        stack.clear()
                        pushed = True
                        break
                    if dist[i2] == dist[i] + 1:
                        stack.append(i2)
                        pushed = True
                        break
                if not pushed:
                    dist[i] = -1
                    stack.pop()
    return match_r, match_c


def max_matching(graph) -> MatchingResult:
    """Maximum-cardinality matching by Hopcroft-Karp.

    Accepts a :class:`~pmdigraph.model.BipartiteDigraph` or a bare
    :class:`~pmdigraph.model.BipartiteGraph`. Deterministic: neighbor lists
    are sorted and rows are scanned in index order.
    """
    adj = _adjacency(graph)
    match_r, match_c = _hopcroft_karp(adj.n, adj.row_indptr.tolist(), adj.row_indices.tolist())
    row_match = np.asarray(match_r, dtype=np.int64)
    col_match = np.asarray(match_c, dtype=np.int64)
    return MatchingResult(int((row_match >= 0).sum()), row_match, col_match)


def has_augmenting_path(graph, result: MatchingResult) -> bool:
    """One alternating BFS from the free rows; True if a free column is reachable."""
    adj = _adjacency(graph)
    seen = np.zeros(adj.n, dtype=bool)
    queue = deque(np.flatnonzero(result.row_match < 0).tolist())
    for i in queue:
        seen[i] = True
    while queue:
        i = queue.popleft()
        for j in adj.row_neighbors(i).tolist():
            i2 = int(result.col_match[j])
            if i2 < 0:
                return True
            if not seen[i2]:
                seen[i2] = True
                queue.append(i2)
    return False


def _alternating_reach(start, nbrs, match_other):
    K = {start}
    L = set()
    queue = deque([start])
    while queue:
        a = queue.popleft()
        for b in nbrs(a).tolist():
            if b in L:
                continue
            L.add(b)
            a2 = int(match_other[b])
            if a2 >= 0 and a2 not in K:
                K.add(a2)
                queue.append(a2)
    return K, L


def hall_witness(graph, result: MatchingResult | None = None, side: str | None = None):
    """Deficient set certifying that no perfect matching exists, or ``None``.

    From the lowest-index unmatched vertex, ``K`` collects the same-side
    vertices reachable by alternating paths and ``L = Γ(K)``. With a maximum
    matching every vertex of ``L`` is matched into ``K``, so
    ``|L| = |K| - 1``. Rows are tried first, then columns.
    """
    adj = _adjacency(graph)
    if result is None:
        result = max_matching(adj)
    if result.is_perfect:
        return None
    sides = ("row", "col") if side is None else (side,)
    for s in sides:
        if s == "row":
            free = np.flatnonzero(result.row_match < 0)
            nbrs, other_nbrs, match_other = adj.row_neighbors, adj.col_neighbors, result.col_match
        elif s == "col":
            free = np.flatnonzero(result.col_match < 0)
            nbrs, other_nbrs, match_other = adj.col_neighbors, adj.row_neighbors, result.row_match
        else:
            raise ValueError(f"side must be 'row' or 'col', got {s!r}")
        if free.size == 0:
            continue
        K, L = _alternating_reach(int(free[0]), nbrs, match_other)
        minimal = len(L) == len(K) - 1 and all(
            sum(a in K for a in other_nbrs(b).tolist()) >= 2 for b in L)
        return HallWitness(frozenset(K), frozenset(L), s, minimal)
    return None


def neighborhood(graph, vertices, side: str = "row") -> set:
    """``Γ(vertices)`` in the simple graph."""
    adj = _adjacency(graph)
    nbrs = adj.row_neighbors if side == "row" else adj.col_neighbors
    out = set()
    for v in vertices:
        out.update(nbrs(v).tolist())
    return out


def components(graph) -> list[tuple[int, int, int]]:
    """Connected components as ``(row_count, col_count, size)``, largest first."""
    adj = _adjacency(graph)
    n = adj.n
    deg = np.diff(adj.row_indptr)
    r = np.repeat(np.arange(n), deg)
    c = adj.row_indices + n
    mat = coo_matrix((np.ones(r.size, dtype=np.int8), (r, c)), shape=(2 * n, 2 * n))
    _, labels = connected_components(mat, directed=False)
    rows = np.bincount(labels[:n], minlength=labels.max() + 1)
    cols = np.bincount(labels[n:], minlength=labels.max() + 1)
    comps = [(int(a), int(b), int(a + b)) for a, b in zip(rows, cols)]
    comps.sort(key=lambda rc: (-rc[2], -rc[0], -rc[1]))
    return comps
