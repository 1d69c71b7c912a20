"""Two-round random bipartite digraph ``B_{n,m}``.

Round 1: every row and every column selects one vertex of the opposite side
uniformly at random. A vertex selected by at most ``m`` vertices in round 1
is *unpopular*. Round 2: every unpopular vertex makes one more uniform
selection. ``m = INF`` makes every vertex unpopular, i.e. ``B_n(2)``.

Draws come from :mod:`pmdigraph.rng`, keyed per vertex, so the round-2 draw
of a vertex is the same whatever ``m`` is. Raising ``m`` can therefore only
add edges for a fixed seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import rng

INF = math.inf

# rng stream ids
ROW_ROUND1, COL_ROUND1, ROW_ROUND2, COL_ROUND2 = 0, 1, 2, 3

NO_SELECTION = -1


def _check_m(m) -> None:
    if m == INF:
        return
    if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 0:
        raise ValueError(f"m must be a non-negative integer or INF, got {m!r}")


@dataclass(frozen=True)
class ModelParams:
    n: int
    m: int | float = 1
    seed: int = 0

    def __post_init__(self):
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        _check_m(self.m)
        if not 0 <= self.seed <= rng.MASK64:
            raise ValueError("seed must fit in 64 unsigned bits")


@dataclass(frozen=True, eq=False)
class BipartiteGraph:
    """Simple undirected bipartite graph on ``n`` rows and ``n`` columns.

    Both adjacency directions are stored in CSR form with sorted neighbor
    lists: the neighbors of row ``i`` are
    ``row_indices[row_indptr[i]:row_indptr[i + 1]]`` and likewise for columns.
    """

    n: int
    row_indptr: np.ndarray
    row_indices: np.ndarray
    col_indptr: np.ndarray
    col_indices: np.ndarray

    @classmethod
    def from_edges(cls, n: int, rows, cols) -> "BipartiteGraph":
        rows = np.asarray(rows, dtype=np.int64)
        cols = np.asarray(cols, dtype=np.int64)
        if rows.shape != cols.shape:
            raise ValueError("rows and cols must have equal length")
        if rows.size and (rows.min() < 0 or rows.max() >= n or cols.min() < 0 or cols.max() >= n):
            raise ValueError("edge endpoint out of range")
        keys = np.unique(rows * n + cols)
        r, c = keys // n, keys % n
        row_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(r, minlength=n), out=row_indptr[1:])
        order = np.lexsort((r, c))
        col_indptr = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(c, minlength=n), out=col_indptr[1:])
        return cls(n, row_indptr, c.copy(), col_indptr, r[order])

    @property
    def num_edges(self) -> int:
        return int(self.row_indices.size)

    def row_neighbors(self, i: int) -> np.ndarray:
        return self.row_indices[self.row_indptr[i]:self.row_indptr[i + 1]]

    def col_neighbors(self, j: int) -> np.ndarray:
        return self.col_indices[self.col_indptr[j]:self.col_indptr[j + 1]]

    def edges(self) -> list[tuple[int, int]]:
        deg = np.diff(self.row_indptr)
        r = np.repeat(np.arange(self.n), deg)
        return list(zip(r.tolist(), self.row_indices.tolist()))

    def __eq__(self, other):
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (self.n == other.n
                and np.array_equal(self.row_indptr, other.row_indptr)
                and np.array_equal(self.row_indices, other.row_indices))


@dataclass(frozen=True, eq=False)
class BipartiteDigraph:
    """Selection records of one draw plus the derived simple graph.

    ``round1_row[i]`` is the column selected by row ``i`` in round 1, and
    ``round1_col[j]`` the row selected by column ``j``. ``round2_row[i]`` is
    the round-2 column of row ``i`` or ``NO_SELECTION`` (-1) for popular rows.
    ``m`` is ``None`` for the one-round model ``B_n(1)``.
    """

    n: int
    m: int | float | None
    seed: int
    round1_row: np.ndarray
    round1_col: np.ndarray
    round2_row: np.ndarray
    round2_col: np.ndarray
    adjacency: BipartiteGraph = field(repr=False)

    @classmethod
    def from_selections(cls, n, m, seed, round1_row, round1_col, round2_row, round2_col):
        round1_row = np.asarray(round1_row, dtype=np.int64)
        round1_col = np.asarray(round1_col, dtype=np.int64)
        round2_row = np.asarray(round2_row, dtype=np.int64)
        round2_col = np.asarray(round2_col, dtype=np.int64)
        ar = np.arange(n, dtype=np.int64)
        has_r2 = round2_row >= 0
        has_c2 = round2_col >= 0
        rows = np.concatenate([ar, round1_col, ar[has_r2], round2_col[has_c2]])
        cols = np.concatenate([round1_row, ar, round2_row[has_r2], ar[has_c2]])
        adj = BipartiteGraph.from_edges(n, rows, cols)
        return cls(n, m, seed, round1_row, round1_col, round2_row, round2_col, adj)

    def row_in_degree(self) -> np.ndarray:
        """Round-1 selections received by each row."""
        return np.bincount(self.round1_col, minlength=self.n)

    def col_in_degree(self) -> np.ndarray:
        return np.bincount(self.round1_row, minlength=self.n)

    @property
    def unpopular_rows(self) -> np.ndarray:
        return np.flatnonzero(self.round2_row >= 0)

    @property
    def unpopular_cols(self) -> np.ndarray:
        return np.flatnonzero(self.round2_col >= 0)

    def round2_row_map(self) -> dict[int, int]:
        idx = self.unpopular_rows
        return dict(zip(idx.tolist(), self.round2_row[idx].tolist()))

    def round2_col_map(self) -> dict[int, int]:
        idx = self.unpopular_cols
        return dict(zip(idx.tolist(), self.round2_col[idx].tolist()))

    def out_degree_rows(self) -> np.ndarray:
        """Selections made by each row (1 or 2), counting repeats."""
        return 1 + (self.round2_row >= 0)

    def out_degree_cols(self) -> np.ndarray:
        return 1 + (self.round2_col >= 0)

    def __eq__(self, other):
        if not isinstance(other, BipartiteDigraph):
            return NotImplemented
        return (self.n == other.n and self.m == other.m and self.seed == other.seed
                and all(np.array_equal(getattr(self, a), getattr(other, a))
                        for a in ("round1_row", "round1_col", "round2_row", "round2_col")))


def _round1(n: int, seed: int):
    ids = np.arange(n, dtype=np.uint64)
    return (rng.uniform_below(n, seed, ROW_ROUND1, ids),
            rng.uniform_below(n, seed, COL_ROUND1, ids))


def generate(params: ModelParams) -> BipartiteDigraph:
    """Draw ``B_{n,m}`` for ``params``; a pure function of ``(n, m, seed)``."""
    n, m, seed = params.n, params.m, params.seed
    r1_row, r1_col = _round1(n, seed)
    ids = np.arange(n, dtype=np.uint64)
    # round-2 draws exist for every vertex; popular vertices ignore theirs
    r2_row = rng.uniform_below(n, seed, ROW_ROUND2, ids)
    r2_col = rng.uniform_below(n, seed, COL_ROUND2, ids)
    row_indeg = np.bincount(r1_col, minlength=n)
    col_indeg = np.bincount(r1_row, minlength=n)
    if m != INF:
        r2_row = np.where(row_indeg <= m, r2_row, NO_SELECTION)
        r2_col = np.where(col_indeg <= m, r2_col, NO_SELECTION)
    return BipartiteDigraph.from_selections(n, m, seed, r1_row, r1_col, r2_row, r2_col)


def one_round_graph(n: int, seed: int = 0) -> BipartiteDigraph:
    """``B_n(1)``: round 1 only, every vertex has out-degree 1."""
    if n < 1:
        raise ValueError("n must be positive")
    r1_row, r1_col = _round1(n, seed)
    none = np.full(n, NO_SELECTION, dtype=np.int64)
    return BipartiteDigraph.from_selections(n, None, seed, r1_row, r1_col, none, none.copy())


def expected_out_degree(m) -> float:
    """Limiting mean out-degree ``1 + P(Poisson(1) <= m)``."""
    _check_m(m)
    if m == INF:
        return 2.0
    term, total = 1.0, 1.0
    for j in range(1, int(m) + 1):
        term /= j
        total += term
    return 1.0 + math.exp(-1.0) * total
