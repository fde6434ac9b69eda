"""Disjoint-set forest over the integers 0..n-1."""
from typing import Iterable

import numpy as np


class UnionFind:
    """Array-based union-find with path compression and union by rank.

    Elements are the integers ``0..n-1``; every element starts as its own
    singleton set.
    """

    def __init__(self, n: int):
        self._parents = list(range(n))
        self._ranks = [0] * n

    def __len__(self):
        return len(self._parents)

    def find(self, a: int) -> int:
        parents = self._parents
        root = a
        while parents[root] != root:
            root = parents[root]
        # compress
        while parents[a] != root:
            parents[a], a = root, parents[a]
        return root

    def union(self, a: int, b: int) -> bool:
        root_a = self.find(a)
        root_b = self.find(b)
        if root_a == root_b:
            return False
        rank_a = self._ranks[root_a]
        rank_b = self._ranks[root_b]
        if rank_a < rank_b:
            self._parents[root_a] = root_b
        elif rank_a > rank_b:
            self._parents[root_b] = root_a
        else:
            self._parents[root_b] = root_a
            self._ranks[root_a] += 1
        return True

    def union_pairs(self, pairs: Iterable[tuple[int, int]]):
        for a, b in pairs:
            self.union(int(a), int(b))

    def roots(self) -> np.ndarray:
        return np.fromiter(
            (self.find(i) for i in range(len(self._parents))),
            dtype=np.int64,
            count=len(self._parents),
        )

    def labels(self) -> np.ndarray:
        """Canonical labels 0..k-1, numbered by first occurrence."""
        roots = self.roots()
        if roots.size == 0:
            return roots
        _, first, inverse = np.unique(
            roots, return_index=True, return_inverse=True
        )
        order = np.argsort(np.argsort(first))
        return order[inverse].astype(np.int64)
