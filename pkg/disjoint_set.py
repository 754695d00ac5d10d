"""
NashOverlap - Union-find over vertex ids
Used to extract connected components of a thresholded edge set.
"""

import numpy as np


class DisjointSet:
    """Union by rank with path compression on numpy arrays"""

    def __init__(self, num_vertices: int):
        self.ranks = np.zeros(num_vertices, dtype=np.int64)
        self.parents = np.arange(num_vertices, dtype=np.int64)

    def find(self, index: int) -> int:
        parents = self.parents
        root = index
        while root != parents[root]:
            root = parents[root]
        while parents[index] != root:
            parents[index], index = root, parents[index]
        return int(root)

    def merge(self, a: int, b: int) -> bool:
        """Union the sets of a and b; False if already joined"""
        a = self.find(a)
        b = self.find(b)
        if a == b:
            return False
        ranks = self.ranks
        parents = self.parents
        if ranks[a] < ranks[b]:
            parents[a] = b
        elif ranks[a] > ranks[b]:
            parents[b] = a
        else:
            parents[b] = a
            ranks[a] += 1
        return True

    def _compress(self):
        a = self.parents
        b = a[a]
        while (a != b).any():
            a = b
            b = a[a]
        self.parents = a

    def get_components(self) -> np.ndarray:
        """
        Component id per vertex, numbered 0.. in order of each component's
        smallest vertex.
        """
        self._compress()
        _, first_seen, inverse = np.unique(self.parents, return_index=True, return_inverse=True)
        rank_of_root = np.argsort(np.argsort(first_seen))
        return rank_of_root[inverse].astype(np.int64)
