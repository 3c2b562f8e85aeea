"""Pure numpy BFS over CSR adjacency (fallback for the Cython kernel)."""
import numpy as np


def bfs_distances(indptr, indices, sources, blocked=None):
    n = len(indptr) - 1
    dist = np.full(n, -1, dtype=np.int32)
    if blocked is None:
        blocked = np.zeros(n, dtype=bool)
    sources = np.asarray(sources, dtype=np.int64)
    sources = sources[~blocked[sources]] if len(sources) else sources
    if len(sources) == 0:
        return dist
    dist[sources] = 0
    frontier = np.unique(sources)
    d = 0
    while len(frontier):
        counts = indptr[frontier + 1] - indptr[frontier]
        total = int(counts.sum())
        if total == 0:
            break
        starts = np.repeat(indptr[frontier], counts)
        offs = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
        nbrs = indices[starts + offs]
        nbrs = nbrs[(dist[nbrs] == -1) & ~blocked[nbrs]]
        if len(nbrs) == 0:
            break
        frontier = np.unique(nbrs)
        d += 1
        dist[frontier] = d
    return dist
