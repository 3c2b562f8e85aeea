# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled BFS over CSR adjacency."""
import numpy as np
cimport numpy as cnp


def bfs_distances(cnp.int64_t[::1] indptr, cnp.int64_t[::1] indices,
                  sources, blocked=None):
    cdef Py_ssize_t n = indptr.shape[0] - 1
    dist_arr = np.full(n, -1, dtype=np.int32)
    cdef cnp.int32_t[::1] dist = dist_arr
    cdef cnp.uint8_t[::1] blk
    if blocked is None:
        blk = np.zeros(n, dtype=np.uint8)
    else:
        blk = np.ascontiguousarray(blocked, dtype=np.uint8)
    queue_arr = np.empty(n, dtype=np.int64)
    cdef cnp.int64_t[::1] queue = queue_arr
    cdef Py_ssize_t head = 0, tail = 0
    cdef cnp.int64_t s, u, v
    cdef Py_ssize_t j
    for s in np.asarray(sources, dtype=np.int64):
        if not blk[s] and dist[s] == -1:
            dist[s] = 0
            queue[tail] = s
            tail += 1
    while head < tail:
        u = queue[head]
        head += 1
        for j in range(indptr[u], indptr[u + 1]):
            v = indices[j]
            if dist[v] == -1 and not blk[v]:
                dist[v] = dist[u] + 1
                queue[tail] = v
                tail += 1
    return dist_arr
