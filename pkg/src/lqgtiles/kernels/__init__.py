"""Hot BFS kernels: compiled Cython core with a numpy fallback.

Set LQGTILES_PURE=1 to force the pure-python/numpy implementation.
Both implementations share the CSR-based API:

    bfs_distances(indptr, indices, sources, blocked) -> int32 distances
        (-1 unreachable; blocked nodes are never entered or used as sources)
"""
import os

if os.environ.get("LQGTILES_PURE") == "1":
    from . import _pykernels as _impl
    backend = "python"
else:
    try:
        from . import _ckernels as _impl
        backend = "cython"
    except ImportError:
        from . import _pykernels as _impl
        backend = "python"

bfs_distances = _impl.bfs_distances
