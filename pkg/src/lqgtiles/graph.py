"""Square-adjacency graph of a tiling, BFS distances and ball profiles.

Two squares are adjacent iff their closed boxes share a boundary segment
of positive length (single-corner contact excluded).  Adjacency is
computed with exact integer arithmetic after normalizing all squares to
the finest level present.  Unresolved depth-cap cells participate as
*blocked* nodes: they break paths and trigger truncation flags but are
never traversed.

Memory note: BFS state is O(nodes); near-singular tilings in the q < 2
phase can hold millions of tiny squares around each unresolved cell, so
ball queries on deep tilings should budget ~50 bytes per square.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .kernels import bfs_distances
from .tiling import Tiling, _cell_candidates


def _interval_join(xs_a, y0_a, y1_a, id_a, xs_b, y0_b, y1_b, id_b):
    """Pairs (i, j) with xs_a[i] == xs_b[j] and positive-length overlap of
    [y0_a, y1_a] and [y0_b, y1_b].  Same-side intervals must be disjoint."""
    if len(xs_a) == 0 or len(xs_b) == 0:
        return (np.array([], dtype=np.int64),) * 2
    # rank-remap coordinates so composite keys fit in int64
    all_y = np.concatenate([y0_a, y1_a, y0_b, y1_b])
    uy = np.unique(all_y)
    ry0_a = np.searchsorted(uy, y0_a)
    ry1_a = np.searchsorted(uy, y1_a)
    ry0_b = np.searchsorted(uy, y0_b)
    ry1_b = np.searchsorted(uy, y1_b)
    ux = np.unique(np.concatenate([xs_a, xs_b]))
    rx_a = np.searchsorted(ux, xs_a)
    rx_b = np.searchsorted(ux, xs_b)
    mod = np.int64(len(uy) + 1)

    order = np.lexsort((ry0_b, rx_b))
    rx_b, ry0_b, ry1_b, id_b = rx_b[order], ry0_b[order], ry1_b[order], id_b[order]
    key_y1 = rx_b * mod + ry1_b
    key_y0 = rx_b * mod + ry0_b
    # first b with y1 > y0_a, first b with y0 >= y1_a (within the same x block)
    lo = np.searchsorted(key_y1, rx_a * mod + ry0_a, side="right")
    hi = np.searchsorted(key_y0, rx_a * mod + ry1_a, side="left")
    counts = np.maximum(hi - lo, 0)
    total = int(counts.sum())
    if total == 0:
        return (np.array([], dtype=np.int64),) * 2
    left = np.repeat(id_a, counts)
    before = np.cumsum(counts) - counts
    idx = np.arange(total) + np.repeat(lo - before, counts)
    return left, id_b[idx]


def build_edges(levels, ixs, iys):
    """Undirected adjacency edges (u, v) among same-indexed squares."""
    levels = np.asarray(levels, dtype=np.int64)
    ixs = np.asarray(ixs, dtype=np.int64)
    iys = np.asarray(iys, dtype=np.int64)
    if len(levels) == 0:
        return np.array([], dtype=np.int64), np.array([], dtype=np.int64)
    lmax = int(levels.max())
    shift = lmax - levels
    bx = ixs << shift
    by = iys << shift
    size = np.int64(1) << shift

    us, vs = [], []
    for axis in (0, 1):
        main = bx if axis == 0 else by
        perp0 = by if axis == 0 else bx
        perp1 = perp0 + size
        # A's high edge meets B's low edge
        u, v = _interval_join(main + size, perp0, perp1, np.arange(len(bx)),
                              main, perp0, perp1, np.arange(len(bx)))
        us.append(u)
        vs.append(v)
    u = np.concatenate(us)
    v = np.concatenate(vs)
    return u, v


@dataclass
class BallProfile:
    center: tuple
    counts: np.ndarray        # cumulative #B_r, index = radius
    truncated: np.ndarray     # per-radius flags
    trunc_radius: int | None  # first radius at which truncation bites


class AdjacencyGraph:
    """CSR adjacency over accepted squares (+ blocked unresolved cells)."""

    def __init__(self, tiling: Tiling):
        self.tiling = tiling
        n_open = len(tiling.levels)
        n_blk = len(tiling.un_levels)
        self.n_open = n_open
        levels = np.concatenate([tiling.levels, tiling.un_levels])
        ixs = np.concatenate([tiling.ixs, tiling.un_ixs])
        iys = np.concatenate([tiling.iys, tiling.un_iys])
        self.blocked = np.zeros(n_open + n_blk, dtype=bool)
        self.blocked[n_open:] = True

        u, v = build_edges(levels, ixs, iys)
        uu = np.concatenate([u, v])
        vv = np.concatenate([v, u])
        order = np.argsort(uu, kind="stable")
        uu, vv = uu[order], vv[order]
        n = n_open + n_blk
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, uu + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        self.indices = vv.astype(np.int64)

        # locator: per-level sorted packed keys (ix << 32 | iy) -> node id
        self._loc: dict[int, tuple[np.ndarray, np.ndarray]] = {}
        for lv in np.unique(levels):
            m = levels == lv
            keys = (ixs[m].astype(np.int64) << 32) | iys[m].astype(np.int64)
            nodes = np.flatnonzero(m)
            order = np.argsort(keys)
            self._loc[int(lv)] = (keys[order], nodes[order])

        # truncation sources: blocked-adjacent or domain-boundary squares
        dom = tiling.domain
        lshift = levels - dom.level
        span = np.int64(1) << np.maximum(lshift, 0)
        relx = ixs - (dom.ix << np.maximum(lshift, 0))
        rely = iys - (dom.iy << np.maximum(lshift, 0))
        on_boundary = ((relx == 0) | (relx == span - 1)
                       | (rely == 0) | (rely == span - 1))
        blk_adj = np.zeros(n, dtype=bool)
        if n_blk and len(self.indices):
            # any-blocked-neighbor via segment reduction over CSR rows
            seg = np.repeat(np.arange(n), np.diff(self.indptr))
            np.logical_or.at(blk_adj, seg, self.blocked[self.indices])
        self.trunc_source = (on_boundary | blk_adj) & ~self.blocked

    # -- queries ------------------------------------------------------------

    def locate(self, x: float, y: float, include_blocked: bool = False):
        """Node ids of squares whose closed box contains (x, y)."""
        out = []
        for lv, (keys, nodes) in self._loc.items():
            for cx in _cell_candidates(x, lv):
                for cy in _cell_candidates(y, lv):
                    if cx < 0 or cy < 0:
                        continue
                    key = (cx << 32) | cy
                    j = np.searchsorted(keys, key)
                    if j < len(keys) and keys[j] == key:
                        i = int(nodes[j])
                        if include_blocked or not self.blocked[i]:
                            out.append(i)
        return out

    def distances_from(self, sources):
        return bfs_distances(self.indptr, self.indices,
                             np.asarray(sources, dtype=np.int64), self.blocked)

    def distance(self, z, w):
        """Minimal step count between squares containing z and w, or None."""
        src = self.locate(*z)
        dst = self.locate(*w)
        if not src or not dst:
            return None
        common = set(src) & set(dst)
        if common:
            return 0
        dist = self.distances_from(src)
        best = dist[np.array(dst)]
        best = best[best >= 0]
        return int(best.min()) if len(best) else None

    def region_nodes(self, region):
        m = region_mask(region, self.tiling.levels, self.tiling.ixs,
                        self.tiling.iys)
        return np.flatnonzero(m)

    def set_distance(self, region_a, region_b):
        """Multi-source BFS distance between squares meeting two regions."""
        a = self.region_nodes(region_a)
        b = self.region_nodes(region_b)
        if len(a) == 0 or len(b) == 0:
            return None
        dist = self.distances_from(a)
        best = dist[b]
        best = best[best >= 0]
        return int(best.min()) if len(best) else None

    def ball_profile(self, center, r_max: int) -> BallProfile:
        src = self.locate(*center)
        if not src:
            if self.locate(*center, include_blocked=True):
                raise DomainError("center lies only in unresolved cells")
            raise DomainError("center is not covered by any square")
        dist = self.distances_from(src)
        open_d = dist[:self.n_open]
        reached = open_d[open_d >= 0]
        counts = np.zeros(r_max + 1, dtype=np.int64)
        binned = np.bincount(np.minimum(reached, r_max + 1),
                             minlength=r_max + 2)[:r_max + 1]
        counts = np.cumsum(binned)
        ts = dist[self.trunc_source]
        ts = ts[ts >= 0]
        trunc_radius = int(ts.min()) if len(ts) else None
        radii = np.arange(r_max + 1)
        truncated = (radii >= trunc_radius) if trunc_radius is not None \
            else np.zeros(r_max + 1, dtype=bool)
        return BallProfile(center=tuple(center), counts=counts,
                           truncated=truncated, trunc_radius=trunc_radius)


def region_mask(region, levels, ixs, iys):
    """Boolean mask of squares meeting a region.

    Regions: ("point", x, y), ("disk", cx, cy, r), ("rect", x0, x1, y0, y1)
    or any object with an ``intersects_grid(level, ix, iy)`` method.
    """
    if hasattr(region, "intersects_grid"):
        out = np.zeros(len(levels), dtype=bool)
        for lv in np.unique(levels):
            m = levels == lv
            out[m] = region.intersects_grid(int(lv), ixs[m], iys[m])
        return out
    kind = region[0]
    side = 2.0 ** (-levels.astype(float))
    x0 = ixs * side
    x1 = x0 + side
    y0 = iys * side
    y1 = y0 + side
    if kind == "point":
        _, px, py = region
        return (x0 <= px) & (px <= x1) & (y0 <= py) & (py <= y1)
    if kind == "rect":
        _, ax0, ax1, ay0, ay1 = region
        return (x1 >= ax0) & (x0 <= ax1) & (y1 >= ay0) & (y0 <= ay1)
    if kind == "disk":
        _, cx, cy, r = region
        nx = np.clip(cx, x0, x1)
        ny = np.clip(cy, y0, y1)
        return (nx - cx) ** 2 + (ny - cy) ** 2 <= r * r
    raise DomainError(f"unknown region {region!r}")
