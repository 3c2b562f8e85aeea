"""Lazy top-down dyadic subdivision against a field realization.

A square S is accepted when its mass exp(h_{|S|/2}(v_S)) |S|^Q is at most
epsilon; otherwise its four children are visited, down to a depth cap.
Depth-cap squares still exceeding epsilon are flagged unresolved
(singularity candidates).  Subdivision proceeds level by level with
batched field queries.

An optional restriction set limits the visit to squares meeting the set;
membership of a square in the tiling depends only on its own ancestor
chain, so the restricted run produces exactly the squares of the full
tiling that meet the restriction.
"""
import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DomainError
from .field import FieldRealization
from .params import Params
from .squares import DyadicSquare

_LOG2 = math.log(2.0)


def mass(sq: DyadicSquare, field: FieldRealization, params: Params) -> float:
    """LQG size exp(h_{|S|/2}(v_S)) |S|^Q of one square."""
    v = field.node_value(sq)
    if math.isinf(v) and v > 0:
        return math.inf
    return math.exp(v) * sq.side ** params.q


@dataclass
class Tiling:
    domain: DyadicSquare
    epsilon: float
    params: Params
    field_id: str
    depth_cap: int
    levels: np.ndarray          # accepted squares
    ixs: np.ndarray
    iys: np.ndarray
    masses: np.ndarray
    un_levels: np.ndarray       # unresolved depth-cap squares
    un_ixs: np.ndarray
    un_iys: np.ndarray
    un_masses: np.ndarray
    restricted: bool = False
    visited: int = 0

    def __len__(self):
        return len(self.levels)

    @property
    def n_unresolved(self):
        return len(self.un_levels)

    def squares(self) -> list[DyadicSquare]:
        return [DyadicSquare(int(l), int(x), int(y))
                for l, x, y in zip(self.levels, self.ixs, self.iys)]

    def unresolved(self) -> list[DyadicSquare]:
        return [DyadicSquare(int(l), int(x), int(y))
                for l, x, y in zip(self.un_levels, self.un_ixs, self.un_iys)]

    def square_arrays(self):
        return self.levels, self.ixs, self.iys

    def unresolved_arrays(self):
        return self.un_levels, self.un_ixs, self.un_iys

    def max_side(self) -> float:
        """Largest accepted side length."""
        if len(self.levels) == 0:
            raise DomainError("tiling has no accepted squares")
        return 2.0 ** (-int(self.levels.min()))

    def area_check(self) -> bool:
        """Exact area bookkeeping on integer levels."""
        cap = int(max(self.levels.max(initial=0), self.un_levels.max(initial=0)))
        total = 0
        for lv in np.r_[self.levels, self.un_levels]:
            total += 4 ** (cap - int(lv))
        return total == 4 ** (cap - self.domain.level)


def _sort_key(levels, ixs, iys):
    return np.lexsort((iys, ixs, levels))


def subdivide(domain: DyadicSquare, epsilon: float, field: FieldRealization,
              params: Params, depth_cap: int, restrict=None) -> Tiling:
    """Build the epsilon-tiling of the domain (optionally restricted)."""
    if epsilon <= 0.0:
        raise DomainError(f"epsilon must be > 0, got {epsilon}")
    if depth_cap <= domain.level:
        raise ConfigError(
            f"depth_cap {depth_cap} must exceed domain level {domain.level}")
    log_eps = math.log(epsilon)
    q = params.q

    acc_l, acc_x, acc_y, acc_m = [], [], [], []
    un_x, un_y, un_m = [], [], []
    visited = 0

    ix = np.array([domain.ix], dtype=np.int64)
    iy = np.array([domain.iy], dtype=np.int64)
    if restrict is not None:
        keep = restrict.intersects_grid(domain.level, ix, iy)
        ix, iy = ix[keep], iy[keep]

    level = domain.level
    while len(ix):
        half = 2.0 ** (-level - 1)
        cx = (2 * ix + 1) * half
        cy = (2 * iy + 1) * half
        vals = field.values(cx, cy, level + 1)
        visited += len(ix)
        logmass = vals - level * q * _LOG2
        accept = logmass <= log_eps
        if np.any(accept):
            acc_l.append(np.full(int(accept.sum()), level, dtype=np.int64))
            acc_x.append(ix[accept])
            acc_y.append(iy[accept])
            with np.errstate(over="ignore"):
                acc_m.append(np.exp(logmass[accept]))
        rej = ~accept
        if level == depth_cap:
            if np.any(rej):
                un_x.append(ix[rej])
                un_y.append(iy[rej])
                with np.errstate(over="ignore"):
                    un_m.append(np.exp(logmass[rej]))
            break
        rx, ry = ix[rej], iy[rej]
        # spawn the four children of every rejected square
        ix = np.repeat(2 * rx, 4) + np.tile(np.array([0, 1, 0, 1]), len(rx))
        iy = np.repeat(2 * ry, 4) + np.tile(np.array([0, 0, 1, 1]), len(ry))
        level += 1
        if restrict is not None and len(ix):
            keep = restrict.intersects_grid(level, ix, iy)
            ix, iy = ix[keep], iy[keep]

    def _gather(chunks, dtype=None):
        if not chunks:
            return np.array([], dtype=dtype if dtype else np.int64)
        return np.concatenate(chunks)

    levels = _gather(acc_l)
    ixs = _gather(acc_x)
    iys = _gather(acc_y)
    masses = _gather(acc_m, float)
    order = _sort_key(levels, ixs, iys)
    un_ixs = _gather(un_x)
    un_iys = _gather(un_y)
    un_masses = _gather(un_m, float)
    un_levels = np.full(len(un_ixs), depth_cap, dtype=np.int64)
    un_order = _sort_key(un_levels, un_ixs, un_iys)

    return Tiling(domain=domain, epsilon=float(epsilon), params=params,
                  field_id=field.fingerprint, depth_cap=depth_cap,
                  levels=levels[order], ixs=ixs[order], iys=iys[order],
                  masses=masses[order],
                  un_levels=un_levels[un_order], un_ixs=un_ixs[un_order],
                  un_iys=un_iys[un_order], un_masses=un_masses[un_order],
                  restricted=restrict is not None, visited=visited)


def containing_squares(tiling: Tiling, x: float, y: float,
                       include_unresolved: bool = False):
    """Indices of tiling squares whose closed box contains (x, y).

    Points on dyadic grid lines belong to every closed square touching
    them (up to 4 per level).  Returns (indices, unresolved_indices).
    """
    def _locate(levels, ixs, iys):
        found = []
        if len(levels) == 0:
            return found
        keys = {}
        for lv in np.unique(levels):
            m = levels == lv
            keys[int(lv)] = set(zip(ixs[m].tolist(), iys[m].tolist()))
        index_of = {(int(l), int(a), int(b)): i
                    for i, (l, a, b) in enumerate(zip(levels, ixs, iys))}
        for lv, members in keys.items():
            n = 1 << lv if lv >= 0 else 0
            for cx in _cell_candidates(x, lv):
                for cy in _cell_candidates(y, lv):
                    if (cx, cy) in members:
                        found.append(index_of[(lv, cx, cy)])
        return found

    hits = _locate(tiling.levels, tiling.ixs, tiling.iys)
    un_hits = _locate(tiling.un_levels, tiling.un_ixs, tiling.un_iys) \
        if include_unresolved else []
    return hits, un_hits


def _cell_candidates(coord: float, level: int) -> list[int]:
    t = coord * (2.0 ** level)
    c = math.floor(t)
    cands = [c]
    if t == c:
        cands.append(c - 1)
    return cands


def thick_point_estimate(z, field: FieldRealization, levels,
                         domain: DyadicSquare = DyadicSquare(0, 0, 0)):
    """Least-squares slope of h at the squares containing z against n log 2.

    On dyadic grid lines the square with lexicographically smallest
    (ix, iy) is used; returns (slope, on_gridline_flag).
    """
    levels = list(levels)
    if not levels:
        raise DomainError("empty level range")
    x, y = float(z[0]), float(z[1])
    xs, ys = [], []
    on_grid = False
    for n in levels:
        cxs = _cell_candidates(x, n)
        cys = _cell_candidates(y, n)
        if len(cxs) > 1 or len(cys) > 1:
            on_grid = True
        sq = DyadicSquare(n, min(cxs), min(cys))
        xs.append(n * _LOG2)
        ys.append(field.node_value(sq))
    if len(levels) == 1:
        return ys[0] / xs[0] if xs[0] else 0.0, on_grid
    slope = float(np.polyfit(xs, ys, 1)[0])
    return slope, on_grid
