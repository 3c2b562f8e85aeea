"""Deterministic test sets of known Euclidean dimension.

All sets live in the closed unit square and are built independently of any
field realization.  Intersection tests against dyadic squares are exact
(rational arithmetic); for Cantor-type sets the test uses the depth-d
cylinder cover of the iterated function system, which is a superset of the
true set, so the test is one-sided (may report an intersection that only
the cover has).  The construction depth must be at least square level + 2.
"""
import math
from fractions import Fraction

import numpy as np

from .errors import ConfigError, DomainError
from .squares import DyadicSquare

KINDS = ("point", "horizontal-segment", "square-boundary",
         "cantor-product", "cantor-dust", "rational-grid")


def _cover_intersects(a: Fraction, b: Fraction, lo: Fraction, hi: Fraction,
                      ratio: Fraction, depth: int) -> bool:
    """Does [a,b] meet the depth-d cylinder cover of the Cantor set on [lo,hi]?"""
    if b < lo or a > hi:
        return False
    if depth == 0:
        return True
    w = (hi - lo) * ratio
    return (_cover_intersects(a, b, lo, lo + w, ratio, depth - 1)
            or _cover_intersects(a, b, hi - w, hi, ratio, depth - 1))


class FractalSet:
    """A named deterministic subset of the closed unit square."""

    def __init__(self, kind: str, nominal_dimension: float, **params):
        if kind not in KINDS:
            raise ConfigError(f"unknown fractal kind {kind!r}")
        self.kind = kind
        self.nominal_dimension = float(nominal_dimension)
        self.params = params
        self._memo_x: dict = {}
        self._memo_y: dict = {}

    # -- constructors -------------------------------------------------------

    @staticmethod
    def point(x=Fraction(1, 2), y=Fraction(1, 2)) -> "FractalSet":
        return FractalSet("point", 0.0, x=Fraction(x), y=Fraction(y))

    @staticmethod
    def horizontal_segment(y=Fraction(1, 2), x0=Fraction(0), x1=Fraction(1)) -> "FractalSet":
        return FractalSet("horizontal-segment", 1.0,
                          y=Fraction(y), x0=Fraction(x0), x1=Fraction(x1))

    @staticmethod
    def square_boundary() -> "FractalSet":
        return FractalSet("square-boundary", 1.0)

    @staticmethod
    def cantor_product(ratio=Fraction(1, 3)) -> "FractalSet":
        ratio = Fraction(ratio)
        d = 1.0 + math.log(2) / math.log(1 / float(ratio))
        return FractalSet("cantor-product", d, ratio=ratio)

    @staticmethod
    def cantor_dust(ratio=Fraction(1, 3)) -> "FractalSet":
        ratio = Fraction(ratio)
        d = 2.0 * math.log(2) / math.log(1 / float(ratio))
        return FractalSet("cantor-dust", d, ratio=ratio)

    @staticmethod
    def rational_grid(count: int) -> "FractalSet":
        # finite truncation of the dense rational grid; box counts saturate
        # below spacing 1/count, hence nominal (fine-scale) dimension 0
        return FractalSet("rational-grid", 0.0, count=int(count))

    @staticmethod
    def from_dict(d: dict) -> "FractalSet":
        kind = d.get("kind")
        if kind == "point":
            return FractalSet.point(Fraction(d.get("x", "1/2")), Fraction(d.get("y", "1/2")))
        if kind == "horizontal-segment":
            return FractalSet.horizontal_segment(
                Fraction(d.get("y", "1/2")), Fraction(d.get("x0", 0)), Fraction(d.get("x1", 1)))
        if kind == "square-boundary":
            return FractalSet.square_boundary()
        if kind == "cantor-product":
            return FractalSet.cantor_product(Fraction(d.get("ratio", "1/3")))
        if kind == "cantor-dust":
            return FractalSet.cantor_dust(Fraction(d.get("ratio", "1/3")))
        if kind == "rational-grid":
            return FractalSet.rational_grid(int(d.get("count", 8)))
        raise ConfigError(f"unknown fractal kind {kind!r}")

    def to_dict(self) -> dict:
        out = {"kind": self.kind}
        for k, v in self.params.items():
            out[k] = str(v) if isinstance(v, Fraction) else v
        return out

    # -- per-axis helpers ---------------------------------------------------

    def _axis_hits(self, a: Fraction, b: Fraction, axis: str, depth: int) -> bool:
        """Does the projection of the set onto the axis meet [a, b]?"""
        if self.kind == "point":
            p = self.params["x"] if axis == "x" else self.params["y"]
            return a <= p <= b
        if self.kind in ("cantor-product", "cantor-dust"):
            cantor_axis = axis == "x" or self.kind == "cantor-dust"
            if not cantor_axis:
                return b >= 0 and a <= 1
            memo = self._memo_x if axis == "x" else self._memo_y
            key = (a, b, depth)
            hit = memo.get(key)
            if hit is None:
                hit = _cover_intersects(a, b, Fraction(0), Fraction(1),
                                        self.params["ratio"], depth)
                memo[key] = hit
            return hit
        if self.kind == "rational-grid":
            n = self.params["count"]
            for q in range(1, n + 1):
                if math.floor(b * q) >= math.ceil(a * q):
                    return True
            return False
        raise AssertionError(self.kind)

    # -- public operations --------------------------------------------------

    def intersects(self, sq: DyadicSquare, depth: int | None = None) -> bool:
        """Exact closed-set intersection test with a dyadic square."""
        x0, x1, y0, y1 = sq.exact_bounds()
        if x1 < 0 or x0 > 1 or y1 < 0 or y0 > 1:
            return False
        if self.kind == "horizontal-segment":
            y = self.params["y"]
            return (y0 <= y <= y1
                    and x1 >= self.params["x0"] and x0 <= self.params["x1"])
        if self.kind == "square-boundary":
            # complement test: square interior strictly inside (0,1)^2 misses it
            return not (x0 > 0 and x1 < 1 and y0 > 0 and y1 < 1)
        if self.kind in ("cantor-product", "cantor-dust"):
            if depth is None:
                depth = max(sq.level, 0) + 4
            elif depth < sq.level + 2:
                raise ConfigError(
                    f"construction depth {depth} < square level {sq.level} + 2")
            return (self._axis_hits(x0, x1, "x", depth)
                    and self._axis_hits(y0, y1, "y", depth))
        return (self._axis_hits(x0, x1, "x", 0)
                and self._axis_hits(y0, y1, "y", 0))

    def intersects_grid(self, level: int, ix, iy, depth: int | None = None) -> np.ndarray:
        """Vectorized intersects for same-level dyadic squares."""
        ix = np.asarray(ix, dtype=np.int64)
        iy = np.asarray(iy, dtype=np.int64)
        if self.kind == "horizontal-segment":
            # exact integer comparisons: square [ix,ix+1] x [iy,iy+1] / 2^L
            y, xa, xb = self.params["y"], self.params["x0"], self.params["x1"]
            scale = Fraction(2) ** level
            yq, xaq, xbq = y * scale, xa * scale, xb * scale
            ok_y = (iy <= yq) & (iy + 1 >= yq)
            ok_x = (ix + 1 >= xaq) & (ix <= xbq)
            return np.asarray(ok_y & ok_x)
        if self.kind == "square-boundary":
            n = 1 << max(level, 0)
            inner = (ix > 0) & (ix + 1 < n) & (iy > 0) & (iy + 1 < n)
            return ~inner
        out = np.empty(ix.shape, dtype=bool)
        memo: dict[tuple[int, int], bool] = {}
        for j in range(len(ix)):
            key = (int(ix[j]), int(iy[j]))
            v = memo.get(key)
            if v is None:
                v = self.intersects(DyadicSquare(level, key[0], key[1]), depth)
                memo[key] = v
            out[j] = v
        return out

    def euclidean_count(self, level: int) -> int:
        """Number of side-2^-level dyadic squares in [0,1]^2 meeting the set."""
        if level < 0:
            raise DomainError(f"level must be >= 0, got {level}")
        count = 0
        stack = [DyadicSquare(0, 0, 0)]
        while stack:
            sq = stack.pop()
            if not self.intersects(sq):
                continue
            if sq.level == level:
                count += 1
            else:
                stack.extend(sq.children())
        return count

    def box_dimension_fit(self, levels) -> float:
        """Least-squares slope of log N vs level*log2 over the given levels."""
        xs = [lv * math.log(2) for lv in levels]
        ys = [math.log(self.euclidean_count(lv)) for lv in levels]
        return float(np.polyfit(xs, ys, 1)[0])


def quantum_count(X: FractalSet, tiling) -> tuple[int, int]:
    """(#tiling squares meeting X, #unresolved cells meeting X)."""
    def _count(levels, ix, iy):
        total = 0
        for lv in np.unique(levels):
            m = levels == lv
            total += int(X.intersects_grid(int(lv), ix[m], iy[m]).sum())
        return total

    sq = tiling.square_arrays()
    un = tiling.unresolved_arrays()
    return (_count(sq[0], sq[1], sq[2]), _count(un[0], un[1], un[2]))
