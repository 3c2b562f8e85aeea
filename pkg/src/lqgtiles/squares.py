"""Integer-exact dyadic squares.

A square is (level, ix, iy): side 2^-level, lower-left corner
(ix 2^-level, iy 2^-level).  Levels up to 50 keep centers exactly
representable in binary floating point.
"""
from dataclasses import dataclass
from fractions import Fraction

MAX_LEVEL = 50


@dataclass(frozen=True, order=True)
class DyadicSquare:
    level: int
    ix: int
    iy: int

    @property
    def side(self) -> float:
        return 2.0 ** (-self.level)

    @property
    def center(self) -> tuple[float, float]:
        s = 2.0 ** (-self.level - 1)
        return ((2 * self.ix + 1) * s, (2 * self.iy + 1) * s)

    @property
    def scale(self) -> float:
        """Field-query radius |S|/2."""
        return 2.0 ** (-self.level - 1)

    def bounds(self) -> tuple[float, float, float, float]:
        s = self.side
        return (self.ix * s, (self.ix + 1) * s, self.iy * s, (self.iy + 1) * s)

    def exact_bounds(self) -> tuple[Fraction, Fraction, Fraction, Fraction]:
        s = Fraction(1, 2 ** self.level) if self.level >= 0 else Fraction(2 ** -self.level)
        return (self.ix * s, (self.ix + 1) * s, self.iy * s, (self.iy + 1) * s)

    def children(self) -> list["DyadicSquare"]:
        L, x, y = self.level + 1, 2 * self.ix, 2 * self.iy
        return [DyadicSquare(L, x, y), DyadicSquare(L, x + 1, y),
                DyadicSquare(L, x, y + 1), DyadicSquare(L, x + 1, y + 1)]

    def child(self, k: int) -> "DyadicSquare":
        return self.children()[k]

    def parent(self) -> "DyadicSquare":
        return DyadicSquare(self.level - 1, self.ix >> 1, self.iy >> 1)

    def contains_square(self, other: "DyadicSquare") -> bool:
        d = other.level - self.level
        if d < 0:
            return False
        return (other.ix >> d) == self.ix and (other.iy >> d) == self.iy

    def contains_point(self, x: float, y: float) -> bool:
        x0, x1, y0, y1 = self.bounds()
        return x0 <= x <= x1 and y0 <= y <= y1

    def ancestors_within(self, root: "DyadicSquare"):
        """Strict dyadic ancestors of self contained in (or equal to) root."""
        s = self
        while s.level > root.level:
            s = s.parent()
            yield s


UNIT_SQUARE = DyadicSquare(0, 0, 0)
