"""Gaussian field oracles.

A realization answers queries ``values(x, y, m)`` = multiscale field value
h_{2^-m} at points (x, y).  For a dyadic square at level L the tiling asks
for m = L + 1 at the square center (radius = half the side).

Backends
--------
constant   -- deterministic stub, value identically ``c``.
exact      -- multivariate normal with the analytic white-noise kernel,
              Cholesky factorization, incremental conditioning for lazily
              discovered nodes.  Capped node count.
octave     -- sum of independent octave increment layers
              D_n = h_{2^-n-1} - h_{2^-n}, each a stationary Gaussian
              field synthesized on a periodized grid (circulant spectral
              synthesis) at spacing 2^-n-2 and bilinearly interpolated.
shifted    -- wrapper adding alpha * log(1/|v - z0|) (a deterministic
              logarithmic singularity) to any base realization.

Octave layers whose global grid over the window would exceed
``max_global_cells`` are instead synthesized lazily on per-block patches
(block side 16 * 2^-n, margin 4 * 2^-n, torus period 24 * 2^-n).  Values
in distinct blocks of the same fine layer are treated as independent; the
dropped cross-block correlation is bounded by the layer covariance at
separation >= 0, which decays like a Gaussian beyond ~4 * 2^-n, so only
seam-adjacent points are affected.  Marginal distributions are exact.

Memory note: layer grids are cached for the lifetime of the realization
(float32); a full unit-window realization with max_global_cells=4224
holds ~100 MB of grids.  Block patches (~36 KB each) live in a bounded
LRU cache: a patch is a pure function of (seed, layer, block), so
eviction and regeneration never change any value.
"""
import math
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_triangular

from .covariance import layer_covariance, wn_covariance
from .errors import CapacityError, DomainError, NumericError
from .rng import stream
from .squares import DyadicSquare

_LOG2 = math.log(2.0)


def _as_arrays(x, y):
    x = np.atleast_1d(np.asarray(x, dtype=float))
    y = np.atleast_1d(np.asarray(y, dtype=float))
    return x, y


class FieldRealization:
    """Base class; subclasses implement _values(x, y, m)."""

    fingerprint = "abstract"

    def values(self, x, y, m: int) -> np.ndarray:
        x, y = _as_arrays(x, y)
        if m < 0:
            raise DomainError(f"scale exponent m must be >= 0, got {m}")
        return self._values(x, y, m)

    def value(self, x: float, y: float, m: int) -> float:
        return float(self.values([x], [y], m)[0])

    def node_value(self, sq: DyadicSquare) -> float:
        cx, cy = sq.center
        return self.value(cx, cy, sq.level + 1)


class ConstantField(FieldRealization):
    def __init__(self, c: float = 0.0):
        self.c = float(c)
        self.fingerprint = f"constant:c={self.c!r}"

    def _values(self, x, y, m):
        return np.full(x.shape, self.c)


class LogSingularityField(FieldRealization):
    """base + alpha * log(1/|v - z0|); +inf exactly at v = z0."""

    def __init__(self, base: FieldRealization, alpha: float, z0):
        if not (0.0 < alpha < 4.0):
            raise DomainError(f"alpha must lie in (0, 4), got {alpha}")
        self.base = base
        self.alpha = float(alpha)
        self.z0 = (float(z0[0]), float(z0[1]))
        self.fingerprint = f"shifted:alpha={self.alpha!r}:z0={self.z0!r}:{base.fingerprint}"

    def _values(self, x, y, m):
        out = self.base.values(x, y, m).astype(float)
        r = np.hypot(x - self.z0[0], y - self.z0[1])
        at_center = r == 0.0
        with np.errstate(divide="ignore"):
            out = out + self.alpha * np.where(at_center, np.inf, -np.log(np.where(at_center, 1.0, r)))
        return out


class ExactField(FieldRealization):
    """Exact multivariate normal via incremental Cholesky conditioning.

    Values are a deterministic function of (seed, query order).  The node
    count is capped; beyond the cap the octave backend should be used.
    """

    JITTERS = (0.0, 1e-12, 1e-8)

    def __init__(self, seed: int, cap: int = 4096):
        self.seed = int(seed)
        self.cap = int(cap)
        self.fingerprint = f"exact:seed={self.seed}"
        self._xs: list[float] = []
        self._ys: list[float] = []
        self._ts: list[float] = []
        self._u: list[float] = []      # iid standard normals, one per node
        self._vals: list[float] = []
        self._chol = np.zeros((0, 0))  # lower factor of node covariance
        self._index: dict[tuple[float, float, float], int] = {}
        self._rng = stream(self.seed, "exact")

    def _extend(self, x: float, y: float, t: float) -> int:
        n = len(self._xs)
        if n >= self.cap:
            raise CapacityError(
                f"exact backend node cap {self.cap} exceeded; use the octave backend")
        k = np.array([wn_covariance((x, y), t, (self._xs[i], self._ys[i]), self._ts[i])
                      for i in range(n)])
        var = wn_covariance((x, y), t, (x, y), t)
        if n:
            w = solve_triangular(self._chol, k, lower=True)
        else:
            w = np.zeros(0)
        resid = var - float(w @ w)
        d = None
        for jit in self.JITTERS:
            if resid + jit >= 0.0:
                d = math.sqrt(resid + jit) if resid + jit > 0.0 else 0.0
                break
        if d is None:
            raise NumericError(
                f"conditional variance {resid} negative beyond max jitter at node {n}")
        u = float(self._rng.standard_normal())
        val = float(w @ np.array(self._u)) + d * u if n else d * u
        new = np.zeros((n + 1, n + 1))
        new[:n, :n] = self._chol
        new[n, :n] = w
        new[n, n] = d
        self._chol = new
        self._xs.append(x); self._ys.append(y); self._ts.append(t)
        self._u.append(u); self._vals.append(val)
        self._index[(x, y, t)] = n
        return n

    def _values(self, x, y, m):
        t = 2.0 ** (-m)
        out = np.empty(x.shape)
        for j in range(len(x)):
            key = (float(x[j]), float(y[j]), t)
            i = self._index.get(key)
            if i is None:
                i = self._extend(*key)
            out[j] = self._vals[i]
        return out


def sample_exact(nodes, seed: int, cap: int = 4096):
    """Eagerly sample an exact realization at the given (x, y, t) nodes.

    Returns the realization; its values at the listed nodes form a sample
    of the centered Gaussian vector with the analytic white-noise kernel.
    """
    if len(nodes) > cap:
        raise CapacityError(
            f"{len(nodes)} nodes exceed exact-backend cap {cap}; use the octave backend")
    field = ExactField(seed, cap=cap)
    for (nx, ny, t) in nodes:
        mt = -math.log2(t)
        m = round(mt)
        if abs(mt - m) > 1e-12:
            raise DomainError(f"node scale {t} is not a power of two")
        field.value(nx, ny, m)
    return field


@dataclass(frozen=True)
class OctaveConfig:
    max_global_cells: int = 4224   # layers above this grid size go block-local
    margin_cells: int = 32         # global-layer torus margin (8 layer scales)
    block_core_cells: int = 64     # block side in grid cells (16 layer scales)
    block_margin_cells: int = 16   # block margin (4 layer scales)
    neg_mass_tol: float = 1e-6
    max_depth: int = 40
    max_cached_patches: int = 4096  # LRU bound, ~150 MB of float32 patches


class OctaveField(FieldRealization):
    """Octave-layer synthesis of the multiscale field on a dyadic window."""

    _spectrum_cache: dict[tuple, np.ndarray] = {}

    def __init__(self, window: DyadicSquare, depth: int, seed: int,
                 cfg: OctaveConfig = OctaveConfig()):
        if depth > cfg.max_depth:
            raise CapacityError(f"depth {depth} exceeds cap {cfg.max_depth}")
        self.window = window
        self.depth = int(depth)
        self.seed = int(seed)
        self.cfg = cfg
        self.fingerprint = (f"octave:seed={self.seed}:depth={self.depth}"
                            f":window=({window.level},{window.ix},{window.iy})")
        self._globals: dict[int, np.ndarray] = {}
        self._patches: OrderedDict[tuple[int, int, int], np.ndarray] = OrderedDict()

    # -- spectral synthesis -------------------------------------------------

    @classmethod
    def _sqrt_spectrum(cls, n_cells: int, tol: float) -> np.ndarray:
        """sqrt of circulant eigenvalues of the layer covariance on an
        n_cells x n_cells torus at quarter-scale spacing (scale free)."""
        key = ("layer", n_cells)
        spec = cls._spectrum_cache.get(key)
        if spec is not None:
            return spec
        d = np.arange(n_cells)
        d = np.minimum(d, n_cells - d)
        u = np.hypot(d[:, None], d[None, :]) / 4.0   # distance in layer scales
        cov = layer_covariance(u)
        lam = np.fft.fft2(cov).real
        neg = -lam[lam < 0.0].sum()
        tot = np.abs(lam).sum()
        if neg > tol * tot:
            raise NumericError(
                f"negative spectral mass {neg / tot:.2e} exceeds tolerance; increase padding")
        spec = np.sqrt(np.maximum(lam, 0.0))
        cls._spectrum_cache[key] = spec
        return spec

    @staticmethod
    def _synth(spec: np.ndarray, rng) -> np.ndarray:
        n = spec.shape[0]
        zeta = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
        return (np.fft.ifft2(spec * zeta).real * n).astype(np.float32)

    # -- layer grids --------------------------------------------------------

    def _window_cells(self, n: int) -> int:
        """Core cells per side of layer n over the window (no margin)."""
        wl = self.window.level
        # side = 2^-wl, spacing = 2^-(n+2)
        return 2 ** (n + 2 - wl) if n + 2 >= wl else 0

    def _is_global(self, n: int) -> bool:
        core = self._window_cells(n)
        return core + 2 * self.cfg.margin_cells <= self.cfg.max_global_cells

    def _global_grid(self, n: int) -> np.ndarray:
        g = self._globals.get(n)
        if g is None:
            core = max(self._window_cells(n), 1)
            cells = core + 2 * self.cfg.margin_cells
            spec = self._sqrt_spectrum(cells, self.cfg.neg_mass_tol)
            g = self._synth(spec, stream(self.seed, "layer", n))
            self._globals[n] = g
        return g

    def _patch(self, n: int, bx: int, by: int) -> np.ndarray:
        key = (n, bx, by)
        p = self._patches.get(key)
        if p is None:
            cells = self.cfg.block_core_cells + 2 * self.cfg.block_margin_cells
            spec = self._sqrt_spectrum(cells, self.cfg.neg_mass_tol)
            p = self._synth(spec, stream(self.seed, "layer", n, "block", bx, by))
            self._patches[key] = p
            while len(self._patches) > self.cfg.max_cached_patches:
                self._patches.popitem(last=False)
        else:
            self._patches.move_to_end(key)
        return p

    # -- evaluation ---------------------------------------------------------

    @staticmethod
    def _bilinear(grid: np.ndarray, fx: np.ndarray, fy: np.ndarray) -> np.ndarray:
        i = np.floor(fx).astype(np.int64)
        j = np.floor(fy).astype(np.int64)
        ax = fx - i
        ay = fy - j
        g00 = grid[i, j]
        g10 = grid[i + 1, j]
        g01 = grid[i, j + 1]
        g11 = grid[i + 1, j + 1]
        return ((1 - ax) * (1 - ay) * g00 + ax * (1 - ay) * g10
                + (1 - ax) * ay * g01 + ax * ay * g11).astype(float)

    def _layer_values(self, n: int, x, y) -> np.ndarray:
        spacing = 2.0 ** (-n - 2)
        if self._is_global(n):
            grid = self._global_grid(n)
            x0 = self.window.ix * self.window.side
            y0 = self.window.iy * self.window.side
            fx = (x - x0) / spacing + self.cfg.margin_cells
            fy = (y - y0) / spacing + self.cfg.margin_cells
            return self._bilinear(grid, fx, fy)
        # block-local layer
        block_side = self.cfg.block_core_cells * spacing
        bx = np.floor(x / block_side).astype(np.int64)
        by = np.floor(y / block_side).astype(np.int64)
        out = np.empty(x.shape)
        keys = bx.astype(np.int64) * (1 << 32) + (by & 0xFFFFFFFF)
        order = np.argsort(keys, kind="stable")
        ks = keys[order]
        starts = np.flatnonzero(np.r_[True, ks[1:] != ks[:-1]])
        bounds = np.r_[starts, len(ks)]
        for s, e in zip(bounds[:-1], bounds[1:]):
            idx = order[s:e]
            bxi, byi = int(bx[idx[0]]), int(by[idx[0]])
            grid = self._patch(n, bxi, byi)
            fx = (x[idx] - bxi * block_side) / spacing + self.cfg.block_margin_cells
            fy = (y[idx] - byi * block_side) / spacing + self.cfg.block_margin_cells
            out[idx] = self._bilinear(grid, fx, fy)
        return out

    def _values(self, x, y, m):
        if m > self.depth:
            raise CapacityError(
                f"scale exponent {m} exceeds realization depth {self.depth}")
        out = np.zeros(x.shape)
        for n in range(m):
            out += self._layer_values(n, x, y)
        return out
