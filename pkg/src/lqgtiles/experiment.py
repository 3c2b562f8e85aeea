"""Monte-Carlo campaigns over epsilon- and radius-ladders with exponent fits.

Conventions:
* replica means are taken before logs when fitting count exponents;
* replicas flagged by unresolved hits / truncation / unreachability are
  censored (excluded from the fitted statistic but always reported);
* all randomness is derived from (base_seed, replica index) so campaigns
  are reproducible and schedule independent.
"""
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, LqgError
from .field import (ConstantField, ExactField, LogSingularityField,
                    OctaveConfig, OctaveField)
from .fractal import FractalSet, quantum_count
from .graph import AdjacencyGraph
from .params import Params
from .rng import replica_seed
from .squares import DyadicSquare
from .tiling import subdivide


@dataclass(frozen=True)
class Ladder:
    """Geometric epsilon ladder eps_k = eps0 * 2^-k, k = 0..steps-1."""
    eps0: float
    steps: int
    replicas: int
    base_seed: int

    def __post_init__(self):
        if self.steps < 1 or self.replicas < 1:
            raise DomainError("ladder needs steps >= 1 and replicas >= 1")

    @property
    def epsilons(self) -> list[float]:
        return [self.eps0 * 2.0 ** (-k) for k in range(self.steps)]


@dataclass
class ExponentFit:
    slope: float
    stderr: float
    r2: float
    points: list[tuple[float, float]]
    censored: int = 0
    total: int = 0

    @property
    def reportable(self) -> bool:
        return (len(self.points) >= 3
                and (self.total == 0 or self.censored <= 0.5 * self.total))


def fit_loglog(xs, ys, censored: int = 0, total: int = 0) -> ExponentFit:
    """Least-squares line through (x, y) with slope stderr and r^2."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    if len(xs) < 2:
        raise DomainError("need at least two points to fit")
    slope, intercept = np.polyfit(xs, ys, 1)
    resid = ys - (slope * xs + intercept)
    dof = max(len(xs) - 2, 1)
    sxx = float(((xs - xs.mean()) ** 2).sum())
    stderr = math.sqrt(float(resid @ resid) / dof / sxx) if sxx > 0 else math.inf
    ss_tot = float(((ys - ys.mean()) ** 2).sum())
    r2 = 1.0 - float(resid @ resid) / ss_tot if ss_tot > 0 else 1.0
    return ExponentFit(slope=float(slope), stderr=stderr, r2=r2,
                       points=list(zip(xs.tolist(), ys.tolist())),
                       censored=censored, total=total)


# -- prediction formulas ----------------------------------------------------

@dataclass(frozen=True)
class KpzPrediction:
    value: float          # math.inf in the blow-up regime
    at_boundary: bool = False

    @property
    def infinite(self) -> bool:
        return math.isinf(self.value)


def kpz_exponent_prediction(params: Params, x: float) -> KpzPrediction:
    """Quantum dimension q - sqrt(q^2 - 2x); infinite when x > q^2/2."""
    if not (0.0 <= x <= 2.0):
        raise DomainError(f"euclidean dimension x must lie in [0, 2], got {x}")
    q = params.q
    half_q2 = q * q / 2.0
    if x < half_q2:
        return KpzPrediction(q - math.sqrt(q * q - 2.0 * x))
    if x > half_q2:
        return KpzPrediction(math.inf)
    return KpzPrediction(q, at_boundary=True)


def watabiki_dimension(c_m: float) -> float:
    """Watabiki's predicted dimension (comparison curve, c_m < 1 only)."""
    if c_m > 1.0:
        raise DomainError("Watabiki curve is real only for c_m <= 1")
    return 2.0 * (math.sqrt(49.0 - c_m) + math.sqrt(1.0 - c_m)) \
        / (math.sqrt(25.0 - c_m) + math.sqrt(1.0 - c_m))


def guess_dimension(params: Params) -> float:
    """gamma*q + gamma/sqrt(6) comparison value (c_m <= 1 only)."""
    if params.gamma is None:
        raise DomainError("dimension guess needs gamma (c_m <= 1)")
    return params.gamma * params.q + params.gamma / math.sqrt(6.0)


# -- field construction -----------------------------------------------------

@dataclass(frozen=True)
class FieldSpec:
    """Picklable recipe for building one replica's field realization."""
    backend: str = "octave"            # octave | exact | stub
    window: tuple = (0, 0, 0)          # (level, ix, iy)
    depth: int = 24
    stub_value: float = 0.0
    alpha: float | None = None
    z0: tuple | None = None
    max_global_cells: int = 4224

    def build(self, seed: int):
        if self.backend == "stub":
            base = ConstantField(self.stub_value)
        elif self.backend == "exact":
            base = ExactField(seed)
        elif self.backend == "octave":
            cfg = OctaveConfig(max_global_cells=self.max_global_cells)
            base = OctaveField(DyadicSquare(*self.window), self.depth, seed, cfg)
        else:
            raise DomainError(f"unknown backend {self.backend!r}")
        if self.alpha is not None:
            base = LogSingularityField(base, self.alpha, self.z0)
        return base


def _run_replicas(worker, args_list, workers: int):
    if workers <= 1:
        return [worker(a) for a in args_list]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(worker, args_list))


# -- KPZ counting campaign ---------------------------------------------------

@dataclass
class KpzResult:
    rows: list                      # (epsilon, replica, count, unresolved_hits)
    fit: ExponentFit | None
    blowup_fraction: float          # unresolved-hit fraction at finest epsilon
    prediction: KpzPrediction
    censored: int
    epsilons: list


def _kpz_replica(args):
    (fractal_dict, epsilons, params, fspec, domain, depth_cap, seed) = args
    X = FractalSet.from_dict(fractal_dict)
    field = fspec.build(seed)
    dom = DyadicSquare(*domain)
    out = []
    for eps in sorted(epsilons, reverse=True):
        t = subdivide(dom, eps, field, params, depth_cap, restrict=X)
        c, uh = quantum_count(X, t)
        out.append((eps, c, uh))
    return out


def run_kpz(X: FractalSet, ladder: Ladder, params: Params, fspec: FieldSpec,
            domain: DyadicSquare = DyadicSquare(0, 0, 0),
            depth_cap: int = 18, workers: int = 1) -> KpzResult:
    """Count tiling squares meeting X along the ladder; fit the exponent."""
    x = X.nominal_dimension
    pred = kpz_exponent_prediction(params, x)
    args = [(X.to_dict(), ladder.epsilons, params, fspec,
             (domain.level, domain.ix, domain.iy), depth_cap,
             replica_seed(ladder.base_seed, rep))
            for rep in range(ladder.replicas)]
    per_rep = _run_replicas(_kpz_replica, args, workers)

    rows = []
    for rep, triples in enumerate(per_rep):
        for eps, c, uh in triples:
            rows.append((eps, rep, c, uh))
    finest = min(ladder.epsilons)
    blowup_hits = sum(1 for (eps, _, _, uh) in rows if eps == finest and uh > 0)
    blowup_fraction = blowup_hits / ladder.replicas

    xs, ys = [], []
    censored = 0
    for eps in ladder.epsilons:
        counts = [c for (e, _, c, uh) in rows if e == eps and uh == 0]
        censored += sum(1 for (e, _, _, uh) in rows if e == eps and uh > 0)
        if counts:
            xs.append(math.log(1.0 / eps))
            ys.append(math.log(max(float(np.mean(counts)), 1e-300)))
    if not xs and not pred.infinite:
        raise LqgError("all replicas censored in the subcritical regime; "
                       "raise depth_cap or epsilon")
    fit = None
    if len(xs) >= 2:
        fit = fit_loglog(xs, ys, censored=censored,
                         total=ladder.steps * ladder.replicas)
    return KpzResult(rows=rows, fit=fit, blowup_fraction=blowup_fraction,
                     prediction=pred, censored=censored,
                     epsilons=ladder.epsilons)


# -- measure stability campaign ----------------------------------------------

@dataclass
class MeasureResult:
    rows: list                      # (epsilon, replica, count, rescaled)
    series: list                    # (epsilon, mean rescaled count)
    exponent: float


def run_measure(X: FractalSet, ladder: Ladder, params: Params, fspec: FieldSpec,
                domain: DyadicSquare = DyadicSquare(0, 0, 0),
                depth_cap: int = 18, workers: int = 1) -> MeasureResult:
    """Rescaled counts N_eps * eps^(q - sqrt(q^2 - 2x)) along the ladder."""
    pred = kpz_exponent_prediction(params, X.nominal_dimension)
    if pred.infinite or pred.at_boundary:
        raise DomainError("measure campaign requires x < q^2/2")
    kpz = run_kpz(X, ladder, params, fspec, domain, depth_cap, workers)
    rows = [(eps, rep, c, c * eps ** pred.value)
            for (eps, rep, c, uh) in kpz.rows if uh == 0]
    series = []
    for eps in ladder.epsilons:
        vals = [r for (e, _, _, r) in rows if e == eps]
        if vals:
            series.append((eps, float(np.mean(vals))))
    return MeasureResult(rows=rows, series=series, exponent=pred.value)


# -- ball growth campaign ------------------------------------------------------

@dataclass
class BallGrowthResult:
    rows: list                      # (radius, replica, count, truncated)
    exponents: list                 # (radius, median e(r))
    reference: dict                 # comparison constants for q > 2


def _ball_replica(args):
    (radii, epsilon, params, fspec, domain, depth_cap, center, seed) = args
    field = fspec.build(seed)
    dom = DyadicSquare(*domain)
    t = subdivide(dom, epsilon, field, params, depth_cap)
    g = AdjacencyGraph(t)
    try:
        bp = g.ball_profile(center, max(radii))
    except DomainError:
        return None
    return [(r, int(bp.counts[r]), bool(bp.truncated[r])) for r in radii]


def run_ball_growth(radii, params: Params, fspec: FieldSpec, epsilon: float,
                    domain: DyadicSquare = DyadicSquare(0, 0, 0),
                    depth_cap: int = 14, replicas: int = 10,
                    base_seed: int = 0, center=(0.5, 0.5),
                    workers: int = 1) -> BallGrowthResult:
    """Median local exponent e(r) = log #B_r / log r over a radius ladder."""
    radii = sorted(int(r) for r in radii)
    if min(radii) < 2:
        raise DomainError("radii must be >= 2 for a local exponent")
    args = [(radii, epsilon, params, fspec,
             (domain.level, domain.ix, domain.iy), depth_cap, tuple(center),
             replica_seed(base_seed, rep))
            for rep in range(replicas)]
    per_rep = _run_replicas(_ball_replica, args, workers)
    rows = []
    for rep, res in enumerate(per_rep):
        if res is None:
            continue
        for r, c, tr in res:
            rows.append((r, rep, c, tr))
    exponents = []
    for r in radii:
        es = [math.log(c) / math.log(r) for (rr, _, c, _) in rows if rr == r and c > 0]
        if es:
            exponents.append((r, float(np.median(es))))
    reference = {}
    if params.q > 2.0:
        reference["dimension_guess"] = guess_dimension(params)
        reference["watabiki"] = watabiki_dimension(params.c_m)
    return BallGrowthResult(rows=rows, exponents=exponents, reference=reference)


# -- point-to-point distance campaign -----------------------------------------

@dataclass
class PtpResult:
    rows: list                      # (epsilon, replica, distance, censored)
    fit: ExponentFit | None
    lower_bound: float              # 1 / (2 + q)
    censored: int


def _ptp_replica(args):
    (z, w, epsilons, params, fspec, domain, depth_cap, seed) = args
    field = fspec.build(seed)
    dom = DyadicSquare(*domain)
    out = []
    for eps in sorted(epsilons, reverse=True):
        t = subdivide(dom, eps, field, params, depth_cap)
        g = AdjacencyGraph(t)
        out.append((eps, g.distance(z, w)))
    return out


def run_ptp_distance(z, w, ladder: Ladder, params: Params, fspec: FieldSpec,
                     domain: DyadicSquare = DyadicSquare(0, 0, 0),
                     depth_cap: int = 14, workers: int = 1) -> PtpResult:
    """Fit log D^eps(z, w) against log 1/eps."""
    if tuple(z) == tuple(w):
        raise DomainError("z and w must be distinct")
    args = [(tuple(z), tuple(w), ladder.epsilons, params, fspec,
             (domain.level, domain.ix, domain.iy), depth_cap,
             replica_seed(ladder.base_seed, rep))
            for rep in range(ladder.replicas)]
    per_rep = _run_replicas(_ptp_replica, args, workers)
    rows = []
    for rep, res in enumerate(per_rep):
        for eps, d in res:
            rows.append((eps, rep, d, d is None))
    censored = sum(1 for r in rows if r[3])
    xs, ys = [], []
    for eps in ladder.epsilons:
        ds = [d for (e, _, d, c) in rows if e == eps and not c and d > 0]
        if ds:
            xs.append(math.log(1.0 / eps))
            ys.append(math.log(float(np.mean(ds))))
    fit = fit_loglog(xs, ys, censored=censored,
                     total=ladder.steps * ladder.replicas) if len(xs) >= 2 else None
    return PtpResult(rows=rows, fit=fit, lower_bound=1.0 / (2.0 + params.q),
                     censored=censored)
