"""Monte Carlo sampling of projected measures and dimension estimators.

Samples are truncated coding-map values ``phi_{omega|depth}(0)`` with
``omega`` drawn from a symbolic measure. Three estimators are provided:

* coarse entropy: slope of the dyadic-bin Shannon entropy against
  ``-log2(scale)``;
* local dimension: per-center slope of ``log2 theta(B(x, r))`` against
  ``log2 r``, summarised by median and interquartile range;
* correlation: slope of the log pair fraction within ``r``, an estimate
  of the L^2 dimension.

Dyadic bins are anchored at an integer (``floor`` of the attractor bound's
left end), so bin indices are ``floor(x * 2**k)``, which is exact in
floating point and makes the partitions shift-consistent.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, GuardError
from .ifs import IFS1D, attractor_bound
from .measures import SymbolicMeasure, sample_words, uniforms

GUARD_FACTOR = 4.0
MIN_LOCAL_SAMPLES = 10_000
N_CENTERS = 512
PAIR_BUDGET = 25_000_000
SAMPLE_BLOCK = 1 << 15

STREAM_MAIN = 0
STREAM_SECOND = 1


# -- planar systems ---------------------------------------------------------

@dataclass(frozen=True)
class PlanarIFS:
    """Maps ``y -> r U y + a_k`` with ``U`` a rotation (optionally a reflection).

    ``aperiodic`` is the caller's assertion that ``U^n != I`` for every
    ``n >= 1``; it is carried into reports, not verified.
    """

    ratio: float
    rotation_angle: float
    translations: tuple
    reflection: bool = False
    aperiodic: bool = True

    def __post_init__(self):
        if not 0 < self.ratio < 1:
            raise DomainError(f"ratio must lie in (0, 1), got {self.ratio}")
        tr = tuple((float(a), float(b)) for a, b in self.translations)
        if not tr:
            raise DomainError("a planar IFS needs at least one map")
        object.__setattr__(self, "translations", tr)
        object.__setattr__(self, "ratio", float(self.ratio))
        object.__setattr__(self, "rotation_angle", float(self.rotation_angle))

    def __len__(self):
        return len(self.translations)

    @property
    def orthogonal(self) -> np.ndarray:
        c, s = math.cos(self.rotation_angle), math.sin(self.rotation_angle)
        rot = np.array([[c, -s], [s, c]])
        if self.reflection:
            rot = rot @ np.array([[1.0, 0.0], [0.0, -1.0]])
        return rot

    def truncation_bound(self, depth: int) -> float:
        amax = max(math.hypot(a, b) for a, b in self.translations)
        return self.ratio ** depth * (amax / (1 - self.ratio)) * 2


@dataclass(frozen=True)
class DiagonalAffineIFS:
    """Maps ``(x, y) -> (a_k x + s_k, b_k y + t_k)``; ``maps`` holds ``(a, b, s, t)``."""

    maps: tuple

    def __post_init__(self):
        maps = tuple(tuple(float(v) for v in m) for m in self.maps)
        if not maps:
            raise DomainError("a diagonal IFS needs at least one map")
        for a, b, _, _ in maps:
            if not (0 < abs(a) < 1 and 0 < abs(b) < 1):
                raise DomainError(f"contractions must satisfy 0 < |a|, |b| < 1, got ({a}, {b})")
        object.__setattr__(self, "maps", maps)

    def __len__(self):
        return len(self.maps)

    def coordinate(self, axis: int) -> IFS1D:
        """The self-similar system acting on one coordinate (0 = x, 1 = y)."""
        return IFS1D.from_pairs([(m[axis], m[axis + 2]) for m in self.maps])

    def lyapunov_exponents(self, mu: SymbolicMeasure) -> tuple[float, float]:
        """Positive exponents ``(chi_x, chi_y)``."""
        w = [float(v) for v in mu.symbol_marginal()]
        cx = -math.fsum(p * math.log2(abs(m[0])) for p, m in zip(w, self.maps) if p)
        cy = -math.fsum(p * math.log2(abs(m[1])) for p, m in zip(w, self.maps) if p)
        return cx, cy


# -- sample sets ------------------------------------------------------------

@dataclass
class SampleSet:
    points: np.ndarray  # (n,) or (n, 2)
    truncation_depth: int
    error_bound: float  # bound on |true - sampled| for every point
    seed: int
    anchor: tuple  # integer grid anchor per coordinate
    params: dict = field(default_factory=dict)

    @property
    def dim(self) -> int:
        return 1 if self.points.ndim == 1 else self.points.shape[1]

    def __len__(self):
        return len(self.points)

    def to_csv(self, path) -> None:
        """One point per line; ``#`` header lines record parameters and seed."""
        with open(path, "w", newline="", encoding="utf-8") as fh:
            fh.write(f"# seed={self.seed}\n")
            fh.write(f"# truncation_depth={self.truncation_depth}\n")
            fh.write(f"# error_bound={self.error_bound!r}\n")
            fh.write(f"# anchor={','.join(str(a) for a in self.anchor)}\n")
            for k, v in self.params.items():
                fh.write(f"# {k}={v}\n")
            w = csv.writer(fh)
            if self.dim == 1:
                w.writerow(["x"])
                w.writerows([repr(float(v))] for v in self.points)
            else:
                w.writerow(["x", "y"])
                w.writerows([repr(float(a)), repr(float(b))] for a, b in self.points)


def required_depth(ifs: IFS1D, resolution: float) -> int:
    """Smallest depth with ``rho^depth * diam <= resolution / 4``."""
    box = attractor_bound(ifs)
    diam = float(box.diameter)
    rho = float(ifs.max_abs_ratio)
    if diam == 0:
        return 1
    return max(1, math.ceil(math.log(resolution / (GUARD_FACTOR * diam)) / math.log(rho)))


def _bound_1d(ifs: IFS1D, depth: int) -> float:
    box = attractor_bound(ifs)
    return float(ifs.max_abs_ratio) ** depth * float(box.hi + box.diameter)


def _check_depth(ifs: IFS1D, depth: int, resolution):
    if depth < 1:
        raise DomainError("depth must be >= 1")
    if resolution is None:
        return
    diam = float(attractor_bound(ifs).diameter)
    if float(ifs.max_abs_ratio) ** depth * diam > resolution / GUARD_FACTOR:
        need = required_depth(ifs, resolution)
        raise GuardError(f"depth {depth} too shallow for resolution {resolution}; need depth >= {need}")


def _code_values(symbols: np.ndarray, ratios: np.ndarray, offsets: np.ndarray) -> np.ndarray:
    """``phi_{w}(0) = sum_k a_{w_k} prod_{j<k} r_{w_j}`` row by row."""
    r = ratios[symbols]
    prefix = np.ones_like(r)
    np.cumprod(r[:, :-1], axis=1, out=prefix[:, 1:])
    return (offsets[symbols] * prefix).sum(axis=1)


def _integer_anchor(lo) -> int:
    return math.floor(lo)


def _draw_symbols(mu, count, depth, seed, stream):
    for start in range(0, count, SAMPLE_BLOCK):
        stop = min(count, start + SAMPLE_BLOCK)
        yield start, stop, sample_words(mu, stop - start, depth, seed, stream, start)


def _check_alphabet(mu: SymbolicMeasure, n: int):
    if mu.n_symbols != n:
        raise DomainError(f"measure has {mu.n_symbols} symbols but the system has {n} maps")


def _push_1d(mu, ifs, depth, count, seed, stream) -> np.ndarray:
    ratios = np.array([float(r) for r in ifs.ratios])
    offsets = np.array([float(a) for a in ifs.offsets])
    out = np.empty(count)
    for start, stop, words in _draw_symbols(mu, count, depth, seed, stream):
        out[start:stop] = _code_values(words, ratios, offsets)
    return out


def push_samples(mu: SymbolicMeasure, ifs: IFS1D, depth: int, count: int, seed: int,
                 resolution: float | None = None) -> SampleSet:
    """``count`` draws of the projected measure, truncated at ``depth`` symbols."""
    _check_alphabet(mu, len(ifs))
    _check_depth(ifs, depth, resolution)
    pts = _push_1d(mu, ifs, depth, count, seed, STREAM_MAIN)
    lo = attractor_bound(ifs).lo
    return SampleSet(pts, depth, _bound_1d(ifs, depth), seed, (_integer_anchor(lo),),
                     {"kind": "line", "count": count})


def lebesgue_samples(count: int, seed: int) -> SampleSet:
    """Raw U[0,1) draws: the calibration input with known dimension 1."""
    pts = uniforms(seed, STREAM_MAIN, count, 1)[:, 0]
    return SampleSet(pts, 0, 0.0, seed, (0,), {"kind": "lebesgue", "count": count})


def convolution_samples(mu1, ifs1: IFS1D, mu2, ifs2: IFS1D, t: float, depth: int, count: int,
                        seed: int, resolution: float | None = None) -> SampleSet:
    """Draws of ``X + t Y`` with ``X``, ``Y`` independent projected samples.

    ``X`` uses the same stream as :func:`push_samples`, so a point mass at
    0 for ``Y`` reproduces the single-measure samples exactly.
    """
    _check_alphabet(mu1, len(ifs1))
    _check_alphabet(mu2, len(ifs2))
    if not t > 0:
        raise DomainError("scale factor t must be positive")
    _check_depth(ifs1, depth, resolution)
    if resolution is not None:
        _check_depth(ifs2, depth, resolution / t)
    x = _push_1d(mu1, ifs1, depth, count, seed, STREAM_MAIN)
    y = _push_1d(mu2, ifs2, depth, count, seed, STREAM_SECOND)
    pts = x + t * y
    lo = attractor_bound(ifs1).lo + t * attractor_bound(ifs2).lo
    bound = _bound_1d(ifs1, depth) + t * _bound_1d(ifs2, depth)
    return SampleSet(pts, depth, bound, seed, (_integer_anchor(lo),),
                     {"kind": "convolution", "t": t, "count": count})


def _planar_points(mu, pifs: PlanarIFS, depth, count, seed) -> np.ndarray:
    M = pifs.ratio * pifs.orthogonal
    powers = [np.eye(2)]
    for _ in range(depth - 1):
        powers.append(M @ powers[-1])
    trans = np.array(pifs.translations)
    pts = np.zeros((count, 2))
    for start, stop, words in _draw_symbols(mu, count, depth, seed, STREAM_MAIN):
        acc = np.zeros((stop - start, 2))
        for k in range(depth):
            acc += trans[words[:, k]] @ powers[k].T
        pts[start:stop] = acc
    return pts


def planar_projection_samples(mu, pifs: PlanarIFS, z_angle: float, depth: int, count: int,
                              seed: int, resolution: float | None = None) -> SampleSet:
    """Draws of ``<z, Pi omega>`` with ``z = (cos z_angle, sin z_angle)``."""
    _check_alphabet(mu, len(pifs))
    if depth < 1:
        raise DomainError("depth must be >= 1")
    bound = pifs.truncation_bound(depth)
    if resolution is not None and bound > resolution / GUARD_FACTOR:
        need = depth
        while pifs.truncation_bound(need) > resolution / GUARD_FACTOR:
            need += 1
        raise GuardError(f"depth {depth} too shallow for resolution {resolution}; need depth >= {need}")
    z = np.array([math.cos(z_angle), math.sin(z_angle)])
    pts = _planar_points(mu, pifs, depth, count, seed) @ z
    amax = max(math.hypot(a, b) for a, b in pifs.translations)
    R = amax / (1 - pifs.ratio)
    return SampleSet(pts, depth, bound, seed, (_integer_anchor(-R),),
                     {"kind": "planar_projection", "z_angle": z_angle, "count": count})


def diagonal_affine_samples(mu, difs: DiagonalAffineIFS, depth: int, count: int, seed: int,
                            resolution: float | None = None) -> SampleSet:
    """Planar draws for a diagonal system; both coordinates share one symbol sequence."""
    _check_alphabet(mu, len(difs))
    ix, iy = difs.coordinate(0), difs.coordinate(1)
    _check_depth(ix, depth, resolution)
    _check_depth(iy, depth, resolution)
    rx = np.array([m[0] for m in difs.maps])
    ry = np.array([m[1] for m in difs.maps])
    sx = np.array([m[2] for m in difs.maps])
    sy = np.array([m[3] for m in difs.maps])
    pts = np.empty((count, 2))
    for start, stop, words in _draw_symbols(mu, count, depth, seed, STREAM_MAIN):
        pts[start:stop, 0] = _code_values(words, rx, sx)
        pts[start:stop, 1] = _code_values(words, ry, sy)
    bound = math.hypot(_bound_1d(ix, depth), _bound_1d(iy, depth))
    anchor = (_integer_anchor(attractor_bound(ix).lo), _integer_anchor(attractor_bound(iy).lo))
    return SampleSet(pts, depth, bound, seed, anchor, {"kind": "diagonal_affine", "count": count})


# -- estimators -------------------------------------------------------------

@dataclass
class DimensionEstimate:
    estimate: float
    scale_range: tuple  # (finest, coarsest)
    per_scale: list  # dicts with at least "scale" and "value"
    standard_error: float
    method: str
    anchor: tuple = ()
    extra: dict = field(default_factory=dict)


def _ols(x: np.ndarray, y: np.ndarray) -> tuple[float, float]:
    """Slope and its standard error."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    xm = x - x.mean()
    sxx = float((xm ** 2).sum())
    slope = float((xm * (y - y.mean())).sum() / sxx)
    if len(x) <= 2:
        return slope, float("nan")
    resid = y - y.mean() - slope * xm
    se = math.sqrt(float((resid ** 2).sum()) / (len(x) - 2) / sxx)
    return slope, se


def _check_scales(samples: SampleSet, scales, minimum: int = 3) -> list[float]:
    scales = sorted({float(s) for s in scales})
    if len(scales) < minimum:
        raise DomainError(f"need at least {minimum} distinct scales, got {len(scales)}")
    if scales[0] <= 0:
        raise DomainError("scales must be positive")
    finest = scales[0]
    if finest < GUARD_FACTOR * samples.error_bound:
        raise GuardError(
            f"finest scale {finest:g} is below {GUARD_FACTOR:g} x truncation error bound "
            f"{samples.error_bound:g}; increase the sampling depth"
        )
    return scales


def _dyadic_exponent(s: float) -> int:
    mant, exp = math.frexp(s)
    if mant != 0.5:
        raise DomainError(f"scale {s!r} is not a power of two")
    return 1 - exp  # s == 2**-k


def _bin_entropy(points: np.ndarray, k: int) -> float:
    # multiplying by 2**k is exact, so floor() is an exact dyadic binning
    idx = np.floor(np.ldexp(points, k)).astype(np.int64)
    if idx.ndim == 1:
        _, counts = np.unique(idx, return_counts=True)
    else:
        _, counts = np.unique(idx, axis=0, return_counts=True)
    p = counts / counts.sum()
    return float(-(p * np.log2(p)).sum())


def coarse_entropy_dimension(samples: SampleSet, scales) -> DimensionEstimate:
    """Slope of dyadic bin entropy (bits) against ``-log2(scale)``."""
    scales = _check_scales(samples, scales)
    ks = [_dyadic_exponent(s) for s in scales]
    # the anchor is an integer, so the grid through it is the grid through 0
    ent = [_bin_entropy(samples.points, k) for k in ks]
    slope, se = _ols(np.array(ks, dtype=float), np.array(ent))
    per = [{"scale": s, "log2_inv_scale": k, "value": e} for s, k, e in zip(scales, ks, ent)]
    return DimensionEstimate(slope, (scales[0], scales[-1]), per, se, "coarse-entropy", samples.anchor)


def _sorted_1d(samples: SampleSet) -> np.ndarray:
    if samples.dim != 1:
        raise DomainError("this estimator is implemented for samples on the line")
    return np.sort(samples.points)


def _ball_counts_1d(sorted_pts: np.ndarray, centers: np.ndarray, r: float) -> np.ndarray:
    hi = np.searchsorted(sorted_pts, centers + r, side="right")
    lo = np.searchsorted(sorted_pts, centers - r, side="left")
    return hi - lo


def _ball_counts_2d(points: np.ndarray, centers: np.ndarray, radii) -> np.ndarray:
    out = np.zeros((len(radii), len(centers)), dtype=np.int64)
    r2 = np.asarray(radii) ** 2
    for i, c in enumerate(centers):
        d2 = ((points - c) ** 2).sum(axis=1)
        out[:, i] = (d2[None, :] <= r2[:, None]).sum(axis=1)
    return out


def local_dimension_stats(samples: SampleSet, radii, n_centers: int = N_CENTERS) -> DimensionEstimate:
    """Median over centers of the slope of ``log2 theta(B(x, r))`` in ``log2 r``.

    Centers are the first ``n_centers`` samples; each center is excluded
    from its own ball count. Centers whose finest ball is empty are
    dropped and counted in ``extra["dropped_centers"]``.
    """
    radii = _check_scales(samples, radii)
    n = len(samples)
    if n < MIN_LOCAL_SAMPLES:
        raise GuardError(f"local dimension needs at least {MIN_LOCAL_SAMPLES} samples, got {n}")
    centers = samples.points[:n_centers]
    if samples.dim == 1:
        srt = _sorted_1d(samples)
        counts = np.array([_ball_counts_1d(srt, centers, r) for r in radii])
    else:
        counts = _ball_counts_2d(samples.points, centers, radii)
    counts = counts - 1  # the center itself
    keep = counts[0] > 0
    frac = counts[:, keep] / (n - 1)
    lr = np.log2(radii)
    slopes = np.array([_ols(lr, np.log2(frac[:, j]))[0] for j in range(frac.shape[1])])
    if len(slopes) == 0:
        raise GuardError("every center has an empty ball at the finest radius")
    med = float(np.median(slopes))
    q1, q3 = np.percentile(slopes, [25, 75])
    se = 1.2533 * float(np.std(slopes, ddof=1)) / math.sqrt(len(slopes)) if len(slopes) > 1 else float("nan")
    mean_log = np.log2(frac).mean(axis=1)
    per = [{"scale": r, "value": float(v)} for r, v in zip(radii, mean_log)]
    return DimensionEstimate(med, (radii[0], radii[-1]), per, se, "local-dimension", samples.anchor,
                             {"iqr": float(q3 - q1), "centers": int(keep.sum()),
                              "dropped_centers": int((~keep).sum())})


def _pair_fraction_1d(srt: np.ndarray, r: float) -> float:
    n = len(srt)
    hi = np.searchsorted(srt, srt + r, side="right")
    pairs = int((hi - np.arange(1, n + 1)).sum())
    return pairs / (n * (n - 1) / 2)


def _pair_fraction_2d(points: np.ndarray, radii) -> list[float]:
    n = len(points)
    r2 = np.asarray(radii) ** 2
    totals = np.zeros(len(radii), dtype=np.int64)
    for i in range(n - 1):
        d2 = ((points[i + 1:] - points[i]) ** 2).sum(axis=1)
        totals += (d2[None, :] <= r2[:, None]).sum(axis=1)
    return list(totals / (n * (n - 1) / 2))


def correlation_dimension(samples: SampleSet, radii, pair_budget: int = PAIR_BUDGET) -> DimensionEstimate:
    """Slope of ``log2`` (fraction of pairs within ``r``) against ``log2 r``.

    On the line all pairs are counted exactly through a sorted sweep. In
    the plane the first ``m`` samples are used, with ``m(m-1)/2`` within
    ``pair_budget``.
    """
    radii = _check_scales(samples, radii)
    if samples.dim == 1:
        srt = _sorted_1d(samples)
        fracs = [_pair_fraction_1d(srt, r) for r in radii]
        used = len(srt)
    else:
        used = min(len(samples), int((1 + math.sqrt(1 + 8 * pair_budget)) / 2))
        fracs = _pair_fraction_2d(samples.points[:used], radii)
    if fracs[0] <= 0:
        raise GuardError(f"no pairs within the finest radius {radii[0]:g}")
    slope, se = _ols(np.log2(radii), np.log2(fracs))
    per = [{"scale": r, "value": f} for r, f in zip(radii, fracs)]
    return DimensionEstimate(slope, (radii[0], radii[-1]), per, se, "correlation", samples.anchor,
                             {"points_used": used})


def dyadic_scales(k_min: int, k_max: int) -> list[float]:
    """``[2**-k_max, ..., 2**-k_min]``."""
    return [2.0 ** -k for k in range(k_max, k_min - 1, -1)]
