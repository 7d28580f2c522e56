"""Finite differences, ball means and difference-based smoothness norms.

Scales are dyadic, ``t = 2**-l``, kept between ``2 * spacing`` and ``t_max``.
The ``dt/t`` integral is a trapezoid rule in ``log t``, which is exact for
pure power laws up to the end-point halving.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import lru_cache
from math import comb

import numpy as np

from .errors import ParameterError, ResolutionError
from .lattice import Grid, SampledFunction
from .quasinorms import (INF, HerzParams, NormValue, RegimeWarning, SmoothnessParams,
                         _herz_from_array, _lp_sequence, herz_norm)


@dataclass(frozen=True)
class DifferenceConfig:
    """Difference order ``M`` and the range of dyadic scales.

    ``t_max`` is the largest scale (``None`` means a quarter of the period).
    ``t_levels`` caps the number of scales below ``t_max``; by default every
    scale down to ``2 * spacing`` is used.
    """

    M: int = 2
    t_max: float | None = 1.0
    t_levels: int | None = None

    def __post_init__(self):
        if self.M < 1:
            raise ParameterError("difference order M must be >= 1")

    def scales(self, grid: Grid) -> np.ndarray:
        top = grid.period / 4 if self.t_max is None else float(self.t_max)
        l0 = math.ceil(-math.log2(top))
        lo = 2.0 * grid.spacing
        ts = []
        l = l0
        while 2.0 ** -l >= lo and (self.t_levels is None or len(ts) <= self.t_levels):
            ts.append(2.0 ** -l)
            l += 1
        if not ts:
            raise ResolutionError(f"no dyadic scale in [{lo}, {top}] on {grid}")
        return np.array(ts)


def _log_trapezoid(n: int) -> np.ndarray:
    w = np.full(n, math.log(2.0))
    if n > 1:
        w[0] *= 0.5
        w[-1] *= 0.5
    return w


def _shift(values: np.ndarray, cells) -> np.ndarray:
    # values of f(x + cells * spacing)
    cells = tuple(-int(c) for c in cells)
    if not any(cells):
        return values
    return np.roll(values, cells, axis=tuple(range(values.ndim)))


def _difference_values(values: np.ndarray, h, M: int) -> np.ndarray:
    out = None
    for j in range(M + 1):
        coeff = (-1) ** j * comb(M, j)
        term = coeff * _shift(values, [(M - j) * c for c in h])
        out = term if out is None else out + term
    return out


def difference(f: SampledFunction, h, M: int) -> SampledFunction:
    """``sum_j (-1)**j C(M, j) f(x + (M - j) h)`` for a lattice offset h (in cells)."""
    h = tuple(np.atleast_1d(np.asarray(h, dtype=np.int64)).tolist())
    if len(h) != f.grid.dim:
        raise ParameterError(f"offset {h} does not match dimension {f.grid.dim}")
    if M < 1:
        raise ParameterError("M must be >= 1")
    return f.with_values(_difference_values(f.values, h, M))


@lru_cache(maxsize=128)
def _offsets(grid: Grid, radius_cells: float) -> tuple:
    """Lattice offsets with ``|o| <= radius_cells``, sorted by length then lexicographically."""
    R = int(math.floor(radius_cells))
    rng = np.arange(-R, R + 1)
    if grid.dim == 1:
        pts = [(int(a),) for a in rng if a * a <= radius_cells ** 2]
    else:
        pts = [(int(a), int(b)) for a in rng for b in rng if a * a + b * b <= radius_cells ** 2]
    pts.sort(key=lambda o: (sum(c * c for c in o), o))
    return tuple(pts)


def _check_scale(grid: Grid, t: float) -> None:
    if t < 2.0 * grid.spacing:
        raise ResolutionError(f"t = {t} is below twice the spacing {grid.spacing}")


def ball_means(f: SampledFunction, t: float, M: int) -> SampledFunction:
    """``t**-n`` times the cell-volume sum of ``|Delta_h^M f|`` over lattice offsets ``|h| <= t``."""
    grid = f.grid
    _check_scale(grid, t)
    acc = np.zeros(grid.shape)
    for o in _offsets(grid, t / grid.spacing):
        if any(o):
            acc += np.abs(_difference_values(f.values, o, M))
    return f.with_values(acc * grid.cell_volume / t ** grid.dim)


def sigma_q(n: int, q: float) -> float:
    return n * max(1.0 / q - 1.0, 0.0) if q != INF else 0.0


def sigma_pq(n: int, p: float, q: float) -> float:
    inv = lambda x: 0.0 if x == INF else 1.0 / x
    return n * max(inv(p) - 1.0, inv(q) - 1.0, 0.0)


def _warn(msg: str) -> None:
    warnings.warn(msg, RegimeWarning, stacklevel=3)


def _smooth_term(terms: np.ndarray, ts: np.ndarray, sp: SmoothnessParams) -> tuple:
    """Aggregate ``t**-s * terms`` over the scales with weights ``dt/t``."""
    scaled = ts ** (-sp.s) * terms
    if sp.beta == INF:
        return float(scaled.max()), float(scaled[-1])
    w = _log_trapezoid(len(ts)) ** (1.0 / sp.beta)
    return _lp_sequence(w * scaled, sp.beta), float(scaled[-1])


def besov_diff_norm(f: SampledFunction, hp: HerzParams, sp: SmoothnessParams,
                    cfg: DifferenceConfig = DifferenceConfig()) -> NormValue:
    """Herz norm plus the ball-means smoothness integral of Herz norms.

    The truncation diagnostic is the integrand at the finest scale, a proxy
    for the omitted part of the integral below ``2 * spacing``.
    """
    n = f.grid.dim
    lo = max(sigma_q(n, hp.q), hp.alpha - (n - n / hp.q if hp.q != INF else n))
    if not lo < sp.s < cfg.M:
        _warn(f"besov_diff_norm: s = {sp.s} outside ({lo}, {cfg.M})")
    ts = cfg.scales(f.grid)
    terms = np.array([herz_norm(ball_means(f, t, cfg.M), hp).value for t in ts])
    smooth, tail = _smooth_term(terms, ts, sp)
    return NormValue(herz_norm(f, hp).value + smooth, tail)


def tl_diff_norm(f: SampledFunction, hp: HerzParams, sp: SmoothnessParams,
                 cfg: DifferenceConfig = DifferenceConfig()) -> NormValue:
    """Herz norm plus the Herz norm of the pointwise ball-means integral."""
    if hp.p == INF or hp.q == INF:
        raise ParameterError("Triebel-Lizorkin scale needs finite p and q")
    n = f.grid.dim
    lo = max(sigma_pq(n, hp.q, sp.beta), hp.alpha - (n - n / hp.q))
    if not lo < sp.s < cfg.M:
        _warn(f"tl_diff_norm: s = {sp.s} outside ({lo}, {cfg.M})")
    ts = cfg.scales(f.grid)
    means = [t ** (-sp.s) * ball_means(f, t, cfg.M).values.real for t in ts]
    if sp.beta == INF:
        g = np.max(means, axis=0)
    else:
        w = _log_trapezoid(len(ts))
        top = max(float(m.max()) for m in means)
        if top == 0.0:
            g = np.zeros(f.grid.shape)
        else:
            g = top * sum(wl * (m / top) ** sp.beta for wl, m in zip(w, means)) ** (1.0 / sp.beta)
    inner = _herz_from_array(g, f.grid, hp, None)
    tail = _herz_from_array(means[-1], f.grid, hp, None).value
    return NormValue(herz_norm(f, hp).value + inner.value, tail)


def besov_supdiff_norm(f: SampledFunction, hp: HerzParams, sp: SmoothnessParams,
                       M: int = 2, cfg: DifferenceConfig | None = None) -> NormValue:
    """Herz norm plus the integral of ``sup_{|h| <= t} ||Delta_h^M f||_Herz``."""
    cfg = cfg or DifferenceConfig(M=M)
    if not abs(hp.alpha) < sp.s < cfg.M:
        _warn(f"besov_supdiff_norm: s = {sp.s} outside (|alpha|, M) = ({abs(hp.alpha)}, {cfg.M})")
    grid = f.grid
    ts = cfg.scales(grid)
    offs = _offsets(grid, float(ts.max()) / grid.spacing)
    lengths = np.array([math.sqrt(sum(c * c for c in o)) * grid.spacing for o in offs])
    norms = np.array([_herz_from_array(np.abs(_difference_values(f.values, o, cfg.M)), grid, hp, None).value
                      if any(o) else 0.0 for o in offs])
    terms = np.array([norms[lengths <= t].max() for t in ts])
    smooth, tail = _smooth_term(terms, ts, sp)
    return NormValue(herz_norm(f, hp).value + smooth, tail)
