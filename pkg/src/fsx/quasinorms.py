"""Quasi-norms of sampled functions.

Every routine returns a :class:`NormValue` carrying the value together with a
truncation diagnostic, so callers can check that the tail lost to the finite
annulus or block range is negligible.

Index conventions follow the Herz definition
``(sum_k 2**(k*alpha*p) * ||f chi_k||_q**p)**(1/p)``: ``q`` is the inner
(Lebesgue) exponent and ``p`` the outer summability. Any exponent may be
``math.inf``, meaning a supremum.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import GridError, ParameterError
from .lattice import AnnulusRange, Grid, SampledFunction
from .spectral import (DyadicSystem, _fwd, _inv, bessel_multiplier, derivative,
                       multi_indices, riesz_multiplier)

INF = math.inf


class RegimeWarning(UserWarning):
    """A norm was evaluated outside the parameter window where it is known to be equivalent."""


def ext(x) -> float:
    """Coerce a number, Fraction or "inf"/"num/den" string to a float."""
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity", "oo"):
            return INF
        return float(Fraction(s))
    return float(x)


def recip(x: float) -> float:
    return 0.0 if x == INF else 1.0 / x


@dataclass(frozen=True)
class HerzParams:
    """Weight exponent ``alpha``, outer index ``p``, inner index ``q``."""

    alpha: float
    p: float
    q: float

    def __post_init__(self):
        object.__setattr__(self, "alpha", ext(self.alpha))
        object.__setattr__(self, "p", ext(self.p))
        object.__setattr__(self, "q", ext(self.q))
        if not (self.p > 0 and self.q > 0):
            raise ParameterError(f"Herz indices must be positive, got p={self.p}, q={self.q}")


@dataclass(frozen=True)
class SmoothnessParams:
    """Smoothness ``s`` and microlocal summability ``beta``."""

    s: float
    beta: float

    def __post_init__(self):
        object.__setattr__(self, "s", ext(self.s))
        object.__setattr__(self, "beta", ext(self.beta))
        if not self.beta > 0:
            raise ParameterError(f"beta must be positive, got {self.beta}")


@dataclass(frozen=True)
class MorreyParams:
    """Local integrability ``u`` and Morrey scale ``p`` with ``u <= p``."""

    u: float
    p: float

    def __post_init__(self):
        object.__setattr__(self, "u", ext(self.u))
        object.__setattr__(self, "p", ext(self.p))
        if not (0 < self.u <= self.p < INF):
            raise ParameterError(f"Morrey indices need 0 < u <= p < inf, got u={self.u}, p={self.p}")


@dataclass(frozen=True)
class NormValue:
    value: float
    truncation_diag: float = 0.0

    def __float__(self):
        return float(self.value)


def _lq(a: np.ndarray, q: float, vol: float) -> float:
    """Discrete L^q norm of nonnegative samples with cell volume ``vol``."""
    if a.size == 0:
        return 0.0
    top = float(a.max())
    if top == 0.0:
        return 0.0
    if q == INF:
        return top
    return top * (float(np.sum((a / top) ** q)) * vol) ** (1.0 / q)


def _lp_sequence(terms: np.ndarray, p: float) -> float:
    terms = np.asarray(terms, dtype=np.float64)
    if terms.size == 0:
        return 0.0
    top = float(terms.max())
    if top == 0.0:
        return 0.0
    if p == INF:
        return top
    return top * float(np.sum((terms / top) ** p)) ** (1.0 / p)


def lebesgue_norm(f, p, region=None) -> NormValue:
    """``(sum |f|**p * cell volume)**(1/p)`` over the region (default: everything)."""
    p = ext(p)
    if p <= 0:
        raise ParameterError("p must be positive")
    a = np.abs(f.values)
    grid = f.grid
    if region is not None:
        mask = np.asarray(region.values if isinstance(region, SampledFunction) else region).real != 0
        a = a[mask]
        if a.size == 0:
            return NormValue(0.0, 1.0)
    return NormValue(_lq(a.ravel(), p, grid.cell_volume))


@lru_cache(maxsize=64)
def _annulus_labels(grid: Grid) -> np.ndarray:
    lab = grid.annulus_index()
    lab.setflags(write=False)
    return lab


def annulus_norms(f: SampledFunction, q: float, rng: AnnulusRange | None = None) -> tuple:
    """Per-annulus L^q norms ``||f chi_k||_q`` for k in the range."""
    grid = f.grid
    rng = rng or grid.default_range()
    rng.check(grid)
    return _annulus_norms_array(np.abs(f.values), grid, ext(q), rng)


def _annulus_norms_array(a: np.ndarray, grid: Grid, q: float, rng: AnnulusRange) -> tuple:
    lab = _annulus_labels(grid)
    ks = np.arange(rng.k_min, rng.k_max + 1)
    top = float(a.max()) if a.size else 0.0
    if top == 0.0:
        return ks, np.zeros(len(ks))
    sel = (lab >= rng.k_min) & (lab <= rng.k_max)
    idx = (lab[sel] - rng.k_min).ravel()
    vals = (a[sel] / top).ravel()
    if q == INF:
        out = np.zeros(len(ks))
        np.maximum.at(out, idx, vals)
        return ks, top * out
    sums = np.bincount(idx, weights=vals ** q, minlength=len(ks))
    return ks, top * (sums * grid.cell_volume) ** (1.0 / q)


def _herz_from_array(a: np.ndarray, grid: Grid, hp: HerzParams, rng: AnnulusRange | None) -> NormValue:
    rng = rng or grid.default_range()
    rng.check(grid)
    ks, norms = _annulus_norms_array(a, grid, hp.q, rng)
    terms = np.exp2(ks * hp.alpha) * norms
    value = _lp_sequence(terms, hp.p)
    diag = float(terms[0] + terms[-1]) if len(terms) > 1 else float(terms[0])
    return NormValue(value, diag)


def herz_norm(f: SampledFunction, hp: HerzParams, rng: AnnulusRange | None = None) -> NormValue:
    """Homogeneous Herz quasi-norm over an annulus range (default: all resolvable annuli).

    The truncation diagnostic is the sum of the two boundary-annulus terms.
    """
    return _herz_from_array(np.abs(f.values), f.grid, hp, rng)


def weighted_lp_norm(f: SampledFunction, alpha, p) -> NormValue:
    """Lebesgue norm with power weight ``|x|**(alpha*p)`` (origin cell dropped unless alpha = 0)."""
    alpha, p = ext(alpha), ext(p)
    grid = f.grid
    a = np.abs(f.values)
    if alpha == 0:
        return NormValue(_lq(a.ravel(), p, grid.cell_volume))
    r = grid.radius()
    keep = r > 0
    w = np.zeros_like(r)
    w[keep] = r[keep] ** alpha
    return NormValue(_lq((a * w)[keep], p, grid.cell_volume))


# ---------------------------------------------------------------- Morrey


@lru_cache(maxsize=64)
def _ball_kernels(grid: Grid) -> tuple:
    """Ball indicators ``|y| <= 2**m`` (periodic, centered) for every resolvable m, in FFT form."""
    r2 = grid.radius_sq_int()
    out = []
    for i in range(0, int(grid.N).bit_length() - 1):
        rad_cells = 2 ** i
        ind = (r2 <= rad_cells * rad_cells).astype(np.float64)
        count = float(ind.sum())
        kern = np.fft.fftn(np.fft.ifftshift(ind))
        out.append((grid.spacing_log2 + i, count, kern))
    return tuple(out)


def _morrey_from_array(a: np.ndarray, grid: Grid, mp: MorreyParams) -> NormValue:
    top = float(a.max()) if a.size else 0.0
    if top == 0.0:
        return NormValue(0.0)
    g = (a / top) ** mp.u
    expo = 1.0 / mp.p - 1.0 / mp.u
    vol = grid.cell_volume
    # full-domain ball
    full = float(g.sum())
    best = (grid.N ** grid.dim * vol) ** expo * (full * vol) ** (1.0 / mp.u)
    stride = max(1, grid.N // 64)
    sl = (slice(0, None, stride),) * grid.dim
    G = np.fft.fftn(g)
    for _, count, kern in _ball_kernels(grid):
        sums = np.fft.ifftn(G * kern).real[sl]
        local = float(max(sums.max(), 0.0))
        cand = (count * vol) ** expo * (local * vol) ** (1.0 / mp.u)
        best = max(best, cand)
    return NormValue(top * best)


def morrey_norm(f: SampledFunction, mp: MorreyParams) -> NormValue:
    """Morrey quasi-norm ``sup_B |B|**(1/p - 1/u) ||f chi_B||_u``.

    The supremum runs over balls of radius ``2**m`` (one cell up to the
    half-width) centered on a lattice of stride ``max(1, N/64)`` cells, plus
    the whole torus. Ball volumes are the discrete cell counts.
    """
    return _morrey_from_array(np.abs(f.values), f.grid, mp)


# ---------------------------------------------------------- block spaces


def _system(f: SampledFunction, sys: DyadicSystem | None) -> DyadicSystem:
    if sys is None:
        return DyadicSystem.for_grid(f.grid)
    if sys.grid != f.grid:
        raise GridError("dyadic system built for a different grid")
    return sys


def _block_norms(f, sys, homogeneous, base) -> tuple:
    sys = _system(f, sys)
    js, vals = [], []
    for j, block in sys.blocks(f, homogeneous):
        js.append(j)
        vals.append(base(np.abs(block)).value)
    return sys, np.array(js), np.array(vals)


def _besov_type(f, sp, sys, homogeneous, base) -> NormValue:
    sys, js, vals = _block_norms(f, sys, homogeneous, base)
    value = _lp_sequence(np.exp2(js * sp.s) * vals, sp.beta)
    return NormValue(value, value * sys.truncation(f, homogeneous))


def _square_function(f, sp, sys, homogeneous) -> tuple:
    sys = _system(f, sys)
    blocks = sys.blocks(f, homogeneous)
    if sp.beta == INF:
        acc = np.zeros(f.grid.shape)
        for j, b in blocks:
            acc = np.maximum(acc, 2.0 ** (j * sp.s) * np.abs(b))
        return sys, acc
    mags = [2.0 ** (j * sp.s) * np.abs(b) for j, b in blocks]
    top = max(float(m.max()) for m in mags) if mags else 0.0
    if top == 0.0:
        return sys, np.zeros(f.grid.shape)
    acc = np.zeros(f.grid.shape)
    for m in mags:
        acc = acc + (m / top) ** sp.beta
    return sys, top * acc ** (1.0 / sp.beta)


def herz_besov_norm(f: SampledFunction, hp: HerzParams, sp: SmoothnessParams,
                    sys: DyadicSystem | None = None, homogeneous: bool = False) -> NormValue:
    """Herz-type Besov quasi-norm: l^beta over j of ``2**(j s) * ||block_j||_Herz``."""
    return _besov_type(f, sp, sys, homogeneous, lambda a: _herz_from_array(a, f.grid, hp, None))


def herz_tl_norm(f: SampledFunction, hp: HerzParams, sp: SmoothnessParams,
                 sys: DyadicSystem | None = None, homogeneous: bool = False) -> NormValue:
    """Herz-type Triebel-Lizorkin quasi-norm: Herz norm of the pointwise l^beta block sum."""
    if hp.p == INF or hp.q == INF:
        raise ParameterError("Triebel-Lizorkin scale needs finite p and q")
    sys, g = _square_function(f, sp, sys, homogeneous)
    nv = _herz_from_array(g, f.grid, hp, None)
    return NormValue(nv.value, nv.value * sys.truncation(f, homogeneous))


def besov_morrey_norm(f: SampledFunction, mp: MorreyParams, sp: SmoothnessParams,
                      sys: DyadicSystem | None = None, homogeneous: bool = False) -> NormValue:
    """Besov-Morrey quasi-norm: l^beta over j of ``2**(j s) * ||block_j||_Morrey``."""
    return _besov_type(f, sp, sys, homogeneous, lambda a: _morrey_from_array(a, f.grid, mp))


def tl_morrey_norm(f: SampledFunction, mp: MorreyParams, sp: SmoothnessParams,
                   sys: DyadicSystem | None = None, homogeneous: bool = False) -> NormValue:
    """Triebel-Lizorkin-Morrey quasi-norm: Morrey norm of the pointwise block sum."""
    sys, g = _square_function(f, sp, sys, homogeneous)
    nv = _morrey_from_array(g, f.grid, mp)
    return NormValue(nv.value, nv.value * sys.truncation(f, homogeneous))


def _soft_window(hp: HerzParams, n: int, what: str) -> None:
    if not (1 < hp.q < INF and -n / hp.q < hp.alpha < n * (1 - 1 / hp.q)):
        warnings.warn(f"{what}: parameters outside 1 < q < inf, -n/q < alpha < n(1 - 1/q)",
                      RegimeWarning, stacklevel=3)


def bessel_potential_norm(f: SampledFunction, hp: HerzParams, s) -> NormValue:
    """Herz norm of the Bessel potential ``(1 + |xi|**2)**(s/2) f``."""
    _soft_window(hp, f.grid.dim, "bessel_potential_norm")
    return herz_norm(bessel_multiplier(f, ext(s)), hp)


def riesz_potential_norm(f: SampledFunction, hp: HerzParams, s) -> NormValue:
    """Herz norm of the fractional Laplacian ``|xi|**s f`` (homogeneous analogue)."""
    return herz_norm(riesz_multiplier(f, ext(s)), hp)


def sobolev_herz_norm(f: SampledFunction, hp: HerzParams, m: int) -> NormValue:
    """Sum over multi-indices ``|beta| <= m`` of Herz norms of spectral derivatives."""
    if m < 0:
        raise ParameterError("m must be nonnegative")
    total, diag = 0.0, 0.0
    for idx in multi_indices(f.grid.dim, m):
        nv = herz_norm(derivative(f, idx), hp)
        total += nv.value
        diag += nv.truncation_diag
    return NormValue(total, diag)


def quasi_triangle_constant(*indices) -> float:
    """Explicit quasi-triangle constant ``2**(max(1/min(1, indices) - 1, 0) + 1)``."""
    m = min([1.0] + [ext(i) for i in indices])
    return 2.0 ** (max(1.0 / m - 1.0, 0.0) + 1.0)


# --------------------------------------------------------- interpolation


@dataclass(frozen=True)
class Bundle:
    """Parameters of one Herz-type space: Herz part plus optional smoothness part."""

    alpha: float
    p: float
    q: float
    beta: float = INF
    s: float = 0.0

    def __post_init__(self):
        for name in ("alpha", "p", "q", "beta", "s"):
            object.__setattr__(self, name, ext(getattr(self, name)))

    def herz(self) -> HerzParams:
        return HerzParams(self.alpha, self.p, self.q)

    def smooth(self) -> SmoothnessParams:
        return SmoothnessParams(self.s, self.beta)


def interpolate_bundle(b0: Bundle, b1: Bundle, theta: float) -> Bundle:
    """Affine averages: alpha, s, 1/p, 1/q, 1/beta are linear in theta."""

    def inv_avg(a, b):
        r = (1 - theta) * recip(a) + theta * recip(b)
        return INF if r == 0 else 1.0 / r

    return Bundle((1 - theta) * b0.alpha + theta * b1.alpha,
                  inv_avg(b0.p, b1.p), inv_avg(b0.q, b1.q), inv_avg(b0.beta, b1.beta),
                  (1 - theta) * b0.s + theta * b1.s)


def bundle_norm(f: SampledFunction, b: Bundle, kind: str, sys: DyadicSystem | None = None) -> float:
    if kind == "herz":
        return herz_norm(f, b.herz()).value
    if kind == "besov":
        return herz_besov_norm(f, b.herz(), b.smooth(), sys).value
    if kind == "tl":
        return herz_tl_norm(f, b.herz(), b.smooth(), sys).value
    raise ParameterError(f"unknown space kind {kind!r}")


def interpolation_check(f: SampledFunction, b0: Bundle, b1: Bundle, theta: float,
                        kind: str = "besov", sys: DyadicSystem | None = None) -> tuple:
    """Both sides of the interpolation inequality ``||f||_theta <= ||f||_0**(1-theta) ||f||_1**theta``."""
    theta = ext(theta)
    if not 0 < theta < 1:
        raise ParameterError("theta must lie in (0, 1)")
    bt = interpolate_bundle(b0, b1, theta)
    lhs = bundle_norm(f, bt, kind, sys)
    n0 = bundle_norm(f, b0, kind, sys)
    n1 = bundle_norm(f, b1, kind, sys)
    return lhs, n0 ** (1 - theta) * n1 ** theta
