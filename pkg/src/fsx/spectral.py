"""Discrete Fourier analysis on the periodic grid.

The transform is unitary and the frequency lattice is the exact dual of the
torus: angular frequencies ``2*pi*k / period``. Multipliers act diagonally on
that lattice, so one-bin inputs are reproduced exactly.

Spectra are returned in centered order (zero frequency at index ``N//2`` on
every axis), matching the spatial layout where the origin sits at ``N//2``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import RangeError, SingularMultiplierError
from .lattice import Grid, SampledFunction


def smooth_step(t):
    """C-infinity step: 0 for t <= 0, 1 for t >= 1."""
    t = np.asarray(t, dtype=np.float64)
    a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
    u = 1.0 - t
    b = np.where(u > 0, np.exp(-1.0 / np.where(u > 0, u, 1.0)), 0.0)
    return a / (a + b)


def cutoff(xi):
    """Radial profile equal to 1 on |xi| <= 1 and 0 on |xi| >= 3/2."""
    return smooth_step(3.0 - 2.0 * np.abs(xi))


@lru_cache(maxsize=64)
def _frequency_axes(grid: Grid) -> tuple:
    # centered ordering: index i carries angular frequency (i - N/2) * dxi
    dxi = 2.0 * np.pi / grid.period
    ax = (np.arange(grid.N) - grid.N // 2) * dxi
    if grid.dim == 1:
        axes = (ax,)
    else:
        axes = (ax[:, None], ax[None, :])
    for a in axes:
        a.setflags(write=False)
    return axes


@lru_cache(maxsize=64)
def _frequency_modulus(grid: Grid) -> np.ndarray:
    axes = _frequency_axes(grid)
    r2 = np.zeros(grid.shape)
    for a in axes:
        r2 = r2 + a * a
    out = np.sqrt(r2)
    out.setflags(write=False)
    return out


def frequency_axes(grid: Grid) -> tuple:
    """Angular frequency along each axis, broadcastable, centered order."""
    return _frequency_axes(grid)


def frequency_modulus(grid: Grid) -> np.ndarray:
    """``|xi|`` on the dual lattice, centered order."""
    return _frequency_modulus(grid)


def nyquist(grid: Grid) -> float:
    return math.pi / grid.spacing


def _fwd(values: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(np.fft.fftn(np.fft.ifftshift(values), norm="ortho"))


def _inv(spectrum: np.ndarray) -> np.ndarray:
    return np.fft.fftshift(np.fft.ifftn(np.fft.ifftshift(spectrum), norm="ortho"))


def dft(f: SampledFunction) -> SampledFunction:
    """Unitary DFT; the result lives on the same grid object, centered order."""
    return f.with_values(_fwd(f.values))


def idft(F: SampledFunction) -> SampledFunction:
    """Inverse of :func:`dft`."""
    return F.with_values(_inv(F.values))


def apply_multiplier(f: SampledFunction, symbol: np.ndarray) -> SampledFunction:
    """``idft(symbol * dft(f))`` for a symbol sampled on the dual lattice."""
    return f.with_values(_inv(symbol * _fwd(f.values)))


def _dyadic_cutoff(modulus: np.ndarray, j: int) -> np.ndarray:
    # ldexp keeps the 2**-j rescaling exact
    return cutoff(np.ldexp(modulus, -j))


@dataclass(frozen=True)
class DyadicSystem:
    """Smooth dyadic resolution of unity realized on a grid's dual lattice.

    Attributes
    ----------
    grid : Grid
    j_max : int
        Largest block index whose support ``|xi| < 1.5 * 2**j`` stays at or
        below the Nyquist frequency. The top block also carries every grid
        frequency above ``2**(j_max - 1)``, so the blocks sum to the identity.
    j_min_hom : int
        Lowest homogeneous block index (defaults to ``-K``).
    """

    grid: Grid
    j_max: int
    j_min_hom: int

    @classmethod
    def for_grid(cls, grid: Grid, j_min_hom: int | None = None) -> "DyadicSystem":
        ny = nyquist(grid)
        j = int(math.floor(math.log2(ny / 1.5)))
        while 1.5 * 2.0 ** (j + 1) <= ny:
            j += 1
        while 1.5 * 2.0 ** j > ny:
            j -= 1
        return cls(grid, j, -grid.K if j_min_hom is None else int(j_min_hom))

    def block_indices(self, homogeneous: bool = False) -> range:
        lo = self.j_min_hom if homogeneous else 0
        return range(lo, self.j_max + 1)

    def _check(self, j: int, homogeneous: bool) -> None:
        if j not in self.block_indices(homogeneous):
            kind = "homogeneous" if homogeneous else "inhomogeneous"
            raise RangeError(f"{kind} block {j} outside [{self.block_indices(homogeneous)[0]}, {self.j_max}]")

    def symbol(self, j: int, homogeneous: bool = False) -> np.ndarray:
        """Multiplier table of block j on the dual lattice."""
        self._check(j, homogeneous)
        xi = frequency_modulus(self.grid)
        upper = 1.0 if j == self.j_max else _dyadic_cutoff(xi, j)
        if j == 0 and not homogeneous:
            return upper if j < self.j_max else np.ones(self.grid.shape)
        return upper - _dyadic_cutoff(xi, j - 1)

    def partition(self, homogeneous: bool = False) -> np.ndarray:
        """Sum of all block symbols in the system."""
        total = np.zeros(self.grid.shape)
        for j in self.block_indices(homogeneous):
            total = total + self.symbol(j, homogeneous)
        return total

    def blocks(self, f: SampledFunction, homogeneous: bool = False) -> list:
        """All Littlewood-Paley pieces of f as ``(j, values)`` pairs, ascending j."""
        spec = _fwd(f.values)
        return [(j, _inv(self.symbol(j, homogeneous) * spec)) for j in self.block_indices(homogeneous)]

    def truncation(self, f: SampledFunction, homogeneous: bool = False) -> float:
        """Relative L2 energy of f not covered by the system's blocks."""
        spec = _fwd(f.values)
        total = np.linalg.norm(spec)
        if total == 0.0:
            return 0.0
        return float(np.linalg.norm((1.0 - self.partition(homogeneous)) * spec) / total)


def lp_block(sys: DyadicSystem, f: SampledFunction, j: int, homogeneous: bool = False) -> SampledFunction:
    """Littlewood-Paley block j of f."""
    return apply_multiplier(f, sys.symbol(j, homogeneous))


def partial_sum(sys: DyadicSystem, f: SampledFunction, J: int) -> SampledFunction:
    """Low-pass projection onto blocks 0..J, applied as one cutoff multiplier."""
    if not 0 <= J <= sys.j_max:
        raise RangeError(f"J = {J} outside [0, {sys.j_max}]")
    if J == sys.j_max:
        return f.with_values(f.values.copy())
    return apply_multiplier(f, _dyadic_cutoff(frequency_modulus(f.grid), J))


def bessel_multiplier(f: SampledFunction, s: float) -> SampledFunction:
    """Bessel potential ``(1 + |xi|**2)**(s/2)``."""
    if s == 0:
        return f
    xi = frequency_modulus(f.grid)
    return apply_multiplier(f, (1.0 + xi * xi) ** (s / 2.0))


def riesz_multiplier(f: SampledFunction, s: float, mean_tol: float = 1e-12) -> SampledFunction:
    """Fractional Laplacian ``|xi|**s``.

    The zero bin is sent to zero for ``s > 0``. For ``s < 0`` the input must
    have (numerically) zero mean, otherwise :class:`SingularMultiplierError`.
    """
    if s == 0:
        return f
    xi = frequency_modulus(f.grid)
    spec = _fwd(f.values)
    zero = (f.grid.N // 2,) * f.grid.dim
    if s < 0 and abs(spec[zero]) > mean_tol * np.linalg.norm(spec):
        raise SingularMultiplierError("negative-order Riesz multiplier on a function with nonzero mean")
    sym = np.zeros_like(xi)
    nz = xi > 0
    sym[nz] = xi[nz] ** s
    return f.with_values(_inv(sym * spec))


def derivative(f: SampledFunction, order) -> SampledFunction:
    """Spectral partial derivative with multiplier ``(i xi)**order`` (multi-index)."""
    order = tuple(int(o) for o in np.atleast_1d(order))
    if len(order) != f.grid.dim or min(order) < 0:
        raise RangeError(f"bad multi-index {order} for dimension {f.grid.dim}")
    if not any(order):
        return f
    sym = np.ones(f.grid.shape, dtype=np.complex128)
    for a, k in zip(frequency_axes(f.grid), order):
        if k:
            sym = sym * (1j * a) ** k
    return apply_multiplier(f, sym)


def multi_indices(dim: int, max_order: int):
    """All multi-indices of length dim with total order <= max_order, graded."""
    out = []
    for total in range(max_order + 1):
        for idx in itertools.product(range(total + 1), repeat=dim):
            if sum(idx) == total:
                out.append(idx)
    return out
