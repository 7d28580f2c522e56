"""Periodic dyadic grids, dyadic annuli, dilation and translation.

A :class:`Grid` discretizes the torus ``[-2**K, 2**K)**dim`` with ``N``
samples per axis. Sample points sit at ``-2**K + i * spacing`` and serve as
cell centers, so the origin is a sample point and every dyadic radius
``2**k >= spacing`` falls on a lattice shell. Annulus membership is decided in
integer arithmetic on squared lattice radii, never by floating comparisons.
"""
from __future__ import annotations

import io
import struct
from dataclasses import dataclass
from typing import BinaryIO, Sequence

import numpy as np

from .errors import FormatError, GridError, RangeError

MAGIC = b"FSX1"
_HEADER = struct.Struct("<BbI")


def _is_power_of_two(n: int) -> bool:
    return n > 0 and (n & (n - 1)) == 0


@dataclass(frozen=True)
class Grid:
    """Periodic grid on ``[-2**K, 2**K)**dim`` with ``N`` points per axis."""

    dim: int
    K: int
    N: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise GridError(f"dim must be 1 or 2, got {self.dim}")
        if not isinstance(self.N, (int, np.integer)) or not _is_power_of_two(int(self.N)) or self.N < 16:
            raise GridError(f"N must be a power of two >= 16, got {self.N}")
        if not isinstance(self.K, (int, np.integer)) or not -127 <= self.K <= 127:
            raise GridError(f"K must be an integer in [-127, 127], got {self.K}")

    @classmethod
    def default(cls, dim: int) -> "Grid":
        """Desk-scale default grid for the given dimension."""
        return cls(1, 4, 4096) if dim == 1 else cls(2, 3, 256)

    @property
    def spacing_log2(self) -> int:
        return self.K + 1 - (int(self.N).bit_length() - 1)

    @property
    def spacing(self) -> float:
        return 2.0 ** self.spacing_log2

    @property
    def halfwidth(self) -> float:
        return 2.0 ** self.K

    @property
    def period(self) -> float:
        return 2.0 ** (self.K + 1)

    @property
    def shape(self) -> tuple:
        return (self.N,) * self.dim

    @property
    def cell_volume(self) -> float:
        return self.spacing ** self.dim

    def axis(self) -> np.ndarray:
        """Sample coordinates along one axis."""
        return -self.halfwidth + np.arange(self.N) * self.spacing

    def offsets(self) -> tuple:
        """Integer lattice offsets from the origin, one broadcastable array per axis."""
        idx = np.arange(self.N) - self.N // 2
        if self.dim == 1:
            return (idx,)
        return (idx[:, None], idx[None, :])

    def coords(self) -> tuple:
        """Cell-center coordinates, one broadcastable array per axis."""
        return tuple(o * self.spacing for o in self.offsets())

    def radius_sq_int(self) -> np.ndarray:
        """Squared distance to the origin in units of ``spacing**2`` (exact integers)."""
        offs = self.offsets()
        r2 = np.zeros(self.shape, dtype=np.int64)
        for o in offs:
            r2 = r2 + o.astype(np.int64) ** 2
        return r2

    def radius(self) -> np.ndarray:
        """Euclidean norm of every cell center."""
        return np.sqrt(self.radius_sq_int().astype(np.float64)) * self.spacing

    def annulus_index(self) -> np.ndarray:
        """Annulus label k of every cell, with 2**(k-1) < |x| <= 2**k.

        The origin cell gets the sentinel ``k_min - 1`` so it lies in no
        annulus of the default range; cells beyond radius ``2**K`` get labels
        above ``K``.
        """
        r2 = self.radius_sq_int()
        pos = r2 > 0
        safe = np.where(pos, r2, 1).astype(np.float64)
        # smallest t with r2 <= 4**t, fixed up in exact integer arithmetic
        t = np.ceil(np.log2(safe) / 2.0).astype(np.int64)
        t = np.where(safe > 4.0 ** t, t + 1, t)
        t = np.where((t > 0) & (safe <= 4.0 ** (t - 1)), t - 1, t)
        k = t + self.spacing_log2
        return np.where(pos, k, self.spacing_log2 - 1)

    def default_range(self) -> "AnnulusRange":
        return AnnulusRange(self.spacing_log2, self.K)

    def to_dict(self) -> dict:
        return {"dim": self.dim, "K": self.K, "N": self.N}

    @classmethod
    def from_dict(cls, d: dict) -> "Grid":
        try:
            return cls(int(d["dim"]), int(d["K"]), int(d["N"]))
        except KeyError as exc:
            raise FormatError(f"grid descriptor lacks {exc}") from None


@dataclass(frozen=True)
class AnnulusRange:
    """Inclusive range of annulus indices ``k_min..k_max``."""

    k_min: int
    k_max: int

    def __post_init__(self):
        if self.k_min > self.k_max:
            raise RangeError(f"empty annulus range [{self.k_min}, {self.k_max}]")

    def check(self, grid: Grid) -> None:
        if self.k_max > grid.K:
            raise RangeError(f"annulus 2**{self.k_max} exceeds the domain half-width 2**{grid.K}")

    def __iter__(self):
        return iter(range(self.k_min, self.k_max + 1))


class SampledFunction:
    """Complex samples of a function on a :class:`Grid`.

    Values are stored as a read-only array of shape ``(N,)*dim`` (row-major
    flattening gives the ``N**dim`` sample vector).
    """

    __slots__ = ("grid", "values")

    def __init__(self, grid: Grid, values):
        arr = np.array(values, dtype=np.complex128)
        if arr.size != grid.N ** grid.dim:
            raise GridError(f"expected {grid.N ** grid.dim} samples, got {arr.size}")
        arr = arr.reshape(grid.shape)
        if not np.all(np.isfinite(arr)):
            raise GridError("sampled values must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "grid", grid)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("SampledFunction is immutable")

    def __repr__(self):
        return f"SampledFunction(grid={self.grid!r})"

    def with_values(self, values) -> "SampledFunction":
        return SampledFunction(self.grid, values)

    def _other(self, other):
        if isinstance(other, SampledFunction):
            if other.grid != self.grid:
                raise GridError("operands live on different grids")
            return other.values
        return other

    def __add__(self, other):
        return self.with_values(self.values + self._other(other))

    __radd__ = __add__

    def __sub__(self, other):
        return self.with_values(self.values - self._other(other))

    def __neg__(self):
        return self.with_values(-self.values)

    def __mul__(self, other):
        return self.with_values(self.values * self._other(other))

    __rmul__ = __mul__

    def abs(self) -> np.ndarray:
        return np.abs(self.values)


def annulus_mask(grid: Grid, k: int) -> SampledFunction:
    """Indicator of the annulus ``2**(k-1) < |x| <= 2**k`` by cell center."""
    if k > grid.K:
        raise RangeError(f"annulus {k} exceeds the domain (K = {grid.K})")
    return SampledFunction(grid, (grid.annulus_index() == k).astype(np.float64))


def dilate_dyadic(f: SampledFunction, m: int) -> SampledFunction:
    """Return ``g(x) = f(2**m x)``.

    The samples are kept and the grid is rescaled by ``2**-m`` (half-width
    exponent ``K - m``), so the point ``2**-m x_i`` of the new grid carries
    ``f(x_i)``. This is an exact index map for every integer m: no sample is
    dropped, none is interpolated, and nothing wraps.
    """
    m = int(m)
    if m == 0:
        return f
    grid = f.grid
    return SampledFunction(Grid(grid.dim, grid.K - m, grid.N), f.values)


def translate(f: SampledFunction, h: Sequence[int] | int) -> SampledFunction:
    """Periodic shift by the lattice offset ``h`` (in cells): ``g(x) = f(x - h)``."""
    shift = tuple(np.atleast_1d(np.asarray(h, dtype=np.int64)).tolist())
    if len(shift) != f.grid.dim:
        raise GridError(f"offset {h} does not match dimension {f.grid.dim}")
    if not any(shift):
        return f
    return f.with_values(np.roll(f.values, shift, axis=tuple(range(f.grid.dim))))


def to_bytes(f: SampledFunction) -> bytes:
    """Serialize to the FSX1 binary layout."""
    g = f.grid
    body = np.ascontiguousarray(f.values, dtype="<c16").tobytes()
    return MAGIC + _HEADER.pack(g.dim, g.K, g.N) + body


def from_bytes(data: bytes) -> SampledFunction:
    """Parse an FSX1 blob."""
    if len(data) < 4 + _HEADER.size or data[:4] != MAGIC:
        raise FormatError("not an FSX1 file")
    dim, K, N = _HEADER.unpack_from(data, 4)
    try:
        grid = Grid(dim, K, N)
    except GridError as exc:
        raise FormatError(str(exc)) from None
    body = data[4 + _HEADER.size:]
    if len(body) != 16 * N ** dim:
        raise FormatError(f"payload has {len(body)} bytes, expected {16 * N ** dim}")
    return SampledFunction(grid, np.frombuffer(body, dtype="<c16"))


def write_fsx(f: SampledFunction, target: str | BinaryIO) -> None:
    data = to_bytes(f)
    if isinstance(target, (str, bytes)) or hasattr(target, "__fspath__"):
        with open(target, "wb") as fh:
            fh.write(data)
    else:
        target.write(data)


def read_fsx(source: str | BinaryIO) -> SampledFunction:
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, "rb") as fh:
            return from_bytes(fh.read())
    if isinstance(source, io.IOBase) or hasattr(source, "read"):
        return from_bytes(source.read())
    raise FormatError(f"cannot read from {source!r}")
