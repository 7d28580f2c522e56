"""Analytic test functions and closed-form oracle norms."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import FormatError, ParameterError, TruncationError
from .lattice import Grid, SampledFunction
from .quasinorms import HerzParams, ext
from .spectral import cutoff, frequency_modulus

KINDS = ("gaussian", "bump", "annulus_indicator", "power_cutoff",
         "bandlimited_kernel", "harmonic", "polynomial_window")

_DEFAULTS = {
    "gaussian": {"a": 1.0, "c0": 0.0, "c1": 0.0},
    "bump": {"radius": 1.0, "c0": 0.0, "c1": 0.0},
    "annulus_indicator": {"k": 0},
    "power_cutoff": {"a": 0.0, "k1": 0, "k2": 0},
    "bandlimited_kernel": {"R": 1.0},
    "harmonic": {"m0": 1, "m1": 0},
    "polynomial_window": {"degree": 1, "radius": 2.0},
}

WRAP_TOL = 1e-12


@dataclass(frozen=True)
class TestFunction:
    """A named analytic function with kind-specific parameters.

    ``c0``/``c1`` shift the center of gaussians and bumps; harmonic indices
    ``m0``/``m1`` count periods across the torus; polynomial windows multiply
    ``x_0**degree`` by a smooth cutoff equal to one on ``|x| <= radius``.
    """

    __test__ = False  # not a pytest class

    kind: str
    params: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown corpus kind {self.kind!r}")
        given = dict(self.params)
        unknown = set(given) - set(_DEFAULTS[self.kind])
        if unknown:
            raise ParameterError(f"{self.kind} does not take {sorted(unknown)}")
        merged = dict(_DEFAULTS[self.kind])
        merged.update(given)
        object.__setattr__(self, "params", tuple(sorted(merged.items())))

    @classmethod
    def make(cls, kind: str, **params) -> "TestFunction":
        return cls(kind, tuple(params.items()))

    def p(self, name):
        return dict(self.params)[name]

    @property
    def name(self) -> str:
        shown = [f"{k}={_fmt(v)}" for k, v in self.params if v != _DEFAULTS[self.kind][k] or k in ("a", "R", "k", "radius")]
        return f"{self.kind}({','.join(shown)})"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "params": {k: _fmt(v) for k, v in self.params}}

    @classmethod
    def from_dict(cls, d: dict) -> "TestFunction":
        params = {}
        for k, v in d.get("params", {}).items():
            params[k] = int(v) if k in ("k", "k1", "k2", "m0", "m1", "degree") else ext(v)
        return cls.make(d["kind"], **params)


def _fmt(v) -> str:
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _center_shift(tf: TestFunction, coords):
    shifts = (float(tf.p("c0")), float(tf.p("c1")))
    return [c - s for c, s in zip(coords, shifts)]


def _raw(tf: TestFunction, grid: Grid) -> np.ndarray:
    kind = tf.kind
    if kind == "gaussian":
        xs = _center_shift(tf, grid.coords())
        r2 = sum(c * c for c in xs)
        return np.exp(-float(tf.p("a")) * r2) * np.ones(grid.shape)
    if kind == "bump":
        xs = _center_shift(tf, grid.coords())
        t = sum(c * c for c in xs) / float(tf.p("radius")) ** 2
        inside = t < 1
        out = np.zeros(grid.shape)
        out[inside] = np.exp(-1.0 / (1.0 - t[inside]))
        return out
    if kind == "annulus_indicator":
        k = int(tf.p("k"))
        if k > grid.K:
            raise ParameterError(f"annulus {k} exceeds the domain")
        return (grid.annulus_index() == k).astype(np.float64)
    if kind == "power_cutoff":
        k1, k2, a = int(tf.p("k1")), int(tf.p("k2")), float(tf.p("a"))
        if k1 > k2 or k2 > grid.K:
            raise ParameterError(f"bad annulus span [{k1}, {k2}] for K = {grid.K}")
        lab = grid.annulus_index()
        sel = (lab >= k1) & (lab <= k2)
        out = np.zeros(grid.shape)
        out[sel] = grid.radius()[sel] ** a
        return out
    if kind == "bandlimited_kernel":
        R = float(tf.p("R"))
        sym = cutoff(frequency_modulus(grid) / R)
        # (2 pi)**-n times the integral of the symbol against e^{i x xi}, as a lattice sum
        spec = np.fft.ifftshift(sym)
        vals = np.fft.fftshift(np.fft.ifftn(spec)) * grid.N ** grid.dim / grid.period ** grid.dim
        return vals.real
    if kind == "harmonic":
        ms = (int(tf.p("m0")), int(tf.p("m1")))[: grid.dim]
        phase = sum(2 * math.pi * m / grid.period * c for m, c in zip(ms, grid.coords()))
        return np.exp(1j * phase) * np.ones(grid.shape)
    if kind == "polynomial_window":
        x0 = grid.coords()[0]
        rad = float(tf.p("radius"))
        w = cutoff(grid.radius() / rad)
        return (x0 ** int(tf.p("degree"))) * w
    raise ParameterError(kind)  # pragma: no cover


def wrap_fraction(values: np.ndarray, grid: Grid) -> float:
    """Relative L2 mass in the outer shell ``|x|_inf >= (15/16) 2**K`` (wrap-around proxy)."""
    total = np.linalg.norm(values)
    if total == 0:
        return 0.0
    edge = grid.N // 32  # 1/16 of the half-width on each side
    shell = np.zeros(grid.shape, dtype=bool)
    for ax in range(grid.dim):
        idx = [slice(None)] * grid.dim
        idx[ax] = np.r_[0:edge, grid.N - edge:grid.N]
        shell[tuple(idx)] = True
    return float(np.linalg.norm(values[shell]) / total)


def render(tf: TestFunction, grid: Grid) -> SampledFunction:
    """Sample a test function on a grid (band-limited kinds are synthesized spectrally).

    Raises :class:`TruncationError` when more than ``1e-12`` of the L2 mass
    sits in the outer shell of the torus, where periodic wrap-around would
    contaminate it. Harmonics are exactly periodic and exempt.
    """
    vals = _raw(tf, grid)
    if tf.kind != "harmonic":
        frac = wrap_fraction(vals, grid)
        if frac > WRAP_TOL:
            raise TruncationError(f"{tf.name}: wrap-around mass {frac:.3e} exceeds {WRAP_TOL:g} on {grid}")
    return SampledFunction(grid, vals)


def sphere_measure(n: int) -> float:
    """Surface measure of the unit sphere in dimension n."""
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def oracle_herz_norm(tf: TestFunction, hp: HerzParams, n: int) -> float:
    """Closed-form Herz norm of ``power_cutoff(a, k1, k2)`` in dimension n (q finite)."""
    if tf.kind != "power_cutoff":
        raise ParameterError("closed form only for power_cutoff")
    if hp.q == math.inf:
        raise ParameterError("closed form needs finite q")
    a, k1, k2 = float(tf.p("a")), int(tf.p("k1")), int(tf.p("k2"))
    e = a * hp.q + n
    omega = sphere_measure(n)
    terms = []
    for k in range(k1, k2 + 1):
        if e == 0:
            I = omega * math.log(2)
        else:
            I = omega * (2.0 ** (k * e) - 2.0 ** ((k - 1) * e)) / e
        terms.append(2.0 ** (k * hp.alpha) * I ** (1.0 / hp.q))
    if hp.p == math.inf:
        return max(terms)
    return sum(t ** hp.p for t in terms) ** (1.0 / hp.p)


def default_corpus(dim: int) -> list:
    """Twenty smooth or piecewise-smooth functions used across the acceptance checks.

    Two-dimensional grids are smaller (half-width 8), so the widest gaussians
    are replaced by narrower ones to stay inside the wrap bound.
    """
    if dim == 1:
        widths, shifted = (0.25, 0.5, 1.0, 2.0, 4.0), ((1.0, 0.5), (2.0, -1.0), (0.5, 1.5))
    else:
        widths, shifted = (1.0, 1.5, 2.0, 4.0, 8.0), ((1.0, 0.5), (2.0, -1.0), (1.5, 1.5))
    out = [TestFunction.make("gaussian", a=a) for a in widths]
    out += [TestFunction.make("gaussian", a=a, c0=c) for a, c in shifted]
    out += [TestFunction.make("bump", radius=r) for r in (0.75, 1.0, 2.0, 3.0)]
    out += [TestFunction.make("bump", radius=r, c0=c) for r, c in ((1.0, 0.5), (2.0, -1.0))]
    out += [TestFunction.make("polynomial_window", degree=d, radius=r) for d, r in ((1, 1.0), (2, 1.5), (3, 2.0))]
    out += [TestFunction.make("power_cutoff", a=a, k1=-2, k2=1) for a in (-0.5, 0.5, 1.0)]
    return out


def gaussian_corpus(dim: int = 1) -> list:
    """Ten gaussians and bumps (the smooth part of the default corpus)."""
    return [tf for tf in default_corpus(dim) if tf.kind in ("gaussian", "bump")][:10]


def scale_corpus() -> list:
    """Gaussians ``a = 4**k`` and bumps ``radius = 2**k`` spanning six octaves (one-dimensional).

    Used where a measured constant must stay stable under dilation: a dyadic
    dilation shifts this family along itself, so the worst case stays inside.
    Renders on ``Grid(1, 5, 8192)``.
    """
    return [TestFunction.make("gaussian", a=4.0 ** k) for k in range(-2, 4)] + \
        [TestFunction.make("bump", radius=2.0 ** k) for k in range(-2, 4)]


SCALE_GRID = Grid(1, 5, 8192)


def load_descriptor(text: str) -> SampledFunction:
    """Render a JSON descriptor ``{"corpus": kind, "params": {...}, "grid": {dim, K, N}}``."""
    try:
        d = json.loads(text)
        tf = TestFunction.from_dict({"kind": d["corpus"], "params": d.get("params", {})})
        grid = Grid.from_dict(d["grid"])
    except (KeyError, ValueError, TypeError) as exc:
        raise FormatError(f"bad descriptor: {exc}") from None
    return render(tf, grid)
