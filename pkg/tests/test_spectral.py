import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from fsx.corpus import TestFunction, default_corpus, render
from fsx.errors import RangeError, SingularMultiplierError
from fsx.lattice import Grid, SampledFunction
from fsx.spectral import (DyadicSystem, bessel_multiplier, cutoff, derivative, dft, frequency_modulus, idft,
                          lp_block, multi_indices, nyquist, partial_sum, riesz_multiplier, smooth_step)

G1 = Grid.default(1)
G2 = Grid.default(2)


def test_cutoff_profile():
    xi = np.linspace(0, 2, 2001)
    c = cutoff(xi)
    assert np.all(c[xi <= 1] == 1.0)
    assert np.all(c[xi >= 1.5] == 0.0)
    assert np.all(np.diff(c) <= 0)
    assert smooth_step(0.5) == pytest.approx(0.5, abs=1e-15)


@pytest.mark.parametrize("grid", [G1, G2])
def test_block_supports_are_annular(grid):
    sys = DyadicSystem.for_grid(grid)
    xi = frequency_modulus(grid)
    for j in sys.block_indices():
        sym = sys.symbol(j)
        lo = 0.0 if j == 0 else 2.0 ** (j - 1)
        supp = xi[sym != 0]
        if j < sys.j_max:
            assert supp.max() < 1.5 * 2.0 ** j
        assert supp.min() >= lo
    # the top block keeps everything up to the corner of the dual lattice
    assert np.all(sys.symbol(sys.j_max)[xi >= 1.5 * 2.0 ** sys.j_max] == 1)
    assert 1.5 * 2.0 ** sys.j_max <= nyquist(grid) < 1.5 * 2.0 ** (sys.j_max + 1)


def test_block_out_of_range():
    sys = DyadicSystem.for_grid(G1)
    with pytest.raises(RangeError):
        sys.symbol(sys.j_max + 1)
    with pytest.raises(RangeError):
        sys.symbol(-1)
    sys.symbol(-1, homogeneous=True)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 2 ** 32 - 1))
def test_parseval(seed):
    rng = np.random.default_rng(seed)
    v = rng.normal(size=256) + 1j * rng.normal(size=256)
    f = SampledFunction(Grid(1, 2, 256), v)
    F = dft(f)
    assert np.linalg.norm(F.values) == pytest.approx(np.linalg.norm(v), rel=1e-13)
    np.testing.assert_allclose(idft(F).values, v, atol=1e-13)


def test_dft_of_centered_delta_is_flat():
    v = np.zeros(64)
    v[32] = 1.0
    F = dft(SampledFunction(Grid(1, 3, 64), v))
    np.testing.assert_allclose(F.values, np.full(64, 1 / 8), atol=1e-16)


@pytest.mark.parametrize("m", [1, 3, 17])
def test_derivative_of_harmonic_is_exact(m):
    g = Grid(1, 3, 256)
    f = render(TestFunction.make("harmonic", m0=m), g)
    w = 2 * math.pi * m / g.period
    for k in (1, 2, 3):
        d = derivative(f, (k,))
        np.testing.assert_allclose(d.values, (1j * w) ** k * f.values, atol=1e-11 * w ** k)


def test_multipliers_on_harmonic():
    g = Grid(2, 2, 64)
    f = render(TestFunction.make("harmonic", m0=2, m1=-1), g)
    w = 2 * math.pi / g.period * math.sqrt(5)
    np.testing.assert_allclose(bessel_multiplier(f, 1.5).values, (1 + w * w) ** 0.75 * f.values, rtol=1e-12)
    np.testing.assert_allclose(riesz_multiplier(f, -0.5).values, w ** -0.5 * f.values, rtol=1e-12)
    assert bessel_multiplier(f, 0) is f


def test_negative_riesz_needs_zero_mean():
    f = render(TestFunction.make("gaussian", a=1.0), G1)
    with pytest.raises(SingularMultiplierError):
        riesz_multiplier(f, -1.0)
    # the positive order kills the mean
    assert abs(dft(riesz_multiplier(f, 1.0)).values[G1.N // 2]) < 1e-15


def test_lp_block_of_harmonic_is_symbol_value():
    g = Grid(1, 3, 256)
    f = render(TestFunction.make("harmonic", m0=5), g)
    sys = DyadicSystem.for_grid(g)
    for j in sys.block_indices():
        expected = sys.symbol(j)[g.N // 2 + 5]
        np.testing.assert_allclose(lp_block(sys, f, j).values, expected * f.values, atol=1e-13)


def test_homogeneous_low_block_sum_equals_inhomogeneous_block_zero():
    sys = DyadicSystem.for_grid(G1)
    low = sum(sys.symbol(j, True) for j in range(sys.j_min_hom, 1))
    xi = frequency_modulus(G1)
    # telescoping leaves phi_0 minus phi at the lowest scale
    expected = sys.symbol(0) - cutoff(np.ldexp(xi, -(sys.j_min_hom - 1)))
    np.testing.assert_allclose(low, expected, atol=1e-15)


def test_partial_sum_of_harmonic():
    g = Grid(1, 3, 256)
    sys = DyadicSystem.for_grid(g)
    f = render(TestFunction.make("harmonic", m0=24), g)  # |xi| = 3 pi / 2
    w = 2 * math.pi * 24 / g.period
    for J in range(sys.j_max + 1):
        factor = float(cutoff(w / 2.0 ** J))
        np.testing.assert_allclose(partial_sum(sys, f, J).values, factor * f.values, atol=1e-13)
    with pytest.raises(RangeError):
        partial_sum(sys, f, sys.j_max + 1)


def test_multi_indices_graded():
    assert multi_indices(2, 2) == [(0, 0), (0, 1), (1, 0), (0, 2), (1, 1), (2, 0)]
    assert multi_indices(1, 3) == [(0,), (1,), (2,), (3,)]
    with pytest.raises(RangeError):
        derivative(render(TestFunction.make("gaussian"), G1), (1, 0))


@pytest.mark.parametrize("dim", [1, 2])
def test_blocks_reconstruct_corpus(dim):
    grid = Grid.default(dim)
    sys = DyadicSystem.for_grid(grid)
    for tf in default_corpus(dim)[:6]:
        f = render(tf, grid)
        total = sum(v for _, v in sys.blocks(f))
        # the gaussians here are resolved, so the blocks cover all the energy
        assert np.linalg.norm(total - f.values) <= 1e-10 * np.linalg.norm(f.values)
        assert sys.truncation(f) <= 1e-10


def test_gaussian_transform_matches_closed_form():
    # exp(-|x|^2/2) is its own unitary transform
    for g in (G1, G2):
        f = render(TestFunction.make("gaussian", a=0.5), g)
        F = dft(f)
        xi = frequency_modulus(g)
        # sampled sum times h**n / (2 pi)**(n/2) approximates the transform
        approx = F.values * (g.spacing * math.sqrt(g.N / (2 * math.pi))) ** g.dim
        np.testing.assert_allclose(np.abs(approx), np.exp(-xi ** 2 / 2), atol=1e-10)


def test_partial_sum_at_top_is_identity():
    sys = DyadicSystem.for_grid(G1)
    f = render(TestFunction.make("gaussian", a=1.0), G1)
    top = partial_sum(sys, f, sys.j_max)
    assert np.abs(top.values - f.values).max() <= 1e-12 * np.abs(f.values).max()


@pytest.mark.parametrize("grid", [G1, G2])
def test_bessel_multiplier_inverts(grid):
    f = render(TestFunction.make("bump", radius=2.0), grid)
    back = bessel_multiplier(bessel_multiplier(f, 1.0), -1.0)
    np.testing.assert_allclose(back.values, f.values, atol=1e-12)


def test_riesz_semigroup():
    g = Grid(1, 3, 256)
    f = render(TestFunction.make("harmonic", m0=5), g) + render(TestFunction.make("harmonic", m0=-2), g)
    a = riesz_multiplier(riesz_multiplier(f, 0.5), 0.75)
    b = riesz_multiplier(f, 1.25)
    np.testing.assert_allclose(a.values, b.values, atol=1e-12)


def test_negative_riesz_on_constant_raises():
    g = Grid(1, 3, 64)
    with pytest.raises(SingularMultiplierError):
        riesz_multiplier(SampledFunction(g, np.ones(64)), -1.0)
