"""Acceptance criteria 1-12, one group of tests per criterion.

The terminal summary (see conftest.py) prints one PASS/FAIL line per criterion.
"""
import dataclasses
import math
import subprocess
import sys
from fractions import Fraction

import numpy as np
import pytest

from admissibility_cases import CASES
from fsx import admissibility as adm
from fsx import harness as hn
from fsx.corpus import TestFunction, default_corpus, oracle_herz_norm, render
from fsx.lattice import Grid, dilate_dyadic
from fsx.quasinorms import HerzParams, MorreyParams, herz_norm, lebesgue_norm, morrey_norm, weighted_lp_norm
from fsx.spectral import DyadicSystem, frequency_modulus, lp_block, partial_sum

G1, G2 = Grid.default(1), Grid.default(2)
GRIDS = [G1, G2]

# emitted JSON reports keyed by a label, re-checked by criterion 12
REPORTS: dict = {}


def _run(label: str, exp: hn.Experiment) -> hn.InequalityReport:
    rep = hn.run_inequality(exp)
    REPORTS[label] = (exp, hn.emit_report(rep, "json"))
    return rep


def _failures(rep: hn.InequalityReport) -> list:
    return [f"{a['name']}: {a['detail']}" for a in rep.assertions if not a["passed"]]


# ------------------------------------------------------------------ 1


@pytest.mark.criterion(1)
@pytest.mark.parametrize("grid", GRIDS, ids=["1d", "2d"])
def test_partition_of_unity(grid):
    sys_ = DyadicSystem.for_grid(grid)
    xi = frequency_modulus(grid)
    resolvable = xi <= 2.0 ** sys_.j_max
    assert np.abs(sys_.partition()[resolvable] - 1).max() <= 1e-12
    hom = sys_.partition(homogeneous=True)
    assert np.abs(hom[resolvable & (xi > 0)] - 1).max() <= 1e-12
    for j in range(1, sys_.j_max + 1):
        assert np.array_equal(sys_.symbol(j, True), sys_.symbol(j))


# ------------------------------------------------------------------ 2


@pytest.mark.criterion(2)
@pytest.mark.parametrize("grid", GRIDS, ids=["1d", "2d"])
def test_reconstruction_on_corpus(grid):
    sys_ = DyadicSystem.for_grid(grid)
    for tf in default_corpus(grid.dim):
        f = render(tf, grid)
        total = sum(vals for _, vals in sys_.blocks(f))
        err = np.linalg.norm(total - f.values) / np.linalg.norm(f.values)
        assert err <= 1e-10, tf.name


@pytest.mark.criterion(2)
@pytest.mark.parametrize("grid", GRIDS, ids=["1d", "2d"])
def test_partial_sum_telescoping(grid):
    sys_ = DyadicSystem.for_grid(grid)
    for tf in default_corpus(grid.dim)[:10]:
        f = render(tf, grid)
        scale = np.abs(f.values).max()
        assert np.abs(partial_sum(sys_, f, 0).values - lp_block(sys_, f, 0).values).max() <= 1e-12 * scale
        for J in range(1, sys_.j_max + 1):
            step = partial_sum(sys_, f, J).values - partial_sum(sys_, f, J - 1).values
            assert np.abs(step - lp_block(sys_, f, J).values).max() <= 1e-12 * scale


# ------------------------------------------------------------------ 3


@pytest.mark.criterion(3)
@pytest.mark.parametrize("grid", GRIDS, ids=["1d", "2d"])
def test_herz_equals_punctured_lebesgue(grid):
    punct = grid.annulus_index() >= grid.spacing_log2
    for tf in default_corpus(grid.dim):
        f = render(tf, grid)
        for p in (1.0, 2.0, 3.0):
            a = herz_norm(f, HerzParams(0, p, p)).value
            b = lebesgue_norm(f, p, punct).value
            assert abs(a - b) <= 1e-12 * b, (tf.name, p)


@pytest.mark.criterion(3)
@pytest.mark.parametrize("grid", GRIDS, ids=["1d", "2d"])
@pytest.mark.parametrize("alpha", [-0.5, 0.5, 1.0])
def test_weighted_lebesgue_bracket(grid, alpha):
    for tf in default_corpus(grid.dim):
        f = render(tf, grid)
        for p in (1.0, 2.0):
            r = weighted_lp_norm(f, alpha, p).value / herz_norm(f, HerzParams(alpha, p, p)).value
            assert 2.0 ** -abs(alpha) <= r <= 2.0 ** abs(alpha), (tf.name, p)


@pytest.mark.criterion(3)
@pytest.mark.parametrize("grid", GRIDS, ids=["1d", "2d"])
def test_morrey_diagonal_is_lebesgue(grid):
    for tf in default_corpus(grid.dim)[:10]:
        f = render(tf, grid)
        for p in (1.5, 2.0, 4.0):
            a = morrey_norm(f, MorreyParams(p, p)).value
            b = lebesgue_norm(f, p).value
            assert abs(a - b) <= 1e-12 * b, (tf.name, p)


# ------------------------------------------------------------------ 4


@pytest.mark.criterion(4)
@pytest.mark.parametrize("grid", GRIDS, ids=["1d", "2d"])
@pytest.mark.parametrize("alpha", [-0.25, 0.0, 0.75])
def test_dilation_covariance(grid, alpha):
    n = grid.dim
    for tf in default_corpus(n)[:10]:
        f = render(tf, grid)
        for p, q in ((2.0, 2.0), (1.0, 3.0), (3.0, 1.5)):
            hp = HerzParams(alpha, p, q)
            base = herz_norm(f, hp).value
            for m in range(-2, 3):
                got = herz_norm(dilate_dyadic(f, m), hp).value
                assert got == pytest.approx(2.0 ** (-m * (alpha + n / q)) * base, rel=1e-10), (tf.name, p, q, m)


@pytest.mark.criterion(4)
def test_exponent_with_outer_index_is_wrong():
    # with p != q the alternative exponent alpha + n/p misses by 2**(m n (1/q - 1/p))
    f = render(TestFunction.make("gaussian", a=1.0), G1)
    hp = HerzParams(0.0, 1.0, 3.0)
    base = herz_norm(f, hp).value
    for m in (-2, -1, 1, 2):
        got = herz_norm(dilate_dyadic(f, m), hp).value
        wrong = 2.0 ** (-m * (hp.alpha + 1 / hp.p)) * base
        assert got / wrong == pytest.approx(2.0 ** (m * (1 / hp.p - 1 / hp.q)), rel=1e-10)
        assert abs(got / wrong - 1) > 0.3


# ------------------------------------------------------------------ 5


ORACLE_PARAMS = [HerzParams(0, 2, 2), HerzParams(-0.25, 2, 1), HerzParams(0.5, 1, 2)]
REFINED = {1: Grid(1, 4, 8192), 2: Grid(2, 3, 512)}


def _oracle_errors(dim: int, a: float, hp: HerzParams) -> tuple:
    tf = TestFunction.make("power_cutoff", a=a, k1=-2, k2=1)
    exact = oracle_herz_norm(tf, hp, dim)
    errs = []
    for grid in (Grid.default(dim), REFINED[dim]):
        errs.append(abs(herz_norm(render(tf, grid), hp).value - exact) / exact)
    return errs[0], errs[1]


@pytest.mark.criterion(5)
@pytest.mark.parametrize("dim", [1, 2])
@pytest.mark.parametrize("a", [-0.5, 0.5, 1.0])
def test_power_cutoff_oracle(dim, a):
    problems = []
    for hp in ORACLE_PARAMS:
        e0, e1 = _oracle_errors(dim, a, hp)
        order = math.log2(e0 / e1) if e1 > 0 else math.inf
        if e0 > 5e-3:
            problems.append(f"{hp}: error {e0:.3e} > 0.5%")
        if order < 1:
            problems.append(f"{hp}: observed order {order:.4f} < 1 ({e0:.3e} -> {e1:.3e})")
    assert not problems, "; ".join(problems)


# ------------------------------------------------------------------ 6


BUNDLE_PAIRS = [
    ("besov", dict(a0="0", p0="2", q0="2", b0="2", s0="0", a1="1/2", p1="1", q1="4", b1="1", s1="1")),
    ("besov", dict(a0="-1/4", p0="inf", q0="1", b0="inf", s0="1/2", a1="3/4", p1="2", q1="3", b1="2", s1="0")),
    ("tl", dict(a0="0", p0="2", q0="2", b0="2", s0="0", a1="1/2", p1="1", q1="3", b1="1", s1="1")),
    ("tl", dict(a0="1/4", p0="4", q0="1", b0="inf", s0="1", a1="-1/4", p1="2", q1="2", b1="2", s1="0")),
    ("herz", dict(a0="0", p0="1", q0="2", b0="2", s0="0", a1="1", p1="inf", q1="4", b1="2", s1="0")),
]


@pytest.mark.criterion(6)
@pytest.mark.parametrize("k", range(len(BUNDLE_PAIRS)))
def test_interpolation_is_exact_holder(k):
    kind, bundles = BUNDLE_PAIRS[k]
    exp = hn.preset("interp")
    exp = dataclasses.replace(exp, params=dict(n="1", theta="1/3", kind=kind, **bundles))
    assert len(exp.functions) == 20
    rep = _run(f"interp-{k}", exp)
    assert rep.passed, _failures(rep)
    assert max(rep.ratios()) <= 1 + 1e-9


# ------------------------------------------------------------------ 7


PPN_TUPLES = [
    ("ppn1", dict(alpha1="0", s="2", q="1", alpha2="0")),
    ("ppn1", dict(alpha1="0", s="4", q="2", alpha2="1/4")),
    ("ppn1", dict(alpha1="-1/4", s="2", q="1", alpha2="1/4")),
    ("ppn1", dict(alpha1="1/2", s="3", q="3/2", alpha2="1/2")),
    ("ppn2", dict(alpha1="0", s="1", q="2", alpha2="1/2")),
    ("ppn2", dict(alpha1="0", s="2", q="4", alpha2="1/4")),
    ("ppn2", dict(alpha1="1/4", s="1", q="2", alpha2="3/4")),
    ("ppn2", dict(alpha1="-1/4", s="3/2", q="3", alpha2="1/2")),
]


@pytest.mark.criterion(7)
@pytest.mark.parametrize("k", range(len(PPN_TUPLES)))
def test_band_limited_slopes(k):
    iid, P = PPN_TUPLES[k]
    exp = hn.preset(iid)
    exp = dataclasses.replace(exp, params=dict(exp.params, **P))
    rep = _run(f"{iid}-{k}", exp)
    assert rep.passed, _failures(rep)
    assert abs(rep.aggregates["slope"] - rep.aggregates["expected_slope"]) <= 0.05
    assert rep.aggregates["residual"] <= 0.02


# ------------------------------------------------------------------ 8


QJ_TUPLES = [
    ("qj_smoothing", {}),
    ("qj_smoothing", dict(sigma="0")),
    ("qj_smoothing", dict(sigma="1/2", v="3/2", u="2", alpha2="1/4")),
    ("morrey_qj", {}),
    ("morrey_qj", dict(sigma="0")),
    ("morrey_qj", dict(u="2", p="3", v="2", q="3", sigma="1/2")),
]


@pytest.mark.criterion(8)
@pytest.mark.parametrize("k", range(len(QJ_TUPLES)))
def test_low_pass_slopes(k):
    iid, P = QJ_TUPLES[k]
    exp = hn.preset(iid)
    exp = dataclasses.replace(exp, params=dict(exp.params, **P))
    rep = _run(f"{iid}-{k}", exp)
    assert rep.passed, _failures(rep)
    slopes = [v for key, v in rep.aggregates.items() if key.startswith("slope")]
    assert slopes and all(abs(s - rep.aggregates["expected_slope"]) <= 0.05 for s in slopes)


# ------------------------------------------------------------------ 9


@pytest.mark.criterion(9)
@pytest.mark.parametrize("iid", ["ckn_T2i", "ckn_T21i", "ckn_T21ii", "ckn_T3", "ckn_T4", "morrey_ckn",
                                 "ckn_classical"])
def test_ckn_scale_invariance(iid):
    exp = hn.preset(iid)
    assert exp.dilations == (-2, -1, 0, 1, 2)
    rep = _run(iid, exp)
    assert rep.passed, _failures(rep)
    assert rep.aggregates["max_spread"] <= 0.05


@pytest.mark.criterion(9)
def test_ckn_holder_exact_variant():
    rep = _run("ckn_T21ii_exact", hn.preset("ckn_T21ii_exact"))
    assert rep.passed, _failures(rep)
    assert max(rep.ratios()) <= 1 + 1e-9


# ------------------------------------------------------------------ 10


@pytest.mark.criterion(10)
@pytest.mark.parametrize("iid", ["norm_equiv_fourier_vs_diff", "norm_equiv_tl_vs_diff", "norm_equiv_supdiff",
                                 "coincidence_bessel", "coincidence_herz", "split_riesz", "split_besov",
                                 "split_morrey_besov", "split_morrey_tl"])
def test_norm_equivalence(iid):
    rep = _run(iid, hn.preset(iid))
    assert rep.passed, _failures(rep)
    ratios = rep.ratios()
    assert ratios and 0.1 <= min(ratios) and max(ratios) <= 10
    assert rep.aggregates["max_spread"] <= 0.10


# ------------------------------------------------------------------ 11


def _frac(v):
    return adm.fmt(adm.rational(v))


@pytest.mark.criterion(11)
def test_admissibility_cases():
    assert len(CASES) >= 40
    per_theorem: dict = {}
    problems = []
    for tid, P, verdict, residuals, derived in CASES:
        per_theorem.setdefault(tid, set()).add(verdict)
        cert = adm.check(tid, P)
        if cert.verdict != verdict:
            problems.append(f"{tid} {P}: {cert.verdict} != {verdict}")
        for cid, value in residuals.items():
            got = cert.condition(cid).residual
            if not isinstance(got, Fraction) or got != adm.rational(value):
                problems.append(f"{tid} {cid}: residual {adm.fmt(got)} != {value}")
        for key, value in derived.items():
            got = cert.derived.get(key)
            want = value if key == "theta_index" else _frac(value)
            if (got if isinstance(got, str) else adm.fmt(got)) != want:
                problems.append(f"{tid} derived {key}: {got} != {value}")
    assert not problems, problems
    assert set(per_theorem) == set(adm.THEOREM_IDS)
    for tid, verdicts in per_theorem.items():
        assert sum(t == tid for t, *_ in CASES) >= 3, tid
        if not adm.theorem(tid).sharp:
            assert "boundary" in verdicts, tid


@pytest.mark.criterion(11)
def test_theta_and_lambda_back_substitution():
    balance = {"T2i": "T2i.20", "T2ii": "T2ii.20", "T2iii": "T2iii.20", "T21i": "T21i.13", "T21ii": "T21ii.13",
               "T21iii": "T21iii.13", "T3i": "T3i.20", "T3ii": "T3ii.20", "T3iii": "T3iii.20",
               "T41i": "T41i.20", "T41ii": "T41ii.20", "T41iii": "T41iii.20", "T4": "T4.17", "T5": "T5.17",
               "T12": "T12.17", "CKN": "CKN.11"}
    checked = 0
    for tid, P, *_ in CASES:
        cert = adm.check(tid, P)
        if tid in balance and cert.derived.get("theta") is not None:
            assert cert.condition(balance[tid]).residual == 0, (tid, P)
            checked += 1
        if tid in ("T2iii", "T21iii") and cert.derived.get("r_solved") is not None:
            again = adm.check(tid, dict(P, r=adm.fmt(cert.derived["r_solved"])))
            eq = "T2iii.29" if tid == "T2iii" else "T21iii.25"
            assert again.condition(eq).residual == 0
            checked += 1
    assert checked >= 40


# ------------------------------------------------------------------ 12


@pytest.mark.criterion(12)
def test_reports_are_byte_identical_on_rerun():
    if not REPORTS:
        for iid in ("ckn_T2i", "ppn1", "coincidence_herz"):
            _run(iid, hn.preset(iid))
    for label, (exp, data) in sorted(REPORTS.items()):
        assert hn.emit_report(hn.run_inequality(exp), "json") == data, label


@pytest.mark.criterion(12)
def test_reports_match_across_processes(tmp_path):
    exp = hn.preset("ckn_T21i")
    local = hn.emit_report(hn.run_inequality(exp), "json")
    out = tmp_path / "r.json"
    res = subprocess.run([sys.executable, "-m", "fsx.cli", "check", "--experiment", "ckn_T21i", "--out", str(out)],
                         capture_output=True, text=True)
    assert res.returncode == 0, res.stderr
    assert out.read_bytes() == local
