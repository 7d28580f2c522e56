import dataclasses
import math

import numpy as np
import pytest

from fsx import harness as hn
from fsx.corpus import TestFunction, default_corpus, gaussian_corpus
from fsx.errors import GatedError, ParameterError, TruncationError
from fsx.harness import Experiment, InequalityReport, emit_report, parse_report, preset, run_inequality
from fsx.lattice import Grid, SampledFunction


def _with(exp: Experiment, **changes) -> Experiment:
    return dataclasses.replace(exp, **changes)


def test_identical_bundles_give_unit_ratio():
    exp = preset("interp")
    P = dict(exp.params, a1="0", p1="2", q1="2", b1="2", s1="0")
    rep = run_inequality(_with(exp, params=P, functions=tuple(default_corpus(1)[:6]), dilations=(0, 1)))
    assert rep.passed
    for r in rep.ratios():
        assert r == pytest.approx(1.0, abs=1e-12)


def test_exact_holder_on_gaussians():
    rep = run_inequality(preset("ckn_T21ii_exact"))
    assert rep.passed
    assert max(rep.ratios()) <= 1 + 1e-9
    assert rep.unsupported == list(hn.UNSUPPORTED_BRANCHES)


def test_exact_holder_needs_r_at_least_v():
    exp = preset("ckn_T21ii_exact")
    with pytest.raises(GatedError):
        run_inequality(_with(exp, params=dict(exp.params, r="3/2")))


def test_qj_flat_when_exponent_vanishes():
    exp = preset("qj_smoothing")
    P = dict(exp.params, sigma="0", u="2", v="2")
    rep = run_inequality(_with(exp, params=P))
    rs = rep.ratios("")
    assert max(rs) / min(rs) - 1 <= 0.10


def test_qj_slope_three_halves():
    rep = run_inequality(preset("qj_smoothing"))
    assert rep.aggregates["expected_slope"] == 1.5
    slope = [v for k, v in rep.aggregates.items() if k.startswith("slope")][0]
    assert abs(slope - 1.5) <= 0.05


def test_qj_reversed_weights_are_gated():
    exp = preset("qj_smoothing")
    with pytest.raises(GatedError) as info:
        run_inequality(_with(exp, params=dict(exp.params, alpha1="1/2", alpha2="0")))
    assert info.value.certificate.verdict == "inadmissible"


def test_hardy_sobolev_example_below_weight_threshold_is_gated():
    # alpha = -3/4 lies below -n/s = -1/4, outside the weighted range the inequality needs
    exp = _with(preset("hardy_sobolev"), params={"n": "1", "q": "2", "s": "4", "alpha": "-3/4"},
                grid=Grid.default(1), functions=tuple(gaussian_corpus(1)))
    with pytest.raises(GatedError):
        hn.run_hardy_sobolev(exp)


def test_hardy_sobolev_preset_is_dilation_stable():
    rep = hn.run_hardy_sobolev(preset("hardy_sobolev"))
    assert rep.passed and rep.aggregates["max_spread"] <= 0.10
    assert all(math.isfinite(r) and r >= 0 for r in rep.ratios())


def test_zero_function_is_degenerate_not_nan():
    for iid in ("hardy_sobolev", "coincidence_herz"):
        exp = preset(iid)
        g = exp.grid
        zero = ("zero", SampledFunction(g, np.zeros(g.shape)))
        rep = run_inequality(_with(exp, functions=(), samples=(zero,), dilations=(0,)))
        assert rep.rows and all(r.status == "degenerate" and r.ratio is None for r in rep.rows)
        assert rep.degenerate == len(rep.rows)
        assert rep.passed


def test_near_constant_input_raises_truncation_error():
    exp = _with(preset("hardy_sobolev"), functions=(TestFunction.make("gaussian", a=1e-9),))
    with pytest.raises(TruncationError):
        run_inequality(exp)


def test_unknown_inequality():
    with pytest.raises(ParameterError):
        preset("ckn_T9")
    with pytest.raises(ParameterError):
        run_inequality(Experiment("ckn_T9", {}))


def _small_report():
    exp = _with(preset("ckn_T2i"), functions=tuple(default_corpus(1)[:3]))
    return run_inequality(exp)


def test_three_functions_five_dilations_give_fifteen_rows():
    rep = _small_report()
    csv_text = emit_report(rep, "csv").decode().splitlines()
    assert len(csv_text) == 1 + 15
    assert csv_text[0] == ",".join(hn.ROW_FIELDS)


def test_empty_experiment_gives_header_only_csv():
    rep = run_inequality(_with(preset("ckn_T2i"), functions=()))
    assert emit_report(rep, "csv") == (",".join(hn.ROW_FIELDS) + "\n").encode()


def test_report_round_trip():
    rep = _small_report()
    again = parse_report(emit_report(rep, "json"), "json")
    assert again == rep
    assert emit_report(again, "json") == emit_report(rep, "json")
    assert parse_report(emit_report(rep, "csv"), "csv") == rep.rows
    assert rep.certificate["verdict"] == "admissible"


def test_reports_are_byte_identical_across_runs():
    a = emit_report(_small_report(), "json")
    b = emit_report(_small_report(), "json")
    assert a == b


def test_experiment_dict_round_trip():
    exp = preset("ckn_T3")
    again = Experiment.from_dict(exp.to_dict())
    assert again.to_dict() == exp.to_dict()


def test_balanced_ckn_ratio_is_dilation_invariant():
    rep = run_inequality(preset("ckn_T21i"))
    assert rep.aggregates["max_spread"] <= 0.05


def test_coincidence_herz_square_function_bounds():
    rep = run_inequality(preset("coincidence_herz"))
    assert rep.passed
    assert all(1 / 1.5 <= r <= 1.5 for r in rep.ratios())


def test_report_rejects_unknown_format():
    with pytest.raises(ParameterError):
        emit_report(InequalityReport({}, None), "xml")
