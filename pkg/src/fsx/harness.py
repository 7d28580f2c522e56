"""Inequality experiments: both sides of an estimate over a corpus, with dilation and power-law checks.

An experiment names an inequality, a parameter tuple (exact strings), a set
of corpus functions, a list of dyadic dilations and tolerances. Before any
numerics run the parameter tuple is checked against the inequality's
hypothesis table; anything but an ``admissible`` verdict raises
:class:`GatedError` carrying the certificate.

Four assertion modes cover the inequalities:

``holder``
    the estimate is an exact discrete Hoelder inequality: every ratio must be
    at most ``1 + holder``.
``scale``
    both sides are homogeneous of the same degree, so the ratio of each
    function must not move by more than ``spread`` across dilations.
``slope``
    one side carries a power of ``R`` or ``2**J``; the log-log regression
    slope must match the exponent within ``slope`` and, when a residual cap
    is set, the largest residual must stay below it.
``equiv``
    a two-sided equivalence: every ratio lies in ``[1/cap, cap]`` and the
    measured constant ``max(max ratio, 1/min ratio)`` at each dilation stays
    within ``spread`` of its undilated value.
"""
from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import admissibility as adm
from .corpus import SCALE_GRID, TestFunction, default_corpus, gaussian_corpus, render, scale_corpus
from .differences import DifferenceConfig, besov_diff_norm, besov_supdiff_norm, tl_diff_norm
from .errors import FormatError, GatedError, ParameterError
from .lattice import Grid, SampledFunction, dilate_dyadic
from .quasinorms import (Bundle, HerzParams, MorreyParams, RegimeWarning, SmoothnessParams,
                         bessel_potential_norm, besov_morrey_norm, herz_besov_norm, herz_norm, herz_tl_norm,
                         interpolation_check, lebesgue_norm, morrey_norm, riesz_potential_norm, tl_morrey_norm,
                         weighted_lp_norm)
from .spectral import DyadicSystem, bessel_multiplier, derivative, partial_sum, riesz_multiplier

DEGENERATE_TOL = 1e-13

DEFAULT_TOLERANCES = {
    "holder": 1e-9,
    "slope": 0.05,
    "residual": 0.02,
    "spread": 0.05,
    "cap": 10.0,
}


def _num(x) -> float:
    return float(adm.rational(x))


# ------------------------------------------------------------- experiment


@dataclass
class Experiment:
    """Configuration of one run.

    ``params`` holds exact values as strings (``"3/4"``, ``"inf"``) plus,
    for some inequalities, a string selector such as ``space`` or
    ``variant``. ``sweep`` lists ``log2 R`` values for band-limit sweeps or
    ``J`` values for low-pass sweeps. ``samples`` are extra pre-rendered
    functions; they are not serialized.
    """

    inequality_id: str
    params: dict
    functions: tuple = ()
    dilations: tuple = (-2, -1, 0, 1, 2)
    grid: Grid | None = None
    sweep: tuple = ()
    tolerances: dict = field(default_factory=dict)
    samples: tuple = ()

    def tol(self, key: str):
        if key in self.tolerances:
            return self.tolerances[key]
        return _DEFS[self.inequality_id].tolerances.get(key, DEFAULT_TOLERANCES[key])

    def to_dict(self) -> dict:
        return {
            "inequality_id": self.inequality_id,
            "params": {k: (v if isinstance(v, str) else adm.fmt(adm.rational(v))) for k, v in sorted(self.params.items())},
            "functions": [tf.to_dict() for tf in self.functions],
            "dilations": list(self.dilations),
            "grid": None if self.grid is None else self.grid.to_dict(),
            "sweep": list(self.sweep),
            "tolerances": {k: (None if v is None else repr(float(v))) for k, v in sorted(self.tolerances.items())},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Experiment":
        try:
            iid = d["inequality_id"]
            if iid not in _DEFS:
                raise ParameterError(f"unknown inequality {iid!r}; known: {', '.join(INEQUALITY_IDS)}")
            base = preset(iid)
            funcs = tuple(TestFunction.from_dict(f) for f in d["functions"]) if "functions" in d else base.functions
            grid = Grid.from_dict(d["grid"]) if d.get("grid") else base.grid
            tols = {k: (None if v is None else float(v)) for k, v in d.get("tolerances", {}).items()}
            return cls(iid, dict(d.get("params", base.params)), funcs,
                       tuple(int(m) for m in d.get("dilations", base.dilations)), grid,
                       tuple(int(j) for j in d.get("sweep", base.sweep)), tols)
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad experiment config: {exc}") from None


# ----------------------------------------------------------------- report


@dataclass(frozen=True)
class Row:
    function: str
    dilation: int
    index: int | None
    side: str
    lhs: float | None
    rhs: float | None
    ratio: float | None
    status: str


ROW_FIELDS = ("function", "side", "dilation", "index", "lhs", "rhs", "ratio", "status")


@dataclass
class InequalityReport:
    experiment: dict
    certificate: dict | None
    rows: list = field(default_factory=list)
    aggregates: dict = field(default_factory=dict)
    assertions: list = field(default_factory=list)
    degenerate: int = 0
    unsupported: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(a["passed"] for a in self.assertions)

    def assert_(self, name: str, passed: bool, detail: str) -> None:
        self.assertions.append({"name": name, "passed": bool(passed), "detail": detail})

    def ratios(self, side: str | None = None) -> list:
        return [r.ratio for r in self.rows if r.ratio is not None and (side is None or r.side == side)]

    def to_dict(self) -> dict:
        return {
            "experiment": self.experiment,
            "certificate": self.certificate,
            "rows": [_row_dict(r) for r in self.rows],
            "aggregates": self.aggregates,
            "assertions": self.assertions,
            "degenerate": self.degenerate,
            "unsupported": self.unsupported,
            "passed": self.passed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "InequalityReport":
        rows = [Row(r["function"], int(r["dilation"]), r["index"], r["side"], r["lhs"], r["rhs"], r["ratio"],
                    r["status"]) for r in d["rows"]]
        return cls(d["experiment"], d["certificate"], rows, d["aggregates"], d["assertions"], d["degenerate"],
                   d["unsupported"])


def _row_dict(r: Row) -> dict:
    return {k: getattr(r, k) for k in ROW_FIELDS}


def _cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def emit_report(report: InequalityReport, fmt: str = "json") -> bytes:
    """Serialize a report; JSON embeds the certificate, CSV has one row per (function, dilation, J/R)."""
    if fmt == "json":
        return (json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n").encode()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(ROW_FIELDS)
        for r in report.rows:
            w.writerow([_cell(getattr(r, k)) for k in ROW_FIELDS])
        return buf.getvalue().encode()
    raise ParameterError(f"unknown report format {fmt!r}")


def parse_report(data: bytes, fmt: str = "json"):
    """Inverse of :func:`emit_report`; CSV yields the list of rows only."""
    text = data.decode()
    if fmt == "json":
        return InequalityReport.from_dict(json.loads(text))
    if fmt == "csv":
        rows = []
        for rec in csv.DictReader(io.StringIO(text)):
            opt = lambda s, conv: None if s == "" else conv(s)
            rows.append(Row(rec["function"], int(rec["dilation"]), opt(rec["index"], int), rec["side"],
                            opt(rec["lhs"], float), opt(rec["rhs"], float), opt(rec["ratio"], float),
                            rec["status"]))
        return rows
    raise ParameterError(f"unknown report format {fmt!r}")


# ------------------------------------------------------------ definitions


@dataclass(frozen=True)
class _Def:
    mode: str
    theorem: str | None
    sides: Callable
    cert_params: Callable = lambda P: P
    exponent: Callable | None = None
    tolerances: dict = field(default_factory=dict)
    sweep_kind: str = ""  # "R" or "J" for slope experiments


def _f(P, *names):
    return [_num(P[k]) for k in names]


def _herz(alpha, outer, inner) -> HerzParams:
    return HerzParams(float(alpha), float(outer), float(inner))


def _smooth_space(g, hp, s, beta, space, homogeneous=True):
    sys = DyadicSystem.for_grid(g.grid)
    sp = SmoothnessParams(float(s), float(beta))
    if space == "F":
        return herz_tl_norm(g, hp, sp, sys, homogeneous).value
    return herz_besov_norm(g, hp, sp, sys, homogeneous).value


def _grad_sum(g, hp) -> float:
    return sum(herz_norm(derivative(g, tuple(int(i == k) for i in range(g.grid.dim))), hp).value
               for k in range(g.grid.dim))


def _grad_modulus(g) -> SampledFunction:
    parts = [derivative(g, tuple(int(i == k) for i in range(g.grid.dim))).values for k in range(g.grid.dim)]
    return g.with_values(np.sqrt(sum(np.abs(p) ** 2 for p in parts)))


def _ckn_rhs(g, P, D, second):
    a2, u = _f(P, "alpha2", "u")
    th = float(D["theta"])
    first = herz_norm(g, _herz(a2, float(D["delta_rhs"]), u)).value
    return first ** (1 - th) * second ** th


def _sides_t2(g, P, D):
    a1, r, v, sigma, a3, p, s, beta = _f(P, "alpha1", "r", "v", "sigma", "alpha3", "p", "s", "beta")
    lhs = herz_norm(riesz_multiplier(g, sigma), _herz(a1, r, v)).value
    second = _smooth_space(g, _herz(a3, float(D["delta1_rhs"]), p), s, beta, P.get("space", "B"))
    return [("", lhs, _ckn_rhs(g, P, D, second))]


def _sides_t21i(g, P, D):
    a1, r, v, a3, p, s, beta = _f(P, "alpha1", "r", "v", "alpha3", "p", "s", "beta")
    lhs = herz_norm(g, _herz(a1, r, v)).value
    second = _smooth_space(g, _herz(a3, float(D["delta1_rhs"]), p), s, beta, P.get("space", "B"))
    return [("", lhs, _ckn_rhs(g, P, D, second))]


def _sides_t21ii(g, P, D):
    a1, r, v, a3, p, s = _f(P, "alpha1", "r", "v", "alpha3", "p", "s")
    lhs = herz_norm(g, _herz(a1, r, v)).value
    second = _smooth_space(g, _herz(a3, float(D["w"]), p), s, float(D["rho_solved"]), P.get("space", "B"))
    return [("", lhs, _ckn_rhs(g, P, D, second))]


def _sides_t21ii_exact(g, P, D):
    a1, r, v, a3 = _f(P, "alpha1", "r", "v", "alpha3")
    w = float(D["w"])
    lhs = herz_norm(g, _herz(a1, r, v)).value
    return [("", lhs, _ckn_rhs(g, P, D, herz_norm(g, _herz(a3, w, w)).value))]


def _sides_t3(g, P, D):
    a1, r, v, sigma, a3, p, s, beta = _f(P, "alpha1", "r", "v", "sigma", "alpha3", "p", "s", "beta")
    lhs = herz_norm(riesz_multiplier(g, sigma), _herz(a1, r, v)).value
    second = _smooth_space(g, _herz(a3, float(D["delta1_rhs"]), p), s, beta, "F")
    return [("", lhs, _ckn_rhs(g, P, D, second))]


def _sides_t12(g, P, D):
    u, p, mu, delta, v, q, s, sigma, beta = _f(P, "u", "p", "mu", "delta", "v", "q", "s", "sigma", "beta")
    th = float(D["theta"])
    sys = DyadicSystem.for_grid(g.grid)
    lhs = tl_morrey_norm(g, MorreyParams(u, p), SmoothnessParams(sigma, 2.0), sys, True).value
    rhs = morrey_norm(g, MorreyParams(mu, delta)).value ** (1 - th) * \
        besov_morrey_norm(g, MorreyParams(v, q), SmoothnessParams(s, beta), sys, True).value ** th
    return [("", lhs, rhs)]


def _sides_classical(g, P, D):
    alpha, beta, gamma, p, q, tau = _f(P, "alpha", "beta", "gamma", "p", "q", "tau")
    th = float(D["theta"])
    lhs = weighted_lp_norm(g, gamma, tau).value
    rhs = weighted_lp_norm(g, beta, q).value ** th * weighted_lp_norm(_grad_modulus(g), alpha, p).value ** (1 - th)
    return [("", lhs, rhs)]


def _sides_hs(g, P, D):
    q, s, alpha = _f(P, "q", "s", "alpha")
    lhs = weighted_lp_norm(g, alpha, s).value
    herz_side = _grad_sum(g, _herz(0.0, s, q))
    leb_side = sum(lebesgue_norm(derivative(g, tuple(int(i == k) for i in range(g.grid.dim))), q).value
                   for k in range(g.grid.dim))
    return [("herz", lhs, herz_side), ("lebesgue", lhs, leb_side)]


def _bundles(P):
    b0 = Bundle(*_f(P, "a0", "p0", "q0", "b0", "s0"))
    b1 = Bundle(*_f(P, "a1", "p1", "q1", "b1", "s1"))
    return b0, b1


def _sides_interp(g, P, D):
    b0, b1 = _bundles(P)
    lhs, rhs = interpolation_check(g, b0, b1, _num(P["theta"]), P.get("kind", "besov"),
                                   DyadicSystem.for_grid(g.grid))
    return [("", lhs, rhs)]


def _sides_ppn(g, P, D):
    a1, s, r, a2, q = _f(P, "alpha1", "s", "r", "alpha2", "q")
    return [("", herz_norm(g, _herz(a1, r, s)).value, herz_norm(g, _herz(a2, float(D["delta"]), q)).value)]


def _sides_morrey_pn(g, P, D):
    u, p, s, q = _f(P, "u", "p", "s", "q")
    lhs = morrey_norm(g, MorreyParams(u, p)).value
    if P.get("variant", "ii") == "ii":
        return [("", lhs, morrey_norm(g, MorreyParams(s, q)).value)]
    v = _num(P["v"])
    e = v / u
    rhs = morrey_norm(g, MorreyParams(s, q)).value ** (1 - e) * morrey_norm(g, MorreyParams(v, e * p)).value ** e
    return [("", lhs, rhs)]


def _sides_qj(g, P, D, J):
    a1, v, r, sigma, a2, u = _f(P, "alpha1", "v", "r", "sigma", "alpha2", "u")
    low = partial_sum(DyadicSystem.for_grid(g.grid), g, J)
    lhs = herz_norm(bessel_multiplier(low, sigma), _herz(a1, r, v)).value
    return [("", lhs, herz_norm(g, _herz(a2, float(D["delta"]), u)).value)]


def _sides_morrey_qj(g, P, D, J):
    u, p, v, q, sigma = _f(P, "u", "p", "v", "q", "sigma")
    sys = DyadicSystem.for_grid(g.grid)
    lhs = tl_morrey_norm(partial_sum(sys, g, J), MorreyParams(u, p), SmoothnessParams(sigma, 2.0), sys).value
    return [("", lhs, morrey_norm(g, MorreyParams(v, q)).value)]


def _hp_sp(P):
    alpha, p, q, s, beta = _f(P, "alpha", "p", "q", "s", "beta")
    return _herz(alpha, p, q), SmoothnessParams(s, beta)


def _diff_cfg(P):
    return DifferenceConfig(M=int(_num(P["M"])))


def _equiv(fn):
    def sides(g, P, D):
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", RegimeWarning)
            return [("", *fn(g, P))]
    return sides


def _eq_besov(g, P):
    hp, sp = _hp_sp(P)
    return herz_besov_norm(g, hp, sp, DyadicSystem.for_grid(g.grid)).value, besov_diff_norm(g, hp, sp, _diff_cfg(P)).value


def _eq_tl(g, P):
    hp, sp = _hp_sp(P)
    return herz_tl_norm(g, hp, sp, DyadicSystem.for_grid(g.grid)).value, tl_diff_norm(g, hp, sp, _diff_cfg(P)).value


def _eq_sup(g, P):
    hp, sp = _hp_sp(P)
    M = int(_num(P["M"]))
    return herz_besov_norm(g, hp, sp, DyadicSystem.for_grid(g.grid)).value, besov_supdiff_norm(g, hp, sp, M).value


def _eq_bessel(g, P):
    hp, sp = _hp_sp(P)
    return herz_tl_norm(g, hp, SmoothnessParams(sp.s, 2.0), DyadicSystem.for_grid(g.grid)).value, \
        bessel_potential_norm(g, hp, sp.s).value


def _eq_herz(g, P):
    hp, _ = _hp_sp(P)
    return herz_tl_norm(g, hp, SmoothnessParams(0.0, 2.0), DyadicSystem.for_grid(g.grid)).value, herz_norm(g, hp).value


def _eq_riesz(g, P):
    hp, sp = _hp_sp(P)
    return bessel_potential_norm(g, hp, sp.s).value, herz_norm(g, hp).value + riesz_potential_norm(g, hp, sp.s).value


def _eq_besov_split(g, P):
    hp, sp = _hp_sp(P)
    sys = DyadicSystem.for_grid(g.grid)
    return herz_besov_norm(g, hp, sp, sys).value, herz_norm(g, hp).value + herz_besov_norm(g, hp, sp, sys, True).value


def _morrey_split(norm):
    def fn(g, P):
        u, p, s, beta = _f(P, "u", "p", "s", "beta")
        mp, sp = MorreyParams(u, p), SmoothnessParams(s, beta)
        sys = DyadicSystem.for_grid(g.grid)
        return norm(g, mp, sp, sys).value, morrey_norm(g, mp).value + norm(g, mp, sp, sys, True).value
    return fn


def _ppn_exponent(P):
    n, a1, s, a2, q = _f(P, "n", "alpha1", "s", "alpha2", "q")
    return n / q - n / s + a2 - a1


def _pn_exponent(P):
    n, u, q = _f(P, "n", "u", "q")
    if P.get("variant", "ii") == "ii":
        return n / q - n / _num(P["p"])
    return n / q - _num(P["v"]) * n / (q * u)


def _qj_exponent(P):
    n, u, v, a2, a1, sigma = _f(P, "n", "u", "v", "alpha2", "alpha1", "sigma")
    return n / u - n / v + a2 - a1 + sigma


def _mqj_exponent(P):
    n, q, p, sigma = _f(P, "n", "q", "p", "sigma")
    return n / q - n / p + sigma


_HERZ_EQ_THEOREM = lambda P: {k: P[k] for k in ("n", "alpha", "p", "q", "s") if k in P}

_DEFS = {
    "interp": _Def("holder", "INTERP", _sides_interp),
    "ppn1": _Def("slope", "L1", _sides_ppn, exponent=_ppn_exponent, sweep_kind="R"),
    "ppn2": _Def("slope", "L2", _sides_ppn, exponent=_ppn_exponent, sweep_kind="R"),
    "qj_smoothing": _Def("slope", None, _sides_qj, exponent=_qj_exponent, sweep_kind="J"),
    "morrey_qj": _Def("slope", "T11", _sides_morrey_qj, exponent=_mqj_exponent, sweep_kind="J"),
    "morrey_pn": _Def("slope", None, _sides_morrey_pn, exponent=_pn_exponent, sweep_kind="R"),
    "ckn_classical": _Def("scale", "CKN", _sides_classical),
    "ckn_T2i": _Def("scale", "T2i", _sides_t2),
    "ckn_T21i": _Def("scale", "T21i", _sides_t21i),
    "ckn_T21ii": _Def("scale", "T21ii", _sides_t21ii),
    "ckn_T21ii_exact": _Def("holder", "T21ii", _sides_t21ii_exact),
    "ckn_T3": _Def("scale", None, _sides_t3),
    "ckn_T4": _Def("scale", "T4", _sides_t2),
    "morrey_ckn": _Def("scale", "T12", _sides_t12),
    "hardy_sobolev": _Def("scale", "HS", _sides_hs, tolerances={"spread": 0.10}),
    "norm_equiv_fourier_vs_diff": _Def("equiv", "MDB", _equiv(_eq_besov), tolerances={"spread": 0.10}),
    "norm_equiv_tl_vs_diff": _Def("equiv", "MDF", _equiv(_eq_tl), tolerances={"spread": 0.10}),
    "norm_equiv_supdiff": _Def("equiv", "SD", _equiv(_eq_sup), tolerances={"spread": 0.10}),
    "coincidence_bessel": _Def("equiv", "CO1", _equiv(_eq_bessel), _HERZ_EQ_THEOREM, tolerances={"spread": 0.10}),
    "coincidence_herz": _Def("equiv", "CO3", _equiv(_eq_herz), _HERZ_EQ_THEOREM,
                             tolerances={"spread": 0.10, "cap": 1.5}),
    "split_riesz": _Def("equiv", "RS", _equiv(_eq_riesz), _HERZ_EQ_THEOREM, tolerances={"spread": 0.10}),
    "split_besov": _Def("equiv", "BS", _equiv(_eq_besov_split), tolerances={"spread": 0.10}),
    "split_morrey_besov": _Def("equiv", "MS", _equiv(_morrey_split(besov_morrey_norm)), tolerances={"spread": 0.10}),
    "split_morrey_tl": _Def("equiv", "MS", _equiv(_morrey_split(tl_morrey_norm)), tolerances={"spread": 0.10}),
}

INEQUALITY_IDS = tuple(_DEFS)

# CKN branches that have a hypothesis table but no numerical pairing in the harness
UNSUPPORTED_BRANCHES = ("T2ii", "T2iii", "T21iii", "T5", "T41i", "T41ii", "T41iii")


def _theorem_for(exp: Experiment) -> str | None:
    d = _DEFS[exp.inequality_id]
    if exp.inequality_id == "qj_smoothing":
        return "P1i" if adm.rational(exp.params["u"]) <= adm.rational(exp.params["v"]) else "P1ii"
    if exp.inequality_id == "morrey_pn":
        return "PN" + exp.params.get("variant", "ii")
    if exp.inequality_id == "ckn_T3":
        return "T3" + exp.params.get("variant", "i")
    return d.theorem


def _derived_numbers(exp: Experiment, cert: adm.Certificate) -> dict:
    """Outer indices and theta used by the numerical sides, taken from the certificate."""
    D = dict(cert.derived)
    P = exp.params
    if "theta" not in D and "theta_given" in D:
        D["theta"] = D["theta_given"]
    iid = exp.inequality_id
    if iid in ("ckn_T2i", "ckn_T21i", "ckn_T4"):
        D["delta_rhs"] = D["delta"] if iid != "ckn_T4" else adm.rational(P["tau"])
        D["delta1_rhs"] = D["delta1"] if iid != "ckn_T4" else adm.rational(P["tau"])
    elif iid in ("ckn_T21ii", "ckn_T21ii_exact"):
        D["delta_rhs"] = adm.rational(P["u"])
    elif iid == "ckn_T3":
        variant = P.get("variant", "i")
        tau = adm.rational(P["tau"])
        if variant == "i":
            D["delta_rhs"], D["delta1_rhs"] = tau, tau
        elif variant == "ii":
            D["delta_rhs"], D["delta1_rhs"] = tau, adm.rational(P["kappa"])
        else:
            D["delta_rhs"] = D["delta1_rhs"] = D["delta"]
    return D


def certify(exp: Experiment) -> adm.Certificate | None:
    tid = _theorem_for(exp)
    if tid is None:
        return None
    d = _DEFS[exp.inequality_id]
    raw = {k: v for k, v in exp.params.items() if k not in ("kind", "variant")}
    return adm.check(tid, d.cert_params(raw))


def _gate(exp: Experiment) -> adm.Certificate | None:
    cert = certify(exp)
    if cert is not None and cert.verdict != "admissible":
        failed = ", ".join(f"{c.cid} [{c.text}]" for c in cert.failed())
        raise GatedError(f"{exp.inequality_id}: certificate {cert.theorem_id} is {cert.verdict}: {failed}", cert)
    if exp.inequality_id == "ckn_T21ii_exact":
        if adm.rational(exp.params["r"]) < adm.rational(exp.params["v"]):
            raise GatedError("ckn_T21ii_exact: the annulus-level Hoelder step is exact only for r >= v", cert)
    return cert


# ----------------------------------------------------------------- runner


def _rows_for(name, dilation, index, sides, scale) -> list:
    out = []
    for side, lhs, rhs in sides:
        if abs(lhs) <= DEGENERATE_TOL * scale and abs(rhs) <= DEGENERATE_TOL * scale:
            out.append(Row(name, dilation, index, side, lhs, rhs, None, "degenerate"))
        elif rhs == 0 or not math.isfinite(lhs) or not math.isfinite(rhs):
            out.append(Row(name, dilation, index, side, lhs, rhs, None, "invalid"))
        else:
            out.append(Row(name, dilation, index, side, lhs, rhs, lhs / rhs, "ok"))
    return out


def _inputs(exp: Experiment) -> list:
    grid = exp.grid or Grid.default(int(_num(exp.params.get("n", 1))))
    items = [(tf.name, render(tf, grid)) for tf in exp.functions]
    items += list(exp.samples)
    return items


def _scale(f: SampledFunction) -> float:
    return max(1.0, float(np.abs(f.values).max(initial=0.0)))


def _ols(xs, ys) -> tuple:
    x, y = np.asarray(xs, float), np.asarray(ys, float)
    xm, ym = x.mean(), y.mean()
    slope = float(((x - xm) * (y - ym)).sum() / ((x - xm) ** 2).sum())
    icpt = float(ym - slope * xm)
    res = float(np.abs(y - (icpt + slope * x)).max())
    return slope, icpt, res


def run_inequality(exp: Experiment) -> InequalityReport:
    """Evaluate an experiment after gating it on its admissibility certificate."""
    if exp.inequality_id not in _DEFS:
        raise ParameterError(f"unknown inequality {exp.inequality_id!r}")
    d = _DEFS[exp.inequality_id]
    if d.mode == "slope":
        return run_qj_smoothing(exp) if d.sweep_kind == "J" else _run_band_sweep(exp)
    if d.mode == "equiv":
        return run_equivalence(exp)
    cert = _gate(exp)
    D = _derived_numbers(exp, cert) if cert is not None else {}
    report = _new_report(exp, cert)
    for name, f in _inputs(exp):
        for m in exp.dilations:
            g = dilate_dyadic(f, m)
            report.rows.extend(_rows_for(name, m, None, d.sides(g, exp.params, D), _scale(f)))
    _finish(report, exp, d)
    return report


def run_hardy_sobolev(exp: Experiment) -> InequalityReport:
    if exp.inequality_id != "hardy_sobolev":
        raise ParameterError("run_hardy_sobolev needs the hardy_sobolev experiment")
    return run_inequality(exp)


def _new_report(exp: Experiment, cert) -> InequalityReport:
    unsupported = list(UNSUPPORTED_BRANCHES) if exp.inequality_id.startswith("ckn_T") else []
    return InequalityReport(exp.to_dict(), None if cert is None else cert.to_dict(), unsupported=unsupported)


def _finish(report: InequalityReport, exp: Experiment, d: _Def) -> None:
    report.degenerate = sum(r.status == "degenerate" for r in report.rows)
    ratios = report.ratios()
    bad = [r for r in report.rows if r.status == "invalid"]
    report.assert_("finite_ratios", not bad, f"{len(bad)} rows with zero or non-finite right-hand side")
    report.aggregates["c_hat"] = max(ratios) if ratios else None
    if d.mode == "holder":
        tol = exp.tol("holder")
        worst = max(ratios) if ratios else 0.0
        report.assert_("holder_exact", worst <= 1 + tol, f"max ratio {worst!r} <= 1 + {tol!r}")
    elif d.mode == "scale":
        tol = exp.tol("spread")
        spreads = {}
        for key in sorted({(r.function, r.side) for r in report.rows}):
            rs = [r.ratio for r in report.rows if (r.function, r.side) == key and r.ratio is not None]
            if rs:
                spreads["|".join(k for k in key if k)] = max(rs) / min(rs) - 1.0
        worst = max(spreads.values()) if spreads else 0.0
        report.aggregates["spread_by_function"] = spreads
        report.aggregates["max_spread"] = worst
        report.assert_("dilation_invariance", worst <= tol, f"max ratio spread {worst!r} <= {tol!r}")


def _run_band_sweep(exp: Experiment) -> InequalityReport:
    d = _DEFS[exp.inequality_id]
    cert = _gate(exp)
    D = _derived_numbers(exp, cert) if cert is not None else {}
    report = _new_report(exp, cert)
    grid = exp.grid or Grid(1, 10, 2 ** 20)
    xs, ys = [], []
    for i in exp.sweep:
        R = 2.0 ** i
        f = render(TestFunction.make("bandlimited_kernel", R=R), grid)
        rows = _rows_for(f"bandlimited_kernel(R={R!r})", 0, int(i), d.sides(f, exp.params, D), _scale(f))
        report.rows.extend(rows)
        if rows[0].ratio is not None:
            xs.append(float(i))
            ys.append(math.log2(rows[0].ratio))
    _slope_assertions(report, exp, d, xs, ys)
    return report


def run_qj_smoothing(exp: Experiment) -> InequalityReport:
    """Low-pass estimates ``||Q_J f|| <~ 2**(J e) ||f||`` on ``f_J = f_0(2**J x)``.

    ``f_0`` is each corpus function rendered on the base grid; dilating by
    ``J`` moves its spectrum to ``|xi| ~ 2**J``, where the estimate is sharp.
    """
    d = _DEFS[exp.inequality_id]
    if d.sweep_kind != "J":
        raise ParameterError(f"{exp.inequality_id} is not a low-pass sweep")
    cert = _gate(exp)
    D = _derived_numbers(exp, cert) if cert is not None else {}
    report = _new_report(exp, cert)
    xs_all, ys_all = {}, {}
    for name, f0 in _inputs(exp):
        for J in exp.sweep:
            g = dilate_dyadic(f0, int(J))
            rows = _rows_for(name, int(J), int(J), d.sides(g, exp.params, D, int(J)), _scale(f0))
            report.rows.extend(rows)
            if rows[0].ratio is not None:
                xs_all.setdefault(name, []).append(float(J))
                ys_all.setdefault(name, []).append(math.log2(rows[0].ratio))
    for name in sorted(xs_all):
        _slope_assertions(report, exp, d, xs_all[name], ys_all[name], label=name)
    return report


def _slope_assertions(report, exp, d, xs, ys, label: str = "") -> None:
    report.degenerate = sum(r.status == "degenerate" for r in report.rows)
    expected = d.exponent(exp.params)
    key = f"[{label}]" if label else ""
    if len(xs) < 2:
        report.assert_("slope" + key, False, "fewer than two usable points")
        return
    slope, icpt, res = _ols(xs, ys)
    report.aggregates["expected_slope"] = expected
    report.aggregates["slope" + key] = slope
    report.aggregates["intercept" + key] = icpt
    report.aggregates["residual" + key] = res
    tol = exp.tol("slope")
    report.assert_("slope" + key, abs(slope - expected) <= tol, f"slope {slope!r} vs {expected!r} within {tol!r}")
    cap = exp.tol("residual")
    if cap is not None:
        report.assert_("residual" + key, res <= cap, f"max log2 residual {res!r} <= {cap!r}")
    ratios = report.ratios()
    report.aggregates["c_hat"] = max(ratios) if ratios else None


def run_equivalence(exp: Experiment) -> InequalityReport:
    """Two-sided ratio statistics of a claimed norm equivalence, per dilation."""
    d = _DEFS[exp.inequality_id]
    if d.mode != "equiv":
        raise ParameterError(f"{exp.inequality_id} is not an equivalence")
    cert = _gate(exp)
    report = _new_report(exp, cert)
    for name, f in _inputs(exp):
        for m in exp.dilations:
            g = dilate_dyadic(f, m)
            report.rows.extend(_rows_for(name, m, None, d.sides(g, exp.params, {}), _scale(f)))
    report.degenerate = sum(r.status == "degenerate" for r in report.rows)
    cap, tol = exp.tol("cap"), exp.tol("spread")
    ratios = report.ratios()
    bad = [r for r in report.rows if r.status == "invalid"]
    report.assert_("finite_ratios", not bad, f"{len(bad)} rows with zero or non-finite right-hand side")
    if not ratios:
        report.aggregates["c_hat"] = None
        return report
    lo, hi = min(ratios), max(ratios)
    report.aggregates.update({"c_hat": hi, "min_ratio": lo})
    report.assert_("two_sided_bounds", 1 / cap <= lo and hi <= cap, f"ratios in [{lo!r}, {hi!r}] vs cap {cap!r}")
    consts = {}
    for m in exp.dilations:
        rs = [r.ratio for r in report.rows if r.dilation == m and r.ratio is not None]
        if rs:
            consts[str(m)] = max(max(rs), 1 / min(rs))
    report.aggregates["constant_by_dilation"] = consts
    if "0" in consts:
        base = consts["0"]
        spread = max(abs(c / base - 1) for c in consts.values())
        report.aggregates["max_spread"] = spread
        report.assert_("constant_stability", spread <= tol, f"measured constant spread {spread!r} <= {tol!r}")
    return report


# ---------------------------------------------------------------- presets


def _equiv_params(**extra):
    P = {"n": "1", "alpha": "0", "p": "2", "q": "2", "s": "1", "beta": "2", "M": "2"}
    P.update(extra)
    return P


_PRESETS = {
    "interp": dict(params={"n": "1", "theta": "1/3", "kind": "besov", "a0": "0", "p0": "2", "q0": "2", "b0": "2",
                           "s0": "0", "a1": "1/2", "p1": "1", "q1": "4", "b1": "1", "s1": "1"},
                   functions="default"),
    "ppn1": dict(params={"n": "1", "alpha1": "0", "s": "2", "r": "2", "alpha2": "0", "q": "1", "tau": "2"},
                 sweep=tuple(range(6)), grid=Grid(1, 10, 2 ** 20)),
    "ppn2": dict(params={"n": "1", "alpha1": "0", "s": "1", "r": "2", "alpha2": "1/2", "q": "2", "tau": "2"},
                 sweep=tuple(range(6)), grid=Grid(1, 10, 2 ** 20)),
    "qj_smoothing": dict(params={"n": "1", "alpha1": "0", "v": "2", "r": "2", "sigma": "1", "alpha2": "0",
                                 "u": "1", "tau": "2"},
                         functions=(TestFunction.make("bandlimited_kernel", R=1.0),), grid=Grid(1, 10, 2 ** 18),
                         sweep=tuple(range(1, 8)), tolerances={"residual": None}),
    "morrey_qj": dict(params={"n": "1", "u": "3/2", "p": "3", "v": "2", "q": "2", "sigma": "1"},
                      functions=(TestFunction.make("bandlimited_kernel", R=1.0),), grid=Grid(1, 10, 2 ** 18),
                      sweep=tuple(range(1, 8)), tolerances={"residual": None}),
    "morrey_pn": dict(params={"n": "1", "u": "2", "p": "4", "s": "2", "q": "2", "variant": "ii"},
                      sweep=tuple(range(6)), grid=Grid(1, 10, 2 ** 18)),
    "ckn_classical": dict(params={"n": "1", "alpha": "0", "beta": "0", "gamma": "0", "p": "2", "q": "2",
                                  "tau": "4"}, functions="default"),
    "ckn_T2i": dict(params={"n": "1", "alpha1": "-1/4", "alpha2": "-1/4", "alpha3": "-1/4", "p": "1", "u": "1",
                            "v": "3/2", "r": "2", "tau": "2", "rho": "2", "beta": "2", "s": "1", "sigma": "1/4",
                            "space": "B"}, functions="default"),
    "ckn_T21i": dict(params={"n": "1", "alpha1": "-1/4", "alpha2": "-1/4", "alpha3": "-1/4", "p": "1", "u": "1",
                             "v": "2", "r": "2", "tau": "2", "rho": "2", "beta": "2", "s": "1", "space": "B"},
                     functions="default"),
    "ckn_T21ii": dict(params={"n": "1", "alpha1": "-1/4", "alpha2": "-1/4", "alpha3": "-1/4", "p": "3/2",
                              "u": "1", "v": "2", "r": "2", "tau": "2", "rho": "2", "beta": "2", "s": "1/2",
                              "space": "B"}, functions="default"),
    "ckn_T21ii_exact": dict(params={"n": "1", "alpha1": "-1/4", "alpha2": "-1/4", "alpha3": "-1/4", "p": "3/2",
                                    "u": "1", "v": "2", "r": "2", "tau": "2", "rho": "2", "beta": "2", "s": "1/2",
                                    "space": "B"}, functions="gaussian"),
    "ckn_T3": dict(params={"n": "1", "alpha1": "-1/4", "alpha2": "0", "alpha3": "0", "p": "1", "u": "2",
                           "v": "3/2", "r": "2", "tau": "2", "beta": "2", "s": "1", "sigma": "1/4",
                           "variant": "i"}, functions="default"),
    "ckn_T4": dict(params={"n": "1", "alpha1": "-1/4", "alpha2": "0", "alpha3": "0", "p": "3/2", "u": "3/2",
                           "v": "3/2", "r": "2", "tau": "2", "beta": "2", "s": "1", "sigma": "1/4",
                           "space": "B"}, functions="default"),
    "morrey_ckn": dict(params={"n": "1", "u": "2", "p": "4", "mu": "1", "delta": "2", "beta": "2", "sigma": "1/4",
                               "v": "3/2", "q": "2", "s": "1"}, functions="default"),
    "hardy_sobolev": dict(params={"n": "2", "q": "3/2", "s": "3", "alpha": "-1/3"}, functions="gaussian"),
    "norm_equiv_fourier_vs_diff": dict(params=_equiv_params(), functions="scale", grid=SCALE_GRID),
    "norm_equiv_tl_vs_diff": dict(params=_equiv_params(), functions="scale", grid=SCALE_GRID),
    "norm_equiv_supdiff": dict(params=_equiv_params(), functions="scale", grid=SCALE_GRID),
    "coincidence_bessel": dict(params=_equiv_params(), functions="scale", grid=SCALE_GRID),
    "coincidence_herz": dict(params=_equiv_params(s="0"), functions="scale", grid=SCALE_GRID),
    "split_riesz": dict(params=_equiv_params(), functions="scale", grid=SCALE_GRID),
    "split_besov": dict(params=_equiv_params(), functions="scale", grid=SCALE_GRID),
    "split_morrey_besov": dict(params={"n": "1", "u": "2", "p": "4", "s": "1", "beta": "2"}, functions="scale",
                               grid=SCALE_GRID),
    "split_morrey_tl": dict(params={"n": "1", "u": "2", "p": "4", "s": "1", "beta": "2"}, functions="scale",
                            grid=SCALE_GRID),
}


def preset(inequality_id: str) -> Experiment:
    """A ready-to-run experiment with an admissible parameter tuple."""
    if inequality_id not in _PRESETS:
        raise ParameterError(f"unknown inequality {inequality_id!r}; known: {', '.join(INEQUALITY_IDS)}")
    spec = dict(_PRESETS[inequality_id])
    n = int(spec["params"].get("n", "1"))
    funcs = spec.get("functions", ())
    if funcs == "default":
        funcs = tuple(default_corpus(n))
    elif funcs == "gaussian":
        funcs = tuple(gaussian_corpus(n))
    elif funcs == "scale":
        funcs = tuple(scale_corpus())
    dil = (0,) if _DEFS[inequality_id].mode == "slope" else (-2, -1, 0, 1, 2)
    return Experiment(inequality_id, dict(spec["params"]), tuple(funcs), dil, spec.get("grid", Grid.default(n)),
                      tuple(spec.get("sweep", ())), dict(spec.get("tolerances", {})))
