"""Exact evaluation of hypothesis systems over rational parameters.

Every theorem is a data table of comparisons written as plain strings such as
``"alpha1 + n/s > 0"``. The strings are parsed once with :mod:`ast` and
evaluated in exact :class:`fractions.Fraction` arithmetic extended by a signed
infinity (``n/inf == 0``). The residual of a comparison is ``lhs - rhs``
(``rhs - lhs`` for ``<`` and ``<=``), so a condition holds when the residual is
positive (strict), nonnegative (weak), zero (``==``) or nonzero (``!=``).

A strict condition whose residual is exactly zero yields the verdict
``"boundary"`` rather than ``"inadmissible"``: the limiting case is open, not
false. Theorems stated as an equivalence ("if and only if") are marked
``sharp`` and never produce a boundary verdict.
"""
from __future__ import annotations

import ast
import itertools
import json
import operator
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .errors import SpecificationError


class UndefinedValue(ArithmeticError):
    """An expression has no value (``inf - inf``, ``0 * inf``, division by zero)."""


class ExtInf:
    """Signed infinity compatible with :class:`Fraction` arithmetic."""

    __slots__ = ("sign",)

    def __init__(self, sign: int = 1):
        object.__setattr__(self, "sign", 1 if sign > 0 else -1)

    def __setattr__(self, name, value):
        raise AttributeError("immutable")

    def __repr__(self):
        return "inf" if self.sign > 0 else "-inf"

    def __float__(self):
        return float("inf") * self.sign

    def __hash__(self):
        return hash(("ExtInf", self.sign))

    def __eq__(self, other):
        return isinstance(other, ExtInf) and other.sign == self.sign

    def __ne__(self, other):
        return not self == other

    def __lt__(self, other):
        if isinstance(other, ExtInf):
            return self.sign < other.sign
        return self.sign < 0

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        if isinstance(other, ExtInf):
            return self.sign > other.sign
        return self.sign > 0

    def __ge__(self, other):
        return self == other or self > other

    def __neg__(self):
        return ExtInf(-self.sign)

    def __pos__(self):
        return self

    def __abs__(self):
        return ExtInf(1)

    def __add__(self, other):
        if isinstance(other, ExtInf) and other.sign != self.sign:
            raise UndefinedValue("inf - inf")
        return self

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, ExtInf):
            return ExtInf(self.sign * other.sign)
        if other == 0:
            raise UndefinedValue("0 * inf")
        return ExtInf(self.sign if other > 0 else -self.sign)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, ExtInf) or other == 0:
            raise UndefinedValue("inf / inf or inf / 0")
        return ExtInf(self.sign if other > 0 else -self.sign)

    def __rtruediv__(self, other):
        if isinstance(other, ExtInf):
            raise UndefinedValue("inf / inf")
        return Fraction(0)


INF = ExtInf(1)
Infinity = ExtInf  # public alias


def rational(x):
    """Parse an exact value: int, Fraction, ExtInf, or a string like ``"-3/4"``, ``"0.25"``, ``"inf"``."""
    if isinstance(x, ExtInf):
        return x
    if isinstance(x, bool):
        raise SpecificationError(f"not a number: {x!r}")
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    if isinstance(x, float):
        if x == float("inf"):
            return INF
        if x == float("-inf"):
            return ExtInf(-1)
        return Fraction(repr(x))
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "+inf", "infinity", "oo", "∞"):
            return INF
        if s in ("-inf", "-infinity", "-oo"):
            return ExtInf(-1)
        try:
            return Fraction(s)
        except ValueError:
            raise SpecificationError(f"cannot parse {x!r} as a rational") from None
    raise SpecificationError(f"cannot parse {x!r} as a rational")


def fmt(x) -> str | None:
    """Serialize exactly: ``"num/den"`` for rationals, ``"inf"`` for infinity."""
    if x is None:
        return None
    if isinstance(x, ExtInf):
        return repr(x)
    if isinstance(x, str):
        return x
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def _inv(x):
    if isinstance(x, ExtInf):
        return Fraction(0)
    if x == 0:
        return INF
    return 1 / Fraction(x)


def _div(a, b):
    if not isinstance(b, ExtInf) and b == 0:
        raise UndefinedValue("division by zero")
    if isinstance(a, ExtInf) or isinstance(b, ExtInf):
        return a / b
    return Fraction(a) / Fraction(b)


# ------------------------------------------------------------ expressions

_BINOPS = {ast.Add: operator.add, ast.Sub: operator.sub, ast.Mult: operator.mul, ast.Div: _div}
_CMPOPS = {ast.Gt: ">", ast.GtE: ">=", ast.Lt: "<", ast.LtE: "<=", ast.Eq: "==", ast.NotEq: "!="}
_FUNCS = {"max": max, "min": min, "abs": abs, "inv": _inv}


def _eval(node, env):
    if isinstance(node, ast.Expression):
        return _eval(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, int) and not isinstance(node.value, bool):
        return Fraction(node.value)
    if isinstance(node, ast.Name):
        if node.id == "inf":
            return INF
        return env[node.id]
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.USub):
        return -_eval(node.operand, env)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.UAdd):
        return _eval(node.operand, env)
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval(node.left, env), _eval(node.right, env))
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS:
        return _FUNCS[node.func.id](*[_eval(a, env) for a in node.args])
    raise SpecificationError(f"unsupported expression element {ast.dump(node)}")


def _names(node) -> set:
    return {n.id for n in ast.walk(node) if isinstance(n, ast.Name) and n.id not in _FUNCS and n.id != "inf"}


@dataclass(frozen=True)
class Condition:
    """One hypothesis: ``"<lhs> <op> <rhs>"`` plus a monotonicity tag in ``s``.

    ``s_tag`` is ``"+"`` when raising ``s`` can only increase the residual,
    ``"-"`` when it can only decrease it, and ``""`` otherwise.
    """

    cid: str
    text: str
    s_tag: str = ""

    def parsed(self):
        return _parse_condition(self.text)

    def names(self) -> set:
        lhs, _, rhs = self.parsed()
        return _names(lhs) | _names(rhs)


_PARSE_CACHE: dict = {}


def _parse_condition(text: str):
    if text not in _PARSE_CACHE:
        tree = ast.parse(text, mode="eval").body
        if not isinstance(tree, ast.Compare) or len(tree.ops) != 1:
            raise SpecificationError(f"condition must be a single comparison: {text!r}")
        _PARSE_CACHE[text] = (tree.left, _CMPOPS[type(tree.ops[0])], tree.comparators[0])
    return _PARSE_CACHE[text]


def evaluate_expression(text: str, env: dict):
    return _eval(ast.parse(text, mode="eval"), env)


@dataclass(frozen=True)
class ConditionResult:
    cid: str
    text: str
    op: str
    satisfied: bool
    residual: object  # Fraction | ExtInf | None

    @property
    def boundary(self) -> bool:
        return self.op in (">", "<") and self.residual is not None and self.residual == 0

    def to_dict(self) -> dict:
        return {"id": self.cid, "text": self.text, "satisfied": self.satisfied, "residual": fmt(self.residual)}


def _evaluate(cond: Condition, env: dict) -> ConditionResult:
    lhs, op, rhs = cond.parsed()
    try:
        a, b = _eval(lhs, env), _eval(rhs, env)
        res = b - a if op in ("<", "<=") else a - b
    except (UndefinedValue, ZeroDivisionError, TypeError, KeyError):
        # an unsolvable derived symbol counts as a violated condition
        return ConditionResult(cond.cid, cond.text, op, False, None)
    if op in (">", "<"):
        ok = res > 0
    elif op in (">=", "<="):
        ok = res >= 0
    elif op == "==":
        ok = res == 0
    else:
        ok = res != 0
    return ConditionResult(cond.cid, cond.text, op, bool(ok), res)


# ----------------------------------------------------------- parameters


class ParamTuple:
    """Immutable mapping from parameter names to exact values.

    Values are parsed with :func:`rational`; the dimension ``n`` must be a
    positive integer. The string-valued key ``space`` (``"B"`` or ``"F"``)
    selects the Besov or Triebel-Lizorkin branch where a theorem has both.
    """

    __slots__ = ("_d",)
    TEXT_KEYS = ("space",)

    def __init__(self, mapping: dict | None = None, **kw):
        d = dict(mapping or {})
        d.update(kw)
        out = {}
        for k, v in d.items():
            if v is None:
                continue
            if k in self.TEXT_KEYS:
                out[k] = str(v).upper()
            else:
                out[k] = rational(v)
        if "n" in out and (isinstance(out["n"], ExtInf) or out["n"].denominator != 1 or out["n"] < 1):
            raise SpecificationError(f"n must be a positive integer, got {out['n']}")
        object.__setattr__(self, "_d", out)

    def __setattr__(self, name, value):
        raise AttributeError("ParamTuple is immutable")

    def __getattr__(self, name):
        try:
            return self._d[name]
        except KeyError:
            raise AttributeError(name) from None

    def __getitem__(self, key):
        return self._d[key]

    def __contains__(self, key):
        return key in self._d

    def get(self, key, default=None):
        return self._d.get(key, default)

    def keys(self):
        return self._d.keys()

    def items(self):
        return self._d.items()

    def replace(self, **kw) -> "ParamTuple":
        d = dict(self._d)
        d.update(kw)
        return ParamTuple(d)

    def __eq__(self, other):
        return isinstance(other, ParamTuple) and self._d == other._d

    def __hash__(self):
        return hash(tuple(sorted((k, str(v)) for k, v in self._d.items())))

    def __repr__(self):
        return "ParamTuple(" + ", ".join(f"{k}={fmt(v)}" for k, v in sorted(self._d.items())) + ")"

    def to_dict(self) -> dict:
        return {k: (v if k in self.TEXT_KEYS else fmt(v)) for k, v in sorted(self._d.items())}

    @classmethod
    def from_dict(cls, d: dict) -> "ParamTuple":
        return cls(d)


# -------------------------------------------------------------- derived


def _sigma(n, *indices):
    return n * max([Fraction(0)] + [_inv(i) - 1 for i in indices])


def _derived_common(P: ParamTuple) -> dict:
    """Symbols defined from the raw parameters, available to every table."""
    n = P["n"]
    out = {}
    pairs = {"sigma_q": ("q",), "sigma_u": ("u",), "sigma_v": ("v",), "sigma_p": ("p",),
             "sigma_pb": ("p", "beta"), "sigma_qb": ("q", "beta")}
    for name, idx in pairs.items():
        if all(i in P for i in idx):
            out[name] = _sigma(n, *(P[i] for i in idx))
    if "q" in P:
        out["alpha0"] = n - n * _inv(P["q"])
    return out


def _solve(num: Callable, den: Callable, env: dict):
    try:
        d = den(env)
        if d == 0:
            return None
        return _div(num(env), d)
    except (UndefinedValue, KeyError, TypeError):
        return None


def _theta_ckn(env):
    """Solve the affine balance of the weighted interpolation theorems for theta."""
    return _solve(lambda e: e["sigma"] - e["n"] / e["v"] + e["alpha2"] - e["alpha1"] + e["n"] / e["u"],
                  lambda e: e["s"] - e["n"] / e["p"] + e["n"] / e["u"] + e["alpha2"] - e["alpha3"], env)


def _theta_morrey(env):
    return _solve(lambda e: e["sigma"] - e["n"] / e["p"] + e["n"] / e["delta"],
                  lambda e: e["s"] - e["n"] / e["q"] + e["n"] / e["delta"], env)


def _theta_classical(env):
    lo = lambda e: e["alpha"] - 1 + e["n"] / e["p"]
    return _solve(lambda e: e["gamma"] + e["n"] / e["tau"] - lo(e),
                  lambda e: e["beta"] + e["n"] / e["q"] - lo(e), env)


def _pick(cond: bool, a, b):
    return a if cond else b


def _derive_mixed(env: dict) -> dict:
    """mu(sigma), varpi(sigma), t and lambda of the (iii) branches."""
    out = {}
    th = env.get("theta")
    if th is None:
        return out
    n, u, p, s = env["n"], env["u"], env["p"], env["s"]
    a1, a2, a3 = env["alpha1"], env["alpha2"], env["alpha3"]
    sigma = env.get("sigma", Fraction(0))
    t = (1 - th) * a2 + th * a3
    out["t"] = t
    try:
        nvarpi = (1 - th) * n / u + th * (n / p - s + _div(sigma, th))
        nmu = nvarpi - th * (a2 - a3)
    except (UndefinedValue, ZeroDivisionError):
        return out
    out["nvarpi"], out["nmu"] = nvarpi, nmu
    if not isinstance(nmu, ExtInf) and nmu != 0:
        out["mu"] = _div(n, nmu) if nmu > 0 else None
    if not isinstance(nvarpi, ExtInf) and nvarpi > 0:
        out["varpi"] = _div(n, nvarpi)
    den = th * (a2 - a3)
    if den != 0:
        lam = 1 - _div(a1 - t, den)
        out["lam"] = lam
        try:
            rinv = (1 - lam) * nmu + lam * nvarpi
            out["r_solved"] = _inv(rinv) if rinv > 0 else None
        except (UndefinedValue, TypeError):
            pass
    return out


# --------------------------------------------------------------- tables


@dataclass(frozen=True)
class Theorem:
    """Hypothesis table of one result.

    ``cases`` is a list of ``(guard, conditions)`` pairs; the first guard that
    holds contributes its conditions, and the guard itself is recorded. If no
    guard holds, the last pair's conditions are used so that the failure is
    reported with exact residuals.
    """

    tid: str
    title: str
    requires: tuple
    conditions: tuple
    cases: tuple = ()
    solve: Callable | None = None
    derive: Callable | None = None
    sharp: bool = False
    notes: tuple = ()


def _c(prefix: str, texts: Iterable) -> tuple:
    out = []
    for i, item in enumerate(texts, 1):
        text, tag = (item, "") if isinstance(item, str) else item
        out.append(Condition(f"{prefix}.{i}", text, tag))
    return tuple(out)


_F_EXTRA = ["p < inf", "tau < inf", ("s > sigma_pb", "+")]

_T2_BASE = [
    "p > 0", "tau > 0", "beta > 0", "rho > 0",
    "r > 1", "r < inf", "v > 1", "v < inf", "u >= 1", "u < inf",
    "sigma >= 0",
    "alpha1 > -n/v", "alpha1 < n - n/v",
    "alpha2 > -n/u", "alpha2 < n - n/u",
    "alpha3 > -n/p",
    "v >= max(p, u)",
    "s - n/p + n/u + alpha2 - alpha3 > sigma - n/v + alpha2 - alpha1 + n/u",
    "sigma - n/v + alpha2 - alpha1 + n/u > 0",
    "sigma - n/v == -(1 - theta)*n/u + theta*(s - n/p) + alpha1 - ((1 - theta)*alpha2 + theta*alpha3)",
    "theta > 0", "theta < 1",
]

_T21_BASE = [
    "p > 0", "tau > 0", "beta > 0", "rho > 0",
    "r > 1", "r < inf", "v > 1", "v < inf", "u >= 1", "u < inf",
    "s - n/p + n/u + alpha2 - alpha3 > -n/v + alpha2 - alpha1 + n/u",
    "-n/v + alpha2 - alpha1 + n/u > 0",
    "n/v == (1 - theta)*n/u + theta*(n/p - s) - alpha1 + (1 - theta)*alpha2 + theta*alpha3",
    "theta > 0", "theta < 1",
]

_T3_BASE = [
    "p > 0", "p < inf", "tau > 0", "tau < inf", "beta > 0",
    "r > 1", "r < inf", "v > 1", "v < inf", "sigma >= 0", "u >= 1", "u < inf",
    "alpha1 > -n/v", "alpha1 < n - n/v", "alpha2 > -n/u", "alpha3 > -n/p",
    ("s > sigma_pb", "+"),
    "s - n/p + n/u + alpha2 - alpha3 > sigma - n/v + alpha2 - alpha1 + n/u",
    "sigma - n/v + alpha2 - alpha1 + n/u > 0",
    "sigma - n/v == -(1 - theta)*n/u + theta*(s - n/p) + alpha1 - ((1 - theta)*alpha2 + theta*alpha3)",
    "theta > 0", "theta < 1",
]

_T4_BASE = [
    "r > 1", "r < inf", "p > 0", "beta > 0", "tau > 0",
    "v > 1", "v <= min(p, u)",
    "alpha2 - alpha1 > n/v - n/max(p, u)",
    "alpha3 >= alpha2", "sigma >= 0",
    "alpha1 > -n/v", "alpha1 < n - n/v", "alpha2 > -n/u", "alpha3 > -n/p",
    "s - n/p + n/u + alpha2 - alpha3 > sigma - n/v + alpha2 - alpha1 + n/u",
    "sigma - n/v + alpha2 - alpha1 + n/u > 0",
    "sigma - n/v == -(1 - theta)*n/u + theta*(s - n/p) + alpha1 - ((1 - theta)*alpha2 + theta*alpha3)",
    "theta > 0", "theta < 1",
]

_CKN_REQ = ("n", "alpha1", "alpha2", "alpha3", "p", "u", "v", "r", "tau", "beta", "s", "sigma")
_MIXED_III = ["alpha2 < alpha1", "alpha1 < t", "alpha2 > -nmu", "lam > 0", "lam < 1",
              "1/r == (1 - lam)*nmu + lam*nvarpi"]


def _deltas(env):
    a1, a2 = env["alpha1"], env["alpha2"]
    out = {"delta": _pick(a2 == a1, env["r"], env.get("tau"))}
    if "alpha3" in env:
        out["delta1"] = _pick(env["alpha3"] == a1, env["r"], env.get("rho"))
    return out


def _derive_t2(env):
    out = _deltas(env)
    out.update(_derive_mixed(env))
    return out


def _derive_t21ii(env):
    out = _derive_t2(env)
    n, p, s = env["n"], env["p"], env["s"]
    try:
        winv = _inv(p) - s / n
        out["w"] = _inv(winv) if winv > 0 else None
        out["w_printed"] = _inv(n / p - s) if n / p - s > 0 else None
    except (UndefinedValue, TypeError):
        pass
    out["rho_solved"] = out.get("w") if env.get("space", "B") == "B" else INF
    return out


def _derive_t3iii(env):
    strict = env["alpha3"] - env["alpha1"] > env["n"] / env["v"] - env["n"] / env["p"]
    return {"delta": _pick(strict, env["tau"], env["r"])}


def _derive_exponent_herz(env):
    n = env["n"]
    out = {"exponent": n / env["q"] - n / env["s"] + env["alpha2"] - env["alpha1"]}
    return out


def _derive_l1(env):
    out = _derive_exponent_herz(env)
    out["delta"] = _pick(env["alpha2"] == env["alpha1"], env["r"], env["tau"])
    return out


def _derive_l2(env):
    out = _derive_exponent_herz(env)
    n = env["n"]
    eq = env["alpha2"] == env["alpha1"] + n / env["s"] - n / env["q"]
    out["delta"] = _pick(eq, env["r"], env["tau"])
    return out


def _derive_p1(variant):
    def f(env):
        n = env["n"]
        out = {"exponent": n / env["u"] - n / env["v"] + env["alpha2"] - env["alpha1"] + env["sigma"]}
        if variant == "i":
            eq = env["alpha2"] == env["alpha1"]
        else:
            eq = env["alpha2"] == env["alpha1"] + n / env["v"] - n / env["u"]
        out["delta"] = _pick(eq, env["r"], env["tau"])
        return out
    return f


def _derive_e3(kind):
    def f(env):
        n = env["n"]
        left, right = env["alpha2"] + n / env["q"], env["alpha1"] + n / env["s"]
        s_le_q, q_le_s = env["s"] <= env["q"], env["q"] <= env["s"]
        if kind == "B":
            limit = (s_le_q and left == right) or (q_le_s and env["alpha2"] == env["alpha1"])
            return {"theta_index": "r" if limit else "p", "theta": env["r"] if limit else env["p"]}
        limit = s_le_q and left == right
        return {"theta_index": "beta" if limit else "inf", "theta": env["beta"] if limit else INF}
    return f


def _derive_t12(env):
    return {}


def _derive_pn(variant):
    def f(env):
        n = env["n"]
        if variant == "i":
            return {"exponent": n / env["q"] - env["v"] * n / (env["q"] * env["u"])}
        return {"exponent": n / env["q"] - n / env["p"]}
    return f


def _derive_t11(env):
    return {"exponent": env["n"] / env["q"] - env["n"] / env["p"] + env["sigma"]}


_TABLE = {}


def _register(th: Theorem):
    _TABLE[th.tid] = th


_register(Theorem("L1", "Bernstein-type Herz estimate for band-limited f, q <= s",
                  ("n", "alpha1", "alpha2", "s", "q", "r", "tau"),
                  _c("L1", ["alpha1 + n/s > 0", "q > 0", "q <= s", "alpha2 >= alpha1", "r > 0", "tau > 0"]),
                  derive=_derive_l1))
_register(Theorem("L2", "Bernstein-type Herz estimate for band-limited f, s <= q",
                  ("n", "alpha1", "alpha2", "s", "q", "r", "tau"),
                  _c("L2", ["alpha1 + n/s > 0", "s > 0", "s <= q", "alpha2 >= alpha1 + n/s - n/q",
                            "r > 0", "tau > 0"]),
                  derive=_derive_l2))
_P1_BASE = ["sigma >= 0", "r > 1", "r < inf", "v > 1", "v < inf", "tau > 0",
            "alpha1 > -n/v", "alpha1 < n - n/v"]
_register(Theorem("P1i", "Low-pass smoothing into Herz-Bessel spaces, u <= v",
                  ("n", "alpha1", "alpha2", "u", "v", "r", "tau", "sigma"),
                  _c("P1i", _P1_BASE + ["u >= 1", "u <= v", "alpha2 >= alpha1"]),
                  derive=_derive_p1("i")))
_register(Theorem("P1ii", "Low-pass smoothing into Herz-Bessel spaces, v <= u",
                  ("n", "alpha1", "alpha2", "u", "v", "r", "tau", "sigma"),
                  _c("P1ii", _P1_BASE + ["v <= u", "alpha2 >= alpha1 + n/v - n/u"]),
                  derive=_derive_p1("ii")))

for _var, _extra, _derive in (
        ("i", ["alpha1 <= alpha2", "alpha2 <= alpha3"], _derive_t2),
        ("ii", ["1/r <= (1 - theta)*n/u + theta*n/p",
                "alpha1 == (1 - theta)*alpha2 + theta*alpha3"], _derive_t2),
        ("iii", ["mu >= max(u, p)"] + _MIXED_III, _derive_t2)):
    _register(Theorem(f"T2{_var}", f"Weighted interpolation into Herz-Bessel spaces, branch ({_var})",
                      _CKN_REQ + ("rho",), _c(f"T2{_var}", _T2_BASE + _extra),
                      cases=(("space == 'F'", _c(f"T2{_var}F", _F_EXTRA)),),
                      solve=_theta_ckn, derive=_derive,
                      notes=("t = (1 - theta)*alpha2 + theta*alpha3",
                             "the F-scale index written with a subscript M is read as F with beta = inf")
                      if _var == "iii" else ()))

_T21_EXTRA = {
    "i": ["alpha1 <= alpha2", "alpha2 <= alpha3", "v >= max(u, p)",
          "alpha1 > -n/v", "alpha2 > -n/u", "alpha3 > -n/p"],
    "ii": ["p > 0", "p < n/s", "1/r <= (1 - theta)*n/u + theta*(n/p - s)",
           "alpha3 > -n/p", "alpha3 < n - n/p", "alpha1 == (1 - theta)*alpha2 + theta*alpha3"],
    "iii": ["mu > p", "p < n/s", "alpha3 > -n/p", "alpha3 < n - n/p"] + _MIXED_III,
}
for _var, _extra in _T21_EXTRA.items():
    _register(Theorem(f"T21{_var}", f"Weighted interpolation into Herz spaces, branch ({_var})",
                      ("n", "alpha1", "alpha2", "alpha3", "p", "u", "v", "r", "tau", "beta", "s", "rho"),
                      _c(f"T21{_var}", _T21_BASE + _extra),
                      cases=(("space == 'F'", _c(f"T21{_var}F", _F_EXTRA)),),
                      solve=lambda e: _theta_ckn(dict(e, sigma=Fraction(0))),
                      derive=(_derive_t21ii if _var == "ii" else
                              (lambda e: _derive_t2(dict(e, sigma=Fraction(0))))),
                      notes=("Hoelder exponent w solves 1/w = 1/p - s/n",) if _var == "ii" else ()))

_T3_EXTRA = {
    "i": ["p <= v", "v < u", "alpha2 - alpha1 > n/v - n/u", "alpha3 == alpha2"],
    "ii": ["p <= v", "v < u", "alpha2 - alpha1 > n/v - n/u", "alpha3 > alpha2"],
    "iii": ["u <= v", "v < p", "alpha3 - alpha1 >= n/v - n/p", "alpha2 > -n/u",
            "alpha2 < n - n/u", "alpha2 >= alpha3"],
}
for _var, _extra in _T3_EXTRA.items():
    _register(Theorem(f"T3{_var}", f"Weighted interpolation, intermediate integrability, branch ({_var})",
                      _CKN_REQ, _c(f"T3{_var}", _T3_BASE + _extra), solve=_theta_ckn,
                      derive=_derive_t3iii if _var == "iii" else _deltas))
    _register(Theorem(f"T41{_var}", f"Intermediate integrability into Herz spaces, branch ({_var})",
                      _CKN_REQ, _c(f"T41{_var}", _T3_BASE + _extra + ["sigma == 0"]), solve=_theta_ckn,
                      derive=_derive_t3iii if _var == "iii" else _deltas))

_register(Theorem("T4", "Weighted interpolation, small integrability v <= min(p, u)",
                  _CKN_REQ, _c("T4", _T4_BASE), cases=(("space == 'F'", _c("T4F", _F_EXTRA)),),
                  solve=_theta_ckn, derive=_deltas))
_register(Theorem("T5", "Weighted interpolation into Herz spaces, small integrability",
                  _CKN_REQ, _c("T5", _T4_BASE + ["sigma == 0"]), cases=(("space == 'F'", _c("T5F", _F_EXTRA)),),
                  solve=_theta_ckn, derive=_deltas))

_register(Theorem("T11", "Low-pass smoothing into Triebel-Lizorkin-Morrey spaces",
                  ("n", "u", "p", "v", "q", "sigma"),
                  _c("T11", ["u > 1", "u <= p", "p < inf", "v > 1", "v <= q", "q < inf",
                             "u/p <= v/q", "q <= p", "sigma >= 0"]),
                  derive=_derive_t11))
_register(Theorem("T12", "Morrey interpolation inequality",
                  ("n", "u", "p", "mu", "delta", "beta", "sigma", "v", "q", "s"),
                  _c("T12", ["u > 1", "u <= p", "p < inf", "mu >= 1", "mu <= delta", "delta < inf",
                             "beta > 0", "sigma >= 0", "v > 0", "v <= q", "q < inf",
                             "u/p <= mu/delta", "mu/delta <= v/q", ("s > sigma_v", "+"),
                             "p >= max(q, delta)", ("s - n/q > sigma - n/p", "+"),
                             "sigma - n/p == -(1 - theta)*n/delta + theta*(s - n/q)",
                             "theta > 0", "theta < 1"]),
                  solve=_theta_morrey, derive=_derive_t12))
_register(Theorem("SEM", "Embedding between Besov-Morrey spaces (characterization)",
                  ("n", "s1", "s2", "p1", "p2", "u1", "u2", "q1", "q2"),
                  _c("SEM", ["q1 > 0", "q2 > 0", "u1 > 0", "u1 <= p1", "p1 < inf", "u2 > 0", "u2 <= p2",
                             "p2 < inf", "p1 <= p2", "u2/p2 <= u1/p1"]),
                  cases=(("s1 - n/p1 > s2 - n/p2", ()),
                         ("s1 - n/p1 <= s2 - n/p2",
                          _c("SEMeq", ["s1 - n/p1 == s2 - n/p2", "p1 != p2"]))),
                  sharp=True))
_PN_BASE = ["u > 1", "u <= p", "p < inf", "s > 1", "s <= q", "q < inf"]
_register(Theorem("PNi", "Bernstein-type Morrey estimate, interpolated form",
                  ("n", "u", "p", "s", "q", "v"), _c("PNi", _PN_BASE + ["v > 1", "v <= u"]),
                  derive=_derive_pn("i")))
_register(Theorem("PNii", "Bernstein-type Morrey estimate",
                  ("n", "u", "p", "s", "q"), _c("PNii", _PN_BASE + ["u/p <= s/q", "q <= p"]),
                  derive=_derive_pn("ii")))

_E3_COMMON = ["alpha1 > -n/s", "alpha2 > -n/q", "s1 - n/s - alpha1 == s2 - n/q - alpha2"]
_E3_CASES = (("q <= s", _c("E3a", ["alpha2 >= alpha1"])),
             ("s <= q", _c("E3b", ["alpha2 + n/q >= alpha1 + n/s"])))
_register(Theorem("E3B", "Embedding between Herz-type Besov spaces",
                  ("n", "alpha1", "alpha2", "s", "q", "p", "r", "beta", "s1", "s2"),
                  _c("E3B", ["s > 0", "p > 0", "q > 0", "r > 0", "beta > 0"] + _E3_COMMON),
                  cases=_E3_CASES, derive=_derive_e3("B")))
_register(Theorem("E3F", "Embedding between Herz-type Triebel-Lizorkin spaces",
                  ("n", "alpha1", "alpha2", "s", "q", "p", "r", "beta", "s1", "s2"),
                  _c("E3F", ["q > 0", "q < inf", "s > 0", "s < inf", "r > 0", "r <= p", "p < inf",
                             "beta > 0"] + _E3_COMMON),
                  cases=_E3_CASES, derive=_derive_e3("F")))
_register(Theorem("FR", "Franke-type embedding from Triebel-Lizorkin into Besov scale",
                  ("n", "alpha1", "alpha2", "s", "q", "p", "s1", "s2"),
                  _c("FR", ["s > 0", "s < inf", "p > 0", "p < inf", "q > 0", "q < inf"] + _E3_COMMON),
                  cases=(("q < s", _c("FRa", ["alpha2 >= alpha1"])),
                         ("s <= q", _c("FRb", ["alpha2 + n/q > alpha1 + n/s"])))))
_RD = ["p > 0", "q > 0", "beta > 0", "alpha > -n/q", ("s > max(sigma_q, alpha - alpha0)", "+")]
_register(Theorem("RDB", "Herz-type Besov functions are regular distributions",
                  ("n", "alpha", "p", "q", "beta", "s"), _c("RDB", _RD)))
_register(Theorem("RDF", "Herz-type Triebel-Lizorkin functions are regular distributions",
                  ("n", "alpha", "p", "q", "beta", "s"), _c("RDF", _RD + ["p < inf", "q < inf"])))
_register(Theorem("MDB", "Ball-means characterization of Herz-type Besov spaces",
                  ("n", "alpha", "p", "q", "beta", "s", "M"),
                  _c("MDB", ["p > 0", "q > 0", "beta > 0", "alpha > -n/q",
                             ("s > max(sigma_q, alpha - alpha0)", "+"), ("s < M", "-")])))
_register(Theorem("MDF", "Ball-means characterization of Herz-type Triebel-Lizorkin spaces",
                  ("n", "alpha", "p", "q", "beta", "s", "M"),
                  _c("MDF", ["p > 0", "p < inf", "q > 0", "q < inf", "beta > 0", "alpha > -n/q",
                             ("s > max(sigma_qb, alpha - alpha0)", "+"), ("s < M", "-")])))
_register(Theorem("SD", "Sup-difference characterization of Herz-type Besov spaces",
                  ("n", "alpha", "p", "q", "beta", "s", "M"),
                  _c("SD", ["p > 1", "p < inf", "q > 1", "q < inf", "beta >= 1", "alpha > -n/q",
                            ("s > abs(alpha)", "+"), ("s < M", "-")])))
_HERZ_WINDOW = ["p > 1", "p < inf", "q > 1", "q < inf", "alpha > -n/q", "alpha < n - n/q"]
_register(Theorem("HN", "Littlewood-Paley characterization of Herz spaces",
                  ("n", "alpha", "p", "q"), _c("HN", _HERZ_WINDOW)))
_register(Theorem("CO1", "Herz-Bessel potential space equals Herz-type TL space with beta = 2",
                  ("n", "alpha", "p", "q", "s"), _c("CO1", _HERZ_WINDOW)))
_register(Theorem("CO2", "Herz-Sobolev space equals Herz-type TL space with beta = 2",
                  ("n", "alpha", "p", "q", "s"), _c("CO2", _HERZ_WINDOW + ["s >= 0"])))
_register(Theorem("CO3", "Herz space equals Herz-type TL space with s = 0, beta = 2",
                  ("n", "alpha", "p", "q", "s"), _c("CO3", _HERZ_WINDOW + ["s == 0"])))
_register(Theorem("RS", "Riesz-potential splitting of the Herz-Bessel norm",
                  ("n", "alpha", "p", "q", "s"), _c("RS", _HERZ_WINDOW + [("s > 0", "+")])))
_register(Theorem("BS", "Homogeneous splitting of Herz-type Besov and TL norms",
                  ("n", "alpha", "p", "q", "beta", "s"),
                  _c("BS", ["p > 0", "p < inf", "q > 0", "q < inf", "beta > 0", "alpha > -n/q",
                            ("s > max(sigma_q, alpha - n + n/q)", "+")])))
_register(Theorem("MS", "Homogeneous splitting of Besov-Morrey and TL-Morrey norms",
                  ("n", "u", "p", "beta", "s"),
                  _c("MS", ["u > 0", "u <= p", "p < inf", "beta > 0", ("s > sigma_u", "+")])))
_register(Theorem("AUX7", "Nesting of Herz-type Besov and TL spaces",
                  ("n", "alpha", "p", "q", "beta", "s"),
                  _c("AUX7", ["p > 0", "p < inf", "q > 0", "q < inf", "beta > 0", "alpha > -n/q"])))
_register(Theorem("INTERP", "Interpolation inequality between two Herz-type spaces",
                  ("n", "theta", "p0", "q0", "b0", "p1", "q1", "b1"),
                  _c("INTERP", ["theta > 0", "theta < 1", "p0 > 0", "q0 > 0", "b0 > 0",
                                "p1 > 0", "q1 > 0", "b1 > 0"])))
_register(Theorem("HS", "Hardy-Sobolev inequality in Herz form",
                  ("n", "q", "s", "alpha"),
                  _c("HS", ["q > 1", "q <= s", "s < inf", "alpha == n/q - n/s - 1", "alpha > -n/s"]),
                  notes=("alpha > -n/s is inherited from the embedding the inequality rests on",)))
_register(Theorem("CKN", "Classical weighted interpolation inequality with a gradient",
                  ("n", "alpha", "beta", "gamma", "p", "q", "tau"),
                  _c("CKN", ["p >= 1", "p < inf", "q >= 1", "q < inf", "tau > 0",
                             "theta >= 0", "theta <= 1",
                             "gamma > -n/tau", "beta > -n/q", "alpha > -n/p",
                             "gamma + n/tau == theta*(beta + n/q) + (1 - theta)*(alpha - 1 + n/p)"]),
                  solve=_theta_classical,
                  notes=("only the stated ranges and the scaling balance are checked",)))

THEOREM_IDS = tuple(_TABLE)


def theorem(tid: str) -> Theorem:
    try:
        return _TABLE[tid]
    except KeyError:
        raise SpecificationError(f"unknown theorem {tid!r}; known: {', '.join(THEOREM_IDS)}") from None


# ----------------------------------------------------------- certificate


@dataclass(frozen=True)
class Certificate:
    theorem_id: str
    verdict: str
    conditions: tuple
    derived: dict = field(default_factory=dict)
    notes: tuple = ()

    @property
    def admissible(self) -> bool:
        return self.verdict == "admissible"

    def failed(self) -> list:
        return [c for c in self.conditions if not c.satisfied]

    def condition(self, cid: str) -> ConditionResult:
        for c in self.conditions:
            if c.cid == cid:
                return c
        raise KeyError(cid)

    def to_dict(self) -> dict:
        return {
            "theorem_id": self.theorem_id,
            "verdict": self.verdict,
            "conditions": [c.to_dict() for c in self.conditions],
            "derived": {k: (v if isinstance(v, str) else fmt(v)) for k, v in sorted(self.derived.items())},
            "notes": list(self.notes),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "Certificate":
        conds = []
        for c in d["conditions"]:
            _, op, _ = _parse_condition(c["text"]) if not c["text"].startswith("case:") else (None, "case", None)
            res = None if c["residual"] is None else rational(c["residual"])
            conds.append(ConditionResult(c["id"], c["text"], op, c["satisfied"], res))
        derived = {}
        for k, v in d.get("derived", {}).items():
            if v is None:
                derived[k] = None
            else:
                try:
                    derived[k] = rational(v)
                except SpecificationError:
                    derived[k] = v
        return cls(d["theorem_id"], d["verdict"], tuple(conds), derived, tuple(d.get("notes", ())))

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _case_holds(guard: str, env: dict) -> tuple:
    if guard.startswith("space =="):
        want = guard.split("'")[1]
        return env.get("space", "B") == want, None
    res = _evaluate(Condition("guard", guard), env)
    return res.satisfied, res


def check(theorem_id: str, params) -> Certificate:
    """Evaluate a theorem's hypothesis table on a parameter tuple."""
    th = theorem(theorem_id)
    P = params if isinstance(params, ParamTuple) else ParamTuple(params)
    missing = [k for k in th.requires if k not in P]
    if missing:
        raise SpecificationError(f"{theorem_id} needs parameters {missing}")
    env = dict(P.items())
    env.update(_derived_common(P))
    derived = {}
    if th.solve is not None:
        if "theta" in P:
            derived["theta_given"] = P["theta"]
            solved = th.solve(env)
            derived["theta_solved"] = solved
        else:
            solved = th.solve(env)
            derived["theta"] = solved
            if solved is not None:
                env["theta"] = solved
    if th.derive is not None:
        try:
            extra = th.derive(env)
        except (UndefinedValue, ZeroDivisionError, KeyError, TypeError):
            extra = {}
        for k, v in extra.items():
            derived[k] = v
            if v is not None and k not in env:
                env[k] = v
    for k in ("alpha0", "sigma_q", "sigma_pb"):
        if k in env and k not in derived and any(k in c.text for c in th.conditions):
            derived[k] = env[k]
    results = [_evaluate(c, env) for c in th.conditions]
    chosen = None
    for guard, conds in th.cases:
        ok, res = _case_holds(guard, env)
        if ok:
            chosen = (guard, conds, res)
            break
    if chosen is None and th.cases and not th.cases[0][0].startswith("space"):
        chosen = (th.cases[-1][0], th.cases[-1][1], _case_holds(th.cases[-1][0], env)[1])
        chosen = (chosen[0], chosen[1], chosen[2])
    if chosen is not None:
        guard, conds, res = chosen
        if res is not None:
            results.append(ConditionResult(f"{theorem_id}.case", f"case: {guard}", "case", res.satisfied,
                                           res.residual))
        results.extend(_evaluate(c, env) for c in conds)
    verdict = _verdict(results, th.sharp)
    return Certificate(theorem_id, verdict, tuple(results), derived, th.notes)


def _verdict(results: list, sharp: bool) -> str:
    failed = [r for r in results if not r.satisfied and r.op != "case"]
    if not failed:
        return "admissible"
    if not sharp and all(r.boundary for r in failed):
        return "boundary"
    return "inadmissible"


# ------------------------------------------------------- named entry points

CKN_VARIANTS = ("T2i", "T2ii", "T2iii", "T21i", "T21ii", "T21iii", "T3i", "T3ii", "T3iii", "T4", "T5",
                "T41i", "T41ii", "T41iii")


def check_embedding(params, kind: str = "B") -> Certificate:
    """Embedding between Herz-type Besov (``kind="B"``) or TL (``kind="F"``) spaces.

    Here ``s`` is the target integrability and ``s1``, ``s2`` the smoothness
    indices.
    """
    return check("E3" + kind.upper(), params)


def check_franke(params) -> Certificate:
    return check("FR", params)


def check_regularity(params, kind: str = "B") -> Certificate:
    return check("RD" + kind.upper(), params)


def check_ckn(variant: str, params) -> Certificate:
    if variant not in CKN_VARIANTS:
        raise SpecificationError(f"unknown variant {variant!r}; expected one of {CKN_VARIANTS}")
    return check(variant, params)


def check_ckn_morrey(params, which: str = "T12") -> Certificate:
    """Morrey interpolation inequality (``"T12"``) or Besov-Morrey embedding (``"SEM"``)."""
    if which not in ("T12", "SEM"):
        raise SpecificationError("which must be 'T12' or 'SEM'")
    return check(which, params)


def sweep(theorem_id: str, base: dict, axes: dict) -> list:
    """Certificates over the Cartesian product of ``axes`` (name -> list of values), in lexical order."""
    names = sorted(axes)
    out = []
    for combo in itertools.product(*[[rational(v) for v in axes[k]] for k in names]):
        params = dict(base)
        params.update(dict(zip(names, combo)))
        P = ParamTuple(params)
        out.append((P, check(theorem_id, P)))
    return out
