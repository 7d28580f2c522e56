"""Command-line entry point ``fsx``.

Subcommands::

    fsx decompose --input f.fsx [--homogeneous] [--blocks-dir DIR]
    fsx norm --space herz --params p.json --input f.fsx [--json]
    fsx admissible --theorem T2i --params '{"n": 1, ...}'
    fsx check --experiment ckn_T2i [--config exp.json] [--out report.json] [--csv rows.csv]
    fsx sweep --theorem T2i --grid sweep.json
    fsx corpus list
    fsx corpus render --kind gaussian --params '{"a": 1}' --grid '{"dim": 1, "K": 4, "N": 4096}' --out f.fsx

``--input`` accepts an FSX1 binary file or a JSON descriptor
``{"corpus": kind, "params": {...}, "grid": {"dim", "K", "N"}}``.
``--params`` and ``--grid`` accept a path to a JSON file or inline JSON.
Exit status is 0 on success, 1 when an assertion or gate fails, 2 on usage
or input errors.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
import warnings

import numpy as np

from . import admissibility as adm
from . import harness
from .corpus import KINDS, TestFunction, default_corpus, load_descriptor, render
from .differences import DifferenceConfig, besov_diff_norm, besov_supdiff_norm, tl_diff_norm
from .errors import FsxError, GatedError
from .lattice import MAGIC, Grid, from_bytes, write_fsx
from .quasinorms import (HerzParams, MorreyParams, RegimeWarning, SmoothnessParams, bessel_potential_norm,
                         besov_morrey_norm, herz_besov_norm, herz_norm, herz_tl_norm, lebesgue_norm, morrey_norm,
                         sobolev_herz_norm, tl_morrey_norm, weighted_lp_norm)
from .spectral import DyadicSystem

SPACES = ("lebesgue", "herz", "wlp", "morrey", "kb", "kf", "nm", "em", "bessel", "sobolev",
          "kb-diff", "kf-diff", "kb-supdiff")


def _json_arg(text: str):
    if os.path.exists(text):
        with open(text) as fh:
            return json.load(fh)
    return json.loads(text)


def _load_input(path: str):
    with open(path, "rb") as fh:
        data = fh.read()
    if data[:4] == MAGIC:
        return from_bytes(data)
    return load_descriptor(data.decode())


def _write_json(obj, out: str | None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_decompose(a) -> int:
    f = _load_input(a.input)
    sys_ = DyadicSystem.for_grid(f.grid)
    blocks = sys_.blocks(f, a.homogeneous)
    out = {"grid": f.grid.to_dict(), "homogeneous": a.homogeneous,
           "truncation": sys_.truncation(f, a.homogeneous), "blocks": []}
    if a.blocks_dir:
        os.makedirs(a.blocks_dir, exist_ok=True)
    for j, vals in blocks:
        energy = float(np.sqrt(np.sum(np.abs(vals) ** 2) * f.grid.cell_volume))
        entry = {"j": j, "l2": energy}
        if a.blocks_dir:
            path = os.path.join(a.blocks_dir, f"block_{j:+d}.fsx")
            write_fsx(f.with_values(vals), path)
            entry["file"] = path
        out["blocks"].append(entry)
    _write_json(out, a.out)
    return 0


def _p(params, key, default=None):
    if key in params:
        return float(adm.rational(params[key]))
    if default is None:
        raise FsxError(f"missing parameter {key!r}")
    return default


def _norm_value(f, space: str, P: dict, homogeneous: bool):
    hp = lambda: HerzParams(_p(P, "alpha", 0.0), _p(P, "p"), _p(P, "q"))
    sp = lambda: SmoothnessParams(_p(P, "s", 0.0), _p(P, "beta", float("inf")))
    mp = lambda: MorreyParams(_p(P, "u"), _p(P, "p"))
    sys_ = DyadicSystem.for_grid(f.grid)
    cfg = lambda: DifferenceConfig(M=int(_p(P, "M", 2.0)))
    table = {
        "lebesgue": lambda: lebesgue_norm(f, _p(P, "p")),
        "herz": lambda: herz_norm(f, hp()),
        "wlp": lambda: weighted_lp_norm(f, _p(P, "alpha", 0.0), _p(P, "p")),
        "morrey": lambda: morrey_norm(f, mp()),
        "kb": lambda: herz_besov_norm(f, hp(), sp(), sys_, homogeneous),
        "kf": lambda: herz_tl_norm(f, hp(), sp(), sys_, homogeneous),
        "nm": lambda: besov_morrey_norm(f, mp(), sp(), sys_, homogeneous),
        "em": lambda: tl_morrey_norm(f, mp(), sp(), sys_, homogeneous),
        "bessel": lambda: bessel_potential_norm(f, hp(), _p(P, "s")),
        "sobolev": lambda: sobolev_herz_norm(f, hp(), int(_p(P, "m"))),
        "kb-diff": lambda: besov_diff_norm(f, hp(), sp(), cfg()),
        "kf-diff": lambda: tl_diff_norm(f, hp(), sp(), cfg()),
        "kb-supdiff": lambda: besov_supdiff_norm(f, hp(), sp(), int(_p(P, "M", 2.0))),
    }
    return table[space]()


def _cmd_norm(a) -> int:
    f = _load_input(a.input)
    P = _json_arg(a.params) if a.params else {}
    if a.M is not None:
        P["M"] = str(a.M)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", RegimeWarning)
        nv = _norm_value(f, a.space, P, a.homogeneous)
    notes = sorted({str(w.message) for w in caught if issubclass(w.category, RegimeWarning)})
    if a.json:
        _write_json({"space": a.space, "params": P, "value": nv.value,
                     "truncation_diag": nv.truncation_diag, "warnings": notes}, None)
    else:
        print(repr(nv.value))
        for n in notes:
            print(f"warning: {n}", file=sys.stderr)
    return 0


def _cmd_admissible(a) -> int:
    cert = adm.check(a.theorem, _json_arg(a.params))
    _write_json(cert.to_dict(), a.out)
    return 0 if cert.admissible else 1


def _cmd_check(a) -> int:
    if a.config:
        cfg = _json_arg(a.config)
        cfg.setdefault("inequality_id", a.experiment)
        if a.experiment and cfg["inequality_id"] != a.experiment:
            raise FsxError(f"config is for {cfg['inequality_id']!r}, not {a.experiment!r}")
        exp = harness.Experiment.from_dict(cfg)
    else:
        exp = harness.preset(a.experiment)
    try:
        report = harness.run_inequality(exp)
    except GatedError as exc:
        print(f"gated: {exc}", file=sys.stderr)
        if exc.certificate is not None:
            _write_json({"gated": True, "certificate": exc.certificate.to_dict()}, a.out)
        return 1
    data = harness.emit_report(report, "json")
    if a.out:
        with open(a.out, "wb") as fh:
            fh.write(data)
    if a.csv:
        with open(a.csv, "wb") as fh:
            fh.write(harness.emit_report(report, "csv"))
    for item in report.assertions:
        print(f"{'PASS' if item['passed'] else 'FAIL'} {item['name']}: {item['detail']}")
    return 0 if report.passed else 1


def _cmd_sweep(a) -> int:
    spec = _json_arg(a.grid)
    results = adm.sweep(a.theorem, spec.get("base", {}), spec.get("axes", {}))
    rows = [{"params": P.to_dict(), "verdict": c.verdict,
             "failed": [r.cid for r in c.failed()],
             "derived": {k: (v if isinstance(v, str) else adm.fmt(v)) for k, v in sorted(c.derived.items())}}
            for P, c in results]
    counts = {}
    for r in rows:
        counts[r["verdict"]] = counts.get(r["verdict"], 0) + 1
    _write_json({"theorem_id": a.theorem, "counts": counts, "results": rows}, a.out)
    return 0


def _cmd_corpus(a) -> int:
    if a.corpus_cmd == "list":
        for kind in KINDS:
            print(kind)
        print()
        for dim in (1, 2):
            for tf in default_corpus(dim):
                print(f"default[{dim}] {tf.name}")
        return 0
    params = _json_arg(a.params) if a.params else {}
    tf = TestFunction.from_dict({"kind": a.kind, "params": params})
    grid = Grid.from_dict(_json_arg(a.grid)) if a.grid else Grid.default(1)
    write_fsx(render(tf, grid), a.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fsx", description="Herz- and Morrey-type function space toolkit")
    sub = ap.add_subparsers(dest="cmd", required=True)

    d = sub.add_parser("decompose", help="Littlewood-Paley block energies")
    d.add_argument("--input", required=True)
    d.add_argument("--homogeneous", action="store_true")
    d.add_argument("--blocks-dir")
    d.add_argument("--out")
    d.set_defaults(func=_cmd_decompose)

    n = sub.add_parser("norm", help="evaluate one quasi-norm")
    n.add_argument("--space", required=True, choices=SPACES)
    n.add_argument("--params")
    n.add_argument("--input", required=True)
    n.add_argument("--M", type=int)
    n.add_argument("--homogeneous", action="store_true")
    n.add_argument("--json", action="store_true")
    n.set_defaults(func=_cmd_norm)

    c = sub.add_parser("admissible", help="hypothesis certificate for a parameter tuple")
    c.add_argument("--theorem", required=True, choices=adm.THEOREM_IDS)
    c.add_argument("--params", required=True)
    c.add_argument("--out")
    c.set_defaults(func=_cmd_admissible)

    k = sub.add_parser("check", help="run an inequality experiment")
    k.add_argument("--experiment", required=True, choices=harness.INEQUALITY_IDS)
    k.add_argument("--config")
    k.add_argument("--out")
    k.add_argument("--csv")
    k.set_defaults(func=_cmd_check)

    s = sub.add_parser("sweep", help="certificates over a rational parameter grid")
    s.add_argument("--theorem", required=True, choices=adm.THEOREM_IDS)
    s.add_argument("--grid", required=True)
    s.add_argument("--out")
    s.set_defaults(func=_cmd_sweep)

    cp = sub.add_parser("corpus", help="list or render corpus functions")
    csub = cp.add_subparsers(dest="corpus_cmd", required=True)
    csub.add_parser("list")
    r = csub.add_parser("render")
    r.add_argument("--kind", required=True, choices=KINDS)
    r.add_argument("--params")
    r.add_argument("--grid")
    r.add_argument("--out", required=True)
    cp.set_defaults(func=_cmd_corpus)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (FsxError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
