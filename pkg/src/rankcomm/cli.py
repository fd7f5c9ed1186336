"""Command-line front end.

Every command builds one JSON report ``{artifact, version, command, config,
result[, log]}``.  Exit codes: 0 success, 1 property violated (the report holds
a witness), 2 guard failure / infeasible / out of budget, 3 usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from . import __version__
from .commutant import MatrixSelector, commutant_dimension, replay_additive_proof, verify_commuting
from .completion import SupportPattern, complete_to_rank, verify_completion
from .errors import BudgetExceeded, GuardFailed, Infeasible, NonConvergence, RankCommError, UnsupportedK
from .field import FieldSpec
from .linmap import (
    MatLinMap,
    NotStandard,
    apply,
    decompose,
    dual_unit,
    example_map,
    from_standard,
    identity_map,
    left_multiplication,
    random_map,
    standard_form,
)
from .matrix import Mat, count_rank, default_budget, enumerate_rank_k, matrix_unit
from .multitrace import (
    NotDecomposable,
    SymMultiMap,
    corner_map,
    decompose_trace,
    power_map,
    random_symmetric,
    replay_trace_proof,
    trace_form_map,
    vandermonde_system,
    verify_trace_commuting,
)

EXIT_OK, EXIT_VIOLATION, EXIT_GUARD, EXIT_USAGE = 0, 1, 2, 3
DEFAULT_SEED = 20240601


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def parse_range(text: str, n: int | None = None) -> list[int]:
    """``"2..3"``, ``"1..n"``, ``"1,3"`` or ``"2"``; ``n`` substitutes the symbol."""
    text = text.replace("n", str(n)) if n is not None else text
    if ".." in text:
        lo, hi = text.split("..")
        return list(range(int(lo), int(hi) + 1))
    return [int(t) for t in text.split(",") if t]


def _mode(args, sampled_name="random"):
    if args.mode == "exhaustive":
        return "exhaustive"
    if sampled_name == "sampled":
        return ("sampled", args.seed)
    return ("random", args.samples, args.seed)


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _unwrap(obj: dict) -> dict:
    """Accept a bare map or a gallery report that carries one."""
    if "result" in obj and isinstance(obj["result"], dict):
        obj = obj["result"]
    return obj.get("map", obj)


def _load_map(args) -> MatLinMap:
    obj = _unwrap(_load_json(args.map))
    if "columns" not in obj:
        raise UsageError(f"{args.map} does not hold a linear map")
    G = MatLinMap.from_json(obj)
    if getattr(args, "field", None) and FieldSpec.parse(args.field) != G.spec:
        raise UsageError(f"--field {args.field} does not match the map's field {G.spec}")
    return G


def _load_sym(args) -> SymMultiMap:
    obj = _unwrap(_load_json(args.map))
    if "coeffs" not in obj:
        raise UsageError(f"{args.map} does not hold a symmetric multilinear map")
    return SymMultiMap.from_json(obj)


# -- commands ----------------------------------------------------------------


def cmd_count(args):
    value = count_rank(args.n, args.k, args.q)
    result = {"n": args.n, "k": args.k, "q": args.q, "count": value}
    if args.enumerate:
        enum = sum(1 for _ in enumerate_rank_k(args.n, args.k, FieldSpec.prime(args.q), args.budget))
        result["enumerated"] = enum
        result["agree"] = enum == value
        return result, None, EXIT_OK if enum == value else EXIT_VIOLATION
    return result, None, EXIT_OK


def cmd_complete(args):
    spec = FieldSpec.parse(args.field)
    pattern = SupportPattern.parse(args.pattern, args.n)
    comp = complete_to_rank(pattern, args.k, spec, _mode(args), args.budget)
    result = comp.to_json()
    if args.verify_fields:
        checks = []
        for f in args.verify_fields.split(","):
            fs = FieldSpec.parse(f)
            checks.append(verify_completion(pattern, comp.B, args.k, fs, "exhaustive", args.budget).to_json())
        result["cross_checks"] = checks
        if not all(c["passed"] for c in checks):
            return result, None, EXIT_VIOLATION
    return result, None, EXIT_OK


def cmd_verify(args):
    G = _load_map(args)
    verdict = verify_commuting(G, MatrixSelector.parse(args.selector), _mode(args), args.budget)
    return verdict.to_json(), None, EXIT_OK if verdict.passed else EXIT_VIOLATION


def cmd_dim(args):
    sel = MatrixSelector.parse(args.selector) if args.selector else MatrixSelector.rank_exact(args.k)
    report = commutant_dimension(args.n, sel, FieldSpec.parse(args.field), _mode(args, "sampled"), args.budget, window=args.window)
    result = report.to_json(include_basis=args.basis)
    ok = report.predicted is None or report.dimension == report.predicted
    return result, None, EXIT_OK if ok and report.standard_contained else EXIT_VIOLATION


def cmd_decompose(args):
    out = decompose(_load_map(args))
    if isinstance(out, NotStandard):
        return out.to_json(), None, EXIT_VIOLATION
    return out.to_json(), None, EXIT_OK


def cmd_replay(args):
    G = _load_map(args)
    rep = replay_additive_proof(G, args.k, args.budget)
    if rep.ok:
        return {"standard_form": rep.outcome.to_json(G.n), "probes": len(rep.log)}, rep.log, EXIT_OK
    return rep.outcome.to_json(), rep.log, EXIT_VIOLATION


def _gallery_map(args):
    spec = FieldSpec.parse(args.field)
    n = args.n
    kind = args.kind
    if kind == "example":
        return example_map(n, spec)
    if kind == "identity":
        return identity_map(n, spec)
    if kind == "standard":
        mu = [spec.zero()] * (n * n)
        for item in filter(None, (args.mu or "").split(",")):
            lbl, _, val = item.partition(":")
            i, j = int(lbl[1]), int(lbl[2:])
            mu = [a + b for a, b in zip(mu, dual_unit(i, j, n, spec, int(val or 1)))]
        return from_standard(standard_form(args.lam, mu, spec), n, spec)
    if kind == "left":
        i, j = (int(t) for t in args.unit.split(","))
        return left_multiplication(matrix_unit(i, j, n, spec))
    if kind == "random":
        return random_map(n, spec, args.seed)
    m = args.m
    if kind == "power":
        return power_map(m, n, spec)
    if kind == "corner":
        return corner_map(n, spec, m)
    if kind == "trace-form":
        return trace_form_map(n, spec)
    if kind == "random-sym":
        return random_symmetric(m, n, spec, args.seed)
    raise UsageError(f"unknown gallery kind {kind}")


def cmd_gallery(args):
    G = _gallery_map(args)
    result = {"kind": args.kind, "map": G.to_json()}
    code = EXIT_OK
    if isinstance(G, SymMultiMap):
        if args.verify:
            verdict = verify_trace_commuting(G, MatrixSelector.parse(args.verify), _mode(args), args.budget)
            result["verification"] = verdict.to_json()
            code = EXIT_OK if verdict.passed else EXIT_VIOLATION
        return result, None, code
    if args.verify:
        verdict = verify_commuting(G, MatrixSelector.parse(args.verify), _mode(args), args.budget)
        result["verification"] = verdict.to_json()
        result["checked"] = verdict.checked
        code = EXIT_OK if verdict.passed else EXIT_VIOLATION
    dec = decompose(G)
    result["decomposition"] = dec.to_json() if isinstance(dec, NotStandard) else dec.to_json(G.n)
    result["image_of_identity"] = apply(G, Mat.identity(G.n, G.spec)).to_json()
    return result, None, code


def _sweep_cell(cell):
    n, k, field, mode, budget, window = cell
    spec = FieldSpec.parse(field)
    out = {"n": n, "k": k, "field": field}
    try:
        rep = commutant_dimension(n, MatrixSelector.rank_exact(k), spec, mode, budget, window=window)
        out.update(rep.to_json())
        out["field"] = field
        out["outside_hypotheses"] = rep.predicted is None
    except RankCommError as exc:
        out["error"] = f"{type(exc).__name__}: {exc}"
    return out


def cmd_sweep(args):
    cells = []
    for n in parse_range(args.n):
        for k in parse_range(args.k, n):
            for f in args.fields.split(","):
                cells.append((n, k, f, _mode(args, "sampled"), args.budget, args.window))
    if args.workers > 1:
        with ProcessPoolExecutor(max_workers=args.workers) as pool:
            rows = list(pool.map(_sweep_cell, cells))
    else:
        rows = [_sweep_cell(c) for c in cells]
    return {"cells": rows}, None, EXIT_OK


def cmd_trace_verify(args):
    G = _load_sym(args)
    verdict = verify_trace_commuting(G, MatrixSelector.parse(args.selector), _mode(args), args.budget)
    return verdict.to_json(), None, EXIT_OK if verdict.passed else EXIT_VIOLATION


def cmd_trace_extract(args):
    G = _load_sym(args)
    pattern = SupportPattern.parse(args.pattern, G.n)
    fill = [int(z) for z in args.fill.split(",")] if args.fill else [1] * pattern.v
    c = pattern.fill(fill, G.spec)
    comp = complete_to_rank(pattern, args.k, G.spec if G.spec.is_prime else FieldSpec.prime(5), budget=args.budget)
    B = Mat(comp.B.data.tolist(), G.spec)
    ts, values, coefs = vandermonde_system(G, c, B)
    result = {
        "pattern": str(pattern),
        "fill": fill,
        "B_support": [list(p) for p in comp.support],
        "nodes": ts,
        "extracted": coefs[0].to_json(),
        "extracted_zero": coefs[0].is_zero(),
    }
    return result, None, EXIT_OK if coefs[0].is_zero() else EXIT_VIOLATION


def cmd_trace_decompose(args):
    out = decompose_trace(_load_sym(args))
    return out.to_json(), None, EXIT_VIOLATION if isinstance(out, NotDecomposable) else EXIT_OK


def cmd_trace_replay(args):
    G = _load_sym(args)
    rep = replay_trace_proof(G, args.k, probe_samples=args.samples, seed=args.seed, budget=args.budget)
    return rep.to_json(), rep.log, EXIT_OK if rep.ok else EXIT_VIOLATION


# -- parser ------------------------------------------------------------------


def _common(p, field=True, mode=True, field_default="p:5"):
    if field:
        p.add_argument("--field", default=field_default, help="p:<prime> or Q")
    if mode:
        p.add_argument("--mode", default="exhaustive", choices=["exhaustive", "random", "sampled"])
        p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--out", default=None)
    p.add_argument("--format", default="json", choices=["json", "text"])
    p.add_argument("--timing", action="store_true", help="add wall-clock time to the report")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="rankcomm", description="Maps commuting on rank-k matrices over exact fields.")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("count", help="number of rank-k matrices over GF(q)")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--enumerate", action="store_true")
    _common(p, field=False, mode=False)
    p.set_defaults(func=cmd_count)

    p = sub.add_parser("complete", help="certified rank-k completion of a support pattern")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--pattern", required=True, help='e.g. "1,1;1,2"')
    p.add_argument("--verify-fields", default=None, help="extra certification fields, e.g. p:7")
    _common(p)
    p.set_defaults(func=cmd_complete)

    p = sub.add_parser("verify", help="check [G(x), x] = 0 on a matrix set")
    p.add_argument("--map", required=True)
    p.add_argument("--selector", required=True, help="rank:<k>, invertible, singular, all")
    _common(p, field_default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("dim", help="dimension of the space of maps commuting on a set")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--selector", default=None)
    p.add_argument("--window", type=int, default=20)
    p.add_argument("--basis", action="store_true")
    _common(p)
    p.set_defaults(func=cmd_dim)

    p = sub.add_parser("decompose", help="standard form lam x + mu(x)")
    p.add_argument("--map", required=True)
    _common(p, field=False, mode=False)
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("replay", help="run the rank-k argument on a map")
    p.add_argument("--map", required=True)
    p.add_argument("--k", type=int, required=True)
    _common(p, field=False, mode=False)
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("gallery", help="emit a named map, optionally verified")
    p.add_argument(
        "kind",
        choices=["example", "identity", "standard", "left", "random", "power", "corner", "trace-form", "random-sym"],
    )
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, default=2)
    p.add_argument("--lam", type=int, default=1)
    p.add_argument("--mu", default=None, help='e.g. "e11:1,e23:2"')
    p.add_argument("--unit", default="1,1")
    p.add_argument("--verify", default=None, help="selector to verify on")
    _common(p)
    p.set_defaults(func=cmd_gallery)

    p = sub.add_parser("sweep", help="commutant dimensions over a grid")
    p.add_argument("--n", required=True, help="e.g. 2..3")
    p.add_argument("--k", required=True, help="e.g. 1..n")
    p.add_argument("--fields", required=True, help="e.g. p:2,p:3,p:5")
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--window", type=int, default=20)
    _common(p, field=False)
    p.set_defaults(func=cmd_sweep)

    tp = sub.add_parser("trace", help="m-additive trace commands")
    tsub = tp.add_subparsers(dest="trace_command", parser_class=_Parser)
    p = tsub.add_parser("verify")
    p.add_argument("--map", required=True)
    p.add_argument("--selector", required=True)
    _common(p, field=False)
    p.set_defaults(func=cmd_trace_verify)
    p = tsub.add_parser("extract")
    p.add_argument("--map", required=True)
    p.add_argument("--pattern", required=True)
    p.add_argument("--fill", default=None)
    p.add_argument("--k", type=int, required=True)
    _common(p, field=False, mode=False)
    p.set_defaults(func=cmd_trace_extract)
    p = tsub.add_parser("decompose")
    p.add_argument("--map", required=True)
    _common(p, field=False, mode=False)
    p.set_defaults(func=cmd_trace_decompose)
    p = tsub.add_parser("replay")
    p.add_argument("--map", required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, default=50)
    _common(p, field=False, mode=False)
    p.set_defaults(func=cmd_trace_replay)
    return parser


def _config(args) -> dict:
    skip = {"func", "out", "format", "timing"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _text(obj, indent=0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict):
        if "cells" in obj:
            return _table(obj["cells"])
        lines = []
        for k, v in obj.items():
            if isinstance(v, (dict, list)) and v and not _is_rows(v):
                lines.append(f"{pad}{k}:")
                lines.append(_text(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {_inline(v)}")
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(_text(v, indent) if isinstance(v, dict) else f"{pad}- {_inline(v)}" for v in obj)
    return f"{pad}{obj}"


def _is_rows(v) -> bool:
    return isinstance(v, list) and all(isinstance(r, list) for r in v)


def _inline(v) -> str:
    if _is_rows(v):
        return " / ".join(" ".join(map(str, r)) for r in v)
    return str(v)


def _table(cells) -> str:
    cols = ["n", "k", "field", "mode", "dimension", "standard_dim", "excess", "predicted", "outside_hypotheses", "error"]
    cols = [c for c in cols if any(c in cell for cell in cells)]
    rows = [[str(cell.get(c, "")) for c in cols] for cell in cells]
    widths = [max(len(c), *(len(r[i]) for r in rows)) for i, c in enumerate(cols)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return "\n".join([fmt.format(*cols)] + [fmt.format(*r) for r in rows])


def run(argv=None) -> tuple[int, dict | None]:
    parser = build_parser()
    args = parser.parse_args(argv)
    if not getattr(args, "func", None):
        parser.print_usage(sys.stderr)
        return EXIT_USAGE, None
    if getattr(args, "budget", None) is None:
        args.budget = default_budget()
    report = {"artifact": "rankcomm", "version": __version__, "command": _command_name(args), "config": _config(args)}
    start = time.perf_counter()
    try:
        result, log, code = args.func(args)
        report["result"] = result
        if log is not None:
            report["log"] = log
    except (GuardFailed, UnsupportedK, Infeasible, BudgetExceeded, NonConvergence) as exc:
        code = EXIT_GUARD
        report["result"] = {"error": type(exc).__name__, "reason": str(exc)}
    except (UsageError, ValueError, RankCommError) as exc:
        sys.stderr.write(f"rankcomm: {exc}\n")
        parser.print_usage(sys.stderr)
        return EXIT_USAGE, None
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 3)
    report["exit_code"] = code
    text = json.dumps(report, indent=2) if args.format == "json" else _text(report)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        sys.stdout.write(text + "\n")
    return code, report


def _command_name(args) -> str:
    if args.command == "trace":
        return f"trace {args.trace_command}"
    return args.command


def main(argv=None):
    code, _ = run(argv)
    raise SystemExit(code)


if __name__ == "__main__":
    main()
