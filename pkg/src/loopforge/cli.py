"""Command-line front end: build, bracket, verify, derive, spectrum."""
from __future__ import annotations

import argparse
import json
import sys
from typing import Sequence

from .errors import DomainError, MarginError, ParseError, StructuralError, WindowError
from .exact import as_q, q_str
from .forms import FormSpec, extended_bracket
from .loops import TAGS, LoopType, build
from .matrices import DiagExt
from .verify import (
    SUITES,
    StructureTable,
    VerificationReport,
    ad_spectrum,
    check_center,
    check_lie_torus,
    check_datum_matches,
    solve_diagonal_derivations,
    spectrum_obstruction,
    suite_forms,
    suite_jacobi,
    suite_rootdatum,
    unit_target,
)

SCHEMA = "loopforge/1"
GUARD = 6

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_WINDOW = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "table"), default="json")
    common.add_argument("--no-guard", action="store_true", help="lift the rank/window <= 6 guard")

    algebra = argparse.ArgumentParser(add_help=False)
    algebra.add_argument("--type", dest="tag", choices=TAGS, required=True)
    algebra.add_argument("--rank", type=int, default=2)
    algebra.add_argument("--window", type=int, default=3)

    form = argparse.ArgumentParser(add_help=False)
    form.add_argument("--trace-scale", default="1")
    form.add_argument("--psi0-iota", default="1")
    form.add_argument("--dd", default="0")

    p = argparse.ArgumentParser(prog="loopforge", description="Exact computations in locally loop and locally affine Lie algebras.")
    sub = p.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", parents=[common, algebra], help="graded dimension table")
    b.add_argument("--variant", choices=("core", "max", "full"), default="core")

    br = sub.add_parser("bracket", parents=[common, algebra, form], help="extended bracket of two element files")
    br.add_argument("x")
    br.add_argument("y")

    v = sub.add_parser("verify", parents=[common, form], help="run verification suites")
    v.add_argument("suite", choices=SUITES + ("all",))
    v.add_argument("--type", dest="tag", choices=TAGS)
    v.add_argument("--rank", type=int, default=2)
    v.add_argument("--window", type=int, default=3)
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--trials", type=int, default=100)
    v.add_argument("--inject-fault", action="store_true", help="corrupt one structure constant (torus suite)")

    d = sub.add_parser("derive", parents=[common, algebra], help="solve diagonal derivations of one degree")
    d.add_argument("--degree", type=int, default=0)
    d.add_argument("--margin", type=int)

    s = sub.add_parser("spectrum", parents=[common], help="ad-spectrum of p + d0 and the obstruction verdict")
    s.add_argument("p", help="DiagExt JSON file, or - for the zero diagonal")
    s.add_argument("--rank", type=int, default=4)
    s.add_argument("--target", action="append", default=[], help="i,j[,k] for e_ij (x) t^k")
    s.add_argument("--scan", action="store_true", help="all e_ij (x) t^0 with i != j")
    s.add_argument("--a-max", type=int, default=12)
    s.add_argument("--scaled", action="store_true", help="use eigenvalues a(k + p_i - p_j)")
    return p


def _guard(args, rank: int | None, window: int | None):
    if args.no_guard:
        return
    if rank is not None and rank > GUARD:
        raise UsageError(f"rank {rank} exceeds the guard {GUARD}; pass --no-guard to override")
    if window is not None and window > GUARD:
        raise UsageError(f"window {window} exceeds the guard {GUARD}; pass --no-guard to override")


def _spec(args) -> FormSpec:
    try:
        return FormSpec.make(as_q(args.trace_scale), as_q(args.psi0_iota), as_q(args.dd))
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _load_json(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ParseError(f"cannot read {path}: {exc}") from exc


def _lt(args, **kw) -> LoopType:
    _guard(args, args.rank, args.window)
    try:
        return LoopType(args.tag, args.rank, args.window, **kw)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


# commands ------------------------------------------------------------------------

def cmd_build(args) -> tuple[dict, int]:
    L = build(_lt(args, variant=args.variant))
    out = L.summary()
    out["extension"] = {"c": 1, "d0": 1}
    return out, EXIT_OK


def cmd_bracket(args) -> tuple[dict, int]:
    L = build(_lt(args))
    spec = _spec(args)
    x = L.element_from_json(_load_json(args.x))
    y = L.element_from_json(_load_json(args.y))
    for e in (x, y):
        bad = [k for k in e.body if not L.in_window(k)]
        if bad:
            raise WindowError(bad, L.window)
        if not L.contains(e):
            raise ParseError("element does not lie in the algebra")
    z = extended_bracket(L, spec, x, y)
    return {"algebra": L.type.to_json(), "form": spec.to_json(), "result": L.element_to_json(z)}, EXIT_OK


def run_suite(name: str, L, spec: FormSpec, seed: int, trials: int, inject: bool = False) -> VerificationReport:
    if name == "torus":
        table = StructureTable(L)
        if inject:
            corrupt_table(table)
        rep = VerificationReport("torus")
        rep.extend(check_lie_torus(table))
        rep.extend(check_datum_matches(L), "datum ")
        return rep
    if name == "forms":
        return suite_forms(L, spec, seed, trials)
    if name == "jacobi":
        return suite_jacobi(L, spec)
    if name == "center":
        return check_center(L, spec)
    raise UsageError(f"unknown suite {name!r}")


def corrupt_table(table: StructureTable):
    """Send [x, y] for the first pair of root vectors to a wrongly graded element."""
    L = table.L
    roots = [i for i, b in enumerate(L.basis) if not b.weight.is_zero() and b.degree == 0]
    x, y = roots[0], roots[1]
    wrong = next(i for i, b in enumerate(L.basis) if b.weight == L.basis[x].weight and b.degree == 0)
    table.corrupt(x, y, {wrong: 1})


def cmd_verify(args) -> tuple[dict, int]:
    spec = _spec(args)
    suites = list(SUITES) if args.suite == "all" else [args.suite]
    reports = []
    for name in sorted(suites):
        if name == "rootdatum":
            reports.append(suite_rootdatum())
            continue
        if args.tag is None:
            raise UsageError(f"suite {name} needs --type")
        L = build(_lt(args))
        reports.append(run_suite(name, L, spec, args.seed, args.trials, args.inject_fault))
    passed = all(r.passed for r in reports)
    out = {"passed": passed, "suites": [r.to_json() for r in reports]}
    if args.tag:
        out = {"algebra": LoopType(args.tag, args.rank, args.window).to_json(), **out}
    return out, EXIT_OK if passed else EXIT_FAIL


def cmd_derive(args) -> tuple[dict, int]:
    L = build(_lt(args))
    try:
        res = solve_diagonal_derivations(L, args.degree, args.margin)
    except MarginError as exc:
        raise UsageError(str(exc)) from exc
    return res.to_json(), EXIT_OK if res.report.passed else EXIT_FAIL


def _parse_target(text: str):
    try:
        parts = [int(t) for t in text.split(",")]
    except ValueError as exc:
        raise ParseError(f"bad target {text!r}") from exc
    if len(parts) not in (2, 3):
        raise ParseError(f"bad target {text!r}; expected i,j or i,j,k")
    return parts[0], parts[1], parts[2] if len(parts) == 3 else 0


def cmd_spectrum(args) -> tuple[dict, int]:
    _guard(args, None, None)
    p = DiagExt() if args.p == "-" else DiagExt.from_json(_load_json(args.p))
    n = args.rank
    targets = [_parse_target(t) for t in args.target]
    if args.scan or not targets:
        targets += [(i, j, 0) for i in range(1, n + 1) for j in range(1, n + 1) if i != j]
    for i, j, _ in targets:
        if not (1 <= i <= n and 1 <= j <= n):
            raise ParseError(f"target e{i},{j} outside rank {n}")
    values = ad_spectrum(p, [unit_target(i, j, k) for i, j, k in targets])
    rows = [{"target": f"e{i},{j}@t^{k}", "eigenvalue": q_str(v)} for (i, j, k), v in zip(targets, values)]
    verdict = spectrum_obstruction(p, n, args.a_max, args.scaled)
    return {"p": p.to_json(), "rank": n, "eigenvalues": rows, "obstruction": verdict}, EXIT_OK


COMMANDS = {"build": cmd_build, "bracket": cmd_bracket, "verify": cmd_verify,
            "derive": cmd_derive, "spectrum": cmd_spectrum}


# output ----------------------------------------------------------------------------

def _table(data, indent: int = 0) -> list[str]:
    pad = "  " * indent
    lines = []
    if isinstance(data, dict):
        for k, v in data.items():
            if isinstance(v, (dict, list)) and v:
                lines.append(f"{pad}{k}:")
                lines.extend(_table(v, indent + 1))
            else:
                lines.append(f"{pad}{k}: {v}")
    elif isinstance(data, list):
        for v in data:
            if isinstance(v, dict) and "name" in v and "status" in v:
                extra = f"  ({v['detail']})" if v.get("detail") else ""
                lines.append(f"{pad}[{v['status'].upper()}] {v['name']}{extra}")
                if v.get("witness"):
                    lines.append(f"{pad}    witness: {json.dumps(v['witness'], sort_keys=False)}")
            elif isinstance(v, (dict, list)):
                lines.append(f"{pad}-")
                lines.extend(_table(v, indent + 1))
            else:
                lines.append(f"{pad}- {v}")
    else:
        lines.append(f"{pad}{data}")
    return lines


def _build_table(doc: dict) -> list[str]:
    alg = doc["algebra"]
    lines = [f"schema: {doc['schema']}",
             f"{alg['type']} rank {alg['rank']} window {alg['window']}  ({doc['universe']['kind']} universe)",
             f"{'degree':>6}  {'dim':>4}  weights"]
    for row in doc["degrees"]:
        ws = ", ".join(f"{w}:{c}" if c > 1 else w for w, c in row["weights"].items())
        lines.append(f"{row['degree']:>6}  {row['dim']:>4}  {ws}")
    lines.append(f"total {doc['total_dim']} (+ c, d0 at degree 0)")
    return lines


def emit(payload: dict, fmt: str, stream=None):
    stream = stream or sys.stdout
    doc = {"schema": SCHEMA, **payload}
    if fmt == "json":
        stream.write(json.dumps(doc, indent=2) + "\n")
    elif doc.get("command") == "build":
        stream.write("\n".join(_build_table(doc)) + "\n")
    else:
        stream.write("\n".join(_table(doc)) + "\n")


def main(argv: Sequence[str] | None = None) -> int:
    parser = _parser()
    args = parser.parse_args(argv)
    fmt = getattr(args, "format", "json")
    try:
        payload, code = COMMANDS[args.command](args)
    except WindowError as exc:
        emit({"error": "window", "message": str(exc), "degrees": sorted(set(exc.degrees)), "window": exc.window}, fmt)
        return EXIT_WINDOW
    except (UsageError, ParseError) as exc:
        emit({"error": "usage", "message": str(exc)}, fmt, sys.stderr)
        return EXIT_USAGE
    except (DomainError, StructuralError) as exc:
        emit({"error": "usage", "message": str(exc)}, fmt, sys.stderr)
        return EXIT_USAGE
    emit({"command": args.command, **payload}, fmt)
    return code


if __name__ == "__main__":
    sys.exit(main())
