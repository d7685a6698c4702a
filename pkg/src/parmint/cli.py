"""Command-line front end.

    parmint list [FILTER]
    parmint show ID
    parmint eval ID --param l=1
    parmint verify (ID ... | --all) [--checks closed_form,derivative] [--jobs N] [--out FILE]
    parmint sweep ID --param l=0:3:7 [--fixed a=1] [--format csv|json] [--out FILE]

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or load error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import dataclass
from typing import Sequence

from . import verifier
from .catalog import FamilyError, IntegralFamily, Registry, default_registry, load_user_families
from .expr import ParseError, to_text
from .quadrature import ToleranceConfig

ENV_USER_FAMILIES = "PARMINT_USER_FAMILIES"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# --------------------------------------------------------------------------
# JSON with 17 significant digits


def _json(obj) -> str:
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, float):
        if not math.isfinite(obj):
            return "null"
        text = format(obj, ".17g")
        return text if any(c in text for c in ".en") else text + ".0"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj, ensure_ascii=False)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(str(k))}: {_json(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json(v) for v in obj) + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


# --------------------------------------------------------------------------
# records


@dataclass
class ReportRecord:
    family_id: str
    params: dict[str, float]
    quadrature: dict
    closed_form_value: float
    abs_dev: float
    rel_dev: float
    passed: bool

    @classmethod
    def from_point(cls, fam: IntegralFamily, point: dict[str, float], tol: ToleranceConfig) -> "ReportRecord":
        rec = verifier.compare_point(fam, point, tol)
        return cls(fam.id, rec["params"], rec["quadrature"], rec["reference"], rec["abs_dev"],
                   rec["rel_dev"], rec["pass"])

    def as_dict(self) -> dict:
        return {
            "family_id": self.family_id,
            "params": self.params,
            "quadrature": self.quadrature,
            "closed_form_value": self.closed_form_value,
            "abs_dev": self.abs_dev,
            "rel_dev": self.rel_dev,
            "pass": self.passed,
        }


# --------------------------------------------------------------------------
# argument helpers


def _number(text: str, what: str) -> float:
    try:
        return float(text)
    except ValueError:
        raise UsageError(f"{what}: {text!r} is not a number") from None


def _assignment(text: str) -> tuple[str, str]:
    name, sep, value = text.partition("=")
    if not sep or not name.strip() or not value.strip():
        raise UsageError(f"expected NAME=VALUE, got {text!r}")
    return name.strip(), value.strip()


def _assignments(items: Sequence[str] | None) -> dict[str, float]:
    out = {}
    for item in items or ():
        name, value = _assignment(item)
        if name in out:
            raise UsageError(f"parameter {name} given twice")
        out[name] = _number(value, name)
    return out


def _sweep_range(text: str) -> tuple[str, list[float]]:
    name, spec = _assignment(text)
    parts = spec.split(":")
    if len(parts) != 3:
        raise UsageError(f"expected NAME=START:STOP:COUNT, got {text!r}")
    start, stop = _number(parts[0], name), _number(parts[1], name)
    try:
        count = int(parts[2])
    except ValueError:
        raise UsageError(f"count {parts[2]!r} is not an integer") from None
    if count < 2:
        raise UsageError("a sweep needs at least 2 points")
    if start == stop:
        raise UsageError("a sweep needs START != STOP")
    step = (stop - start) / (count - 1)
    return name, [start + i * step for i in range(count - 1)] + [stop]


def _tolerance(args: argparse.Namespace) -> ToleranceConfig:
    base = ToleranceConfig()
    try:
        return ToleranceConfig(
            rel_tol=base.rel_tol if args.rel_tol is None else args.rel_tol,
            abs_tol=base.abs_tol if args.abs_tol is None else args.abs_tol,
            max_depth=base.max_depth if args.max_depth is None else args.max_depth,
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _registry(args: argparse.Namespace) -> Registry:
    registry = default_registry()
    paths = [p for p in os.environ.get(ENV_USER_FAMILIES, "").split(os.pathsep) if p]
    paths += args.user or []
    for path in paths:
        load_user_families(path, registry)
    return registry


def _family(registry: Registry, name: str) -> IntegralFamily:
    try:
        return registry.get(name)
    except KeyError:
        raise UsageError(f"unknown family {name!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    try:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {out}: {exc}") from None


# --------------------------------------------------------------------------
# commands


def _param_names(fam: IntegralFamily) -> str:
    return ",".join(fam.param_names) or "-"


def cmd_list(args, registry: Registry) -> int:
    needle = (args.filter or "").lower()
    for fam in registry:
        haystack = " ".join((fam.id, *fam.aliases, fam.paper_ref)).lower()
        if needle in haystack:
            print(f"{fam.id:<16} {_param_names(fam):<10} {fam.paper_ref}")
    return EXIT_OK


def cmd_show(args, registry: Registry) -> int:
    fam = _family(registry, args.id)
    lines = [
        f"id:          {fam.id}",
        f"aliases:     {', '.join(fam.aliases) or '-'}",
        f"ref:         {fam.paper_ref}",
        f"integral:    int_{to_text(fam.lower)}^{to_text(fam.upper)} {to_text(fam.integrand)} d{fam.var}",
        f"closed form: {fam.closed_form.text}  ({fam.closed_form.kind})",
    ]
    for p in fam.params:
        label = f"  [{p.label}]" if p.label else ""
        grid = ", ".join(f"{v:g}" for v in p.grid)
        lines.append(f"param {p.name}:{label} range {p.range_text()}, grid {grid}")
    for cond in fam.requires:
        lines.append(f"requires:    {cond.text}")
    for ps in fam.patches:
        lines.append(f"patch:       {to_text(ps.point)} -> {to_text(ps.value)} (delta {ps.delta:g})")
    if fam.hints:
        lines.append(f"hints:       {', '.join(h.text for h in fam.hints)}")
    if fam.derivative_params:
        lines.append(f"dparams:     {', '.join(fam.derivative_params)}")
    if fam.notes:
        lines.append(f"note:        {fam.notes}")
    print("\n".join(lines))
    return EXIT_OK


def cmd_eval(args, registry: Registry) -> int:
    fam = _family(registry, args.id)
    record = ReportRecord.from_point(fam, _assignments(args.param), _tolerance(args))
    print(_json(record.as_dict()))
    return EXIT_OK if record.passed else EXIT_FAIL


def cmd_verify(args, registry: Registry) -> int:
    if args.all == bool(args.ids):
        raise UsageError("give family ids or --all (not both)")
    checks = None
    if args.checks:
        checks = [c.strip() for c in args.checks.split(",") if c.strip()]
        bad = sorted(set(checks) - set(verifier.CHECK_KINDS))
        if bad:
            raise UsageError(f"unknown check kind(s) {', '.join(bad)}; choose from {', '.join(verifier.CHECK_KINDS)}")
    if args.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    ids = None
    if not args.all:
        ids = [_family(registry, name).id for name in args.ids]
    reports = verifier.run_suite(ids, checks, _tolerance(args), args.jobs, registry=registry)
    if args.out:
        _emit(_json([r.as_dict() for r in reports]) + "\n", args.out)
    for r in reports:
        mark = "PASS" if r.passed else "FAIL"
        # worst deviation as a fraction of its allowance; 1 is the pass limit
        usage = max((d["abs_dev"] / d["allowed"] if d.get("allowed") else math.inf) for d in r.details)
        print(f"{mark} {r.family_id:<16} {r.check_kind:<18} points={len(r.details):<3} "
              f"max_abs_dev={r.max_abs_dev:.3g} worst/allowed={usage:.3g}")
    passed, failed = verifier.summarize(reports)
    print(f"{passed} passed, {failed} failed")
    return EXIT_OK if failed == 0 else EXIT_FAIL


CSV_COLUMNS = ("param", "quad_value", "quad_error", "closed_form", "abs_dev", "rel_dev")


def cmd_sweep(args, registry: Registry) -> int:
    fam = _family(registry, args.id)
    name, values = _sweep_range(args.param)
    fixed = _assignments(args.fixed)
    if name in fixed:
        raise UsageError(f"{name} is both swept and fixed")
    tol = _tolerance(args)
    records = [ReportRecord.from_point(fam, {**fixed, name: v}, tol) for v in values]
    if args.format == "json":
        text = _json([r.as_dict() for r in records]) + "\n"
    else:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in records:
            writer.writerow([format(x, ".17g") for x in (
                r.params[name], r.quadrature["value"], r.quadrature["error_estimate"],
                r.closed_form_value, r.abs_dev, r.rel_dev)])
        text = buf.getvalue()
    _emit(text, args.out)
    return EXIT_OK if all(r.passed for r in records) else EXIT_FAIL


# --------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rel-tol", type=float, help="relative quadrature tolerance (default 1e-10)")
    common.add_argument("--abs-tol", type=float, help="absolute quadrature tolerance (default 1e-12)")
    common.add_argument("--max-depth", type=int, help="bisection depth limit (default 18)")
    common.add_argument("--user", action="append", metavar="FILE",
                        help=f"load extra families from FILE (repeatable; also ${ENV_USER_FAMILIES})")

    parser = argparse.ArgumentParser(prog="parmint", description="Parametric integrals: evaluate and verify.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("list", parents=[common], help="one line per family")
    p.add_argument("filter", nargs="?", help="substring of id, alias or reference")
    p.set_defaults(run=cmd_list)

    p = sub.add_parser("show", parents=[common], help="details of one family")
    p.add_argument("id")
    p.set_defaults(run=cmd_show)

    p = sub.add_parser("eval", parents=[common], help="quadrature vs closed form at one point (JSON)")
    p.add_argument("id")
    p.add_argument("--param", action="append", metavar="NAME=VALUE", help="parameter binding (repeatable)")
    p.set_defaults(run=cmd_eval)

    p = sub.add_parser("verify", parents=[common], help="run verification checks")
    p.add_argument("ids", nargs="*", metavar="ID")
    p.add_argument("--all", action="store_true", help="every family in the registry")
    p.add_argument("--checks", help=f"comma-separated subset of {','.join(verifier.CHECK_KINDS)}")
    p.add_argument("--jobs", type=int, default=1, help="concurrent checks (default 1)")
    p.add_argument("--out", metavar="FILE", help="write the JSON report array here")
    p.set_defaults(run=cmd_verify)

    p = sub.add_parser("sweep", parents=[common], help="tabulate one parameter")
    p.add_argument("id")
    p.add_argument("--param", required=True, metavar="NAME=START:STOP:COUNT")
    p.add_argument("--fixed", action="append", metavar="NAME=VALUE", help="other bindings (repeatable)")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", metavar="FILE")
    p.set_defaults(run=cmd_sweep)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        registry = _registry(args)
        return args.run(args, registry)
    except (UsageError, FamilyError, ParseError, KeyError) as exc:
        message = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        print(f"parmint: error: {message}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
