"""Integral families: integrand, bounds, parameters, closed form and hints.

Families are described in a small line-oriented text format, the same for the
builtin table (``data/builtin.fam``) and for user files::

    # comment
    id=eq_2.18
    alias=other_name, another_name
    ref=where the result comes from
    integrand=exp(-b*x)*(1-cos(l*x))/x
    var=x
    lower=0
    upper=inf
    param l in [0,inf) grid 0,0.5,1,2 as λ
    param b in (0,inf) grid 0.5,1,2 as β
    require=b > 0
    closed_form=ln(1+l^2/b^2)/2
    patch 0 -> 0 delta 1e-8
    hint=decay
    dparam=l
    note=free text

Blocks are separated by blank lines.  ``closed_form`` may be piecewise,
``cond -> expr ; cond -> expr``, where the first branch whose condition holds
wins; conditions are chained comparisons such as ``a > b > 0`` joined by
``and``.  Closed forms may use ``si``, ``ci`` and the constant ``catalan``.
Hints: ``singular_lower``, ``singular_upper``, ``decay``,
``oscillatory:sin|cos:OMEGA`` and ``inverse_square:sin|cos:OMEGA`` (a factor
trig(OMEGA/x^2)); OMEGA may depend on the parameters.
"""

from __future__ import annotations

import itertools
import math
import operator
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Iterator, Mapping, NamedTuple

from . import specfun
from .expr import Constant, EvalError, Expr, ParseError, evaluate, free_symbols, lambdify, parse, to_text
from .quadrature import Hints, Integrand, Patch

__all__ = [
    "FamilyError", "FamilyFileError", "ParamSpec", "Condition", "ClosedForm", "PatchSpec",
    "HintSpec", "IntegralFamily", "Instance", "Registry", "builtin_families",
    "default_registry", "parse_families", "load_user_families", "instantiate",
    "closed_form_value",
]

Bindings = Mapping[str, float]

# Constants a closed form may reference besides its parameters.
CONSTANTS = {"catalan": specfun.catalan}


class FamilyError(ValueError):
    """Invalid family definition or invalid parameter bindings."""


class FamilyFileError(FamilyError):
    def __init__(self, message: str, source: str, line: int):
        super().__init__(f"{source}:{line}: {message}")
        self.source = source
        self.line = line


# --------------------------------------------------------------------------
# data model


@dataclass(frozen=True)
class ParamSpec:
    name: str
    lo: float
    hi: float
    lo_closed: bool
    hi_closed: bool
    grid: tuple[float, ...]
    label: str = ""

    def contains(self, v: float) -> bool:
        above = v >= self.lo if self.lo_closed else v > self.lo
        below = v <= self.hi if self.hi_closed else v < self.hi
        return above and below and math.isfinite(v)

    def interior(self, v: float, margin: float = 0.0) -> bool:
        return self.lo + margin < v < self.hi - margin

    def range_text(self) -> str:
        lo = "-inf" if self.lo == -math.inf else f"{self.lo:g}"
        hi = "inf" if self.hi == math.inf else f"{self.hi:g}"
        return f"{'[' if self.lo_closed else '('}{lo},{hi}{']' if self.hi_closed else ')'}"


_COMPARATORS = {
    "<": operator.lt, "<=": operator.le, ">": operator.gt,
    ">=": operator.ge, "==": operator.eq, "!=": operator.ne,
}
_COMPARE_RE = re.compile(r"(<=|>=|==|!=|<|>)")


@dataclass(frozen=True)
class Condition:
    """Conjunction of chained comparisons between expressions."""

    chains: tuple[tuple[tuple[Expr, ...], tuple[str, ...]], ...]
    text: str

    @classmethod
    def parse(cls, text: str) -> "Condition":
        chains = []
        for part in re.split(r"\band\b", text):
            pieces = _COMPARE_RE.split(part)
            if len(pieces) < 3:
                raise FamilyError(f"condition {part.strip()!r} has no comparison")
            operands = tuple(parse(p.strip()) for p in pieces[0::2])
            ops = tuple(pieces[1::2])
            chains.append((operands, ops))
        return cls(tuple(chains), text.strip())

    def symbols(self) -> set[str]:
        return set().union(*(free_symbols(e) for operands, _ in self.chains for e in operands))

    def holds(self, bindings: Bindings) -> bool:
        for operands, ops in self.chains:
            values = [evaluate(e, bindings) for e in operands]
            for op, lhs, rhs in zip(ops, values, values[1:]):
                if not _COMPARATORS[op](lhs, rhs):
                    return False
        return True


@dataclass(frozen=True)
class ClosedForm:
    """A closed-form value: one expression or a list of guarded branches."""

    branches: tuple[tuple[Condition | None, Expr], ...]
    text: str

    @property
    def kind(self) -> str:
        if len(self.branches) > 1 or self.branches[0][0] is not None:
            return "piecewise"
        names = {n for _, e in self.branches for n in _function_names(e)}
        if names & {"si", "ci"}:
            return "uses_si_ci"
        if any("catalan" in free_symbols(e) for _, e in self.branches):
            return "uses_catalan"
        return "expr"

    def symbols(self) -> set[str]:
        out: set[str] = set()
        for cond, e in self.branches:
            out |= free_symbols(e)
            if cond is not None:
                out |= cond.symbols()
        return out

    def branch(self, bindings: Bindings) -> Expr:
        env = _with_constants(bindings)
        for cond, e in self.branches:
            if cond is None or cond.holds(env):
                return e
        raise FamilyError(f"no closed-form branch covers {dict(bindings)}")

    def value(self, bindings: Bindings) -> float:
        return evaluate(self.branch(bindings), _with_constants(bindings))


def _function_names(e: Expr) -> set[str]:
    from .expr import Apply

    out = set()
    stack = [e]
    while stack:
        node = stack.pop()
        if isinstance(node, Apply):
            out.add(node.fn)
        stack.extend(v for v in vars(node).values() if isinstance(v, Expr))
    return out


def _with_constants(bindings: Bindings) -> dict[str, float]:
    env = dict(bindings)
    for name, fn in CONSTANTS.items():
        env.setdefault(name, fn())
    return env


@dataclass(frozen=True)
class PatchSpec:
    point: Expr
    value: Expr
    delta: float = 1e-8


@dataclass(frozen=True)
class HintSpec:
    kind: str  # singular_lower | singular_upper | decay | oscillatory | inverse_square
    trig: str | None = None
    omega: Expr | None = None

    @property
    def text(self) -> str:
        if self.omega is None:
            return self.kind
        return f"{self.kind}:{self.trig}:{to_text(self.omega)}"


class Instance(NamedTuple):
    integrand: Integrand
    lower: float
    upper: float
    hints: Hints


@dataclass(frozen=True)
class IntegralFamily:
    id: str
    integrand: Expr
    var: str
    lower: Expr
    upper: Expr
    params: tuple[ParamSpec, ...]
    closed_form: ClosedForm
    patches: tuple[PatchSpec, ...] = ()
    hints: tuple[HintSpec, ...] = ()
    paper_ref: str = ""
    notes: str = ""
    aliases: tuple[str, ...] = ()
    requires: tuple[Condition, ...] = ()
    derivative_params: tuple[str, ...] = ()

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(p.name for p in self.params)

    def param(self, name: str) -> ParamSpec:
        for p in self.params:
            if p.name == name:
                return p
        raise FamilyError(f"family {self.id} has no parameter {name!r}")

    @property
    def has_moving_bounds(self) -> bool:
        return bool((free_symbols(self.lower) | free_symbols(self.upper)) & set(self.param_names))

    def is_infinite_domain(self, bindings: Bindings | None = None) -> bool:
        lo, hi = self.bounds(bindings or self.default_grid()[0])
        return math.isinf(lo) or math.isinf(hi)

    def is_oscillatory(self) -> bool:
        return any(h.kind in ("oscillatory", "inverse_square") for h in self.hints)

    def default_grid(self) -> list[dict[str, float]]:
        names = self.param_names
        points = []
        for combo in itertools.product(*(p.grid for p in self.params)):
            point = dict(zip(names, combo))
            if all(c.holds(point) for c in self.requires):
                points.append(point)
        return points

    def check_bindings(self, bindings: Bindings) -> dict[str, float]:
        missing = [n for n in self.param_names if n not in bindings]
        if missing:
            raise FamilyError(f"{self.id}: missing binding for {', '.join(missing)}")
        extra = sorted(set(bindings) - set(self.param_names))
        if extra:
            raise FamilyError(f"{self.id}: unknown parameter {', '.join(extra)}")
        point = {n: float(bindings[n]) for n in self.param_names}
        for p in self.params:
            if not p.contains(point[p.name]):
                raise FamilyError(f"{self.id}: {p.name}={point[p.name]:g} outside {p.range_text()}")
        for cond in self.requires:
            if not cond.holds(point):
                raise FamilyError(f"{self.id}: parameters {point} violate {cond.text!r}")
        return point

    def bounds(self, bindings: Bindings) -> tuple[float, float]:
        return evaluate(self.lower, bindings), evaluate(self.upper, bindings)

    def resolve_hints(self, bindings: Bindings) -> Hints:
        kw: dict = {}
        for h in self.hints:
            if h.kind in ("singular_lower", "singular_upper", "decay"):
                kw[h.kind] = True
            else:
                kw[h.kind] = (h.trig, evaluate(h.omega, bindings))
        return Hints(**kw)

    def patches_for(self, bindings: Bindings, *, differentiate: str | None = None) -> list[Patch]:
        """Resolve patches; with ``differentiate`` the values become d/dparam of
        the patch value, and patches at parameter-dependent points are dropped."""
        from .expr import diff

        out = []
        for ps in self.patches:
            value = ps.value
            if differentiate is not None:
                if differentiate in free_symbols(ps.point):
                    continue
                value = diff(value, differentiate)
            out.append(Patch(evaluate(ps.point, bindings), evaluate(value, bindings), ps.delta))
        return out

    def integrand_at(self, bindings: Bindings, expr: Expr | None = None,
                     differentiate: str | None = None) -> Integrand:
        func = lambdify(expr if expr is not None else self.integrand, [self.var], bindings)
        return Integrand(func, self.patches_for(bindings, differentiate=differentiate))

    def instantiate(self, bindings: Bindings) -> Instance:
        point = self.check_bindings(bindings)
        lo, hi = self.bounds(point)
        return Instance(self.integrand_at(point), lo, hi, self.resolve_hints(point))

    def closed_form_value(self, bindings: Bindings) -> float:
        return self.closed_form.value(self.check_bindings(bindings))


# --------------------------------------------------------------------------
# registry


class Registry:
    """Families by id, with alias resolution.  Ids and aliases are unique."""

    def __init__(self, families: Iterable[IntegralFamily] = ()):
        self._families: dict[str, IntegralFamily] = {}
        self._names: dict[str, str] = {}
        self.add(families)

    def add(self, families: Iterable[IntegralFamily]) -> None:
        families = list(families)
        for fam in families:
            for name in (fam.id, *fam.aliases):
                if name in self._names:
                    raise FamilyError(f"duplicate family name {name!r}")
            self._families[fam.id] = fam
            self._names[fam.id] = fam.id
            for alias in fam.aliases:
                self._names[alias] = fam.id

    def resolve(self, name: str) -> str:
        try:
            return self._names[name]
        except KeyError:
            raise KeyError(f"unknown family {name!r}") from None

    def get(self, name: str) -> IntegralFamily:
        return self._families[self.resolve(name)]

    def __contains__(self, name: str) -> bool:
        return name in self._names

    def __iter__(self) -> Iterator[IntegralFamily]:
        return iter(self._families.values())

    def __len__(self) -> int:
        return len(self._families)

    def ids(self) -> list[str]:
        return list(self._families)


# --------------------------------------------------------------------------
# family file format

_PARAM_RE = re.compile(
    r"""param\s+(?P<name>[A-Za-z_]\w*)\s+in\s+
        (?P<open>[\[(])\s*(?P<lo>[^,]+?)\s*,\s*(?P<hi>[^\])]+?)\s*(?P<close>[\])])\s+
        grid\s+(?P<grid>.+?)(?:\s+as\s+(?P<label>\S+))?\s*$""",
    re.VERBOSE,
)
_PATCH_RE = re.compile(r"patch\s+(?P<x>.+?)\s*->\s*(?P<v>.+?)(?:\s+delta\s+(?P<d>\S+))?\s*$")
_KEYS = {"id", "alias", "ref", "integrand", "var", "lower", "upper", "closed_form",
         "hint", "require", "dparam", "note"}
_REQUIRED = ("id", "integrand", "var", "lower", "upper", "closed_form")


def _number(text: str) -> float:
    t = text.strip()
    if t in ("inf", "+inf"):
        return math.inf
    if t == "-inf":
        return -math.inf
    return evaluate(parse(t))


def _bound(text: str) -> Expr:
    t = text.strip()
    if t in ("inf", "+inf", "-inf"):
        return Constant(_number(t))
    return parse(t)


def _blocks(text: str) -> Iterator[list[tuple[int, str]]]:
    block: list[tuple[int, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            if not raw.strip() and block:
                yield block
                block = []
            continue
        block.append((lineno, line))
    if block:
        yield block


def parse_families(text: str, source: str = "<string>") -> list[IntegralFamily]:
    """Parse and validate every family block in ``text``."""
    return [_parse_block(block, source) for block in _blocks(text)]


def _parse_block(block: list[tuple[int, str]], source: str) -> IntegralFamily:
    fields: dict[str, tuple[int, str]] = {}
    multi: dict[str, list[tuple[int, str]]] = {"hint": [], "require": [], "alias": [], "dparam": []}
    params: list[tuple[int, ParamSpec]] = []
    patches: list[tuple[int, PatchSpec]] = []

    def fail(message: str, line: int):
        raise FamilyFileError(message, source, line)

    for lineno, line in block:
        try:
            if line.startswith("param ") or line.startswith("param\t"):
                params.append((lineno, _parse_param(line)))
            elif line.startswith("patch ") or line.startswith("patch\t"):
                patches.append((lineno, _parse_patch(line)))
            else:
                key, sep, value = line.partition("=")
                key = key.strip()
                if not sep or key not in _KEYS:
                    fail(f"unrecognised line {line!r}", lineno)
                if key in multi:
                    multi[key].append((lineno, value.strip()))
                elif key in fields:
                    fail(f"duplicate key {key!r}", lineno)
                else:
                    fields[key] = (lineno, value.strip())
        except (ParseError, EvalError, FamilyError) as exc:
            if isinstance(exc, FamilyFileError):
                raise
            fail(str(exc), lineno)

    first = block[0][0]
    for key in _REQUIRED:
        if key not in fields:
            fail(f"missing required key {key!r}", first)
    fid = fields["id"][1]

    def parsed(key: str, fn):
        lineno, value = fields[key]
        try:
            return fn(value)
        except (ParseError, EvalError, FamilyError) as exc:
            fail(f"family {fid}: field {key}: {exc}", lineno)

    integrand = parsed("integrand", parse)
    lower = parsed("lower", _bound)
    upper = parsed("upper", _bound)
    closed = parsed("closed_form", _parse_closed_form)
    hints = []
    for lineno, value in multi["hint"]:
        for item in value.split(","):
            try:
                hints.append(_parse_hint(item))
            except (ParseError, FamilyError) as exc:
                fail(f"family {fid}: field hint: {exc}", lineno)
    requires = []
    for lineno, value in multi["require"]:
        try:
            requires.append(Condition.parse(value))
        except (ParseError, FamilyError) as exc:
            fail(f"family {fid}: field require: {exc}", lineno)
    aliases = tuple(a.strip() for _, v in multi["alias"] for a in v.split(",") if a.strip())
    dparams = tuple(a.strip() for _, v in multi["dparam"] for a in v.split(",") if a.strip())

    fam = IntegralFamily(
        id=fid,
        integrand=integrand,
        var=fields["var"][1],
        lower=lower,
        upper=upper,
        params=tuple(p for _, p in params),
        closed_form=closed,
        patches=tuple(p for _, p in patches),
        hints=tuple(hints),
        paper_ref=fields.get("ref", (0, ""))[1],
        notes=fields.get("note", (0, ""))[1],
        aliases=aliases,
        requires=tuple(requires),
        derivative_params=dparams,
    )
    try:
        validate_family(fam)
    except FamilyError as exc:
        fail(str(exc), first)
    return fam


def _parse_param(line: str) -> ParamSpec:
    m = _PARAM_RE.match(line)
    if m is None:
        raise FamilyError("expected 'param NAME in (lo,hi) grid v1,v2,...'")
    grid = tuple(_number(v) for v in m["grid"].split(","))
    return ParamSpec(
        name=m["name"],
        lo=_number(m["lo"]),
        hi=_number(m["hi"]),
        lo_closed=m["open"] == "[",
        hi_closed=m["close"] == "]",
        grid=grid,
        label=m["label"] or "",
    )


def _parse_patch(line: str) -> PatchSpec:
    m = _PATCH_RE.match(line)
    if m is None:
        raise FamilyError("expected 'patch X0 -> VALUE [delta D]'")
    delta = float(m["d"]) if m["d"] else 1e-8
    if not delta > 0:
        raise FamilyError("patch delta must be positive")
    return PatchSpec(parse(m["x"]), parse(m["v"]), delta)


def _parse_hint(text: str) -> HintSpec:
    parts = [p.strip() for p in text.strip().split(":")]
    kind = parts[0]
    if kind in ("singular_lower", "singular_upper", "decay") and len(parts) == 1:
        return HintSpec(kind)
    if kind in ("oscillatory", "inverse_square") and len(parts) == 3 and parts[1] in ("sin", "cos"):
        return HintSpec(kind, parts[1], parse(parts[2]))
    raise FamilyError(f"bad hint {text.strip()!r}")


def _parse_closed_form(text: str) -> ClosedForm:
    branches = []
    for part in text.split(";"):
        cond_text, arrow, expr_text = part.rpartition("->")
        cond = Condition.parse(cond_text) if arrow else None
        branches.append((cond, parse(expr_text.strip(), special=True)))
    return ClosedForm(tuple(branches), text)


def validate_family(fam: IntegralFamily) -> None:
    """Enforce symbol scoping, grid membership and instantiability."""
    names = set(fam.param_names)
    where = f"family {fam.id}"
    if not fam.id or not re.fullmatch(r"[\w.\-]+", fam.id):
        raise FamilyError(f"{where}: field id: invalid identifier")
    if len(names) != len(fam.params):
        raise FamilyError(f"{where}: field param: duplicate parameter name")
    if fam.var in names or fam.var in CONSTANTS:
        raise FamilyError(f"{where}: field var: {fam.var!r} clashes with a parameter or constant")

    def scoped(field_name: str, symbols: set[str], allowed: set[str]):
        stray = sorted(symbols - allowed)
        if stray:
            raise FamilyError(f"{where}: field {field_name}: undeclared symbol(s) {', '.join(stray)}")

    scoped("integrand", free_symbols(fam.integrand), names | {fam.var})
    scoped("lower", free_symbols(fam.lower), names)
    scoped("upper", free_symbols(fam.upper), names)
    scoped("closed_form", fam.closed_form.symbols(), names | set(CONSTANTS))
    for ps in fam.patches:
        scoped("patch", free_symbols(ps.point) | free_symbols(ps.value), names)
    for h in fam.hints:
        if h.omega is not None:
            scoped("hint", free_symbols(h.omega), names)
    for cond in fam.requires:
        scoped("require", cond.symbols(), names)
    for d in fam.derivative_params:
        if d not in names:
            raise FamilyError(f"{where}: field dparam: {d!r} is not a parameter")
    for p in fam.params:
        if not p.grid:
            raise FamilyError(f"{where}: field param: {p.name} has an empty grid")
        if not p.lo < p.hi:
            raise FamilyError(f"{where}: field param: {p.name} has an empty range")
        for v in p.grid:
            if not p.contains(v):
                raise FamilyError(f"{where}: field param: grid value {v:g} outside {p.name} range {p.range_text()}")
    grid = fam.default_grid()
    if not grid:
        raise FamilyError(f"{where}: field require: no default grid point satisfies the requirements")
    for point in grid:
        _probe(fam, point)


def _probe(fam: IntegralFamily, point: dict[str, float]) -> None:
    where = f"family {fam.id} at {point}"
    try:
        lo, hi = fam.bounds(point)
    except EvalError as exc:
        raise FamilyError(f"{where}: field lower/upper: {exc}") from None
    if math.isnan(lo) or math.isnan(hi) or lo > hi:
        raise FamilyError(f"{where}: field lower/upper: bounds [{lo}, {hi}] are not ordered")
    try:
        hints = fam.resolve_hints(point)
        integrand = fam.integrand_at(point)
    except EvalError as exc:
        raise FamilyError(f"{where}: {exc}") from None
    del hints
    if lo == hi:
        return
    if math.isfinite(lo) and math.isfinite(hi):
        x = lo + 0.3125 * (hi - lo)
    elif math.isfinite(lo):
        x = lo + 0.6875
    elif math.isfinite(hi):
        x = hi - 0.6875
    else:
        x = 0.3125
    try:
        integrand(x)
    except EvalError as exc:
        raise FamilyError(f"{where}: field integrand: not evaluable at {fam.var}={x:g}: {exc}") from None
    try:
        fam.closed_form.value(point)
    except EvalError as exc:
        raise FamilyError(f"{where}: field closed_form: {exc}") from None


# --------------------------------------------------------------------------
# public entry points

_BUILTIN: list[IntegralFamily] | None = None


def builtin_families() -> list[IntegralFamily]:
    """The builtin table, parsed once and shared (families are immutable)."""
    global _BUILTIN
    if _BUILTIN is None:
        text = resources.files("parmint").joinpath("data/builtin.fam").read_text(encoding="utf-8")
        _BUILTIN = parse_families(text, "builtin.fam")
    return list(_BUILTIN)


def default_registry() -> Registry:
    return Registry(builtin_families())


_DEFAULT: Registry | None = None


def _registry(registry: Registry | None) -> Registry:
    global _DEFAULT
    if registry is not None:
        return registry
    if _DEFAULT is None:
        _DEFAULT = default_registry()
    return _DEFAULT


def load_user_families(path: str | Path, registry: Registry | None = None) -> list[IntegralFamily]:
    """Parse a family file; if ``registry`` is given the families are added to it."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FamilyError(f"cannot read {path}: {exc}") from None
    families = parse_families(text, str(path))
    if registry is not None:
        registry.add(families)
    return families


def instantiate(family: str | IntegralFamily, bindings: Bindings,
                registry: Registry | None = None) -> Instance:
    fam = family if isinstance(family, IntegralFamily) else _registry(registry).get(family)
    return fam.instantiate(bindings)


def closed_form_value(family: str | IntegralFamily, bindings: Bindings,
                      registry: Registry | None = None) -> float:
    fam = family if isinstance(family, IntegralFamily) else _registry(registry).get(family)
    return fam.closed_form_value(bindings)
