"""Numerical checks of closed forms, differentiation under the integral sign,
moving-limit (Leibniz) derivatives, ODE residuals, Frullani structure, the
cosine-series oracle for ln(1 - 2a cos x + a^2) and cross-family identities.

Every check returns a :class:`CheckReport`.  Derivatives are always taken by
central differences of *quadrature* values, never of the closed form, so a
derivative check is independent of the catalog's closed-form entry.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, Mapping, Sequence

from . import catalog, specfun
from .catalog import FamilyError, IntegralFamily, Registry
from .expr import EvalError, Expr, diff, evaluate, free_symbols, parse
from .quadrature import (
    DEFAULT_TOLERANCE, QuadratureResult, Status, ToleranceConfig, integrate_auto, integrate_finite,
)

__all__ = [
    "CHECK_KINDS", "CheckReport", "OdeSpec", "OdeCase", "Identity", "Term", "QuadratureCache",
    "check_closed_form", "check_derivative", "check_leibniz", "check_ode_residual",
    "check_frullani", "check_series_oracle_236", "check_identity", "compare_point",
    "closed_form_tolerance", "run_suite", "summarize", "ODE_CASES", "FRULLANI", "IDENTITIES",
]

CHECK_KINDS = (
    "closed_form", "derivative", "leibniz", "ode_residual", "frullani", "series_oracle",
    "reduction_identity",
)

Bindings = Mapping[str, float]

ABS_FLOOR = 1e-10
REL_FINITE = 1e-8
REL_INFINITE = 1e-7
REL_DERIVATIVE = 1e-5
ODE_TOLERANCE = 1e-4
IDENTITY_TOLERANCE = 1e-8


@dataclass
class CheckReport:
    family_id: str
    check_kind: str
    grid: list[dict[str, float]]
    max_abs_dev: float
    max_rel_dev: float
    worst_point: dict[str, float]
    passed: bool
    details: list[dict] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "family_id": self.family_id,
            "check_kind": self.check_kind,
            "grid": self.grid,
            "max_abs_dev": self.max_abs_dev,
            "max_rel_dev": self.max_rel_dev,
            "worst_point": self.worst_point,
            "pass": self.passed,
            "details": self.details,
        }


def _rel(dev: float, ref: float) -> float:
    return dev / max(1e-300, abs(ref))


def _record(params: Bindings, value: float, reference: float, rel_tol: float, abs_tol: float,
            ok: bool = True, **extra) -> dict:
    dev = abs(value - reference)
    if math.isnan(dev):
        dev = math.inf
    allowed = max(rel_tol * abs(reference), abs_tol)
    return {
        "params": dict(params),
        "value": value,
        "reference": reference,
        "abs_dev": dev,
        "rel_dev": _rel(dev, reference),
        "allowed": allowed,
        "pass": bool(ok and dev <= allowed),
        **extra,
    }


def _build(family_id: str, kind: str, records: list[dict]) -> CheckReport:
    if not records:
        raise ValueError(f"{family_id}: {kind} check has an empty grid")
    worst = max(records, key=lambda r: r["abs_dev"])
    grid: list[dict[str, float]] = []
    for r in records:
        if r["params"] not in grid:
            grid.append(r["params"])
    return CheckReport(
        family_id=family_id,
        check_kind=kind,
        grid=grid,
        max_abs_dev=worst["abs_dev"],
        max_rel_dev=max(r["rel_dev"] for r in records),
        worst_point=dict(worst["params"]),
        passed=all(r["pass"] for r in records),
        details=records,
    )


# --------------------------------------------------------------------------
# quadrature cache


class QuadratureCache:
    """Quadrature results keyed by (family, integrand variant, bindings, tolerance).

    Lookups and inserts take a lock; the computation itself runs outside it,
    so two threads may occasionally compute the same entry (the results are
    identical and either may be kept).
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._data: dict[tuple, QuadratureResult] = {}
        self.hits = 0
        self.misses = 0

    def get(self, key: tuple, compute: Callable[[], QuadratureResult]) -> QuadratureResult:
        with self._lock:
            hit = self._data.get(key)
            if hit is not None:
                self.hits += 1
                return hit
            self.misses += 1
        result = compute()
        with self._lock:
            return self._data.setdefault(key, result)

    def __len__(self) -> int:
        with self._lock:
            return len(self._data)


def _key(bindings: Bindings) -> tuple:
    return tuple(sorted((k, float(v)) for k, v in bindings.items()))


def _quad(fam: IntegralFamily, bindings: Bindings, tol: ToleranceConfig,
          cache: QuadratureCache | None, differentiate: str | None = None) -> QuadratureResult:
    def compute() -> QuadratureResult:
        point = fam.check_bindings(bindings)
        lo, hi = fam.bounds(point)
        if differentiate is None:
            f = fam.integrand_at(point)
        else:
            f = fam.integrand_at(point, diff(fam.integrand, differentiate), differentiate)
        return integrate_auto(f, lo, hi, fam.resolve_hints(point), tol)

    if cache is None:
        return compute()
    return cache.get((fam.id, differentiate, _key(bindings), tol), compute)


def _fd_tolerance(tol: ToleranceConfig, order: int = 1) -> ToleranceConfig:
    # differencing divides quadrature noise by h (or h^2), so tighten well below it
    rel = 1e-12 if order == 1 else 1e-13
    return replace(tol, rel_tol=min(tol.rel_tol, rel), abs_tol=min(tol.abs_tol, 1e-13))


def _family(family: str | IntegralFamily, registry: Registry | None) -> IntegralFamily:
    if isinstance(family, IntegralFamily):
        return family
    return (registry or _default_registry()).get(family)


_REGISTRY: Registry | None = None


def _default_registry() -> Registry:
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = catalog.default_registry()
    return _REGISTRY


# --------------------------------------------------------------------------
# closed form


def closed_form_tolerance(fam: IntegralFamily, bindings: Bindings) -> tuple[float, float]:
    """(rel, abs) tolerance for comparing quadrature with the closed form."""
    lo, hi = fam.bounds(bindings)
    wide = math.isinf(lo) or math.isinf(hi) or fam.is_oscillatory()
    return (REL_INFINITE if wide else REL_FINITE), ABS_FLOOR


def compare_point(fam: IntegralFamily, bindings: Bindings, tol: ToleranceConfig = DEFAULT_TOLERANCE,
                  cache: QuadratureCache | None = None) -> dict:
    """Quadrature against closed form at one point; the record the CLI reports."""
    point = fam.check_bindings(bindings)
    q = _quad(fam, point, tol, cache)
    cf = fam.closed_form_value(point)
    rel, abs_tol = closed_form_tolerance(fam, point)
    rec = _record(point, q.value, cf, rel, abs_tol, ok=q.converged, quadrature=q.as_dict())
    return rec


def check_closed_form(family: str | IntegralFamily, grid: Sequence[Bindings] | None = None,
                      tol: ToleranceConfig = DEFAULT_TOLERANCE, *, registry: Registry | None = None,
                      cache: QuadratureCache | None = None) -> CheckReport:
    fam = _family(family, registry)
    grid = fam.default_grid() if grid is None else grid
    return _build(fam.id, "closed_form", [compare_point(fam, p, tol, cache) for p in grid])


# --------------------------------------------------------------------------
# derivatives


def _shifted(bindings: Bindings, name: str, delta: float) -> dict[str, float]:
    out = dict(bindings)
    out[name] = bindings[name] + delta
    return out


def _fd_grid(fam: IntegralFamily, param: str, order: int) -> list[dict[str, float]]:
    """Default-grid points where the stencil stays inside the valid range."""
    spec = fam.param(param)
    out = []
    for point in fam.default_grid():
        v = point[param]
        reach = 2 * ToleranceConfig.fd_step(v, order)
        try:
            for d in (-reach, reach):
                fam.check_bindings(_shifted(point, param, d))
        except FamilyError:
            continue
        if spec.interior(v, reach):
            out.append(point)
    return out


def _params_of(fam: IntegralFamily, param: str | Sequence[str] | None) -> list[str]:
    if param is None:
        names = list(fam.derivative_params)
    elif isinstance(param, str):
        names = [param]
    else:
        names = list(param)
    for name in names:
        fam.param(name)
    return names


def _central_difference(fam, point, param, tol, cache) -> tuple[float, bool, float]:
    h = ToleranceConfig.fd_step(point[param], 1)
    up = _quad(fam, _shifted(point, param, h), tol, cache)
    down = _quad(fam, _shifted(point, param, -h), tol, cache)
    ok = up.status is not Status.EVALUATION_FAULT and down.status is not Status.EVALUATION_FAULT
    return (up.value - down.value) / (2 * h), ok, h


def check_derivative(family: str | IntegralFamily, param: str | Sequence[str] | None = None,
                     grid: Sequence[Bindings] | None = None,
                     tol: ToleranceConfig = DEFAULT_TOLERANCE, *, rel: float = REL_DERIVATIVE,
                     registry: Registry | None = None,
                     cache: QuadratureCache | None = None) -> CheckReport:
    """d/dparam of quadrature (central difference) against quadrature of the
    differentiated integrand.  ``param`` may name several parameters (default:
    the family's ``dparam`` list); each gets its own records."""
    fam = _family(family, registry)
    if fam.has_moving_bounds:
        raise ValueError(f"{fam.id} has parameter-dependent limits; use check_leibniz")
    fd_tol = _fd_tolerance(tol)
    records = []
    for name in _params_of(fam, param):
        points = _fd_grid(fam, name, 1) if grid is None else grid
        for point in points:
            point = fam.check_bindings(point)
            fd, ok, h = _central_difference(fam, point, name, fd_tol, cache)
            d = _quad(fam, point, tol, cache, differentiate=name)
            records.append(_record(point, fd, d.value, rel, ABS_FLOOR * 100, ok=ok and d.converged,
                                   param=name, step=h, quadrature=d.as_dict()))
    return _build(fam.id, "derivative", records)


def _bound_term(fam: IntegralFamily, point: dict[str, float], bound: Expr, param: str) -> float:
    """f(param, bound) * d(bound)/d(param); zero when the bound does not move."""
    if param not in free_symbols(bound):
        return 0.0
    slope = evaluate(diff(bound, param), point)
    if slope == 0.0:
        return 0.0
    x = evaluate(bound, point)
    value = fam.integrand_at(point)(x)
    if not math.isfinite(value):
        raise EvalError(f"integrand is not finite at the moving limit x={x:g}")
    return value * slope


def check_leibniz(family: str | IntegralFamily, param: str | None = None,
                  grid: Sequence[Bindings] | None = None,
                  tol: ToleranceConfig = DEFAULT_TOLERANCE, *, rel: float = REL_DERIVATIVE,
                  registry: Registry | None = None,
                  cache: QuadratureCache | None = None) -> CheckReport:
    """Moving-limit derivative:

        F'(a) = int_phi^psi df/da dx + f(a, psi) psi' - f(a, phi) phi'

    Each record also notes which sign of the lower-limit term matches the
    difference quotient (``"minus"`` is the rule as written above).
    """
    fam = _family(family, registry)
    names = _params_of(fam, param)
    fd_tol = _fd_tolerance(tol)
    records = []
    for name in names:
        points = _fd_grid(fam, name, 1) if grid is None else grid
        for point in points:
            point = fam.check_bindings(point)
            fd, ok, h = _central_difference(fam, point, name, fd_tol, cache)
            inner = _quad(fam, point, fd_tol, cache, differentiate=name)
            try:
                upper = _bound_term(fam, point, fam.upper, name)
                lower = _bound_term(fam, point, fam.lower, name)
            except EvalError as exc:
                records.append({
                    "params": point, "value": fd, "reference": math.nan, "abs_dev": math.inf,
                    "rel_dev": math.inf, "allowed": 0.0, "pass": False, "param": name,
                    "inapplicable": str(exc),
                })
                continue
            minus = inner.value + upper - lower
            plus = inner.value + upper + lower
            allowed = lambda ref: max(rel * abs(ref), ABS_FLOOR * 100)  # noqa: E731
            if abs(fd - minus) <= allowed(minus):
                sign = "minus"
            elif abs(fd - plus) <= allowed(plus):
                sign = "plus"
            else:
                sign = "neither"
            records.append(_record(
                point, fd, minus, rel, ABS_FLOOR * 100, ok=ok and inner.status is not Status.EVALUATION_FAULT,
                param=name, step=h, interior=inner.value, upper_term=upper, lower_term=-lower,
                boundary_sign=sign,
            ))
    return _build(fam.id, "leibniz", records)


# --------------------------------------------------------------------------
# ODE residuals

_F_SYMBOLS = ("F0", "F1", "F2")
_G_SYMBOLS = ("G0", "G1", "G2")


@dataclass(frozen=True)
class OdeSpec:
    """Residual of an ODE in the family value F (F0 = F, F1 = F', F2 = F'').

    ``partner`` names a second family evaluated at the same bindings; its
    value and derivatives are G0, G1, G2 (used for coupled systems such as
    U'' = 4V, V'' = -4U, or relations like F' = -G).
    """

    order: int
    residual: Expr
    tolerance: float = ODE_TOLERANCE
    partner: str | None = None

    def __post_init__(self):
        if self.order not in (1, 2):
            raise ValueError("ODE order must be 1 or 2")
        used = free_symbols(self.residual)
        if self.order == 1 and ({"F2", "G2"} & used):
            raise ValueError("a first-order residual may not use F2 or G2")
        if self.partner is None and (set(_G_SYMBOLS) & used):
            raise ValueError("G0, G1, G2 need a partner family")

    @classmethod
    def parse(cls, order: int, text: str, tolerance: float = ODE_TOLERANCE,
              partner: str | None = None) -> "OdeSpec":
        return cls(order, parse(text), tolerance, partner)

    def check_symbols(self, params: Iterable[str]) -> None:
        allowed = set(_F_SYMBOLS) | set(params)
        if self.partner is not None:
            allowed |= set(_G_SYMBOLS)
        stray = free_symbols(self.residual) - allowed
        if stray:
            raise ValueError(f"ODE residual uses undeclared symbol(s) {', '.join(sorted(stray))}")


@dataclass(frozen=True)
class OdeCase:
    param: str
    spec: OdeSpec
    grid: tuple[Mapping[str, float], ...]


def _stencil(fam, point, param, tol, cache) -> tuple[float, float, float, bool]:
    """F, F' (3-point) and F'' (5-point) from quadrature at p, p+-h, p+-2h."""
    h = ToleranceConfig.fd_step(point[param], 2)
    vals = {}
    ok = True
    for k in (-2, -1, 0, 1, 2):
        r = _quad(fam, _shifted(point, param, k * h) if k else point, tol, cache)
        ok = ok and r.status is not Status.EVALUATION_FAULT
        vals[k] = r.value
    f1 = (vals[1] - vals[-1]) / (2 * h)
    f2 = (-vals[2] + 16 * vals[1] - 30 * vals[0] + 16 * vals[-1] - vals[-2]) / (12 * h * h)
    return vals[0], f1, f2, ok


def check_ode_residual(family: str | IntegralFamily, param: str, spec: OdeSpec,
                       grid: Sequence[Bindings], tol: ToleranceConfig = DEFAULT_TOLERANCE, *,
                       registry: Registry | None = None,
                       cache: QuadratureCache | None = None) -> CheckReport:
    fam = _family(family, registry)
    fam.param(param)
    spec.check_symbols(fam.param_names)
    partner = _family(spec.partner, registry) if spec.partner else None
    fd_tol = _fd_tolerance(tol, 2)
    records = []
    for point in grid:
        point = fam.check_bindings(point)
        env = dict(point)
        f0, f1, f2, ok = _stencil(fam, point, param, fd_tol, cache)
        env.update(F0=f0, F1=f1, F2=f2)
        if partner is not None:
            g0, g1, g2, ok_g = _stencil(partner, point, param, fd_tol, cache)
            env.update(G0=g0, G1=g1, G2=g2)
            ok = ok and ok_g
        residual = evaluate(spec.residual, env)
        rec = _record(point, residual, 0.0, 0.0, spec.tolerance, ok=ok, param=param,
                      residual_text=_residual_text(spec), F=[f0, f1, f2])
        records.append(rec)
    return _build(fam.id, "ode_residual", records)


def _residual_text(spec: OdeSpec) -> str:
    from .expr import to_text

    return to_text(spec.residual) + (f" (G = {spec.partner})" if spec.partner else "")


def _grid(**axes: Sequence[float]) -> tuple[dict[str, float], ...]:
    import itertools

    names = list(axes)
    return tuple(dict(zip(names, combo)) for combo in itertools.product(*axes.values()))


ODE_CASES: dict[str, tuple[OdeCase, ...]] = {
    "eq_3.2": (
        OdeCase("l", OdeSpec.parse(2, "F2 - a^2*F0"), _grid(l=(0.5, 1, 2), a=(1, 2))),
        OdeCase("l", OdeSpec.parse(1, "F1 + G0", partner="eq_3.3"), _grid(l=(0.5, 1, 2), a=(1,))),
    ),
    "laplace_F": (
        OdeCase("s", OdeSpec.parse(2, "F2 + a^2*F0 - 1/s"), _grid(s=(0.5, 1, 2), a=(1, 2))),
        OdeCase("s", OdeSpec.parse(1, "F1 + G0", partner="laplace_G"), _grid(s=(0.5, 1, 2), a=(1,))),
    ),
    "gauss_cos": (
        OdeCase("x", OdeSpec.parse(1, "F1 + 2*x*F0"), _grid(x=(0, 0.5, 1, 2))),
    ),
    "hecke": (
        OdeCase("a", OdeSpec.parse(1, "F1 + F0/sqrt(a)"), _grid(a=(0.5, 1, 2))),
    ),
    "fresnel_U": (
        OdeCase("a", OdeSpec.parse(2, "F2 - 4*G0", partner="fresnel_V"), _grid(a=(0.25, 0.5, 1))),
    ),
    "fresnel_V": (
        OdeCase("a", OdeSpec.parse(2, "F2 + 4*G0", partner="fresnel_U"), _grid(a=(0.25, 0.5, 1))),
    ),
}


def _check_ode_cases(fam: IntegralFamily, tol, registry, cache) -> CheckReport:
    records = []
    for case in ODE_CASES[fam.id]:
        records += check_ode_residual(fam, case.param, case.spec, case.grid, tol,
                                      registry=registry, cache=cache).details
    return _build(fam.id, "ode_residual", records)


# --------------------------------------------------------------------------
# Frullani


@dataclass(frozen=True)
class FrullaniCase:
    f: Callable[[float], float]
    f0: float
    finf: float
    scales: Callable[[Bindings], tuple[float, float]]


def _exp_minus(t: float) -> float:
    return math.exp(-t)


FRULLANI: dict[str, FrullaniCase] = {
    "eq_1.12": FrullaniCase(_exp_minus, 1.0, 0.0, lambda p: (p["a"], p["b"])),
    "eq_2.5": FrullaniCase(_exp_minus, 1.0, 0.0, lambda p: (p["a"] + 1.0, 1.0)),
}


def check_frullani(family: str | IntegralFamily, grid: Sequence[Bindings] | None = None,
                   tol: ToleranceConfig = DEFAULT_TOLERANCE, *, registry: Registry | None = None,
                   cache: QuadratureCache | None = None) -> CheckReport:
    """Family quadrature against (f(0) - f(inf)) ln(b/a) for its Frullani form."""
    fam = _family(family, registry)
    case = FRULLANI[fam.id]
    grid = fam.default_grid() if grid is None else grid
    records = []
    for point in grid:
        point = fam.check_bindings(point)
        a, b = case.scales(point)
        q = _quad(fam, point, tol, cache)
        direct = specfun.frullani_check(case.f, case.f0, case.finf, a, b, tol)
        records.append(_record(point, q.value, direct.formula, REL_INFINITE, ABS_FLOOR,
                               ok=q.converged, scales=[a, b], direct_quadrature=direct.quadrature.value,
                               direct_abs_dev=direct.abs_dev))
    return _build(fam.id, "frullani", records)


# --------------------------------------------------------------------------
# series oracle for ln(1 - 2a cos x + a^2) on [0, pi]

SERIES_FAMILY = "eq_2.36"


def _series_integral(alpha: float, terms: int) -> tuple[float, float]:
    """int_0^pi of -2 sum_{k<=terms} alpha^k cos(kx)/k, term by term; also the
    largest single-term integral."""
    total = 0.0
    largest = 0.0
    for k in range(1, terms + 1):
        r = integrate_finite(lambda x, k=k: math.cos(k * x), 0.0, math.pi)
        term = -2.0 * alpha ** k / k * r.value
        largest = max(largest, abs(term))
        total += term
    return total, largest


def check_series_oracle_236(alpha_grid: Sequence[float] | None = None, terms: int = 40,
                            tol: float = REL_INFINITE, *, quad_tol: ToleranceConfig = DEFAULT_TOLERANCE,
                            registry: Registry | None = None,
                            cache: QuadratureCache | None = None) -> CheckReport:
    """For |a| < 1 the cosine series integrates to 0 term by term and the
    quadrature must vanish (absolute ``tol``); for |a| > 1, factoring out a^2
    leaves the same series in 1/a, so the quadrature must equal pi ln(a^2)
    (relative ``tol``)."""
    fam = _family(SERIES_FAMILY, registry)
    if alpha_grid is None:
        alpha_grid = sorted({p["a"] for p in fam.default_grid()})
    records = []
    for alpha in alpha_grid:
        if abs(alpha) == 1.0:
            raise ValueError("the series oracle needs |a| != 1")
        point = {"a": float(alpha), "b": 1.0}
        q = _quad(fam, point, quad_tol, cache)
        inner = alpha if abs(alpha) < 1 else 1.0 / alpha
        series, largest = _series_integral(inner, terms)
        tail = 2.0 * math.pi * abs(inner) ** (terms + 1) / ((terms + 1) * (1.0 - abs(inner)))
        if abs(alpha) < 1:
            reference = 0.0
        else:
            reference = math.pi * math.log(alpha * alpha)
        expected = reference + series
        records.append(_record(point, q.value, expected, tol, tol if abs(alpha) < 1 else ABS_FLOOR,
                               ok=q.converged and abs(series) <= tol, series_integral=series,
                               largest_term_integral=largest, truncation_bound=tail))
    return _build(fam.id, "series_oracle", records)


# --------------------------------------------------------------------------
# identities between families


@dataclass(frozen=True)
class Term:
    """coef * (quadrature or closed form of ``family``) at bindings given as
    expressions in the identity's own grid variables."""

    coef: float
    family: str
    params: Mapping[str, str]
    source: str = "quadrature"  # or "closed_form"


@dataclass(frozen=True)
class Identity:
    name: str
    family_id: str
    grid: tuple[Mapping[str, float], ...]
    lhs: tuple[Term, ...]
    rhs: tuple[Term, ...] = ()
    rhs_expr: str | None = None
    tolerance: float = IDENTITY_TOLERANCE


def _term_value(term: Term, point: Bindings, tol, registry, cache) -> tuple[float, bool]:
    fam = _family(term.family, registry)
    bindings = {k: evaluate(parse(v), point) for k, v in term.params.items()}
    if term.source == "closed_form":
        return term.coef * fam.closed_form_value(bindings), True
    r = _quad(fam, bindings, tol, cache)
    return term.coef * r.value, r.converged


def check_identity(identity: Identity, tol: ToleranceConfig = DEFAULT_TOLERANCE, *,
                   registry: Registry | None = None, cache: QuadratureCache | None = None) -> CheckReport:
    records = []
    for point in identity.grid:
        ok = True
        sides = []
        for terms in (identity.lhs, identity.rhs):
            total = 0.0
            for t in terms:
                v, good = _term_value(t, point, tol, registry, cache)
                total += v
                ok = ok and good
            sides.append(total)
        lhs, rhs = sides
        if identity.rhs_expr is not None:
            rhs += evaluate(parse(identity.rhs_expr), point)
        records.append(_record(point, lhs, rhs, identity.tolerance, identity.tolerance, ok=ok,
                               identity=identity.name))
    return _build(identity.family_id, "reduction_identity", records)


IDENTITIES: tuple[Identity, ...] = (
    Identity("(x^a-x^b)/ln x splits into two (x^a-1)/ln x integrals", "eq_2.4",
             _grid(a=(0, 1, 3), b=(0, 1, 3)),
             (Term(1, "eq_2.4", {"a": "a", "b": "b"}),),
             (Term(1, "eq_2.2", {"a": "a"}), Term(-1, "eq_2.2", {"a": "b"}))),
    Identity("Frullani form of (x^a-1)/ln x", "eq_2.5", _grid(a=(0, 0.5, 1, 2)),
             (Term(1, "eq_2.5", {"a": "a"}),), (Term(-1, "eq_2.2", {"a": "a"}),)),
    Identity("exchanging the exponential and cosine kernels", "eq_2.19",
             _grid(l=(0.5, 1, 2), b=(0.5, 1, 2)),
             (Term(1, "eq_2.19", {"l": "l", "b": "b"}),), (Term(1, "eq_2.18", {"l": "l", "b": "b"}),)),
    Identity("difference of two companion integrals", "GR_3.951.3",
             _grid(l=(0, 0.5, 2), m=(0.5, 1, 2), b=(1, 2)),
             (Term(1, "GR_3.951.3", {"l": "l", "m": "m", "b": "b"}),),
             (Term(1, "eq_2.19", {"l": "m", "b": "b"}), Term(-1, "eq_2.19", {"l": "l", "b": "b"}))),
    Identity("symmetry under l <-> m (quadrature)", "eq_2.17", ({"l": 1, "m": 2}, {"l": 2, "m": 1}, {"l": 0.5, "m": 3}),
             (Term(1, "eq_2.17", {"l": "l", "m": "m"}),), (Term(1, "eq_2.17", {"l": "m", "m": "l"}),),
             tolerance=1e-9),
    Identity("symmetry under l <-> m (closed form)", "eq_2.17", ({"l": 1, "m": 2}, {"l": 2, "m": 1}, {"l": 0.5, "m": 3}),
             (Term(1, "eq_2.17", {"l": "l", "m": "m"}, "closed_form"),),
             (Term(1, "eq_2.17", {"l": "m", "m": "l"}, "closed_form"),), tolerance=1e-9),
    Identity("log form equals twice the arctangent form", "eq_2.10", _grid(l=(0.5, 1, 2)),
             (Term(1, "eq_2.10", {"l": "l"}),), (Term(2, "eq_2.12", {"l": "l"}),)),
    Identity("twice the arctangent form equals pi ln(1+l)", "eq_2.10", _grid(l=(0.5, 1, 2)),
             (Term(2, "eq_2.12", {"l": "l"}),), rhs_expr="pi*ln(1+l)"),
    Identity("l = 1 case of the log form", "eq_2.11_l1", ({},),
             (Term(1, "eq_2.11_l1", {}),), (Term(1, "eq_2.10", {"l": "1"}),)),
    Identity("l = 1 case of the arctangent form", "eq_2.14", ({},),
             (Term(1, "eq_2.14", {}),), (Term(1, "eq_2.12", {"l": "1"}),)),
    Identity("integration-by-parts pair on [0, 1]", "eq_1.9", ({},),
             (Term(1, "eq_1.9", {}), Term(1, "eq_1.9_atan", {})), rhs_expr="pi/4*ln(2)"),
    Identity("fixed and moving limit forms agree at a = 1", "eq_4.1", ({},),
             (Term(1, "eq_4.1", {"a": "1"}),), (Term(1, "eq_2.9", {}),)),
    Identity("complementary integrals sum to pi^2/4", "eq_4.3", ({},),
             (Term(1, "eq_2.9", {}), Term(1, "eq_4.3", {})), rhs_expr="pi^2/4"),
    Identity("symmetric form at b = 1 is the one-parameter form", "eq_2.36",
             _grid(a=(-3, -1.5, -0.5, 0, 0.5, 0.9, 1.5, 3)),
             (Term(1, "eq_2.36", {"a": "a", "b": "1"}),), (Term(1, "eq_2.34", {"a": "a"}),)),
)


# --------------------------------------------------------------------------
# suite


def _tasks(fam: IntegralFamily, kinds: set[str]) -> list[tuple[str, Callable[..., CheckReport]]]:
    out: list[tuple[str, Callable[..., CheckReport]]] = []
    if "closed_form" in kinds:
        out.append(("closed_form", lambda tol, reg, c: check_closed_form(fam, None, tol, registry=reg, cache=c)))
    if fam.derivative_params:
        if fam.has_moving_bounds and "leibniz" in kinds:
            out.append(("leibniz", lambda tol, reg, c: check_leibniz(fam, None, None, tol, registry=reg, cache=c)))
        elif not fam.has_moving_bounds and "derivative" in kinds:
            out.append(("derivative", lambda tol, reg, c: check_derivative(fam, None, None, tol, registry=reg, cache=c)))
    if "ode_residual" in kinds and fam.id in ODE_CASES:
        out.append(("ode_residual", lambda tol, reg, c: _check_ode_cases(fam, tol, reg, c)))
    if "frullani" in kinds and fam.id in FRULLANI:
        out.append(("frullani", lambda tol, reg, c: check_frullani(fam, None, tol, registry=reg, cache=c)))
    if "series_oracle" in kinds and fam.id == SERIES_FAMILY:
        out.append(("series_oracle", lambda tol, reg, c: check_series_oracle_236(quad_tol=tol, registry=reg, cache=c)))
    if "reduction_identity" in kinds:
        mine = [i for i in IDENTITIES if i.family_id == fam.id]
        if mine:
            def identities(tol, reg, c, mine=mine):
                records = []
                for ident in mine:
                    records += check_identity(ident, tol, registry=reg, cache=c).details
                return _build(fam.id, "reduction_identity", records)

            out.append(("reduction_identity", identities))
    return out


def run_suite(family_ids: Iterable[str] | None = None, checks: Iterable[str] | None = None,
              tol: ToleranceConfig = DEFAULT_TOLERANCE, jobs: int = 1, *,
              registry: Registry | None = None, cache: QuadratureCache | None = None) -> list[CheckReport]:
    """Run the selected checks; ``family_ids=None`` means every family.

    Reports come back sorted by (family id, check kind) whatever the degree
    of parallelism.  Unknown ids raise KeyError before anything runs.
    """
    registry = registry or _default_registry()
    kinds = set(CHECK_KINDS if checks is None else checks)
    unknown = kinds - set(CHECK_KINDS)
    if unknown:
        raise ValueError(f"unknown check kind(s): {', '.join(sorted(unknown))}")
    if family_ids is None:
        families = list(registry)
    else:
        families = []
        for name in family_ids:
            fam = registry.get(name)
            if fam not in families:
                families.append(fam)
    if jobs < 1:
        raise ValueError("jobs must be at least 1")
    cache = cache if cache is not None else QuadratureCache()
    tasks = [t for fam in families for t in _tasks(fam, kinds)]

    def run(task):
        kind, fn = task
        return fn(tol, registry, cache)

    if jobs == 1:
        reports = [run(t) for t in tasks]
    else:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            reports = list(pool.map(run, tasks))
    return sorted(reports, key=lambda r: (r.family_id, r.check_kind))


def summarize(reports: Iterable[CheckReport]) -> tuple[int, int]:
    """(passed, failed) counts."""
    reports = list(reports)
    passed = sum(r.passed for r in reports)
    return passed, len(reports) - passed
