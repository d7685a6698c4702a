"""Sine and cosine integrals, Catalan's constant, the Gaussian constant and
Frullani integrals.

Conventions follow the tail-integral definitions

    si(x) = -int_x^inf sin(t)/t dt,     ci(x) = -int_x^inf cos(t)/t dt,

so ``si(x) = Si(x) - pi/2`` and ``ci`` is the usual Ci.  Both are computed by
quadrature alone; no Euler-Mascheroni constant is involved.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Callable

from .quadrature import (
    DEFAULT_TOLERANCE, EPS, Integrand, Patch, QuadratureResult, Status, ToleranceConfig, WynnEpsilon,
    integrate_exp_sinh, integrate_finite, integrate_oscillatory,
)

__all__ = [
    "SpecialValue", "si", "si_value", "ci", "ci_value", "catalan", "catalan_value",
    "GAUSSIAN", "frullani", "frullani_check", "FrullaniCheck",
]

# si/ci are evaluated well beyond the default closed-form tolerance so they
# never dominate a comparison.
_SPECIAL_TOL = ToleranceConfig(rel_tol=1e-13, abs_tol=1e-15)


@dataclass(frozen=True)
class SpecialValue:
    value: float
    method: str  # "series", "quadrature" or "constant"
    error_bound: float


GAUSSIAN = SpecialValue(0.5 * math.sqrt(math.pi), "constant", EPS)
"""int_0^inf exp(-x^2) dx = sqrt(pi)/2."""


def _sinc(t: float) -> float:
    return math.sin(t) / t


def _require_positive(x: float, name: str) -> None:
    if not (isinstance(x, (int, float)) and x > 0 and math.isfinite(x)):
        raise ValueError(f"{name}(x) needs finite x > 0, got {x!r}")


@functools.lru_cache(maxsize=4096)
def si_value(x: float) -> SpecialValue:
    _require_positive(x, "si")
    sinc = Integrand(_sinc, [Patch(0.0, 1.0, 1e-12)])
    r = integrate_finite(sinc, 0.0, float(x), _SPECIAL_TOL)
    return SpecialValue(r.value - 0.5 * math.pi, "quadrature", r.error_estimate + EPS)


def si(x: float) -> float:
    """si(x) = -pi/2 + int_0^x sin(t)/t dt for x > 0."""
    return si_value(float(x)).value


def _cos_over_t(t: float) -> float:
    return math.cos(t) / t


@functools.lru_cache(maxsize=4096)
def ci_value(x: float) -> SpecialValue:
    _require_positive(x, "ci")
    x = float(x)
    x0 = max(x, 1.0)
    err = 0.0
    head = 0.0
    if x < x0:
        r = integrate_finite(_cos_over_t, x, x0, _SPECIAL_TOL)
        head, err = r.value, r.error_estimate
    tail = integrate_oscillatory(lambda t: 1.0 / t, x0, 1.0, "cos", _SPECIAL_TOL)
    return SpecialValue(-(head + tail.value), "quadrature", err + tail.error_estimate + EPS)


def ci(x: float) -> float:
    """ci(x) = -int_x^inf cos(t)/t dt for x > 0."""
    return ci_value(float(x)).value


def catalan_estimates(terms: int = 24) -> list[float]:
    """Epsilon-accelerated partial sums of sum_n (-1)^n / (2n+1)^2."""
    wynn = WynnEpsilon()
    partial = 0.0
    for n in range(terms):
        partial += (-1.0) ** n / (2 * n + 1) ** 2
        wynn.add(partial)
    return list(wynn.estimates)


@functools.lru_cache(maxsize=1)
def catalan_value() -> SpecialValue:
    est = catalan_estimates()
    bound = max(abs(est[-1] - est[-2]), abs(est[-1] - est[-3]), 4 * EPS)
    return SpecialValue(est[-1], "series", bound)


def catalan() -> float:
    """Catalan's constant G = 1 - 1/9 + 1/25 - ..."""
    return catalan_value().value


def _require_scales(a: float, b: float) -> None:
    if not (a > 0 and b > 0):
        raise ValueError(f"Frullani scales must be positive, got a={a!r}, b={b!r}")


def frullani(f: Callable[[float], float], f0: float, finf: float, a: float, b: float,
             tol: ToleranceConfig = DEFAULT_TOLERANCE) -> float:
    """int_0^inf (f(ax) - f(bx))/x dx by the closed formula (f0 - finf) ln(b/a).

    ``f`` is accepted for signature symmetry with :func:`frullani_check`; the
    formula needs only the limits.
    """
    _require_scales(a, b)
    return (f0 - finf) * math.log(b / a)


@dataclass(frozen=True)
class FrullaniCheck:
    formula: float
    quadrature: QuadratureResult
    abs_dev: float


def frullani_check(f: Callable[[float], float], f0: float, finf: float, a: float, b: float,
                   tol: ToleranceConfig = DEFAULT_TOLERANCE) -> FrullaniCheck:
    """Compare the Frullani formula with direct quadrature of (f(ax) - f(bx))/x."""
    formula = frullani(f, f0, finf, a, b, tol)
    if a == b:
        return FrullaniCheck(formula, QuadratureResult(0.0, 0.0, 1, Status.CONVERGED), abs(formula))

    def g(x: float) -> float:
        return (f(a * x) - f(b * x)) / x

    r = integrate_exp_sinh(g, 0.0, tol)
    return FrullaniCheck(formula, r, abs(r.value - formula))

