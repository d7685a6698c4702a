"""One-dimensional quadrature for proper, singular, semi-infinite and
oscillatory integrals.

Kernels
-------
integrate_finite       adaptive Gauss-Kronrod (7/15) with global bisection
integrate_tanh_sinh    double-exponential rule for endpoint singularities
integrate_exp_sinh     double-exponential rule for [a, inf) with decay
integrate_oscillatory  half-period cells + Wynn epsilon acceleration
integrate_auto         dispatch on bounds and hints

Every kernel returns a :class:`QuadratureResult`; none of them raises on
non-convergence or on an integrand fault, the status field says what happened.
"""

from __future__ import annotations

import enum
import heapq
import math
import sys
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

from .expr import EvalError

__all__ = [
    "Status", "QuadratureResult", "ToleranceConfig", "Patch", "Integrand", "Hints",
    "WynnEpsilon", "integrate_finite", "integrate_tanh_sinh", "integrate_exp_sinh",
    "integrate_oscillatory", "integrate_auto",
]

EPS = sys.float_info.epsilon
_TINY = sys.float_info.min
_HALF_PI = 0.5 * math.pi

# Gauss-Kronrod 7/15 abscissae and weights on [-1, 1], descending abscissae.
_XGK = tuple(float.fromhex(h) for h in (
    "0x1.fba009d4d09b1p-1", "0x1.e5f178e7c6229p-1", "0x1.bacf827b9bb3ep-1",
    "0x1.7ba9f9be3a1d6p-1", "0x1.2c13a049dfa24p-1", "0x1.9f95df119fd62p-2",
    "0x1.a98b2892e0c77p-3", "0x0.0p+0",
))
_WGK = tuple(float.fromhex(h) for h in (
    "0x1.77c5b67d57470p-6", "0x1.026cdaa7b61c4p-4", "0x1.ad384a34814c6p-4",
    "0x1.200ed0f46e8c1p-3", "0x1.5a1f266e47d5cp-3", "0x1.85d6861c80eb1p-3",
    "0x1.a2adbcbec9cd8p-3", "0x1.ad04f9087090fp-3",
))
# Gauss weights for the Kronrod abscissae 1, 3, 5 and the centre.
_WG = tuple(float.fromhex(h) for h in (
    "0x1.092f69f826d57p-3", "0x1.1e6b1713d8644p-2", "0x1.86fe74ee32b3dp-2",
    "0x1.abfd7e03c2fa6p-2",
))

# Hard cap on the number of live subintervals in the adaptive kernel.
_MAX_INTERVALS = 8000
# A double-exponential term is negligible below this fraction of the largest term.
_NEGLIGIBLE = 1e-20


class Status(str, enum.Enum):
    CONVERGED = "converged"
    MAX_DEPTH_REACHED = "max_depth_reached"
    EVALUATION_FAULT = "evaluation_fault"


_STATUS_RANK = {Status.CONVERGED: 0, Status.MAX_DEPTH_REACHED: 1, Status.EVALUATION_FAULT: 2}


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int
    status: Status
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        status = max(self.status, other.status, key=_STATUS_RANK.__getitem__)
        message = "; ".join(m for m in (self.message, other.message) if m)
        return QuadratureResult(
            self.value + other.value,
            self.error_estimate + other.error_estimate,
            self.evaluations + other.evaluations,
            status,
            message,
        )

    def __neg__(self) -> "QuadratureResult":
        return replace(self, value=-self.value)

    def as_dict(self) -> dict:
        return {
            "value": self.value,
            "error_estimate": self.error_estimate,
            "evaluations": self.evaluations,
            "status": self.status.value,
        }


@dataclass(frozen=True)
class ToleranceConfig:
    """Accuracy targets and work limits shared by all kernels."""

    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    max_depth: int = 18
    de_max_level: int = 12
    osc_max_periods: int = 200

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_depth < 1 or self.de_max_level < 1 or self.osc_max_periods < 1:
            raise ValueError("depth limits must be at least 1")

    def target(self, value: float) -> float:
        return max(self.abs_tol, self.rel_tol * abs(value))

    @staticmethod
    def fd_step(at: float, order: int = 1) -> float:
        """Finite-difference step: cbrt(eps) for first, eps**(1/4) for second derivatives."""
        base = EPS ** (1.0 / 3.0) if order == 1 else EPS ** 0.25
        return base * max(1.0, abs(at))

    def tightened(self, factor: float) -> "ToleranceConfig":
        return replace(self, rel_tol=self.rel_tol * factor, abs_tol=self.abs_tol * factor)


DEFAULT_TOLERANCE = ToleranceConfig()


@dataclass(frozen=True)
class Patch:
    """Removable singularity: within ``delta * max(1, |point|)`` of ``point`` the
    integrand takes the value ``value``."""

    point: float
    value: float
    delta: float = 1e-8


class Integrand:
    """A real function of one variable with optional removable-singularity patches."""

    __slots__ = ("func", "patches", "_radii")

    def __init__(self, func: Callable[[float], float], patches: Sequence[Patch] = ()):
        self.func = func
        self.patches = tuple(patches)
        self._radii = tuple(p.delta * max(1.0, abs(p.point)) for p in self.patches)

    def __call__(self, x: float) -> float:
        for patch, radius in zip(self.patches, self._radii):
            if abs(x - patch.point) <= radius:
                return patch.value
        return self.func(x)

    def map(self, transform: Callable[[float], float], scale: Callable[[float], float]) -> "Integrand":
        """Return ``u -> self(transform(u)) * scale(u)`` (patches stay in x)."""
        return Integrand(lambda u: self(transform(u)) * scale(u))


def _as_integrand(f) -> Integrand:
    return f if isinstance(f, Integrand) else Integrand(f)


def _checked(f: Callable[[float], float], x: float) -> float:
    try:
        value = f(x)
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise EvalError(f"{exc} at x={x!r}") from None
    if not math.isfinite(value):
        raise EvalError(f"non-finite integrand value {value!r} at x={x!r}")
    return value


def _fault(value: float, err: float, evaluations: int, exc: Exception) -> QuadratureResult:
    return QuadratureResult(value, err, max(evaluations, 1), Status.EVALUATION_FAULT, str(exc))


# --------------------------------------------------------------------------
# adaptive Gauss-Kronrod


def _gk15(f, a: float, b: float) -> tuple[float, float]:
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fc = _checked(f, centre)
    resk = fc * _WGK[7]
    resg = fc * _WG[3]
    resabs = abs(resk)
    values = []
    for j in range(7):
        dx = half * _XGK[j]
        f1 = _checked(f, centre - dx)
        f2 = _checked(f, centre + dx)
        values.append((f1, f2))
        resk += _WGK[j] * (f1 + f2)
        resabs += _WGK[j] * (abs(f1) + abs(f2))
        if j % 2 == 1:
            resg += _WG[j // 2] * (f1 + f2)
    mean = 0.5 * resk
    resasc = _WGK[7] * abs(fc - mean)
    for j, (f1, f2) in enumerate(values):
        resasc += _WGK[j] * (abs(f1 - mean) + abs(f2 - mean))
    result = resk * half
    resabs *= abs(half)
    resasc *= abs(half)
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > _TINY / (50.0 * EPS):
        err = max(50.0 * EPS * resabs, err)
    return result, err


def integrate_finite(f, a: float, b: float, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> QuadratureResult:
    """Adaptive 15-point Gauss-Kronrod quadrature on the finite interval [a, b].

    The interval with the largest error estimate is bisected until the summed
    estimate meets ``tol`` or every remaining interval sits at ``tol.max_depth``.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ValueError(f"integrate_finite needs finite a < b, got [{a}, {b}]")
    f = _as_integrand(f)
    evaluations = 0
    try:
        value, err = _gk15(f, a, b)
        evaluations += 15
        counter = 0
        heap = [(-err, counter, a, b, value, err, 0)]
        frozen = []
        total_err = err
        total_val = value
        while True:
            if total_err <= tol.target(total_val):
                # re-sum exactly before declaring success
                live = heap + frozen
                total_err = math.fsum(item[5] for item in live)
                total_val = math.fsum(item[4] for item in sorted(live, key=lambda it: it[2]))
                if total_err <= tol.target(total_val):
                    return QuadratureResult(total_val, total_err, evaluations, Status.CONVERGED)
            if not heap or len(heap) + len(frozen) >= _MAX_INTERVALS:
                break
            item = heapq.heappop(heap)
            _, _, lo, hi, v, e, depth = item
            mid = 0.5 * (lo + hi)
            if depth >= tol.max_depth or not lo < mid < hi:
                frozen.append(item)
                continue
            v1, e1 = _gk15(f, lo, mid)
            v2, e2 = _gk15(f, mid, hi)
            evaluations += 30
            counter += 1
            heapq.heappush(heap, (-e1, counter, lo, mid, v1, e1, depth + 1))
            counter += 1
            heapq.heappush(heap, (-e2, counter, mid, hi, v2, e2, depth + 1))
            total_val += v1 + v2 - v
            total_err += e1 + e2 - e
    except EvalError as exc:
        return _fault(math.nan, math.inf, evaluations, exc)
    live = heap + frozen
    total_err = math.fsum(item[5] for item in live)
    total_val = math.fsum(item[4] for item in sorted(live, key=lambda it: it[2]))
    status = Status.CONVERGED if total_err <= tol.target(total_val) else Status.MAX_DEPTH_REACHED
    return QuadratureResult(total_val, total_err, evaluations, status)


# --------------------------------------------------------------------------
# double-exponential rules


def _endpoint_model(f, e: float, toward: float) -> Callable[[float], float] | None:
    """Fit ``f(e + toward*d) ~ C d**p`` near a nonzero endpoint ``e``.

    Abscissas within a few ulps of ``e`` cannot be represented accurately, so
    very close to the endpoint the double-exponential rule samples this model
    instead of ``f``.  The fit uses three exactly representable offsets and is
    rejected (``None``) unless the two local exponents agree, which screens
    out logarithmic and oscillatory endpoint behaviour.
    """
    if e == 0.0 or not math.isfinite(e):
        return None
    d1 = math.ldexp(1.0, math.frexp(e)[1] - _MODEL_BITS)
    try:
        f1, f2, f4 = (_checked(f, e + toward * d) for d in (d1, 2 * d1, 4 * d1))
    except EvalError:
        return None
    if not (f1 * f2 > 0 and f2 * f4 > 0):
        return None
    p12 = math.log(f2 / f1) / math.log(2.0)
    p24 = math.log(f4 / f2) / math.log(2.0)
    if abs(p12 - p24) > 1e-4 or not -1.0 < p12 < 8.0:
        return None
    scale = f1 / d1 ** p12

    def model(d: float) -> float:
        return scale * d ** p12

    model.cutoff = d1  # type: ignore[attr-defined]
    return model


# Endpoint models take over below 2**-_MODEL_BITS relative to the endpoint.
_MODEL_BITS = 30


class _SideWalker:
    """Sum the terms of one half of a double-exponential trapezoid rule.

    ``node(t)`` returns ``(x, weight, distance_to_endpoint, clipped)`` where
    ``clipped`` means ``x`` rounded onto the endpoint, or ``None`` when the
    transform overflows.
    """

    def __init__(self, f, node, model=None):
        self.f = f
        self.node = node
        self.model = model
        self.cutoff = getattr(model, "cutoff", 0.0)
        self.max_term = 0.0
        self.evaluations = 0
        # furthest t with a non-negligible term; faults beyond it end the walk
        self.last_significant = 0.0

    def walk(self, ts) -> float:
        terms = []
        quiet = 0
        for t in ts:
            nwd = self.node(t)
            if nwd is None:
                break
            x, w, d, clipped = nwd
            if w == 0.0:
                break
            if d < self.cutoff:
                term = w * self.model(d)
            elif clipped:
                break
            else:
                try:
                    self.evaluations += 1
                    term = w * _checked(self.f, x)
                except EvalError:
                    if quiet or 0.0 < self.last_significant < t:
                        break
                    raise
            terms.append(term)
            self.max_term = max(self.max_term, abs(term))
            if abs(term) <= _NEGLIGIBLE * self.max_term:
                quiet += 1
                if quiet >= 3:
                    break
            else:
                quiet = 0
                self.last_significant = max(self.last_significant, t)
        return math.fsum(terms)


def _de_levels(f, centre_node, walkers, tol: ToleranceConfig, evaluations: int = 0) -> QuadratureResult:
    """Level-doubling driver shared by tanh-sinh and exp-sinh."""
    try:
        x0, w0 = centre_node
        centre = w0 * _checked(f, x0)
        evaluations += 1
        for wk in walkers:
            wk.max_term = abs(centre)
        h = 1.0
        total = centre + sum(wk.walk(_steps(1.0, 1.0)) for wk in walkers)
        estimate = h * total
        err = math.inf
        for level in range(1, tol.de_max_level + 1):
            h *= 0.5
            fresh = sum(wk.walk(_steps(h, 2.0 * h)) for wk in walkers)
            new_estimate = 0.5 * estimate + h * fresh
            err = abs(new_estimate - estimate)
            estimate = new_estimate
            if level >= 3 and err <= tol.target(estimate):
                evaluations += sum(wk.evaluations for wk in walkers)
                return QuadratureResult(estimate, err, evaluations, Status.CONVERGED)
    except EvalError as exc:
        evaluations += sum(wk.evaluations for wk in walkers)
        return _fault(math.nan, math.inf, evaluations, exc)
    evaluations += sum(wk.evaluations for wk in walkers)
    return QuadratureResult(estimate, err, evaluations, Status.MAX_DEPTH_REACHED)


def _steps(first: float, step: float):
    k = 0
    while True:
        yield first + k * step
        k += 1


def integrate_tanh_sinh(f, a: float, b: float, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> QuadratureResult:
    """Tanh-sinh quadrature on [a, b]; tolerates integrable endpoint singularities.

    Abscissas are generated as distances from the nearer endpoint, so the
    integrand is never evaluated at (or rounded onto) ``a`` or ``b``.
    """
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise ValueError(f"integrate_tanh_sinh needs finite a < b, got [{a}, {b}]")
    f = _as_integrand(f)
    half = 0.5 * (b - a)
    centre = a + half

    def offset(t: float):
        u = _HALF_PI * math.sinh(t)
        if u > 700.0:
            return None
        q = math.exp(-2.0 * u)
        dist = half * 2.0 * q / (1.0 + q)
        w = half * _HALF_PI * math.cosh(t) * 4.0 * q / (1.0 + q) ** 2
        return dist, w

    def left(t: float):
        dw = offset(t)
        if dw is None:
            return None
        x = a + dw[0]
        return x, dw[1], dw[0], x <= a

    def right(t: float):
        dw = offset(t)
        if dw is None:
            return None
        x = b - dw[0]
        return x, dw[1], dw[0], x >= b

    models = [_endpoint_model(f, a, 1.0), _endpoint_model(f, b, -1.0)]
    walkers = [_SideWalker(f, left, models[0]), _SideWalker(f, right, models[1])]
    setup = sum(3 for m in models if m is not None)
    return _de_levels(f, (centre, half * _HALF_PI), walkers, tol, setup)


def integrate_exp_sinh(f, a: float, tol: ToleranceConfig = DEFAULT_TOLERANCE) -> QuadratureResult:
    """Exp-sinh quadrature on [a, inf) for integrands that decay at infinity.

    The substitution ``x = a + exp(pi/2 sinh t)`` also copes with an
    integrable singularity at ``a``.
    """
    if not math.isfinite(a):
        raise ValueError("integrate_exp_sinh needs a finite lower bound")
    f = _as_integrand(f)

    def node(t: float):
        u = _HALF_PI * math.sinh(t)
        if u > 709.0:
            return None
        d = math.exp(u)
        x = a + d
        if math.isinf(x):
            return None
        return x, _HALF_PI * math.cosh(t) * d, d, x <= a

    def down(t: float):
        return node(-t)

    model = _endpoint_model(f, a, 1.0)
    walkers = [_SideWalker(f, node), _SideWalker(f, down, model)]
    return _de_levels(f, (a + 1.0, _HALF_PI), walkers, tol, 3 if model else 0)


# --------------------------------------------------------------------------
# oscillatory tails


class WynnEpsilon:
    """Incremental Wynn epsilon algorithm over a sequence of partial sums.

    Only the latest ascending diagonal of the epsilon table is kept; each
    call to :meth:`add` costs O(n).  :meth:`add` returns the current best
    extrapolated limit (the deepest even column).
    """

    def __init__(self):
        self.diagonal: list[float] = []
        self.estimates: list[float] = []

    def add(self, s: float) -> float:
        old = self.diagonal
        new = [s]
        for k in range(len(old)):
            delta = new[k] - old[k]
            scale = max(abs(new[k]), abs(old[k]))
            if delta == 0.0 or abs(delta) <= 4.0 * EPS * scale:
                break
            prev = old[k - 1] if k > 0 else 0.0
            new.append(prev + 1.0 / delta)
        self.diagonal = new
        best = new[len(new) - 1 if (len(new) - 1) % 2 == 0 else len(new) - 2]
        self.estimates.append(best)
        return best

    def error(self) -> float:
        est = self.estimates
        if len(est) < 3:
            return math.inf
        return abs(est[-1] - est[-2]) + abs(est[-1] - est[-3])


def _zero(k: int, shift: float, omega: float) -> float:
    return (k + shift) * math.pi / omega


def _oscillatory_cells(f, a: float, omega: float, kind: str, tol: ToleranceConfig) -> QuadratureResult:
    if not omega > 0:
        raise ValueError("oscillatory kernel needs omega > 0")
    if kind not in ("sin", "cos"):
        raise ValueError(f"oscillation kind must be 'sin' or 'cos', not {kind!r}")
    shift = 0.0 if kind == "sin" else 0.5
    period = math.pi / omega
    k = math.floor(a / period - shift) + 1
    while _zero(k, shift, omega) - a <= 1e-9 * period:
        k += 1
    cell_tol = replace(
        tol, rel_tol=max(tol.rel_tol * 1e-2, 2e-14), abs_tol=tol.abs_tol * 1e-2
    )
    first = integrate_finite(f, a, _zero(k, shift, omega), cell_tol)
    if first.status is Status.EVALUATION_FAULT:
        return first
    evaluations = first.evaluations
    cell_err = first.error_estimate
    status = first.status
    partial = first.value
    wynn = WynnEpsilon()
    wynn.add(partial)
    tail = _PowerTail()
    signs: list[float] = []
    settled = 0
    last = (partial, math.inf)
    for n in range(tol.osc_max_periods):
        lo, hi = _zero(k + n, shift, omega), _zero(k + n + 1, shift, omega)
        cell = integrate_finite(f, lo, hi, cell_tol)
        evaluations += cell.evaluations
        if cell.status is Status.EVALUATION_FAULT:
            return _fault(partial, math.inf, evaluations, EvalError(cell.message))
        if cell.status is not Status.CONVERGED:
            status = cell.status
        cell_err += cell.error_estimate
        partial += cell.value
        signs = (signs + [math.copysign(1.0, cell.value)])[-_SAME_SIGN_RUN:]
        tail.add(n + 2, partial)
        if len(signs) == _SAME_SIGN_RUN and abs(sum(signs)) == _SAME_SIGN_RUN:
            # cells of one sign: epsilon is unreliable, extrapolate in 1/N
            if not tail.fresh:
                wynn.add(partial)
                continue
            estimate, err = tail.estimate()
        else:
            estimate = wynn.add(partial)
            err = wynn.error()
        err += cell_err
        last = (estimate, err)
        if n >= 4 and err <= tol.target(estimate):
            settled += 1
            if settled >= 2:
                return QuadratureResult(estimate, err, evaluations, status)
        else:
            settled = 0
    return QuadratureResult(last[0], last[1], evaluations, Status.MAX_DEPTH_REACHED)


_SAME_SIGN_RUN = 6


class _PowerTail:
    """Extrapolate partial sums S_N = S + c1/N + c2/N^2 + ... to N = inf.

    Partial sums are sampled at N = 8, 12, 16, 24, 32, ... and the limit is
    the value at 1/N = 0 of the interpolating polynomial (Neville).  The
    error is the change from dropping the oldest sample.
    """

    SAMPLES = frozenset(m * 2 ** j for j in range(2, 12) for m in (2, 3))

    def __init__(self):
        self.h: list[float] = []
        self.s: list[float] = []
        self.fresh = False

    def add(self, count: int, partial: float) -> None:
        self.fresh = count in self.SAMPLES
        if self.fresh:
            self.h.append(1.0 / count)
            self.s.append(partial)

    @staticmethod
    def _neville(h: list[float], s: list[float]) -> float:
        p = list(s)
        for m in range(1, len(h)):
            for i in range(len(h) - m):
                p[i] = (h[i] * p[i + 1] - h[i + m] * p[i]) / (h[i] - h[i + m])
        return p[0]

    def estimate(self) -> tuple[float, float]:
        if len(self.s) < 3:
            return self.s[-1], math.inf
        h, s = self.h[-9:], self.s[-9:]
        best = self._neville(h, s)
        return best, abs(best - self._neville(h[1:], s[1:]))


def integrate_oscillatory(
    f_env,
    a: float,
    omega: float,
    kind: str,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
) -> QuadratureResult:
    """Integrate ``f_env(x) * trig(omega x)`` over [a, inf).

    The domain is cut at the zeros of the trigonometric factor (multiples of
    pi/omega counted from its phase origin), each cell is integrated with
    :func:`integrate_finite`, and the alternating partial sums are
    extrapolated with the Wynn epsilon algorithm.  When the cells settle on
    one sign the partial sums are extrapolated in 1/N instead.  At most
    ``tol.osc_max_periods`` cells are used.
    """
    env = _as_integrand(f_env)
    trig = math.sin if kind == "sin" else math.cos

    def product(x: float) -> float:
        return env(x) * trig(omega * x)

    return _oscillatory_cells(product, a, omega, kind, tol)


# --------------------------------------------------------------------------
# dispatch


@dataclass(frozen=True)
class Hints:
    """Quadrature hints resolved to numbers.

    ``oscillatory`` is ``(kind, omega)`` for integrands carrying a factor
    trig(omega x); ``inverse_square`` is ``(kind, omega)`` for a factor
    trig(omega / x**2), which oscillates without bound at x = 0.
    """

    singular_lower: bool = False
    singular_upper: bool = False
    oscillatory: tuple[str, float] | None = None
    decay: bool = False
    inverse_square: tuple[str, float] | None = None

    def reflected(self) -> "Hints":
        return replace(self, singular_lower=self.singular_upper, singular_upper=self.singular_lower)


def integrate_auto(
    f,
    lower: float,
    upper: float,
    hints: Hints | None = None,
    tol: ToleranceConfig = DEFAULT_TOLERANCE,
) -> QuadratureResult:
    """Choose a kernel from the bounds and hints.

    finite, no singular hint      -> Gauss-Kronrod
    finite, singular endpoint     -> tanh-sinh
    [a, inf) with oscillation     -> oscillatory cells
    [a, inf) otherwise            -> exp-sinh
    (-inf, b] is reflected; (-inf, inf) is split at 0.
    """
    hints = hints or Hints()
    f = _as_integrand(f)
    if math.isnan(lower) or math.isnan(upper):
        raise ValueError("NaN integration bound")
    if lower == upper:
        return QuadratureResult(0.0, 0.0, 1, Status.CONVERGED)
    if lower > upper:
        return -integrate_auto(f, upper, lower, hints.reflected(), tol)
    if math.isfinite(lower) and math.isfinite(upper):
        if hints.singular_lower or hints.singular_upper:
            return integrate_tanh_sinh(f, lower, upper, tol)
        return integrate_finite(f, lower, upper, tol)
    if math.isfinite(lower):
        return _semi_infinite(f, lower, hints, tol)
    mirrored = Integrand(lambda x: f(-x))
    if math.isfinite(upper):
        return _semi_infinite(mirrored, -upper, hints.reflected(), tol)
    return _semi_infinite(f, 0.0, replace(hints, singular_lower=False), tol) + _semi_infinite(
        mirrored, 0.0, replace(hints, singular_lower=False), tol
    )


def _semi_infinite(f, a: float, hints: Hints, tol: ToleranceConfig) -> QuadratureResult:
    if hints.oscillatory is not None and hints.oscillatory[1] > 0:
        kind, omega = hints.oscillatory
        return _oscillatory_cells(f, a, omega, kind, tol)
    if hints.inverse_square is not None and hints.inverse_square[1] > 0 and a == 0.0:
        kind, omega = hints.inverse_square
        # x = u**-1/2 turns trig(omega/x^2) on (0, 1] into trig(omega u) on [1, inf)
        near = Integrand(lambda u: f(u ** -0.5) * 0.5 * u ** -1.5)
        return _oscillatory_cells(near, 1.0, omega, kind, tol) + integrate_exp_sinh(f, 1.0, tol)
    return integrate_exp_sinh(f, a, tol)
