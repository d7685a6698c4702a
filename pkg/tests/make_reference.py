"""Regenerate tests/data/reference.json with mpmath at 30 digits.

Each builtin family is integrated at every default grid point by mpmath's own
quadrature (quadosc for oscillatory tails) from an mpmath evaluation of the
expression tree, and its closed form is evaluated in mpmath as well.  None of
the package's numerical kernels are used.

    python3 tests/make_reference.py
"""

import json
import math
from pathlib import Path

import mpmath as mp

from parmint import catalog
from parmint.expr import Add, Apply, Constant, Div, Mul, Neg, Pi, Pow, Sub, Symbol

mp.mp.dps = 30

_FN = {
    "sin": mp.sin, "cos": mp.cos, "tan": mp.tan, "atan": mp.atan, "asin": mp.asin,
    "ln": mp.log, "exp": mp.exp, "sqrt": mp.sqrt, "sinh": mp.sinh, "cosh": mp.cosh,
    "abs": abs, "sign": mp.sign,
    "si": lambda x: mp.si(x) - mp.pi / 2, "ci": mp.ci,
}


def mpeval(e, env):
    t = type(e)
    if t is Constant:
        return mp.mpf(e.value) if math.isfinite(e.value) else mp.inf * (1 if e.value > 0 else -1)
    if t is Pi:
        return +mp.pi
    if t is Symbol:
        return env[e.name]
    if t is Neg:
        return -mpeval(e.arg, env)
    if t is Apply:
        return _FN[e.fn](mpeval(e.arg, env))
    a, b = mpeval(e.left, env), mpeval(e.right, env)
    if t is Add:
        return a + b
    if t is Sub:
        return a - b
    if t is Mul:
        return a * b
    if t is Div:
        return a / b
    if t is Pow:
        return a ** b
    raise TypeError(e)


def _mp_env(point):
    # grid values are short decimals; use their exact decimal meaning
    return {k: mp.mpf(repr(v)) for k, v in point.items()}


def reference_integral(fam, point):
    env = _mp_env(point)
    lo = mpeval(fam.lower, env)
    hi = mpeval(fam.upper, env)

    def f(x):
        local = dict(env)
        local[fam.var] = x
        try:
            return mpeval(fam.integrand, local)
        except ZeroDivisionError:
            return mp.mpf(0)

    hints = {h.kind: h for h in fam.hints}
    if "oscillatory" in hints and hi == mp.inf:
        omega = mpeval(hints["oscillatory"].omega, env)
        if omega > 0:
            head = mp.quad(f, [lo, lo + 1])
            return head + mp.quadosc(f, [lo + 1, mp.inf], omega=omega)
    if "inverse_square" in hints:
        omega = mpeval(hints["inverse_square"].omega, env)
        if omega > 0:
            # u = 1/x^2 on (0, 1], then an ordinary oscillatory tail in u
            def g(u):
                return f(u ** mp.mpf(-0.5)) * u ** mp.mpf(-1.5) / 2

            return mp.quadosc(g, [1, mp.inf], omega=omega) + mp.quad(f, [1, mp.inf])
    if lo == -mp.inf and hi == mp.inf:
        return mp.quad(f, [-mp.inf, 0, mp.inf])
    if hi == mp.inf:
        # slowly damped oscillation: resolve each half period separately
        step = mp.pi / 2 if _has_trig(fam.integrand) else mp.mpf(1)
        pts = [lo + k * step for k in range(161)]
        return mp.quad(f, pts) + mp.quad(f, [pts[-1], mp.inf])
    return mp.quad(f, mp.linspace(lo, hi, 9))


def _has_trig(e):
    if isinstance(e, Apply):
        return e.fn in ("sin", "cos") or _has_trig(e.arg)
    return any(_has_trig(getattr(e, k)) for k in ("arg", "left", "right") if hasattr(e, k))


def reference_closed_form(fam, point):
    env = _mp_env(point)
    env["catalan"] = +mp.catalan
    for cond, e in fam.closed_form.branches:
        if cond is None or cond.holds({k: float(v) for k, v in env.items()}):
            return mpeval(e, env)
    raise ValueError("no branch")


def main():
    out = {}
    for fam in catalog.builtin_families():
        rows = []
        for point in fam.default_grid():
            integral = reference_integral(fam, point)
            closed = reference_closed_form(fam, point)
            rows.append({
                "params": point,
                "integral": mp.nstr(integral, 20),
                "closed_form": mp.nstr(closed, 20),
            })
            print(fam.id, point, mp.nstr(integral, 15), mp.nstr(closed, 15),
                  mp.nstr(abs(integral - closed), 3))
        out[fam.id] = rows
    path = Path(__file__).parent / "data" / "reference.json"
    path.write_text(json.dumps(out, indent=1) + "\n")


if __name__ == "__main__":
    main()
