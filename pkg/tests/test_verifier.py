import math
import threading

import pytest

from parmint.catalog import default_registry
from parmint.expr import parse
from parmint.quadrature import ToleranceConfig
from parmint.verifier import (
    CHECK_KINDS, IDENTITIES, ODE_CASES, CheckReport, Identity, OdeSpec, QuadratureCache, Term, check_closed_form,
    check_derivative, check_frullani, check_identity, check_leibniz, check_ode_residual, check_series_oracle_236,
    closed_form_tolerance, run_suite, summarize,
)

REGISTRY = default_registry()


def _values(report: CheckReport, key: str) -> list:
    return [d[key] for d in report.details]


# ---------------------------------------------------------------- closed form

def test_closed_form_log_of_half_sum():
    grid = [{"a": 1.5}, {"a": 2.0}, {"a": 5.0}]
    report = check_closed_form("eq_2.28", grid)
    assert report.passed
    at2 = report.details[1]
    assert at2["reference"] == pytest.approx(math.pi * math.log((2 + math.sqrt(3)) / 2), rel=1e-15)
    assert at2["reference"] == pytest.approx(1.9597591638, abs=1e-10)  # decimal of the closed form


def test_closed_form_zero_parameter():
    report = check_closed_form("eq_2.33", [{"a": 0.0}])
    assert report.passed
    assert report.details[0]["reference"] == 0.0
    assert abs(report.details[0]["value"]) < 1e-14


def test_closed_form_inner_branch_vanishes():
    report = check_closed_form("eq_2.36", [{"a": 0.5, "b": 1.0}])
    assert report.passed and abs(report.details[0]["value"]) < 1e-8


def test_tolerance_by_domain():
    assert closed_form_tolerance(REGISTRY.get("eq_1.9"), {}) == (1e-8, 1e-10)
    assert closed_form_tolerance(REGISTRY.get("hecke"), {"a": 1.0}) == (1e-7, 1e-10)
    assert closed_form_tolerance(REGISTRY.get("eq_1.5"), {}) == (1e-7, 1e-10)


def test_nonconvergence_fails_the_report():
    starved = ToleranceConfig(rel_tol=1e-15, abs_tol=1e-300, max_depth=1, de_max_level=1, osc_max_periods=1)
    report = check_closed_form("eq_1.5", None, starved)
    assert not report.passed
    assert report.details[0]["quadrature"]["status"] != "converged"


def test_report_invariants_hold_everywhere(full_suite):
    for r in full_suite:
        assert r.passed == all(d["pass"] for d in r.details)
        assert r.max_abs_dev == max(d["abs_dev"] for d in r.details)
        worst = [d for d in r.details if d["abs_dev"] == r.max_abs_dev]
        assert r.worst_point in [d["params"] for d in worst]
        assert r.as_dict()["pass"] is r.passed


def test_empty_grid_is_an_error():
    with pytest.raises(ValueError):
        check_closed_form("eq_2.2", [])


# ---------------------------------------------------------------- derivatives

def test_laplace_sine_derivative():
    report = check_derivative("eq_1.2_laplace", "l", [{"l": 1.0}])
    assert report.passed
    assert report.details[0]["reference"] == pytest.approx(-0.5, abs=1e-9)
    assert report.details[0]["value"] == pytest.approx(-0.5, rel=1e-5)


def test_arctangent_form_derivative():
    report = check_derivative("eq_2.12", "l", [{"l": 1.0}])
    assert report.passed
    assert report.details[0]["reference"] == pytest.approx(math.pi / 4, abs=1e-9)


def test_derivative_of_a_parameter_free_closed_form_direction():
    # eq_2.36 is constant in a on |a| < 1
    report = check_derivative("eq_2.36", "a", [{"a": 0.5, "b": 1.0}])
    assert report.passed
    assert abs(report.details[0]["reference"]) < 1e-8


def test_derivative_grid_respects_margins():
    report = check_derivative("eq_2.32", "a")
    for p in report.grid:
        assert -1 < p["a"] - 2 * ToleranceConfig.fd_step(p["a"]) and p["a"] + 2 * ToleranceConfig.fd_step(p["a"]) < 1


def test_derivative_refuses_moving_limits():
    with pytest.raises(ValueError, match="leibniz"):
        check_derivative("eq_4.1", "a")


# ---------------------------------------------------------------- Leibniz

def test_leibniz_boundary_term():
    report = check_leibniz("eq_4.1", "a", [{"a": 2.0}])
    assert report.passed
    d = report.details[0]
    expected = -math.atan(math.sqrt(3)) / (2 * math.sqrt(3))
    assert d["lower_term"] == pytest.approx(expected, rel=1e-12)
    assert d["lower_term"] == pytest.approx(-0.3022999, abs=1e-7)
    assert d["boundary_sign"] == "minus"


def test_leibniz_vanishing_boundary_term():
    report = check_leibniz("eq_4.4")
    assert report.passed
    assert all(abs(t) < 1e-12 for t in _values(report, "lower_term"))


def test_leibniz_with_fixed_limits_is_plain_derivative():
    leib = check_leibniz("eq_2.12", "l", [{"l": 1.0}])
    plain = check_derivative("eq_2.12", "l", [{"l": 1.0}])
    assert leib.passed and plain.passed
    assert leib.details[0]["upper_term"] == 0.0 and leib.details[0]["lower_term"] == 0.0
    assert leib.details[0]["reference"] == pytest.approx(plain.details[0]["reference"], rel=1e-9)


# ---------------------------------------------------------------- ODE residuals

@pytest.mark.parametrize("family, param, residual, grid", [
    ("eq_3.2", "l", "F2 - F0", [{"l": v, "a": 1.0} for v in (0.5, 1.0, 2.0)]),
    ("laplace_F", "s", "F2 + F0 - 1/s", [{"s": v, "a": 1.0} for v in (0.5, 1.0, 2.0)]),
    ("gauss_cos", "x", "F1", [{"x": 0.0}]),
    ("hecke", "a", "F1 + F0/sqrt(a)", [{"a": 1.0}]),
])
def test_ode_residual_examples(family, param, residual, grid):
    order = 2 if "F2" in residual else 1
    report = check_ode_residual(family, param, OdeSpec.parse(order, residual), grid)
    assert report.passed, report.details
    assert report.max_abs_dev <= 1e-4


def test_ode_detects_a_wrong_equation():
    report = check_ode_residual("eq_3.2", "l", OdeSpec.parse(2, "F2 + F0"), [{"l": 1.0, "a": 1.0}])
    assert not report.passed


def test_coupled_system():
    for fid in ("fresnel_U", "fresnel_V"):
        (case,) = ODE_CASES[fid]
        assert check_ode_residual(fid, case.param, case.spec, case.grid).passed


@pytest.mark.parametrize("order, text, partner", [
    (3, "F0", None),
    (1, "F2 - F0", None),
    (1, "F1 + G0", None),
    (1, "G2", "eq_3.3"),
])
def test_ode_spec_validation(order, text, partner):
    with pytest.raises(ValueError):
        OdeSpec(order, parse(text), partner=partner)


def test_ode_spec_undeclared_symbol():
    with pytest.raises(ValueError, match="undeclared"):
        check_ode_residual("eq_3.2", "l", OdeSpec.parse(2, "F2 - k*F0"), [{"l": 1.0, "a": 1.0}])


# ---------------------------------------------------------------- Frullani and series oracle

@pytest.mark.parametrize("fid", ["eq_1.12", "eq_2.5"])
def test_frullani_structure(fid):
    report = check_frullani(fid)
    assert report.passed
    assert all(d["direct_abs_dev"] <= 1e-8 for d in report.details)


def test_frullani_route_at_one():
    report = check_frullani("eq_2.5", [{"a": 1.0}])
    assert report.details[0]["reference"] == pytest.approx(-math.log(2), rel=1e-15)


def test_series_oracle_examples():
    report = check_series_oracle_236([0.9, 2.0, 0.0])
    assert report.passed
    inner, outer, zero = report.details
    assert abs(inner["value"]) <= 1e-7
    assert outer["reference"] == pytest.approx(math.pi * math.log(4), rel=1e-12)
    assert outer["reference"] == pytest.approx(4.3551721806, abs=1e-10)
    assert zero["value"] == 0.0 and zero["series_integral"] == 0.0


def test_series_oracle_terms_vanish_individually():
    report = check_series_oracle_236([0.5, -0.9])
    assert all(d["largest_term_integral"] < 1e-14 for d in report.details)


def test_series_oracle_rejects_unit_modulus():
    with pytest.raises(ValueError):
        check_series_oracle_236([1.0])


# ---------------------------------------------------------------- identities

def _identity(name):
    (ident,) = [i for i in IDENTITIES if i.name == name]
    return ident


@pytest.mark.parametrize("name", [i.name for i in IDENTITIES])
def test_identities_hold(name):
    assert check_identity(_identity(name)).passed


def test_symmetry_grid_and_tolerance():
    ident = _identity("symmetry under l <-> m (quadrature)")
    assert ident.tolerance == 1e-9
    assert [dict(p) for p in ident.grid] == [{"l": 1, "m": 2}, {"l": 2, "m": 1}, {"l": 0.5, "m": 3}]


def test_identity_detects_a_false_claim():
    wrong = Identity("off by a factor", "eq_2.10", ({"l": 1.0},), (Term(1, "eq_2.10", {"l": "l"}),),
                     (Term(1, "eq_2.12", {"l": "l"}),))
    assert not check_identity(wrong).passed


# ---------------------------------------------------------------- suite

def test_full_suite_passes(full_suite):
    passed, failed = summarize(full_suite)
    assert failed == 0, [(r.family_id, r.check_kind) for r in full_suite if not r.passed]
    closed = [r for r in full_suite if r.check_kind == "closed_form"]
    assert len(closed) == len(REGISTRY) >= 35
    assert {r.check_kind for r in full_suite} == set(CHECK_KINDS)


def test_full_suite_is_sorted(full_suite):
    keys = [(r.family_id, r.check_kind) for r in full_suite]
    assert keys == sorted(keys)


def test_cardinality_of_one_check():
    assert len(run_suite(["eq_2.24"], ["derivative"])) == 1


def test_unknown_family_and_kind():
    with pytest.raises(KeyError):
        run_suite(["nope"])
    with pytest.raises(ValueError):
        run_suite(["eq_2.2"], ["bogus"])
    with pytest.raises(ValueError):
        run_suite(["eq_2.2"], jobs=0)


def test_parallel_runs_are_deterministic():
    ids = ["eq_1.4", "eq_2.2", "eq_3.2", "eq_4.1", "eq_2.36"]
    serial = [r.as_dict() for r in run_suite(ids, jobs=1)]
    parallel = [r.as_dict() for r in run_suite(ids, jobs=4)]
    assert serial == parallel


def test_cache_is_shared_and_thread_safe(suite_cache, full_suite):
    assert len(suite_cache) > 0 and suite_cache.hits > 0
    cache = QuadratureCache()
    counter = []

    def compute():
        counter.append(1)
        return full_suite[0]

    threads = [threading.Thread(target=lambda: cache.get(("k",), compute)) for _ in range(16)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(cache) == 1
    assert cache.hits + cache.misses == 16
    assert cache.misses == len(counter)
