"""Law catalog, sweep containers, and log-log fitting."""
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ewslab.quadrature import IndicatorBox, VarianceQuery, variance_quadrature
from ewslab.scaling import (
    FitResult,
    ScalingLaw,
    SweepResult,
    best_upper_bound,
    classify,
    default_exponent_candidates,
    fit_loglog,
    law_1d,
    law_1d_case,
    law_analytic_1d,
    law_upper_bound,
    law_upper_bound_case,
    log_spaced_p,
    polynomial_law,
    quadrature_sweep,
)
from ewslab.symbols import ToolAlpha


def test_scaling_law_validation():
    ScalingLaw(-0.5, 0, False)
    ScalingLaw(0.0, 2, False)
    bounded = ScalingLaw.bounded()
    assert bounded.convergent and bounded.s == 0.0 and bounded.k == 0
    with pytest.raises(ValueError):
        ScalingLaw(0.0, 0, False)  # a divergent law must diverge somehow
    with pytest.raises(ValueError):
        ScalingLaw(-1.5, 0, False)
    with pytest.raises(ValueError):
        ScalingLaw(-0.5, 1, True)


def test_one_dim_tool_law_catalog():
    assert law_1d(0.5) == ScalingLaw.bounded()
    assert law_1d(1.0) == ScalingLaw(0.0, 1, False)
    assert law_1d(2.0) == ScalingLaw(-0.5, 0, False)
    assert law_1d(5.0) == ScalingLaw(-0.8, 0, False)


def test_one_dim_weighted_window_law():
    # 2 gamma + alpha balance: 1.5 > 1 gives s = -1 + (1 - 2 gamma) / alpha
    assert law_1d(1.0, gamma=0.25) == ScalingLaw(-0.5, 0, False)
    assert law_1d(0.5, gamma=0.2) == ScalingLaw.bounded()  # balance 0.9 < 1
    assert law_1d(0.5, gamma=0.25) == ScalingLaw(0.0, 1, False)  # balance 1


def test_one_dim_case_labels_cover_three_regimes():
    assert "bounded" in law_1d_case(0.5)
    assert "log" in law_1d_case(1.0)
    assert "power" in law_1d_case(2.0)


def test_analytic_law_uses_least_nonzero_order():
    assert law_analytic_1d({(1,): 2.0}) == ScalingLaw(0.0, 1, False)
    assert law_analytic_1d({(3,): 1.0, (5,): 7.0}) == ScalingLaw(-1.0 + 1.0 / 3.0, 0, False)
    assert law_analytic_1d({2: 0.5}) == ScalingLaw(-0.5, 0, False)
    with pytest.raises(ValueError):
        law_analytic_1d({(0,): 1.0, (2,): 1.0})
    with pytest.raises(ValueError):
        law_analytic_1d({(1, 1): 1.0})


def test_corner_bound_catalog():
    assert law_upper_bound((1, 1)) == ScalingLaw(0.0, 2, False)
    assert law_upper_bound((1, 1, 1)) == ScalingLaw(0.0, 3, False)
    assert law_upper_bound((2, 10)) == ScalingLaw(-0.9, 0, False)
    assert law_upper_bound((3, 3)) == ScalingLaw(-1.0 + 1.0 / 3.0, 1, False)
    assert law_upper_bound((1, 2, 3)) == ScalingLaw(-1.0 + 1.0 / 3.0, 0, False)


def test_corner_bound_reduces_zero_axes_first():
    assert law_upper_bound((0, 2)) == law_upper_bound((2,))
    assert law_upper_bound((0, 1, 0)) == ScalingLaw(0.0, 1, False)
    with pytest.raises(ValueError, match="no bifurcation"):
        law_upper_bound((0, 0))


def test_corner_bound_case_labels():
    assert "all indices 1" in law_upper_bound_case((1, 1))
    assert "repeated" in law_upper_bound_case((3, 3))


@settings(max_examples=150, deadline=None)
@given(st.permutations([1, 2, 4]))
def test_corner_bound_permutation_invariance(perm):
    assert law_upper_bound(tuple(perm)) == law_upper_bound((1, 2, 4))


def test_best_upper_bound_takes_slowest_divergence():
    # (2,0) reduces to alpha=2 (power -1/2); (0,10) to alpha=10 (power -0.9);
    # the tighter ceiling is the slower one
    law = best_upper_bound([(2, 0), (0, 10)])
    assert law == ScalingLaw(-0.5, 0, False)
    # a log bound beats any power bound
    law = best_upper_bound([(1, 1), (0, 3)])
    assert law == ScalingLaw(0.0, 2, False)


def test_best_upper_bound_all_zero_is_bounded():
    assert best_upper_bound([(0, 0)]) == ScalingLaw.bounded()


def test_polynomial_law_routes():
    # one dimension goes through the analytic law
    assert polynomial_law({(3,): 1.0}) == ScalingLaw(-1.0 + 1.0 / 3.0, 0, False)
    # two distinct unit directions with positive weights stay bounded
    assert polynomial_law({(1, 0): 1.0, (0, 1): 1.0}) == ScalingLaw.bounded()
    # otherwise the corner bounds on the minimal support apply
    assert polynomial_law({(2, 0): 1.0, (0, 10): 1.0}) == ScalingLaw(-0.5, 0, False)
    assert polynomial_law({(1, 1): 1.0, (2, 2): 9.0}) == ScalingLaw(0.0, 2, False)


# --------------------------------------------------------------------------
# sweep container and CSV interchange

def test_sweep_requires_negative_increasing_p():
    SweepResult((-0.1, -0.01), (1.0, 2.0))
    with pytest.raises(ValueError):
        SweepResult((-0.01, -0.1), (1.0, 2.0))
    with pytest.raises(ValueError):
        SweepResult((-0.1, 0.0), (1.0, 2.0))
    with pytest.raises(ValueError):
        SweepResult((-0.1,), (1.0, 2.0))


def test_sweep_csv_round_trip_is_byte_stable():
    sweep = SweepResult(
        (-0.1, -0.012345678901234567, -1e-7),
        (1.5, 2.25, 1.0 / 3.0),
        (0.0, 0.5, 0.0625),
        "simulation",
    )
    text = sweep.to_csv()
    clone = SweepResult.from_csv(text)
    assert clone.to_csv() == text
    assert clone.source == "simulation"
    np.testing.assert_array_equal(clone.ps, sweep.ps)
    np.testing.assert_array_equal(clone.values, sweep.values)


def test_sweep_csv_sorts_rows_from_file():
    text = ("p,value,stderr,source\n"
            "-1e-4,3.0,0.0,quadrature\n"
            "-1e-2,1.0,0.0,quadrature\n")
    sweep = SweepResult.from_csv(text)
    assert sweep.ps[0] == -1e-2 and sweep.ps[-1] == -1e-4


def test_sweep_csv_rejects_bad_input():
    with pytest.raises(ValueError, match="header"):
        SweepResult.from_csv("a,b\n1,2\n")
    with pytest.raises(ValueError, match="row 3"):
        SweepResult.from_csv(
            "p,value,stderr,source\n-0.1,1.0,0.0,quadrature\n-0.2,oops,0.0,quadrature\n")
    with pytest.raises(ValueError, match="mixed"):
        SweepResult.from_csv(
            "p,value,stderr,source\n-0.1,1.0,0.0,quadrature\n-0.2,2.0,0.0,simulation\n")
    with pytest.raises(ValueError):
        SweepResult.from_csv("p,value,stderr,source\n0.1,1.0,0.0,quadrature\n")


def test_log_spaced_grid_is_negative_and_increasing():
    ps = log_spaced_p(-8, -2, 13)
    assert len(ps) == 13
    assert ps[0] == -1e-2 and math.isclose(ps[-1], -1e-8)
    assert all(a < b < 0 for a, b in zip(ps, ps[1:]))


def test_quadrature_sweep_matches_pointwise_calls():
    symbol = ToolAlpha(2.0)
    g = IndicatorBox(0.0, 1.0)
    ps = log_spaced_p(-6, -2, 6)
    sweep = quadrature_sweep(symbol, g, ps, sigma=1.0, threads=2)
    for p, value in zip(sweep.ps, sweep.values):
        direct = variance_quadrature(VarianceQuery(symbol, g, p, 1.0))
        assert math.isclose(value, direct, rel_tol=1e-12)
    assert sweep.source == "quadrature"
    assert all(a < b for a, b in zip(sweep.values, sweep.values[1:]))


# --------------------------------------------------------------------------
# fitting and classification

def _synthetic(s, k, c, decades=(-8, -2), points=24):
    ps = log_spaced_p(decades[0], decades[1], points)
    q = -ps
    values = np.exp(c) * q ** s * np.where(k > 0, (-np.log(q)) ** k, 1.0)
    return SweepResult(ps, values)


def test_fit_recovers_exact_model():
    for s, k, c in ((-0.5, 0.0, 0.3), (0.0, 2.0, -1.0), (-2.0 / 3.0, 1.0, 0.0)):
        fit = fit_loglog(_synthetic(s, k, c))
        assert abs(fit.s - s) < 1e-6
        assert abs(fit.k - k) < 1e-6
        assert abs(fit.c - c) < 1e-5
        assert fit.residual < 1e-10


@settings(max_examples=60, deadline=None)
@given(
    st.floats(-1.0, 0.0),
    st.integers(0, 3),
    st.floats(-2.0, 2.0),
)
def test_fit_exactness_property(s, k, c):
    fit = fit_loglog(_synthetic(s, float(k), c))
    assert abs(fit.s - s) < 1e-6
    assert abs(fit.k - k) < 1e-6


def test_fit_default_window_uses_smallest_decades():
    # corrupt the large-q half; the default window must ignore it
    sweep = _synthetic(-0.5, 0.0, 0.0, decades=(-8, -2), points=24)
    values = np.array(sweep.values, copy=True)
    mask = -np.asarray(sweep.ps) > 1e-6
    values[mask] *= 5.0
    fit = fit_loglog(SweepResult(sweep.ps, values))
    assert abs(fit.s + 0.5) < 1e-6


def test_fit_explicit_window():
    sweep = _synthetic(-0.5, 0.0, 0.0)
    fit = fit_loglog(sweep, window=(1e-6, 1e-3))
    assert abs(fit.s + 0.5) < 1e-6


def test_fit_needs_enough_small_p_points():
    ps = log_spaced_p(-4, -2, 7)
    with pytest.raises(ValueError):
        fit_loglog(SweepResult(ps, np.ones(7)))
    bad = SweepResult((-3.0, -2.0, -1.5), (1.0, 1.0, 1.0))
    with pytest.raises(ValueError):
        fit_loglog(bad)


def test_fit_result_formatting():
    fit = FitResult(-0.5, 0.0, 1.0, 1e-9, 0.01, 0.02)
    text = str(fit)
    assert "-0.5" in text and "+-" in text


def test_classify_snaps_to_catalog():
    assert classify(-0.497, 0.02) == ScalingLaw(-0.5, 0, False)
    assert classify(-0.9, -0.01) == ScalingLaw(-0.9, 0, False)
    assert classify(0.01, 1.98) == ScalingLaw(0.0, 2, False)
    assert classify(0.0, 0.0) == ScalingLaw.bounded()
    assert classify(-0.43, 0.0) is None
    assert classify(-0.5, 0.4) is None


def test_classify_custom_candidates():
    got = classify(-0.335, 0.0, candidates=[-1.0 / 3.0], tol=0.01)
    assert got == ScalingLaw(-1.0 / 3.0, 0, False)
    assert classify(-0.335, 0.0, candidates=[-0.25], tol=0.01) is None


def test_default_candidates_include_tool_rates():
    cands = default_exponent_candidates()
    assert 0.0 in cands and -1.0 in cands
    assert any(math.isclose(c, -0.5) for c in cands)
    assert any(math.isclose(c, -1.0 + 1.0 / 12.0) for c in cands)
