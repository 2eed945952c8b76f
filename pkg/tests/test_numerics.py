"""Quadrature rules and bracketing root search on problems with known answers."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from swkb_lab.errors import BracketError
from swkb_lab.quadrature import sine_gauss, tanh_sinh
from swkb_lab.roots import expand_bracket, solve_bracketed


def semicircle(x, dl, dr):
    # sqrt((x - x1)(x2 - x)) formed from the cancellation-free distances
    return np.sqrt(dl * dr)


@pytest.mark.parametrize("rule", [sine_gauss, tanh_sinh])
def test_semicircle_area(rule):
    out = rule(semicircle, -1.0, 1.0)
    assert out.converged
    assert out.value == pytest.approx(math.pi / 2, rel=1e-13)


def test_inverse_sqrt_endpoints_tanh_sinh():
    out = tanh_sinh(lambda x, dl, dr: 1.0 / np.sqrt(dl * dr), 0.0, 2.0)
    assert out.converged
    assert out.value == pytest.approx(math.pi, rel=1e-10)


def test_inverse_sqrt_endpoints_sine_gauss():
    # the Jacobian cancels the singularity exactly
    out = sine_gauss(lambda x, dl, dr: 1.0 / np.sqrt(dl * dr), -3.0, 5.0)
    assert out.value == pytest.approx(math.pi, rel=1e-13)


def test_endpoint_distances_are_exact():
    seen = {}

    def f(x, dl, dr):
        seen["err"] = np.max(np.abs((dl + dr) - 2.0))
        seen["dmin"] = min(dl.min(), dr.min())
        seen["xmin"], seen["xmax"] = x.min(), x.max()
        return np.ones_like(x)

    tanh_sinh(f, 10.0, 12.0, max_refinements=1)
    assert seen["err"] <= 1e-13
    # distances resolve far below the spacing of floats near x = 10 ...
    assert 0.0 < seen["dmin"] < 1e-20
    # ... while node positions stay clamped inside the interval
    assert seen["xmin"] > 10.0 and seen["xmax"] < 12.0


def test_not_converged_is_reported():
    # a kink inside the interval defeats the 1e-15 target within one doubling
    out = sine_gauss(lambda x, dl, dr: np.abs(x - 0.1234), -1.0, 1.0,
                     max_refinements=1, rel_tol=1e-15)
    assert not out.converged
    assert out.refinements_used == 1
    assert out.error_estimate > 0


@settings(max_examples=40, deadline=None)
@given(x1=st.floats(-10, 10), width=st.floats(1e-3, 20))
def test_semicircle_any_interval(x1, width):
    x2 = x1 + width
    r = width / 2
    for rule in (sine_gauss, tanh_sinh):
        out = rule(semicircle, x1, x2, scale=r * r)
        assert out.value == pytest.approx(math.pi * r * r / 2, rel=1e-11)


def test_bracket_expands_to_infinity():
    lo, hi = expand_bracket(lambda x: x - 1000.0, 0.0, +1, math.inf)
    assert lo < 1000.0 <= hi
    assert solve_bracketed(lambda x: x - 1000.0, lo, hi) == pytest.approx(1000.0, rel=1e-15)


def test_bracket_approaches_open_edge():
    # root 1e-9 away from an open endpoint at 0
    f = lambda x: x - 1e-9  # noqa: E731
    lo, hi = expand_bracket(f, 1.0, -1, 0.0, edge_open=True)
    assert 0.0 < lo <= 1e-9 <= hi
    assert solve_bracketed(f, lo, hi) == pytest.approx(1e-9, rel=1e-12)


def test_bracket_fails_without_sign_change():
    with pytest.raises(BracketError):
        expand_bracket(lambda x: 1.0 + x * x, 0.0, +1, 5.0, edge_open=False)
    with pytest.raises(BracketError):
        expand_bracket(lambda x: 1.0 + math.exp(x), 0.0, -1, -math.inf)


def test_bracket_direction_validated():
    with pytest.raises(ValueError):
        expand_bracket(lambda x: x, 0.0, 0, 1.0)
