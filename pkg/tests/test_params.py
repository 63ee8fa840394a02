import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, strategies as st

from efimov.errors import DomainError
from efimov.params import (
    channel_cutoff_k,
    critical_mass,
    lambda_of_m,
    largest_odd_below,
    make_params,
)
from oracles import alpha_mp, critical_mass_mp, lambda_mp

masses = st.floats(min_value=1e-3, max_value=1e3, allow_nan=False)


def test_lambda_at_unit_mass_matches_closed_form():
    expected = float((8 / mp.pi) * (1 / mp.sqrt(3) - mp.pi / 6))
    assert expected == pytest.approx(0.136877, abs=1e-6)
    assert make_params(1.0).lambda_m == pytest.approx(expected, rel=1e-14)


def test_lambda_at_reported_critical_mass():
    assert make_params(1 / 13.607).lambda_m == pytest.approx(1.0, abs=1e-3)


def test_lambda_brackets_one():
    lo, hi = lambda_of_m(0.05), lambda_of_m(0.1)
    assert lo > 1 > hi
    assert lo == pytest.approx(float(lambda_mp(0.05)), rel=1e-13)
    assert hi == pytest.approx(float(lambda_mp(0.1)), rel=1e-13)
    assert lo == pytest.approx(1.306, abs=2e-3)
    assert hi == pytest.approx(0.800, abs=2e-3)


@pytest.mark.parametrize("m", [0.0, -1.0, float("nan"), float("inf"), "x"])
def test_make_params_rejects_bad_mass(m):
    with pytest.raises(DomainError):
        make_params(m)


@given(masses)
def test_field_invariants(m):
    p = make_params(m)
    assert 0 < p.mu < 1 and 0 < p.n_red < 1
    assert p.b > 0 and p.c_norm > 0
    assert 0 < p.beta < math.pi / 2
    assert p.l0 == -1 or p.l0 % 2 == 1
    if p.l0 >= 1:
        assert p.l0 < p.g <= p.l0 + 2
    else:
        assert p.g <= 1


@given(masses)
def test_alpha_against_mpmath(m):
    assert make_params(m).alpha == pytest.approx(float(alpha_mp(m)), rel=1e-12)


def test_lambda_strictly_decreasing_on_grid():
    grid = np.geomspace(1e-3, 10, 400)
    vals = [lambda_of_m(m) for m in grid]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_beta_increasing_in_mass():
    grid = np.geomspace(1e-3, 10, 200)
    betas = [make_params(m).beta for m in grid]
    assert all(0 < b < math.pi / 2 for b in betas)
    assert all(b > a for a, b in zip(betas, betas[1:]))


@pytest.mark.parametrize("g, expected", [
    (7.0, 5), (7.0001, 7), (6.65, 5), (6.278, 5), (1.0, -1), (1.5, 1), (3.0, 1), (0.2, -1),
])
def test_largest_odd_below(g, expected):
    assert largest_odd_below(g) == expected


def test_critical_mass():
    ms = critical_mass()
    assert abs(1 / ms - 13.607) <= 0.01
    assert 0.05 < ms < 0.1
    assert abs(lambda_of_m(ms) - 1.0) <= 1e-12
    assert ms == pytest.approx(float(critical_mass_mp()), rel=1e-13)


def test_l0_at_critical_mass_is_five():
    assert make_params(critical_mass()).l0 == 5


def test_l0_at_least_one_below_critical_mass():
    ms = critical_mass()
    for m in np.linspace(1e-3, ms, 60, endpoint=False):
        assert make_params(m).l0 >= 1


def test_cutoff_decreasing_in_l_and_positive():
    p = make_params(0.01)
    ks = [channel_cutoff_k(p, l) for l in range(1, p.l0 + 1, 2)]
    assert all(b < a for a, b in zip(ks, ks[1:]))
    assert ks[-1] > 0


def test_cutoff_matches_bound_crossing_at_critical_mass():
    p = make_params(critical_mass())
    k1 = channel_cutoff_k(p, 1)
    crossing = mp.findroot(
        lambda k: p.alpha * mp.exp(-p.beta * k) / mp.sqrt(3) - 1 / mp.sqrt(2 * mp.pi), 1.0)
    assert k1 == pytest.approx(float(crossing), rel=1e-13)


@pytest.mark.parametrize("l", [0, 2, -1, 7])
def test_cutoff_domain(l):
    p = make_params(critical_mass())  # l0 = 5
    with pytest.raises(DomainError):
        channel_cutoff_k(p, l)
