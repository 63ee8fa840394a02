import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from efimov.errors import DomainError
from efimov.kernels import (
    ChannelSymbol,
    kernel_channel,
    kernel_full,
    legendre,
    legendre_table,
    symbol_hat,
    symbol_upper_bound,
)
from efimov.params import make_params
from oracles import channel_kernel_mp, direct_fourier

MASSES = [0.005, 0.05, 0.2, 1.0, 5.0]
K_GRID = np.arange(0.0, 10.0 + 1e-9, 0.1)


def test_legendre_small_cases():
    assert legendre(0, 0.7) == 1.0
    assert legendre(1, 0.3) == 0.3
    assert legendre(3, 0.5) == pytest.approx(-0.4375, abs=1e-15)


@pytest.mark.parametrize("l", [0, 1, 2, 5, 12, 40])
def test_legendre_matches_numpy(l):
    y = np.linspace(-1, 1, 101)
    coef = np.zeros(l + 1)
    coef[l] = 1.0
    np.testing.assert_allclose(legendre(l, y), np.polynomial.legendre.legval(y, coef), atol=1e-13)
    np.testing.assert_allclose(legendre_table(l, y)[l], legendre(l, y), atol=0)


@given(st.integers(0, 60), st.floats(-1, 1))
def test_legendre_bounded(l, y):
    assert abs(legendre(l, y)) <= 1 + 1e-12


def test_legendre_domain():
    with pytest.raises(DomainError):
        legendre(2, 1.5)
    with pytest.raises(DomainError):
        legendre(-1, 0.0)


@given(st.sampled_from(MASSES), st.floats(-30, 30), st.floats(-1, 1))
def test_kernel_full_even_and_negative(m, x, y):
    p = make_params(m)
    assert kernel_full(p, x, y) == kernel_full(p, -x, y)
    assert kernel_full(p, x, y) < 0


def test_kernel_full_corner():
    p = make_params(0.3)
    assert kernel_full(p, 0.0, -1.0) == pytest.approx(-p.b * (p.m + 1) / p.m, rel=1e-14)
    with pytest.raises(DomainError):
        kernel_full(p, 0.0, 1.01)


@pytest.mark.parametrize("m", MASSES)
def test_channel_zero_closed_form(m):
    p = make_params(m)
    c = m + 1
    x = np.array([0.0, 0.01, 0.2, 1.0, 3.0, 8.0])
    ch = np.cosh(x)
    exact = -2 * math.pi * p.b * c * np.log((ch + 1 / c) / (ch - 1 / c))
    np.testing.assert_allclose(kernel_channel(ChannelSymbol(p, 0), x), exact, rtol=1e-12)


@pytest.mark.parametrize("m", [0.005, 0.05, 1.0])
@pytest.mark.parametrize("l", [1, 2, 3, 6, 7])
def test_channel_against_legendre_q(m, l):
    # round-off scale of the Legendre-weighted sum is the l = 0 kernel
    p = make_params(m)
    sym, sym0 = ChannelSymbol(p, l), ChannelSymbol(p, 0)
    for x in [0.0, 0.05, 0.4, 1.5, 4.0]:
        ref = channel_kernel_mp(m, l, x)
        assert abs(kernel_channel(sym, x) - ref) <= 1e-12 * abs(kernel_channel(sym0, x))


@pytest.mark.parametrize("m", MASSES)
@pytest.mark.parametrize("l", range(8))
def test_channel_even_and_decay_bound(m, l):
    p = make_params(m)
    sym = ChannelSymbol(p, l)
    x = np.linspace(0, 12, 97)
    vals = kernel_channel(sym, x)
    np.testing.assert_array_equal(vals, kernel_channel(sym, -x))
    bound = 4 * math.pi * p.b / (np.cosh(x) - 1 / (m + 1))
    assert np.all(np.abs(vals) <= bound * (1 + 1e-12))


@pytest.mark.parametrize("m", MASSES)
@pytest.mark.parametrize("l", range(8))
def test_quadrature_refinement(m, l):
    p = make_params(m)
    a, b = ChannelSymbol(p, l), ChannelSymbol(p, l, 2 * ChannelSymbol(p, l).quadrature_order)
    x = np.linspace(0, 6, 61)
    ka, kb = kernel_channel(a, x), kernel_channel(b, x)
    scale = np.abs(kernel_channel(ChannelSymbol(p, 0), x))
    assert np.all(np.abs(ka - kb) <= 1e-12 * scale)
    sig = np.abs(kb) >= 1e-3 * scale
    assert np.all(np.abs(ka - kb)[sig] <= 1e-10 * np.abs(kb)[sig])
    sa, sb = symbol_hat(a, K_GRID), symbol_hat(b, K_GRID)
    sscale = np.abs(symbol_hat(ChannelSymbol(p, 0), K_GRID))
    assert np.all(np.abs(sa - sb) <= 1e-12 * sscale)
    sig = np.abs(sb) >= 1e-3 * sscale
    assert np.all(np.abs(sa - sb)[sig] <= 1e-10 * np.abs(sb)[sig])


def test_quadrature_order_invariant():
    p = make_params(0.1)
    with pytest.raises(DomainError):
        ChannelSymbol(p, 10, quadrature_order=20)
    assert ChannelSymbol(p, 40).quadrature_order == 164


@pytest.mark.parametrize("m", MASSES)
def test_symbol_l1_at_zero_is_lambda(m):
    p = make_params(m)
    assert symbol_hat(ChannelSymbol(p, 1), 0.0) * math.sqrt(2 * math.pi) == pytest.approx(
        p.lambda_m, rel=1e-12)


@pytest.mark.parametrize("m", MASSES)
def test_symbol_even_in_k(m):
    p = make_params(m)
    for l in range(6):
        sym = ChannelSymbol(p, l)
        np.testing.assert_array_equal(symbol_hat(sym, K_GRID), symbol_hat(sym, -K_GRID))


@pytest.mark.parametrize("m", [0.005, 0.05, 0.2, 1.0])
@pytest.mark.parametrize("l", range(8))
def test_symbol_against_direct_fourier(m, l):
    p = make_params(m)
    sym = ChannelSymbol(p, l)
    ks = np.linspace(0, 10, 41)
    ref = direct_fourier(lambda x: kernel_channel(sym, x), ks)
    np.testing.assert_allclose(symbol_hat(sym, ks), ref, atol=1e-6, rtol=0)


def test_symbol_large_k_decays_without_overflow():
    p = make_params(0.05)
    for l in range(4):
        v = symbol_hat(ChannelSymbol(p, l), np.array([50.0, 500.0, 5000.0]))
        assert np.all(np.isfinite(v))
        assert np.all(np.abs(v) < 1e-3)
        assert abs(v[-1]) < 1e-100


@pytest.mark.parametrize("m", MASSES)
def test_sign_and_channel_monotonicity(m):
    p = make_params(m)
    vals = {l: symbol_hat(ChannelSymbol(p, l), K_GRID) for l in range(10)}
    for l in range(10):
        if l % 2:
            assert np.all(vals[l] >= 0)
        else:
            assert np.all(vals[l] <= 0)
    for l in range(8):
        if l % 2:
            assert np.all(vals[l + 2] <= vals[l])
        else:
            assert np.all(vals[l + 2] >= vals[l])


@pytest.mark.parametrize("m", MASSES)
def test_l1_symbol_maximal_at_zero(m):
    p = make_params(m)
    s = symbol_hat(ChannelSymbol(p, 1), np.linspace(0, 10, 1001))
    assert np.argmax(s) == 0
    assert s[0] == pytest.approx(p.lambda_m / math.sqrt(2 * math.pi), rel=1e-12)


def test_upper_bound_values_and_monotonicity():
    p = make_params(0.05)
    assert symbol_upper_bound(p, 3, 0.0) == pytest.approx(p.alpha / math.sqrt(7), rel=1e-15)
    ks = np.linspace(0, 10, 50)
    b1, b3 = symbol_upper_bound(p, 1, ks), symbol_upper_bound(p, 3, ks)
    assert np.all(np.diff(b1) < 0) and np.all(b3 < b1)
    with pytest.raises(DomainError):
        symbol_upper_bound(p, 2, 0.0)
    with pytest.raises(DomainError):
        symbol_upper_bound(p, 1, -1.0)


@pytest.mark.parametrize("m", MASSES)
def test_upper_bound_dominates(m):
    p = make_params(m)
    for l in range(1, 16, 2):
        s = symbol_hat(ChannelSymbol(p, l), K_GRID)
        assert np.all(s <= symbol_upper_bound(p, l, K_GRID) + 1e-12)
