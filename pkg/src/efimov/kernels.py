"""Angular-channel kernels and their Fourier symbols.

The full-angle kernel is ``S(x, y) = -b / (cosh x + y/(m+1))`` with ``y`` the
cosine of the angle between the two momenta. Projecting on the Legendre
polynomial ``P_l`` gives the translation-invariant channel kernel
``S_l(x) = 2 pi int_{-1}^{1} P_l(y) S(x, y) dy`` and its symbol

    S_l^(k) = (1/sqrt(2 pi)) int S_l(x) e^{-ikx} dx,

which is available in closed form up to a one-dimensional integral over
``y in [0, 1]``. Both integrals are evaluated with composite Gauss-Legendre
rules graded towards the nearby singularity of the integrand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

from .errors import DomainError
from .params import MassParams

__all__ = [
    "ChannelSymbol",
    "legendre",
    "legendre_table",
    "kernel_full",
    "kernel_channel",
    "symbol_hat",
    "symbol_upper_bound",
    "symbol_envelope",
    "graded_rule",
]

SQRT_2PI = math.sqrt(2.0 * math.pi)


def default_order(l: int) -> int:
    return max(64, 4 * (l + 1))


@dataclass(frozen=True)
class ChannelSymbol:
    """Evaluator handle for channel ``l`` at fixed mass parameters."""

    params: MassParams
    l: int
    quadrature_order: int | None = None

    def __post_init__(self):
        if self.l < 0 or int(self.l) != self.l:
            raise DomainError(f"channel must be a non-negative integer, got {self.l!r}")
        if self.quadrature_order is None:
            object.__setattr__(self, "quadrature_order", default_order(self.l))
        if self.quadrature_order < 2 * (self.l + 1):
            raise DomainError(
                f"quadrature order {self.quadrature_order} cannot resolve P_{self.l}; "
                f"need at least {2 * (self.l + 1)}")

    @property
    def odd(self) -> bool:
        return self.l % 2 == 1


def legendre(l: int, y):
    """``P_l(y)`` by the upward three-term recurrence; accepts arrays."""
    if l < 0:
        raise DomainError(f"Legendre order must be non-negative, got {l}")
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) > 1.0):
        raise DomainError("Legendre argument must satisfy |y| <= 1")
    p0 = np.ones_like(y)
    if l == 0:
        return p0 if p0.ndim else float(p0)
    p1 = y.copy()
    for j in range(1, l):
        p0, p1 = p1, ((2 * j + 1) * y * p1 - j * p0) / (j + 1)
    return p1 if p1.ndim else float(p1)


def legendre_table(lmax: int, y) -> np.ndarray:
    """Rows ``P_0(y) .. P_lmax(y)`` stacked into an ``(lmax+1, len(y))`` array."""
    y = np.asarray(y, dtype=float)
    out = np.empty((lmax + 1,) + y.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = y
    for j in range(1, lmax):
        out[j + 1] = ((2 * j + 1) * y * out[j] - j * out[j - 1]) / (j + 1)
    return out


@lru_cache(maxsize=64)
def _gauss(order: int):
    x, w = roots_legendre(order)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def graded_rule(lo: float, hi: float, singularity: float, order: int,
                max_depth: int = 60):
    """Composite Gauss-Legendre nodes/weights on ``[lo, hi]``.

    ``singularity`` is a real point outside the interval where the integrand
    blows up. Panels are bisected while their distance to the singularity is
    smaller than their width, which grades the mesh geometrically towards the
    end nearest the singularity and keeps every panel well inside the region
    of analyticity.
    """
    gx, gw = _gauss(order)
    panels = []
    stack = [(lo, hi, 0)]
    while stack:
        a, b, depth = stack.pop()
        dist = min(abs(a - singularity), abs(b - singularity))
        if dist < (b - a) and depth < max_depth:
            mid = 0.5 * (a + b)
            stack.append((mid, b, depth + 1))
            stack.append((a, mid, depth + 1))
        else:
            panels.append((a, b))
    panels.sort()
    nodes = np.concatenate([0.5 * (b - a) * gx + 0.5 * (a + b) for a, b in panels])
    weights = np.concatenate([0.5 * (b - a) * gw for a, b in panels])
    return nodes, weights


def kernel_full(params: MassParams, x, y):
    """Full-angle kernel ``-b / (cosh x + y/(m+1))``; strictly negative."""
    y = np.asarray(y, dtype=float)
    if np.any(np.abs(y) > 1.0):
        raise DomainError("angle cosine must satisfy |y| <= 1")
    val = -params.b / (np.cosh(x) + y / (params.m + 1.0))
    return val if np.ndim(val) else float(val)


def kernel_channel(symbol: ChannelSymbol, x):
    """Channel kernel ``-2 pi b int_{-1}^{1} P_l(y) / (cosh x + y/(m+1)) dy``.

    Vectorised over ``x``. One graded rule, built for the smallest ``|x|`` in
    the batch (where the pole at ``y = -(m+1) cosh x`` is closest to the
    interval), serves every entry.
    """
    p = symbol.params
    xa = np.abs(np.asarray(x, dtype=float))
    scalar = xa.ndim == 0
    xa = np.atleast_1d(xa).ravel()
    c = p.m + 1.0
    pole = -c * math.cosh(float(xa.min())) if xa.size else -c
    y, w = graded_rule(-1.0, 1.0, pole, symbol.quadrature_order)
    wp = w * legendre(symbol.l, y)
    ch = np.cosh(xa)
    out = np.empty_like(ch)
    # chunk to bound the temporary (len(x) x len(y)) array
    step = max(1, 2_000_000 // y.size)
    for s in range(0, ch.size, step):
        den = ch[s:s + step, None] + y[None, :] / c
        out[s:s + step] = (wp[None, :] / den).sum(axis=1)
    out *= -2.0 * math.pi * p.b
    return float(out[0]) if scalar else out.reshape(np.shape(x))


def _sinh_ratio(k: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``sinh(k a) / sinh(k pi/2)`` for ``k >= 0``, ``0 <= a < pi/2``; limit 2a/pi at k=0."""
    k = k[:, None]
    a = a[None, :]
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.exp(k * (a - 0.5 * math.pi)) * np.expm1(-2.0 * k * a) / np.expm1(-math.pi * k)
    return np.where(k == 0.0, (2.0 / math.pi) * a, r)


def _cosh_ratio(k: np.ndarray, a: np.ndarray) -> np.ndarray:
    """``cosh(k a) / cosh(k pi/2)`` for ``k >= 0``, overflow-free."""
    k = k[:, None]
    a = a[None, :]
    return np.exp(k * (a - 0.5 * math.pi)) * (1.0 + np.exp(-2.0 * k * a)) / (1.0 + np.exp(-math.pi * k))


def _symbol_rule(params: MassParams, order: int):
    # branch point of 1/cos(arcsin(y/(m+1))) sits at y = m + 1
    y, w = graded_rule(0.0, 1.0, params.m + 1.0, order)
    a = np.arcsin(y / (params.m + 1.0))
    return y, w, a


@lru_cache(maxsize=512)
def _symbol_weights(params: MassParams, l: int, order: int, absolute: bool = False):
    y, w, a = _symbol_rule(params, order)
    pl = legendre(l, y)
    weights = w * (np.abs(pl) if absolute else pl) / np.cos(a)
    a.setflags(write=False)
    weights.setflags(write=False)
    return a, weights


def symbol_hat(symbol: ChannelSymbol, k):
    """Fourier symbol of channel ``l`` at momentum ``k``; even in ``k``.

    Odd ``l`` uses the sinh/sinh form and is non-negative; even ``l`` uses the
    cosh/cosh form with an overall minus sign and is non-positive.
    """
    p = symbol.params
    ka = np.abs(np.asarray(k, dtype=float))
    scalar = ka.ndim == 0
    ka = np.atleast_1d(ka).ravel()
    a, weights = _symbol_weights(p, symbol.l, symbol.quadrature_order)
    pref = (p.m + 1.0) / math.sqrt(p.m * (p.m + 2.0)) / SQRT_2PI
    if symbol.odd:
        vals = pref * (_sinh_ratio(ka, a) @ weights)
    else:
        vals = -pref * (_cosh_ratio(ka, a) @ weights)
    return float(vals[0]) if scalar else vals.reshape(np.shape(k))


def symbol_envelope(symbol: ChannelSymbol, k):
    """Non-increasing majorant of ``|S_l^(k)|`` on ``k >= 0``.

    Replaces ``P_l`` by ``|P_l|`` in the integral; the sinh and cosh ratios are
    non-increasing in ``k`` for every ``y``, hence so is the envelope.
    """
    p = symbol.params
    ka = np.atleast_1d(np.abs(np.asarray(k, dtype=float))).ravel()
    a, weights = _symbol_weights(p, symbol.l, symbol.quadrature_order, True)
    pref = (p.m + 1.0) / math.sqrt(p.m * (p.m + 2.0)) / SQRT_2PI
    ratio = _sinh_ratio(ka, a) if symbol.odd else _cosh_ratio(ka, a)
    vals = pref * (ratio @ weights)
    return float(vals[0]) if np.ndim(k) == 0 else vals.reshape(np.shape(k))


def symbol_at_zero(params: MassParams, l: int, quadrature_order: int | None = None) -> float:
    """``S_l^(0)``; for ``l = 1`` this equals ``Lambda(m)/sqrt(2 pi)``."""
    return symbol_hat(ChannelSymbol(params, l, quadrature_order), 0.0)


def symbol_upper_bound(params: MassParams, l: int, k):
    """Exponential majorant ``alpha e^{-beta k} / sqrt(2l+1)`` of an odd-channel symbol."""
    if l % 2 == 0 or l < 1:
        raise DomainError(f"the exponential bound holds for odd l >= 1, got l={l}")
    k = np.asarray(k, dtype=float)
    if np.any(k < 0):
        raise DomainError("the exponential bound is stated for k >= 0")
    val = params.alpha * np.exp(-params.beta * k) / math.sqrt(2.0 * l + 1.0)
    return val if val.ndim else float(val)
