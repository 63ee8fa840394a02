"""Mass-dependent constants of the two-fermion plus one-particle system.

Fermions carry unit mass and the third particle has mass ``m``. Every field of
:class:`MassParams` is a closed-form expression in ``m``; the only iterative
computation here is the solve of ``Lambda(m) = 1`` for the critical mass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from ._roots import bisect
from .errors import DomainError

__all__ = [
    "MassParams",
    "make_params",
    "lambda_of_m",
    "alpha_of_m",
    "beta_of_m",
    "largest_odd_below",
    "critical_mass",
    "channel_cutoff_k",
]


def _check_mass(m: float) -> float:
    try:
        m = float(m)
    except (TypeError, ValueError):
        raise DomainError(f"mass must be a real number, got {m!r}") from None
    if not math.isfinite(m) or m <= 0.0:
        raise DomainError(f"mass must be positive and finite, got {m!r}")
    return m


def _asin(v: float) -> float:
    return math.asin(min(1.0, max(-1.0, v)))


def lambda_of_m(m: float) -> float:
    """Maximum of the l = 1 channel symbol times sqrt(2 pi); decreasing in m."""
    m = _check_mass(m)
    return 2.0 * (m + 1.0) ** 2 / math.pi * (
        1.0 / math.sqrt(m * (m + 2.0)) - _asin(1.0 / (m + 1.0)))


def alpha_of_m(m: float) -> float:
    m = _check_mass(m)
    return ((m + 1.0) ** 1.5 / (2.0 * math.sqrt(math.pi) * math.sqrt(m * (m + 2.0)))
            * math.sqrt(math.log1p(2.0 / m)))


def beta_of_m(m: float) -> float:
    m = _check_mass(m)
    return 0.5 * math.pi - _asin(1.0 / (m + 1.0))


def largest_odd_below(g: float) -> int:
    """Largest odd integer strictly smaller than ``g``; -1 if none is >= 1."""
    if g <= 1.0:
        return -1
    n = math.ceil(g) - 1  # largest integer < g
    if n % 2 == 0:
        n -= 1
    return n


@dataclass(frozen=True)
class MassParams:
    """Closed-form constants for mass ratio ``m``.

    Attributes
    ----------
    mu, n_red
        Reduced masses ``m/(m+1)`` and ``(m+1)/(m+2)`` of the fermion/particle pair.
    b
        Prefactor of the full-angle kernel.
    c_norm
        Normalisation of the resonance projection, ``2^{5/2} pi^2 mu^{3/2}``.
    lambda_m
        ``Lambda(m)``; the Efimov regime is ``lambda_m > 1``.
    alpha, beta
        Amplitude and decay rate of the exponential symbol bound.
    l0
        Largest odd channel whose symbol bound can exceed ``1/sqrt(2 pi)``.
    """

    m: float
    mu: float
    n_red: float
    b: float
    c_norm: float
    lambda_m: float
    alpha: float
    beta: float
    l0: int

    @property
    def g(self) -> float:
        """``pi alpha^2 - 1/2``, the quantity whose odd floor defines ``l0``."""
        return math.pi * self.alpha ** 2 - 0.5


def make_params(m: float) -> MassParams:
    m = _check_mass(m)
    alpha = alpha_of_m(m)
    return MassParams(
        m=m,
        mu=m / (m + 1.0),
        n_red=(m + 1.0) / (m + 2.0),
        b=(m + 1.0) / (4.0 * math.pi ** 2 * math.sqrt(m * (m + 2.0))),
        c_norm=2.0 ** 2.5 * math.pi ** 2 * (m / (m + 1.0)) ** 1.5,
        lambda_m=lambda_of_m(m),
        alpha=alpha,
        beta=beta_of_m(m),
        l0=largest_odd_below(math.pi * alpha ** 2 - 0.5),
    )


@lru_cache(maxsize=None)
def critical_mass() -> float:
    """Unique root of ``Lambda(m) = 1``.

    Lambda diverges as m -> 0 and vanishes as m -> infinity, so the bracket
    ``[1e-6, 10]`` always straddles the root.
    """
    return bisect(lambda m: lambda_of_m(m) - 1.0, 1e-6, 10.0, xtol=1e-14)


def channel_cutoff_k(params: MassParams, l: int) -> float:
    """Momentum beyond which the channel-``l`` symbol is below ``1/sqrt(2 pi)``.

    Solves ``alpha e^{-beta k} / sqrt(2l+1) = 1/sqrt(2 pi)``; defined only for
    odd ``1 <= l <= l0``.
    """
    if l < 1 or l % 2 == 0:
        raise DomainError(f"channel must be odd and >= 1, got l={l}")
    if l > params.l0:
        raise DomainError(f"channel l={l} exceeds l0={params.l0} at m={params.m}")
    return math.log(math.sqrt(2.0 * math.pi) * params.alpha
                    / math.sqrt(2.0 * l + 1.0)) / params.beta
