"""Level sets of the channel symbols and the Efimov constant built from them.

The constant is a weighted sum over odd channels of the length of
``{k >= 0 : S_l^(k) > 1/sqrt(2 pi)}``. Channels above ``l0`` are exactly empty
because the exponential majorant is already below threshold at ``k = 0``.
Level sets are located by a uniform scan plus bisection; no assumption is made
that they are single intervals except for ``l = 1``, where it is cross-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ._roots import bisect
from .errors import ConvergenceError, DomainError
from .kernels import SQRT_2PI, ChannelSymbol, _symbol_rule, default_order, symbol_envelope, symbol_hat
from .params import MassParams, channel_cutoff_k, make_params

__all__ = [
    "LevelSet",
    "ChannelContribution",
    "EfimovReport",
    "THRESHOLD",
    "scan_cutoff",
    "level_set",
    "first_crossing_k1",
    "efimov_constant",
    "f_m",
    "lower_bound_c1",
    "upper_bound_c2",
    "channel_critical_mass",
]

THRESHOLD = 1.0 / SQRT_2PI
SCAN_STEP = 0.01
ROOT_TOL = 1e-14


@dataclass(frozen=True)
class LevelSet:
    l: int
    threshold: float
    intervals: tuple[tuple[float, float], ...]
    measure: float
    scan_max: float
    scan_step: float


@dataclass(frozen=True)
class ChannelContribution:
    l: int
    measure: float
    contribution: float


@dataclass
class EfimovReport:
    m: float
    c_of_m: float
    c1: float
    c2: float
    per_channel: list[ChannelContribution]
    l_max_used: int
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "c": self.c_of_m,
            "c1": self.c1,
            "c2": self.c2,
            "l_max_used": self.l_max_used,
            "per_channel": [
                {"l": c.l, "measure": c.measure, "contribution": c.contribution}
                for c in self.per_channel
            ],
            "notes": list(self.notes),
        }


def scan_cutoff(params: MassParams, l: int, threshold: float) -> float:
    """Right end of the scan window for channel ``l`` at ``threshold``.

    Beyond this point the exponential majorant, and therefore the symbol, is
    below ``threshold``. Clamped below by 1 so an empty window is still probed.
    """
    ratio = params.alpha / (math.sqrt(2.0 * l + 1.0) * threshold)
    if ratio <= 1.0:
        return 1.0
    return max(1.0, math.log(ratio) / params.beta)


def level_set(params: MassParams, l: int, threshold: float = THRESHOLD,
              scan_step: float = SCAN_STEP, quadrature_order: int | None = None,
              tol: float = ROOT_TOL) -> LevelSet:
    """Intervals of ``{k >= 0 : S_l^(k) > threshold}`` for odd ``l``."""
    if l < 1 or l % 2 == 0:
        raise DomainError(f"level sets are defined for odd l >= 1, got l={l}")
    if not threshold > 0:
        raise DomainError(f"threshold must be positive, got {threshold!r}")
    if threshold == THRESHOLD and l <= params.l0:
        kmax = max(1.0, channel_cutoff_k(params, l))
    else:
        kmax = scan_cutoff(params, l, threshold)
    sym = ChannelSymbol(params, l, quadrature_order)
    # the |P_l| envelope is a rigorous non-increasing majorant: shrink the window
    if symbol_envelope(sym, kmax) < threshold:
        if symbol_envelope(sym, 0.0) <= threshold:
            return LevelSet(l, threshold, (), 0.0, 0.0, 0.0)
        kenv = bisect(lambda k: symbol_envelope(sym, k) - threshold, 0.0, kmax, xtol=1e-6)
        kmax = max(1.0, min(kmax, kenv * (1.0 + 1e-6) + 1e-6))
    n = max(2, math.ceil(kmax / scan_step))
    grid = np.linspace(0.0, kmax, n + 1)
    above = symbol_hat(sym, grid) > threshold

    def excess(k: float) -> float:
        return symbol_hat(sym, k) - threshold

    intervals = []
    start = 0.0 if above[0] else None
    for i in range(1, grid.size):
        if above[i] == above[i - 1]:
            continue
        root = bisect(excess, grid[i - 1], grid[i], xtol=tol, polish=False)
        if above[i]:
            start = root
        else:
            intervals.append((start, root))
            start = None
    if start is not None:
        # majorant guarantees the symbol is below threshold at kmax
        intervals.append((start, float(grid[-1])))
    measure = float(sum(b - a for a, b in intervals))
    return LevelSet(l, threshold, tuple(intervals), measure, float(kmax), float(grid[1] - grid[0]))


def first_crossing_k1(params: MassParams, quadrature_order: int | None = None) -> float:
    """Positive root of ``S_1^(k) = 1/sqrt(2 pi)``; 0 when ``Lambda(m) <= 1``."""
    if params.lambda_m <= 1.0:
        return 0.0
    sym = ChannelSymbol(params, 1, quadrature_order)
    hi = max(1.0, channel_cutoff_k(params, 1))
    return bisect(lambda k: symbol_hat(sym, k) - THRESHOLD, 0.0, hi, xtol=1e-15)


def f_m(params: MassParams, x, quadrature_order: int | None = None):
    """Lower-bound generating function; ``F_m(x) = 1`` defines ``C_1``.

    Evaluated directly in the variable ``x`` (the rescaling ``k = 2 pi x / 3``
    of the l = 1 symbol) with the same ``y``-quadrature as the symbols.
    """
    order = quadrature_order or default_order(1)
    y, w, a = _symbol_rule(params, order)
    xa = np.atleast_1d(np.abs(np.asarray(x, dtype=float))).ravel()
    num = (2.0 * math.pi / 3.0) * xa[:, None] * a[None, :]
    den = (math.pi ** 2 / 3.0) * xa[:, None]
    with np.errstate(invalid="ignore"):
        ratio = np.exp(num - den) * np.expm1(-2.0 * num) / np.expm1(-2.0 * den)
    ratio = np.where(xa[:, None] == 0.0, (2.0 / math.pi) * a[None, :], ratio)
    vals = (params.m + 1.0) / math.sqrt(params.m * (params.m + 2.0)) * (
        ratio @ (w * y / np.cos(a)))
    return float(vals[0]) if np.ndim(x) == 0 else vals.reshape(np.shape(x))


def lower_bound_c1(params: MassParams, quadrature_order: int | None = None) -> float:
    """Unique positive root of ``F_m(x) = 1``; 0 outside the Efimov regime."""
    if params.lambda_m <= 1.0:
        return 0.0
    hi = max(1.0, 3.0 * channel_cutoff_k(params, 1) / (2.0 * math.pi))
    return bisect(lambda x: f_m(params, x, quadrature_order) - 1.0, 0.0, hi, xtol=1e-15)


def upper_bound_c2(params: MassParams) -> float:
    """Closed-form majorant of the Efimov constant from the exponential symbol bound."""
    l0 = params.l0
    if l0 < 1:
        return 0.0
    log_term = math.log(math.sqrt(2.0 * math.pi / 3.0) * params.alpha)
    return log_term * (l0 * l0 + 3 * l0 + 2) / (4.0 * math.pi * params.beta)


def efimov_constant(params: MassParams, quadrature_order: int | None = None,
                    scan_step: float = SCAN_STEP) -> EfimovReport:
    """Efimov constant with both bounds and a per-channel breakdown."""
    per_channel = []
    notes = []
    for l in range(1, params.l0 + 1, 2):
        order = None if quadrature_order is None else max(quadrature_order, 2 * (l + 1))
        ls = level_set(params, l, THRESHOLD, scan_step=scan_step, quadrature_order=order)
        if l == 1 and len(ls.intervals) > 1:
            raise ConvergenceError(
                f"l=1 level set at m={params.m} split into {len(ls.intervals)} intervals")
        if l == 1 and ls.intervals and ls.intervals[0][0] != 0.0:
            raise ConvergenceError(f"l=1 level set at m={params.m} does not start at k=0")
        per_channel.append(ChannelContribution(l, ls.measure, (2 * l + 1) / (2.0 * math.pi) * ls.measure))
        if l >= 3 and ls.measure == 0.0:
            if ls.scan_max == 0.0:
                notes.append(f"l={l}: empty, |P_l| envelope below threshold at k=0")
            else:
                notes.append(f"l={l}: empty on scanned window [0, {ls.scan_max:.6g}] step {ls.scan_step:.3g}")
    notes.append(f"channels l > {params.l0} vanish: exponential bound below threshold at k=0")
    c = 0.0
    for contrib in per_channel:
        c += contrib.contribution
    return EfimovReport(
        m=params.m,
        c_of_m=c,
        c1=lower_bound_c1(params, quadrature_order),
        c2=upper_bound_c2(params),
        per_channel=per_channel,
        l_max_used=params.l0,
        notes=notes,
    )


def channel_critical_mass(l: int, quadrature_order: int | None = None,
                          bracket: tuple[float, float] = (1e-4, 10.0)) -> float:
    """Mass ``m_l*`` at which ``sqrt(2 pi) S_l^(0) = 1``; decreasing in odd ``l``."""
    if l < 1 or l % 2 == 0:
        raise DomainError(f"channel critical masses are defined for odd l >= 1, got l={l}")
    def excess(m: float) -> float:
        sym = ChannelSymbol(make_params(m), l, quadrature_order)
        return SQRT_2PI * symbol_hat(sym, 0.0) - 1.0

    return bisect(excess, bracket[0], bracket[1], xtol=1e-14)
