"""Bracketed scalar root finding used by every solve in the package."""

from __future__ import annotations

import math
from typing import Callable

from .errors import ConvergenceError


def bisect(f: Callable[[float], float], lo: float, hi: float,
           xtol: float = 1e-14, maxiter: int = 400, polish: bool = True) -> float:
    """Root of ``f`` on ``[lo, hi]`` by bisection, optionally one secant step.

    ``f(lo)`` and ``f(hi)`` must have opposite signs (or one of them be zero).
    The bracket is halved until its width is below ``xtol`` scaled by the
    magnitude of the endpoints; the final secant step is only accepted when it
    stays inside the last bracket.
    """
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if not (math.isfinite(flo) and math.isfinite(fhi)) or (flo > 0) == (fhi > 0):
        raise ConvergenceError(
            f"root not bracketed: f({lo!r})={flo!r}, f({hi!r})={fhi!r}")
    for _ in range(maxiter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol * max(1.0, abs(lo), abs(hi)) or mid in (lo, hi):
            break
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid > 0) == (flo > 0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    else:
        raise ConvergenceError("bisection did not reach the requested width")
    if polish and fhi != flo:
        x = hi - fhi * (hi - lo) / (fhi - flo)
        if lo <= x <= hi:
            return x
    return lo if abs(flo) <= abs(fhi) else hi
