"""Nyström discretisation of the truncated channel operators and eigenvalue counts.

The channel operator ``S_R^(l)`` acts on ``L^2((0, R))`` with the difference
kernel ``S_l(x - x')``. On a uniform midpoint grid its matrix is symmetric
Toeplitz; a Gauss-panel rule is kept as a cross-check. Counts of eigenvalues
above a threshold are taken from the inertia of a symmetric indefinite
factorisation, with a full eigendecomposition as fallback and oracle.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .constants import level_set
from .errors import DomainError, ResourceCapError
from .kernels import SQRT_2PI, ChannelSymbol, kernel_channel, symbol_upper_bound
from .params import MassParams

log = logging.getLogger(__name__)

__all__ = [
    "Discretization",
    "CountResult",
    "ChannelCount",
    "SpectralRun",
    "ConvergenceRow",
    "ConvergenceTable",
    "MAX_NODES",
    "DEGENERACY_TOL",
    "r_of_z",
    "nodes_and_weights",
    "build_channel_matrix",
    "inertia_count",
    "eigen_count",
    "count_above",
    "count_above_detailed",
    "largest_eigenvalue",
    "run_counting",
    "predicted_ratio",
    "convergence_study",
    "random_identity_samples",
    "map_identity_sides",
    "check_map_identity",
    "prefactor_identity",
]

MAX_NODES = 6000
DEGENERACY_TOL = 1e-9
RULES = ("uniform-midpoint", "gauss-panel")
PANEL_POINTS = 8


@dataclass(frozen=True)
class Discretization:
    big_r: float
    grid_n: int
    rule: str = "uniform-midpoint"

    def __post_init__(self):
        if not (math.isfinite(self.big_r) and self.big_r > 0):
            raise DomainError(f"interval length must be positive, got {self.big_r!r}")
        if self.rule not in RULES:
            raise DomainError(f"unknown rule {self.rule!r}; expected one of {RULES}")
        if self.grid_n < 32:
            raise DomainError(f"grid_n must be at least 32, got {self.grid_n}")
        if self.grid_n > MAX_NODES:
            raise ResourceCapError(f"grid_n={self.grid_n} exceeds the cap of {MAX_NODES} nodes")
        if self.rule == "gauss-panel" and self.grid_n % PANEL_POINTS:
            raise DomainError(f"gauss-panel grid_n must be a multiple of {PANEL_POINTS}")

    @property
    def h(self) -> float:
        return self.big_r / self.grid_n

    def to_dict(self) -> dict:
        return {"big_r": self.big_r, "grid_n": self.grid_n, "rule": self.rule}


def r_of_z(z: float) -> float:
    """Truncation length ``|log|z|| / 2`` associated with energy ``z`` in (-1, 0)."""
    if not (-1.0 < z < 0.0):
        raise DomainError(f"energy must satisfy -1 < z < 0, got {z!r}")
    return 0.5 * abs(math.log(-z))


def nodes_and_weights(disc: Discretization):
    if disc.rule == "uniform-midpoint":
        h = disc.h
        x = (np.arange(disc.grid_n) + 0.5) * h
        return x, np.full(disc.grid_n, h)
    panels = disc.grid_n // PANEL_POINTS
    width = disc.big_r / panels
    gx, gw = np.polynomial.legendre.leggauss(PANEL_POINTS)
    left = np.arange(panels) * width
    x = (left[:, None] + 0.5 * width * (gx[None, :] + 1.0)).ravel()
    w = np.tile(0.5 * width * gw, panels)
    return x, w


def build_channel_matrix(params: MassParams, l: int, disc: Discretization,
                         quadrature_order: int | None = None) -> np.ndarray:
    """Symmetric Nyström matrix ``sqrt(w_i) S_l(x_i - x_j) sqrt(w_j)``."""
    sym = ChannelSymbol(params, l, quadrature_order)
    if disc.rule == "uniform-midpoint":
        # Toeplitz: one kernel evaluation per lag
        first = disc.h * kernel_channel(sym, np.arange(disc.grid_n) * disc.h)
        return scipy.linalg.toeplitz(first)
    x, w = nodes_and_weights(disc)
    panels = disc.grid_n // PANEL_POINTS
    width = disc.big_r / panels
    local = x[:PANEL_POINTS]
    # x_i - x_j depends only on the panel lag and the two local node indices
    lags = np.arange(panels)[:, None, None] * width
    diffs = lags + local[None, :, None] - local[None, None, :]
    table = kernel_channel(sym, diffs.ravel()).reshape(diffs.shape)
    a = np.repeat(np.arange(panels), PANEL_POINTS)
    i = np.tile(np.arange(PANEL_POINTS), panels)
    lag = a[:, None] - a[None, :]
    vals = np.where(lag >= 0,
                    table[np.abs(lag), i[:, None], i[None, :]],
                    table[np.abs(lag), i[None, :], i[:, None]])
    sw = np.sqrt(w)
    mat = sw[:, None] * vals * sw[None, :]
    return 0.5 * (mat + mat.T)


def inertia_count(matrix: np.ndarray, shift: float) -> int:
    """Number of positive eigenvalues of ``matrix - shift I`` (Sylvester inertia).

    Raises ``np.linalg.LinAlgError`` when a pivot block of the Bunch-Kaufman
    factorisation is numerically singular, in which case the sign is unreliable.
    """
    a = np.asarray(matrix, dtype=float)
    n = a.shape[0]
    if n == 0:
        return 0
    shifted = a - shift * np.eye(n)
    _, d, _ = scipy.linalg.ldl(shifted, lower=True, hermitian=True, check_finite=True)
    scale = max(1.0, float(np.abs(shifted).max()))
    count = 0
    i = 0
    while i < n:
        if i + 1 < n and d[i + 1, i] != 0.0:
            block = d[i:i + 2, i:i + 2]
            ev = np.linalg.eigvalsh(block)
            if np.any(np.abs(ev) <= 1e-14 * scale):
                raise np.linalg.LinAlgError("singular 2x2 pivot")
            count += int((ev > 0).sum())
            i += 2
        else:
            if abs(d[i, i]) <= 1e-14 * scale:
                raise np.linalg.LinAlgError("singular 1x1 pivot")
            count += int(d[i, i] > 0)
            i += 1
    return count


def eigen_count(matrix: np.ndarray, shift: float) -> int:
    """Brute-force count of eigenvalues strictly above ``shift``."""
    a = np.asarray(matrix, dtype=float)
    if a.shape[0] == 0:
        return 0
    return int((scipy.linalg.eigvalsh(a) > shift).sum())


@dataclass(frozen=True)
class CountResult:
    count: int
    path: str
    near_threshold: int = 0


def count_above_detailed(matrix, lambda_thresh: float, tol: float = DEGENERACY_TOL,
                         verify: bool = False) -> CountResult:
    """Eigenvalues above ``lambda_thresh + tol`` plus a degeneracy diagnostic.

    Eigenvalues within ``tol`` of the threshold are not counted.
    ``near_threshold`` is the number counted in ``(lambda - tol, lambda + tol]``.
    With ``verify`` both paths are run and must agree.
    """
    if not lambda_thresh > 0:
        raise DomainError(f"threshold must be positive, got {lambda_thresh!r}")
    try:
        hi = inertia_count(matrix, lambda_thresh + tol)
        lo = inertia_count(matrix, lambda_thresh - tol)
        path = "inertia"
    except np.linalg.LinAlgError as exc:
        log.debug("inertia path failed (%s); using eigendecomposition", exc)
        ev = scipy.linalg.eigvalsh(np.asarray(matrix, dtype=float))
        hi = int((ev > lambda_thresh + tol).sum())
        lo = int((ev > lambda_thresh - tol).sum())
        path = "eigh"
    if verify and path == "inertia":
        check = eigen_count(matrix, lambda_thresh + tol)
        if check != hi:
            raise AssertionError(f"inertia count {hi} != eigendecomposition count {check}")
    return CountResult(hi, path, lo - hi)


def count_above(matrix, lambda_thresh: float) -> int:
    """``n(lambda, B)``: number of eigenvalues of ``B`` strictly greater than ``lambda``."""
    return count_above_detailed(matrix, lambda_thresh).count


def largest_eigenvalue(matrix) -> float:
    a = np.asarray(matrix, dtype=float)
    n = a.shape[0]
    return float(scipy.linalg.eigvalsh(a, subset_by_index=[n - 1, n - 1])[0])


@dataclass(frozen=True)
class ChannelCount:
    l: int
    count: int
    skipped: bool = False
    path: str = ""
    near_threshold: int = 0


@dataclass
class SpectralRun:
    params: MassParams
    disc: Discretization
    lambda_thresh: float
    per_channel_counts: list[ChannelCount]
    warnings: list[str] = field(default_factory=list)

    @property
    def total(self) -> int:
        return sum((2 * c.l + 1) * c.count for c in self.per_channel_counts)

    @property
    def ratio(self) -> float:
        return self.total / (2.0 * self.disc.big_r)

    def to_dict(self) -> dict:
        return {
            "m": self.params.m,
            "discretization": self.disc.to_dict(),
            "lambda": self.lambda_thresh,
            "per_channel": [
                {"l": c.l, "count": c.count, "skipped": c.skipped, "path": c.path,
                 "near_threshold": c.near_threshold}
                for c in self.per_channel_counts
            ],
            "total": self.total,
            "ratio": self.ratio,
            "warnings": list(self.warnings),
        }


def run_counting(params: MassParams, disc: Discretization, lambda_thresh: float,
                 l_max: int, quadrature_order: int | None = None) -> SpectralRun:
    """Per-channel counts ``n(lambda, S_R^(l))`` for ``0 <= l <= l_max``."""
    if l_max < 1:
        raise DomainError(f"l_max must be at least 1, got {l_max}")
    if not lambda_thresh > 0:
        raise DomainError(f"threshold must be positive, got {lambda_thresh!r}")
    counts = []
    warnings = []
    for l in range(l_max + 1):
        if l % 2 == 1 and symbol_upper_bound(params, l, 0.0) < lambda_thresh / SQRT_2PI:
            counts.append(ChannelCount(l, 0, skipped=True, path="bound"))
            continue
        order = None if quadrature_order is None else max(quadrature_order, 2 * (l + 1))
        mat = build_channel_matrix(params, l, disc, order)
        res = count_above_detailed(mat, lambda_thresh)
        counts.append(ChannelCount(l, res.count, path=res.path, near_threshold=res.near_threshold))
        if l % 2 == 0 and res.count:
            warnings.append(f"l={l} (even) has {res.count} eigenvalues above {lambda_thresh}")
        if res.near_threshold:
            warnings.append(f"l={l}: {res.near_threshold} eigenvalue(s) within "
                            f"{DEGENERACY_TOL:g} of the threshold")
    return SpectralRun(params, disc, lambda_thresh, counts, warnings)


@dataclass(frozen=True)
class ConvergenceRow:
    big_r: float
    grid_n: int
    count: int
    ratio: float
    predicted: float

    @property
    def error(self) -> float:
        return abs(self.ratio - self.predicted)


@dataclass
class ConvergenceTable:
    l: int
    lambda_thresh: float
    nodes_per_unit: int
    rows: list[ConvergenceRow]

    @property
    def predicted(self) -> float:
        return self.rows[0].predicted if self.rows else float("nan")

    @property
    def errors(self) -> list[float]:
        return [r.error for r in self.rows]

    @property
    def monotone(self) -> bool:
        """Absolute error non-increasing along the R list (ties allowed)."""
        e = self.errors
        return all(b <= a + 1e-12 for a, b in zip(e, e[1:]))

    @property
    def relative_error_last(self) -> float:
        if not self.rows:
            return float("nan")
        p = self.predicted
        return self.rows[-1].error / p if p else self.rows[-1].error

    def to_dict(self) -> dict:
        return {
            "l": self.l,
            "lambda": self.lambda_thresh,
            "nodes_per_unit": self.nodes_per_unit,
            "predicted": self.predicted,
            "monotone": self.monotone,
            "relative_error_last": self.relative_error_last,
            "rows": [
                {"R": r.big_r, "grid_n": r.grid_n, "count": r.count,
                 "ratio": r.ratio, "predicted": r.predicted}
                for r in self.rows
            ],
        }


def predicted_ratio(params: MassParams, l: int, lambda_thresh: float,
                    quadrature_order: int | None = None) -> float:
    """Limit of ``n(lambda, S_R^(l)) / R``: the full-line level-set length over 2 pi."""
    if l % 2 == 0:
        return 0.0  # even symbols are non-positive
    ls = level_set(params, l, lambda_thresh / SQRT_2PI, quadrature_order=quadrature_order)
    return 2.0 * ls.measure / (2.0 * math.pi)


def convergence_study(params: MassParams, l: int, lambda_thresh: float,
                      r_list, nodes_per_unit: int = 40,
                      quadrature_order: int | None = None) -> ConvergenceTable:
    r_list = [float(r) for r in r_list]
    if not r_list or any(b <= a for a, b in zip(r_list, r_list[1:])):
        raise DomainError("r_list must be non-empty and strictly increasing")
    if nodes_per_unit < 1:
        raise DomainError("nodes_per_unit must be positive")
    discs = [Discretization(r, max(32, round(nodes_per_unit * r))) for r in r_list]
    pred = predicted_ratio(params, l, lambda_thresh, quadrature_order)
    rows = []
    for disc in discs:
        mat = build_channel_matrix(params, l, disc, quadrature_order)
        n = count_above(mat, lambda_thresh)
        rows.append(ConvergenceRow(disc.big_r, disc.grid_n, n, n / disc.big_r, pred))
    return ConvergenceTable(l, lambda_thresh, nodes_per_unit, rows)


def _free_hamiltonian(params: MassParams, p_abs, q_abs, cos_angle):
    mu = params.mu
    return p_abs ** 2 / (2 * mu) + q_abs ** 2 / (2 * mu) + p_abs * q_abs * cos_angle / params.m


def map_identity_sides(params: MassParams, z: float, r, x, cos_angle):
    """Both sides of the kernel identity under ``(M xi)(r, w) = e^{3r/2} xi(e^r w)``.

    Left: ``e^{3(r+x)/2}`` times the momentum-space kernel at ``|p| = e^r``,
    ``|q| = e^x``. Right: ``-b / (cosh(r - x) + cos/(m+1))`` restricted to the
    square ``(0, R)^2``.
    """
    big_r = r_of_z(z)
    r = np.asarray(r, dtype=float)
    x = np.asarray(x, dtype=float)
    c = np.asarray(cos_angle, dtype=float)
    p_abs, q_abs = np.exp(r), np.exp(x)
    cut = 1.0 / math.sqrt(-z)
    chi_p = ((p_abs >= 1.0) & (p_abs < cut)).astype(float)
    chi_q = ((q_abs >= 1.0) & (q_abs < cut)).astype(float)
    kernel = (-math.sqrt(2.0 * params.n_red) / params.c_norm * chi_p * chi_q
              / (np.sqrt(p_abs) * _free_hamiltonian(params, p_abs, q_abs, c) * np.sqrt(q_abs)))
    lhs = np.exp(1.5 * (r + x)) * kernel
    inside = ((r > 0) & (r < big_r) & (x > 0) & (x < big_r)).astype(float)
    rhs = -params.b * inside / (np.cosh(r - x) + c / (params.m + 1.0))
    return lhs, rhs


def check_map_identity(params: MassParams, z: float, samples) -> float:
    """Maximum relative discrepancy of the kernel identity over ``(r, x, cos)`` samples."""
    big_r = r_of_z(z)
    s = np.asarray(samples, dtype=float).reshape(-1, 3)
    r, x, c = s[:, 0], s[:, 1], s[:, 2]
    if (np.any((r <= 0) | (r >= big_r) | (x <= 0) | (x >= big_r))
            or np.any(np.abs(c) > 1.0)):
        raise DomainError(f"samples must have r, x in (0, {big_r}) and |cos| <= 1")
    lhs, rhs = map_identity_sides(params, z, r, x, c)
    return float(np.max(np.abs(lhs - rhs) / np.abs(rhs))) if s.size else 0.0


def random_identity_samples(z: float, count: int, seed: int = 0) -> np.ndarray:
    big_r = r_of_z(z)
    rng = np.random.default_rng(seed)
    rx = rng.uniform(0.0, big_r, size=(count, 2))
    rx = np.clip(rx, np.nextafter(0.0, 1.0), np.nextafter(big_r, 0.0))
    c = rng.uniform(-1.0, 1.0, size=(count, 1))
    return np.hstack([rx, c])


def prefactor_identity(params: MassParams) -> tuple[float, float]:
    """``(sqrt(2n) mu / c(m), b(m))``; the two closed forms coincide."""
    return math.sqrt(2.0 * params.n_red) * params.mu / params.c_norm, params.b
