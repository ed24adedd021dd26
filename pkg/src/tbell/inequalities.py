"""Temporal Bell inequality combinations, their maxima, and thresholds.

An inequality is a coefficient combination of two-time correlators with a
classical upper bound B.  Quantum evolution violates it for suitable
measurement times; selection on the first outcome multiplies every correlator
by the same time-independent factor A(eps), so the optimal times never move,
only the attainable maximum shrinks.  ``epsilon_threshold`` finds the
distinguishability level where the degraded maximum falls back to the bound.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .correlators import (
    CorrelationRequest,
    SelectionPolicy,
    k_selective_analytic,
    selection_factor,
)
from .dynamics import DynamicsParams

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_INV_PHI_SQ = (3.0 - math.sqrt(5.0)) / 2.0


@dataclass(frozen=True)
class InequalitySpec:
    """Coefficient set, time arity, and classical bound of one inequality.

    ``terms`` holds (i, j, coefficient) with 1-based time indices; when
    ``abs_mode`` is set the combination is wrapped in an absolute value.
    """

    n_times: int
    terms: tuple[tuple[int, int, float], ...]
    bound: float
    abs_mode: bool = False

    def __post_init__(self) -> None:
        object.__setattr__(self, "terms", tuple((int(i), int(j), float(c)) for i, j, c in self.terms))
        if self.n_times < 3:
            raise ValueError(f"n_times must be >= 3, got {self.n_times}")
        if not self.terms:
            raise ValueError("terms must not be empty")
        if not (math.isfinite(self.bound) and self.bound > 0):
            raise ValueError(f"bound must be finite and > 0, got {self.bound!r}")
        seen = set()
        for i, j, _ in self.terms:
            if not (1 <= i <= self.n_times and 1 <= j <= self.n_times):
                raise ValueError(f"time index out of range in term ({i}, {j})")
            if i == j:
                raise ValueError(f"term ({i}, {j}) correlates a time with itself")
            if (i, j) in seen:
                raise ValueError(f"duplicate term ({i}, {j})")
            seen.add((i, j))


@dataclass(frozen=True)
class ViolationReport:
    """Outcome of maximizing an inequality under a selection policy.

    ``delta_k_max`` is the unselected maximum; the measurement back-action
    enters through ``a_epsilon``, giving the fractional violation
    ``delta_b_max = (a_epsilon * delta_k_max - bound) / bound``.
    """

    delta_k_max: float
    argmax_spacing: float
    a_epsilon: float
    delta_b_max: float
    violated: bool


@dataclass(frozen=True)
class SearchConfig:
    """Stationary-spacing search: grid scan then golden-section refinement.

    ``tol`` is measured in the dimensionless spacing omega*t.
    """

    grid_points: int = 4096
    tol: float = 1e-9

    def __post_init__(self) -> None:
        if self.grid_points < 2:
            raise ValueError("grid_points must be >= 2")
        if not (self.tol > 0):
            raise ValueError("tol must be > 0")


@dataclass(frozen=True)
class SolveConfig:
    """Bisection tolerance (in epsilon) for the threshold solver."""

    tol: float = 1e-9

    def __post_init__(self) -> None:
        if not (self.tol > 0):
            raise ValueError("tol must be > 0")


PAZ4 = InequalitySpec(
    n_times=4,
    terms=((1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (1, 4, -1.0)),
    bound=2.0,
    abs_mode=True,
)

SANTOS_MINUS = InequalitySpec(
    n_times=3,
    terms=((1, 2, -1.0), (2, 3, -1.0), (1, 3, -1.0)),
    bound=1.0,
)

SANTOS_PLUS = InequalitySpec(
    n_times=3,
    terms=((1, 3, -1.0), (1, 2, 1.0), (2, 3, 1.0)),
    bound=1.0,
)

PRESETS: dict[str, InequalitySpec] = {
    "paz4": PAZ4,
    "santos-minus": SANTOS_MINUS,
    "santos-plus": SANTOS_PLUS,
}


def delta_k(
    spec: InequalitySpec,
    times: tuple[float, ...],
    params: DynamicsParams,
    policy: SelectionPolicy,
) -> float:
    """Selective inequality combination at explicit measurement times."""
    if len(times) != spec.n_times:
        raise ValueError("time count mismatch")
    if any(b <= a for a, b in zip(times, times[1:])):
        raise ValueError("times not ascending")
    total = 0.0
    for i, j, coeff in spec.terms:
        req = CorrelationRequest(times[i - 1], times[j - 1], params, policy)
        total += coeff * k_selective_analytic(req)
    return abs(total) if spec.abs_mode else total


def delta_k_stationary(
    spec: InequalitySpec,
    spacing: float,
    params: DynamicsParams,
    policy: SelectionPolicy,
) -> float:
    """Inequality combination at equally spaced times (spacing > 0)."""
    if not (spacing > 0):
        raise ValueError("invalid spacing")
    times = tuple(k * spacing for k in range(spec.n_times))
    return delta_k(spec, times, params, policy)


def stationary_curve(
    spec: InequalitySpec,
    spacings: np.ndarray,
    params: DynamicsParams,
    policy: SelectionPolicy,
) -> np.ndarray:
    """Vectorized stationary combination over an array of spacings.

    Unlike delta_k_stationary this is total on spacing >= 0 (the limit at
    zero spacing is well defined), which the figure sweeps rely on.
    """
    s = np.asarray(spacings, dtype=float)
    total = np.zeros_like(s)
    for i, j, coeff in spec.terms:
        total += coeff * np.cos(2.0 * params.omega * (j - i) * s)
    total *= selection_factor(policy)
    return np.abs(total) if spec.abs_mode else total


def _golden_max(f, lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section maximization on [lo, hi] to bracket width tol."""
    h = hi - lo
    if h <= tol:
        x = 0.5 * (lo + hi)
        return x, f(x)
    c = lo + _INV_PHI_SQ * h
    d = lo + _INV_PHI * h
    yc, yd = f(c), f(d)
    while h > tol:
        if yc > yd:
            hi, d, yd = d, c, yc
            h = _INV_PHI * h
            c = lo + _INV_PHI_SQ * h
            yc = f(c)
        else:
            lo, c, yc = c, d, yd
            h = _INV_PHI * h
            d = lo + _INV_PHI * h
            yd = f(d)
    x = 0.5 * (lo + hi)
    return x, f(x)


def maximize_violation(
    spec: InequalitySpec,
    params: DynamicsParams,
    policy: SelectionPolicy,
    search: SearchConfig | None = None,
) -> ViolationReport:
    """Maximize the stationary combination and report the degraded violation.

    The scan covers one spacing period, omega*t in (0, pi], and ties break
    toward the lowest spacing.  The objective is evaluated without selection;
    the policy's factor is applied afterwards, which is exact because the
    factor is time independent (so the argmax is too).
    """
    if search is None:
        search = SearchConfig()
    unselected = SelectionPolicy(0.0)
    period = math.pi / params.omega
    step = period / search.grid_points
    grid = step * np.arange(1, search.grid_points + 1)
    values = stationary_curve(spec, grid, params, unselected)
    best = int(np.argmax(values))

    lo = max(0.0, float(grid[best]) - step)
    hi = min(period, float(grid[best]) + step)

    def objective(s: float) -> float:
        return float(stationary_curve(spec, np.array([s]), params, unselected)[0])

    spacing, dk_max = _golden_max(objective, float(lo), float(hi), search.tol / params.omega)
    a_eps = selection_factor(policy)
    delta_b = (a_eps * dk_max - spec.bound) / spec.bound
    return ViolationReport(
        delta_k_max=dk_max,
        argmax_spacing=spacing,
        a_epsilon=a_eps,
        delta_b_max=delta_b,
        violated=delta_b > 0.0,
    )


def full_time_search(
    spec: InequalitySpec,
    params: DynamicsParams,
    grid_per_dim: int = 128,
    tol: float = 1e-9,
) -> tuple[float, tuple[float, ...]]:
    """Unconstrained-gap maximization of the unselected combination.

    Searches all n_times - 1 inter-measurement gaps independently (grid scan
    then cyclic per-coordinate golden refinement) instead of assuming equal
    spacing.  Supported for 3 or 4 times; the equal-spacing optimum is
    confirmed when this agrees with maximize_violation.

    Returns (maximum, gaps).
    """
    ndim = spec.n_times - 1
    if ndim not in (2, 3):
        raise ValueError("full search supports n_times in {3, 4} only")
    period = math.pi / params.omega
    step = period / grid_per_dim
    axis = step * np.arange(1, grid_per_dim + 1)

    def combination(gaps: tuple[np.ndarray | float, ...]) -> np.ndarray | float:
        total = 0.0
        for i, j, coeff in spec.terms:
            lag = sum(gaps[k] for k in range(i - 1, j - 1))
            total = total + coeff * np.cos(2.0 * params.omega * lag)
        return np.abs(total) if spec.abs_mode else total

    mesh = tuple(
        axis.reshape((1,) * d + (-1,) + (1,) * (ndim - d - 1)) for d in range(ndim)
    )
    values = combination(mesh)
    flat_best = int(np.argmax(values))
    gaps = [float(axis[k]) for k in np.unravel_index(flat_best, values.shape)]

    tol_phys = tol / params.omega
    for _ in range(6):
        for d in range(ndim):
            def along(x: float, d=d) -> float:
                probe = gaps.copy()
                probe[d] = x
                return float(combination(tuple(probe)))

            lo = max(tol_phys, gaps[d] - step)
            hi = min(period, gaps[d] + step)
            gaps[d], _ = _golden_max(along, lo, hi, tol_phys)
        step = max(step * 0.25, 10.0 * tol_phys)
    return float(combination(tuple(gaps))), tuple(gaps)


def epsilon_threshold(
    spec: InequalitySpec,
    params: DynamicsParams,
    solve: SolveConfig | None = None,
    search: SearchConfig | None = None,
) -> float:
    """Distinguishability level where violations disappear.

    Solves A(eps) = bound / delta_k_max by bisection; the factor is strictly
    decreasing so the root is unique.  Violations survive exactly for
    epsilon below the returned value.  A spec whose maximum never exceeds the
    bound has no threshold; the degenerate equal case returns 0 by
    convention.
    """
    if solve is None:
        solve = SolveConfig()
    report = maximize_violation(spec, params, SelectionPolicy(0.0), search)
    if report.delta_k_max < spec.bound - 1e-12:
        raise ValueError("inequality never violated")
    target = spec.bound / report.delta_k_max
    if target >= 1.0:
        return 0.0
    lo, hi = 0.0, 1.0  # A(lo) >= target > A(hi)
    while hi - lo > solve.tol:
        mid = 0.5 * (lo + hi)
        if selection_factor(SelectionPolicy(mid)) >= target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def jaynes_cummings_frequency(rabi: float, n: int) -> float:
    """Effective oscillation frequency of the atom-cavity coupling.

    For a cavity mode holding n photons the vacuum Rabi frequency is
    enhanced to ``rabi * sqrt(n + 1)``.
    """
    if not (math.isfinite(rabi) and rabi > 0):
        raise ValueError(f"rabi must be finite and > 0, got {rabi!r}")
    if n != int(n) or n < 0:
        raise ValueError(f"n must be a nonnegative integer, got {n!r}")
    return rabi * math.sqrt(n + 1.0)
