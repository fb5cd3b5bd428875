"""Doubling ratios of the design criteria and their limits.

Two regimes for equidistant designs on a fixed interval (or grid):

* infill: double the number of partition intervals at fixed domain; both
  criteria's ratios tend to one, so past a dense enough partition extra
  points stop paying;
* increasing domain: keep the partition density and double the domain.
  The determinant ratio tends to an explicit rational limit in the rate
  (per axis in 2D), the 1D condition-number ratio to an explicit
  algebraic one.  The 2D condition-number limits have no feasible closed
  form; they are estimated numerically from a doubling sequence with
  Richardson extrapolation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .exceptions import ValidationError
from .fim import fim_entries_equidistant_1d, fim_entries_equidistant_2d
from .model import OuParams, SheetParams
from .objectives import (
    d_objective_1d,
    d_objective_2d,
    k_objective_1d,
    k_objective_2d,
)

__all__ = [
    "DoublingReport",
    "CondLimitCell",
    "domain_doubling_limit_d",
    "domain_doubling_limit_k",
    "domain_doubling_limit_d_axis",
    "doubling_ratio_1d",
    "doubling_ratio_2d",
    "cond_limit_surface_2d",
    "det_decomposition_factor",
]

MODES_1D = ("infill", "domain")
MODES_2D = ("infill-both", "infill-one", "domain-both", "domain-one")


def _check_rate(beta: float) -> float:
    b = float(beta)
    if not (math.isfinite(b) and b > 0.0):
        raise ValidationError(f"rate must be positive, got {beta!r}")
    return b


def domain_doubling_limit_d(beta: float) -> float:
    """Limit of the determinant ratio when the observation window doubles
    at fixed spacing: 16(b+1)(b^2+3b+3) / ((b+2)(b^2+6b+12)).

    Strictly increasing from 2 (small rates) to 16 (large rates)."""
    b = _check_rate(beta)
    return 16.0 * (b + 1.0) * (b * b + 3.0 * b + 3.0) / ((b + 2.0) * (b * b + 6.0 * b + 12.0))


def domain_doubling_limit_k(beta: float) -> float:
    """Limit of the condition-number ratio under window doubling.

    Tends to 2 for small rates, peaks at 2.3454 near rate 0.2730, then
    decreases to (7 + sqrt(37))^2 / (8 + 2*sqrt(13))^2 ~ 0.7397."""
    b = _check_rate(beta)
    num = (
        (b + 2.0)
        * (b * b + 6.0 * b + 12.0)
        * (7.0 * b * b + 9.0 * b + 3.0 + math.sqrt(37.0 * b**4 + 78.0 * b**3 + 51.0 * b * b + 18.0 * b + 9.0)) ** 2
    )
    den = (
        4.0
        * (b + 1.0)
        * (b * b + 3.0 * b + 3.0)
        * (4.0 * b * b + 9.0 * b + 3.0 + math.sqrt(13.0 * b**4 + 48.0 * b**3 + 33.0 * b * b - 18.0 * b + 9.0)) ** 2
    )
    return num / den


def domain_doubling_limit_d_axis(beta: float) -> float:
    """Per-axis determinant-ratio limit for grid designs when one
    coordinate direction's window doubles: 2(b+1)/(b+2) times the 1D
    limit.  Increases from 2 to 32."""
    b = _check_rate(beta)
    return 2.0 * (b + 1.0) / (b + 2.0) * domain_doubling_limit_d(b)


@dataclass(frozen=True)
class DoublingReport:
    """Criterion values ratio between a doubled design and its base.

    ``limit_det``/``limit_cond`` carry the closed-form limits when one
    exists for the mode (None otherwise)."""

    mode: str
    n: int
    m: int | None
    ratio_det: float
    ratio_cond: float
    limit_det: float | None
    limit_cond: float | None


def _check_n(name: str, n: int) -> int:
    if int(n) != n or n < 2:
        raise ValidationError(f"{name} must be an integer >= 2, got {n!r}")
    return int(n)


def doubling_ratio_1d(params: OuParams, n: int, mode: str) -> DoublingReport:
    """Criterion ratios for the equidistant partition {0, 1/n, ..., 1}
    against its refinement (infill) or its window-doubled extension
    {0, 1/n, ..., 2} (domain)."""
    n = _check_n("n", n)
    if mode not in MODES_1D:
        raise ValidationError(f"mode must be one of {MODES_1D}, got {mode!r}")
    base = fim_entries_equidistant_1d(params, 1.0 / n, n + 1)
    if mode == "infill":
        other = fim_entries_equidistant_1d(params, 0.5 / n, 2 * n + 1)
        limits = (1.0, 1.0)
    else:
        other = fim_entries_equidistant_1d(params, 1.0 / n, 2 * n + 1)
        limits = (
            domain_doubling_limit_d(params.beta),
            domain_doubling_limit_k(params.beta),
        )
    return DoublingReport(
        mode=mode,
        n=n,
        m=None,
        ratio_det=d_objective_1d(other) / d_objective_1d(base),
        ratio_cond=k_objective_1d(other) / k_objective_1d(base),
        limit_det=limits[0],
        limit_cond=limits[1],
    )


def doubling_ratio_2d(params: SheetParams, n: int, m: int, mode: str) -> DoublingReport:
    """Criterion ratios for the grid partition {i/n} x {j/m} of the unit
    square against its refined or window-doubled variants.

    "one" modes double only the first coordinate direction.  Determinant
    limits are closed-form in every mode; condition-number limits only in
    the infill modes (the domain ones are numeric, see
    :func:`cond_limit_surface_2d`)."""
    n = _check_n("n", n)
    m = _check_n("m", m)
    if mode not in MODES_2D:
        raise ValidationError(f"mode must be one of {MODES_2D}, got {mode!r}")
    base = fim_entries_equidistant_2d(params, 1.0 / n, 1.0 / m, n + 1, m + 1)
    if mode == "infill-both":
        other = fim_entries_equidistant_2d(params, 0.5 / n, 0.5 / m, 2 * n + 1, 2 * m + 1)
        limits = (1.0, 1.0)
    elif mode == "infill-one":
        other = fim_entries_equidistant_2d(params, 0.5 / n, 1.0 / m, 2 * n + 1, m + 1)
        limits = (1.0, 1.0)
    elif mode == "domain-both":
        other = fim_entries_equidistant_2d(params, 1.0 / n, 1.0 / m, 2 * n + 1, 2 * m + 1)
        limits = (
            domain_doubling_limit_d_axis(params.beta) * domain_doubling_limit_d_axis(params.gamma),
            None,
        )
    else:  # domain-one
        other = fim_entries_equidistant_2d(params, 1.0 / n, 1.0 / m, 2 * n + 1, m + 1)
        limits = (domain_doubling_limit_d_axis(params.beta), None)
    return DoublingReport(
        mode=mode,
        n=n,
        m=m,
        ratio_det=d_objective_2d(other) / d_objective_2d(base),
        ratio_cond=k_objective_2d(other.matrix()) / k_objective_2d(base.matrix()),
        limit_det=limits[0],
        limit_cond=limits[1],
    )


@dataclass(frozen=True)
class CondLimitCell:
    """Numeric estimate of the 2D condition-number doubling limit at one
    rate pair, with the extrapolation error estimate."""

    beta: float
    gamma: float
    estimate: float
    error_estimate: float
    converged: bool


def cond_limit_surface_2d(
    betas,
    gammas,
    n_sequence: tuple[int, ...] = (25, 50, 100, 200, 400),
    mode: str = "both",
    tol: float = 1e-3,
) -> list[CondLimitCell]:
    """Numeric limit surface of the condition-number doubling ratio.

    For each rate pair, the ratio is evaluated along the doubling
    sequence ``n_sequence`` (n = m) and Richardson-extrapolated assuming
    first-order convergence in 1/n; the error estimate is the difference
    of the last two extrapolants, and ``converged`` flags whether it
    meets ``tol``.  ``mode`` "both" doubles the window in both coordinate
    directions, "one" only in the first.
    """
    if mode not in ("both", "one"):
        raise ValidationError(f"mode must be 'both' or 'one', got {mode!r}")
    if len(n_sequence) < 3:
        raise ValidationError("n_sequence needs at least three entries")
    if any(2 * a != b for a, b in zip(n_sequence, n_sequence[1:])):
        raise ValidationError("n_sequence must double at each step")
    ratio_mode = "domain-both" if mode == "both" else "domain-one"
    cells = []
    for b in betas:
        for g in gammas:
            params = SheetParams(float(b), float(g))
            ratios = [
                doubling_ratio_2d(params, k, k, ratio_mode).ratio_cond
                for k in n_sequence
            ]
            extrapolants = [2.0 * r2 - r1 for r1, r2 in zip(ratios, ratios[1:])]
            err = abs(extrapolants[-1] - extrapolants[-2])
            cells.append(
                CondLimitCell(
                    beta=float(b),
                    gamma=float(g),
                    estimate=extrapolants[-1],
                    error_estimate=err,
                    converged=bool(err <= tol),
                )
            )
    return cells


def det_decomposition_factor(which: str, n: int, x: float) -> float:
    """Factor functions of the equidistant determinant decomposition
    det = J * (n-1)/beta^2 * F evaluated at the scaled step x = beta*d.

    "J" is the intercept-information factor (at least 1, increasing),
    "F" the slope-scale factor (nonnegative, increasing), and "G" the
    ratio F_n / F_3 used to reduce monotonicity for general n to the
    three-point case.  All are kept stable in p = exp(-x).
    """
    n = _check_n("n", n)
    x = float(x)
    if not (math.isfinite(x) and x > 0.0):
        raise ValidationError(f"x must be positive, got {x!r}")
    p = math.exp(-x)
    one_minus_p = -math.expm1(-x)
    a = n * (n + 1) / 12.0
    b = (n + 1) / 2.0
    if which == "J":
        return (n + (2.0 - n) * p) / (1.0 + p)
    if which == "F":
        one_minus_p2 = -math.expm1(-2.0 * x)
        return x * x * (
            a * one_minus_p / (1.0 + p) + b * p / (1.0 + p) + p * p / one_minus_p2
        )
    if which == "G":
        return a * one_minus_p**2 + b * p * one_minus_p + p * p
    raise ValidationError(f"which must be 'J', 'F' or 'G', got {which!r}")
