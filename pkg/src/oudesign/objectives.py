"""Design criteria on 2x2 and 3x3 information matrices.

Three criteria appear throughout the package:

* the determinant criterion ("D"), maximized by D-optimal designs;
* the condition number ("K", ratio of extreme eigenvalues), minimized by
  K-optimal designs;
* for 2x2 matrices, the surrogate ``r = (l1 + l3)^2 / det >= 4``, a
  strictly increasing transform of the condition number that is cheaper
  to optimize: ``k = g(r)`` with ``g(x) = ((sqrt(x) + sqrt(x-4))/2)^2``.

The 3x3 condition number uses the trigonometric closed form for the
eigenvalues of a symmetric 3x3 matrix; the largest eigenvalue pairs with
``cos(phi)`` and the smallest with ``cos(phi + 2*pi/3)``, a pairing that
is validated against a generic symmetric eigensolver in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalError, SingularFimError, ValidationError
from .fim import (
    FimEntries1D,
    FimEntries2D,
    fim_entries_1d,
    fim_entries_2d,
)
from .model import Design1D, GridDesign2D, OuParams, SheetParams

__all__ = [
    "ObjectiveEval",
    "Eigen3Closed",
    "d_objective_1d",
    "r_objective_1d",
    "k_objective_1d",
    "condition_from_surrogate",
    "eigen3_closed",
    "k_objective_2d",
    "d_objective_2d",
    "evaluate_design_1d",
    "evaluate_design_2d",
]

DEFAULT_DET_TOL = 1e-14

# Relative threshold on 3*tr(A^2) - tr(A)^2 below which a symmetric 3x3
# matrix is treated as a multiple of the identity (the trig formula is
# 0/0 there, the limit is three equal eigenvalues).
IDENTITY_MULTIPLE_TOL = 1e-12


@dataclass(frozen=True)
class ObjectiveEval:
    """All criteria evaluated at one design, with the entries they came
    from.  ``r_value`` is None for grid designs (surrogate is 2x2 only)."""

    d_value: float
    k_value: float
    r_value: float | None
    entries: FimEntries1D | FimEntries2D


@dataclass(frozen=True)
class Eigen3Closed:
    """Closed-form eigenvalues of a symmetric 3x3 matrix.

    ``rho`` is the normalized cubic invariant in [-1, 1], ``phi`` the
    third of its arccos, and ``eigenvalues`` the three roots sorted in
    descending order.
    """

    rho: float
    phi: float
    eigenvalues: tuple[float, float, float]


def d_objective_1d(entries: FimEntries1D) -> float:
    """Determinant criterion l1*l3 - l2^2."""
    return entries.l1 * entries.l3 - entries.l2 * entries.l2


def r_objective_1d(entries: FimEntries1D, *, det_tol: float = DEFAULT_DET_TOL) -> float:
    """Condition-number surrogate (l1 + l3)^2 / det, always >= 4."""
    det = d_objective_1d(entries)
    if not np.all(det > det_tol):
        raise SingularFimError(f"determinant {det!r} at or below tolerance {det_tol:g}")
    t = entries.l1 + entries.l3
    return t * t / det


def k_objective_1d(entries: FimEntries1D, *, det_tol: float = DEFAULT_DET_TOL) -> float:
    """Condition number of the 2x2 matrix, in closed form.

    Equals ``(l1 + l3 + sqrt((l1 - l3)^2 + 4*l2^2))^2 / (4*det)``, the
    squared largest eigenvalue over the determinant.
    """
    det = d_objective_1d(entries)
    if not np.all(det > det_tol):
        raise SingularFimError(f"determinant {det!r} at or below tolerance {det_tol:g}")
    spread = np.sqrt((entries.l1 - entries.l3) ** 2 + 4.0 * entries.l2 * entries.l2)
    top = entries.l1 + entries.l3 + spread
    return 0.25 * top * top / det


def condition_from_surrogate(x):
    """Map a surrogate value to the condition number:
    g(x) = ((sqrt(x) + sqrt(x - 4))/2)^2 for x >= 4."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 4.0 - 1e-9):
        raise ValidationError(f"surrogate value {x!r} below its floor of 4")
    xc = np.maximum(x, 4.0)
    out = 0.25 * (np.sqrt(xc) + np.sqrt(xc - 4.0)) ** 2
    return float(out) if out.ndim == 0 else out


def _det3_symmetric(a: np.ndarray) -> float:
    return float(
        a[0, 0] * (a[1, 1] * a[2, 2] - a[1, 2] * a[1, 2])
        - a[0, 1] * (a[0, 1] * a[2, 2] - a[1, 2] * a[0, 2])
        + a[0, 2] * (a[0, 1] * a[1, 2] - a[1, 1] * a[0, 2])
    )


def _eigen3_from_invariants(trace, trace_sq, det, *, identity_tol=IDENTITY_MULTIPLE_TOL):
    """Trig-formula eigenvalues from (tr A, tr A^2, det A); array-capable.

    Returns (rho, phi, lam_max, lam_mid, lam_min).  Where the dispersion
    invariant 3*tr(A^2) - tr(A)^2 vanishes (identity multiples) the
    eigenvalues are all tr/3 and rho, phi take their limit values 1, 0.
    """
    trace = np.asarray(trace, dtype=float)
    trace_sq = np.asarray(trace_sq, dtype=float)
    det = np.asarray(det, dtype=float)
    disc = 3.0 * trace_sq - trace * trace
    scale = np.maximum(trace * trace, trace_sq)
    degenerate = disc <= identity_tol * np.maximum(scale, 1e-300)
    safe_disc = np.where(degenerate, 1.0, disc)
    with np.errstate(invalid="ignore", divide="ignore"):
        rho = (54.0 * det + trace * (9.0 * trace_sq - 5.0 * trace * trace)) / (
            math.sqrt(2.0) * safe_disc**1.5
        )
    rho = np.clip(rho, -1.0, 1.0)  # FP drift can leave [-1, 1] by ~1e-16
    rho = np.where(degenerate, 1.0, rho)
    phi = np.arccos(rho) / 3.0
    amp = np.sqrt(2.0 * np.where(degenerate, 0.0, disc))
    lam_max = (trace + amp * np.cos(phi)) / 3.0
    lam_min = (trace + amp * np.cos(phi + 2.0 * math.pi / 3.0)) / 3.0
    lam_mid = trace - lam_max - lam_min
    return rho, phi, lam_max, lam_mid, lam_min


def eigen3_closed(matrix: np.ndarray, *, identity_tol: float = IDENTITY_MULTIPLE_TOL) -> Eigen3Closed:
    """Eigenvalues of a symmetric 3x3 matrix via the trigonometric formula."""
    a = np.asarray(matrix, dtype=float)
    if a.shape != (3, 3):
        raise ValidationError(f"expected a 3x3 matrix, got shape {a.shape}")
    scale = np.max(np.abs(a))
    if np.max(np.abs(a - a.T)) > 1e-8 * max(scale, 1.0):
        raise ValidationError("matrix is not symmetric")
    trace = float(np.trace(a))
    trace_sq = float(np.sum(a * a))  # tr(A^2) for symmetric A
    det = _det3_symmetric(a)
    rho, phi, lam_max, lam_mid, lam_min = _eigen3_from_invariants(
        trace, trace_sq, det, identity_tol=identity_tol
    )
    return Eigen3Closed(
        rho=float(rho),
        phi=float(phi),
        eigenvalues=(float(lam_max), float(lam_mid), float(lam_min)),
    )


def _cond3_from_invariants(trace, trace_sq, det, *, identity_tol=IDENTITY_MULTIPLE_TOL):
    """Array-capable condition number from matrix invariants.

    No positivity checks; callers own validation.  Invalid (non-PD)
    inputs produce non-positive smallest eigenvalues, which the scalar
    wrapper turns into errors.
    """
    _, _, lam_max, _, lam_min = _eigen3_from_invariants(
        trace, trace_sq, det, identity_tol=identity_tol
    )
    with np.errstate(divide="ignore", invalid="ignore"):
        return lam_max / lam_min, lam_min


def k_objective_2d(fim: np.ndarray, *, identity_tol: float = IDENTITY_MULTIPLE_TOL) -> float:
    """Condition number of a positive definite symmetric 3x3 matrix.

    The largest eigenvalue uses ``cos(phi)``, the smallest
    ``cos(phi + 2*pi/3)``; their ratio is the value a K-optimal grid
    design minimizes.
    """
    eig = eigen3_closed(fim, identity_tol=identity_tol)
    lam_max, _, lam_min = eig.eigenvalues
    if lam_min <= 0.0:
        raise NumericalError(
            f"matrix is not positive definite (smallest eigenvalue {lam_min:g})"
        )
    return lam_max / lam_min


def d_objective_2d(entries: FimEntries2D) -> float:
    """Determinant of the assembled 3x3 grid information matrix,
    in its factored form l1*m1 * (l1*l3 - l2^2) * (m1*m3 - m2^2)."""
    s, t = entries.s_entries, entries.t_entries
    ds = s.l1 * s.l3 - s.l2 * s.l2
    dt = t.l1 * t.l3 - t.l2 * t.l2
    return (s.l1 * t.l1) * (ds * dt)


def evaluate_design_1d(params: OuParams, design: Design1D) -> ObjectiveEval:
    """All three criteria at a 1D design."""
    entries = fim_entries_1d(params, design)
    return ObjectiveEval(
        d_value=d_objective_1d(entries),
        k_value=k_objective_1d(entries),
        r_value=r_objective_1d(entries),
        entries=entries,
    )


def evaluate_design_2d(params: SheetParams, design: GridDesign2D) -> ObjectiveEval:
    """Determinant and condition-number criteria at a grid design."""
    entries = fim_entries_2d(params, design)
    return ObjectiveEval(
        d_value=d_objective_2d(entries),
        k_value=k_objective_2d(entries.matrix()),
        r_value=None,
        entries=entries,
    )
