"""Scalar minimization and root finding helpers.

Plain, derivative-free routines: golden-section search on a bracketed
unimodal interval, and bisection followed by safeguarded secant steps for
roots.  The objectives in this package are cheap and smooth, so these
favor robustness over iteration counts.
"""

from __future__ import annotations

import math

INV_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0  # ~0.618034


def golden_section_min(f, lo, hi, tol=1e-10, max_iter=200):
    """Minimize f on [lo, hi]; returns (x, f(x), iterations, converged)."""
    a, b = float(lo), float(hi)
    x1 = b - INV_GOLDEN * (b - a)
    x2 = a + INV_GOLDEN * (b - a)
    f1, f2 = f(x1), f(x2)
    it = 0
    while (b - a) > tol and it < max_iter:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - INV_GOLDEN * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + INV_GOLDEN * (b - a)
            f2 = f(x2)
        it += 1
    x = 0.5 * (a + b)
    return x, f(x), it, (b - a) <= tol


def bisect_then_secant(f, lo, hi, coarse_tol=1e-3, tol=1e-10, max_iter=200):
    """Find a root of f in the sign-changing bracket [lo, hi].

    Bisection narrows the bracket to ``coarse_tol``, then secant steps
    (projected back into the bracket when they escape) polish to ``tol``.
    Returns (root, iterations, converged).  Raises ValueError when the
    bracket does not change sign.
    """
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a, 0, True
    if fb == 0.0:
        return b, 0, True
    if math.copysign(1.0, fa) == math.copysign(1.0, fb):
        raise ValueError(f"no sign change on bracket [{lo}, {hi}]")
    it = 0
    while (b - a) > coarse_tol and it < max_iter:
        m = 0.5 * (a + b)
        fm = f(m)
        it += 1
        if fm == 0.0:
            return m, it, True
        if math.copysign(1.0, fm) == math.copysign(1.0, fa):
            a, fa = m, fm
        else:
            b, fb = m, fm
    x0, x1, f0, f1 = a, b, fa, fb
    while it < max_iter:
        if f1 == f0:
            break
        x2 = x1 - f1 * (x1 - x0) / (f1 - f0)
        if not (a <= x2 <= b):
            x2 = 0.5 * (a + b)  # secant escaped; fall back to bisection
        f2 = f(x2)
        it += 1
        # keep the sign-changing bracket current
        if math.copysign(1.0, f2) == math.copysign(1.0, fa):
            a, fa = x2, f2
        else:
            b, fb = x2, f2
        x0, f0, x1, f1 = x1, f1, x2, f2
        if abs(x1 - x0) <= tol or f2 == 0.0:
            return x1, it, True
    return 0.5 * (a + b), it, (b - a) <= tol
