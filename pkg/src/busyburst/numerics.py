"""Small numeric kernels: quadrature, bisection, Perron roots.

Everything here works on plain floats and callables so the same code serves
both analytic models and empirical plug-in evaluators.
"""

from __future__ import annotations

import math
from typing import Callable

import numpy as np

from .errors import NonConvergence

QUAD_TOL = 1e-11
QUAD_MAX_DEPTH = 60
ROOT_RTOL = 1e-12
PERRON_RTOL = 1e-13
PERRON_MAX_ITER = 100_000


def _simpson(fa: float, fm: float, fb: float, h: float) -> float:
    return h / 6.0 * (fa + 4.0 * fm + fb)


def _adaptive(
    f: Callable[[float], float],
    a: float,
    b: float,
    fa: float,
    fm: float,
    fb: float,
    whole: float,
    tol: float,
    depth: int,
) -> float:
    m = 0.5 * (a + b)
    lm = 0.5 * (a + m)
    rm = 0.5 * (m + b)
    flm = f(lm)
    frm = f(rm)
    left = _simpson(fa, flm, fm, m - a)
    right = _simpson(fm, frm, fb, b - m)
    delta = left + right - whole
    if depth <= 0 or abs(delta) <= 15.0 * tol:
        # Richardson term knocks the error one order below tol.
        return left + right + delta / 15.0
    return _adaptive(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + _adaptive(
        f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
    )


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = QUAD_TOL,
    max_depth: int = QUAD_MAX_DEPTH,
) -> float:
    """Integrate ``f`` over ``[a, b]`` by adaptive Simpson quadrature.

    Args:
        f: Integrand, smooth on the interval.
        a: Lower limit.
        b: Upper limit; may equal ``a`` (integral is 0) or lie below it.
        tol: Absolute error target.
        max_depth: Recursion cap; the estimate is returned as-is when hit.

    Returns:
        The integral estimate.
    """
    if a == b:
        return 0.0
    if b < a:
        return -adaptive_simpson(f, b, a, tol=tol, max_depth=max_depth)
    fa = f(a)
    fb = f(b)
    m = 0.5 * (a + b)
    fm = f(m)
    whole = _simpson(fa, fm, fb, b - a)
    return _adaptive(f, a, b, fa, fm, fb, whole, tol, max_depth)


def bisect_sign_change(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    rtol: float = ROOT_RTOL,
) -> float:
    """Locate the crossing of ``f`` from nonpositive to positive in ``(lo, hi]``.

    The endpoints are never evaluated; the caller guarantees ``f <= 0`` just
    right of ``lo`` and ``f > 0`` at ``hi``, with a single crossing between.
    The bracket is narrowed until its width drops below
    ``rtol * max(1, |midpoint|)``.
    """
    while True:
        mid = 0.5 * (lo + hi)
        if hi - lo <= rtol * max(1.0, abs(mid)) or mid <= lo or mid >= hi:
            return mid
        if f(mid) <= 0.0:
            lo = mid
        else:
            hi = mid


def bisect_increasing(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    rtol: float = ROOT_RTOL,
) -> float:
    """Locate the zero of a nondecreasing function on a sign-change bracket.

    Requires ``f(lo) <= 0 <= f(hi)``. The bracket is narrowed until its width
    drops below ``rtol * max(1, |midpoint|)``.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo > 0.0 or fhi < 0.0:
        raise ValueError(f"not a sign-change bracket: f({lo})={flo}, f({hi})={fhi}")
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    return bisect_sign_change(f, lo, hi, rtol=rtol)


def perron_root_2x2(matrix: np.ndarray) -> float:
    """Largest eigenvalue of a nonnegative 2x2 matrix, in closed form."""
    a, b = float(matrix[0, 0]), float(matrix[0, 1])
    c, d = float(matrix[1, 0]), float(matrix[1, 1])
    # Off-diagonal product is nonnegative, so the discriminant never dips below 0.
    disc = (a - d) * (a - d) + 4.0 * b * c
    return 0.5 * ((a + d) + math.sqrt(max(disc, 0.0)))


def perron_root(
    matrix: np.ndarray,
    rtol: float = PERRON_RTOL,
    max_iter: int = PERRON_MAX_ITER,
) -> float:
    """Spectral radius of a nonnegative square matrix by power iteration.

    A diagonal shift makes the iteration matrix primitive, so periodic chains
    converge too. 2x2 inputs take the closed form.

    Raises:
        NonConvergence: If the iteration is still moving after ``max_iter``
            rounds.
    """
    a = np.asarray(matrix, dtype=np.float64)
    n = a.shape[0]
    if n == 1:
        return float(a[0, 0])
    if n == 2:
        return perron_root_2x2(a)
    shift = float(np.abs(a).sum(axis=1).max())
    if shift == 0.0:
        return 0.0
    b = a + shift * np.eye(n)
    v = np.full(n, 1.0 / n)
    rho = 0.0
    for _ in range(max_iter):
        w = b @ v
        s = float(w.sum())
        if s == 0.0:
            return 0.0
        w /= s
        if abs(s - rho) <= rtol * abs(s):
            return max(s - shift, 0.0)
        rho = s
        v = w
    raise NonConvergence(
        f"power iteration did not reach rtol={rtol} within {max_iter} iterations"
    )
