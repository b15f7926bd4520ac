"""Tail exponents and most-likely cycle shapes for the negative-drift walk.

For a walk with sCGF ``L`` and drift ``-delta < 0``, the quantities computed
here are:

* ``lambda_star``: the unique positive zero of ``L``, which drives the
  geometric tail of the cycle maximum (level ``h`` is reached with decay rate
  ``h * lambda_star``).
* ``K = 2 sqrt(-integral_0^lambda_star L)``: the decay rate of the cycle-area
  tail on the square-root scale, ``P(area >= b) ~ exp(-K sqrt(b))``.
* ``psi_star``: the unit-time profile a cycle most likely follows given a
  large area, with slope ``x_star = L'(lambda_star)`` at the start and
  ``-delta`` at the end; ``varphi_star`` is the tent profile given a large
  maximum.

Root finding and quadrature accept any convex sCGF callable, so empirical
plug-in evaluators reuse the exact same code path as analytic models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np

from .errors import NoPositiveRoot, OutOfSupport
from .model import IncrementModel
from .numerics import (
    QUAD_TOL,
    ROOT_RTOL,
    adaptive_simpson,
    bisect_increasing,
    bisect_sign_change,
)

# doubling past this would overflow doubles long before any honest bracket
_THETA_CEILING = 1e300


@dataclass(frozen=True)
class LdpSummary:
    """Exponent bundle for one model.

    Attributes:
        delta: Magnitude of the (negative) drift.
        x_star: Slope of the most-likely rising stretch, ``L'(lambda_star)``.
        lambda_star: Positive zero of the sCGF.
        K: Area-tail exponent on the sqrt scale.
        scgf_integral: ``integral_0^lambda_star L`` (negative; ``K`` is
            ``2 sqrt(-scgf_integral)``).
    """

    delta: float
    x_star: float
    lambda_star: float
    K: float
    scgf_integral: float


@dataclass
class SampledPath:
    """A path sampled on an explicit time grid."""

    times: np.ndarray
    values: np.ndarray
    label: str


@dataclass(frozen=True)
class SymmetryReport:
    """Outcome of the sCGF reflection check ``L(theta) == L(lambda_star - theta)``.

    When the reflection holds, the rising and falling slopes of the optimal
    profile agree (``x_star == delta``) and ``lambda_star`` is twice the tilt
    whose tilted mean is zero; the gaps report how far either identity is from
    holding regardless of the verdict.
    """

    max_defect: float
    symmetric: bool
    x_star_gap: float
    tilt_gap: float


SYMMETRY_TOL = 1e-9


def bracket_positive_root(scgf: Callable[[float], float], theta_max: float) -> tuple[float, float]:
    """Bracket the positive zero: returns ``(lo, hi)`` with the root in ``(lo, hi]``.

    ``hi`` doubles from 1 until the sCGF turns positive; ``lo`` trails one
    step behind (starting at 0, which is never evaluated: the sCGF vanishes
    there by definition, up to rounding).

    Raises:
        NoPositiveRoot: If no sign change appears below ``theta_max``.
    """
    cap = min(theta_max, _THETA_CEILING)
    lo = 0.0
    hi = min(1.0, cap)
    while True:
        if scgf(hi) > 0.0:
            return lo, hi
        lo = hi
        if hi >= cap:
            raise NoPositiveRoot(
                f"sCGF stays nonpositive up to the overflow cap theta_max={cap:g}"
            )
        hi = min(2.0 * hi, cap)


def scgf_positive_root(
    scgf: Callable[[float], float],
    theta_max: float,
    rtol: float = ROOT_RTOL,
) -> float:
    """Unique positive zero of a convex sCGF with negative slope at 0."""
    lo, hi = bracket_positive_root(scgf, theta_max)
    return bisect_sign_change(scgf, lo, hi, rtol=rtol)


def integrate_scgf(
    scgf: Callable[[float], float],
    upper: float,
    tol: float = QUAD_TOL,
) -> float:
    """Integral of the sCGF over ``[0, upper]``."""
    return adaptive_simpson(scgf, 0.0, upper, tol=tol)


@lru_cache(maxsize=None)
def busy_exponent(model: IncrementModel) -> LdpSummary:
    """Exponent bundle (tilt, slopes, area-tail rate) for ``model``.

    Results are cached per model instance; models are immutable so the cache
    is safe.
    """
    lam = scgf_positive_root(model.scgf, model.theta_max)
    integral = integrate_scgf(model.scgf, lam)
    return LdpSummary(
        delta=-model.drift(),
        x_star=model.scgf_derivative(lam),
        lambda_star=lam,
        K=2.0 * math.sqrt(max(-integral, 0.0)),
        scgf_integral=integral,
    )


def lambda_star(model: IncrementModel) -> float:
    """Positive zero of the model's sCGF."""
    return busy_exponent(model).lambda_star


def _tilt_for_mean(
    deriv: Callable[[float], float],
    x: float,
    theta_max: float,
) -> float:
    """Solve ``deriv(theta) == x`` for the tilt; ``deriv`` is nondecreasing."""
    cap = min(theta_max, _THETA_CEILING)
    lo, hi = -min(1.0, cap), min(1.0, cap)
    while deriv(hi) < x:
        if hi >= cap:
            raise OutOfSupport(f"mean {x} above the reachable range at theta_max={cap:g}")
        hi = min(2.0 * hi, cap)
    while deriv(lo) > x:
        if lo <= -cap:
            raise OutOfSupport(f"mean {x} below the reachable range at theta_max={cap:g}")
        lo = max(2.0 * lo, -cap)
    return bisect_increasing(lambda t: deriv(t) - x, lo, hi)


def rate_function(model: IncrementModel, x: float) -> float:
    """Convex conjugate of the sCGF at mean ``x``.

    Args:
        model: Increment law.
        x: Target mean; must lie in the interior of the reachable means.

    Returns:
        ``I(x) = theta(x) * x - L(theta(x))`` where ``L'(theta(x)) = x``.

    Raises:
        OutOfSupport: If no finite tilt reaches ``x``.
    """
    theta = _tilt_for_mean(model.scgf_derivative, x, model.theta_max)
    return theta * x - model.scgf(theta)


def xi(model: IncrementModel, r: float) -> float:
    """Tilted mean ``L'(r)``: the slope field of the optimal profiles."""
    return model.scgf_derivative(r)


def _profile_value(model: IncrementModel, summary: LdpSummary, t: float) -> float:
    if t <= 1.0:
        return -model.scgf(summary.lambda_star * (1.0 - t)) / summary.lambda_star
    return (1.0 - t) * summary.delta


def psi_star(model: IncrementModel, grid=None) -> SampledPath:
    """Most-likely unit-time cycle profile, conditioned on a large area.

    The profile rises from 0 with slope ``x_star``, is strictly concave, and
    returns to 0 at time 1 with slope ``-delta``; past time 1 it continues on
    the drift line ``(1 - t) * delta``.
    """
    s = busy_exponent(model)
    t = np.linspace(0.0, 1.0, 1001) if grid is None else np.asarray(grid, dtype=np.float64)
    v = np.array([_profile_value(model, s, float(tt)) for tt in t])
    return SampledPath(times=t, values=v, label="psi_star")


def psi_star_integral(model: IncrementModel) -> float:
    """Area under the unit-time profile, ``-scgf_integral / lambda_star**2``."""
    s = busy_exponent(model)
    return -s.scgf_integral / (s.lambda_star * s.lambda_star)


def most_likely_duration(model: IncrementModel, area: float) -> float:
    """Length of the most likely cycle with the given area.

    Equals ``2 * lambda_star * sqrt(area) / K``, which is also
    ``sqrt(area / integral(psi_star))``.
    """
    if area <= 0.0:
        raise ValueError(f"area must be positive, got {area}")
    s = busy_exponent(model)
    return 2.0 * s.lambda_star * math.sqrt(area) / s.K


def psi_star_for_area(model: IncrementModel, area: float, grid=None) -> SampledPath:
    """Optimal profile rescaled to enclose ``area``: ``a * psi_star(t / a)``."""
    s = busy_exponent(model)
    a = most_likely_duration(model, area)
    t = np.linspace(0.0, a, 1001) if grid is None else np.asarray(grid, dtype=np.float64)
    v = np.array([a * _profile_value(model, s, float(tt) / a) for tt in t])
    return SampledPath(times=t, values=v, label="psi_star_area")


def varphi_star(model: IncrementModel, height: float, grid=None) -> SampledPath:
    """Most-likely tent profile for a cycle that reaches ``height``.

    Climbs at slope ``x_star`` until the peak at ``height / x_star``, then
    descends along the drift, hitting 0 at ``height / x_star + height / delta``.
    """
    if height <= 0.0:
        raise ValueError(f"height must be positive, got {height}")
    s = busy_exponent(model)
    t_peak = height / s.x_star
    t_end = t_peak + height / s.delta
    t = np.linspace(0.0, t_end, 1001) if grid is None else np.asarray(grid, dtype=np.float64)
    v = np.where(t < t_peak, s.x_star * t, height - s.delta * (t - t_peak))
    return SampledPath(times=t, values=np.asarray(v, dtype=np.float64), label="varphi_star")


def hit_level_exponent(model: IncrementModel, height: float) -> float:
    """Log-probability rate of reaching ``height`` in a cycle: ``-height * lambda_star``."""
    if height <= 0.0:
        raise ValueError(f"height must be positive, got {height}")
    return -height * lambda_star(model)


def predicted_area_path(model: IncrementModel, area: float) -> SampledPath:
    """Theory overlay for a record-area cycle, on integer steps.

    The path is the rescaled optimal profile of length
    ``most_likely_duration(model, area)``, sampled at integer times so it can
    be drawn against a simulated cycle.
    """
    s = busy_exponent(model)
    dur = most_likely_duration(model, area)
    t = np.arange(math.ceil(dur) + 1, dtype=np.float64)
    v = np.array([dur * _profile_value(model, s, float(tt) / dur) for tt in t])
    return SampledPath(times=t, values=v, label="area_pred")


def predicted_height_path(model: IncrementModel, height: float) -> SampledPath:
    """Theory overlay for a record-height cycle, on integer steps."""
    s = busy_exponent(model)
    t_peak = height / s.x_star
    t_end = t_peak + height / s.delta
    t = np.arange(math.ceil(t_end) + 1, dtype=np.float64)
    v = np.where(t < t_peak, s.x_star * t, height - s.delta * (t - t_peak))
    return SampledPath(times=t, values=np.asarray(v, dtype=np.float64), label="height_pred")


def check_symmetry(model: IncrementModel, n_points: int = 101) -> SymmetryReport:
    """Test the sCGF for reflection symmetry about ``lambda_star / 2``."""
    s = busy_exponent(model)
    lam = s.lambda_star
    thetas = np.linspace(0.0, lam, n_points)
    defect = max(abs(model.scgf(float(t)) - model.scgf(lam - float(t))) for t in thetas)
    zero_tilt = _tilt_for_mean(model.scgf_derivative, 0.0, model.theta_max)
    return SymmetryReport(
        max_defect=defect,
        symmetric=defect <= SYMMETRY_TOL,
        x_star_gap=abs(s.x_star - s.delta),
        tilt_gap=abs(lam - 2.0 * zero_tilt),
    )
