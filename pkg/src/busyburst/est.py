"""Plug-in tail-exponent estimation from observed increments.

The empirical sCGF of a sample replaces the model sCGF and flows through the
exact same root-finding and quadrature code as the analytic pipeline, so the
estimators inherit its behavior (and its failure modes) verbatim.

The usual caveat applies: the plug-in is only consistent when the increments
are genuinely of the declared kind and light-tailed enough for the empirical
log-mean-exp to stabilize; nothing here checks that at runtime.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    InsufficientData,
    ModelError,
    NonNegativeSampleDrift,
    SingleState,
)
from .ldp import bracket_positive_root, integrate_scgf
from .numerics import bisect_sign_change, perron_root

_EXP_ARG_LIMIT = 700.0


class EmpiricalScgf:
    """Callable plug-in sCGF built from a sample (or exact weights)."""

    def __init__(self, kind: str, evaluator, theta_max: float, n: int):
        self.kind = kind
        self.theta_max = theta_max
        self.n = n
        self._evaluator = evaluator

    def __call__(self, theta: float) -> float:
        return self._evaluator(theta)


def empirical_scgf_iid(sample, weights=None) -> EmpiricalScgf:
    """Log-mean-exp evaluator ``log sum_i w_i exp(theta x_i)``.

    Args:
        sample: Observed increments (at least one, all finite).
        weights: Optional probability weights; defaults to uniform ``1/n``.
            Passing a law's exact atoms and weights reproduces that law's
            sCGF, which is how the plug-in pipeline is cross-checked against
            the analytic one.
    """
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1 or x.size == 0:
        raise ModelError("sample must be a nonempty 1-d array")
    if not np.isfinite(x).all():
        raise ModelError("sample contains non-finite values")
    scale = float(np.abs(x).max())
    if scale == 0.0:
        raise ModelError("sample is identically zero")
    if weights is None:

        def evaluator(theta: float) -> float:
            t = theta * x
            m = float(t.max())
            return m + math.log(float(np.exp(t - m).mean()))

    else:
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != x.shape or (w <= 0.0).any():
            raise ModelError("weights must be positive and match the sample shape")
        if abs(float(w.sum()) - 1.0) > 1e-12:
            raise ModelError("weights must sum to 1")

        def evaluator(theta: float) -> float:
            t = theta * x
            m = float(t.max())
            return m + math.log(float((w * np.exp(t - m)).sum()))

    return EmpiricalScgf("iid", evaluator, _EXP_ARG_LIMIT / scale, int(x.size))


@dataclass
class MarkovEmpirical:
    """Observed state values with their transition frequencies.

    ``matrix`` rows are transition counts divided by row totals, with the
    0/0 convention: a state seen only as the final observation keeps an
    all-zero row.
    """

    values: np.ndarray
    matrix: np.ndarray
    counts: np.ndarray | None = None


def empirical_transition_matrix(sample) -> MarkovEmpirical:
    """Tabulate transition frequencies between the distinct sample values.

    Raises:
        SingleState: If only one distinct value occurs; a one-state chain
            carries no tilt information.
    """
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise ModelError("markov sample must hold at least two observations")
    if not np.isfinite(x).all():
        raise ModelError("sample contains non-finite values")
    values, idx = np.unique(x, return_inverse=True)
    m = len(values)
    if m == 1:
        raise SingleState(f"sample visits only the value {values[0]}")
    counts = np.bincount(idx[:-1] * m + idx[1:], minlength=m * m).reshape(m, m)
    row_sums = counts.sum(axis=1, keepdims=True)
    matrix = np.divide(
        counts, row_sums, out=np.zeros((m, m), dtype=np.float64), where=row_sums > 0
    )
    return MarkovEmpirical(values=values, matrix=matrix, counts=counts)


def scgf_from_transitions(empirical: MarkovEmpirical) -> EmpiricalScgf:
    """Plug-in sCGF ``log rho(P_n * diag(exp(theta * value)))``."""
    values = np.asarray(empirical.values, dtype=np.float64)
    matrix = np.asarray(empirical.matrix, dtype=np.float64)
    scale = float(np.abs(values).max())
    if scale == 0.0:
        raise ModelError("state values are identically zero")

    def evaluator(theta: float) -> float:
        tilt = theta * values
        m = float(tilt.max())
        rho = perron_root(matrix * np.exp(tilt - m)[None, :])
        if rho <= 0.0:
            return -math.inf
        return m + math.log(rho)

    n = int(empirical.counts.sum()) + 1 if empirical.counts is not None else 0
    return EmpiricalScgf("markov", evaluator, _EXP_ARG_LIMIT / scale, n)


def empirical_scgf_markov(sample) -> EmpiricalScgf:
    return scgf_from_transitions(empirical_transition_matrix(sample))


@dataclass(frozen=True)
class EstimateReport:
    """Plug-in tail exponents with root-search diagnostics."""

    kind: str
    n: int
    drift: float
    lambda_star: float
    K: float
    scgf_integral: float
    bracket_low: float
    bracket_high: float
    theta_max: float


def estimate(sample, kind: str = "iid") -> EstimateReport:
    """Estimate the critical tilt and the area-tail rate from increments.

    Args:
        sample: Observed increments, in order (order matters for ``markov``).
        kind: ``"iid"`` or ``"markov"``.

    Raises:
        NonNegativeSampleDrift: If the sample mean is not negative.
        NoPositiveRoot: If the empirical sCGF never crosses 0 below its
            overflow cap (e.g. an all-negative sample).
        SingleState: Markov kind with a single distinct value.
        InsufficientData: Fewer than two observations.
    """
    x = np.asarray(sample, dtype=np.float64)
    if x.ndim != 1 or x.size < 2:
        raise InsufficientData(f"need at least 2 observations, got {x.size}")
    if kind == "iid":
        scgf = empirical_scgf_iid(x)
    elif kind == "markov":
        scgf = empirical_scgf_markov(x)
    else:
        raise ModelError(f"unknown sample kind {kind!r}; expected 'iid' or 'markov'")
    drift = float(x.mean())
    if drift >= 0.0:
        raise NonNegativeSampleDrift(f"sample mean is {drift}; tail exponents need drift < 0")
    lo, hi = bracket_positive_root(scgf, scgf.theta_max)
    lam = bisect_sign_change(scgf, lo, hi)
    integral = integrate_scgf(scgf, lam)
    return EstimateReport(
        kind=kind,
        n=int(x.size),
        drift=drift,
        lambda_star=lam,
        K=2.0 * math.sqrt(max(-integral, 0.0)),
        scgf_integral=integral,
        bracket_low=lo,
        bracket_high=hi,
        theta_max=scgf.theta_max,
    )
