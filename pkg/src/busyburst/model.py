"""Increment-law models for negative-drift random walks.

A model fixes the per-step increment law of the walk ``S_k = X_1 + ... + X_k``
together with its scaled cumulant generating function (sCGF)

    scgf(theta) = lim_k (1/k) log E exp(theta * S_k),

which for every model here is finite for all real theta, convex, and satisfies
``scgf(0) = 0`` with ``scgf'(0)`` equal to the long-run drift. Validation
rejects models whose drift is not strictly negative.

Increment streams are keyed by ``(seed, stream_id)``: the same pair always
reproduces the same sequence, independent of block sizes, host, or what other
streams are being drawn concurrently.
"""

from __future__ import annotations

import abc
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DuplicateStateValue,
    InvalidProbability,
    ModelError,
    NonNegativeDrift,
    ReducibleChain,
)
from .numerics import perron_root

# exp() overflows just above 709; tilts are capped so theta*value stays safe
_EXP_ARG_LIMIT = 700.0
_PROB_SUM_TOL = 1e-12
_UINT64_MAX = 2**64 - 1


def _check_stream_key(value: int, name: str) -> int:
    if not isinstance(value, (int, np.integer)):
        raise ModelError(f"{name} must be an integer, got {type(value).__name__}")
    if not 0 <= value <= _UINT64_MAX:
        raise ModelError(f"{name} must fit in an unsigned 64-bit word, got {value}")
    return int(value)


class IncrementSampler:
    """Deterministic keyed increment stream.

    Draws are prefix-stable: pulling 100 values and then 100 more yields the
    same sequence as pulling 200 at once. ``reset`` re-keys the underlying
    counter-based generator in place and is bit-identical to constructing a
    fresh sampler with the same key, which lets hot loops reuse one object
    across millions of streams.
    """

    def __init__(self, seed: int, stream_id: int):
        seed = _check_stream_key(seed, "seed")
        stream_id = _check_stream_key(stream_id, "stream_id")
        self._bits = np.random.Philox(key=[seed, stream_id])
        self._gen = np.random.Generator(self._bits)
        self._begin()

    def reset(self, seed: int, stream_id: int) -> None:
        seed = _check_stream_key(seed, "seed")
        stream_id = _check_stream_key(stream_id, "stream_id")
        state = self._bits.state
        inner = state["state"]
        inner["key"][0] = seed
        inner["key"][1] = stream_id
        inner["counter"][:] = 0
        state["buffer_pos"] = 4
        state["has_uint32"] = 0
        state["uinteger"] = 0
        self._bits.state = state
        self._begin()

    def _begin(self) -> None:
        """Clear any stream-local state; overridden where the law has memory."""

    def draw(self, n: int) -> np.ndarray:
        raise NotImplementedError


class _GaussianSampler(IncrementSampler):
    def __init__(self, model: Gaussian, seed: int, stream_id: int):
        self._mean = model.mean
        self._std = math.sqrt(model.variance)
        super().__init__(seed, stream_id)

    def draw(self, n: int) -> np.ndarray:
        return self._gen.normal(self._mean, self._std, size=n)


class _TwoPointSampler(IncrementSampler):
    def __init__(self, model: TwoPoint, seed: int, stream_id: int):
        self._up_value = model.up_value
        self._up_prob = model.up_prob
        super().__init__(seed, stream_id)

    def draw(self, n: int) -> np.ndarray:
        u = self._gen.random(n)
        return np.where(u < self._up_prob, self._up_value, -1.0)


class _DiscreteSampler(IncrementSampler):
    def __init__(self, model: FiniteDiscrete, seed: int, stream_id: int):
        self._values = np.asarray(model.values, dtype=np.float64)
        self._cdf = np.cumsum(np.asarray(model.probs, dtype=np.float64))
        super().__init__(seed, stream_id)

    def draw(self, n: int) -> np.ndarray:
        u = self._gen.random(n)
        idx = np.searchsorted(self._cdf, u, side="right")
        # float cdf can fall a hair short of 1; clamp the overflow bin
        np.minimum(idx, len(self._cdf) - 1, out=idx)
        return self._values[idx]


class _MarkovSampler(IncrementSampler):
    def __init__(self, model: FiniteMarkov, seed: int, stream_id: int):
        self._values = np.asarray(model.values, dtype=np.float64)
        self._row_cdfs = tuple(_guarded_cdf(row) for row in model.transition)
        self._init_cdf = _guarded_cdf(model.initial)
        super().__init__(seed, stream_id)

    def _begin(self) -> None:
        self._state: int | None = None

    def draw(self, n: int) -> np.ndarray:
        u = self._gen.random(n).tolist()
        rows = self._row_cdfs
        state = self._state
        idx = [0] * n
        for k, uk in enumerate(u):
            cdf = self._init_cdf if state is None else rows[state]
            j = 0
            while uk > cdf[j]:
                j += 1
            state = j
            idx[k] = j
        self._state = state
        return self._values[np.array(idx, dtype=np.intp)]


def _guarded_cdf(probs) -> tuple[float, ...]:
    """Row CDF whose last entry is +inf so rounding never walks off the end."""
    acc = 0.0
    out = []
    for p in probs[:-1]:
        acc += float(p)
        out.append(acc)
    out.append(math.inf)
    return tuple(out)


class IncrementModel(abc.ABC):
    """Common interface of the increment laws."""

    kind: str

    @abc.abstractmethod
    def drift(self) -> float:
        """Long-run mean increment (strictly negative by validation)."""

    @abc.abstractmethod
    def scgf(self, theta: float) -> float:
        """Scaled cumulant generating function at ``theta``."""

    @abc.abstractmethod
    def scgf_derivative(self, theta: float) -> float:
        """Derivative of the sCGF (the mean of the ``theta``-tilted law)."""

    @abc.abstractmethod
    def sampler(self, seed: int, stream_id: int) -> IncrementSampler:
        """Keyed deterministic increment stream."""

    @property
    @abc.abstractmethod
    def theta_max(self) -> float:
        """Largest tilt the evaluator accepts before exp() would overflow."""

    def _params(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Gaussian(IncrementModel):
    """I.i.d. normal increments with negative mean."""

    mean: float
    variance: float
    kind = "gaussian"

    def __post_init__(self):
        mean = float(self.mean)
        variance = float(self.variance)
        if not math.isfinite(mean) or not math.isfinite(variance):
            raise ModelError("mean and variance must be finite")
        if variance <= 0.0:
            raise ModelError(f"variance must be positive, got {variance}")
        if mean >= 0.0:
            raise NonNegativeDrift(f"mean increment must be negative, got {mean}")
        object.__setattr__(self, "mean", mean)
        object.__setattr__(self, "variance", variance)

    def drift(self) -> float:
        return self.mean

    def scgf(self, theta: float) -> float:
        return 0.5 * self.variance * theta * theta + self.mean * theta

    def scgf_derivative(self, theta: float) -> float:
        return self.variance * theta + self.mean

    def sampler(self, seed: int, stream_id: int) -> IncrementSampler:
        return _GaussianSampler(self, seed, stream_id)

    @property
    def theta_max(self) -> float:
        return math.inf

    def _params(self) -> dict:
        return {"mean": self.mean, "variance": self.variance}


@dataclass(frozen=True)
class TwoPoint(IncrementModel):
    """I.i.d. lattice increments: ``+up_value`` w.p. ``up_prob``, else -1."""

    up_value: float
    up_prob: float
    kind = "two_point"

    def __post_init__(self):
        up_value = float(self.up_value)
        up_prob = float(self.up_prob)
        if not math.isfinite(up_value) or up_value <= 0.0:
            raise ModelError(f"up_value must be a positive finite number, got {up_value}")
        if not 0.0 < up_prob < 1.0:
            raise InvalidProbability(f"up_prob must lie in (0, 1), got {up_prob}")
        drift = up_prob * up_value - (1.0 - up_prob)
        if drift >= 0.0:
            raise NonNegativeDrift(
                f"mean increment {drift} is not negative; lower up_prob or up_value"
            )
        object.__setattr__(self, "up_value", up_value)
        object.__setattr__(self, "up_prob", up_prob)

    def drift(self) -> float:
        return self.up_prob * self.up_value - (1.0 - self.up_prob)

    def scgf(self, theta: float) -> float:
        down = math.log1p(-self.up_prob) - theta
        up = math.log(self.up_prob) + self.up_value * theta
        return float(np.logaddexp(down, up))

    def scgf_derivative(self, theta: float) -> float:
        m = max(-theta, self.up_value * theta)
        w_down = (1.0 - self.up_prob) * math.exp(-theta - m)
        w_up = self.up_prob * math.exp(self.up_value * theta - m)
        return (-w_down + self.up_value * w_up) / (w_down + w_up)

    def sampler(self, seed: int, stream_id: int) -> IncrementSampler:
        return _TwoPointSampler(self, seed, stream_id)

    @property
    def theta_max(self) -> float:
        return _EXP_ARG_LIMIT / max(1.0, self.up_value)

    def _params(self) -> dict:
        return {"up_value": self.up_value, "up_prob": self.up_prob}


@dataclass(frozen=True)
class FiniteDiscrete(IncrementModel):
    """I.i.d. increments on a finite set of values."""

    values: tuple[float, ...]
    probs: tuple[float, ...]
    kind = "discrete"

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        probs = tuple(float(p) for p in self.probs)
        if len(values) == 0 or len(values) != len(probs):
            raise ModelError("values and probs must be nonempty and equally long")
        if any(not math.isfinite(v) for v in values):
            raise ModelError("values must be finite")
        for p in probs:
            if not 0.0 < p <= 1.0:
                raise InvalidProbability(f"each probability must lie in (0, 1], got {p}")
        total = math.fsum(probs)
        if abs(total - 1.0) > _PROB_SUM_TOL:
            raise InvalidProbability(f"probabilities sum to {total}, not 1")
        drift = math.fsum(p * v for p, v in zip(probs, values))
        if drift >= 0.0:
            raise NonNegativeDrift(f"mean increment must be negative, got {drift}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "_v", np.array(values, dtype=np.float64))
        object.__setattr__(self, "_logp", np.log(np.array(probs, dtype=np.float64)))

    def drift(self) -> float:
        return math.fsum(p * v for p, v in zip(self.probs, self.values))

    def scgf(self, theta: float) -> float:
        terms = self._logp + theta * self._v
        m = float(terms.max())
        return m + math.log(float(np.exp(terms - m).sum()))

    def scgf_derivative(self, theta: float) -> float:
        terms = self._logp + theta * self._v
        w = np.exp(terms - terms.max())
        return float((w * self._v).sum() / w.sum())

    def sampler(self, seed: int, stream_id: int) -> IncrementSampler:
        return _DiscreteSampler(self, seed, stream_id)

    @property
    def theta_max(self) -> float:
        return _EXP_ARG_LIMIT / max(abs(v) for v in self.values)

    def _params(self) -> dict:
        return {"values": list(self.values), "probs": list(self.probs)}


@dataclass(frozen=True)
class FiniteMarkov(IncrementModel):
    """Increments read off a finite irreducible Markov chain.

    Step k contributes ``values[Y_k]`` where ``Y`` is the chain; the first
    state is drawn from ``initial``, which defaults to the stationary
    distribution so the walk starts in steady state. The sCGF is the log
    spectral radius of the tilted kernel ``P[i, j] * exp(theta * values[j])``.
    """

    values: tuple[float, ...]
    transition: tuple[tuple[float, ...], ...]
    initial: tuple[float, ...] | None = None
    stationary: tuple[float, ...] = field(init=False, compare=False, repr=False)
    kind = "markov"

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        if len(values) == 0:
            raise ModelError("at least one state is required")
        if any(not math.isfinite(v) for v in values):
            raise ModelError("state values must be finite")
        if len(set(values)) != len(values):
            raise DuplicateStateValue(f"state values must be distinct, got {values}")
        m = len(values)
        transition = tuple(tuple(float(p) for p in row) for row in self.transition)
        if len(transition) != m or any(len(row) != m for row in transition):
            raise ModelError(f"transition must be a {m}x{m} matrix")
        for row in transition:
            for p in row:
                if not 0.0 <= p <= 1.0 + _PROB_SUM_TOL:
                    raise InvalidProbability(f"transition entries must lie in [0, 1], got {p}")
            total = math.fsum(row)
            if abs(total - 1.0) > _PROB_SUM_TOL:
                raise InvalidProbability(f"transition row sums to {total}, not 1")
        p_arr = np.array(transition, dtype=np.float64)
        if not _strongly_connected(p_arr > 0.0):
            raise ReducibleChain("transition matrix is not irreducible")
        stationary = _stationary_distribution(p_arr)
        if self.initial is None:
            initial = tuple(stationary.tolist())
        else:
            initial = tuple(float(p) for p in self.initial)
            if len(initial) != m:
                raise ModelError(f"initial must have {m} entries")
            for p in initial:
                if not 0.0 <= p <= 1.0 + _PROB_SUM_TOL:
                    raise InvalidProbability(f"initial entries must lie in [0, 1], got {p}")
            if abs(math.fsum(initial) - 1.0) > _PROB_SUM_TOL:
                raise InvalidProbability("initial distribution must sum to 1")
        drift = float(stationary @ np.array(values))
        if drift >= 0.0:
            raise NonNegativeDrift(f"stationary mean increment must be negative, got {drift}")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "transition", transition)
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "stationary", tuple(stationary.tolist()))
        object.__setattr__(self, "_v", np.array(values, dtype=np.float64))
        object.__setattr__(self, "_p", p_arr)

    def drift(self) -> float:
        return float(np.array(self.stationary) @ self._v)

    def scgf(self, theta: float) -> float:
        tilt = theta * self._v
        m = float(tilt.max())
        rho = perron_root(self._p * np.exp(tilt - m)[None, :])
        if rho <= 0.0:
            return -math.inf
        return m + math.log(rho)

    def scgf_derivative(self, theta: float) -> float:
        h = 1e-6 * max(1.0, abs(theta))
        return (self.scgf(theta + h) - self.scgf(theta - h)) / (2.0 * h)

    def sampler(self, seed: int, stream_id: int) -> IncrementSampler:
        return _MarkovSampler(self, seed, stream_id)

    @property
    def theta_max(self) -> float:
        return _EXP_ARG_LIMIT / max(abs(v) for v in self.values)

    def _params(self) -> dict:
        out = {
            "values": list(self.values),
            "transition": [list(row) for row in self.transition],
        }
        if self.initial != self.stationary:
            out["initial"] = list(self.initial)
        return out


def _strongly_connected(adj: np.ndarray) -> bool:
    """True when every state reaches every other along positive entries."""
    return _reaches_all(adj) and _reaches_all(adj.T)


def _reaches_all(adj: np.ndarray) -> bool:
    n = adj.shape[0]
    seen = np.zeros(n, dtype=bool)
    seen[0] = True
    frontier = [0]
    while frontier:
        nxt = adj[frontier].any(axis=0) & ~seen
        frontier = np.flatnonzero(nxt).tolist()
        seen |= nxt
    return bool(seen.all())


def _stationary_distribution(p: np.ndarray) -> np.ndarray:
    n = p.shape[0]
    a = p.T - np.eye(n)
    a[-1, :] = 1.0
    rhs = np.zeros(n)
    rhs[-1] = 1.0
    pi = np.linalg.solve(a, rhs)
    pi = np.clip(pi, 0.0, None)
    return pi / pi.sum()


def validate(model: IncrementModel) -> IncrementModel:
    """Type-check ``model`` and return it; constructors already validated it."""
    if not isinstance(model, IncrementModel):
        raise ModelError(f"not an increment model: {model!r}")
    return model


_KINDS = {
    "gaussian": Gaussian,
    "two_point": TwoPoint,
    "discrete": FiniteDiscrete,
    "markov": FiniteMarkov,
}


def model_from_dict(spec: dict) -> IncrementModel:
    """Build and validate a model from its JSON-style mapping.

    Args:
        spec: Mapping with a ``kind`` field naming the law plus that law's
            parameter fields, e.g. ``{"kind": "gaussian", "mean": -0.1,
            "variance": 1.0}``.

    Raises:
        ModelError: Unknown kind, missing or unexpected fields, or any
            parameter check failing.
    """
    if not isinstance(spec, dict):
        raise ModelError(f"model spec must be an object, got {type(spec).__name__}")
    spec = dict(spec)
    kind = spec.pop("kind", None)
    cls = _KINDS.get(kind)
    if cls is None:
        raise ModelError(f"unknown model kind {kind!r}; expected one of {sorted(_KINDS)}")
    try:
        return cls(**spec)
    except TypeError as exc:
        raise ModelError(f"bad parameters for kind {kind!r}: {exc}") from None


def model_to_dict(model: IncrementModel) -> dict:
    """Inverse of ``model_from_dict``."""
    return {"kind": model.kind, **model._params()}


def sample_increments(model: IncrementModel, seed: int, stream_id: int, n: int) -> np.ndarray:
    """First ``n`` values of the keyed increment stream ``(seed, stream_id)``."""
    return model.sampler(seed, stream_id).draw(n)
