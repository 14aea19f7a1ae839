"""Non-parametric noise as weighted sample sets with seeded generation.

Every random quantity in the system (robot state noise, obstacle sensing
noise, actuation noise) is represented by a :class:`WeightedSamples` set.
Generation is a pure function of ``(spec, seed, dimension)`` so that any run
can be reproduced bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigurationError

WEIGHT_TOL = 1e-9

NOISE_KINDS = ("gaussian", "gaussian-mixture", "uniform", "external-samples")


def _as_vector(value, dimension: int, name: str) -> np.ndarray:
    """Broadcast a scalar or length-``dimension`` sequence to a float vector."""
    arr = np.atleast_1d(np.asarray(value, dtype=float))
    if arr.shape == (1,):
        arr = np.repeat(arr, dimension)
    if arr.shape != (dimension,):
        raise ConfigurationError(
            f"{name}: expected a scalar or {dimension} components, got shape {arr.shape}"
        )
    return arr


@dataclass(frozen=True)
class MixtureComponent:
    """One Gaussian component of a mixture noise model."""

    mean: float | Sequence[float] = 0.0
    spread: float | Sequence[float] = 0.0
    weight: float = 1.0


@dataclass(frozen=True)
class NoiseSpec:
    """Declarative noise model.

    kind:
        ``gaussian`` (mean, spread), ``gaussian-mixture`` (components),
        ``uniform`` (low, high) or ``external-samples`` (path to a text file,
        one sample per line, whitespace-separated components).
    sample_count:
        Number of samples drawn per request; weights are always uniform.
    """

    kind: str = "gaussian"
    sample_count: int = 25
    mean: float | Sequence[float] = 0.0
    spread: float | Sequence[float] = 0.0
    low: float | Sequence[float] = 0.0
    high: float | Sequence[float] = 0.0
    components: tuple[MixtureComponent, ...] = ()
    path: str | None = None

    def __post_init__(self):
        if self.kind not in NOISE_KINDS:
            raise ConfigurationError(
                f"kind: unknown noise kind {self.kind!r}, expected one of {NOISE_KINDS}"
            )
        if int(self.sample_count) < 1:
            raise ConfigurationError(
                f"sample_count: must be >= 1, got {self.sample_count}"
            )
        if self.kind == "gaussian-mixture":
            if not self.components:
                raise ConfigurationError("components: gaussian-mixture needs at least one component")
            weights = np.array([c.weight for c in self.components], dtype=float)
            if np.any(weights < 0):
                raise ConfigurationError("components: mixture weights must be non-negative")
            if abs(weights.sum() - 1.0) > WEIGHT_TOL:
                raise ConfigurationError(
                    f"components: mixture weights must sum to 1 (got {weights.sum()!r})"
                )
        if self.kind == "external-samples" and not self.path:
            raise ConfigurationError("path: external-samples requires a sample file path")


@dataclass(frozen=True)
class WeightedSamples:
    """Weighted empirical distribution: scalar or 2-vector values.

    ``values`` has shape ``(n,)`` or ``(n, 2)``; ``weights`` has shape
    ``(n,)``, is non-negative and sums to 1 within ``1e-9``.
    """

    values: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        weights = np.array(self.weights, dtype=float)
        if values.ndim not in (1, 2):
            raise ConfigurationError(f"values: expected 1-D or 2-D array, got ndim={values.ndim}")
        if weights.ndim != 1 or len(weights) != len(values):
            raise ConfigurationError(
                f"weights: expected {len(values)} entries, got shape {weights.shape}"
            )
        if len(values) < 1:
            raise ConfigurationError("values: need at least one sample")
        if np.any(weights < 0):
            raise ConfigurationError("weights: must be non-negative")
        if abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise ConfigurationError(f"weights: must sum to 1 (got {weights.sum()!r})")
        values.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def n(self) -> int:
        return len(self.values)

    def mean(self) -> np.ndarray | float:
        """Weighted sample mean."""
        if self.values.ndim == 1:
            return float(self.weights @ self.values)
        return self.weights @ self.values


def uniform_weights(n: int) -> np.ndarray:
    return np.full(n, 1.0 / n)


def _load_external(path: str, n: int, dimension: int) -> np.ndarray:
    file = Path(path)
    if not file.exists():
        raise ConfigurationError(f"path: sample file not found: {path}")
    try:
        raw = np.loadtxt(file, dtype=float, ndmin=2)
    except ValueError as exc:
        raise ConfigurationError(f"path: could not parse sample file {path}: {exc}") from None
    if raw.shape[1] != dimension:
        raise ConfigurationError(
            f"path: sample file {path} has {raw.shape[1]} columns, expected {dimension}"
        )
    if raw.shape[0] < n:
        raise ConfigurationError(
            f"path: sample file {path} has {raw.shape[0]} samples, need {n}"
        )
    return raw[:n]


def draw_noise(spec: NoiseSpec, seed: int, dimension: int = 2) -> WeightedSamples:
    """Draw ``spec.sample_count`` samples with uniform weights.

    Pure in ``(spec, seed, dimension)``: identical arguments produce identical
    output. ``dimension`` selects scalar samples (1) or 2-vectors (2).
    """
    if dimension not in (1, 2):
        raise ConfigurationError(f"dimension: must be 1 or 2, got {dimension}")
    n = int(spec.sample_count)
    rng = np.random.default_rng(seed)

    if spec.kind == "gaussian":
        mean = _as_vector(spec.mean, dimension, "mean")
        spread = _as_vector(spec.spread, dimension, "spread")
        values = mean + spread * rng.standard_normal((n, dimension))
    elif spec.kind == "gaussian-mixture":
        weights = np.array([c.weight for c in spec.components], dtype=float)
        idx = rng.choice(len(spec.components), size=n, p=weights / weights.sum())
        means = np.stack([_as_vector(c.mean, dimension, "components.mean") for c in spec.components])
        spreads = np.stack(
            [_as_vector(c.spread, dimension, "components.spread") for c in spec.components]
        )
        values = means[idx] + spreads[idx] * rng.standard_normal((n, dimension))
    elif spec.kind == "uniform":
        low = _as_vector(spec.low, dimension, "low")
        high = _as_vector(spec.high, dimension, "high")
        if np.any(high < low):
            raise ConfigurationError("low/high: uniform bounds must satisfy low <= high")
        values = low + (high - low) * rng.random((n, dimension))
    else:  # external-samples, kind validated at construction
        values = _load_external(spec.path, n, dimension)

    if dimension == 1:
        values = values[:, 0]
    return WeightedSamples(values=values, weights=uniform_weights(n))


class SeedStream:
    """Deterministic stream of integer sub-seeds derived from one master seed.

    The harness owns one stream per run and hands each stochastic event the
    next seed, so a run is reproducible regardless of how its internals are
    parallelized.
    """

    def __init__(self, seed: int):
        self._rng = np.random.default_rng(seed)

    def next(self) -> int:
        return int(self._rng.integers(0, 2**63 - 1))
