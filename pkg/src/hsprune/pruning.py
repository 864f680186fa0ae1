"""Atom scoring and sub-dictionary selection.

Standard pruning ranks atoms by ``|<a_i, y>|``. RBF pruning ranks them by
the Gaussian kernel ``exp(-gamma ||a_i - y||^2)``, an inner product in the
kernel's reproducing Hilbert space. For unit-norm inputs
``||a - y||^2 = 2 - 2<a, y>``, so the RBF ranking follows the *signed*
inner product: atoms anti-correlated with the measurement score low
instead of high.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import DimensionMismatch, KOutOfRange, NonPositiveGamma

DEFAULT_GAMMA = 1.0


@dataclass(frozen=True)
class Standard:
    name = "standard"


@dataclass(frozen=True)
class Rbf:
    gamma: float = DEFAULT_GAMMA
    name = "rbf"

    def __post_init__(self):
        if not self.gamma > 0:
            raise NonPositiveGamma(f"gamma must be > 0, got {self.gamma}")


PruneMethod = Union[Standard, Rbf]


@dataclass(frozen=True)
class PruneScores:
    scores: np.ndarray
    method: object


def _matrix(dictionary):
    return getattr(dictionary, "matrix", dictionary)


def _check(A, y):
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if A.ndim != 2 or y.shape != (A.shape[0],):
        raise DimensionMismatch(f"dictionary {A.shape} incompatible with spectrum {y.shape}")
    return A, y


def score_standard(dictionary, y) -> PruneScores:
    A, y = _check(_matrix(dictionary), y)
    return PruneScores(np.abs(A.T @ y), Standard())


def score_rbf(dictionary, y, gamma: float = DEFAULT_GAMMA) -> PruneScores:
    """Gaussian-kernel scores against ``y`` rescaled to unit norm.

    A zero measurement is scored as is (every unit atom then sits at
    squared distance 1).
    """
    method = Rbf(gamma)
    A, y = _check(_matrix(dictionary), y)
    ny = np.linalg.norm(y)
    if ny > 0:
        y = y / ny
    d2 = np.sum((A - y[:, None]) ** 2, axis=0)
    return PruneScores(np.exp(-gamma * d2), method)


def score(method: PruneMethod, dictionary, y) -> PruneScores:
    if isinstance(method, Rbf):
        return score_rbf(dictionary, y, method.gamma)
    if isinstance(method, Standard):
        return score_standard(dictionary, y)
    raise TypeError(f"unknown prune method {method!r}")


def _values(scores):
    return np.asarray(getattr(scores, "scores", scores), dtype=np.float64)


def select_top_k(scores, k: int) -> np.ndarray:
    """Indices of the ``k`` highest scores, ascending; ties go to the lower index."""
    s = _values(scores)
    if not 1 <= k <= s.size:
        raise KOutOfRange(f"k={k} outside [1, {s.size}]")
    order = np.argsort(-s, kind="stable")
    return np.sort(order[:k])


def select_threshold(scores, delta: float) -> np.ndarray:
    """Indices whose score strictly exceeds ``delta`` (possibly empty)."""
    if delta < 0:
        raise ValueError("delta must be >= 0")
    return np.flatnonzero(_values(scores) > delta)
