"""Dense numerical kernels: NNLS, least squares, matching pursuit, thin SVD."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, ConvergenceFailure, DimensionMismatch, MaxIterationsError

KKT_RTOL = 1e-8


@dataclass(frozen=True)
class NnlsSolution:
    coefficients: np.ndarray
    residual_norm: float
    iterations: int
    kkt_violation: float


@dataclass(frozen=True)
class PursuitSolution:
    """Result of matching pursuit.

    ``support`` lists distinct atom indices in order of first selection and
    ``coefficients`` is aligned with it. ``residual_history`` holds the
    residual norm before the first and after every iteration.
    """

    support: list
    coefficients: np.ndarray
    residual_norm: float
    residual_history: np.ndarray

    def dense(self, n_atoms):
        out = np.zeros(n_atoms)
        out[self.support] = self.coefficients
        return out


def _check(A, y):
    A = np.asarray(A, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if A.ndim != 2 or y.ndim != 1 or A.shape[0] != y.shape[0]:
        raise DimensionMismatch(f"matrix {A.shape} incompatible with vector {y.shape}")
    return A, y


def kkt_violation(A, y, c):
    """Worst relative breach of the NNLS optimality conditions at ``c``.

    With gradient ``g = A^T (A c - y)``: passive entries (c > 0) need
    ``g = 0`` and active entries (c = 0) need ``g >= 0``. The result is
    scaled by ``||A^T y||_inf`` so a value below ``1e-8`` certifies a
    solution. Negative coefficients count as violations too.
    """
    A, y = _check(A, y)
    c = np.asarray(c, dtype=np.float64)
    g = A.T @ (A @ c - y)
    scale = np.max(np.abs(A.T @ y)) if y.size else 0.0
    if scale == 0.0:
        scale = 1.0
    passive = c > 0
    worst = 0.0
    if np.any(passive):
        worst = max(worst, float(np.max(np.abs(g[passive]))))
    if np.any(~passive):
        worst = max(worst, float(np.max(-g[~passive])))
    if np.any(c < 0):
        worst = max(worst, float(np.max(-c[c < 0])) * scale)
    return worst / scale


def _ls_on(A, y, cols):
    return np.linalg.lstsq(A[:, cols], y, rcond=None)[0]


def nnls(A, y, max_iter=None) -> NnlsSolution:
    """Non-negative least squares by the Lawson-Hanson active-set method.

    Minimizes ``||y - A c||_2`` subject to ``c >= 0``. Each outer iteration
    frees the variable with the largest positive dual entry ``w = A^T r``,
    solves the unconstrained problem on the passive set and, if that
    leaves some passive variable non-positive, steps back along the
    segment to the first boundary hit and moves those variables to the
    active set.

    Raises :class:`MaxIterationsError` after ``max_iter`` (default ``3 n``)
    outer iterations.
    """
    A, y = _check(A, y)
    p, n = A.shape
    if n < 1:
        raise DimensionMismatch("NNLS needs at least one column")
    if max_iter is None:
        max_iter = 3 * n
    aty = A.T @ y
    tol = KKT_RTOL * max(float(np.max(np.abs(aty))), np.finfo(float).tiny)

    c = np.zeros(n)
    passive = np.zeros(n, dtype=bool)
    w = aty.copy()
    it = 0
    while True:
        candidates = ~passive & (w > tol)
        if not np.any(candidates):
            break
        if it >= max_iter:
            raise MaxIterationsError(max_iter)
        it += 1
        j = int(np.argmax(np.where(candidates, w, -np.inf)))
        passive[j] = True
        while True:
            idx = np.flatnonzero(passive)
            z = np.zeros(n)
            z[idx] = _ls_on(A, y, idx)
            if np.all(z[idx] > 0):
                c = z
                break
            bad = idx[z[idx] <= 0]
            step = c[bad] / (c[bad] - z[bad])
            alpha = float(np.min(step))
            c = c + alpha * (z - c)
            # variables that reached the boundary leave the passive set
            hit = passive & (c <= 1e-14 * np.max(np.abs(c)))
            hit[bad[np.argmin(step)]] = True
            c[hit] = 0.0
            passive &= ~hit
            if not np.any(passive):
                break
        w = A.T @ (y - A @ c)

    res = float(np.linalg.norm(y - A @ c))
    return NnlsSolution(c, res, it, kkt_violation(A, y, c))


def lstsq(A, y) -> np.ndarray:
    """Unconstrained least squares; minimum-norm solution when rank deficient."""
    A, y = _check(A, y)
    return np.linalg.lstsq(A, y, rcond=None)[0]


def matching_pursuit(A, y, k: int) -> PursuitSolution:
    """Classic matching pursuit with re-selection.

    Runs exactly ``k`` greedy steps; each picks the atom with the largest
    ``|<a_i, r>|``, adds that inner product to its coefficient and removes
    the projection from the residual. Atoms are assumed unit norm. Stops
    early only if the residual becomes exactly zero.
    """
    A, y = _check(A, y)
    if k < 1:
        raise ConfigError("k must be >= 1")
    n = A.shape[1]
    coef = np.zeros(n)
    order = []
    r = y.copy()
    hist = [float(np.linalg.norm(r))]
    for _ in range(k):
        inner = A.T @ r
        i = int(np.argmax(np.abs(inner)))
        a = inner[i]
        if a == 0.0:
            break
        coef[i] += a
        if i not in order:
            order.append(i)
        r = r - a * A[:, i]
        hist.append(float(np.linalg.norm(r)))
    return PursuitSolution(order, coef[order], hist[-1], np.array(hist))


def thin_svd(X, rank: int | None = None):
    """Economy SVD ``X = U diag(s) V^T`` with ``s`` nonincreasing.

    Returns ``(U, s, V)`` with ``U`` of shape ``(p, r)`` and ``V`` of shape
    ``(m, r)``, ``r = min(p, m)`` or ``rank`` if given.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2:
        raise DimensionMismatch("thin_svd expects a matrix")
    if not np.all(np.isfinite(X)):
        raise ConvergenceFailure("SVD input contains non-finite values")
    try:
        U, s, Vt = np.linalg.svd(X, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise ConvergenceFailure(str(exc)) from exc
    if rank is not None:
        if not 0 <= rank <= s.size:
            raise ConfigError(f"rank {rank} outside [0, {s.size}]")
        U, s, Vt = U[:, :rank], s[:rank], Vt[:rank]
    return U, s, Vt.T
