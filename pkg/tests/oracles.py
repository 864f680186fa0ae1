"""Independent reference computations used by the tests.

None of these share code with the library paths they check.
"""
import itertools

import numpy as np


def pg_nnls(A, y, tol=1e-13, max_iter=200_000):
    """NNLS by accelerated projected gradient (FISTA with adaptive restart).

    Runs until the projected-gradient step ``||c - max(0, c - g)||_inf`` falls
    below ``tol * ||A^T y||_inf``.
    """
    A = np.asarray(A, float)
    y = np.asarray(y, float)
    AtA = A.T @ A
    Aty = A.T @ y
    L = np.linalg.norm(A, 2) ** 2
    scale = max(np.max(np.abs(Aty)), 1e-300)
    x = np.zeros(A.shape[1])
    z = x.copy()
    t = 1.0

    def f(v):
        r = A @ v - y
        return 0.5 * r @ r

    fx = f(x)
    for _ in range(max_iter):
        gx = AtA @ x - Aty
        if np.max(np.abs(x - np.maximum(0.0, x - gx))) <= tol * scale:
            break
        g = AtA @ z - Aty
        x_new = np.maximum(0.0, z - g / L)
        f_new = f(x_new)
        if f_new > fx and t > 1.0:
            # momentum overshot: restart from x with a plain step
            z = x.copy()
            t = 1.0
            continue
        t_new = 0.5 * (1 + np.sqrt(1 + 4 * t * t))
        z = x_new + ((t - 1) / t_new) * (x_new - x)
        x, fx, t = x_new, f_new, t_new
    return x


def pinv_solve(A, y, rcond=1e-12):
    """Minimum-norm least squares via an explicit SVD pseudoinverse."""
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    keep = s > rcond * s[0]
    return Vt[keep].T @ ((U[:, keep].T @ y) / s[keep])


def loop_scores(A, y):
    out = []
    for i in range(A.shape[1]):
        acc = 0.0
        for b in range(A.shape[0]):
            acc += A[b, i] * y[b]
        out.append(abs(acc))
    return np.array(out)


def brute_top_k_valid(scores, idx):
    """Does ``idx`` satisfy: every selected score >= every unselected score?"""
    sel = set(int(i) for i in idx)
    rest = [s for i, s in enumerate(scores) if i not in sel]
    return not rest or min(scores[i] for i in sel) >= max(rest)


def multisets(n, r, include_self):
    gen = itertools.combinations_with_replacement if include_self else itertools.combinations
    return list(gen(range(n), r))


def loop_residual(Y, A, C):
    p, rows, cols = Y.shape
    out = np.zeros_like(Y)
    for i in range(rows):
        for j in range(cols):
            for b in range(p):
                out[b, i, j] = Y[b, i, j] - sum(A[b, n] * C[n, i, j] for n in range(A.shape[1]))
    return out


def loop_compression_error(Y, R):
    p, rows, cols = Y.shape
    per = np.zeros((rows, cols))
    for i in range(rows):
        for j in range(cols):
            per[i, j] = sum(abs(Y[b, i, j] - R[b, i, j]) for b in range(p)) / p
    return per, per.sum() / (rows * cols)
