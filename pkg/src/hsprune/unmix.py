"""Per-pixel pruned NNLS unmixing over a hypercube."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import pruning
from .errors import ConfigError, DimensionMismatch, HsError, KOutOfRange
from .pruning import PruneMethod, Rbf, Standard
from .solvers import matching_pursuit, nnls
from .spectra import Dictionary, HyperCube

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class MatchingPursuit:
    """Baseline: plain matching pursuit with ``k`` iterations (no pruning)."""

    name = "mp"


@dataclass(eq=False)
class AbundanceMap:
    """``N x rows x cols`` coefficients plus per-pixel failure diagnostics.

    Maps produced with a pruning method are nonnegative with at most
    ``sparsity_k`` nonzeros per pixel. Matching-pursuit maps share the
    sparsity bound but may hold negative coefficients.
    """

    data: np.ndarray
    dictionary_names: tuple
    sparsity_k: int
    failures: dict = field(default_factory=dict)

    @property
    def n_atoms(self):
        return self.data.shape[0]

    def pixels(self):
        return self.data.reshape(self.data.shape[0], -1)


def _check_k(k, n):
    if not 1 <= k <= n:
        raise KOutOfRange(f"k={k} outside [1, {n}]")


def pnnls_pixel(y, dictionary: Dictionary, k: int, method: PruneMethod = Standard()) -> np.ndarray:
    """Score atoms, keep the top ``k`` and solve NNLS on them.

    Returns the length-N coefficient vector with zeros off the kept set.
    """
    A = dictionary.matrix
    _check_k(k, A.shape[1])
    idx = pruning.select_top_k(pruning.score(method, A, y), k)
    out = np.zeros(A.shape[1])
    out[idx] = nnls(A[:, idx], y).coefficients
    return out


def unmix_pixel(y, dictionary: Dictionary, k: int, method=Standard()) -> np.ndarray:
    if isinstance(method, MatchingPursuit):
        return matching_pursuit(dictionary.matrix, y, k).dense(dictionary.n_atoms)
    return pnnls_pixel(y, dictionary, k, method)


def _solve_all(pixels, dictionary, k, method, n_jobs):
    n_pix = pixels.shape[1]
    out = np.zeros((dictionary.n_atoms, n_pix))
    failures = {}

    def work(j):
        try:
            out[:, j] = unmix_pixel(pixels[:, j], dictionary, k, method)
        except HsError as exc:
            # isolate bad pixels; the slot stays zero
            failures[j] = str(exc)

    if n_jobs is not None and n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            list(pool.map(work, range(n_pix)))
    else:
        for j in range(n_pix):
            work(j)
    if failures:
        log.warning("%d of %d pixels failed and were zero-filled", len(failures), n_pix)
    return out, failures


def pnnls_cube(cube: HyperCube, dictionary: Dictionary, k: int,
               method=Standard(), n_jobs: int | None = None) -> AbundanceMap:
    """Unmix every pixel of ``cube`` independently.

    ``method`` is :class:`~hsprune.pruning.Standard`,
    :class:`~hsprune.pruning.Rbf` or :class:`MatchingPursuit`. Pixels whose
    solve fails are zero-filled and reported in ``AbundanceMap.failures``
    keyed by flat pixel index ``i*cols + j``. Output does not depend on
    ``n_jobs``.
    """
    if cube.band_count != dictionary.band_count:
        raise DimensionMismatch(
            f"cube has {cube.band_count} bands, dictionary has {dictionary.band_count}")
    _check_k(k, dictionary.n_atoms)
    flat, failures = _solve_all(cube.pixels(), dictionary, k, method, n_jobs)
    data = flat.reshape(dictionary.n_atoms, cube.rows, cube.cols)
    return AbundanceMap(data, dictionary.names, k, failures)


def reconstruct(abundances: AbundanceMap, dictionary: Dictionary) -> HyperCube:
    """Per-pixel ``A c``."""
    if abundances.n_atoms != dictionary.n_atoms:
        raise DimensionMismatch(
            f"{abundances.n_atoms} abundance rows for {dictionary.n_atoms} atoms")
    _, rows, cols = abundances.data.shape
    return HyperCube.from_pixels(dictionary.matrix @ abundances.pixels(), rows, cols)


def parse_method(name: str, gamma: float = pruning.DEFAULT_GAMMA):
    """Map a CLI/config token (``standard``, ``rbf``, ``mp``) to a method object."""
    name = name.strip().lower()
    if name == "standard":
        return Standard()
    if name == "rbf":
        return Rbf(gamma)
    if name == "mp":
        return MatchingPursuit()
    raise ConfigError(f"unknown method {name!r}")


def method_label(method) -> str:
    if isinstance(method, Rbf):
        return f"pnnls_rbf(gamma={method.gamma:g})"
    if isinstance(method, Standard):
        return "pnnls_standard"
    return "mp"
