"""Compression vectors: capture what the dictionary misses.

After unmixing, the per-pixel residuals of a whole scene are pooled into a
``p x (rows*cols)`` matrix. Its leading left singular vectors are the
directions of largest unexplained variance; appending them to the
dictionary and fitting their coefficients per pixel shrinks the
reconstruction error of the scene at the cost of ``c`` extra numbers per
pixel.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import CTooLargeError, DimensionMismatch, ZeroResidualError
from .pruning import Rbf, Standard
from .solvers import thin_svd
from .spectra import Dictionary, HyperCube
from .unmix import AbundanceMap, pnnls_cube, reconstruct


@dataclass(frozen=True, eq=False)
class CompressionBasis:
    vectors: np.ndarray          # (p, c), orthonormal columns
    singular_values: np.ndarray  # (c,), nonincreasing

    @property
    def c(self):
        return self.vectors.shape[1]

    @classmethod
    def empty(cls, p):
        return cls(np.zeros((p, 0)), np.zeros(0))


@dataclass(eq=False)
class CompressedScene:
    """Dictionary abundances stacked on compression-vector coefficients.

    ``abundances`` has shape ``(N + c, rows, cols)``: the first ``N`` rows
    belong to the dictionary atoms, the last ``c`` to ``basis``.
    """

    abundances: np.ndarray
    basis: CompressionBasis
    dictionary_names: tuple

    @property
    def n_atoms(self):
        return len(self.dictionary_names)

    @property
    def atom_abundances(self):
        return self.abundances[: self.n_atoms]

    @property
    def basis_coefficients(self):
        return self.abundances[self.n_atoms:]


def residual_cube(cube: HyperCube, dictionary: Dictionary, abundances: AbundanceMap) -> HyperCube:
    if cube.band_count != dictionary.band_count or abundances.n_atoms != dictionary.n_atoms:
        raise DimensionMismatch("cube, dictionary and abundances disagree")
    if abundances.data.shape[1:] != cube.shape[1:]:
        raise DimensionMismatch("abundance map and cube have different spatial size")
    return HyperCube(cube.data - reconstruct(abundances, dictionary).data)


def compression_basis(residuals: HyperCube, c: int) -> CompressionBasis:
    """Leading ``c`` left singular vectors of the pooled residual matrix.

    Pixels are pooled in row-major order (pixel ``(i, j)`` is column
    ``i*cols + j``).
    """
    X = residuals.pixels()
    limit = min(X.shape)
    if not 1 <= c <= limit:
        raise CTooLargeError(f"c={c} outside [1, {limit}]")
    U, s, _ = thin_svd(X, rank=c)
    if s[0] == 0.0:
        raise ZeroResidualError("residual cube is identically zero")
    return CompressionBasis(U, s)


def _strict_fit(residuals, basis, method):
    # the residual cube is unmixed by the same pruned-NNLS routine, over U
    gamma = method.gamma if isinstance(method, Rbf) else Rbf().gamma
    names = tuple(f"cv{i}" for i in range(basis.c))
    amap = pnnls_cube(residuals, Dictionary(basis.vectors, names), basis.c, Rbf(gamma))
    return amap.pixels()


def compress_scene(cube: HyperCube, dictionary: Dictionary, k: int, c: int,
                   method=Standard(), *, strict_paper: bool = False,
                   n_jobs: int | None = None) -> CompressedScene:
    """Unmix, then add ``c`` compression vectors fitted to the residuals.

    By default every pixel gets all ``c`` coefficients by orthogonal
    projection (signed, since singular vectors carry arbitrary sign).
    ``strict_paper=True`` instead fits them with RBF-pruned NNLS at
    sparsity ``c``, which restricts coefficients to be nonnegative.
    ``c = 0`` returns the plain unmixing result with an empty basis.
    """
    amap = pnnls_cube(cube, dictionary, k, method, n_jobs=n_jobs)
    return compress_abundances(cube, dictionary, amap, c, method, strict_paper=strict_paper)


def compress_abundances(cube: HyperCube, dictionary: Dictionary, amap: AbundanceMap, c: int,
                        method=Standard(), *, strict_paper: bool = False) -> CompressedScene:
    """Second half of :func:`compress_scene`, starting from existing abundances."""
    if c == 0:
        return CompressedScene(amap.data.copy(), CompressionBasis.empty(cube.band_count),
                               dictionary.names)
    res = residual_cube(cube, dictionary, amap)
    basis = compression_basis(res, c)
    if strict_paper:
        coef = _strict_fit(res, basis, method)
    else:
        coef = basis.vectors.T @ res.pixels()
    coef = coef.reshape(c, cube.rows, cube.cols)
    return CompressedScene(np.concatenate([amap.data, coef]), basis, dictionary.names)


def reconstruct_scene(scene: CompressedScene, dictionary: Dictionary) -> HyperCube:
    if scene.n_atoms != dictionary.n_atoms:
        raise DimensionMismatch("scene and dictionary disagree on atom count")
    _, rows, cols = scene.abundances.shape
    flat = scene.abundances.reshape(scene.abundances.shape[0], -1)
    y = dictionary.matrix @ flat[: scene.n_atoms] + scene.basis.vectors @ flat[scene.n_atoms:]
    return HyperCube.from_pixels(y, rows, cols)


def compression_error(cube: HyperCube, reconstruction: HyperCube):
    """Per-pixel ``||y - y_hat||_1 / p`` and its mean over the scene.

    Returns ``(per_pixel, scene_mean)`` with ``per_pixel`` shaped
    ``(rows, cols)``.
    """
    if cube.shape != reconstruction.shape:
        raise DimensionMismatch(f"{cube.shape} vs {reconstruction.shape}")
    per_pixel = np.abs(cube.data - reconstruction.data).sum(axis=0) / cube.band_count
    return per_pixel, float(per_pixel.mean())


def residual_l2(cube: HyperCube, reconstruction: HyperCube) -> float:
    """Scene mean of the per-pixel L2 residual norm."""
    if cube.shape != reconstruction.shape:
        raise DimensionMismatch(f"{cube.shape} vs {reconstruction.shape}")
    return float(np.linalg.norm(cube.data - reconstruction.data, axis=0).mean())
