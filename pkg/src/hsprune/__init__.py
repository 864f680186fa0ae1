"""Sparse hyperspectral unmixing by pruned non-negative least squares.

Atoms are pruned by plain correlation or by a Gaussian RBF kernel before an
NNLS fit, and leftover scene variance can be captured with SVD compression
vectors.
"""
from .compress import (
    CompressedScene,
    CompressionBasis,
    compress_scene,
    compression_basis,
    compression_error,
    reconstruct_scene,
    residual_cube,
)
from .datagen import Awgn, NoNoise, SignFlip, apply_awgn, apply_sign_flip, synth_scene
from .pruning import Rbf, Standard, score_rbf, score_standard, select_threshold, select_top_k
from .solvers import lstsq, matching_pursuit, nnls, thin_svd
from .spectra import Dictionary, HyperCube, gram_schmidt, hadamard_augment, normalize
from .unmix import AbundanceMap, MatchingPursuit, pnnls_cube, pnnls_pixel, reconstruct

__version__ = "0.1.0"

__all__ = [
    "AbundanceMap", "Awgn", "CompressedScene", "CompressionBasis", "Dictionary", "HyperCube",
    "MatchingPursuit", "NoNoise", "Rbf", "SignFlip", "Standard", "apply_awgn", "apply_sign_flip",
    "compress_scene", "compression_basis", "compression_error", "gram_schmidt", "hadamard_augment",
    "lstsq", "matching_pursuit", "nnls", "normalize", "pnnls_cube", "pnnls_pixel", "reconstruct",
    "reconstruct_scene", "residual_cube", "score_rbf", "score_standard", "select_threshold",
    "select_top_k", "synth_scene", "thin_svd",
]
