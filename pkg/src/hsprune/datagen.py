"""Synthetic scenes and measurement noise.

Each pixel draws its own random stream from ``SeedSequence(seed,
spawn_key=(pixel,))``, so a scene is reproducible from its seed and every
pixel's content is independent of the order in which pixels are built.
"""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import ConfigError, DimensionMismatch, SupportTooLargeError, ZeroSignalError
from .spectra import Dictionary, HyperCube, normalize

FLIP_MODES = ("atom", "band")


@dataclass(frozen=True)
class NoNoise:
    pass


@dataclass(frozen=True)
class Awgn:
    snr_db: float


@dataclass(frozen=True)
class SignFlip:
    """Each constituent atom enters the mixture with sign -1 with ``flip_probability``.

    ``mode="atom"`` draws one sign per atom; ``mode="band"`` draws one per
    band of each atom.
    """

    flip_probability: float
    mode: str = "atom"

    def __post_init__(self):
        if not 0.0 <= self.flip_probability <= 1.0:
            raise ConfigError(f"flip_probability {self.flip_probability} outside [0, 1]")
        if self.mode not in FLIP_MODES:
            raise ConfigError(f"flip mode must be one of {FLIP_MODES}")


NoiseSpec = Union[NoNoise, Awgn, SignFlip]


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    cube: HyperCube
    ground_truth: np.ndarray   # (N, rows, cols), nonnegative
    dictionary: Dictionary
    seed: int
    noise_spec: object


def pixel_rng(seed: int, pixel: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(pixel,)))


def apply_awgn(y, snr_db: float, rng: np.random.Generator) -> np.ndarray:
    """Add white Gaussian noise at ``snr_db`` relative to this spectrum's power.

    Per-band variance is ``||y||^2 / (p * 10**(snr_db/10))`` so the expected
    noise energy sits ``snr_db`` below the signal energy.
    """
    y = np.asarray(y, dtype=np.float64)
    power = float(y @ y)
    if power == 0.0:
        raise ZeroSignalError("cannot set an SNR for an all-zero spectrum")
    sigma = np.sqrt(power / (y.size * 10.0 ** (snr_db / 10.0)))
    return y + sigma * rng.standard_normal(y.size)


def apply_sign_flip(dictionary, beta, flip_probability: float,
                    rng: np.random.Generator, mode: str = "atom") -> np.ndarray:
    """Mix the atoms in ``beta``'s support with random signs.

    Only atoms with nonzero ``beta`` take part; each is multiplied by a
    variable that is -1 with ``flip_probability`` and +1 otherwise.
    """
    SignFlip(flip_probability, mode)  # validates
    A = getattr(dictionary, "matrix", dictionary)
    beta = np.asarray(beta, dtype=np.float64)
    if beta.shape != (A.shape[1],):
        raise DimensionMismatch(f"beta has shape {beta.shape}, expected ({A.shape[1]},)")
    support = np.flatnonzero(beta)
    sub = A[:, support] * beta[support]
    if mode == "atom":
        signs = np.where(rng.random(support.size) < flip_probability, -1.0, 1.0)
        return sub @ signs
    signs = np.where(rng.random(sub.shape) < flip_probability, -1.0, 1.0)
    return (sub * signs).sum(axis=1)


def draw_abundances(n_atoms: int, support_size: int, rng: np.random.Generator) -> np.ndarray:
    """Random support of ``support_size`` atoms with Uniform(0, 1] weights."""
    beta = np.zeros(n_atoms)
    support = rng.choice(n_atoms, size=support_size, replace=False)
    beta[support] = 1.0 - rng.random(support_size)
    return beta


def synth_pixel(dictionary: Dictionary, support_size: int, noise, rng):
    """One measurement and its ground-truth abundances."""
    A = dictionary.matrix
    beta = draw_abundances(A.shape[1], support_size, rng)
    if isinstance(noise, SignFlip):
        y = apply_sign_flip(A, beta, noise.flip_probability, rng, noise.mode)
    else:
        y = A @ beta
        if isinstance(noise, Awgn):
            y = apply_awgn(y, noise.snr_db, rng)
    return y, beta


def synth_scene(dictionary: Dictionary, rows: int, cols: int, support_size: int,
                noise=NoNoise(), seed: int = 0, n_jobs: int | None = None) -> SyntheticScene:
    """Synthesize a ``rows x cols`` scene by mixing random sparse abundances."""
    n = dictionary.n_atoms
    if not 1 <= support_size <= n:
        raise SupportTooLargeError(f"support_size {support_size} outside [1, {n}]")
    if noise is None:
        noise = NoNoise()
    n_pix = rows * cols
    Y = np.empty((dictionary.band_count, n_pix))
    B = np.empty((n, n_pix))

    def work(j):
        Y[:, j], B[:, j] = synth_pixel(dictionary, support_size, noise, pixel_rng(seed, j))

    if n_jobs is not None and n_jobs > 1:
        with ThreadPoolExecutor(n_jobs) as pool:
            list(pool.map(work, range(n_pix)))
    else:
        for j in range(n_pix):
            work(j)
    return SyntheticScene(HyperCube.from_pixels(Y, rows, cols), B.reshape(n, rows, cols),
                          dictionary, seed, noise)


def synthetic_dictionary(n_atoms: int, n_bands: int, seed: int = 0,
                         kind: str = "smooth") -> Dictionary:
    """Random unit-norm atoms standing in for a spectral library.

    ``kind="smooth"`` gives positive, broadband spectra (a sloped baseline
    plus a few Gaussian absorption/emission features) that are strongly
    correlated with each other, like mineral reflectances. ``kind="features"``
    gives mixed-sign spectra (a small offset plus 16 narrow features of
    random sign), which behave like continuum-removed or mean-centred
    libraries: atoms are moderately coherent in both directions.
    ``kind="gaussian"`` gives i.i.d. normal entries.

    Smooth spectra have low numerical rank; orthonormalizing many of them
    drops atoms. Use ``gaussian`` when an orthonormal basis is needed.
    """
    rng = np.random.default_rng(seed)
    if kind == "gaussian":
        m = rng.standard_normal((n_bands, n_atoms))
    elif kind == "features":
        x = np.linspace(0.0, 1.0, n_bands)[:, None]
        m = np.zeros((n_bands, n_atoms)) + 0.3 * rng.standard_normal(n_atoms)
        for _ in range(16):
            center = rng.random(n_atoms)
            width = rng.uniform(0.01, 0.05, n_atoms)
            m = m + rng.standard_normal(n_atoms) * np.exp(-0.5 * ((x - center) / width) ** 2)
    elif kind == "smooth":
        x = np.linspace(0.0, 1.0, n_bands)[:, None]
        m = 0.3 + 0.4 * rng.random(n_atoms) + rng.uniform(-0.2, 0.2, n_atoms) * x
        for _ in range(4):
            center = rng.random(n_atoms)
            width = rng.uniform(0.02, 0.15, n_atoms)
            depth = rng.uniform(-0.25, 0.25, n_atoms)
            m = m + depth * np.exp(-0.5 * ((x - center) / width) ** 2)
        m = np.clip(m, 0.01, None)
    else:
        raise ConfigError(f"unknown dictionary kind {kind!r}")
    names = [f"{kind}{i:04d}" for i in range(n_atoms)]
    return normalize(Dictionary(m, tuple(names)))


def abundance_error(estimate, truth, norm: int = 1) -> np.ndarray:
    """Per-pixel ``||c - beta||`` (L1 by default, L2 with ``norm=2``).

    Accepts ``(N,)`` vectors or ``(N, rows, cols)`` maps; for maps the
    result has shape ``(rows, cols)``.
    """
    d = np.asarray(estimate, dtype=np.float64) - np.asarray(truth, dtype=np.float64)
    if norm == 1:
        return np.abs(d).sum(axis=0)
    if norm == 2:
        return np.sqrt((d * d).sum(axis=0))
    raise ConfigError("norm must be 1 or 2")


def plant_residual(cube: HyperCube, dictionary: Dictionary, rank: int, scale: float = 1.0,
                   seed: int = 0, orthogonal: bool = True):
    """Add a shared rank-``rank`` signal that the dictionary cannot express.

    ``rank`` random unit signatures (projected off ``span(A)`` when
    ``orthogonal``) are mixed into every pixel with i.i.d. N(0, scale^2)
    weights. Returns ``(new_cube, signatures)`` with signatures ``(p, rank)``.
    """
    if rank < 1:
        raise ConfigError("rank must be >= 1")
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(2**32 - 1,)))
    p = cube.band_count
    S = rng.standard_normal((p, rank))
    if orthogonal:
        Q, _ = np.linalg.qr(dictionary.matrix)
        S -= Q @ (Q.T @ S)
    S /= np.linalg.norm(S, axis=0)
    W = scale * rng.standard_normal((rank, cube.rows * cube.cols))
    return HyperCube.from_pixels(cube.pixels() + S @ W, cube.rows, cube.cols), S
