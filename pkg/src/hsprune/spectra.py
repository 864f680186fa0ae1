"""Core spectral containers and dictionary transforms.

A spectrum is a plain 1-D float array. A :class:`Dictionary` holds N named
atoms as the columns of a ``p x N`` matrix, and a :class:`HyperCube` holds a
``p x rows x cols`` image.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from math import comb

import numpy as np

from .errors import (
    CombinatorialLimitError,
    DataError,
    DimensionMismatch,
    EmptyResultError,
    ZeroAtomError,
)

ZERO_ATOM_TOL = 1e-10
GS_DROP_TOL = 1e-8


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Dictionary:
    """Ordered collection of named atoms sharing one band grid.

    Parameters
    ----------
    matrix : array_like, shape (p, N)
        Atoms stored as columns.
    names : sequence of str
        Unique label for every column.
    """

    matrix: np.ndarray
    names: tuple

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.float64)
        if m.ndim != 2 or m.shape[0] < 1:
            raise DimensionMismatch(f"dictionary matrix must be 2-D (p, N), got {m.shape}")
        names = tuple(str(n) for n in self.names)
        if len(names) != m.shape[1]:
            raise DimensionMismatch(f"{len(names)} names for {m.shape[1]} atoms")
        if len(set(names)) != len(names):
            raise DataError("atom names must be unique")
        if not np.all(np.isfinite(m)):
            raise DataError("dictionary contains non-finite values")
        object.__setattr__(self, "matrix", _frozen(m))
        object.__setattr__(self, "names", names)

    @classmethod
    def from_atoms(cls, atoms, names=None):
        """Build from a sequence of 1-D spectra (one per atom)."""
        atoms = [np.asarray(a, dtype=np.float64) for a in atoms]
        if not atoms:
            raise DataError("no atoms given")
        if len({a.shape for a in atoms}) != 1:
            raise DimensionMismatch("atoms have different band counts")
        if names is None:
            names = [f"atom{i}" for i in range(len(atoms))]
        return cls(np.column_stack(atoms), tuple(names))

    @property
    def band_count(self):
        return self.matrix.shape[0]

    @property
    def n_atoms(self):
        return self.matrix.shape[1]

    def __len__(self):
        return self.n_atoms

    def atom(self, i):
        return self.matrix[:, i]

    def subset(self, indices):
        indices = list(indices)
        return Dictionary(self.matrix[:, indices], tuple(self.names[i] for i in indices))

    def is_normalized(self, tol=1e-12):
        return bool(np.all(np.abs(np.linalg.norm(self.matrix, axis=0) - 1.0) <= tol))


@dataclass(frozen=True, eq=False)
class HyperCube:
    """``p x rows x cols`` image, band-major."""

    data: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.data, dtype=np.float64)
        if d.ndim != 3 or min(d.shape) < 1:
            raise DimensionMismatch(f"cube must be 3-D (p, rows, cols), got {d.shape}")
        if not np.all(np.isfinite(d)):
            raise DataError("cube contains non-finite values")
        object.__setattr__(self, "data", _frozen(d))

    @classmethod
    def from_pixels(cls, pixels, rows, cols):
        """Inverse of :meth:`pixels`: ``(p, rows*cols)`` in row-major pixel order."""
        pixels = np.asarray(pixels, dtype=np.float64)
        return cls(pixels.reshape(pixels.shape[0], rows, cols))

    @property
    def band_count(self):
        return self.data.shape[0]

    @property
    def rows(self):
        return self.data.shape[1]

    @property
    def cols(self):
        return self.data.shape[2]

    @property
    def shape(self):
        return self.data.shape

    def pixels(self):
        """Pixels as columns of a ``(p, rows*cols)`` matrix; pixel (i, j) is column ``i*cols + j``."""
        return self.data.reshape(self.band_count, -1)


def normalize(dictionary: Dictionary) -> Dictionary:
    """Rescale every atom to unit L2 norm, keeping order, names and direction."""
    m = dictionary.matrix
    norms = np.linalg.norm(m, axis=0)
    for name, n in zip(dictionary.names, norms):
        if n <= ZERO_ATOM_TOL:
            raise ZeroAtomError(name)
    return Dictionary(m / norms, dictionary.names)


def _mgs_pass(m, ref_norms, tol):
    """One modified Gram-Schmidt sweep over the columns of ``m``.

    Returns the orthonormal columns and the indices that were kept.
    """
    w = np.array(m, dtype=np.float64)
    kept = []
    for j in range(w.shape[1]):
        v = w[:, j]
        nv = np.linalg.norm(v)
        if ref_norms[j] <= ZERO_ATOM_TOL or nv < tol * ref_norms[j]:
            continue
        q = v / nv
        w[:, j] = q
        kept.append(j)
        rest = w[:, j + 1:]
        rest -= np.outer(q, q @ rest)
    return w[:, kept], kept


def gram_schmidt(dictionary: Dictionary, tolerance: float = GS_DROP_TOL):
    """Orthonormalize atoms in order with modified Gram-Schmidt.

    An atom whose residual, after removing the components along the atoms
    already kept, is shorter than ``tolerance`` times its original norm is
    dropped.

    Returns
    -------
    Dictionary
        The orthonormal atoms (names of the survivors are preserved).
    list of str
        Names of the dropped atoms.
    """
    if tolerance <= 0:
        raise ValueError("tolerance must be positive")
    m = dictionary.matrix
    norms = np.linalg.norm(m, axis=0)
    q, kept = _mgs_pass(m, norms, tolerance)
    if not kept:
        raise EmptyResultError("every atom was linearly dependent")
    # second sweep restores orthogonality lost to cancellation
    gram = q.T @ q
    if np.max(np.abs(gram - np.eye(len(kept)))) > 1e-13:
        q2, kept2 = _mgs_pass(q, np.ones(len(kept)), tolerance)
        q = q2
        kept = [kept[i] for i in kept2]
    dropped = [dictionary.names[i] for i in range(len(dictionary)) if i not in set(kept)]
    return Dictionary(q, tuple(dictionary.names[i] for i in kept)), dropped


@dataclass
class AugmentReport:
    generated: int = 0
    skipped: list = field(default_factory=list)


def _n_products(n, max_order, include_self):
    if include_self:
        return sum(comb(n + r - 1, r) for r in range(2, max_order + 1))
    return sum(comb(n, r) for r in range(2, min(max_order, n) + 1))


def hadamard_augment(dictionary: Dictionary, max_order: int = 2, *,
                     include_self: bool = True, max_atoms: int | None = None):
    """Append elementwise products of atoms, modelling multiple scattering.

    Every unordered multiset of 2..``max_order`` atoms contributes the
    renormalized product of its members (each multiset once, since the
    product commutes). Self-products such as ``a*a`` are included unless
    ``include_self`` is false. Products are named by joining constituent
    names with ``*`` and are appended after the original atoms in
    lexicographic order of their index tuples. Products whose norm is at
    most the zero-atom tolerance are skipped and listed in the report.

    Returns ``(Dictionary, AugmentReport)``.
    """
    if max_order < 2:
        raise ValueError("max_order must be >= 2")
    n = dictionary.n_atoms
    total = n + _n_products(n, max_order, include_self)
    if max_atoms is not None and total > max_atoms:
        raise CombinatorialLimitError(
            f"augmentation would produce {total} atoms, cap is {max_atoms}")

    gen = itertools.combinations_with_replacement if include_self else itertools.combinations
    tuples = sorted(t for r in range(2, max_order + 1) for t in gen(range(n), r))

    m = dictionary.matrix
    cols = [m[:, i] for i in range(n)]
    names = list(dictionary.names)
    report = AugmentReport()
    for t in tuples:
        prod = np.prod(m[:, list(t)], axis=1)
        nrm = np.linalg.norm(prod)
        name = "*".join(dictionary.names[i] for i in t)
        if nrm <= ZERO_ATOM_TOL:
            report.skipped.append(name)
            continue
        cols.append(prod / nrm)
        names.append(name)
        report.generated += 1
    return Dictionary(np.column_stack(cols), tuple(names)), report
