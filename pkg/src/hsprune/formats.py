"""Readers and writers for the on-disk formats.

HCUB (hypercube)::

    b"HCUB" | u16 version | u32 p | u32 rows | u32 cols | f64[p*rows*cols]

with the payload band-major, then row-major over pixels. HSCZ (compressed
scene)::

    b"HSCZ" | u16 version | u32 p, rows, cols, N, c
    N x (u32 byte length | UTF-8 name)
    f64[p*c]   basis, column-major
    f64[c]     singular values
    u64 count | count x (u32 pixel | u32 row | f64 value)

Pixel indices are ``i*cols + j``; rows index the ``N + c`` abundance rows;
entries not listed are +0.0. All integers and floats are little-endian.

Dictionary CSV has a header ``name,v1,...,vp`` and one atom per row.
Values are written with ``repr`` so a save/load cycle is bit-exact.
"""
from __future__ import annotations

import csv
import io
import os
import struct
from pathlib import Path

import numpy as np

from .compress import CompressedScene, CompressionBasis
from .errors import (
    AllMissingError,
    BadMagicError,
    DataError,
    EmptyFileError,
    TruncatedFileError,
    UnparseableLineError,
    VersionUnsupportedError,
)
from .spectra import Dictionary, HyperCube

CUBE_MAGIC = b"HCUB"
SCENE_MAGIC = b"HSCZ"
VERSION = 1
MISSING_SENTINEL = -1e32

_TRIPLET = np.dtype([("pixel", "<u4"), ("row", "<u4"), ("value", "<f8")])


class _Reader:
    def __init__(self, buf):
        self.buf = buf
        self.pos = 0

    def take(self, n):
        if self.pos + n > len(self.buf):
            raise TruncatedFileError(len(self.buf), self.pos + n - len(self.buf))
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out

    def unpack(self, fmt):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt)))

    def array(self, dtype, count):
        dtype = np.dtype(dtype)
        return np.frombuffer(self.take(dtype.itemsize * count), dtype=dtype).copy()


def _header(r, magic):
    got = r.take(4) if len(r.buf) >= 4 else None
    if got != magic:
        raise BadMagicError(f"expected magic {magic!r}, found {r.buf[:4]!r}")
    (version,) = r.unpack("<H")
    if version != VERSION:
        raise VersionUnsupportedError(f"version {version} (supported: {VERSION})")


# --- HCUB ---------------------------------------------------------------

def cube_to_bytes(cube: HyperCube) -> bytes:
    p, rows, cols = cube.shape
    head = CUBE_MAGIC + struct.pack("<HIII", VERSION, p, rows, cols)
    return head + np.ascontiguousarray(cube.data, dtype="<f8").tobytes()


def cube_from_bytes(buf: bytes) -> HyperCube:
    r = _Reader(buf)
    _header(r, CUBE_MAGIC)
    p, rows, cols = r.unpack("<III")
    data = r.array("<f8", p * rows * cols)
    return HyperCube(data.astype(np.float64).reshape(p, rows, cols))


def save_cube(cube: HyperCube, path) -> None:
    Path(path).write_bytes(cube_to_bytes(cube))


def load_cube(path) -> HyperCube:
    return cube_from_bytes(Path(path).read_bytes())


# --- dictionary CSV -----------------------------------------------------

def save_dictionary_csv(dictionary: Dictionary, path) -> None:
    p = dictionary.band_count
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name"] + [f"v{i + 1}" for i in range(p)])
        for name, col in zip(dictionary.names, dictionary.matrix.T):
            w.writerow([name] + [repr(float(v)) for v in col])


def load_dictionary_csv(path) -> Dictionary:
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise EmptyFileError(f"{path}: empty dictionary file")
    header, body = rows[0], [r for r in rows[1:] if r]
    if not header or header[0] != "name":
        raise DataError(f"{path}: header must start with 'name'")
    if not body:
        raise EmptyFileError(f"{path}: no atoms")
    p = len(header) - 1
    names, cols = [], []
    for line_no, row in enumerate(body, start=2):
        if len(row) != p + 1:
            raise DataError(f"{path}: line {line_no} has {len(row) - 1} values, expected {p}")
        try:
            cols.append([float(v) for v in row[1:]])
        except ValueError:
            raise UnparseableLineError(line_no, ",".join(row)) from None
        names.append(row[0])
    return Dictionary(np.array(cols).T, tuple(names))


# --- USGS ASCII ---------------------------------------------------------

def _fill_missing(values):
    v = np.asarray(values, dtype=np.float64)
    bad = v <= MISSING_SENTINEL
    if bad.all():
        raise AllMissingError("every channel is a missing-value sentinel")
    if bad.any():
        x = np.arange(v.size)
        # np.interp clamps to the nearest valid value at the edges
        v[bad] = np.interp(x[bad], x[~bad], v[~bad])
    return v


def parse_usgs_ascii(text):
    """Parse one USGS splib ASCII spectrum.

    ``text`` is a string or a text stream. The first line is a title,
    returned as the spectrum name; every following non-blank line holds one
    float. Deleted channels (values <= -1e32, typically -1.23e34) are filled
    by linear interpolation between the nearest valid neighbours.

    Returns ``(name, values)``.
    """
    if not isinstance(text, str):
        text = text.read()
    lines = text.splitlines()
    if not lines or not lines[0].strip():
        raise EmptyFileError("no header line")
    values = []
    for line_no, line in enumerate(lines[1:], start=2):
        s = line.strip()
        if not s:
            continue
        try:
            values.append(float(s.split()[0]))
        except ValueError:
            raise UnparseableLineError(line_no, line) from None
    if not values:
        raise EmptyFileError("header present but no values")
    return lines[0].strip(), _fill_missing(values)


def load_usgs_directory(path, pattern="*.txt") -> Dictionary:
    """Load every parseable spectrum file under ``path`` as one dictionary.

    Files that fail to parse are skipped. Spectra must share a band count.
    Duplicate titles are disambiguated with the file stem.
    """
    names, atoms = [], []
    for f in sorted(Path(path).glob(pattern)):
        try:
            name, values = parse_usgs_ascii(f.read_text(encoding="utf-8", errors="replace"))
        except DataError:
            continue
        if name in names:
            name = f"{name} [{f.stem}]"
        names.append(name)
        atoms.append(values)
    if not atoms:
        raise EmptyFileError(f"no parseable spectra in {path}")
    return Dictionary.from_atoms(atoms, names)


# --- HSCZ ---------------------------------------------------------------

def scene_to_bytes(scene: CompressedScene) -> bytes:
    basis = scene.basis
    p, c = basis.vectors.shape
    total, rows, cols = scene.abundances.shape
    n = scene.n_atoms
    out = io.BytesIO()
    out.write(SCENE_MAGIC + struct.pack("<HIIIII", VERSION, p, rows, cols, n, c))
    for name in scene.dictionary_names:
        b = name.encode("utf-8")
        out.write(struct.pack("<I", len(b)) + b)
    out.write(np.asarray(basis.vectors, dtype="<f8").tobytes(order="F"))
    out.write(np.asarray(basis.singular_values, dtype="<f8").tobytes())

    flat = np.ascontiguousarray(scene.abundances, dtype=np.float64).reshape(total, rows * cols)
    # keep every entry that is not bitwise +0.0 (so -0.0 survives)
    row_idx, pix_idx = np.nonzero(flat.view(np.uint64))
    order = np.lexsort((row_idx, pix_idx))
    trip = np.empty(order.size, dtype=_TRIPLET)
    trip["pixel"] = pix_idx[order]
    trip["row"] = row_idx[order]
    trip["value"] = flat[row_idx[order], pix_idx[order]]
    out.write(struct.pack("<Q", trip.size))
    out.write(trip.tobytes())
    return out.getvalue()


def scene_from_bytes(buf: bytes) -> CompressedScene:
    r = _Reader(buf)
    _header(r, SCENE_MAGIC)
    p, rows, cols, n, c = r.unpack("<IIIII")
    names = []
    for _ in range(n):
        (length,) = r.unpack("<I")
        names.append(r.take(length).decode("utf-8"))
    vectors = r.array("<f8", p * c).reshape(p, c, order="F").astype(np.float64)
    sv = r.array("<f8", c).astype(np.float64)
    (count,) = r.unpack("<Q")
    trip = r.array(_TRIPLET, count)
    flat = np.zeros((n + c, rows * cols))
    if count and (trip["pixel"].max() >= rows * cols or trip["row"].max() >= n + c):
        raise DataError("abundance triplet index out of range")
    flat[trip["row"], trip["pixel"]] = trip["value"]
    return CompressedScene(flat.reshape(n + c, rows, cols),
                           CompressionBasis(np.ascontiguousarray(vectors), sv), tuple(names))


def save_scene(scene: CompressedScene, path) -> None:
    Path(path).write_bytes(scene_to_bytes(scene))


def load_scene(path) -> CompressedScene:
    return scene_from_bytes(Path(path).read_bytes())


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text, encoding="utf-8", newline="\n")
    os.replace(tmp, path)
