from math import comb

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from hsprune.errors import (
    CombinatorialLimitError,
    DataError,
    DimensionMismatch,
    EmptyResultError,
    ZeroAtomError,
)
from hsprune.spectra import Dictionary, HyperCube, gram_schmidt, hadamard_augment, normalize

from oracles import multisets


def D(*atoms, names=None):
    return Dictionary.from_atoms(atoms, names)


class TestDictionary:
    def test_names_must_be_unique(self):
        with pytest.raises(DataError):
            Dictionary(np.eye(2), ("a", "a"))

    def test_name_count_must_match(self):
        with pytest.raises(DimensionMismatch):
            Dictionary(np.eye(2), ("a",))

    def test_rejects_nan(self):
        with pytest.raises(DataError):
            D([1.0, np.nan])

    def test_matrix_is_read_only(self):
        d = D([1.0, 0.0])
        with pytest.raises(ValueError):
            d.matrix[0, 0] = 2.0

    def test_subset_keeps_names(self):
        d = D([1, 0], [0, 1], [1, 1], names=["x", "y", "z"])
        s = d.subset([2, 0])
        assert s.names == ("z", "x")
        np.testing.assert_array_equal(s.matrix[:, 0], [1, 1])


class TestHyperCube:
    def test_pixel_order_is_row_major(self):
        data = np.arange(2 * 2 * 3, dtype=float).reshape(2, 2, 3)
        cube = HyperCube(data)
        # pixel (i, j) is column i*cols + j
        np.testing.assert_array_equal(cube.pixels()[:, 1 * 3 + 2], data[:, 1, 2])

    def test_from_pixels_roundtrip(self, rng):
        data = rng.standard_normal((4, 3, 5))
        cube = HyperCube(data)
        np.testing.assert_array_equal(HyperCube.from_pixels(cube.pixels(), 3, 5).data, data)

    def test_rejects_wrong_rank(self):
        with pytest.raises(DimensionMismatch):
            HyperCube(np.zeros((3, 3)))


class TestNormalize:
    def test_scales_3_4_5(self):
        np.testing.assert_allclose(normalize(D([3.0, 4.0])).matrix[:, 0], [0.6, 0.8], atol=1e-15)

    def test_unit_atom_unchanged(self):
        np.testing.assert_array_equal(normalize(D([1.0, 0.0, 0.0])).matrix[:, 0], [1, 0, 0])

    def test_zero_atom(self):
        with pytest.raises(ZeroAtomError) as err:
            normalize(D([0.0, 0.0], names=["dark"]))
        assert err.value.name == "dark"

    def test_preserves_order_names_and_direction(self, rng):
        m = rng.standard_normal((6, 4))
        d = Dictionary(m, ("w", "x", "y", "z"))
        n = normalize(d)
        assert n.names == d.names
        np.testing.assert_allclose(n.matrix * np.linalg.norm(m, axis=0), m, rtol=1e-14)

    @given(arrays(np.float64, (5, 3), elements=st.floats(-1e3, 1e3)))
    def test_idempotent_and_unit(self, m):
        if np.any(np.linalg.norm(m, axis=0) <= 1e-6):
            return
        once = normalize(Dictionary(m, ("a", "b", "c")))
        twice = normalize(once)
        np.testing.assert_allclose(twice.matrix, once.matrix, atol=1e-14, rtol=0)
        np.testing.assert_allclose(np.linalg.norm(once.matrix, axis=0), 1.0, atol=1e-12)


class TestGramSchmidt:
    def test_orthonormal_input_unchanged(self):
        g, dropped = gram_schmidt(D([1.0, 0.0], [0.0, 1.0]))
        np.testing.assert_allclose(g.matrix, np.eye(2), atol=1e-15)
        assert dropped == []

    def test_analytic_projection(self):
        g, _ = gram_schmidt(D([1.0, 0.0], np.array([1.0, 1.0]) / np.sqrt(2)))
        np.testing.assert_allclose(g.matrix, np.eye(2), atol=1e-15)

    def test_dependent_atom_dropped(self):
        g, dropped = gram_schmidt(D([1.0, 0.0], [1e-13, 0.0], names=["a", "tiny"]))
        assert g.names == ("a",)
        assert dropped == ["tiny"]

    def test_all_dropped(self):
        with pytest.raises(EmptyResultError):
            gram_schmidt(D([0.0, 0.0]))

    def test_span_preserved(self, rng):
        m = rng.standard_normal((8, 5))
        g, _ = gram_schmidt(Dictionary(m, tuple("abcde")))
        # each original atom lies in the span of the output
        proj = g.matrix @ (g.matrix.T @ m)
        np.testing.assert_allclose(proj, m, atol=1e-12)

    def test_ill_conditioned_input_stays_orthogonal(self, rng):
        base = rng.standard_normal((40, 1))
        m = base + 1e-6 * rng.standard_normal((40, 30))
        g, _ = gram_schmidt(Dictionary(m, tuple(f"a{i}" for i in range(30))))
        gram = g.matrix.T @ g.matrix
        np.testing.assert_allclose(gram, np.eye(g.n_atoms), atol=1e-10)

    def test_large_dictionary(self, ortho448):
        g = ortho448.matrix
        np.testing.assert_allclose(g.T @ g, np.eye(448), atol=1e-10)
        np.testing.assert_allclose(np.linalg.norm(g, axis=0), 1.0, atol=1e-12)


class TestHadamard:
    def test_one_pair(self):
        a = np.array([0.6, 0.8, 0.0])
        b = np.array([0.0, 0.6, 0.8])
        out, rep = hadamard_augment(D(a, b, names=["a", "b"]), 2, include_self=False)
        assert out.names == ("a", "b", "a*b")
        np.testing.assert_allclose(out.matrix[:, 2], [0.0, 1.0, 0.0], atol=1e-15)
        assert rep.generated == 1 and rep.skipped == []

    def test_disjoint_supports_skipped(self):
        out, rep = hadamard_augment(D([1.0, 0.0], [0.0, 1.0], names=["a", "b"]), 2,
                                    include_self=False)
        assert out.n_atoms == 2
        assert rep.skipped == ["a*b"]

    def test_three_atoms_without_self_products(self, rng):
        d = normalize(Dictionary(rng.random((5, 3)) + 0.1, ("a", "b", "c")))
        out, _ = hadamard_augment(d, 2, include_self=False)
        assert out.n_atoms == 3 + len(multisets(3, 2, False)) == 6
        assert out.names[3:] == ("a*b", "a*c", "b*c")

    def test_self_products_by_default(self, rng):
        d = normalize(Dictionary(rng.random((5, 3)) + 0.1, ("a", "b", "c")))
        out, _ = hadamard_augment(d, 2)
        assert out.n_atoms == 3 + comb(3, 2) + 3
        assert out.names[3:] == ("a*a", "a*b", "a*c", "b*b", "b*c", "c*c")

    def test_order3_lexicographic_and_commutative(self, rng):
        d = normalize(Dictionary(rng.random((6, 3)) + 0.1, ("a", "b", "c")))
        out, _ = hadamard_augment(d, 3)
        expected = sorted(multisets(3, 2, True) + multisets(3, 3, True))
        names = ["*".join("abc"[i] for i in t) for t in expected]
        assert list(out.names[3:]) == names
        np.testing.assert_allclose(np.linalg.norm(out.matrix, axis=0), 1.0, atol=1e-12)
        i = out.names.index("a*b*c")
        v = d.matrix[:, 0] * d.matrix[:, 1] * d.matrix[:, 2]
        np.testing.assert_allclose(out.matrix[:, i], v / np.linalg.norm(v), rtol=1e-13)

    def test_cap(self, rng):
        d = normalize(Dictionary(rng.random((5, 10)) + 0.1, tuple("abcdefghij")))
        with pytest.raises(CombinatorialLimitError):
            hadamard_augment(d, 3, max_atoms=50)

    def test_bad_order(self, eye3):
        with pytest.raises(ValueError):
            hadamard_augment(eye3, 1)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 6), st.integers(0, 2**31))
    def test_count_formula(self, n, seed):
        r = np.random.default_rng(seed)
        m = r.random((4, n)) + 0.05
        d = normalize(Dictionary(m, tuple(f"x{i}" for i in range(n))))
        out, rep = hadamard_augment(d, 2)
        assert out.n_atoms == n + comb(n, 2) + n - len(rep.skipped)
