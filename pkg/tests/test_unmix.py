import numpy as np
import pytest

from hsprune.datagen import Awgn, SignFlip, abundance_error, synth_scene, synthetic_dictionary
from hsprune.errors import ConfigError, DimensionMismatch, KOutOfRange
from hsprune.pruning import Rbf, Standard
from hsprune.solvers import matching_pursuit, nnls
from hsprune.spectra import Dictionary, HyperCube
from hsprune.unmix import (
    AbundanceMap,
    MatchingPursuit,
    method_label,
    parse_method,
    pnnls_cube,
    pnnls_pixel,
    reconstruct,
    unmix_pixel,
)

METHODS = [Standard(), Rbf(1.0), Rbf(0.3)]


@pytest.fixture(scope="module")
def d40():
    return synthetic_dictionary(40, 60, seed=12, kind="features")


class TestPixel:
    @pytest.mark.parametrize("method", METHODS)
    @pytest.mark.parametrize("k", [1, 3, 8])
    def test_exact_atom(self, method, k):
        d = synthetic_dictionary(8, 20, seed=0, kind="gaussian")
        c = pnnls_pixel(d.matrix[:, 5], d, k, method)
        expected = np.zeros(8)
        expected[5] = 1.0
        np.testing.assert_allclose(c, expected, atol=1e-12)
        assert np.linalg.norm(d.matrix @ c - d.matrix[:, 5]) < 1e-12

    @pytest.mark.parametrize("method", METHODS)
    def test_orthonormal_two_atoms(self, method):
        Q, _ = np.linalg.qr(np.random.default_rng(4).standard_normal((10, 6)))
        d = Dictionary(Q, tuple("abcdef"))
        y = 2 * Q[:, 1] + 3 * Q[:, 2]
        c = pnnls_pixel(y, d, 2, method)
        np.testing.assert_allclose(c[[1, 2]], [2, 3], atol=1e-10)
        assert np.count_nonzero(c) == 2

    @pytest.mark.parametrize("method", [Standard(), Rbf(1.0)])
    def test_448_exact_recovery(self, ortho448, method):
        r = np.random.default_rng(31)
        beta = np.zeros(448)
        beta[r.choice(448, 17, replace=False)] = 1.0 - r.random(17)
        c = pnnls_pixel(ortho448.matrix @ beta, ortho448, 20, method)
        assert np.abs(c - beta).sum() < 1e-8

    def test_k_out_of_range(self, eye3):
        with pytest.raises(KOutOfRange):
            pnnls_pixel([1.0, 0, 0], eye3, 4)

    def test_matches_manual_prune_then_solve(self, d40):
        y = np.random.default_rng(1).standard_normal(60)
        idx = np.sort(np.argsort(-np.abs(d40.matrix.T @ y), kind="stable")[:7])
        ref = np.zeros(40)
        ref[idx] = nnls(d40.matrix[:, idx], y).coefficients
        np.testing.assert_array_equal(pnnls_pixel(y, d40, 7, Standard()), ref)

    def test_unmix_pixel_mp(self, eye3):
        c = unmix_pixel([0.5, -0.2, 0.0], eye3, 2, MatchingPursuit())
        np.testing.assert_allclose(c, [0.5, -0.2, 0.0])


class TestResidualDominance:
    def test_pnnls_beats_mp_on_shared_support(self):
        d = synthetic_dictionary(40, 60, seed=12, kind="gaussian")
        A = d.matrix
        k = 8
        compared = 0
        for seed in range(30):
            y = synth_scene(d, 1, 1, 4, Awgn(15.0), seed=seed).cube.pixels()[:, 0]
            c = pnnls_pixel(y, d, k, Standard())
            idx = np.flatnonzero(np.isin(np.arange(40), np.argsort(-np.abs(A.T @ y), kind="stable")[:k]))
            mp = matching_pursuit(A[:, idx], y, 3)
            # any nonnegative fit on the pruned set is feasible for NNLS there
            if np.all(mp.coefficients >= 0):
                compared += 1
                assert np.linalg.norm(y - A @ c) <= mp.residual_norm + 1e-12
        assert compared >= 20


class TestCube:
    def test_one_by_one_equals_pixel(self, d40):
        y = np.random.default_rng(2).standard_normal(60)
        amap = pnnls_cube(HyperCube(y.reshape(60, 1, 1)), d40, 5, Rbf(1.0))
        np.testing.assert_array_equal(amap.data[:, 0, 0], pnnls_pixel(y, d40, 5, Rbf(1.0)))

    def test_identical_pixels_give_identical_slices(self, d40):
        y = np.random.default_rng(3).standard_normal(60)
        cube = HyperCube(np.repeat(y[:, None], 6, axis=1).reshape(60, 2, 3))
        amap = pnnls_cube(cube, d40, 6)
        flat = amap.pixels()
        assert np.all(flat == flat[:, :1])

    @pytest.mark.parametrize("method", [Standard(), Rbf(1.0), MatchingPursuit()])
    def test_parallel_equals_sequential_loop(self, d40, method):
        sc = synth_scene(d40, 4, 4, 5, SignFlip(0.2), seed=3)
        par = pnnls_cube(sc.cube, d40, 9, method, n_jobs=4)
        loop = np.zeros_like(par.data)
        for i in range(4):
            for j in range(4):
                loop[:, i, j] = unmix_pixel(sc.cube.data[:, i, j], d40, 9, method)
        np.testing.assert_array_equal(par.data, loop)

    def test_pixel_permutation(self, d40):
        sc = synth_scene(d40, 3, 4, 5, Awgn(20.0), seed=8)
        perm = np.random.default_rng(0).permutation(12)
        pix = sc.cube.pixels()
        a = pnnls_cube(sc.cube, d40, 7).pixels()
        b = pnnls_cube(HyperCube.from_pixels(pix[:, perm], 3, 4), d40, 7).pixels()
        np.testing.assert_array_equal(b, a[:, perm])

    @pytest.mark.parametrize("method", [Standard(), Rbf(2.0)])
    def test_sparse_and_nonnegative(self, d40, method):
        sc = synth_scene(d40, 3, 5, 6, SignFlip(0.3), seed=2)
        amap = pnnls_cube(sc.cube, d40, 4, method)
        flat = amap.pixels()
        assert np.all(flat >= 0)
        assert np.all(np.count_nonzero(flat, axis=0) <= 4)
        assert amap.sparsity_k == 4 and amap.dictionary_names == d40.names

    def test_rectangular_and_band_mismatch(self, d40):
        with pytest.raises(DimensionMismatch):
            pnnls_cube(HyperCube(np.ones((59, 2, 3))), d40, 3)

    def test_failed_pixel_is_isolated(self, d40, monkeypatch):
        import hsprune.unmix as um
        from hsprune.errors import MaxIterationsError

        data = np.random.default_rng(5).standard_normal((60, 2, 2))
        bad = data[:, 1, 0].copy()
        real = um.nnls

        def flaky(A, y, max_iter=None):
            if np.array_equal(y, bad):
                raise MaxIterationsError(1)
            return real(A, y, max_iter)

        monkeypatch.setattr(um, "nnls", flaky)
        amap = pnnls_cube(HyperCube(data), d40, 3)
        assert set(amap.failures) == {2}
        assert np.all(amap.data[:, 1, 0] == 0)
        assert np.any(amap.data[:, 0, 0] != 0)


class TestReconstruct:
    def test_zero(self, d40):
        amap = AbundanceMap(np.zeros((40, 2, 2)), d40.names, 1)
        assert np.all(reconstruct(amap, d40).data == 0)

    def test_single_atom(self, d40):
        data = np.zeros((40, 1, 2))
        data[7] = 1.0
        out = reconstruct(AbundanceMap(data, d40.names, 1), d40)
        np.testing.assert_array_equal(out.data[:, 0, 1], d40.matrix[:, 7])

    def test_noiseless_round_trip(self, ortho448):
        sc = synth_scene(ortho448, 2, 3, 17, seed=6)
        amap = pnnls_cube(sc.cube, ortho448, 20, Rbf(1.0))
        assert np.max(np.abs(reconstruct(amap, ortho448).data - sc.cube.data)) < 1e-8
        assert np.all(abundance_error(amap.data, sc.ground_truth) < 1e-8)

    def test_mismatch(self, d40, eye3):
        with pytest.raises(DimensionMismatch):
            reconstruct(AbundanceMap(np.zeros((3, 1, 1)), eye3.names, 1), d40)


def test_parse_method_and_labels():
    assert parse_method("standard") == Standard()
    assert parse_method(" RBF ", 0.5) == Rbf(0.5)
    assert isinstance(parse_method("mp"), MatchingPursuit)
    with pytest.raises(ConfigError):
        parse_method("omp")
    assert method_label(Rbf(1.0)) == "pnnls_rbf(gamma=1)"
    assert method_label(Standard()) == "pnnls_standard"
    assert method_label(MatchingPursuit()) == "mp"
