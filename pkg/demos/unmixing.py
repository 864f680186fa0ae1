# Unmixing a small synthetic scene with pruned NNLS.
import numpy as np

from hsprune import Rbf, Standard, gram_schmidt, pnnls_cube, reconstruct, synth_scene
from hsprune.datagen import abundance_error, synthetic_dictionary

# 448 random atoms over 500 bands, orthonormalized so recovery is exact
d, dropped = gram_schmidt(synthetic_dictionary(448, 500, seed=3, kind="gaussian"))
print("atoms:", d.n_atoms, "dropped:", len(dropped))

# 10 pixels, each a positive mix of 17 atoms
scene = synth_scene(d, rows=10, cols=1, support_size=17, seed=0)
print("cube shape (bands, rows, cols):", scene.cube.shape)

for method in (Standard(), Rbf(gamma=1.0)):
    amap = pnnls_cube(scene.cube, d, k=20, method=method)
    err = abundance_error(amap.data, scene.ground_truth)
    fit = np.abs(reconstruct(amap, d).data - scene.cube.data).max()
    print(f"{type(method).__name__:8s} max L1 abundance error {err.max():.2e}, max fit error {fit:.2e}")

# the fitted map is sparse and nonnegative
nnz = np.count_nonzero(amap.pixels(), axis=0)
print("nonzeros per pixel:", nnz)
print("any negative:", bool((amap.data < 0).any()))
