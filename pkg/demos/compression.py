# Compression vectors: SVD of the leftover residual, appended per pixel.
import numpy as np

from hsprune import compress_scene, compression_error, reconstruct_scene
from hsprune.bench import ExperimentConfig, compression_scene, load_dictionary
from hsprune.unmix import MatchingPursuit

cfg = ExperimentConfig.default("compression")
d = load_dictionary(cfg.dictionary)
cube = compression_scene(cfg, d, rep=0)   # 6 atoms, 162 bands, rank-3 out-of-dictionary part
print("cube:", cube.shape, "dictionary:", d.n_atoms, "atoms")

print("\n c   pnnls L1    mp L1")
for c in range(6):
    errs = []
    for method in (None, MatchingPursuit()):
        kw = {} if method is None else {"method": method}
        scene = compress_scene(cube, d, k=6, c=c, **kw)
        errs.append(compression_error(cube, reconstruct_scene(scene, d))[1])
    print(f"{c:2d}  {errs[0]:.3e}  {errs[1]:.3e}")

scene = compress_scene(cube, d, k=6, c=3)
print("\nsingular values:", np.round(scene.basis.singular_values, 3))
print("stored numbers per pixel:", scene.abundances.shape[0])
