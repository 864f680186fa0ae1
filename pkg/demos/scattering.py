# Hadamard products of atoms as crude multiple-scattering signatures.
import numpy as np

from hsprune import Dictionary, hadamard_augment, normalize, pnnls_cube, synth_scene
from hsprune.spectra import HyperCube

rng = np.random.default_rng(1)
base = normalize(Dictionary(rng.random((50, 4)) + 0.05, ("olivine", "calcite", "kaolinite", "hematite")))

aug, report = hadamard_augment(base, max_order=2)
print("generated", report.generated, "products, skipped", report.skipped)
print(aug.names[4:])

# a pixel that really contains a two-bounce term
pair = aug.names.index("calcite*hematite")
y = 0.5 * base.matrix[:, 0] + 0.8 * aug.matrix[:, pair]
cube = HyperCube(y.reshape(50, 1, 1))

for d in (base, aug):
    amap = pnnls_cube(cube, d, k=d.n_atoms)  # keep every atom: plain NNLS
    c = amap.data[:, 0, 0]
    resid = np.linalg.norm(d.matrix @ c - y)
    picked = {d.names[i]: round(float(c[i]), 3) for i in np.flatnonzero(c)}
    print(f"{d.n_atoms:2d} atoms  residual {resid:.2e}  {picked}")
