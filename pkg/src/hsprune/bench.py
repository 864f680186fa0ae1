"""Experiment harness: noise, sparsity and compression sweeps.

Every sweep point and replication gets its own synthetic scene, seeded from
``(seed, replication)`` only, so all methods and all sweep values of one
replication see the same abundances (common random numbers), and adding a
method never changes another method's rows.

Each (sweep value, method) yields one row per replication (mean and sample
std over pixels) followed by an aggregate row (``replication = "all"``)
whose mean and sample std (ddof=1) are taken over the replication means.
"""
from __future__ import annotations

import dataclasses
import io
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import formats
from .compress import compress_abundances, compression_error, reconstruct_scene
from .datagen import (
    Awgn,
    NoNoise,
    SignFlip,
    abundance_error,
    plant_residual,
    synth_scene,
    synthetic_dictionary,
)
from .errors import ConfigError
from .pruning import DEFAULT_GAMMA
from .spectra import Dictionary, gram_schmidt, normalize
from .unmix import method_label, parse_method, pnnls_cube

EXPERIMENTS = ("noise", "sparsity", "compression")
CSV_HEADER = "experiment,method,sweep_value,replication,mean_error,std_error,wall_ms"

_DEFAULTS = {
    "noise": dict(dictionary="synthetic:gaussian:448x500", orthonormalize=True,
                  rows=10, cols=1, support_size=17, k=20, methods="rbf,standard,mp",
                  grid="10,20,30,40,50,60", replications=10),
    "sparsity": dict(dictionary="synthetic:features:97x200", orthonormalize=False,
                     rows=3, cols=3, support_size=17, methods="standard,rbf,mp",
                     grid="10,20,30,40,50,60,70,80,90,97", replications=30,
                     flip_probability=0.1),
    "compression": dict(dictionary="synthetic:features:6x162", orthonormalize=False,
                        rows=10, cols=10, support_size=3, k=6, methods="rbf,standard,mp",
                        grid="0,1,2,3,4,5,6,7,8,9,10", replications=3,
                        residual_rank=3, residual_scale=0.3),
}


@dataclass
class ExperimentConfig:
    experiment: str
    dictionary: str = "synthetic:gaussian:448x500"
    orthonormalize: bool = False
    rows: int = 10
    cols: int = 1
    support_size: int = 17
    k: int = 20
    methods: tuple = ("rbf",)
    gamma: float = DEFAULT_GAMMA
    grid: tuple = ()
    replications: int = 10
    seed: int = 0
    flip_probability: float = 0.1
    flip_mode: str = "atom"
    norm: int = 1
    cube: str | None = None
    residual_rank: int = 3
    residual_scale: float = 0.3
    strict_paper: bool = False
    timing: bool = False
    n_jobs: int = 1

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}")
        if isinstance(self.methods, str):
            self.methods = tuple(m.strip() for m in self.methods.split(",") if m.strip())
        if isinstance(self.grid, str):
            self.grid = tuple(_num(v) for v in self.grid.split(",") if v.strip())
        self.grid = tuple(self.grid)
        if self.replications < 1:
            raise ConfigError("replications must be >= 1")
        if not self.grid:
            raise ConfigError("sweep grid is empty")
        if list(self.grid) != sorted(self.grid):
            raise ConfigError("sweep grid must be sorted")
        if not self.methods:
            raise ConfigError("no methods given")
        for m in self.methods:
            parse_method(m, self.gamma)
        if self.flip_mode not in ("atom", "band"):
            raise ConfigError("flip_mode must be 'atom' or 'band'")
        if self.norm not in (1, 2):
            raise ConfigError("norm must be 1 or 2")

    @classmethod
    def default(cls, experiment, **overrides):
        if experiment not in EXPERIMENTS:
            raise ConfigError(f"experiment must be one of {EXPERIMENTS}")
        values = dict(_DEFAULTS[experiment])
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(experiment=experiment, **values)

    def method_objects(self):
        return [parse_method(m, self.gamma) for m in self.methods]


def _num(text):
    text = text.strip().lower()
    if text in ("inf", "+inf", "none"):
        return math.inf
    v = float(text)
    return int(v) if v.is_integer() else v


_FIELD_TYPES = {f.name: f.type for f in dataclasses.fields(ExperimentConfig)}
# config keys may also use the CLI flag spellings
KEY_ALIASES = {"dict": "dictionary", "method": "methods", "support": "support_size",
               "c": "max_c"}


def _coerce(key, value):
    kind = _FIELD_TYPES[key]
    if kind == "bool":
        if isinstance(value, bool):
            return value
        low = str(value).strip().lower()
        if low in ("1", "true", "yes", "on"):
            return True
        if low in ("0", "false", "no", "off"):
            return False
        raise ConfigError(f"{key}: expected a boolean, got {value!r}")
    if kind == "int":
        try:
            return int(value)
        except ValueError:
            raise ConfigError(f"{key}: expected an integer, got {value!r}") from None
    if kind == "float":
        try:
            return float(value)
        except ValueError:
            raise ConfigError(f"{key}: expected a number, got {value!r}") from None
    return value


def parse_config_text(text: str) -> dict:
    """Parse flat ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {line_no}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        key = KEY_ALIASES.get(key, key)
        if key == "max_c":
            out["grid"] = ",".join(str(i) for i in range(int(value) + 1))
            continue
        if key not in _FIELD_TYPES:
            raise ConfigError(f"config line {line_no}: unknown key {key!r}")
        out[key] = _coerce(key, value)
    return out


def load_config(experiment, path=None, **overrides) -> ExperimentConfig:
    """Defaults for ``experiment``, then the config file, then ``overrides``."""
    values = {}
    if path is not None:
        try:
            values = parse_config_text(Path(path).read_text(encoding="utf-8"))
        except OSError as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
    values.pop("experiment", None)
    values.update({k: _coerce(k, v) for k, v in overrides.items() if v is not None})
    return ExperimentConfig.default(experiment, **values)


# --- dictionary sources --------------------------------------------------

def load_dictionary(source: str, orthonormalize: bool = False) -> Dictionary:
    """Resolve a dictionary source string.

    ``synthetic:<kind>:<N>x<p>[:<seed>]`` builds a synthetic library, a
    directory is read as USGS ASCII spectra, anything else as dictionary
    CSV. The result is normalized and optionally orthonormalized.
    """
    if source.startswith("synthetic:"):
        parts = source.split(":")
        try:
            kind = parts[1]
            n, p = (int(v) for v in parts[2].lower().split("x"))
            seed = int(parts[3]) if len(parts) > 3 else 0
        except (IndexError, ValueError):
            raise ConfigError(f"bad synthetic dictionary source {source!r}") from None
        d = synthetic_dictionary(n, p, seed=seed, kind=kind)
    elif Path(source).is_dir():
        d = normalize(formats.load_usgs_directory(source))
    else:
        d = normalize(formats.load_dictionary_csv(source))
    if orthonormalize:
        d, _ = gram_schmidt(d)
    return d


# --- rows ------------------------------------------------------------------

@dataclass(frozen=True)
class ResultRow:
    experiment: str
    method: str
    sweep_value: float
    replication: int | None   # None marks the aggregate row
    mean_error: float
    std_error: float
    wall_ms: float = 0.0


def _fmt(x):
    return format(float(x), ".17g")


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    buf.write(CSV_HEADER + "\n")
    for r in rows:
        rep = "all" if r.replication is None else str(r.replication)
        buf.write(",".join([r.experiment, r.method, _fmt(r.sweep_value), rep,
                            _fmt(r.mean_error), _fmt(r.std_error), _fmt(r.wall_ms)]) + "\n")
    return buf.getvalue()


def emit_csv(rows, path) -> None:
    try:
        formats.atomic_write_text(path, rows_to_csv(rows))
    except OSError as exc:
        raise OSError(f"writing {path}: {exc}") from exc


def emit_summary(rows, path=None) -> str:
    """Plain-text report of the aggregate rows; written to ``path`` if given."""
    agg = [r for r in rows if r.replication is None]
    lines = []
    for exp in dict.fromkeys(r.experiment for r in agg):
        lines.append(f"experiment: {exp}")
        methods = list(dict.fromkeys(r.method for r in agg if r.experiment == exp))
        for m in methods:
            sel = [r for r in agg if r.experiment == exp and r.method == m]
            errs = np.array([r.mean_error for r in sel])
            lines.append(f"  {m}: {len(sel)} sweep points, mean error {errs.mean():.6g}, "
                         f"min {errs.min():.6g}, max {errs.max():.6g}")
            for r in sel:
                lines.append(f"    {_fmt(r.sweep_value):>8}  {r.mean_error:.6g} +/- {r.std_error:.3g}")
    text = "\n".join(lines) + "\n"
    if path is not None:
        try:
            formats.atomic_write_text(path, text)
        except OSError as exc:
            raise OSError(f"writing {path}: {exc}") from exc
    return text


# --- sweeps ----------------------------------------------------------------

def replication_seed(seed: int, replication: int) -> int:
    ss = np.random.SeedSequence([seed, replication])
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _std(values):
    values = np.asarray(values, dtype=np.float64)
    return float(values.std(ddof=1)) if values.size > 1 else 0.0


def _run_grid(config, tasks):
    """Run ``tasks`` (callables returning lists of per-pixel error arrays) in order."""
    if config.n_jobs > 1:
        with ThreadPoolExecutor(config.n_jobs) as pool:
            return list(pool.map(lambda f: f(), tasks))
    return [f() for f in tasks]


def _assemble(config, per_value):
    """``per_value[v][rep] = [(per_pixel_errors, ms) per method]`` -> ordered rows."""
    labels = [method_label(m) for m in config.method_objects()]
    rows = []
    for value, reps in zip(config.grid, per_value):
        for mi, label in enumerate(labels):
            means, times = [], []
            for rep, results in enumerate(reps):
                errs, ms = results[mi]
                ms = ms if config.timing else 0.0
                means.append(float(np.mean(errs)))
                times.append(ms)
                rows.append(ResultRow(config.experiment, label, value, rep,
                                      means[-1], _std(np.ravel(errs)), ms))
            rows.append(ResultRow(config.experiment, label, value, None,
                                  float(np.mean(means)), _std(means), float(np.mean(times))))
    return rows


def _timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, (time.perf_counter() - t0) * 1e3


def _abundance_rows(config, dictionary, noise_for, k_for):
    methods = config.method_objects()

    def replicate(value, rep):
        scene = synth_scene(dictionary, config.rows, config.cols, config.support_size,
                            noise_for(value), seed=replication_seed(config.seed, rep))
        out = []
        for m in methods:
            amap, ms = _timed(lambda: pnnls_cube(scene.cube, dictionary, k_for(value), m))
            out.append((abundance_error(amap.data, scene.ground_truth, config.norm), ms))
        return out

    tasks = [lambda v=v, r=r: replicate(v, r)
             for v in config.grid for r in range(config.replications)]
    flat = _run_grid(config, tasks)
    R = config.replications
    return _assemble(config, [flat[i * R:(i + 1) * R] for i in range(len(config.grid))])


def run_noise_sweep(config: ExperimentConfig, dictionary: Dictionary | None = None):
    """Abundance error versus additive Gaussian noise level (SNR in dB).

    A grid value of ``inf`` means noiseless measurements.
    """
    if dictionary is None:
        dictionary = load_dictionary(config.dictionary, config.orthonormalize)

    def noise_for(snr):
        return NoNoise() if math.isinf(snr) else Awgn(float(snr))

    return _abundance_rows(config, dictionary, noise_for, lambda _: config.k)


def run_sparsity_sweep(config: ExperimentConfig, dictionary: Dictionary | None = None):
    """Abundance error versus imposed sparsity ``k`` under sign-flip noise."""
    if dictionary is None:
        dictionary = load_dictionary(config.dictionary, config.orthonormalize)
    noise = SignFlip(config.flip_probability, config.flip_mode)
    for k in config.grid:
        if not (float(k).is_integer() and 1 <= k <= dictionary.n_atoms):
            raise ConfigError(f"sparsity grid value {k} outside [1, {dictionary.n_atoms}]")
    return _abundance_rows(config, dictionary, lambda _: noise, lambda k: int(k))


def compression_scene(config: ExperimentConfig, dictionary: Dictionary, rep: int):
    """Cube used by replication ``rep`` of a compression sweep.

    A configured ``cube`` file is used as is (every replication sees the
    same data); otherwise a noiseless synthetic scene gets a planted
    out-of-dictionary component of rank ``residual_rank``.
    """
    if config.cube:
        return formats.load_cube(config.cube)
    seed = replication_seed(config.seed, rep)
    scene = synth_scene(dictionary, config.rows, config.cols, config.support_size, seed=seed)
    if config.residual_rank == 0:
        return scene.cube
    cube, _ = plant_residual(scene.cube, dictionary, config.residual_rank,
                             config.residual_scale, seed=seed)
    return cube


def run_compression_sweep(config: ExperimentConfig, dictionary: Dictionary | None = None):
    """Scene-mean L1 compression error versus number of compression vectors."""
    if dictionary is None:
        dictionary = load_dictionary(config.dictionary, config.orthonormalize)
    for c in config.grid:
        if not (float(c).is_integer() and c >= 0):
            raise ConfigError(f"compression grid value {c} is not a count")
    methods = config.method_objects()

    def replicate(rep):
        cube = compression_scene(config, dictionary, rep)
        per_method = []
        for m in methods:
            amap, ms0 = _timed(lambda: pnnls_cube(cube, dictionary, config.k, m))
            by_c = []
            for c in config.grid:
                scene, ms = _timed(lambda: compress_abundances(
                    cube, dictionary, amap, int(c), m, strict_paper=config.strict_paper))
                per_pixel, _ = compression_error(cube, reconstruct_scene(scene, dictionary))
                by_c.append((per_pixel, ms0 + ms))
            per_method.append(by_c)
        return per_method

    flat = _run_grid(config, [lambda r=r: replicate(r) for r in range(config.replications)])
    per_value = [[[flat[r][mi][ci] for mi in range(len(methods))]
                  for r in range(config.replications)]
                 for ci in range(len(config.grid))]
    return _assemble(config, per_value)


def run_experiment(config: ExperimentConfig, dictionary: Dictionary | None = None):
    runner = {"noise": run_noise_sweep, "sparsity": run_sparsity_sweep,
              "compression": run_compression_sweep}[config.experiment]
    return runner(config, dictionary)


def aggregate(rows, method=None):
    """``{method: (sweep_values, means, stds)}`` from the aggregate rows."""
    out = {}
    for r in rows:
        if r.replication is not None or (method is not None and r.method != method):
            continue
        out.setdefault(r.method, ([], [], []))
        v, m, s = out[r.method]
        v.append(r.sweep_value)
        m.append(r.mean_error)
        s.append(r.std_error)
    return {k: tuple(np.array(x) for x in t) for k, t in out.items()}
