"""Command line interface.

    hsprune synth    --dict D --rows R --cols C --support S [--snr DB | --flip-probability P] --out cube.hcub
    hsprune unmix    --dict D --cube cube.hcub --k K --method rbf --out abundances.hcub
    hsprune compress --dict D --cube cube.hcub --k K --c C --out scene.hscz
    hsprune bench    noise|sparsity|compression [--config FILE] --out results.csv

``--dict`` accepts a dictionary CSV, a directory of USGS ASCII spectra or
``synthetic:<kind>:<N>x<p>[:<seed>]``. Every subcommand reads optional
defaults from ``--config`` (flat ``key = value`` lines); flags win.

Exit status: 0 on success, 1 for configuration errors, 2 for data errors.
"""
from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import formats
from .bench import emit_csv, emit_summary, load_config, load_dictionary, run_experiment
from .compress import compress_scene
from .datagen import Awgn, NoNoise, SignFlip, synth_scene
from .errors import ConfigError, DataError
from .pruning import DEFAULT_GAMMA
from .spectra import HyperCube
from .unmix import pnnls_cube, parse_method

log = logging.getLogger("hsprune")


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _common(p):
    p.add_argument("--config", help="flat key = value file with defaults")
    p.add_argument("--dict", dest="dictionary", help="dictionary source")
    p.add_argument("--orthonormalize", action="store_const", const=True, default=None)
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output path")
    p.add_argument("--n-jobs", type=int)


def _unmix_opts(p):
    p.add_argument("--cube", help="input HCUB file")
    p.add_argument("--k", type=int, help="sparsity (atoms kept per pixel)")
    p.add_argument("--method", help="standard | rbf | mp")
    p.add_argument("--gamma", type=float, help="RBF kernel width")


def build_parser():
    parser = _Parser(prog="hsprune", description="Sparse hyperspectral unmixing with pruned NNLS.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    p = sub.add_parser("synth", help="generate a synthetic scene")
    _common(p)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--support", dest="support_size", type=int)
    p.add_argument("--snr", dest="snr_db", type=float)
    p.add_argument("--flip-probability", type=float)
    p.add_argument("--flip-mode", choices=("atom", "band"))
    p.add_argument("--truth-out", help="write ground-truth abundances as HCUB")

    p = sub.add_parser("unmix", help="unmix a cube into an abundance map")
    _common(p)
    _unmix_opts(p)

    p = sub.add_parser("compress", help="unmix and add compression vectors")
    _common(p)
    _unmix_opts(p)
    p.add_argument("--c", type=int, help="number of compression vectors")
    p.add_argument("--strict-paper", action="store_const", const=True, default=None,
                   help="fit compression coefficients with RBF-pruned NNLS")

    p = sub.add_parser("bench", help="run a benchmark sweep")
    p.add_argument("experiment", choices=("noise", "sparsity", "compression"))
    _common(p)
    _unmix_opts(p)
    p.add_argument("--c", type=int, help="compression sweep runs c = 0..C")
    p.add_argument("--grid", help="comma-separated sweep values")
    p.add_argument("--replications", type=int)
    p.add_argument("--rows", type=int)
    p.add_argument("--cols", type=int)
    p.add_argument("--support", dest="support_size", type=int)
    p.add_argument("--flip-probability", type=float)
    p.add_argument("--flip-mode", choices=("atom", "band"))
    p.add_argument("--strict-paper", action="store_const", const=True, default=None)
    p.add_argument("--timing", action="store_const", const=True, default=None,
                   help="record wall time (makes output nondeterministic)")
    p.add_argument("--summary", help="also write a text summary here")
    return parser


def _settings(args, keys):
    """Merge config-file values under explicitly given flags."""
    cfg = {}
    if getattr(args, "config", None):
        try:
            text = Path(args.config).read_text(encoding="utf-8")
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from exc
        cfg = _parse_loose(text)
    out = {}
    for key in keys:
        val = getattr(args, key, None)
        out[key] = val if val is not None else cfg.get(key)
    return out


_ALIASES = {"dict": "dictionary", "support": "support_size", "snr": "snr_db", "methods": "method"}


def _parse_loose(text):
    out = {}
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {line_no}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        out[_ALIASES.get(key, key)] = value
    return out


def _require(s, *keys):
    for k in keys:
        if s.get(k) in (None, ""):
            raise ConfigError(f"missing required setting --{k.replace('_', '-')}")


def _bool(v):
    return str(v).strip().lower() in ("1", "true", "yes", "on")


def _dictionary(s):
    _require(s, "dictionary")
    return load_dictionary(s["dictionary"], _bool(s.get("orthonormalize") or False))


def _method(s):
    gamma = float(s.get("gamma") or DEFAULT_GAMMA)
    return parse_method(s.get("method") or "rbf", gamma)


def cmd_synth(args):
    s = _settings(args, ["dictionary", "orthonormalize", "seed", "out", "n_jobs", "rows", "cols",
                         "support_size", "snr_db", "flip_probability", "flip_mode", "truth_out"])
    _require(s, "out", "rows", "cols", "support_size")
    d = _dictionary(s)
    if s["snr_db"] is not None and s["flip_probability"] is not None:
        raise ConfigError("--snr and --flip-probability are mutually exclusive")
    if s["snr_db"] is not None:
        noise = Awgn(float(s["snr_db"]))
    elif s["flip_probability"] is not None:
        noise = SignFlip(float(s["flip_probability"]), s["flip_mode"] or "atom")
    else:
        noise = NoNoise()
    scene = synth_scene(d, int(s["rows"]), int(s["cols"]), int(s["support_size"]), noise,
                        seed=int(s["seed"] or 0), n_jobs=int(s["n_jobs"] or 1))
    formats.save_cube(scene.cube, s["out"])
    if s["truth_out"]:
        formats.save_cube(HyperCube(scene.ground_truth), s["truth_out"])
    log.info("wrote %s", s["out"])


def cmd_unmix(args):
    s = _settings(args, ["dictionary", "orthonormalize", "out", "n_jobs", "cube", "k", "method", "gamma"])
    _require(s, "cube", "k", "out")
    d = _dictionary(s)
    cube = formats.load_cube(s["cube"])
    amap = pnnls_cube(cube, d, int(s["k"]), _method(s), n_jobs=int(s["n_jobs"] or 1))
    formats.save_cube(HyperCube(amap.data), s["out"])
    if amap.failures:
        log.warning("%d pixels failed", len(amap.failures))


def cmd_compress(args):
    s = _settings(args, ["dictionary", "orthonormalize", "out", "n_jobs", "cube", "k", "method",
                         "gamma", "c", "strict_paper"])
    _require(s, "cube", "k", "c", "out")
    d = _dictionary(s)
    cube = formats.load_cube(s["cube"])
    scene = compress_scene(cube, d, int(s["k"]), int(s["c"]), _method(s),
                           strict_paper=_bool(s["strict_paper"] or False),
                           n_jobs=int(s["n_jobs"] or 1))
    formats.save_scene(scene, s["out"])


def cmd_bench(args):
    overrides = {
        "dictionary": args.dictionary, "orthonormalize": args.orthonormalize, "seed": args.seed,
        "n_jobs": args.n_jobs, "cube": args.cube, "k": args.k, "methods": args.method,
        "gamma": args.gamma, "grid": args.grid, "replications": args.replications,
        "rows": args.rows, "cols": args.cols, "support_size": args.support_size,
        "flip_probability": args.flip_probability, "flip_mode": args.flip_mode,
        "strict_paper": args.strict_paper, "timing": args.timing,
    }
    if args.c is not None:
        overrides["grid"] = ",".join(str(i) for i in range(args.c + 1))
    config = load_config(args.experiment, args.config, **overrides)
    rows = run_experiment(config)
    if args.out:
        emit_csv(rows, args.out)
    else:
        sys.stdout.write(emit_summary(rows))
    if args.summary:
        emit_summary(rows, args.summary)


COMMANDS = {"synth": cmd_synth, "unmix": cmd_unmix, "compress": cmd_compress, "bench": cmd_bench}


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s: %(message)s")
        if not args.command:
            raise ConfigError("a subcommand is required (synth, unmix, compress, bench)")
        COMMANDS[args.command](args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
