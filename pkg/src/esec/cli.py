"""Command-line entry point: ``esec <command> ...``.

Every run writes its effective configuration to a sidecar JSON file.
Exit status is 0 on success, 1 on a runtime error and 2 on a usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Sequence

from . import __version__
from .builder import Esec, build_esec, project_sec, read_chain
from .chain import MODES, chain_from_table, load_table, monte_carlo, resolve
from .config import RunConfig, load_config
from .generator import ACTIONS, GenParams, generate_scene, generate_suite
from .kernels import active_backend
from .predictor import ReferenceLibrary, bench_predict, load_chains, predict
from .scene import SceneFormatError, read_scene, write_scene
from .similarity import LINKAGES, SimilarityMatrix, cluster_dendrogram, esec_similarity, similarity_matrix

# Flags that change how a run executes but never what it outputs.
_EXECUTION_ONLY = {"jobs", "sidecar", "config", "func", "command"}


class UsageError(Exception):
    pass


# ------------------------------------------------------------------ helpers


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)


def _write_text(path: Path, text: str) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)


def _sidecar(args, cfg: RunConfig, default: Path) -> None:
    path = Path(args.sidecar) if args.sidecar else default
    record = {
        "command": args.command,
        "version": __version__,
        "backend": active_backend(),
        "args": {k: v for k, v in sorted(vars(args).items()) if k not in _EXECUTION_ONLY},
        "config": cfg.to_dict(),
    }
    _write_text(path, _dump(record) + "\n")


def _config(args) -> RunConfig:
    overrides = {
        "static": {
            "eps_touch": getattr(args, "eps_touch", None),
            "null_radius": getattr(args, "null_radius", None),
            "around_radius": getattr(args, "around_radius", None),
        },
        "dynamic": {
            "window": getattr(args, "window", None),
            "xi": getattr(args, "xi", None),
            "stable_eps": getattr(args, "stable_eps", None),
            "far_threshold": getattr(args, "far_threshold", None),
            "move_eps": getattr(args, "move_eps", None),
        },
        "build": {
            "debounce": getattr(args, "debounce", None),
            "literal_roles": True if getattr(args, "literal_roles", False) else None,
        },
        "similarity": {
            "normalize": True if getattr(args, "normalize", False) else None,
            "clamp_nonnegative": True if getattr(args, "clamp", False) else None,
        },
        "predictor": {
            "refs_per_class": getattr(args, "refs_per_class", None),
            "margin": getattr(args, "margin", None),
            "persistence": getattr(args, "persistence", None),
            "mode": getattr(args, "mode", None) if args.command in ("predict", "bench-predict") else None,
            "seed": getattr(args, "seed", None) if args.command in ("predict", "bench-predict") else None,
        },
    }
    return load_config(args.config, overrides)


def _load_one(path: str, cfg: RunConfig) -> Esec:
    p = Path(path)
    if p.suffix == ".jsonl":
        return build_esec(read_scene(p), name=p.stem, **cfg.build_kwargs())
    return read_chain(p)


def _load_many(paths: Sequence[str], cfg: RunConfig) -> list[Esec]:
    out: list[Esec] = []
    for path in paths:
        if Path(path).is_dir():
            out.extend(load_chains(path, **cfg.build_kwargs()))
        else:
            out.append(_load_one(path, cfg))
    return out


def _extract_job(job) -> tuple[str, str]:
    path, cfg = job
    chain = build_esec(read_scene(path), name=Path(path).stem, **cfg.build_kwargs())
    return Path(path).stem, chain.to_json()


# ----------------------------------------------------------------- commands


def cmd_gen(args, cfg: RunConfig) -> int:
    template = GenParams(
        args.action or ACTIONS[0],
        seed=args.seed,
        fps=args.fps,
        distractor_count=args.distractors,
        size_scale=args.size_scale,
        distance_scale=args.distance_scale,
        speed_scale=args.speed_scale,
    )
    out = Path(args.out)
    if args.suite:
        actions = [a.strip() for a in args.actions.split(",")] if args.actions else list(ACTIONS)
        manifest = generate_suite(out, actions, args.variants, args.seed, args.jobs, template)
        print(f"wrote {len(manifest['files'])} scenes to {out}")
        _sidecar(args, cfg, out / "gen.config.json")
        return 0
    if not args.action:
        raise UsageError("gen needs --action (or --suite)")
    out.parent.mkdir(parents=True, exist_ok=True)
    write_scene(out, generate_scene(template))
    print(f"wrote {out}")
    _sidecar(args, cfg, out.with_name(out.name + ".config.json"))
    return 0


def cmd_extract(args, cfg: RunConfig) -> int:
    files: list[Path] = []
    for s in args.scenes:
        p = Path(s)
        files.extend(sorted(p.glob("*.jsonl")) if p.is_dir() else [p])
    if not files:
        raise ValueError("no scene files given")
    stems = [f.stem for f in files]
    if len(set(stems)) != len(stems):
        raise ValueError("scene file names must be unique")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    jobs = [(str(f), cfg) for f in files]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            results = list(pool.map(_extract_job, jobs, chunksize=4))
    else:
        results = [_extract_job(j) for j in jobs]
    for stem, text in results:
        (out / f"{stem}.json").write_text(text + "\n")
    print(f"wrote {len(results)} chains to {out}")
    _sidecar(args, cfg, out / "extract.config.json")
    return 0


def _maybe_sec(chain: Esec, mode: str) -> Esec:
    return project_sec(chain) if mode == "sec" else chain


def cmd_sim(args, cfg: RunConfig) -> int:
    a = _maybe_sec(_load_one(args.a, cfg), args.mode)
    b = _maybe_sec(_load_one(args.b, cfg), args.mode)
    print(repr(esec_similarity(a, b, cfg.similarity)))
    _sidecar(args, cfg, Path("sim.config.json"))
    return 0


def cmd_simmatrix(args, cfg: RunConfig) -> int:
    chains = [_maybe_sec(c, args.mode) for c in _load_many(args.inputs, cfg)]
    matrix = similarity_matrix(chains, cfg.similarity, jobs=args.jobs)
    out = Path(args.out)
    _write_text(out, matrix.to_csv())
    print(f"wrote {len(chains)}x{len(chains)} matrix to {out}")
    _sidecar(args, cfg, out.with_name(out.name + ".config.json"))
    return 0


def cmd_cluster(args, cfg: RunConfig) -> int:
    matrix = SimilarityMatrix.from_csv(Path(args.matrix).read_text())
    dendro = cluster_dendrogram(matrix, args.threshold, args.method)
    out = Path(args.out)
    _write_text(out, _dump(dendro.to_dict()) + "\n")
    print(f"{len(dendro.clusters)} clusters at threshold {args.threshold}")
    _sidecar(args, cfg, out.with_name(out.name + ".config.json"))
    return 0


def cmd_predict(args, cfg: RunConfig) -> int:
    library = ReferenceLibrary.from_chains(_load_many([args.library], cfg))
    query = _load_one(args.scene, cfg)
    pred = predict(query, library, cfg.predictor)
    print(_dump(pred.to_dict(with_trace=args.trace)))
    _sidecar(args, cfg, Path("predict.config.json"))
    return 0


def cmd_bench_predict(args, cfg: RunConfig) -> int:
    chains = _load_many([args.suite], cfg)
    summary = bench_predict(chains, cfg.predictor, jobs=args.jobs)
    report = {
        "accuracy": summary.accuracy,
        "per_class": summary.per_class(),
        "confusion": summary.confusion(),
    }
    print(_dump(report))
    if args.out:
        _write_text(Path(args.out), summary.to_csv())
    default = Path(args.out + ".config.json") if args.out else Path("bench-predict.config.json")
    _sidecar(args, cfg, default)
    return 0


def cmd_chain(args, cfg: RunConfig) -> int:
    table = load_table(args.table)
    timeline = chain_from_table(table, args.order, args.mode)
    if args.json:
        print(_dump(timeline.to_dict()))
    else:
        print(f"{'action':<12} {'agent':>5} {'start':>7} {'pred':>7} {'end':>7}")
        for a in timeline.actions:
            print(f"{a.name:<12} {a.agent:>5} {a.start:7.2f} {a.prediction:7.2f} {a.end:7.2f}")
        print(f"completion {timeline.completion:.1f} s, unchained {timeline.total_unchained:.1f} s, "
              f"savings {timeline.savings:.1f} s, P {timeline.P_chain:.1f}")
    _sidecar(args, cfg, Path("chain.config.json"))
    return 0


def cmd_chain_mc(args, cfg: RunConfig) -> int:
    table = load_table(args.table)
    if args.actions:
        table = resolve(table, args.actions)
    result = monte_carlo(table, args.mode, args.samples, args.seed, jobs=args.jobs)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "histogram.csv").write_text(result.histogram_csv())
    (out / "stats.json").write_text(_dump(result.stats()) + "\n")
    (out / "permutations.csv").write_text(result.permutations_csv())
    print(_dump(result.stats()))
    _sidecar(args, cfg, out / "chain-mc.config.json")
    return 0


# ------------------------------------------------------------------- parser


def _positive_int(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _common(p: argparse.ArgumentParser, *, jobs: bool = False, seed: bool = False) -> None:
    p.add_argument("--config", help="TOML file with [static], [dynamic], [build], [similarity], [predictor]")
    p.add_argument("--sidecar", help="where to write the effective-config JSON")
    if jobs:
        p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes (default 1)")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="master seed (default 0)")


def _thresholds(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("relation thresholds (defaults from the config types)")
    g.add_argument("--eps-touch", type=float, help="touch tolerance in m (0.005)")
    g.add_argument("--null-radius", type=float, help="static relation radius in m (0.10)")
    g.add_argument("--around-radius", type=float, help="Around radius in m (0.10)")
    g.add_argument("--window", type=int, help="DSR window in frames (10)")
    g.add_argument("--xi", type=float, help="getting-close/moving-apart threshold in m (0.10)")
    g.add_argument("--stable-eps", type=float, help="stable distance tolerance in m (0.01)")
    g.add_argument("--far-threshold", type=float, help="stable-pair distance limit in m (0.10)")
    g.add_argument("--move-eps", type=float, help="center motion threshold in m (0.005)")
    g.add_argument("--debounce", type=int, help="frames a relation change must persist (0)")
    g.add_argument("--literal-roles", action="store_true", help="roles 2 and 3 from un-touching and touching object 1")


def _sim_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--normalize", action="store_true", help="rescale similarity to [0, 100]")
    p.add_argument("--clamp", action="store_true", help="clip negative similarities to 0")


def _pred_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--refs-per-class", type=int, help="reference chains per class (20)")
    p.add_argument("--margin", type=float, help="firing margin in similarity points (20)")
    p.add_argument("--persistence", type=int, help="columns the lead must hold (1)")
    p.add_argument("--mode", choices=("esec", "sec"), default="esec")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="esec", description="Extended semantic event chains.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    p = sub.add_parser("gen", help="generate one scene or a labeled suite")
    _common(p, jobs=True, seed=True)
    p.add_argument("--suite", action="store_true", help="write variants for every action plus manifest.json")
    p.add_argument("--action", choices=ACTIONS)
    p.add_argument("--actions", help="comma-separated subset for --suite")
    p.add_argument("--variants", type=_positive_int, default=30, help="variants per action (30)")
    p.add_argument("--distractors", type=int, choices=range(4), help="distractor count (random 0-3)")
    p.add_argument("--fps", type=float, default=30.0)
    p.add_argument("--size-scale", type=float, default=1.0)
    p.add_argument("--distance-scale", type=float, default=1.0)
    p.add_argument("--speed-scale", type=float, default=1.0)
    p.add_argument("-o", "--out", required=True, help="scene file, or directory with --suite")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("extract", help="build ESEC JSON for scene files")
    _common(p, jobs=True)
    _thresholds(p)
    p.add_argument("scenes", nargs="+", help="scene files or directories")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("sim", help="similarity of two chains or scenes")
    _common(p)
    _thresholds(p)
    _sim_flags(p)
    p.add_argument("--mode", choices=("esec", "sec"), default="esec")
    p.add_argument("a")
    p.add_argument("b")
    p.set_defaults(func=cmd_sim)

    p = sub.add_parser("simmatrix", help="all-pairs similarity CSV")
    _common(p, jobs=True)
    _thresholds(p)
    _sim_flags(p)
    p.add_argument("--mode", choices=("esec", "sec"), default="esec")
    p.add_argument("inputs", nargs="+", help="chain/scene files or directories")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_simmatrix)

    p = sub.add_parser("cluster", help="dendrogram JSON from a similarity CSV")
    _common(p)
    p.add_argument("matrix")
    p.add_argument("--threshold", type=float, default=0.5, help="cut distance, d = 1 - Sim/100 (0.5)")
    p.add_argument("--method", choices=LINKAGES, default="average")
    p.add_argument("-o", "--out", required=True)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("predict", help="early prediction of one scene against a library")
    _common(p, seed=True)
    _thresholds(p)
    _sim_flags(p)
    _pred_flags(p)
    p.add_argument("--library", required=True, help="directory of labeled chains or scenes")
    p.add_argument("--trace", action="store_true", help="include per-column class means")
    p.add_argument("scene")
    p.set_defaults(func=cmd_predict)

    p = sub.add_parser("bench-predict", help="leave-self-out prediction over a suite")
    _common(p, jobs=True, seed=True)
    _thresholds(p)
    _sim_flags(p)
    _pred_flags(p)
    p.add_argument("suite", help="directory of labeled chains or scenes")
    p.add_argument("-o", "--out", help="per-class CSV")
    p.set_defaults(func=cmd_bench_predict)

    p = sub.add_parser("chain", help="two-agent timeline on mean timings")
    _common(p)
    p.add_argument("--table", help="timing CSV (bundled human averages by default)")
    p.add_argument("--order", help="comma-separated action order (table order by default)")
    p.add_argument("--mode", choices=MODES, default="esec")
    p.add_argument("--json", action="store_true", help="print the timeline as JSON")
    p.set_defaults(func=cmd_chain)

    p = sub.add_parser("chain-mc", help="Monte-Carlo completion times over all orderings")
    _common(p, jobs=True, seed=True)
    p.add_argument("--table", help="timing CSV (bundled human averages by default)")
    p.add_argument("--actions", help="comma-separated five actions from the table")
    p.add_argument("--samples", type=_positive_int, default=10000, help="base samples (10000)")
    p.add_argument("--mode", choices=MODES, default="esec")
    p.add_argument("-o", "--out", required=True, help="output directory")
    p.set_defaults(func=cmd_chain_mc)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse already printed usage
        return int(exc.code or 0)
    try:
        cfg = _config(args)
        return args.func(args, cfg)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"esec: error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, SceneFormatError, OSError, KeyError) as exc:
        msg = str(exc).strip().splitlines()[0] if str(exc).strip() else type(exc).__name__
        print(f"esec {args.command}: error: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
