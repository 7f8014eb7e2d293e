"""Command-line interface.

Subcommands:

* ``discover``      run the multilayer pipeline on layer files
* ``ground-truth``  run on the OR-conflated graph and diff a prior result
* ``generate``      synthesize datasets with planted patterns
* ``bench``         time discovery runs across worker/partition configs

Exit codes: 0 success, 1 ground-truth divergence, 2 usage or
configuration errors, 3 input or load errors, 4 violated runtime
contracts.  The default worker count comes from ``MLNMINE_WORKERS``
when set; the ``--workers`` flag wins.
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time
from pathlib import Path

from . import datagen
from .engine import (
    WORKERS_ENV,
    DiscoveryConfig,
    discover,
    ranked_text,
    result_json,
    run_ground_truth,
    write_result,
)
from .errors import (
    ConfigError,
    ContractViolation,
    MiningError,
    ParseError,
    RoutingError,
    ValidationError,
)
from .graph import HoMLN, or_conflate, parse_edge_list, serialize_edge_list
from .partition import parse_ranges

EXIT_OK = 0
EXIT_DIVERGED = 1
EXIT_USAGE = 2
EXIT_LOAD = 3
EXIT_CONTRACT = 4


def _default_workers() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return 1
    try:
        return int(raw)
    except ValueError:
        raise ConfigError(f"{WORKERS_ENV} must be an integer, got {raw!r}")


def _add_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--beam", type=int, default=4, help="classes kept per iteration")
    p.add_argument("--max-size", type=int, default=5, help="largest substructure size")
    p.add_argument("--metric", choices=("mdl", "freq"), default="mdl")
    p.add_argument("--partitions", type=int, default=1)
    p.add_argument(
        "--workers", type=int, default=None,
        help=f"worker processes (default: ${WORKERS_ENV} or 1)",
    )
    p.add_argument(
        "--strategy", choices=("equal-load", "equal-width"), default="equal-load"
    )
    p.add_argument(
        "--ranges", default=None,
        help='explicit vertex-ID ranges, e.g. "1-3,4-5" (overrides --partitions)',
    )


def _load_mln(paths: list[str]) -> HoMLN:
    layers = []
    for i, path in enumerate(paths):
        try:
            text = Path(path).read_text(encoding="utf-8")
        except OSError as exc:
            raise ValidationError(f"cannot read {path}: {exc}") from None
        try:
            layers.append(parse_edge_list(text, layer_id=i))
        except MiningError as exc:
            raise type(exc)(f"{path}: {exc}") from None
    return HoMLN.from_layers(layers)


def _make_config(args, mln: HoMLN) -> DiscoveryConfig:
    workers = args.workers if args.workers is not None else _default_workers()
    ranges = None
    if args.ranges:
        ranges = parse_ranges(args.ranges)
        if any(layer.edges for layer in mln.layers):
            conflated = or_conflate(mln)
            for vid in sorted(conflated.vertex_ids):
                try:
                    ranges.owner_of(vid)
                except RoutingError:
                    raise ConfigError(
                        f"--ranges {args.ranges!r} does not cover vertex {vid}"
                    ) from None
    cfg = DiscoveryConfig(
        beam=args.beam,
        max_size=args.max_size,
        partitions=args.partitions,
        workers=workers,
        metric=args.metric,
        strategy=args.strategy,
        ranges=ranges,
    )
    cfg.validate()
    return cfg


def cmd_discover(args) -> int:
    mln = _load_mln(args.layers)
    cfg = _make_config(args, mln)
    result = discover(mln, cfg)
    sys.stdout.write(ranked_text(result))
    if args.out:
        write_result(result, args.out)
        print(f"wrote {args.out}/result.txt, result.json, timing.csv")
    return EXIT_OK


def _ranked_pairs(obj: dict) -> list[tuple[str, int]]:
    return [(item["class"], item["frequency"]) for item in obj["ranked"]]


def cmd_ground_truth(args) -> int:
    mln = _load_mln(args.layers)
    cfg = _make_config(args, mln)
    layer_ids = None
    if args.select:
        try:
            layer_ids = [int(s) for s in args.select.split(",")]
        except ValueError:
            raise ConfigError(f"--select must be layer indices, got {args.select!r}")
    result = run_ground_truth(mln, cfg, layer_ids)
    if args.out:
        write_result(result, args.out)
    if not args.compare:
        sys.stdout.write(ranked_text(result))
        return EXIT_OK

    compare_path = Path(args.compare) / "result.json"
    try:
        other = json.loads(compare_path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ValidationError(f"cannot read {compare_path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{compare_path} is not valid JSON: {exc}") from None
    truth = _ranked_pairs(json.loads(result_json(result)))
    candidate = _ranked_pairs(other)
    divergences = []
    for i in range(max(len(truth), len(candidate))):
        a = truth[i] if i < len(truth) else None
        b = candidate[i] if i < len(candidate) else None
        if a != b:
            divergences.append((i + 1, a, b))
    if not divergences:
        print(f"EQUAL: {len(truth)} ranked classes match {compare_path}")
        return EXIT_OK
    print(f"DIVERGED: {len(divergences)} mismatches against {compare_path}")
    for rank, a, b in divergences:
        print(f"  rank {rank}: ground truth {a}, compared result {b}")
    return EXIT_DIVERGED


def _parse_split(text: str) -> list[float]:
    sep = "/" if "/" in text else ","
    try:
        parts = [float(s) for s in text.split(sep)]
    except ValueError:
        raise ConfigError(f"bad split {text!r}") from None
    if not parts:
        raise ConfigError(f"bad split {text!r}")
    total = sum(parts)
    if abs(total - 100.0) < 1e-6:
        parts = [p / 100.0 for p in parts]
    elif abs(total - 1.0) > 1e-6:
        raise ConfigError(f"split {text!r} must sum to 1 (or 100)")
    return parts


def _resolve_pattern(name: str) -> "datagen.CanonicalSubstructure":
    if name in datagen.BUILTIN_PATTERN_NAMES:
        return datagen.builtin_pattern(name)
    path = Path(name)
    if not path.exists():
        raise ConfigError(
            f"pattern {name!r} is neither built-in {datagen.BUILTIN_PATTERN_NAMES} "
            f"nor an existing file"
        )
    return datagen.pattern_from_text(path.read_text(encoding="utf-8"))


def cmd_generate(args) -> int:
    if args.copies and len(args.copies) not in (1, len(args.pattern or [])):
        raise ConfigError("--copies must appear once or once per --pattern")
    base = datagen.generate_base(
        args.vertices,
        args.edges,
        n_vertex_labels=args.vertex_labels,
        n_edge_labels=args.edge_labels,
        seed=args.seed,
    )
    layer = base
    pattern_manifests = []
    for i, name in enumerate(args.pattern or []):
        pattern = _resolve_pattern(name)
        if args.copies:
            count = args.copies[0] if len(args.copies) == 1 else args.copies[i]
        else:
            count = 1
        layer, manifest = datagen.embed_pattern(
            layer, pattern, count, seed=args.seed + i + 1, bridge=not args.no_bridge
        )
        manifest["name"] = name
        pattern_manifests.append(manifest)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    if args.split:
        fractions = _parse_split(args.split)
        mln = datagen.split_layers(layer, fractions, seed=args.seed)
        files = []
        for i, lyr in enumerate(mln.layers):
            fname = f"layer{i}.txt"
            (out / fname).write_text(serialize_edge_list(lyr), encoding="utf-8")
            files.append(fname)
        split = fractions
    else:
        (out / "layer0.txt").write_text(serialize_edge_list(layer), encoding="utf-8")
        files = ["layer0.txt"]
        split = None
    manifest = {
        "seed": args.seed,
        "vertices": args.vertices,
        "base_edges": args.edges,
        "total_edges": len(layer.edges),
        "patterns": pattern_manifests,
        "split": split,
        "layers": files,
    }
    (out / "manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    print(f"wrote {len(files)} layer file(s) and manifest.json to {out}")
    return EXIT_OK


def _parse_bench_config(text: str, default_partitions: int) -> tuple[int, int]:
    w, sep, p = text.partition("x")
    try:
        workers = int(w)
        partitions = int(p) if sep else default_partitions
    except ValueError:
        raise ConfigError(f"bad bench config {text!r}, expected W or WxP") from None
    return workers, partitions


def cmd_bench(args) -> int:
    mln = _load_mln(args.layers)
    base_cfg = _make_config(args, mln)
    configs = [
        _parse_bench_config(c, base_cfg.partitions) for c in args.configs.split(",")
    ]
    rows = []
    medians = []
    for workers, partitions in configs:
        cfg = DiscoveryConfig(
            beam=base_cfg.beam,
            max_size=base_cfg.max_size,
            partitions=partitions,
            workers=workers,
            metric=base_cfg.metric,
            strategy=base_cfg.strategy,
            ranges=base_cfg.ranges,
        )
        times = []
        for rep in range(args.repeats):
            t0 = time.perf_counter()
            discover(mln, cfg)
            secs = time.perf_counter() - t0
            times.append(secs)
            rows.append((workers, partitions, rep, secs))
        med = statistics.median(times)
        medians.append((workers, partitions, med))
        print(f"workers={workers} partitions={partitions} median={med:.3f}s "
              f"(runs: {', '.join(f'{t:.3f}' for t in times)})")
    if len(medians) > 1:
        base = medians[0][2]
        for workers, partitions, med in medians[1:]:
            ratio = med / base if base > 0 else float("inf")
            print(
                f"workers={workers} partitions={partitions}: "
                f"{ratio:.3f}x the workers={medians[0][0]} median"
            )
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        lines = ["workers,partitions,repeat,seconds"]
        lines += [f"{w},{p},{r},{s:.6f}" for w, p, r, s in rows]
        (out / "bench.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
        print(f"wrote {out}/bench.csv")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlnmine",
        description="Substructure discovery in homogeneous multilayer networks",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("discover", help="mine a multilayer network")
    p.add_argument("layers", nargs="+", help="edge-list file per layer")
    _add_run_flags(p)
    p.add_argument("--out", default=None, help="directory for result files")
    p.set_defaults(func=cmd_discover)

    p = sub.add_parser(
        "ground-truth",
        help="mine the OR-conflated graph; optionally diff a prior result",
    )
    p.add_argument("layers", nargs="+")
    _add_run_flags(p)
    p.add_argument("--select", default=None, help="layer indices to conflate, e.g. 0,1")
    p.add_argument("--compare", default=None, help="result directory to diff against")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_ground_truth)

    p = sub.add_parser("generate", help="synthesize a dataset")
    p.add_argument("--vertices", type=int, required=True)
    p.add_argument("--edges", type=int, required=True)
    p.add_argument("--vertex-labels", type=int, default=20)
    p.add_argument("--edge-labels", type=int, default=20)
    p.add_argument(
        "--pattern", action="append",
        help="built-in pattern name or pattern file; repeatable",
    )
    p.add_argument(
        "--copies", type=int, action="append",
        help="copies per pattern; one value or one per --pattern",
    )
    p.add_argument("--no-bridge", action="store_true",
                   help="leave planted copies disconnected from the base")
    p.add_argument("--split", default=None, help='e.g. "50/50" or "0.7,0.3"')
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("bench", help="time discovery under different configs")
    p.add_argument("layers", nargs="+")
    _add_run_flags(p)
    p.add_argument(
        "--configs", default="1,4",
        help='comma list of W or WxP entries, e.g. "1x8,4x8"',
    )
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValidationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_LOAD
    except ContractViolation as exc:
        print(f"internal contract violated: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
