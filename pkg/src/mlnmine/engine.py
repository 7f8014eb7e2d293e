"""The iterative discovery engine.

Each iteration turns the surviving instances of size k-1 into ranked
classes of size k through three barrier-separated jobs:

1. per-layer expansion: single-layer instances grow by incident edges of
   their own layer, partition by partition;
2. composition: every survivor grows by incident edges of the other
   layers (all layers, for instances that already mix);
3. reduction: the union is deduplicated, grouped into isomorphism
   classes, scored, and cut down to the beam.

Instances are routed to partitions by vertex-ID range; grouped work is
routed to reducers by a hash of the class key, so a class is always
scored whole in one place.  Results are byte-identical for any worker
and partition count: every stage's output is sorted by canonical keys
and nothing order- or timing-dependent reaches the serialized result.

Workers are separate processes (fork).  ``workers=1`` runs everything
in-process.
"""

from __future__ import annotations

import json
import multiprocessing
import time
import warnings
import zlib
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

from .canonical import Instance, instance_vertex_set, substructure_key_of
from .compose import TaggedInstance, compose_in_partition, separate
from .errors import ConfigError
from .expand import expand_instance
from .graph import HoMLN, Layer, or_conflate
from .metrics import (
    GraphStats,
    ScoredSubstructure,
    apply_beam,
    beam_sort_key,
    group_isomorphs,
    score_groups,
)
from .partition import RangePartitioning, make_ranges, partition_adjacency

WORKERS_ENV = "MLNMINE_WORKERS"
METRICS = ("mdl", "freq")


@dataclass(frozen=True)
class DiscoveryConfig:
    """Knobs for one discovery run.

    ``ranges`` overrides ``partitions``/``strategy`` with an explicit
    partitioning.  ``workers`` and ``partitions`` change the work
    layout, never the result.
    """

    beam: int = 4
    max_size: int = 5
    partitions: int = 1
    workers: int = 1
    metric: str = "mdl"
    strategy: str = "equal-load"
    ranges: RangePartitioning | None = None

    def validate(self) -> None:
        if self.beam < 1:
            raise ConfigError(f"beam must be >= 1, got {self.beam}")
        if self.max_size < 2:
            raise ConfigError(f"max size must be >= 2, got {self.max_size}")
        if self.partitions < 1:
            raise ConfigError(f"partitions must be >= 1, got {self.partitions}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.metric not in METRICS:
            raise ConfigError(f"metric must be one of {METRICS}, got {self.metric!r}")
        if self.strategy not in ("equal-load", "equal-width"):
            raise ConfigError(f"unknown partition strategy {self.strategy!r}")


@dataclass
class IterationReport:
    """What one iteration did: counts, stage timings, and its survivors."""

    size: int
    emitted: int
    unique: int
    n_classes: int
    survivors: list[ScoredSubstructure]
    stage_seconds: dict[str, float] = field(default_factory=dict)
    stage_emitted: dict[str, int] = field(default_factory=dict)


@dataclass
class DiscoveryResult:
    """Ranked classes of the final size plus per-iteration reports."""

    metric: str
    beam: int
    max_size: int
    ranked: list[ScoredSubstructure]
    reports: list[IterationReport]
    dl_g: int | None = None

    def survivors_at(self, size: int) -> list[ScoredSubstructure]:
        for r in self.reports:
            if r.size == size:
                return r.survivors
        return []


def route_instances(
    instances: Sequence[Instance], ranges: RangePartitioning
) -> list[list[Instance]]:
    """Copy each instance to every partition owning one of its vertices.

    The total number of copies equals the sum over instances of their
    distinct owning partitions.
    """
    routed: list[list[Instance]] = [[] for _ in range(ranges.p)]
    for inst in instances:
        owners = {ranges.owner_of(v) for v in instance_vertex_set(inst)}
        for p in sorted(owners):
            routed[p].append(inst)
    return routed


def _route_tagged(
    tagged: Sequence[TaggedInstance], ranges: RangePartitioning
) -> list[list[TaggedInstance]]:
    routed: list[list[TaggedInstance]] = [[] for _ in range(ranges.p)]
    for ti in tagged:
        owners = {ranges.owner_of(v) for v in instance_vertex_set(ti.inst)}
        for p in sorted(owners):
            routed[p].append(ti)
    return routed


# Read-only state inherited by forked workers: adjacency partitions per
# layer, host-graph stats, and scoring knobs.  Filled before the pool is
# created; never mutated while it lives.
_SHARED: dict = {}


def _expand_task(args: tuple[int, int, list[Instance]]) -> tuple[int, list[list[Instance]]]:
    layer_idx, part_idx, instances = args
    alp = _SHARED["alps"][layer_idx][part_idx]
    n_buckets = _SHARED["n_buckets"]
    buckets: list[list[Instance]] = [[] for _ in range(n_buckets)]
    emitted = 0
    for inst in instances:
        for grown in expand_instance(inst, alp):
            emitted += 1
            buckets[zlib.crc32(substructure_key_of(grown)) % n_buckets].append(grown)
    return emitted, buckets


def _compose_task(args: tuple[int, list[TaggedInstance]]) -> tuple[int, list[list[Instance]]]:
    part_idx, tagged = args
    slices = [alps[part_idx] for alps in _SHARED["alps"]]
    n_buckets = _SHARED["n_buckets"]
    buckets: list[list[Instance]] = [[] for _ in range(n_buckets)]
    emitted = 0
    for ti in compose_in_partition(tagged, slices):
        emitted += 1
        inst = ti.inst
        buckets[zlib.crc32(substructure_key_of(inst)) % n_buckets].append(inst)
    return emitted, buckets


def _reduce_task(
    instances: list[Instance],
) -> tuple[int, int, list[ScoredSubstructure]]:
    by_edges: dict[tuple, Instance] = {}
    for inst in instances:
        by_edges.setdefault(inst.edges, inst)
    deduped = list(by_edges.values())
    groups = group_isomorphs(deduped)
    score_groups(groups, _SHARED["stats"], _SHARED["metric"])
    # Only the classes that can still make the global beam travel back
    # with their instance sets; the rest contribute to the counts only.
    trimmed = sorted(groups, key=beam_sort_key)[: _SHARED["beam"]]
    return len(deduped), len(groups), trimmed


class _Pool:
    """Map tasks over forked workers; in-process when workers == 1."""

    def __init__(self, workers: int):
        self._pool = None
        if workers > 1:
            try:
                ctx = multiprocessing.get_context("fork")
            except ValueError:
                warnings.warn("fork unavailable; falling back to in-process execution")
            else:
                self._pool = ctx.Pool(workers)

    def map(self, fn: Callable, tasks: list) -> list:
        if self._pool is None or len(tasks) <= 1:
            return [fn(t) for t in tasks]
        return self._pool.map(fn, tasks, chunksize=1)

    def close(self) -> None:
        if self._pool is not None:
            self._pool.close()
            self._pool.join()
            self._pool = None


def _merge_buckets(
    results: list[tuple[int, list[list[Instance]]]],
    buckets: list[list[Instance]],
) -> int:
    emitted = 0
    for em, bks in results:
        emitted += em
        for b, items in enumerate(bks):
            buckets[b].extend(items)
    return emitted


def discover(mln: HoMLN, cfg: DiscoveryConfig) -> DiscoveryResult:
    """Run the full pipeline on a multilayer network.

    Iterates substructure sizes 2..max_size; single edges seed the first
    iteration and are never scored themselves.  The returned ``ranked``
    list is the final iteration's beam.  Deterministic for a fixed
    (network, beam, max_size, metric, partitioning basis): worker count
    and partition count never change the result.
    """
    cfg.validate()
    layers = mln.layers
    empty = DiscoveryResult(cfg.metric, cfg.beam, cfg.max_size, [], [])
    if not layers or all(not layer.edges for layer in layers):
        return empty

    conflated = or_conflate(mln)
    stats = GraphStats.from_layer(conflated)
    if cfg.ranges is not None:
        ranges = cfg.ranges
    else:
        ranges = make_ranges(conflated, cfg.partitions, cfg.strategy)
    alps = [partition_adjacency(layer, ranges) for layer in layers]
    n_buckets = max(1, cfg.workers)

    global _SHARED
    _SHARED = {
        "alps": alps,
        "stats": stats,
        "metric": cfg.metric,
        "beam": cfg.beam,
        "n_buckets": n_buckets,
    }
    pool = _Pool(cfg.workers)
    try:
        per_layer: list[list[Instance]] = [
            [Instance((e,), True) for e in layer.sorted_edges] for layer in layers
        ]
        composed: list[TaggedInstance] = []
        reports: list[IterationReport] = []
        survivors: list[ScoredSubstructure] = []
        for size in range(2, cfg.max_size + 1):
            report = _iterate(
                pool, layers, ranges, per_layer, composed, size, n_buckets, cfg
            )
            if report is None:
                break
            reports.append(report)
            survivors = report.survivors
            if size == cfg.max_size or not survivors:
                break
            per_layer, composed = separate(survivors, layers)
        result = DiscoveryResult(
            cfg.metric, cfg.beam, cfg.max_size, list(survivors), reports, stats.dl_g
        )
        return result
    finally:
        pool.close()


def _iterate(
    pool: _Pool,
    layers: tuple[Layer, ...],
    ranges: RangePartitioning,
    per_layer: list[list[Instance]],
    composed: list[TaggedInstance],
    size: int,
    n_buckets: int,
    cfg: DiscoveryConfig,
) -> IterationReport | None:
    buckets: list[list[Instance]] = [[] for _ in range(n_buckets)]
    stage_seconds: dict[str, float] = {}
    stage_emitted: dict[str, int] = {}
    total_emitted = 0

    for i in range(len(layers)):
        t0 = time.perf_counter()
        routed = route_instances(per_layer[i], ranges)
        tasks = [(i, p, routed[p]) for p in range(ranges.p) if routed[p]]
        emitted = _merge_buckets(pool.map(_expand_task, tasks), buckets)
        stage = f"expand-layer{i}"
        stage_seconds[stage] = time.perf_counter() - t0
        stage_emitted[stage] = emitted
        total_emitted += emitted

    t0 = time.perf_counter()
    emitted = 0
    if len(layers) > 1:
        tagged_all = [
            TaggedInstance(inst, i, (i,) * inst.size)
            for i, seq in enumerate(per_layer)
            for inst in seq
        ] + list(composed)
        routed_t = _route_tagged(tagged_all, ranges)
        tasks = [(p, routed_t[p]) for p in range(ranges.p) if routed_t[p]]
        emitted = _merge_buckets(pool.map(_compose_task, tasks), buckets)
    stage_seconds["compose"] = time.perf_counter() - t0
    stage_emitted["compose"] = emitted
    total_emitted += emitted

    t0 = time.perf_counter()
    reduce_tasks = [b for b in buckets if b]
    if not reduce_tasks:
        return None
    unique = 0
    n_classes = 0
    candidates: list[ScoredSubstructure] = []
    for n_uniq, n_grp, trimmed in pool.map(_reduce_task, reduce_tasks):
        unique += n_uniq
        n_classes += n_grp
        candidates.extend(trimmed)
    survivors = apply_beam(candidates, cfg.beam)
    stage_seconds["reduce"] = time.perf_counter() - t0

    return IterationReport(
        size=size,
        emitted=total_emitted,
        unique=unique,
        n_classes=n_classes,
        survivors=survivors,
        stage_seconds=stage_seconds,
        stage_emitted=stage_emitted,
    )


def run_ground_truth(
    mln: HoMLN, cfg: DiscoveryConfig, layer_ids: Sequence[int] | None = None
) -> DiscoveryResult:
    """Discovery over the OR-conflation of the chosen layers.

    Collapses the selected layers into one graph first, so the run sees
    every edge but no layer boundaries.  The reference the multilayer
    pipeline is checked against.
    """
    conflated = or_conflate(mln, layer_ids)
    return discover(HoMLN.from_layers([conflated]), cfg)


def _score_str(value) -> str:
    return str(value)


def _class_obj(g: ScoredSubstructure) -> dict:
    return {
        "class": g.key.decode("utf-8"),
        "size": g.size,
        "frequency": g.frequency,
        "score": _score_str(g.value),
    }


def ranked_text(result: DiscoveryResult) -> str:
    """Human-readable ranked list, one class per line."""
    lines = [
        f"# metric={result.metric} beam={result.beam} max_size={result.max_size}",
        "rank\tsize\tfrequency\tscore\tclass",
    ]
    for rank, g in enumerate(result.ranked, start=1):
        lines.append(
            f"{rank}\t{g.size}\t{g.frequency}\t{_score_str(g.value)}\t"
            f"{g.key.decode('utf-8')}"
        )
    return "\n".join(lines) + "\n"


def result_json(result: DiscoveryResult) -> str:
    """Canonical JSON form of a result.

    Contains only run-layout-independent data: ranked classes and the
    per-iteration survivor lists and counts.  Scores are exact fraction
    strings.  Byte-identical across worker and partition counts.
    """
    obj = {
        "metric": result.metric,
        "beam": result.beam,
        "max_size": result.max_size,
        "dl_g": result.dl_g,
        "iterations": [
            {
                "size": r.size,
                "unique_instances": r.unique,
                "classes": r.n_classes,
                "survivors": [_class_obj(g) for g in r.survivors],
            }
            for r in result.reports
        ],
        "ranked": [_class_obj(g) for g in result.ranked],
    }
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def timing_csv(result: DiscoveryResult) -> str:
    """Per-stage wall times and emission counts; not deterministic."""
    lines = ["size,stage,seconds,emitted"]
    for r in result.reports:
        for stage, secs in r.stage_seconds.items():
            emitted = r.stage_emitted.get(stage, 0)
            lines.append(f"{r.size},{stage},{secs:.6f},{emitted}")
    return "\n".join(lines) + "\n"


def write_result(result: DiscoveryResult, outdir: str | Path) -> None:
    """Write result.txt, result.json, and timing.csv into ``outdir``."""
    out = Path(outdir)
    out.mkdir(parents=True, exist_ok=True)
    (out / "result.txt").write_text(ranked_text(result), encoding="utf-8")
    (out / "result.json").write_text(result_json(result), encoding="utf-8")
    (out / "timing.csv").write_text(timing_csv(result), encoding="utf-8")
