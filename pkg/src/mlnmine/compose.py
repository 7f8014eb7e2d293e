"""Cross-layer composition of instances in a multilayer network.

Per-layer expansion alone can never produce an instance that mixes edges
from two layers, so each iteration runs a composition pass as well: an
instance is grown by incident edges drawn from the *other* layers (for a
single-layer instance) or from every layer (for an instance that already
mixes).  Attribution never needs bookkeeping across iterations because
it can be re-derived from layer membership: an instance fully contained
in some layer belongs to that layer (lowest index wins when several
contain it), anything else is composed, with each edge tagged by the
lowest layer that carries it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .canonical import (
    Instance,
    insert_edge,
    instance_key,
    instance_vertices,
)
from .errors import ContractViolation
from .graph import Edge, Layer
from .metrics import ScoredSubstructure
from .partition import AdjacencyListPartition


@dataclass(frozen=True)
class TaggedInstance:
    """An instance plus its layer attribution.

    ``origin`` is the owning layer index for single-layer instances and
    ``None`` for composed ones.  ``edge_tags`` names a contributing layer
    per edge, aligned with ``inst.edges``.
    """

    inst: Instance
    origin: int | None
    edge_tags: tuple[int, ...]


def tag_instance(inst: Instance, layers: Sequence[Layer]) -> TaggedInstance:
    """Attribute an instance to its layers by membership.

    Every edge must occur in at least one layer; anything else means the
    instance never came from this network and is a contract violation.
    """
    for i, layer in enumerate(layers):
        if all(e in layer.edges for e in inst.edges):
            return TaggedInstance(inst, i, (i,) * inst.size)
    tags = []
    for e in inst.edges:
        for i, layer in enumerate(layers):
            if e in layer.edges:
                tags.append(i)
                break
        else:
            raise ContractViolation(f"edge {e.line()} belongs to no layer")
    return TaggedInstance(inst, None, tuple(tags))


def compose_in_partition(
    tagged: Sequence[TaggedInstance],
    layer_slices: Sequence[AdjacencyListPartition],
) -> list[TaggedInstance]:
    """One partition's composition work.

    ``layer_slices`` holds the same vertex range of every layer's
    adjacency list.  Each instance is grown at its owned vertices by
    edges of every permitted layer (all layers except a single-layer
    instance's own).  Results keep only growths whose edges span at
    least two layers, deduplicated within the partition; when one edge
    set is reachable with different tag tuples the lexicographically
    smallest wins, so output never depends on iteration order.
    """
    if not layer_slices:
        raise ContractViolation("composition needs at least one layer slice")
    lo, hi = layer_slices[0].lo, layer_slices[0].hi
    for s in layer_slices:
        if (s.lo, s.hi) != (lo, hi):
            raise ContractViolation("layer slices cover different ranges")
    out: dict[tuple[Edge, ...], TaggedInstance] = {}
    for ti in tagged:
        edge_set = set(ti.inst.edges)
        permitted = [
            j for j in range(len(layer_slices)) if j != ti.origin
        ]
        for vid in instance_vertices(ti.inst):
            if not (lo <= vid <= hi):
                continue
            for j in permitted:
                for e in layer_slices[j].incident(vid):
                    if e in edge_set:
                        continue
                    grown, pos = insert_edge(ti.inst, e)
                    tags = ti.edge_tags[:pos] + (j,) + ti.edge_tags[pos:]
                    if len(set(tags)) < 2:
                        continue
                    prev = out.get(grown.edges)
                    if prev is None or tags < prev.edge_tags:
                        out[grown.edges] = TaggedInstance(grown, None, tags)
    return [out[k] for k in sorted(out, key=lambda edges: instance_key(Instance(edges, True)))]


def compose_step(
    survivors: Sequence[TaggedInstance],
    layer_alps: Sequence[Sequence[AdjacencyListPartition]],
) -> list[TaggedInstance]:
    """Serial reference composition over every partition.

    ``layer_alps[j][p]`` is partition ``p`` of layer ``j``; all layers
    must be partitioned by the same ranges.  Consumes every survivor of
    the previous round, single-layer and composed alike.
    """
    n_parts = len(layer_alps[0])
    for alps in layer_alps:
        if len(alps) != n_parts:
            raise ContractViolation("layers partitioned differently")
    merged: dict[tuple[Edge, ...], TaggedInstance] = {}
    for p in range(n_parts):
        slices = [alps[p] for alps in layer_alps]
        for ti in compose_in_partition(survivors, slices):
            prev = merged.get(ti.inst.edges)
            if prev is None or ti.edge_tags < prev.edge_tags:
                merged[ti.inst.edges] = ti
    return [
        merged[k]
        for k in sorted(merged, key=lambda edges: instance_key(Instance(edges, True)))
    ]


def separate(
    groups: Sequence[ScoredSubstructure], layers: Sequence[Layer]
) -> tuple[list[list[Instance]], list[TaggedInstance]]:
    """Partition the surviving instances by attribution.

    Returns one instance list per layer (instances fully inside that
    layer) plus the composed remainder with per-edge tags.  Every input
    instance lands in exactly one output bucket.
    """
    per_layer: list[list[Instance]] = [[] for _ in layers]
    composed: list[TaggedInstance] = []
    for g in groups:
        for inst in g.instances:
            ti = tag_instance(inst, layers)
            if ti.origin is None:
                composed.append(ti)
            else:
                per_layer[ti.origin].append(inst)
    return per_layer, composed
