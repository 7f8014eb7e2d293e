"""Isomorphism-class grouping and the two ranking metrics.

Frequency is the plain instance count of a class.  The compression
metric scores a class by DL(G) / (DL(S) + DL(G|S)) where description
length DL counts vertices plus edges, S is the class representative, and
G|S is G with a greedy maximal vertex-disjoint set of the class's
instances each collapsed to a single replacement node.  Larger values
mean the substructure compresses the graph better.  All compression
arithmetic is exact (integers and fractions, never floats).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .canonical import (
    CanonicalSubstructure,
    Instance,
    canonical_substructure,
    instance_key,
    instance_vertex_set,
    substructure_key,
    substructure_key_of,
)
from .errors import ContractViolation
from .graph import Edge, Layer, build_adjacency_list

REPLACEMENT_LABEL = "_S"


@dataclass(frozen=True)
class GraphStats:
    """What the compression metric needs to know about the host graph."""

    n_vertices: int
    n_edges: int
    adjacency: Mapping[int, tuple[Edge, ...]]

    @property
    def dl_g(self) -> int:
        """Description length of the host graph: vertices plus edges."""
        return self.n_vertices + self.n_edges

    @classmethod
    def from_layer(cls, layer: Layer, extra_isolated: int = 0) -> "GraphStats":
        """Stats for a layer, optionally counting isolated vertices too."""
        adj = build_adjacency_list(layer)
        return cls(
            n_vertices=len(layer.vertex_ids) + extra_isolated,
            n_edges=len(layer.edges),
            adjacency=adj.entries,
        )


@dataclass
class ScoredSubstructure:
    """One isomorphism class: representative, instances, and its score."""

    sub: CanonicalSubstructure
    instances: tuple[Instance, ...]
    value: Fraction | int | None = None

    @property
    def frequency(self) -> int:
        return len(self.instances)

    @cached_property
    def key(self) -> bytes:
        return substructure_key(self.sub)

    @property
    def size(self) -> int:
        return self.sub.size


def group_isomorphs(instances: Sequence[Instance]) -> list[ScoredSubstructure]:
    """Group deduplicated same-size instances by substructure key.

    Groups come back sorted by class key, instances within a group by
    instance key, so grouping order never depends on input order.
    """
    buckets: dict[bytes, list[Instance]] = {}
    size = None
    for inst in instances:
        if size is None:
            size = inst.size
        elif inst.size != size:
            raise ContractViolation("grouping batch mixes instance sizes")
        buckets.setdefault(substructure_key_of(inst), []).append(inst)
    out = []
    for key in sorted(buckets):
        members = sorted(buckets[key], key=instance_key)
        rep = canonical_substructure(members[0])
        out.append(ScoredSubstructure(rep, tuple(members)))
    return out


def greedy_disjoint_cover(instances: Sequence[Instance]) -> list[Instance]:
    """Maximal vertex-disjoint subset, chosen greedily in key order.

    Instances must arrive sorted by instance key (as group_isomorphs
    leaves them) so the selection is deterministic.
    """
    used: set[int] = set()
    chosen: list[Instance] = []
    for inst in instances:
        verts = instance_vertex_set(inst)
        if used.isdisjoint(verts):
            chosen.append(inst)
            used |= verts
    return chosen


def compressed_description_length(
    stats: GraphStats, selected: Sequence[Instance]
) -> int:
    """DL of the host graph after collapsing the selected instances.

    Each selected instance loses its vertices and edges and gains one
    replacement node (label ``_S``).  Edges between a selected instance
    and the rest re-attach to the replacement node; edges whose endpoints
    collapse into the same node would become self-loops and are dropped;
    re-attached edges that become identical 5-tuples merge into one.
    Selected instances must be pairwise vertex-disjoint.
    """
    owner: dict[int, int] = {}
    removed_edges: set[Edge] = set()
    n_removed_vertices = 0
    for i, inst in enumerate(selected):
        verts = instance_vertex_set(inst)
        if not verts.isdisjoint(owner):
            raise ContractViolation("selected instances overlap on a vertex")
        n_removed_vertices += len(verts)
        for v in verts:
            owner[v] = i
        removed_edges.update(inst.edges)
    n_nodes = stats.n_vertices - n_removed_vertices + len(selected)

    # Edges touching a collapsed vertex but not inside any instance.
    touched: set[Edge] = set()
    for v in owner:
        for e in stats.adjacency.get(v, ()):
            if e not in removed_edges:
                touched.add(e)
    survivors: set[tuple] = set()
    for e in touched:
        s, d = owner.get(e.src_id), owner.get(e.dst_id)
        if s is not None and s == d:
            continue  # both endpoints collapse together: self-loop, dropped
        s_key = (0, e.src_id, e.src_label) if s is None else (1, s, REPLACEMENT_LABEL)
        d_key = (0, e.dst_id, e.dst_label) if d is None else (1, d, REPLACEMENT_LABEL)
        survivors.add((e.edge_label, s_key, d_key))
    n_edges = stats.n_edges - len(removed_edges) - len(touched) + len(survivors)
    return n_nodes + n_edges


def substructure_dl(sub: CanonicalSubstructure) -> int:
    return sub.n_vertices + sub.size


def mdl_score(group: ScoredSubstructure, stats: GraphStats) -> Fraction:
    """Compression value of a class, exact.

    Higher is better; 1 means the substructure buys nothing net of its
    own description.
    """
    if not group.instances:
        raise ContractViolation("cannot score an empty group")
    selected = greedy_disjoint_cover(group.instances)
    dl_gs = compressed_description_length(stats, selected)
    return Fraction(stats.dl_g, substructure_dl(group.sub) + dl_gs)


def freq_score(group: ScoredSubstructure) -> int:
    if not group.instances:
        raise ContractViolation("cannot score an empty group")
    return group.frequency


def score_groups(
    groups: Iterable[ScoredSubstructure], stats: GraphStats, metric: str
) -> None:
    """Fill ``value`` on every group in place."""
    if metric == "mdl":
        for g in groups:
            g.value = mdl_score(g, stats)
    elif metric == "freq":
        for g in groups:
            g.value = freq_score(g)
    else:
        raise ContractViolation(f"unknown metric {metric!r}")


def beam_sort_key(group: ScoredSubstructure) -> tuple:
    return (-group.value, group.key)


def apply_beam(
    groups: Sequence[ScoredSubstructure], beam: int
) -> list[ScoredSubstructure]:
    """Keep the ``beam`` best classes: value descending, key ascending.

    Ties at the cut are truncated deterministically by class key.  Every
    group must already be scored.
    """
    if beam < 1:
        raise ContractViolation(f"beam must be >= 1, got {beam}")
    for g in groups:
        if g.value is None:
            raise ContractViolation("apply_beam saw an unscored group")
    return sorted(groups, key=beam_sort_key)[:beam]
