"""Canonical forms for instances and their isomorphism classes.

An *instance* is a connected set of edges from one graph, kept as a
tuple sorted by :func:`mlnmine.graph.edge_sort_key`.  Two instances with
the same edge set always canonicalize to the same tuple, so the sorted
form is the duplicate-elimination key.

A *canonical substructure* abstracts the instance one step further:
absolute vertex IDs are replaced by 1-based positions in order of first
appearance (source before destination within an edge).  Instances that
differ only by a vertex-ID relabeling that preserves the canonical edge
order map to the same substructure, which makes the substructure key the
grouping key for isomorphism classes.  When no two edges of an instance
share all three labels, the edge order is determined by labels alone and
the key is a complete isomorphism invariant; when label-identical edges
tie, IDs break the tie and one class may split into several keys.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass

from .errors import ContractViolation
from .graph import Edge, edge_sort_key

__all__ = [
    "Instance",
    "CanonicalSubstructure",
    "edge_order",
    "canonicalize_instance",
    "insert_edge",
    "instance_vertices",
    "instance_vertex_set",
    "canonical_substructure",
    "instance_key",
    "substructure_key",
    "substructure_key_of",
]


def edge_order(a: Edge, b: Edge) -> int:
    """Three-way comparison under the canonical edge order (-1, 0, or 1)."""
    ka, kb = edge_sort_key(a), edge_sort_key(b)
    if ka < kb:
        return -1
    if ka > kb:
        return 1
    return 0


@dataclass(frozen=True)
class Instance:
    """A connected edge set from one graph.

    ``is_canonical`` records that ``edges`` is already sorted by the
    canonical edge order; the expansion fast paths rely on it.
    """

    edges: tuple[Edge, ...]
    is_canonical: bool = False

    @property
    def size(self) -> int:
        return len(self.edges)


@dataclass(frozen=True)
class CanonicalSubstructure:
    """An isomorphism-class representative with relative vertex IDs."""

    edges: tuple[Edge, ...]

    @property
    def size(self) -> int:
        return len(self.edges)

    @property
    def n_vertices(self) -> int:
        return len(instance_vertex_set(self))


def _connected(edges: tuple[Edge, ...]) -> bool:
    if not edges:
        return False
    neighbors: dict[int, set[int]] = {}
    for e in edges:
        neighbors.setdefault(e.src_id, set()).add(e.dst_id)
        neighbors.setdefault(e.dst_id, set()).add(e.src_id)
    start = edges[0].src_id
    seen = {start}
    stack = [start]
    while stack:
        for nxt in neighbors[stack.pop()]:
            if nxt not in seen:
                seen.add(nxt)
                stack.append(nxt)
    return len(seen) == len(neighbors)


def canonicalize_instance(inst: Instance) -> Instance:
    """Sort the edges into canonical order.

    Idempotent.  The edge set must be duplicate-free and connected
    (undirected sense); violations raise :class:`ContractViolation`.
    """
    if inst.is_canonical:
        return inst
    if len(set(inst.edges)) != len(inst.edges):
        raise ContractViolation("instance contains a duplicate edge")
    if not _connected(inst.edges):
        raise ContractViolation("instance is not connected")
    return Instance(tuple(sorted(inst.edges, key=edge_sort_key)), True)


def insert_edge(inst: Instance, e: Edge) -> tuple[Instance, int]:
    """Grow a canonical instance by one edge, keeping canonical order.

    Trusted fast path for expansion: assumes ``inst`` is canonical, ``e``
    is not already present, and ``e`` shares a vertex with ``inst``.
    Returns the new instance and the position the edge was inserted at.
    """
    keys = [edge_sort_key(x) for x in inst.edges]
    pos = bisect.bisect_left(keys, edge_sort_key(e))
    return Instance(inst.edges[:pos] + (e,) + inst.edges[pos:], True), pos


def instance_vertices(inst: Instance | CanonicalSubstructure) -> tuple[int, ...]:
    """Distinct vertex IDs in first-appearance order (src before dst)."""
    out: list[int] = []
    seen: set[int] = set()
    for e in inst.edges:
        for vid in (e.src_id, e.dst_id):
            if vid not in seen:
                seen.add(vid)
                out.append(vid)
    return tuple(out)


def instance_vertex_set(inst: Instance | CanonicalSubstructure) -> frozenset[int]:
    ids = set()
    for e in inst.edges:
        ids.add(e.src_id)
        ids.add(e.dst_id)
    return frozenset(ids)


def canonical_substructure(inst: Instance) -> CanonicalSubstructure:
    """Replace absolute vertex IDs by first-appearance positions (1-based).

    Requires a canonical instance; the relabeled edge tuple keeps the
    canonical-order positions of the original.
    """
    if not inst.is_canonical:
        raise ContractViolation("canonical_substructure needs a canonical instance")
    relative: dict[int, int] = {}
    out = []
    for e in inst.edges:
        s = relative.setdefault(e.src_id, len(relative) + 1)
        d = relative.setdefault(e.dst_id, len(relative) + 1)
        out.append(Edge(e.edge_label, s, e.src_label, d, e.dst_label))
    return CanonicalSubstructure(tuple(out))


def _edges_key(edges: tuple[Edge, ...]) -> bytes:
    return "|".join(e.text() for e in edges).encode("utf-8")


def instance_key(inst: Instance) -> bytes:
    """Byte key identifying the instance: its canonical edge sequence.

    Equal keys hold exactly for equal edge sets (labels cannot contain
    the delimiter characters, so the encoding is injective).
    """
    if not inst.is_canonical:
        raise ContractViolation("instance_key needs a canonical instance")
    return _edges_key(inst.edges)


def substructure_key(sub: CanonicalSubstructure) -> bytes:
    """Byte key identifying the isomorphism class representative."""
    return _edges_key(sub.edges)


def substructure_key_of(inst: Instance) -> bytes:
    """Class key of an instance in one pass, without building the edge tuple."""
    if not inst.is_canonical:
        raise ContractViolation("substructure_key_of needs a canonical instance")
    relative: dict[int, int] = {}
    parts = []
    for e in inst.edges:
        s = relative.setdefault(e.src_id, len(relative) + 1)
        d = relative.setdefault(e.dst_id, len(relative) + 1)
        parts.append(f"({e.edge_label},{s},{e.src_label},{d},{e.dst_label})")
    return "|".join(parts).encode("utf-8")
