"""Synthetic dataset generation: base graphs, planted patterns, splits.

All randomness flows through ``random.Random`` seeded explicitly (the
stdlib Mersenne Twister), so a given seed reproduces the same dataset on
any platform.  Generated labels live in reserved namespaces (``n*`` for
vertices, ``e*`` for edges, ``bridge`` for attachment edges) that never
collide with the built-in pattern labels.
"""

from __future__ import annotations

import random
from typing import Sequence

from .canonical import (
    CanonicalSubstructure,
    Instance,
    canonical_substructure,
    canonicalize_instance,
    instance_vertices,
    substructure_key,
)
from .errors import ValidationError
from .graph import Edge, HoMLN, Layer, make_edge, parse_edge_list

BRIDGE_LABEL = "bridge"

_BUILTIN_PATTERNS = {
    # Stars: one hub, identical spokes.  Two disjoint label namespaces
    # so both can be planted in one graph without interacting.
    "star3": [("pa", 1, "P", 2, "Q"), ("pa", 1, "P", 3, "Q"), ("pa", 1, "P", 4, "Q")],
    "star5": [("qa", 1, "R", i, "S") for i in range(2, 7)],
    # Paths: distinct edge labels along the chain.
    "path3": [("ca", 1, "C", 2, "D"), ("cb", 2, "D", 3, "C"), ("cc", 3, "C", 4, "D")],
    "path5": [
        ("da", 1, "E", 2, "F"),
        ("db", 2, "F", 3, "E"),
        ("dc", 3, "E", 4, "F"),
        ("dd", 4, "F", 5, "E"),
        ("de", 5, "E", 6, "F"),
    ],
}


def _normalize_pattern(edges: Sequence[Edge]) -> CanonicalSubstructure:
    inst = canonicalize_instance(Instance(tuple(edges)))
    # Consistent vertex labels are required to instantiate copies.
    Layer(0, frozenset(inst.edges)).vertex_labels
    return canonical_substructure(inst)


def builtin_pattern(name: str) -> CanonicalSubstructure:
    """A named built-in pattern; see ``BUILTIN_PATTERN_NAMES``."""
    if name not in _BUILTIN_PATTERNS:
        raise ValidationError(
            f"unknown pattern {name!r}; choose from {sorted(_BUILTIN_PATTERNS)}"
        )
    return _normalize_pattern(
        [make_edge(*spec) for spec in _BUILTIN_PATTERNS[name]]
    )


BUILTIN_PATTERN_NAMES = tuple(sorted(_BUILTIN_PATTERNS))


def pattern_from_text(text: str) -> CanonicalSubstructure:
    """Parse a pattern from edge-list text with relative vertex IDs.

    The edge set must be connected and consistently labeled; IDs are
    renumbered canonically, so any positive integers work.
    """
    layer = parse_edge_list(text)
    if not layer.edges:
        raise ValidationError("pattern has no edges")
    return _normalize_pattern(sorted(layer.edges))


def pattern_class_key(pattern: CanonicalSubstructure) -> bytes:
    """The class key instances of this pattern group under."""
    return substructure_key(pattern)


def instantiate_pattern(
    pattern: CanonicalSubstructure, first_vertex_id: int
) -> Instance:
    """A concrete instance of the pattern on fresh consecutive IDs.

    Position i maps to ``first_vertex_id + i - 1``; the map preserves ID
    order, so the copy groups under exactly ``pattern_class_key``.
    """
    offset = first_vertex_id - 1
    edges = tuple(
        Edge(e.edge_label, offset + e.src_id, e.src_label, offset + e.dst_id, e.dst_label)
        for e in pattern.edges
    )
    return Instance(edges, True)


def generate_base(
    n_vertices: int,
    n_edges: int,
    n_vertex_labels: int = 20,
    n_edge_labels: int = 20,
    seed: int = 0,
) -> Layer:
    """Random simple directed graph on vertex IDs 1..n_vertices.

    Ordered vertex pairs are drawn uniformly until ``n_edges`` distinct
    ones exist, so ``n_edges`` may not exceed n(n-1).  Every vertex gets
    one label for all its edges.
    """
    if n_vertices < 2:
        raise ValidationError("need at least 2 vertices")
    if n_edges > n_vertices * (n_vertices - 1):
        raise ValidationError(
            f"{n_edges} edges will not fit in a simple graph on {n_vertices} vertices"
        )
    rng = random.Random(seed)
    vlabel = {v: f"n{rng.randrange(n_vertex_labels)}" for v in range(1, n_vertices + 1)}
    pairs: set[tuple[int, int]] = set()
    edges: list[Edge] = []
    while len(pairs) < n_edges:
        u = rng.randrange(1, n_vertices + 1)
        v = rng.randrange(1, n_vertices + 1)
        if u == v or (u, v) in pairs:
            continue
        pairs.add((u, v))
        edges.append(
            Edge(f"e{rng.randrange(n_edge_labels)}", u, vlabel[u], v, vlabel[v])
        )
    return Layer(0, frozenset(edges))


def embed_pattern(
    base: Layer,
    pattern: CanonicalSubstructure,
    count: int,
    seed: int = 0,
    bridge: bool = True,
) -> tuple[Layer, dict]:
    """Plant ``count`` vertex-disjoint copies of a pattern into a graph.

    Each copy sits on fresh vertex IDs above the base graph's maximum;
    unless ``bridge`` is off, one extra edge (label ``bridge``, random
    direction) connects a random copy vertex to a random base vertex.
    Returns the grown layer and a manifest recording exactly what was
    planted: the pattern's class key and each copy's edge lines.
    """
    if count < 1:
        raise ValidationError("count must be >= 1")
    base_labels = base.vertex_labels
    base_vids = sorted(base.vertex_ids)
    if bridge and not base_vids:
        raise ValidationError("cannot bridge into an empty base graph")
    rng = random.Random(seed)
    m = len(instance_vertices(pattern))
    next_id = (max(base_vids) if base_vids else 0) + 1
    new_edges: list[Edge] = []
    instances: list[list[str]] = []
    bridges: list[str] = []
    for _ in range(count):
        copy = instantiate_pattern(pattern, next_id)
        copy_vids = instance_vertices(copy)
        copy_labels = {
            vid: lab
            for e in copy.edges
            for vid, lab in ((e.src_id, e.src_label), (e.dst_id, e.dst_label))
        }
        next_id += m
        new_edges.extend(copy.edges)
        instances.append([e.line() for e in copy.edges])
        if bridge:
            cv = rng.choice(copy_vids)
            bv = rng.choice(base_vids)
            if rng.random() < 0.5:
                b = make_edge(BRIDGE_LABEL, cv, copy_labels[cv], bv, base_labels[bv])
            else:
                b = make_edge(BRIDGE_LABEL, bv, base_labels[bv], cv, copy_labels[cv])
            new_edges.append(b)
            bridges.append(b.line())
    manifest = {
        "pattern": pattern_class_key(pattern).decode("utf-8"),
        "count": count,
        "instances": instances,
        "bridges": bridges,
    }
    return Layer(base.layer_id, base.edges | frozenset(new_edges)), manifest


def split_layers(layer: Layer, fractions: Sequence[float], seed: int = 0) -> HoMLN:
    """Split one graph into layers by weighted random edge assignment.

    Each edge lands in exactly one layer, so the OR-conflation of the
    result is the input graph.  Fractions must be positive and sum to 1;
    actual layer sizes deviate binomially.
    """
    if not fractions or any(f <= 0 for f in fractions):
        raise ValidationError("fractions must be positive")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise ValidationError(f"fractions must sum to 1, got {sum(fractions)}")
    rng = random.Random(seed)
    cumulative = []
    acc = 0.0
    for f in fractions:
        acc += f
        cumulative.append(acc)
    cumulative[-1] = 1.0
    buckets: list[set[Edge]] = [set() for _ in fractions]
    for e in layer.sorted_edges:
        r = rng.random()
        for i, c in enumerate(cumulative):
            if r < c:
                buckets[i].add(e)
                break
    return HoMLN.from_layers(
        [Layer(i, frozenset(b)) for i, b in enumerate(buckets)]
    )
