"""Directed labeled graphs: edges, layers, multilayer networks, adjacency.

Graphs travel as line-oriented text, one edge per line:

    edge_label,src_id,src_label,dst_id,dst_label

Blank lines and lines starting with ``#`` are ignored.  Labels are case
sensitive and may not contain commas, parentheses, or newlines (those
characters are reserved by the key encoding in :mod:`mlnmine.canonical`).
Vertex IDs are positive integers.  A layer is a simple directed graph:
no self-loops, no repeated 5-tuples.

A homogeneous multilayer network (HoMLN) is a set of layers over one
shared vertex universe: the same vertex ID must carry the same label in
every layer that mentions it.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import ParseError, ValidationError

RESERVED_LABEL_CHARS = frozenset(",()\n\r")


class Edge(NamedTuple):
    """One directed labeled edge, the 5-tuple every structure is built from."""

    edge_label: str
    src_id: int
    src_label: str
    dst_id: int
    dst_label: str

    def text(self) -> str:
        """Parenthesized form used inside instance and substructure keys."""
        return (
            f"({self.edge_label},{self.src_id},{self.src_label},"
            f"{self.dst_id},{self.dst_label})"
        )

    def line(self) -> str:
        """Comma-separated form used in edge-list files."""
        return (
            f"{self.edge_label},{self.src_id},{self.src_label},"
            f"{self.dst_id},{self.dst_label}"
        )


def edge_sort_key(e: Edge) -> tuple[str, str, str, int, int]:
    """Total order on edges: labels first, vertex IDs break the ties.

    The key compares edge label, then source label, then destination
    label, then source ID, then destination ID.  Sorting a set of edges
    by this key is what makes instance keys canonical.
    """
    return (e.edge_label, e.src_label, e.dst_label, e.src_id, e.dst_id)


def _check_label(label: str, what: str) -> None:
    if not label:
        raise ValidationError(f"{what} must be non-empty")
    if RESERVED_LABEL_CHARS.intersection(label):
        raise ValidationError(f"{what} {label!r} contains a reserved character")


def make_edge(
    edge_label: str, src_id: int, src_label: str, dst_id: int, dst_label: str
) -> Edge:
    """Validated :class:`Edge` constructor.

    Rejects empty or reserved-character labels, non-positive vertex IDs,
    and self-loops.
    """
    _check_label(edge_label, "edge label")
    _check_label(src_label, "source label")
    _check_label(dst_label, "destination label")
    if src_id < 1 or dst_id < 1:
        raise ValidationError("vertex IDs must be positive integers")
    if src_id == dst_id:
        raise ValidationError(f"self-loop on vertex {src_id}")
    return Edge(edge_label, src_id, src_label, dst_id, dst_label)


@dataclass(frozen=True)
class Layer:
    """A simple directed labeled graph, one layer of a multilayer network."""

    layer_id: int
    edges: frozenset[Edge]

    @cached_property
    def vertex_ids(self) -> frozenset[int]:
        ids = set()
        for e in self.edges:
            ids.add(e.src_id)
            ids.add(e.dst_id)
        return frozenset(ids)

    @cached_property
    def sorted_edges(self) -> tuple[Edge, ...]:
        return tuple(sorted(self.edges, key=edge_sort_key))

    @cached_property
    def vertex_labels(self) -> dict[int, str]:
        """Label per vertex ID; raises if two edges disagree."""
        labels: dict[int, str] = {}
        for e in self.edges:
            for vid, lab in ((e.src_id, e.src_label), (e.dst_id, e.dst_label)):
                seen = labels.setdefault(vid, lab)
                if seen != lab:
                    raise ValidationError(
                        f"vertex {vid} labeled both {seen!r} and {lab!r}"
                    )
        return labels

    def degree(self, vid: int) -> int:
        """Number of edges incident on ``vid`` (in plus out)."""
        return sum(1 for e in self.edges if vid in (e.src_id, e.dst_id))


def make_layer(layer_id: int, edges: Iterable[Edge]) -> Layer:
    """Build a layer, rejecting duplicate 5-tuples."""
    seen: set[Edge] = set()
    for e in edges:
        if e in seen:
            raise ValidationError(f"duplicate edge {e.line()}")
        seen.add(e)
    return Layer(layer_id, frozenset(seen))


def parse_edge_list(text: str, layer_id: int = 0) -> Layer:
    """Parse edge-list text into a :class:`Layer`.

    Errors carry 1-based line numbers.  Comment (``#``) and blank lines
    are skipped.
    """
    edges: set[Edge] = set()
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        if len(parts) != 5:
            raise ParseError(
                f"expected 5 comma-separated fields, got {len(parts)}", line_no
            )
        el, sid_s, sl, did_s, dl = (p.strip() for p in parts)
        try:
            sid, did = int(sid_s), int(did_s)
        except ValueError:
            raise ParseError(f"vertex IDs must be integers: {line!r}", line_no)
        try:
            e = make_edge(el, sid, sl, did, dl)
        except ValidationError as exc:
            raise ValidationError(f"line {line_no}: {exc}") from None
        if e in edges:
            raise ValidationError(f"line {line_no}: duplicate edge {e.line()}")
        edges.add(e)
    return Layer(layer_id, frozenset(edges))


def serialize_edge_list(layer: Layer) -> str:
    """Inverse of :func:`parse_edge_list`; edges in canonical order."""
    return "".join(e.line() + "\n" for e in layer.sorted_edges)


@dataclass(frozen=True)
class AdjacencyList:
    """Per-vertex incident edges (both directions), canonically ordered."""

    entries: Mapping[int, tuple[Edge, ...]]

    def incident(self, vid: int) -> tuple[Edge, ...]:
        return self.entries.get(vid, ())


def build_adjacency_list(layer: Layer) -> AdjacencyList:
    """Index a layer by vertex: every edge appears under both endpoints."""
    entries: dict[int, list[Edge]] = {}
    for e in layer.edges:
        entries.setdefault(e.src_id, []).append(e)
        entries.setdefault(e.dst_id, []).append(e)
    return AdjacencyList(
        {vid: tuple(sorted(es, key=edge_sort_key)) for vid, es in entries.items()}
    )


@dataclass(frozen=True)
class HoMLN:
    """A homogeneous multilayer network: layers over one vertex universe.

    ``vertex_labels`` is the cross-layer label map.  Use
    :meth:`from_layers` to build one with consistency checking; the bare
    constructor trusts its arguments.
    """

    layers: tuple[Layer, ...]
    vertex_labels: Mapping[int, str]

    @classmethod
    def from_layers(cls, layers: Sequence[Layer]) -> "HoMLN":
        labels: dict[int, str] = {}
        for layer in layers:
            for vid, lab in layer.vertex_labels.items():
                seen = labels.setdefault(vid, lab)
                if seen != lab:
                    raise ValidationError(
                        f"vertex {vid} labeled {seen!r} in one layer "
                        f"and {lab!r} in layer {layer.layer_id}"
                    )
        return cls(tuple(layers), labels)

    @property
    def n_layers(self) -> int:
        return len(self.layers)


def or_conflate(
    mln: HoMLN, layer_ids: Sequence[int] | None = None, layer_id: int = 0
) -> Layer:
    """Boolean OR of the chosen layers: the union of their edge sets.

    ``layer_ids`` are positions into ``mln.layers``; ``None`` means all
    layers.  The selection must be non-empty and in range.
    """
    if layer_ids is None:
        chosen = list(range(mln.n_layers))
    else:
        chosen = list(layer_ids)
    if not chosen:
        raise ValidationError("conflation needs at least one layer")
    edges: set[Edge] = set()
    for i in chosen:
        if i < 0 or i >= mln.n_layers:
            raise ValidationError(f"unknown layer index {i}")
        edges |= mln.layers[i].edges
    return Layer(layer_id, frozenset(edges))
