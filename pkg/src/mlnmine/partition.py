"""Range-based vertex partitioning of a graph's adjacency list.

A partitioning is an ordered list of disjoint, ascending vertex-ID
ranges that together cover every vertex present in the graph.  Each
partition owns the adjacency entries of the vertices in its range; an
edge whose endpoints fall in two different ranges is replicated into
both partitions, so each partition can expand its own vertices without
looking anywhere else.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Mapping

from .errors import ConfigError, RoutingError
from .graph import Edge, Layer, build_adjacency_list


@dataclass(frozen=True)
class RangePartitioning:
    """Disjoint ascending vertex-ID ranges ``[lo, hi]`` (inclusive)."""

    boundaries: tuple[tuple[int, int], ...]

    def __post_init__(self):
        prev_hi = None
        for lo, hi in self.boundaries:
            if lo > hi:
                raise ConfigError(f"empty range [{lo}, {hi}]")
            if prev_hi is not None and lo <= prev_hi:
                raise ConfigError("ranges must be disjoint and ascending")
            prev_hi = hi

    @property
    def p(self) -> int:
        return len(self.boundaries)

    def owner_of(self, vid: int) -> int:
        """Index of the partition whose range contains ``vid``."""
        for i, (lo, hi) in enumerate(self.boundaries):
            if lo <= vid <= hi:
                return i
        raise RoutingError(f"vertex {vid} is outside every partition range")

    def text(self) -> str:
        return ",".join(f"{lo}-{hi}" for lo, hi in self.boundaries)


def parse_ranges(text: str) -> RangePartitioning:
    """Parse ``"1-3,4-5"`` style explicit range lists."""
    boundaries = []
    for part in text.split(","):
        part = part.strip()
        lo_s, sep, hi_s = part.partition("-")
        if not sep:
            raise ConfigError(f"bad range {part!r}, expected LO-HI")
        try:
            boundaries.append((int(lo_s), int(hi_s)))
        except ValueError:
            raise ConfigError(f"bad range {part!r}, expected LO-HI") from None
    if not boundaries:
        raise ConfigError("empty range list")
    return RangePartitioning(tuple(boundaries))


def make_ranges(
    layer: Layer, p: int, strategy: str = "equal-load"
) -> RangePartitioning:
    """Split the layer's vertex IDs into ``p`` ranges.

    ``equal-width`` cuts the ID span into equally wide stripes;
    ``equal-load`` walks the IDs in ascending order and cuts so each
    range carries roughly the same number of edge endpoints.  ``p``
    larger than the number of distinct vertex IDs is clamped with a
    warning.  Missing IDs inside a range are fine.
    """
    if p < 1:
        raise ConfigError(f"partition count must be >= 1, got {p}")
    if strategy not in ("equal-load", "equal-width"):
        raise ConfigError(f"unknown partition strategy {strategy!r}")
    vids = sorted(layer.vertex_ids)
    if not vids:
        return RangePartitioning(((1, 1),))
    if p > len(vids):
        warnings.warn(
            f"clamping partition count {p} to {len(vids)} distinct vertex IDs"
        )
        p = len(vids)

    if strategy == "equal-width":
        lo, hi = vids[0], vids[-1]
        width = -(-(hi - lo + 1) // p)
        boundaries = []
        for i in range(p):
            a = lo + i * width
            if a > hi:
                break
            boundaries.append((a, min(a + width - 1, hi)))
        return RangePartitioning(tuple(boundaries))

    # equal-load: endpoint counts per vertex.
    load = {vid: 0 for vid in vids}
    for e in layer.edges:
        load[e.src_id] += 1
        load[e.dst_id] += 1
    remaining_load = sum(load.values())
    remaining_parts = p
    boundaries = []
    start_idx = 0
    acc = 0
    for i, vid in enumerate(vids):
        acc += load[vid]
        vids_left = len(vids) - i - 1
        target = remaining_load / remaining_parts
        # Close the range once its load target is met, but always leave
        # at least one vertex for each remaining range; close early when
        # exactly one vertex per remaining range is left.
        can_close = vids_left >= remaining_parts - 1
        must_close = vids_left == remaining_parts - 1
        if (acc >= target and can_close) or must_close:
            boundaries.append((vids[start_idx], vid))
            start_idx = i + 1
            remaining_load -= acc
            acc = 0
            remaining_parts -= 1
            if remaining_parts == 0:
                break
    if start_idx < len(vids) and remaining_parts > 0:
        boundaries.append((vids[start_idx], vids[-1]))
    return RangePartitioning(tuple(boundaries))


@dataclass(frozen=True)
class AdjacencyListPartition:
    """The adjacency entries owned by one vertex-ID range.

    Boundary edges appear in every partition that owns one of their
    endpoints, so expansion at owned vertices never needs remote data.
    """

    partition_id: int
    lo: int
    hi: int
    entries: Mapping[int, tuple[Edge, ...]]

    def owns(self, vid: int) -> bool:
        return self.lo <= vid <= self.hi

    def incident(self, vid: int) -> tuple[Edge, ...]:
        return self.entries.get(vid, ())


def partition_adjacency(
    layer: Layer, ranges: RangePartitioning
) -> list[AdjacencyListPartition]:
    """Split a layer's adjacency list by the given vertex ranges.

    Every vertex present in the layer must fall in some range.
    """
    full = build_adjacency_list(layer)
    per_part: list[dict[int, tuple[Edge, ...]]] = [{} for _ in ranges.boundaries]
    for vid, edges in full.entries.items():
        per_part[ranges.owner_of(vid)][vid] = edges
    return [
        AdjacencyListPartition(i, lo, hi, per_part[i])
        for i, (lo, hi) in enumerate(ranges.boundaries)
    ]
