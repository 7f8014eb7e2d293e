"""Edge-at-a-time instance expansion and duplicate elimination.

Growing every instance by every incident edge at every vertex generates
each connected (k+1)-edge instance at least once from some k-edge parent
(drop one leaf-ish edge of the target and the remainder is a connected
parent).  The same target is usually reached from several parents, so a
dedup pass by canonical instance key restores set semantics.  Together
the two steps enumerate exactly the connected instances of each size,
which :func:`brute_force_enumerate` cross-checks by independent means.
"""

from __future__ import annotations

from .canonical import Instance, canonicalize_instance, insert_edge, instance_key
from .errors import ContractViolation, ValidationError
from .graph import Edge, Layer, edge_sort_key
from .partition import AdjacencyListPartition, make_ranges, partition_adjacency

ORACLE_EDGE_CAP = 14


def expand_instance(
    inst: Instance, alp: AdjacencyListPartition
) -> list[Instance]:
    """All one-edge extensions of ``inst`` at vertices the partition owns.

    Unconstrained: every incident edge not already in the instance is
    attached.  Vertices outside the partition's range contribute nothing,
    which is what makes each (instance, vertex) expansion happen in
    exactly one partition when instances are routed to all owners.
    Output is duplicate-free and canonically ordered.
    """
    edge_set = set(inst.edges)
    new_edges: set[Edge] = set()
    for vid in _vertices(inst):
        if alp.owns(vid):
            for e in alp.incident(vid):
                if e not in edge_set:
                    new_edges.add(e)
    return [
        insert_edge(inst, e)[0] for e in sorted(new_edges, key=edge_sort_key)
    ]


def _vertices(inst: Instance) -> set[int]:
    ids = set()
    for e in inst.edges:
        ids.add(e.src_id)
        ids.add(e.dst_id)
    return ids


def dedup(instances: list[Instance]) -> list[Instance]:
    """Collapse repeated edge sets to one instance each, sorted by key.

    All inputs must be canonical and of one size; a mixed-size batch is
    a contract violation.
    """
    by_key: dict[bytes, Instance] = {}
    size = None
    for inst in instances:
        if size is None:
            size = inst.size
        elif inst.size != size:
            raise ContractViolation("dedup batch mixes instance sizes")
        by_key.setdefault(instance_key(inst), inst)
    return [by_key[k] for k in sorted(by_key)]


def enumerate_by_expansion(
    layer: Layer, k_max: int, partitions: int = 1
) -> dict[int, list[Instance]]:
    """Connected instances of sizes 1..k_max via expand-then-dedup.

    The reference single-graph loop: seed with single edges, then expand
    every survivor in every partition and dedup the union.  Results are
    independent of ``partitions``.
    """
    ranges = make_ranges(layer, partitions)
    alps = partition_adjacency(layer, ranges)
    level = dedup([Instance((e,), True) for e in layer.sorted_edges])
    out: dict[int, list[Instance]] = {}
    if not level:
        return out
    out[1] = level
    for k in range(2, k_max + 1):
        grown: list[Instance] = []
        for alp in alps:
            for inst in level:
                grown.extend(expand_instance(inst, alp))
        level = dedup(grown)
        if not level:
            break
        out[k] = level
    return out


def brute_force_enumerate(layer: Layer, k_max: int) -> dict[int, list[Instance]]:
    """Independent oracle: grow connected edge subsets breadth-first.

    Works on edge subsets (frozensets) rather than canonical tuples, so
    it shares no code path with expansion.  Refuses layers above
    ``ORACLE_EDGE_CAP`` edges.
    """
    if len(layer.edges) > ORACLE_EDGE_CAP:
        raise ValidationError(
            f"oracle accepts at most {ORACLE_EDGE_CAP} edges, "
            f"got {len(layer.edges)}"
        )
    incident: dict[int, set[Edge]] = {}
    for e in layer.edges:
        incident.setdefault(e.src_id, set()).add(e)
        incident.setdefault(e.dst_id, set()).add(e)

    def neighbors(subset: frozenset[Edge]) -> set[Edge]:
        near: set[Edge] = set()
        for e in subset:
            near |= incident[e.src_id]
            near |= incident[e.dst_id]
        return near - subset

    levels: dict[int, set[frozenset[Edge]]] = {
        1: {frozenset((e,)) for e in layer.edges}
    }
    for k in range(2, k_max + 1):
        nxt: set[frozenset[Edge]] = set()
        for subset in levels[k - 1]:
            for e in neighbors(subset):
                nxt.add(subset | {e})
        if not nxt:
            break
        levels[k] = nxt
    return {
        k: dedup([canonicalize_instance(Instance(tuple(s))) for s in subsets])
        for k, subsets in levels.items()
    }
