"""Admissible physical path catalogs.

For every unordered PoP pair we enumerate up to K shortest simple paths whose
length stays within the optical reach (default 750 km, no regeneration).
Enumeration is a Yen-style deviation search on the physical multigraph.

Ordering contract: within a pair, paths are sorted by (length, edge-id
sequence); the lexicographic tiebreak makes catalogs reproducible across runs
and platforms. Candidates longer than the reach are pruned eagerly, which is
safe because a deviation parent is never longer than its children in the
enumeration order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass
from fractions import Fraction
from typing import IO, Iterable

from .netmodel import Instance, PhysicalGraph


@dataclass(frozen=True)
class PhysPath:
    """Simple physical path between two PoPs, stored in canonical orientation
    (from the smaller endpoint id)."""

    edges: tuple[str, ...]
    nodes: tuple[str, ...]
    length_km: Fraction

    @property
    def ends(self) -> tuple[str, str]:
        return (self.nodes[0], self.nodes[-1])

    @property
    def interior(self) -> tuple[str, ...]:
        return self.nodes[1:-1]

    def __len__(self) -> int:
        return len(self.edges)


def _walk_nodes(graph: PhysicalGraph, start: str, edge_ids: tuple[str, ...]) -> tuple[str, ...]:
    nodes = [start]
    at = start
    for eid in edge_ids:
        at = graph.edge(eid).other(at)
        nodes.append(at)
    return tuple(nodes)


def _dijkstra(graph: PhysicalGraph, source: str, target: str,
              banned_nodes: frozenset[str] = frozenset(),
              banned_edges: frozenset[str] = frozenset(),
              max_len=None) -> tuple[Fraction, tuple[str, ...]] | None:
    """Shortest source->target path avoiding banned nodes/edges.

    Ties resolve to the lexicographically smallest edge-id sequence; returns
    (length, edge ids) or None. `max_len` prunes states beyond the reach.
    """
    done: set[str] = set()
    heap: list[tuple[Fraction, tuple[str, ...], str]] = [(Fraction(0), (), source)]
    while heap:
        dist, eids, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == target:
            return dist, eids
        for e in graph.incident(u):
            if e.id in banned_edges:
                continue
            w = e.other(u)
            if w in banned_nodes or w in done:
                continue
            nd = dist + e.length_km
            if max_len is not None and nd > max_len:
                continue
            heapq.heappush(heap, (nd, eids + (e.id,), w))
    return None


def k_shortest_bounded(graph: PhysicalGraph, i: str, j: str, k: int,
                       max_len_km) -> list[PhysPath]:
    """Up to `k` shortest simple i-j paths no longer than `max_len_km`.

    Returns fewer than `k` paths only when no further bounded simple path
    exists. Output is ascending by (length, edge-id sequence).
    """
    if i == j:
        raise ValueError("path endpoints coincide")
    for n in (i, j):
        if not graph.has_node(n):
            raise ValueError(f"unknown node {n!r}")
    if k < 1:
        raise ValueError("k must be >= 1")
    bound = max_len_km if isinstance(max_len_km, Fraction) else Fraction(str(max_len_km))

    first = _dijkstra(graph, i, j, max_len=bound)
    if first is None:
        return []
    # (length, edge ids, node ids), popped in non-decreasing length order
    heap: list[tuple[Fraction, tuple[str, ...], tuple[str, ...]]] = []
    seen: set[tuple[str, ...]] = {first[1]}
    heapq.heappush(heap, (first[0], first[1], _walk_nodes(graph, i, first[1])))
    accepted: list[tuple[Fraction, tuple[str, ...], tuple[str, ...]]] = []

    while heap:
        length, eids, nids = heapq.heappop(heap)
        if len(accepted) >= k and length > accepted[k - 1][0]:
            break  # all remaining paths are strictly longer than the k-th
        accepted.append((length, eids, nids))
        # spur at every position of the accepted path
        for t in range(len(eids)):
            spur_node = nids[t]
            root_eids = eids[:t]
            root_len = sum((graph.edge(e).length_km for e in root_eids), Fraction(0))
            banned_edges = set()
            for alen, aeids, anids in accepted:
                if aeids[:t] == root_eids and len(aeids) > t:
                    banned_edges.add(aeids[t])
            banned_nodes = frozenset(nids[:t])  # keep spur paths simple
            spur = _dijkstra(graph, spur_node, j,
                             banned_nodes=banned_nodes,
                             banned_edges=frozenset(banned_edges),
                             max_len=bound - root_len)
            if spur is None:
                continue
            cand_eids = root_eids + spur[1]
            if cand_eids in seen:
                continue
            seen.add(cand_eids)
            heapq.heappush(heap, (root_len + spur[0], cand_eids,
                                  _walk_nodes(graph, i, cand_eids)))

    accepted.sort(key=lambda a: (a[0], a[1]))
    return [PhysPath(edges=eids, nodes=nids, length_km=length)
            for length, eids, nids in accepted[:k]]


class PathCatalog:
    """All admissible paths of an instance plus the incidence indexes the
    model builder and the transit metrics need.

    `pair_paths[(i, j)]` is the ordered per-pair list (i < j); `paths` is the
    global union in pair order, and a path's position in it serves as its
    stable id for variable naming.
    """

    def __init__(self, pair_paths: dict[tuple[str, str], tuple[PhysPath, ...]]):
        self.pair_paths = dict(sorted(pair_paths.items()))
        self.paths: tuple[PhysPath, ...] = tuple(
            p for plist in self.pair_paths.values() for p in plist)
        self._index = {p: idx for idx, p in enumerate(self.paths)}
        self._endpoint: dict[str, list[PhysPath]] = {}
        self._through: dict[str, list[PhysPath]] = {}
        self._on_edge: dict[str, list[PhysPath]] = {}
        for p in self.paths:
            for n in p.ends:
                self._endpoint.setdefault(n, []).append(p)
            for n in p.nodes:
                self._through.setdefault(n, []).append(p)
            for e in p.edges:
                self._on_edge.setdefault(e, []).append(p)

    def index(self, path: PhysPath) -> int:
        return self._index[path]

    def endpoint_paths(self, node: str) -> tuple[PhysPath, ...]:
        """Paths with an end node at `node` (the delta_P index)."""
        return tuple(self._endpoint.get(node, ()))

    def paths_through(self, node: str) -> tuple[PhysPath, ...]:
        """Paths containing `node`, endpoints included."""
        return tuple(self._through.get(node, ()))

    def paths_on_edge(self, edge_id: str) -> tuple[PhysPath, ...]:
        return tuple(self._on_edge.get(edge_id, ()))

    def empty_pairs(self) -> tuple[tuple[str, str], ...]:
        """PoP pairs with no admissible path at all."""
        return tuple(pair for pair, plist in self.pair_paths.items() if not plist)

    def __len__(self) -> int:
        return len(self.paths)


def build_catalog(instance: Instance) -> PathCatalog:
    """Per-pair k-shortest catalogs over all unordered PoP pairs.

    Pairs without a bounded path get an empty entry; whether that is fatal
    depends on the architecture (the model builders decide).
    """
    pops = sorted(instance.pops)
    pair_paths = {}
    for a_idx, a in enumerate(pops):
        for b in pops[a_idx + 1:]:
            plist = k_shortest_bounded(instance.graph, a, b,
                                       instance.max_paths_per_pair,
                                       instance.max_path_km)
            pair_paths[(a, b)] = tuple(plist)
    return PathCatalog(pair_paths)


def dump_paths(catalog: PathCatalog, out: IO[str]) -> None:
    """Write a catalog as text: `<i> <j> <length> <edge> <edge> ...` lines."""
    for (i, j), plist in catalog.pair_paths.items():
        if not plist:
            out.write(f"{i} {j} - EMPTY\n")
        for p in plist:
            out.write(f"{i} {j} {p.length_km} {' '.join(p.edges)}\n")


def load_paths(inp: IO[str], graph: PhysicalGraph) -> PathCatalog:
    """Inverse of dump_paths; lengths are recomputed and checked."""
    pair_paths: dict[tuple[str, str], list[PhysPath]] = {}
    for line in inp:
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        i, j = parts[0], parts[1]
        pair_paths.setdefault((i, j), [])
        if parts[2] == "-" and parts[3] == "EMPTY":
            continue
        eids = tuple(parts[3:])
        nodes = _walk_nodes(graph, i, eids)
        if nodes[-1] != j:
            raise ValueError(f"edge walk of {i}-{j} path ends at {nodes[-1]}")
        length = sum((graph.edge(e).length_km for e in eids), Fraction(0))
        if length != Fraction(parts[2]):
            raise ValueError(f"stored length {parts[2]} != recomputed {length}")
        pair_paths[(i, j)].append(PhysPath(edges=eids, nodes=nodes, length_km=length))
    return PathCatalog({k: tuple(v) for k, v in pair_paths.items()})
