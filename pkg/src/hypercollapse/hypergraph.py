"""Exact multi-hypergraph engine: sampling, collapse, identifiability.

A hypergraph is a multiset of vertex subsets.  Size-1 edges are patches
(the fuel of collapse), the empty edge is debris (what a fully collapsed
edge turns into).  Removing a vertex deletes it from every incident
edge, so the total edge count is conserved by every operation here; that
conservation is the bookkeeping backbone of the whole model.

This module is the ground truth the reduced chain is validated against,
so it favors exactness and simplicity over scale.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Optional

import numpy as np

from .series import BetaSeries


class EdgeStats(NamedTuple):
    patches: int
    debris: int
    total: int


class Hypergraph:
    """Multiset of hyperedges over vertices 0..n_vertices-1.

    Edges are stored canonically as sorted tuples of distinct vertex ids
    with integer multiplicities, so two hypergraphs compare equal exactly
    when they are the same multiset over the same vertex count.
    """

    __slots__ = ("n_vertices", "_edges")

    def __init__(self, n_vertices: int, edges: Iterable[Iterable[int]] = ()) -> None:
        n_vertices = int(n_vertices)
        if n_vertices < 1:
            raise ValueError("need at least one vertex")
        self.n_vertices = n_vertices
        self._edges: Counter = Counter()
        for edge in edges:
            self.add_edge(edge)

    def _canonical(self, vertices: Iterable[int]) -> tuple[int, ...]:
        vs = [int(v) for v in vertices]
        edge = tuple(sorted(set(vs)))
        if len(edge) != len(vs):
            raise ValueError(f"duplicate vertex in edge {vs}")
        if edge and (edge[0] < 0 or edge[-1] >= self.n_vertices):
            raise ValueError(f"vertex id out of range in edge {vs}")
        return edge

    def add_edge(self, vertices: Iterable[int], multiplicity: int = 1) -> None:
        if multiplicity < 1:
            raise ValueError("multiplicity must be >= 1")
        self._edges[self._canonical(vertices)] += multiplicity

    def edge_counts(self) -> dict[tuple[int, ...], int]:
        """Mapping edge -> multiplicity (a copy)."""
        return dict(self._edges)

    def instances(self) -> list[tuple[int, ...]]:
        """Edge instances expanded by multiplicity, in canonical order."""
        out = []
        for edge in sorted(self._edges, key=lambda e: (len(e), e)):
            out.extend([edge] * self._edges[edge])
        return out

    def stats(self) -> EdgeStats:
        """(patches, debris, total) counted with multiplicity."""
        patches = sum(m for e, m in self._edges.items() if len(e) == 1)
        debris = self._edges.get((), 0)
        total = sum(self._edges.values())
        return EdgeStats(patches, debris, total)

    def copy(self) -> "Hypergraph":
        out = Hypergraph(self.n_vertices)
        out._edges = Counter(self._edges)
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Hypergraph):
            return NotImplemented
        return self.n_vertices == other.n_vertices and self._edges == other._edges

    def __repr__(self) -> str:
        s = self.stats()
        return (f"Hypergraph(n_vertices={self.n_vertices}, edges={s.total}, "
                f"patches={s.patches}, debris={s.debris})")


def sample_poisson(n_vertices: int, series: BetaSeries,
                   rng: np.random.Generator) -> Hypergraph:
    """Draw a Poisson(beta) hypergraph.

    For each size j the total number of j-edges is Poisson(N*bj), and each
    edge sits on an independently uniform j-subset, drawn with replacement
    across edges so repeated subsets accumulate multiplicity.
    """
    if series.degree > n_vertices:
        raise ValueError("series degree exceeds the vertex count")
    h = Hypergraph(n_vertices)
    for j, bj in enumerate(series.coeffs):
        count = int(rng.poisson(n_vertices * bj))
        for _ in range(count):
            h.add_edge(_uniform_subset(n_vertices, j, rng))
    return h


def _uniform_subset(n: int, size: int, rng: np.random.Generator) -> tuple[int, ...]:
    picked: set[int] = set()
    while len(picked) < size:
        picked.add(int(rng.integers(n)))
    return tuple(sorted(picked))


def remove_vertex(h: Hypergraph, v: int) -> Hypergraph:
    """Delete v from every edge containing it; multiplicity merges onto the rest.

    The edge count is conserved; v carries no edges afterwards.  No patch
    is required on v here, the permitted-collapse rule lives in
    `collapse_all`.
    """
    if not 0 <= v < h.n_vertices:
        raise ValueError(f"vertex {v} out of range")
    out = Hypergraph(h.n_vertices)
    for edge, mult in h._edges.items():
        if v in edge:
            edge = tuple(u for u in edge if u != v)
        out._edges[edge] += mult
    return out


@dataclass
class CollapseOutcome:
    """Result of a full collapse.

    ``identified`` is the removal order (the set is invariant across
    random seeds, the order is not).  ``identifiable_edge_count`` is the
    debris created by the collapse, i.e. final minus initial debris, so
    edges that started as debris are not counted.  ``trajectory`` rows are
    (removed, patches, debris) after each removal when recording was
    requested.
    """

    identified: list[int]
    stable: Hypergraph
    identifiable_edge_count: int
    trajectory: Optional[np.ndarray] = None


def collapse_all(h: Hypergraph, rng: np.random.Generator,
                 record_trajectory: bool = False) -> CollapseOutcome:
    """Collapse until no patches remain, picking uniformly among patch instances.

    The engine works on the canonical instance ordering, so equal
    hypergraph values collapse identically under the same random stream
    regardless of how they were built.
    """
    instances = h.instances()
    members = [set(e) for e in instances]
    incidence: list[list[int]] = [[] for _ in range(h.n_vertices)]
    for eid, edge in enumerate(instances):
        for v in edge:
            incidence[v].append(eid)

    bag = [eid for eid, edge in enumerate(instances) if len(edge) == 1]
    patches = len(bag)
    debris0 = sum(1 for edge in instances if not edge)
    debris = debris0
    identified: list[int] = []
    trajectory = [(0, patches, debris)] if record_trajectory else None

    while bag:
        k = int(rng.integers(len(bag)))
        eid = bag[k]
        if len(members[eid]) != 1:
            # stale entry: this patch lost its vertex to an earlier removal
            bag[k] = bag[-1]
            bag.pop()
            continue
        (v,) = members[eid]
        for other in incidence[v]:
            s = members[other]
            s.remove(v)
            left = len(s)
            if left == 1:
                bag.append(other)
                patches += 1
            elif left == 0:
                # was a patch on v, now debris
                patches -= 1
                debris += 1
        incidence[v].clear()
        identified.append(v)
        if record_trajectory:
            trajectory.append((len(identified), patches, debris))

    stable = Hypergraph(h.n_vertices)
    for s in members:
        stable._edges[tuple(sorted(s))] += 1
    traj_arr = np.asarray(trajectory, dtype=np.int64) if record_trajectory else None
    return CollapseOutcome(identified, stable, debris - debris0, traj_arr)


def identifiable_set(h: Hypergraph) -> set[int]:
    """Deterministic peeling fixpoint.

    Seed with every vertex under a patch; a vertex joins when some edge
    contains it with all other members already in the set.  Equals the set
    removed by any full collapse (multiplicities are irrelevant here).
    """
    edges = [e for e in h._edges if e]
    remaining = [len(e) for e in edges]
    incidence: dict[int, list[int]] = {}
    for eid, edge in enumerate(edges):
        for v in edge:
            incidence.setdefault(v, []).append(eid)

    identified: set[int] = set()
    queue = [e[0] for e in edges if len(e) == 1]
    while queue:
        v = queue.pop()
        if v in identified:
            continue
        identified.add(v)
        for eid in incidence.get(v, ()):
            remaining[eid] -= 1
            if remaining[eid] == 1:
                for u in edges[eid]:
                    if u not in identified:
                        queue.append(u)
                        break
    return identified


def write_hypergraph(h: Hypergraph, path: str) -> None:
    """Write the line-oriented format: a {"N": n} header, then one JSON
    array of sorted vertex ids per edge instance (repeats = multiplicity)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(json.dumps({"N": h.n_vertices}) + "\n")
        for edge in h.instances():
            fh.write(json.dumps(list(edge)) + "\n")


def read_hypergraph(path: str) -> Hypergraph:
    with open(path, encoding="utf-8") as fh:
        header = json.loads(fh.readline())
        if not isinstance(header, dict) or "N" not in header:
            raise ValueError(f"{path}: first line must be a JSON object with key 'N'")
        h = Hypergraph(int(header["N"]))
        for line in fh:
            line = line.strip()
            if line:
                h.add_edge(json.loads(line))
    return h
