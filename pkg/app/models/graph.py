from __future__ import annotations

from dataclasses import dataclass
from typing import FrozenSet, Iterable, Tuple

from app.core.exceptions import InvalidInputError

Edge = Tuple[int, int]


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..vertex_count-1; edges stored as (u, v) with u < v."""

    vertex_count: int
    edges: FrozenSet[Edge]

    def __init__(self, vertex_count: int, edges: Iterable[Tuple[int, int]] = ()):
        if vertex_count < 1:
            raise InvalidInputError(f"a graph needs at least one vertex, got {vertex_count}")
        seen = set()
        for u, v in edges:
            if u == v:
                raise InvalidInputError(f"self-loop at vertex {u}")
            if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                raise InvalidInputError(f"edge ({u}, {v}) names a vertex outside 0..{vertex_count - 1}")
            edge = (min(u, v), max(u, v))
            if edge in seen:
                raise InvalidInputError(f"duplicate edge {edge}")
            seen.add(edge)
        object.__setattr__(self, "vertex_count", vertex_count)
        object.__setattr__(self, "edges", frozenset(seen))

    @classmethod
    def complete(cls, n: int) -> Graph:
        return cls(n, ((u, v) for u in range(n) for v in range(u + 1, n)))

    @classmethod
    def path(cls, n: int) -> Graph:
        return cls(n, ((i, i + 1) for i in range(n - 1)))

    @classmethod
    def cycle(cls, n: int) -> Graph:
        if n < 3:
            raise InvalidInputError(f"a cycle needs at least 3 vertices, got {n}")
        return cls(n, [(i, i + 1) for i in range(n - 1)] + [(0, n - 1)])

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def degree(self, vertex: int) -> int:
        return sum(1 for e in self.edges if vertex in e)

    def delete_edge(self, edge: Edge) -> Graph:
        return Graph(self.vertex_count, self.edges - {edge})

    def contract_edge(self, edge: Edge) -> Graph:
        """Merge v into u and renumber the vertices above v; parallel edges collapse."""
        u, v = edge

        def relabel(w: int) -> int:
            w = u if w == v else w
            return w - 1 if w > v else w

        merged = {
            (min(a, b), max(a, b))
            for a, b in ((relabel(x), relabel(y)) for x, y in self.edges if (x, y) != edge)
            if a != b
        }
        return Graph(self.vertex_count - 1, merged)

    def canonical_key(self) -> Tuple[int, Tuple[Edge, ...]]:
        """Labelled form after sorting vertices by degree; equal keys imply isomorphic graphs."""
        order = sorted(range(self.vertex_count), key=lambda w: (self.degree(w), w))
        rank = {w: i for i, w in enumerate(order)}
        return self.vertex_count, tuple(sorted((min(rank[a], rank[b]), max(rank[a], rank[b])) for a, b in self.edges))
