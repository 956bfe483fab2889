"""Immutable simple graphs with the BFS primitives the rest of the package builds on.

Vertices are always 0..n-1. Adjacency lists are sorted tuples, so graphs are
hashable, comparable and safe to share between construction stages.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

INFINITE = math.inf


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph; ``adjacency[v]`` is the sorted neighbor tuple of v."""

    n: int
    adjacency: tuple[tuple[int, ...], ...]
    m: int

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def degrees(self) -> list[int]:
        return [len(nbrs) for nbrs in self.adjacency]

    def edges(self) -> Iterator[tuple[int, int]]:
        """Yield edges (u, v) with u < v in lexicographic order."""
        for u, nbrs in enumerate(self.adjacency):
            for v in nbrs:
                if u < v:
                    yield (u, v)

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adjacency[u]

    def regular_degree(self) -> int | None:
        """The common degree if the graph is regular, else None."""
        if self.n == 0:
            return None
        d = len(self.adjacency[0])
        for nbrs in self.adjacency:
            if len(nbrs) != d:
                return None
        return d

    def average_degree(self) -> float:
        if self.n == 0:
            return 0.0
        return 2.0 * self.m / self.n


def from_edges(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a Graph from an edge iterable, rejecting loops and duplicates."""
    adj: list[list[int]] = [[] for _ in range(n)]
    seen: set[tuple[int, int]] = set()
    m = 0
    for u, v in edges:
        if not (0 <= u < n and 0 <= v < n):
            raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
        if u == v:
            raise ValueError(f"self-loop at vertex {u}")
        key = (u, v) if u < v else (v, u)
        if key in seen:
            raise ValueError(f"duplicate edge {key}")
        seen.add(key)
        adj[u].append(v)
        adj[v].append(u)
        m += 1
    return Graph(n=n, adjacency=tuple(tuple(sorted(a)) for a in adj), m=m)


@dataclass(frozen=True)
class VertexSet:
    """A sorted, duplicate-free subset of the vertices of a graph on host_n vertices."""

    members: tuple[int, ...]
    host_n: int

    def __post_init__(self):
        prev = -1
        for v in self.members:
            if not (0 <= v < self.host_n):
                raise ValueError(f"vertex {v} out of range for host_n={self.host_n}")
            if v <= prev:
                raise ValueError("members must be strictly increasing")
            prev = v

    @classmethod
    def from_iterable(cls, items: Iterable[int], host_n: int) -> "VertexSet":
        return cls(members=tuple(sorted(set(items))), host_n=host_n)

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, v: int) -> bool:
        lo, hi = 0, len(self.members)
        while lo < hi:
            mid = (lo + hi) // 2
            if self.members[mid] < v:
                lo = mid + 1
            else:
                hi = mid
        return lo < len(self.members) and self.members[lo] == v

    def as_set(self) -> set[int]:
        return set(self.members)


@dataclass(frozen=True)
class LayerDecomposition:
    """Distance layers around a base set; layers[h] holds the vertices at distance h."""

    layers: tuple[VertexSet, ...]

    def __len__(self) -> int:
        return len(self.layers)

    def __getitem__(self, h: int) -> VertexSet:
        return self.layers[h]

    def ball(self, h: int) -> set[int]:
        """Union of layers 0..h."""
        out: set[int] = set()
        for layer in self.layers[: h + 1]:
            out.update(layer.members)
        return out


def girth(g: Graph) -> float:
    """Length of a shortest cycle, or INFINITE if the graph is acyclic.

    One truncated BFS per root; a cross edge seen from depth dx closes a cycle
    of length dist[x] + dist[w] + 1 through the root, and the minimum of these
    over all roots is exact. Roots stop exploring once 2*depth + 1 reaches the
    best cycle found so far, which keeps the scan cheap on low-girth graphs.
    """
    n = g.n
    adj = g.adjacency
    best = INFINITE
    dist = [0] * n
    parent = [-1] * n
    stamp = [-1] * n
    for root in range(n):
        if best == 3:
            break
        stamp[root] = root
        dist[root] = 0
        parent[root] = -1
        queue = deque([root])
        while queue:
            x = queue.popleft()
            dx = dist[x]
            if 2 * dx + 1 >= best:
                break
            for w in adj[x]:
                if stamp[w] != root:
                    stamp[w] = root
                    dist[w] = dx + 1
                    parent[w] = x
                    queue.append(w)
                elif parent[x] != w:
                    c = dx + dist[w] + 1
                    if c < best:
                        best = c
    return best


def distance_layers(g: Graph, base: VertexSet, h_max: int) -> LayerDecomposition:
    """Multi-source BFS layers 0..h_max around base; trailing empty layers are trimmed."""
    if len(base) == 0:
        raise ValueError("base set must be nonempty")
    if h_max < 0:
        raise ValueError("h_max must be nonnegative")
    seen = [False] * g.n
    frontier = list(base.members)
    for v in frontier:
        seen[v] = True
    layers = [VertexSet(members=tuple(base.members), host_n=g.n)]
    for _ in range(h_max):
        nxt = []
        for x in frontier:
            for w in g.adjacency[x]:
                if not seen[w]:
                    seen[w] = True
                    nxt.append(w)
        if not nxt:
            break
        nxt.sort()
        layers.append(VertexSet(members=tuple(nxt), host_n=g.n))
        frontier = nxt
    return LayerDecomposition(layers=tuple(layers))


def neighborhood(g: Graph, s: VertexSet) -> VertexSet:
    """All vertices with at least one neighbor in s. May intersect s itself."""
    out: set[int] = set()
    for v in s.members:
        out.update(g.adjacency[v])
    return VertexSet.from_iterable(out, g.n)


def is_biregular(
    g: Graph,
    side_a: VertexSet,
    side_b: VertexSet,
    deg_a: int,
    deg_b: int,
) -> bool:
    """True iff (side_a, side_b) partition the vertices, every edge crosses sides,
    and degrees are exactly deg_a on side_a and deg_b on side_b."""
    a = side_a.as_set()
    b = side_b.as_set()
    if a & b or len(a) + len(b) != g.n:
        return False
    for v in a:
        nbrs = g.adjacency[v]
        if len(nbrs) != deg_a or any(w not in b for w in nbrs):
            return False
    for v in b:
        nbrs = g.adjacency[v]
        if len(nbrs) != deg_b or any(w not in a for w in nbrs):
            return False
    return True


def connected_components(g: Graph) -> list[list[int]]:
    seen = [False] * g.n
    comps = []
    for start in range(g.n):
        if seen[start]:
            continue
        seen[start] = True
        comp = [start]
        queue = deque([start])
        while queue:
            x = queue.popleft()
            for w in g.adjacency[x]:
                if not seen[w]:
                    seen[w] = True
                    comp.append(w)
                    queue.append(w)
        comps.append(sorted(comp))
    return comps


def is_connected(g: Graph) -> bool:
    return g.n <= 1 or len(connected_components(g)) == 1


def bfs_distances(g: Graph, sources: Sequence[int], cutoff: float = INFINITE) -> dict[int, int]:
    """Distances from the nearest source, for vertices within cutoff."""
    dist = {s: 0 for s in sources}
    queue = deque(sources)
    while queue:
        x = queue.popleft()
        dx = dist[x]
        if dx >= cutoff:
            continue
        for w in g.adjacency[x]:
            if w not in dist:
                dist[w] = dx + 1
                queue.append(w)
    return dist


def write_edge_list(g: Graph, path: str | Path) -> None:
    """Write the 'n m' header line followed by one 'u v' line per edge, u < v."""
    with open(path, "w") as fh:
        fh.write(f"{g.n} {g.m}\n")
        for u, v in g.edges():
            fh.write(f"{u} {v}\n")


def read_edge_list(path: str | Path) -> Graph:
    """Read the edge-list format written by write_edge_list.

    Loops, duplicate edges, out-of-range endpoints and count mismatches are
    all rejected.
    """
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValueError("expected header line 'n m'")
        n, m = int(header[0]), int(header[1])
        edges = []
        for line in fh:
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"malformed edge line: {line!r}")
            u, v = int(parts[0]), int(parts[1])
            if u >= v:
                raise ValueError(f"edge lines must satisfy u < v, got {u} {v}")
            edges.append((u, v))
    if len(edges) != m:
        raise ValueError(f"header claims {m} edges, found {len(edges)}")
    return from_edges(n, edges)
