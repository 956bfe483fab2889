"""Shared fixtures: small named graphs and brute-force oracles."""

import itertools

import pytest

from girthplant.graphs import Graph, from_edges, INFINITE


def cycle_graph(n: int) -> Graph:
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> Graph:
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_graph(n: int) -> Graph:
    return from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def star_graph(leaves: int) -> Graph:
    # center is vertex 0
    return from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen_graph() -> Graph:
    edges = []
    for i in range(5):
        edges.append((i, (i + 1) % 5))            # outer 5-cycle
        edges.append((5 + i, 5 + ((i + 2) % 5)))  # inner pentagram
        edges.append((i, 5 + i))                  # spokes
    return from_edges(10, edges)


def brute_force_girth(g: Graph) -> float:
    """Independent girth oracle: scan vertex subsets for an induced cycle.

    A subset forms a cycle iff it induces a connected 2-regular subgraph. Only
    usable for small n; intended as a cross-check for the BFS implementation.
    """
    assert g.n <= 16, "oracle is exponential in n"
    best = INFINITE
    verts = list(range(g.n))
    for size in range(3, g.n + 1):
        if size >= best:
            break
        for sub in itertools.combinations(verts, size):
            inside = set(sub)
            degs = [sum(1 for w in g.adjacency[v] if w in inside) for v in sub]
            if any(d != 2 for d in degs):
                continue
            # connectivity of the induced subgraph
            seen = {sub[0]}
            stack = [sub[0]]
            while stack:
                x = stack.pop()
                for w in g.adjacency[x]:
                    if w in inside and w not in seen:
                        seen.add(w)
                        stack.append(w)
            if len(seen) == size:
                best = min(best, size)
                break
    return best


@pytest.fixture
def k4():
    return complete_graph(4)


@pytest.fixture
def c6():
    return cycle_graph(6)


@pytest.fixture
def c10():
    return cycle_graph(10)


@pytest.fixture
def petersen():
    return petersen_graph()
